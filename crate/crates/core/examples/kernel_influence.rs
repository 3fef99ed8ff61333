//! Random-walk kernel between two small attributed graphs, and which
//! elements move it most.
//!
//! `cargo run -p kgreason --example kernel_influence`

use kgreason::kernel::{influence, kernel_similarity, key_elements, AttributedGraph, Category, KernelConfig};

/// Triangle on the first three labels; any further label hangs off node 0.
fn triangle(labels: &[&str]) -> AttributedGraph {
    let mut g = AttributedGraph::with_nodes(labels);
    g.add_edge(0, "p", 1, true);
    g.add_edge(1, "p", 2, true);
    g.add_edge(2, "p", 0, true);
    for extra in 3..labels.len() {
        g.add_edge(0, "q", extra, true);
    }
    g
}

fn main() -> kgreason::Result<()> {
    let a = triangle(&["Honolulu", "Hawaii", "United States"]);
    let b = triangle(&["Chicago", "Illinois", "United States", "Michelle Obama"]);

    let cfg = KernelConfig::default();
    let plain = kernel_similarity(&a, &b, &cfg.without_background())?;
    let with_bg = kernel_similarity(&a, &b, &cfg)?;
    println!("kernel: {:.6} plain, {:.6} with background clique", plain.similarity, with_bg.similarity);

    let pair = influence(&a, &b, &cfg)?;
    for (side, report) in pair.reports.iter().enumerate() {
        println!("graph {}", side + 1);
        for c in [Category::Attribute, Category::Node, Category::Edge] {
            // skip the background clique borrowed from the other graph
            let top: Vec<String> = report
                .category(c)
                .iter()
                .filter(|i| !i.background)
                .take(3)
                .map(|i| format!("{} {:+.2e}", i.element, i.value))
                .collect();
            println!("  {c:?}: {}", top.join(", "));
        }
        let keys = key_elements(report, 0.5)?;
        println!("  key attributes {:?}", keys.attributes);
    }
    Ok(())
}
