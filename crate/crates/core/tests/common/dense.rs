//! Dense evaluation of the product-graph kernel with explicit Kronecker matrices,
//! and of the line-graph loss built from it.

use kgreason::collective::frobenius_loss;
use kgreason::kernel::{augment_with_background, AttributedGraph};
use kgreason::mining::{PredicateSimilarityModel, SquareMatrix};
use kgreason::query::QueryGraph;
use nalgebra::{DMatrix, DVector};

fn attribute_matrix(g: &AttributedGraph, vocab: &[String]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(g.node_count(), vocab.len());
    for (i, row) in g.attributes.iter().enumerate() {
        for (label, v) in row {
            let l = vocab.iter().position(|x| x == label).unwrap();
            m[(i, l)] = *v;
        }
    }
    m
}

fn adjacency(g: &AttributedGraph) -> DMatrix<f64> {
    let n = g.node_count();
    DMatrix::from_fn(n, n, |i, j| g.adjacency.get(i, j))
}

/// `q'(I - c Nx Ax)^-1 Nx p` with uniform `q`, `p`, solved by LU.
pub fn kernel(g1: &AttributedGraph, g2: &AttributedGraph, c: f64) -> f64 {
    let mut vocab: Vec<String> = g1
        .attributes
        .iter()
        .chain(&g2.attributes)
        .flat_map(|m| m.keys().cloned())
        .collect();
    vocab.sort();
    vocab.dedup();
    let n1 = attribute_matrix(g1, &vocab);
    let n2 = attribute_matrix(g2, &vocab);
    let ax = adjacency(g1).kronecker(&adjacency(g2));
    let dim = ax.nrows();
    let nx_full = n1.kronecker(&n2);
    // (N1 (x) N2) restricted to matching columns l (x) l is the diagonal of N1 N2'
    let m = vocab.len();
    let nx = DVector::from_fn(dim, |r, _| (0..m).map(|l| nx_full[(r, l * m + l)]).sum());
    let nx = DMatrix::from_diagonal(&nx);
    let p = DVector::from_element(dim, 1.0 / dim as f64);
    let system = DMatrix::identity(dim, dim) - c * &nx * &ax;
    let x = system.lu().solve(&(&nx * &p)).expect("nonsingular system");
    p.dot(&x)
}

/// `|a - b|` within `abs`, or within `rel` of the larger magnitude.
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    let d = (a - b).abs();
    d <= abs || d <= rel * a.abs().max(b.abs())
}

/// One original element shifted by `h`: an undirected edge `(i, j)` or attribute `label` of node `i`.
#[derive(Clone, Copy)]
pub enum Shift<'a> {
    None,
    Edge(usize, usize, f64),
    Attr(usize, &'a str, f64),
}

pub fn shifted(g: &AttributedGraph, shift: Shift) -> AttributedGraph {
    let mut g = g.clone();
    match shift {
        Shift::None => {}
        Shift::Edge(i, j, h) => {
            g.adjacency.add(i, j, h);
            if i != j {
                g.adjacency.add(j, i, h);
            }
        }
        Shift::Attr(i, label, h) => {
            *g.attributes[i].entry(label.to_owned()).or_insert(0.0) += h;
        }
    }
    g
}

/// Loss through dense kernels with `shift` applied to segment `target`. Backgrounds
/// come from the unshifted segments, so they stay fixed while an original element moves.
pub fn loss(
    query: &QueryGraph,
    segs: &[AttributedGraph],
    model: &PredicateSimilarityModel,
    c: f64,
    background: bool,
    target: usize,
    shift: Shift,
) -> f64 {
    let m = segs.len();
    let mut h1 = SquareMatrix::zeros(m);
    let mut h2 = SquareMatrix::zeros(m);
    let at = |g: &AttributedGraph, s: usize| if s == target { shifted(g, shift) } else { g.clone() };
    let kern = |a: usize, b: usize| -> f64 {
        let (x, y) = if background {
            augment_with_background(&segs[a], &segs[b])
        } else {
            (segs[a].clone(), segs[b].clone())
        };
        // a self pair shares one segment, so the shift applies to both sides
        kernel(&at(&x, a), &at(&y, b), c)
    };
    for n in 0..m {
        for k in n + 1..m {
            if !query.edges_adjacent(n, k) {
                continue;
            }
            let s = model.similarity(&query.edges[n].predicate, &query.edges[k].predicate).unwrap();
            let v = kern(n, k) / (kern(n, n) * kern(k, k)).sqrt();
            h1.set(n, k, s);
            h1.set(k, n, s);
            h2.set(n, k, v);
            h2.set(k, n, v);
        }
    }
    frobenius_loss(&h1, &h2)
}
