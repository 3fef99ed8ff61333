mod common;

use common::scaling::{ratios, time_extraction, SIZES};

#[test]
fn subgraph_extraction_scales_near_linearly() {
    let times: Vec<_> = SIZES.iter().map(|&n| time_extraction(n)).collect();
    for (i, r) in ratios(&times).into_iter().enumerate() {
        assert!(r <= 2.5, "{} -> {} nodes: {:?} -> {:?} ({r:.2}x)", SIZES[i], SIZES[i + 1], times[i], times[i + 1]);
    }
    println!("{times:?}");
}
