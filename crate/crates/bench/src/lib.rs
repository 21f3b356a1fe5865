//! Shared fixtures for the criterion benchmarks.

use linkcw_core::linkage::{parse_lengths, Linkage};

/// Linkages exercised by the benchmarks, smallest first.
pub fn bench_linkages() -> Vec<(&'static str, Linkage)> {
    [
        ("two-circles-4", "1,1,1,1/2"),
        ("torus-5", "1.2,1,1,0.8,2.2"),
        ("equilateral-5", "1,1,1,1,1"),
        ("mixed-6", "1,2,2,3,3,4"),
        ("equilateral-7", "1,1,1,1,1,1,1"),
    ]
    .into_iter()
    .map(|(name, text)| (name, parse_lengths(text).expect("valid fixture")))
    .collect()
}
