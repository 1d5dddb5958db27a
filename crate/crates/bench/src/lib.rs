//! Shared inputs for the benchmarks.

use bds_core::{fixtures, ShiftSpec};

/// Named instances, smallest alphabet first.
pub fn instances() -> Vec<(&'static str, ShiftSpec)> {
    vec![
        ("ceil_n_half", fixtures::golden_mean()),
        ("ceil_3n_fifths", fixtures::ceil_three_fifths()),
        ("ceil_6n_fifths", fixtures::ceil_six_fifths()),
    ]
}

/// Lengths that take a few milliseconds per instance.
pub fn count_length(name: &str) -> usize {
    match name {
        "ceil_6n_fifths" => 11,
        _ => 20,
    }
}
