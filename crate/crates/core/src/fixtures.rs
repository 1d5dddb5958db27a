//! Standard instances used by tests, benches and docs.

use crate::rational::{int, rat};
use crate::shift::{CanonicalFunction, ShiftSpec};

fn spec(table: &[i128], slope: (i128, i128), period: usize) -> ShiftSpec {
    let table = table.iter().map(|&v| int(v)).collect();
    ShiftSpec::new(CanonicalFunction::with_period(table, rat(slope.0, slope.1), period).unwrap()).unwrap()
}

/// `f(n) = ⌈n/2⌉`: exactly the golden mean shift (no `11`).
pub fn golden_mean() -> ShiftSpec {
    spec(&[1, 1, 2, 2, 3, 3], (1, 2), 2)
}

/// `f(n) = ⌈3n/5⌉`, binary with `α_f = 3/5`.
pub fn ceil_three_fifths() -> ShiftSpec {
    spec(&[1, 2, 2, 3, 3], (3, 5), 5)
}

/// `f(n) = ⌈6n/5⌉`, alphabet `{0, 1, 2}` with `α_f = 6/5`.
pub fn ceil_six_fifths() -> ShiftSpec {
    spec(&[2, 3, 4, 5, 6], (6, 5), 5)
}

/// `f ≡ 0`: the single point `∞0∞`.
pub fn zero_shift() -> ShiftSpec {
    spec(&[0], (0, 1), 1)
}

/// `f(n) = n`: the full binary shift.
pub fn full_binary() -> ShiftSpec {
    spec(&[1], (1, 1), 1)
}
