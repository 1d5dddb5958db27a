//! Bounded density shifts `X_f`: the defining function, its validation, and
//! word membership.
//!
//! A function is stored as a finite table `f(1..=N)` plus an eventually
//! periodic tail `f(n) = f(n - P) + c·P` for `n > N`. With `P = 1` this is an
//! affine tail of slope `c`; larger periods make `⌈n/2⌉`, `⌊3n/5⌋` and every
//! other `⌊nα⌋`-type function exact. Because `f(n) - c·n` is eventually
//! periodic, monotonicity and subadditivity can be decided by a finite check.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::enumerate::{self, Bounds, Visitor, WalkOptions};
use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalFunction {
    #[serde(with = "rational::serde_str_vec")]
    table: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    tail_slope: Rational,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    tail_period: usize,
}

fn one() -> usize {
    1
}

fn is_one(p: &usize) -> bool {
    *p == 1
}

impl CanonicalFunction {
    /// Table plus affine tail.
    pub fn new(table: Vec<Rational>, tail_slope: Rational) -> Result<Self> {
        Self::with_period(table, tail_slope, 1)
    }

    pub fn with_period(table: Vec<Rational>, tail_slope: Rational, tail_period: usize) -> Result<Self> {
        let f = Self {
            table,
            tail_slope,
            tail_period,
        };
        f.check_shape()?;
        Ok(f)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(text)?;
        f.check_shape()?;
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    fn check_shape(&self) -> Result<()> {
        if self.table.is_empty() {
            return Err(Error::Invalid("table must hold at least f(1)".into()));
        }
        if self.tail_slope.is_negative() {
            return Err(Error::Invalid("tail slope must be nonnegative".into()));
        }
        if self.tail_period == 0 || self.tail_period > self.table.len() {
            return Err(Error::Invalid(format!(
                "tail period must lie in 1..={}",
                self.table.len()
            )));
        }
        Ok(())
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    pub fn tail_slope(&self) -> Rational {
        self.tail_slope
    }

    pub fn tail_period(&self) -> usize {
        self.tail_period
    }

    /// `f(n)`; `f(0) = 0`.
    pub fn eval(&self, n: usize) -> Rational {
        let big_n = self.table.len();
        if n == 0 {
            return Rational::zero();
        }
        if n <= big_n {
            return self.table[n - 1];
        }
        let period = self.tail_period;
        let blocks = (n - big_n).div_ceil(period);
        let base = n - blocks * period;
        self.table[base - 1] + self.tail_slope * int((blocks * period) as i128)
    }

    /// Largest `n` for which the finite checks below are complete: one full
    /// tail period past the table.
    fn exact_horizon(&self) -> usize {
        self.table.len() + self.tail_period
    }
}

/// Outcome of checking the three canonical-function conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub canonical: bool,
    /// `n` such that `f(n + 1) < f(n)` (with `n = 0` meaning `f(1) < 0`).
    pub monotonicity_violations: Vec<usize>,
    /// Pairs `(m, n)`, `m <= n`, with `f(m + n) > f(m) + f(n)`.
    pub subadditivity_violations: Vec<(usize, usize)>,
    /// Every pair with `m, n <= window` was examined.
    pub window: usize,
    /// True when the window is large enough to decide the property for all
    /// `m, n` (it always is for this representation).
    pub exact: bool,
    /// `α_f = 0`.
    pub trivial: bool,
}

impl ValidationReport {
    pub fn summary(&self) -> String {
        if self.canonical {
            format!("canonical (all m, n <= {} checked, exact)", self.window)
        } else {
            format!(
                "not canonical: {} monotonicity and {} subadditivity violations",
                self.monotonicity_violations.len(),
                self.subadditivity_violations.len()
            )
        }
    }
}

/// Checks `f(0) = 0 <= f(1) <= f(2) <= ...` and `f(m + n) <= f(m) + f(n)`.
///
/// With `R = N - P + 1`, `g(n) = f(n) - c·n` satisfies `g(n + P) = g(n)` for
/// `n >= R`, so every pair reduces (by residue) to one with `m, n <= N + P`.
/// Checking that box therefore decides both properties for all of `ℕ`.
pub fn validate_canonical(f: &CanonicalFunction) -> ValidationReport {
    let window = f.exact_horizon();
    let values: Vec<Rational> = (0..=2 * window).map(|n| f.eval(n)).collect();

    let monotonicity_violations: Vec<usize> = (0..2 * window).filter(|&n| values[n + 1] < values[n]).collect();

    let mut subadditivity_violations = Vec::new();
    for m in 1..=window {
        for n in m..=window {
            if values[m + n] > values[m] + values[n] {
                subadditivity_violations.push((m, n));
            }
        }
    }

    let canonical = monotonicity_violations.is_empty() && subadditivity_violations.is_empty();
    ValidationReport {
        canonical,
        monotonicity_violations,
        subadditivity_violations,
        window,
        exact: true,
        trivial: raw_gradient(f).is_zero(),
    }
}

/// `inf_n f(n)/n` for this representation: the ratio along each tail residue
/// class moves monotonically toward `c`, so the infimum is the smaller of the
/// table minimum and `c`.
fn raw_gradient(f: &CanonicalFunction) -> Rational {
    (1..=f.table_len())
        .map(|n| f.eval(n) / int(n as i128))
        .fold(f.tail_slope, |acc, r| acc.min(r))
}

/// A validated bounded density shift over `{0, ..., ⌊f(1)⌋}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftSpec {
    function: CanonicalFunction,
    max_letter: u8,
    alpha: Rational,
    report: ValidationReport,
}

impl ShiftSpec {
    pub fn new(function: CanonicalFunction) -> Result<Self> {
        let f1 = rational::floor_i128(&function.eval(1));
        if f1 < 0 {
            return Err(Error::Invalid("f(1) is negative: empty shift".into()));
        }
        let max_letter = u8::try_from(f1).map_err(|_| Error::Invalid(format!("alphabet size {} too large", f1 + 1)))?;
        let report = validate_canonical(&function);
        let alpha = raw_gradient(&function);
        Ok(Self {
            function,
            max_letter,
            alpha,
            report,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::new(CanonicalFunction::from_json(text)?)
    }

    pub fn function(&self) -> &CanonicalFunction {
        &self.function
    }

    pub fn max_letter(&self) -> u8 {
        self.max_letter
    }

    pub fn alphabet_size(&self) -> usize {
        usize::from(self.max_letter) + 1
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.report
    }

    pub fn is_canonical(&self) -> bool {
        self.report.canonical
    }

    pub fn is_trivial(&self) -> bool {
        self.alpha.is_zero()
    }

    /// Errors unless the function passed validation.
    pub fn require_canonical(&self) -> Result<()> {
        if self.report.canonical {
            Ok(())
        } else {
            Err(Error::NotCanonical(self.report.summary()))
        }
    }

    pub fn eval(&self, n: usize) -> Rational {
        self.function.eval(n)
    }

    /// `α_f`, exact.
    pub fn alpha(&self) -> Rational {
        self.alpha
    }

    /// Integer window-sum bounds `⌊f(p)⌋` for `p = 0..=max_len`.
    pub fn bounds(&self, max_len: usize) -> Bounds {
        Bounds::new(
            (0..=max_len)
                .map(|p| rational::floor_i128(&self.eval(p)) as i64)
                .collect(),
        )
    }
}

pub fn eval_f(spec: &ShiftSpec, n: usize) -> Rational {
    spec.eval(n)
}

/// `α_f = inf_n f(n)/n`, computed exactly.
pub fn limiting_gradient(spec: &ShiftSpec) -> Rational {
    spec.alpha()
}

/// `w ∈ L(X_f)` iff every window of every length `p` sums to at most `f(p)`.
///
/// The local check is complete: if it passes, `∞0.w0∞` is a point of `X_f`
/// because padding with zeros never raises a window sum above that of a
/// shorter window, and `f` is nondecreasing.
pub fn is_admissible(spec: &ShiftSpec, w: &Word) -> Result<bool> {
    w.check_alphabet(spec.max_letter())?;
    Ok(admissible_unchecked(spec, w))
}

pub(crate) fn admissible_unchecked(spec: &ShiftSpec, w: &Word) -> bool {
    let bounds = spec.bounds(w.len());
    bounds.admits(w.prefix_sums())
}

/// Admissibility of `v` given `v <= w` coordinatewise and `w` admissible.
/// Always true for bounded density shifts; exposed as a property-test hook.
pub fn hereditary_reduce(spec: &ShiftSpec, w: &Word, v: &Word) -> Result<bool> {
    if w.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: w.len(),
            right: v.len(),
        });
    }
    if !v.dominated_by(w) {
        return Err(Error::Invalid(format!("{v} is not coordinatewise below {w}")));
    }
    if !is_admissible(spec, w)? {
        return Err(Error::Inadmissible(w.clone()));
    }
    is_admissible(spec, v)
}

/// Largest letter sum over admissible words of length `p`, for `p = 0..=max_len`.
pub fn max_window_sums(spec: &ShiftSpec, max_len: usize) -> Vec<u64> {
    let bounds = spec.bounds(max_len);
    let m = u64::from(spec.max_letter());
    let mut best = vec![0u64; max_len + 1];
    for p in 1..=max_len {
        // g(p) lies between g(p-1) (append a zero) and min_a g(a) + g(p-a).
        let cap = (1..p)
            .map(|a| best[a] + best[p - a])
            .chain([best[p - 1] + m, bounds.get(p).max(0) as u64])
            .min()
            .unwrap_or(0);
        let mut found = best[p - 1];
        if found < cap {
            let mut letters = Vec::with_capacity(p);
            let mut sums = vec![0u64];
            max_sum_search(&bounds, m, p, cap, &mut letters, &mut sums, &mut found);
        }
        best[p] = found;
    }
    best
}

fn max_sum_search(
    bounds: &Bounds,
    m: u64,
    target_len: usize,
    cap: u64,
    letters: &mut Vec<u8>,
    sums: &mut Vec<u64>,
    best: &mut u64,
) {
    let depth = letters.len();
    let current = sums[depth];
    if depth == target_len {
        *best = (*best).max(current);
        return;
    }
    for a in (0..=m).rev() {
        if *best >= cap {
            return;
        }
        let remaining = (target_len - depth - 1) as u64;
        if current + a + m * remaining <= *best {
            // Smaller letters only lower the optimistic bound further.
            return;
        }
        letters.push(a as u8);
        sums.push(current + a);
        if bounds.admits_last(sums) {
            max_sum_search(bounds, m, target_len, cap, letters, sums, best);
        }
        letters.pop();
        sums.pop();
    }
}

/// Replaces `f` by `f̂(p) = max{Σ w : w ∈ L_p(X_f)}` for `p <= N'`, which is
/// monotone and subadditive and defines the same words up to length `N'`.
///
/// The tail keeps the original period `P` with slope `min(c, f̂(N')/N')`;
/// both are upper bounds for the true limiting gradient. `N'` is raised to
/// at least `P` so the tail is well formed.
pub fn canonicalize(spec: &ShiftSpec, n_prime: usize) -> Result<CanonicalFunction> {
    if n_prime == 0 {
        return Err(Error::Invalid("canonicalization length must be >= 1".into()));
    }
    let period = spec.function().tail_period();
    let len = n_prime.max(period);
    let best = max_window_sums(spec, len);
    let table: Vec<Rational> = best[1..].iter().map(|&s| int(s as i128)).collect();
    let end_ratio = Rational::new(best[len] as i128, len as i128);
    let slope = spec.function().tail_slope().min(end_ratio);
    CanonicalFunction::with_period(table, slope, period)
}

/// `X_α` with `f(n) = ⌊nα⌋`, represented exactly with tail period `denom(α)`.
/// Usually not canonical (the floor is superadditive); membership still uses
/// the raw `f`.
pub fn build_x_alpha(alpha: Rational, n: usize) -> Result<ShiftSpec> {
    if alpha.is_negative() {
        return Err(Error::Invalid("α must be nonnegative".into()));
    }
    let period = usize::try_from(*alpha.denom()).map_err(|_| Error::Invalid("denominator of α too large".into()))?;
    let len = n.max(period).max(1);
    let table = (1..=len)
        .map(|k| int(rational::floor_i128(&(alpha * int(k as i128)))))
        .collect();
    ShiftSpec::new(CanonicalFunction::with_period(table, alpha, period)?)
}

struct ContainmentVisitor<'a> {
    outer: &'a Bounds,
    outer_max: u8,
    witness: Option<Vec<u8>>,
}

impl Visitor for ContainmentVisitor<'_> {
    fn visit(&mut self, letters: &[u8], sums: &[u64]) -> bool {
        if self.witness.is_some() {
            return false;
        }
        let ok = letters.last().is_none_or(|&a| a <= self.outer_max) && self.outer.admits_last(sums);
        if !ok {
            self.witness = Some(letters.to_vec());
        }
        ok
    }

    fn merge(&mut self, other: Self) {
        // Shards merge in lexicographic order: keep the first witness.
        if self.witness.is_none() {
            self.witness = other.witness;
        }
    }
}

/// First word (lexicographic within its length, shortest length first not
/// guaranteed) of `L_{<= n_max}(inner)` that is not admissible in `outer`.
pub fn containment_witness(inner: &ShiftSpec, outer: &ShiftSpec, n_max: usize) -> Result<Option<Word>> {
    let bounds = outer.bounds(n_max);
    let visitor = enumerate::walk(inner, n_max, &WalkOptions::default(), || ContainmentVisitor {
        outer: &bounds,
        outer_max: outer.max_letter(),
        witness: None,
    })
    .expect("walk without a budget cannot fail");
    Ok(visitor.witness.map(Word::new))
}

/// `L_n(inner) ⊆ L(outer)` for every `n <= n_max`.
pub fn check_containment(inner: &ShiftSpec, outer: &ShiftSpec, n_max: usize) -> Result<bool> {
    Ok(containment_witness(inner, outer, n_max)?.is_none())
}

/// `f(n) >= α_f·n`, the Fekete infimum property.
pub fn dominates_gradient(spec: &ShiftSpec, n: usize) -> bool {
    spec.eval(n).cmp(&(spec.alpha() * int(n as i128))) != Ordering::Less
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::rational::rat;
    use crate::word::w;

    #[test]
    fn eval_f_examples() {
        let g = golden_mean();
        assert_eq!(eval_f(&g, 0), int(0));
        assert_eq!(eval_f(&g, 3), int(2));
        for n in 0..60 {
            assert_eq!(eval_f(&g, n), int((n as i128 + 1) / 2), "n = {n}");
        }
        let f = ShiftSpec::new(CanonicalFunction::new(vec![int(1), int(2)], int(1)).unwrap()).unwrap();
        assert_eq!(eval_f(&f, 5), int(5));
    }

    #[test]
    fn ceil_three_fifths_is_exact() {
        let f = ceil_three_fifths();
        for n in 0..80i128 {
            assert_eq!(f.eval(n as usize), int((3 * n + 4) / 5), "n = {n}");
        }
    }

    #[test]
    fn validation_examples() {
        assert!(validate_canonical(golden_mean().function()).canonical);
        let zero = validate_canonical(zero_shift().function());
        assert!(zero.canonical && zero.trivial);

        let bad = CanonicalFunction::new(vec![int(1), int(3)], int(1)).unwrap();
        let report = validate_canonical(&bad);
        assert!(!report.canonical);
        assert!(report.subadditivity_violations.contains(&(1, 1)));
        assert!(report.monotonicity_violations.is_empty());
    }

    #[test]
    fn validation_catches_tail_problems() {
        // Period-2 tail over a rising table: f(4) = f(2) = 2 < f(3) = 3.
        let drop = CanonicalFunction::with_period(vec![int(0), int(2), int(3)], int(0), 2).unwrap();
        let report = validate_canonical(&drop);
        assert!(report.monotonicity_violations.contains(&3));
    }

    #[test]
    fn shape_errors() {
        assert!(CanonicalFunction::new(vec![], int(0)).is_err());
        assert!(CanonicalFunction::new(vec![int(1)], rat(-1, 2)).is_err());
        assert!(CanonicalFunction::with_period(vec![int(1)], int(1), 2).is_err());
        assert!(CanonicalFunction::from_json(r#"{"table":["1/1"],"tail_slope":"1/2","extra":1}"#).is_err());
    }

    #[test]
    fn json_schema() {
        let f = CanonicalFunction::from_json(r#"{ "table": ["1/1","1/1","2/1"], "tail_slope": "1/2" }"#).unwrap();
        assert_eq!(f.table_len(), 3);
        assert_eq!(f.tail_period(), 1);
        assert_eq!(f.to_json(), r#"{"table":["1/1","1/1","2/1"],"tail_slope":"1/2"}"#);
        let g = golden_mean();
        let back = CanonicalFunction::from_json(&g.function().to_json()).unwrap();
        assert_eq!(&back, g.function());
    }

    #[test]
    fn gradient_examples() {
        // Oracle: min of f(n)/n over n <= 200.
        for (spec, expected) in [(golden_mean(), rat(1, 2)), (ceil_three_fifths(), rat(3, 5))] {
            let oracle = (1..=200).map(|n| spec.eval(n) / int(n as i128)).min().unwrap();
            assert_eq!(oracle, expected);
            assert_eq!(limiting_gradient(&spec), expected);
        }
        assert_eq!(limiting_gradient(&zero_shift()), int(0));
    }

    #[test]
    fn membership_examples() {
        let g = golden_mean();
        assert!(!is_admissible(&g, &w("11")).unwrap());
        assert!(is_admissible(&g, &w("101")).unwrap());
        assert!(is_admissible(&g, &Word::empty()).unwrap());
        assert!(!is_admissible(&g, &w("1011")).unwrap());
        assert!(matches!(
            is_admissible(&g, &w("2")),
            Err(Error::LetterOutOfAlphabet { .. })
        ));
    }

    #[test]
    fn hereditary_examples() {
        let g = golden_mean();
        assert!(hereditary_reduce(&g, &w("101"), &w("001")).unwrap());
        assert!(hereditary_reduce(&g, &w("101"), &w("000")).unwrap());
        assert!(hereditary_reduce(&g, &w("101"), &w("100")).unwrap());
        assert!(matches!(
            hereditary_reduce(&g, &w("101"), &w("10")),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(hereditary_reduce(&g, &w("11"), &w("10")).is_err());
    }

    #[test]
    fn canonicalize_examples() {
        let raw = ShiftSpec::new(CanonicalFunction::new(vec![int(1), int(3)], int(1)).unwrap()).unwrap();
        let hat = canonicalize(&raw, 2).unwrap();
        assert_eq!(hat.eval(2), int(2));

        let g = golden_mean();
        let hat = canonicalize(&g, 12).unwrap();
        for p in 0..=30 {
            assert_eq!(hat.eval(p), g.eval(p), "p = {p}");
        }

        let hat = canonicalize(&zero_shift(), 5).unwrap();
        assert!((0..20).all(|p| hat.eval(p).is_zero()));
        assert!(canonicalize(&g, 0).is_err());
    }

    #[test]
    fn x_alpha_examples() {
        let full = build_x_alpha(rat(3, 2), 10).unwrap();
        assert_eq!(full.eval(1), int(1));
        assert_eq!(full.eval(2), int(3));
        assert_eq!(full.max_letter(), 1);
        assert!(!full.is_canonical());

        let trivial = build_x_alpha(rat(3, 5), 10).unwrap();
        assert_eq!(trivial.max_letter(), 0);

        let zero = build_x_alpha(int(0), 4).unwrap();
        assert!((0..10).all(|n| zero.eval(n).is_zero()));

        let half = build_x_alpha(rat(1, 2), 3).unwrap();
        for n in 0..30i128 {
            assert_eq!(half.eval(n as usize), int(n / 2));
        }
        assert!(build_x_alpha(rat(-1, 2), 3).is_err());
    }

    #[test]
    fn containment_examples() {
        let f = ceil_three_fifths();
        let inner = build_x_alpha(f.alpha(), 10).unwrap();
        assert!(check_containment(&inner, &f, 10).unwrap());
        assert!(check_containment(&f, &f, 8).unwrap());

        let full = build_x_alpha(rat(3, 2), 10).unwrap();
        let g = golden_mean();
        assert!(!check_containment(&full, &g, 6).unwrap());
        assert_eq!(containment_witness(&full, &g, 6).unwrap(), Some(w("11")));
    }

    #[test]
    fn gradient_lower_bounds_f() {
        for spec in [golden_mean(), ceil_three_fifths(), zero_shift(), ceil_six_fifths()] {
            for n in 0..100 {
                assert!(dominates_gradient(&spec, n));
            }
        }
    }
}
