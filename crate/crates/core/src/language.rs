//! Exact counts of `L_n(X_f)`, `B_n`, `G_n` and two-sided entropy brackets.
//!
//! Counts are exact integers; logarithms are taken only when building a
//! bracket.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::enumerate::{self, BudgetHit, Visitor, WalkOptions};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::shift::{self, ShiftSpec};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum CountClass {
    L,
    B,
    G,
    Avoiding(Word),
}

impl fmt::Display for CountClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountClass::L => f.write_str("L"),
            CountClass::B => f.write_str("B"),
            CountClass::G => f.write_str("G"),
            CountClass::Avoiding(w) => write!(f, "L-avoiding-{w}"),
        }
    }
}

impl From<CountClass> for String {
    fn from(c: CountClass) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for CountClass {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        match s.as_str() {
            "L" => Ok(CountClass::L),
            "B" => Ok(CountClass::B),
            "G" => Ok(CountClass::G),
            other => other
                .strip_prefix("L-avoiding-")
                .map(|w| w.parse().map(CountClass::Avoiding))
                .unwrap_or_else(|| Err(Error::Parse(format!("unknown count class {other:?}")))),
        }
    }
}

/// `|class_n|` for `n = 1..=n_max`; `counts[i]` holds `n = i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSeries {
    pub class: CountClass,
    #[serde(with = "biguint_strings")]
    pub counts: Vec<BigUint>,
}

impl CountSeries {
    fn from_depths(class: CountClass, depths: &[u64]) -> Self {
        Self {
            class,
            counts: depths.iter().skip(1).map(|&c| BigUint::from(c)).collect(),
        }
    }

    pub fn n_max(&self) -> usize {
        self.counts.len()
    }

    /// `|class_n|`, `n >= 1`.
    pub fn count(&self, n: usize) -> &BigUint {
        &self.counts[n - 1]
    }

    pub fn count_u64(&self, n: usize) -> u64 {
        self.count(n).to_u64().expect("count fits in u64")
    }

    /// `(1/n) log |class_n|`, `None` when the class is empty at `n`.
    pub fn growth(&self, n: usize) -> Option<f64> {
        let c = self.count(n);
        (!c.is_zero()).then(|| ln_big(c) / n as f64)
    }

    /// First `(m, n)` with `|L_{m+n}| > |L_m|·|L_n|`, if any.
    pub fn submultiplicativity_violation(&self) -> Option<(usize, usize)> {
        let n_max = self.n_max();
        for m in 1..n_max {
            for n in m..=n_max - m {
                if self.count(m + n) > &(self.count(m) * self.count(n)) {
                    return Some((m, n));
                }
            }
        }
        None
    }
}

pub(crate) fn ln_big(c: &BigUint) -> f64 {
    match c.to_f64() {
        Some(v) if v.is_finite() => v.ln(),
        _ => {
            // Too large for f64: scale by a power of two.
            let bits = c.bits();
            let shift = bits.saturating_sub(64);
            let top = (c >> shift).to_f64().unwrap_or(f64::MAX);
            top.ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

mod biguint_strings {
    use num_bigint::BigUint;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for c in v {
            seq.serialize_element(&c.to_str_radix(10))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| {
                BigUint::parse_bytes(s.as_bytes(), 10)
                    .ok_or_else(|| serde::de::Error::custom(format!("not a decimal integer: {s:?}")))
            })
            .collect()
    }
}

struct LengthCounter(Vec<u64>);

impl Visitor for LengthCounter {
    fn visit(&mut self, letters: &[u8], _: &[u64]) -> bool {
        self.0[letters.len()] += 1;
        true
    }

    fn merge(&mut self, other: Self) {
        add_into(&mut self.0, &other.0);
    }
}

fn add_into(acc: &mut [u64], other: &[u64]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

/// `mean < α` for every nonempty prefix and suffix.
pub(crate) fn good_from_sums(sums: &[u64], alpha: &Rational) -> bool {
    let n = sums.len() - 1;
    let (num, den) = (*alpha.numer(), *alpha.denom());
    let total = sums[n];
    (1..=n)
        .all(|k| (sums[k] as i128) * den < num * k as i128 && ((total - sums[n - k]) as i128) * den < num * k as i128)
}

/// `mean >= α` (non-strict).
pub(crate) fn bad_from_sums(sums: &[u64], alpha: &Rational) -> bool {
    let n = sums.len() - 1;
    (sums[n] as i128) * *alpha.denom() >= *alpha.numer() * n as i128
}

struct ClassCounter {
    alpha: Rational,
    words: Vec<u64>,
    bad: Vec<u64>,
    good: Vec<u64>,
}

impl Visitor for ClassCounter {
    fn visit(&mut self, letters: &[u8], sums: &[u64]) -> bool {
        let n = letters.len();
        self.words[n] += 1;
        if bad_from_sums(sums, &self.alpha) {
            self.bad[n] += 1;
        } else if good_from_sums(sums, &self.alpha) {
            self.good[n] += 1;
        }
        true
    }

    fn merge(&mut self, other: Self) {
        add_into(&mut self.words, &other.words);
        add_into(&mut self.bad, &other.bad);
        add_into(&mut self.good, &other.good);
    }
}

/// `|L_n|`, `|B_n|` and `|G_n|` from one pass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageCounts {
    pub words: CountSeries,
    pub bad: CountSeries,
    pub good: CountSeries,
}

/// Runs the walk, and on a budget hit finds the longest prefix of the series
/// that does fit so the error can carry it.
fn walk_with_partial<V, F>(
    spec: &ShiftSpec,
    n_max: usize,
    opts: &WalkOptions,
    make: F,
    partial: impl Fn(V, usize) -> CountSeries,
) -> Result<V>
where
    V: Visitor,
    F: Fn(usize) -> V + Sync,
{
    match enumerate::walk(spec, n_max, opts, || make(n_max)) {
        Ok(v) => Ok(v),
        Err(BudgetHit { budget }) => {
            let mut best = None;
            for d in (1..n_max).rev() {
                if let Ok(v) = enumerate::walk(spec, d, opts, || make(d)) {
                    best = Some(partial(v, d));
                    break;
                }
            }
            let partial = best.unwrap_or_else(|| partial(make(0), 0));
            Err(Error::BudgetExceeded {
                budget,
                partial: Box::new(partial),
            })
        }
    }
}

/// `|L_n(X_f)|` for `n = 1..=n_max`.
pub fn count_words(spec: &ShiftSpec, n_max: usize) -> Result<CountSeries> {
    count_words_with(spec, n_max, &WalkOptions::default())
}

pub fn count_words_with(spec: &ShiftSpec, n_max: usize, opts: &WalkOptions) -> Result<CountSeries> {
    let counter = walk_with_partial(
        spec,
        n_max,
        opts,
        |d| LengthCounter(vec![0; d + 1]),
        |v, _| CountSeries::from_depths(CountClass::L, &v.0),
    )?;
    Ok(CountSeries::from_depths(CountClass::L, &counter.0))
}

/// `L`, `B` and `G` counts together. Requires a canonical spec, since the
/// classes are defined through `α_f`.
pub fn count_language(spec: &ShiftSpec, n_max: usize, opts: &WalkOptions) -> Result<LanguageCounts> {
    spec.require_canonical()?;
    let alpha = spec.alpha();
    let make = |d: usize| ClassCounter {
        alpha,
        words: vec![0; d + 1],
        bad: vec![0; d + 1],
        good: vec![0; d + 1],
    };
    let c = walk_with_partial(spec, n_max, opts, make, |v, _| {
        CountSeries::from_depths(CountClass::L, &v.words)
    })?;
    Ok(LanguageCounts {
        words: CountSeries::from_depths(CountClass::L, &c.words),
        bad: CountSeries::from_depths(CountClass::B, &c.bad),
        good: CountSeries::from_depths(CountClass::G, &c.good),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WordClass {
    B,
    G,
}

/// `|B_n|` or `|G_n|`. Only nonempty words are counted; `ε` belongs to both
/// classes by convention.
pub fn count_class(spec: &ShiftSpec, class: WordClass, n_max: usize) -> Result<CountSeries> {
    let counts = count_language(spec, n_max, &WalkOptions::default())?;
    Ok(match class {
        WordClass::B => counts.bad,
        WordClass::G => counts.good,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyBracket {
    /// `max_n (1/n) log |G_n|`, or 0 when no `G`-word exists.
    pub lower: f64,
    /// `min_n (1/n) log |L_n|`.
    pub upper: f64,
    /// Witness lengths; `n_lower = 0` marks the trivial bound `h >= 0`.
    pub n_lower: usize,
    pub n_upper: usize,
    /// Exact arguments of the witnessing logarithms, `|G_{n_lower}|` and `|L_{n_upper}|`.
    pub lower_count: String,
    pub upper_count: String,
    pub lower_method: String,
    pub upper_method: String,
    /// Running bounds after each `n = 1..=n_max`.
    pub lower_series: Vec<f64>,
    pub upper_series: Vec<f64>,
}

pub const LOWER_METHOD: &str = "free concatenation of G-words: h_top >= (1/n) log|G_n|";
pub const UPPER_METHOD: &str = "subadditivity of log|L_n|: h_top <= (1/n) log|L_n|";

/// Rigorous bracket on `h_top(X_f)` from exact counts up to `n_max`.
pub fn entropy_bracket(spec: &ShiftSpec, n_max: usize) -> Result<EntropyBracket> {
    let counts = count_language(spec, n_max, &WalkOptions::default())?;
    Ok(bracket_from_counts(&counts))
}

pub fn bracket_from_counts(counts: &LanguageCounts) -> EntropyBracket {
    let n_max = counts.words.n_max();
    let mut upper = f64::INFINITY;
    let mut n_upper = 0;
    let mut lower = 0.0;
    let mut n_lower = 0;
    let mut upper_series = Vec::with_capacity(n_max);
    let mut lower_series = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if let Some(u) = counts.words.growth(n) {
            if u < upper {
                upper = u;
                n_upper = n;
            }
        }
        if let Some(l) = counts.good.growth(n) {
            if l > lower {
                lower = l;
                n_lower = n;
            }
        }
        upper_series.push(upper);
        lower_series.push(lower);
    }
    let count_at = |s: &CountSeries, n: usize| {
        if n == 0 {
            "0".to_string()
        } else {
            s.count(n).to_str_radix(10)
        }
    };
    EntropyBracket {
        lower,
        upper,
        n_lower,
        n_upper,
        lower_count: count_at(&counts.good, n_lower),
        upper_count: count_at(&counts.words, n_upper),
        lower_method: LOWER_METHOD.into(),
        upper_method: UPPER_METHOD.into(),
        lower_series,
        upper_series,
    }
}

/// Growth of the `B` class, reported next to the `h_top` upper bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BGrowth {
    /// `max_n (1/n) log |B_n|`; estimates a limsup.
    pub value: f64,
    pub n_at: usize,
    /// `(1/n) log |B_n|`, `None` where `B_n` is empty.
    pub series: Vec<Option<f64>>,
    pub upper_bound_h_top: f64,
}

pub fn h_of_b(spec: &ShiftSpec, n_max: usize) -> Result<BGrowth> {
    let counts = count_language(spec, n_max, &WalkOptions::default())?;
    let series: Vec<Option<f64>> = (1..=n_max).map(|n| counts.bad.growth(n)).collect();
    let (n_at, value) = series
        .iter()
        .enumerate()
        .filter_map(|(i, g)| g.map(|g| (i + 1, g)))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(BGrowth {
        value,
        n_at,
        series,
        upper_bound_h_top: bracket_from_counts(&counts).upper,
    })
}

struct AvoidCounter<'a> {
    target: &'a [u8],
    counts: Vec<u64>,
}

impl Visitor for AvoidCounter<'_> {
    fn visit(&mut self, letters: &[u8], _: &[u64]) -> bool {
        // Every proper prefix already avoids the target, so only a suffix
        // occurrence is new.
        if letters.ends_with(self.target) {
            return false;
        }
        self.counts[letters.len()] += 1;
        true
    }

    fn merge(&mut self, other: Self) {
        add_into(&mut self.counts, &other.counts);
    }
}

/// Counts words of `L_n(X_f)` with no occurrence of `w`.
pub fn forbid_word_count(spec: &ShiftSpec, w: &Word, n_max: usize) -> Result<CountSeries> {
    if !shift::is_admissible(spec, w)? {
        return Err(Error::Inadmissible(w.clone()));
    }
    let class = CountClass::Avoiding(w.clone());
    if w.is_empty() {
        return Ok(CountSeries {
            class,
            counts: vec![BigUint::zero(); n_max],
        });
    }
    let counter = walk_with_partial(
        spec,
        n_max,
        &WalkOptions::default(),
        |d| AvoidCounter {
            target: w.letters(),
            counts: vec![0; d + 1],
        },
        |v, _| CountSeries::from_depths(class.clone(), &v.counts),
    )?;
    Ok(CountSeries::from_depths(class, &counter.counts))
}
