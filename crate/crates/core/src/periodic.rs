//! Periodic points, the empirical measures `μ_n` and the letter-frequency
//! certificate for intrinsic ergodicity.
//!
//! An orbit is stored once, as its least rotation (a Lyndon word). `Per(n)`
//! is the set of points of least period at most `n`, which is the same set as
//! `∪_{k<=n} Fix(σ^k)`; `|Per(n)|` counts points, so an orbit of least period
//! `p` contributes `p`.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate;
use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};
use crate::shift::ShiftSpec;
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certification {
    /// `w^∞ ∈ X_f`, proved.
    Certified,
    /// All windows up to this length pass, but that horizon proves nothing.
    VerifiedToHorizon(usize),
    /// A window of this length has too large a sum.
    Refuted(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub primitive_word: Word,
    pub least_period: usize,
    pub certification: Certification,
}

/// Max letter sum over cyclic windows of each length `0..p` of `w^∞`.
fn cyclic_window_maxima(w: &Word) -> Vec<u64> {
    let l = w.letters();
    let p = l.len();
    let mut best = vec![0u64; p];
    for start in 0..p {
        let mut acc = 0u64;
        for r in 1..p {
            acc += u64::from(l[(start + r - 1) % p]);
            best[r] = best[r].max(acc);
        }
    }
    best
}

/// Window length past which the periodic structure of `f` and of `w^∞`
/// line up: `N + lcm(p, P)`. Checking every window up to here, together with
/// `sum(w)/p <= c`, decides membership.
pub fn exact_horizon(spec: &ShiftSpec, w: &Word) -> usize {
    let f = spec.function();
    f.table_len() + w.len().lcm(&f.tail_period())
}

/// Decides whether `w^∞` lies in `X_f`, looking at windows up to `horizon`.
///
/// Let `p = |w|`, `S = sum(w)` and `c(r)` the largest cyclic window sum of
/// length `r < p`; the largest sum over a window of length `kp + r` is
/// `kS + c(r)`. After the direct check:
///
/// * if `S/p < α_f` and `horizon >= p(1 + ⌈pm / (α_f p - S)⌉)`, the density
///   margin covers every longer window;
/// * if `horizon >= N + lcm(p, P)`, each longer window length differs from a
///   checked one by a multiple of `lcm(p, P)`, over which `f` grows by
///   `c·lcm` and the window sum by `(S/p)·lcm`; so `S/p <= c` certifies, and
///   `S/p > c` gives an explicit refuting length (possibly beyond `horizon`).
///
/// Otherwise the answer is `VerifiedToHorizon(horizon)`.
pub fn certify_periodic(spec: &ShiftSpec, w: &Word, horizon: usize) -> Result<Certification> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    w.check_alphabet(spec.max_letter())?;
    let p = w.len();
    let total = w.sum();
    let cyc = cyclic_window_maxima(w);
    let window_max = |q: usize| (q / p) as u64 * total + cyc[q % p];

    let bounds = spec.bounds(horizon);
    if let Some(q) = (1..=horizon).find(|&q| window_max(q) as i64 > bounds.get(q)) {
        return Ok(Certification::Refuted(q));
    }

    let alpha = spec.alpha();
    let density = Rational::new(total as i128, p as i128);
    if density < alpha {
        let m = int(i128::from(spec.max_letter()));
        let margin = alpha * int(p as i128) - int(total as i128);
        let blocks = rational::ceil_i128(&(int(p as i128) * m / margin)) as usize;
        if horizon >= p * (1 + blocks) {
            return Ok(Certification::Certified);
        }
    }

    let f = spec.function();
    let table_len = f.table_len();
    let step = p.lcm(&f.tail_period());
    if horizon < table_len + step {
        return Ok(Certification::VerifiedToHorizon(horizon));
    }
    let slope = f.tail_slope();
    if density <= slope {
        return Ok(Certification::Certified);
    }
    // Slack shrinks by (S/p - c)·step every step; find where it goes negative.
    let drop = (density - slope) * int(step as i128);
    let refuting = (table_len + 1..=table_len + step)
        .map(|q0| {
            let slack = spec.eval(q0) - int(window_max(q0) as i128);
            let j = rational::floor_i128(&(slack / drop)) as usize + 1;
            q0 + j * step
        })
        .min()
        .expect("nonempty range");
    Ok(Certification::Refuted(refuting))
}

/// [`certify_periodic`] at [`exact_horizon`]; never returns `VerifiedToHorizon`.
pub fn certify_exact(spec: &ShiftSpec, w: &Word) -> Result<Certification> {
    certify_periodic(spec, w, exact_horizon(spec, w))
}

/// All Lyndon words of length `<= n` whose every prefix is admissible, in
/// lexicographic order. Generated by the Fredricksen–Kessler–Maiorana
/// recursion over prenecklaces; an inadmissible prefix prunes its subtree
/// because every word extending it contains it.
fn admissible_lyndon_words(spec: &ShiftSpec, n: usize) -> Vec<Word> {
    struct Gen<'a> {
        bounds: &'a enumerate::Bounds,
        n: usize,
        m: u8,
        letters: Vec<u8>,
        sums: Vec<u64>,
        out: Vec<Word>,
    }

    impl Gen<'_> {
        // letters[0..t-1] fixed; `p` is the length of its longest Lyndon prefix.
        fn run(&mut self, t: usize, p: usize) {
            if t > self.n {
                return;
            }
            let start = if t == 1 { 0 } else { self.letters[t - 1 - p] };
            for a in start..=self.m {
                self.letters.push(a);
                self.sums.push(self.sums[t - 1] + u64::from(a));
                let ok = self.bounds.admits_last(&self.sums);
                if ok {
                    let next_p = if t > 1 && a == start { p } else { t };
                    if next_p == t {
                        self.out.push(Word::new(self.letters.clone()));
                    }
                    self.run(t + 1, next_p);
                }
                self.letters.pop();
                self.sums.pop();
                if !ok {
                    break;
                }
            }
        }
    }

    let bounds = spec.bounds(n);
    let mut g = Gen {
        bounds: &bounds,
        n,
        m: spec.max_letter(),
        letters: Vec::with_capacity(n),
        sums: vec![0],
        out: Vec::new(),
    };
    g.run(1, 1);
    g.out
}

/// The primitive orbits making up `Per(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicPoints {
    pub n: usize,
    pub orbits: Vec<PeriodicOrbit>,
    /// `|Per(n)|`: the sum of the orbits' least periods.
    pub per_count: u64,
}

impl PeriodicPoints {
    /// `|Fix(σ^k)|` for `k <= n`.
    pub fn fixed_points(&self, k: usize) -> u64 {
        assert!(k <= self.n, "Fix(σ^{k}) needs orbits up to period {k}");
        self.orbits
            .iter()
            .filter(|o| k.is_multiple_of(o.least_period))
            .map(|o| o.least_period as u64)
            .sum()
    }

    /// Every point, as one period starting at coordinate 0.
    pub fn points(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        self.orbits.iter().flat_map(|o| {
            let l = o.primitive_word.letters();
            (0..l.len()).map(move |r| {
                let mut rot = l[r..].to_vec();
                rot.extend_from_slice(&l[..r]);
                rot
            })
        })
    }
}

/// Orbits of least period `<= n` in `X_f`. Every candidate is decided
/// exactly; an orbit that cannot be decided aborts the enumeration.
pub fn enumerate_per(spec: &ShiftSpec, n: usize) -> Result<PeriodicPoints> {
    if n == 0 {
        return Err(Error::Invalid("period bound must be >= 1".into()));
    }
    let candidates = admissible_lyndon_words(spec, n);
    let decided: Vec<(Word, Certification)> = candidates
        .into_par_iter()
        .map(|w| {
            let c = certify_exact(spec, &w)?;
            Ok((w, c))
        })
        .collect::<Result<_>>()?;
    let mut orbits = Vec::new();
    for (w, c) in decided {
        match c {
            Certification::Certified => orbits.push(PeriodicOrbit {
                least_period: w.len(),
                primitive_word: w,
                certification: c,
            }),
            Certification::Refuted(_) => {}
            Certification::VerifiedToHorizon(horizon) => {
                return Err(Error::UncertifiedOrbit { word: w, horizon });
            }
        }
    }
    let per_count = orbits.iter().map(|o| o.least_period as u64).sum();
    Ok(PeriodicPoints { n, orbits, per_count })
}

/// `μ_n`: uniform on `Per(n)`, recorded through its cylinder counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "MeasureFile", try_from = "MeasureFile")]
pub struct EmpiricalMeasure {
    pub n: usize,
    pub per_count: u64,
    pub word_length_max: usize,
    /// Points `x ∈ Per(n)` with `x_{[0, |w|)} = w`, for `1 <= |w| <= word_length_max`.
    /// Missing words have count 0.
    pub cylinder_counts: BTreeMap<Word, u64>,
}

impl EmpiricalMeasure {
    pub fn count(&self, w: &Word) -> Result<u64> {
        if w.is_empty() {
            return Ok(self.per_count);
        }
        if w.len() > self.word_length_max {
            return Err(Error::CylinderTooLong {
                requested: w.len(),
                stored: self.word_length_max,
            });
        }
        Ok(self.cylinder_counts.get(w).copied().unwrap_or(0))
    }

    /// `μ_n([w]_0)`, exact.
    pub fn measure(&self, w: &Word) -> Result<Rational> {
        Ok(Rational::new(self.count(w)? as i128, self.per_count as i128))
    }

    pub fn measure_f64(&self, w: &Word) -> Result<f64> {
        Ok(self.count(w)? as f64 / self.per_count as f64)
    }

    /// Counts of the single letters `0..=m`.
    pub fn letter_counts(&self, max_letter: u8) -> Vec<u64> {
        (0..=max_letter)
            .map(|a| self.cylinder_counts.get(&Word::new(vec![a])).copied().unwrap_or(0))
            .collect()
    }

    /// First stored `w` breaking `Σ_a μ([wa]) = μ([w]) = Σ_a μ([aw])`, if any.
    pub fn shift_invariance_violation(&self, max_letter: u8) -> Option<Word> {
        for (w, &c) in &self.cylinder_counts {
            if w.len() >= self.word_length_max {
                continue;
            }
            let right: u64 = (0..=max_letter)
                .map(|a| self.count(&w.concat(&Word::new(vec![a]))).unwrap_or(0))
                .sum();
            let left: u64 = (0..=max_letter)
                .map(|a| self.count(&Word::new(vec![a]).concat(w)).unwrap_or(0))
                .sum();
            if right != c || left != c {
                return Some(w.clone());
            }
        }
        None
    }
}

#[derive(Serialize, Deserialize)]
struct CylinderEntry {
    word: Word,
    count: u64,
    measure: String,
    measure_decimal: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureFile {
    n: usize,
    per_count: u64,
    word_length_max: usize,
    cylinders: Vec<CylinderEntry>,
}

impl From<EmpiricalMeasure> for MeasureFile {
    fn from(m: EmpiricalMeasure) -> Self {
        let mut cylinders: Vec<CylinderEntry> = m
            .cylinder_counts
            .iter()
            .map(|(w, &count)| CylinderEntry {
                word: w.clone(),
                count,
                measure: rational::format(&Rational::new(count as i128, m.per_count as i128)),
                measure_decimal: count as f64 / m.per_count as f64,
            })
            .collect();
        cylinders.sort_by(|a, b| a.word.shortlex_cmp(&b.word));
        MeasureFile {
            n: m.n,
            per_count: m.per_count,
            word_length_max: m.word_length_max,
            cylinders,
        }
    }
}

impl TryFrom<MeasureFile> for EmpiricalMeasure {
    type Error = Error;

    fn try_from(f: MeasureFile) -> Result<Self> {
        let mut cylinder_counts = BTreeMap::new();
        for e in f.cylinders {
            if e.word.is_empty() || e.word.len() > f.word_length_max {
                return Err(Error::Parse(format!("cylinder {} out of range", e.word)));
            }
            cylinder_counts.insert(e.word, e.count);
        }
        Ok(EmpiricalMeasure {
            n: f.n,
            per_count: f.per_count,
            word_length_max: f.word_length_max,
            cylinder_counts,
        })
    }
}

fn cylinder_counts_of(points: &PeriodicPoints, max_len: usize) -> HashMap<Vec<u8>, u64> {
    points
        .orbits
        .par_iter()
        .fold(HashMap::new, |mut acc, o| {
            let l = o.primitive_word.letters();
            let p = l.len();
            for r in 0..p {
                let mut key = Vec::with_capacity(max_len);
                for i in 0..max_len {
                    key.push(l[(r + i) % p]);
                    *acc.entry(key.clone()).or_insert(0u64) += 1;
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        })
}

/// `μ_n` on cylinders of length up to `word_length_max <= n`.
pub fn empirical_measure(spec: &ShiftSpec, n: usize, word_length_max: usize) -> Result<EmpiricalMeasure> {
    if word_length_max > n {
        return Err(Error::Invalid(format!(
            "cylinder length {word_length_max} exceeds the period bound {n}"
        )));
    }
    let points = enumerate_per(spec, n)?;
    Ok(measure_from_points(&points, word_length_max))
}

pub fn measure_from_points(points: &PeriodicPoints, word_length_max: usize) -> EmpiricalMeasure {
    let cylinder_counts = cylinder_counts_of(points, word_length_max)
        .into_iter()
        .map(|(k, v)| (Word::new(k), v))
        .collect();
    EmpiricalMeasure {
        n: points.n,
        per_count: points.per_count,
        word_length_max,
        cylinder_counts,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub n: usize,
    /// `μ_n([i])`, `i = 0..=m`.
    #[serde(with = "rational::serde_str_vec")]
    pub letter_frequencies: Vec<Rational>,
    /// `Σ_{i=1..m} i·μ_n([i])`.
    #[serde(with = "rational::serde_str")]
    pub mean_letter: Rational,
    #[serde(with = "rational::serde_str")]
    pub alpha: Rational,
    /// `mean_letter < α_f`, exact.
    pub mean_below_alpha: bool,
    /// Letters `i` with `μ_n([i]) > μ_n([i-1])`.
    pub monotonicity_violations: Vec<u8>,
    /// `Σ_{i=1..m} i/(i+1)`.
    #[serde(with = "rational::serde_str")]
    pub threshold: Rational,
    /// `α_f > threshold`.
    pub alpha_exceeds_threshold: bool,
}

/// `Σ_{i=1..m} i/(i+1)`.
pub fn letter_threshold(max_letter: u8) -> Rational {
    (1..=i128::from(max_letter))
        .map(|i| Rational::new(i, i + 1))
        .fold(Rational::zero(), |a, b| a + b)
}

pub fn mme_diagnostics(spec: &ShiftSpec, mu: &EmpiricalMeasure) -> Result<DiagnosticsReport> {
    if mu.word_length_max == 0 {
        return Err(Error::CylinderTooLong {
            requested: 1,
            stored: 0,
        });
    }
    let m = spec.max_letter();
    let counts = mu.letter_counts(m);
    let letter_frequencies: Vec<Rational> = counts
        .iter()
        .map(|&c| Rational::new(c as i128, mu.per_count as i128))
        .collect();
    let mean_letter = letter_frequencies
        .iter()
        .enumerate()
        .map(|(i, f)| *f * int(i as i128))
        .fold(Rational::zero(), |a, b| a + b);
    let monotonicity_violations = (1..=m)
        .filter(|&i| counts[usize::from(i)] > counts[usize::from(i) - 1])
        .collect();
    let alpha = spec.alpha();
    let threshold = letter_threshold(m);
    Ok(DiagnosticsReport {
        n: mu.n,
        letter_frequencies,
        mean_letter,
        alpha,
        mean_below_alpha: mean_letter < alpha,
        monotonicity_violations,
        threshold,
        alpha_exceeds_threshold: alpha > threshold,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// `α_f > Σ i/(i+1)`: a unique measure of maximal entropy, and `μ_n`
    /// converges to it.
    IntrinsicallyErgodic,
    /// `α_f = 0`: the only invariant measure is the point mass at `∞0∞`.
    TrivialShift,
    /// The sufficient condition does not apply; nothing is claimed.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub verdict: Certificate,
    #[serde(with = "rational::serde_str")]
    pub alpha: Rational,
    #[serde(with = "rational::serde_str")]
    pub threshold: Rational,
    pub max_letter: u8,
}

pub fn certificate_report(spec: &ShiftSpec) -> Result<CertificateReport> {
    spec.require_canonical()?;
    let alpha = spec.alpha();
    let threshold = letter_threshold(spec.max_letter());
    let verdict = if alpha.is_zero() {
        Certificate::TrivialShift
    } else if alpha > threshold {
        Certificate::IntrinsicallyErgodic
    } else {
        Certificate::Inconclusive
    };
    debug_assert!(!alpha.is_negative());
    Ok(CertificateReport {
        verdict,
        alpha,
        threshold,
        max_letter: spec.max_letter(),
    })
}

pub fn certificate(spec: &ShiftSpec) -> Result<Certificate> {
    Ok(certificate_report(spec)?.verdict)
}

/// Points of `Per(n)` starting with `w`; any length of `w` is allowed.
fn count_cylinder(points: &PeriodicPoints, w: &Word) -> u64 {
    let target = w.letters();
    points
        .orbits
        .par_iter()
        .map(|o| {
            let l = o.primitive_word.letters();
            let p = l.len();
            (0..p)
                .filter(|&r| target.iter().enumerate().all(|(i, &a)| l[(r + i) % p] == a))
                .count() as u64
        })
        .sum()
}

/// `μ_n([w])` for each `n` in `ns`.
pub fn cylinder_series(spec: &ShiftSpec, w: &Word, ns: &[usize]) -> Result<Vec<(usize, Rational)>> {
    w.check_alphabet(spec.max_letter())?;
    ns.iter()
        .map(|&n| {
            let points = enumerate_per(spec, n)?;
            let c = if w.is_empty() {
                points.per_count
            } else {
                count_cylinder(&points, w)
            };
            Ok((n, Rational::new(c as i128, points.per_count as i128)))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullSupportReport {
    pub n: usize,
    pub k: usize,
    /// `|L_k(X_f)|`.
    pub checked: usize,
    /// Words of `L_k(X_f)` with `μ_n([w]) = 0`, shortlex order.
    pub missing: Vec<Word>,
}

/// Words of `L_k` that no point of `Per(n)` shows at coordinate 0. `k` may
/// exceed `n`.
pub fn full_support_check(spec: &ShiftSpec, n: usize, k: usize) -> Result<FullSupportReport> {
    let points = enumerate_per(spec, n)?;
    let seen: HashSet<Vec<u8>> = points
        .points()
        .map(|x| (0..k).map(|i| x[i % x.len()]).collect())
        .collect();
    let words: Vec<Word> = enumerate::words_up_to(spec, k)
        .into_iter()
        .filter(|w| w.len() == k)
        .collect();
    let checked = words.len();
    let missing = words.into_iter().filter(|w| !seen.contains(w.letters())).collect();
    Ok(FullSupportReport { n, k, checked, missing })
}

/// Direct check of `w^∞` against `f` for every window up to `max_window`.
/// Kept independent of [`certify_periodic`] for cross-checks.
pub fn periodic_windows_pass(spec: &ShiftSpec, w: &Word, max_window: usize) -> bool {
    let l = w.letters();
    let p = l.len();
    (1..=max_window).all(|q| {
        (0..p).all(|start| {
            let s: u64 = (0..q).map(|i| u64::from(l[(start + i) % p])).sum();
            int(s as i128) <= spec.eval(q)
        })
    })
}

/// The first `len` letters of `w^∞`.
pub fn periodic_prefix(w: &Word, len: usize) -> Word {
    let l = w.letters();
    Word::new((0..len).map(|i| l[i % l.len()]).collect())
}
