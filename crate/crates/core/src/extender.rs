//! Extender sets at a finite context radius.
//!
//! `E(v)` is the set of contexts `(l, r)` for which `l·v·r` is a point of
//! `X_f`. Here contexts are finite words of length at most `L`, with zeros
//! beyond them, so a counterexample is a proof that `E(v) ⊄ E(w)` and its
//! absence is evidence only.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate;
use crate::error::{Error, Result};
use crate::periodic::EmpiricalMeasure;
use crate::shift::{self, ShiftSpec};
use crate::word::Word;

/// Slack factor accepted by [`grp_inequality_check`] for `μ_n` in place of
/// the true measure of maximal entropy.
pub const GRP_TOLERANCE: f64 = 1.1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtenderOutcome {
    NoCounterexample,
    /// `l·v·r` admissible, `l·w·r` not.
    Counterexample {
        l: Word,
        r: Word,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtenderVerdict {
    pub v: Word,
    pub w: Word,
    pub horizon: usize,
    pub verdict: ExtenderOutcome,
}

impl ExtenderVerdict {
    pub fn is_counterexample(&self) -> bool {
        matches!(self.verdict, ExtenderOutcome::Counterexample { .. })
    }
}

/// `|v| + |w| + min(N, 4)`, with `N` the table length of `f`.
pub fn default_radius(spec: &ShiftSpec, v: &Word, w: &Word) -> usize {
    v.len() + w.len() + spec.function().table_len().min(4)
}

fn require_admissible(spec: &ShiftSpec, w: &Word) -> Result<()> {
    if shift::is_admissible(spec, w)? {
        Ok(())
    } else {
        Err(Error::Inadmissible(w.clone()))
    }
}

/// Tests `E(v) ⊆ E(w)` on all contexts with `|l|, |r| <= horizon`. The
/// reported counterexample is the first in the order
/// (`|l| + |r|`, shortlex `r`, shortlex `l`).
pub fn extender_subset(spec: &ShiftSpec, v: &Word, w: &Word, horizon: usize) -> Result<ExtenderVerdict> {
    require_admissible(spec, v)?;
    require_admissible(spec, w)?;
    let mut words = vec![Word::empty()];
    words.extend(enumerate::words_up_to(spec, horizon));
    // l·v·r admissible needs l·v and v·r admissible.
    let mut lefts: Vec<Vec<&Word>> = vec![Vec::new(); horizon + 1];
    for l in &words {
        if shift::admissible_unchecked(spec, &l.concat(v)) {
            lefts[l.len()].push(l);
        }
    }
    let rights: Vec<&Word> = words
        .iter()
        .filter(|r| shift::admissible_unchecked(spec, &v.concat(r)))
        .collect();

    let mut verdict = ExtenderOutcome::NoCounterexample;
    for total in 0..=2 * horizon {
        let found = rights
            .par_iter()
            .filter(|r| r.len() <= total && total - r.len() <= horizon)
            .find_map_first(|r| {
                lefts[total - r.len()].iter().find_map(|l| {
                    let with_v = Word::concat_all([*l, v, *r]);
                    let with_w = Word::concat_all([*l, w, *r]);
                    (shift::admissible_unchecked(spec, &with_v) && !shift::admissible_unchecked(spec, &with_w))
                        .then(|| ((*l).clone(), (*r).clone()))
                })
            });
        if let Some((l, r)) = found {
            verdict = ExtenderOutcome::Counterexample { l, r };
            break;
        }
    }
    Ok(ExtenderVerdict {
        v: v.clone(),
        w: w.clone(),
        horizon,
        verdict,
    })
}

/// Tests `E(v) ⊆ E(0^{|v|}·w·0^{|v|})` for `sum(v) >= sum(w)`. This
/// containment always holds, so a counterexample signals a bug.
pub fn zero_pad_containment(spec: &ShiftSpec, v: &Word, w: &Word, horizon: usize) -> Result<ExtenderVerdict> {
    require_admissible(spec, v)?;
    require_admissible(spec, w)?;
    if v.sum() < w.sum() {
        return Err(Error::SumOrder {
            sum_v: v.sum(),
            sum_w: w.sum(),
        });
    }
    let pad = Word::zeros(v.len());
    extender_subset(spec, v, &Word::concat_all([&pad, w, &pad]), horizon)
}

/// Both sides of `μ([v]) <= μ([w])·e^{h(|w|-|v|)}`, evaluated with `μ_n`
/// and an upper entropy bound `h`. Meaningful when `E(v) ⊆ E(w)`; since
/// `μ_n` only approximates the measure of maximal entropy this is a
/// diagnostic, not a test of the inequality itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrpReport {
    pub v: Word,
    pub w: Word,
    pub n: usize,
    pub h_upper: f64,
    pub mu_v: f64,
    pub mu_w: f64,
    /// `μ_n([w])·e^{h_upper·(|w|-|v|)}`.
    pub rhs: f64,
    /// `rhs - μ_n([v])`.
    pub slack: f64,
    pub holds: bool,
    /// `μ_n([v]) <= GRP_TOLERANCE · rhs`.
    pub holds_within_tolerance: bool,
}

pub fn grp_inequality_check(v: &Word, w: &Word, mu: &EmpiricalMeasure, h_upper: f64) -> Result<GrpReport> {
    let mu_v = mu.measure_f64(v)?;
    let mu_w = mu.measure_f64(w)?;
    let rhs = if v.len() == w.len() {
        mu_w
    } else {
        mu_w * (h_upper * (w.len() as f64 - v.len() as f64)).exp()
    };
    Ok(GrpReport {
        v: v.clone(),
        w: w.clone(),
        n: mu.n,
        h_upper,
        mu_v,
        mu_w,
        rhs,
        slack: rhs - mu_v,
        holds: mu_v <= rhs,
        holds_within_tolerance: mu_v <= GRP_TOLERANCE * rhs,
    })
}
