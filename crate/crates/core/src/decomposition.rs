//! The good/bad word classes and the factorizations built from them.
//!
//! With `α = α_f`:
//!
//! * `B` holds `ε` and every word of mean `>= α`;
//! * `G` holds every word whose nonempty prefixes and suffixes all have mean
//!   `< α`. `ε` is in `G` vacuously, so `G ∩ B = {ε}`.
//!
//! Every admissible word factors as `u·y·w` with `u, w ∈ B` and `y ∈ G`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate;
use crate::error::{Error, Result};
use crate::language::{bad_from_sums, good_from_sums};
use crate::periodic::{self, Certification};
use crate::rational::{self, int, Rational};
use crate::shift::{self, ShiftSpec};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub u: Word,
    pub y: Word,
    pub w: Word,
}

impl DecompositionResult {
    pub fn joined(&self) -> Word {
        Word::concat_all([&self.u, &self.y, &self.w])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SyncVerdict {
    NoCounterexample,
    /// `u·0^M` and `0^M·w` are admissible, `u·0^M·w` is not.
    Counterexample {
        u: Word,
        w: Word,
    },
}

/// Outcome of testing whether `0^M` synchronizes contexts up to length
/// `horizon`. A counterexample refutes synchronization; its absence is only
/// evidence at this horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncReport {
    pub m: usize,
    pub horizon: usize,
    pub verdict: SyncVerdict,
}

fn require_admissible(spec: &ShiftSpec, w: &Word) -> Result<()> {
    if shift::is_admissible(spec, w)? {
        Ok(())
    } else {
        Err(Error::Inadmissible(w.clone()))
    }
}

fn good(w: &Word, alpha: &Rational) -> bool {
    good_from_sums(w.prefix_sums(), alpha)
}

fn bad(w: &Word, alpha: &Rational) -> bool {
    bad_from_sums(w.prefix_sums(), alpha)
}

pub fn is_in_b(spec: &ShiftSpec, w: &Word) -> Result<bool> {
    require_admissible(spec, w)?;
    Ok(bad(w, &spec.alpha()))
}

pub fn is_in_g(spec: &ShiftSpec, w: &Word) -> Result<bool> {
    require_admissible(spec, w)?;
    Ok(good(w, &spec.alpha()))
}

/// `u` is the longest prefix of `z` in `B`, `w` the longest suffix of the
/// rest in `B`. Maximality forces the middle into `G`: a prefix of `y` with
/// mean `>= α` would extend `u`, a suffix would extend `w`.
pub fn decompose(spec: &ShiftSpec, z: &Word) -> Result<DecompositionResult> {
    require_admissible(spec, z)?;
    let alpha = spec.alpha();
    let n = z.len();
    let sums = z.prefix_sums();
    let mean_ok = |sum: u64, len: usize| rational::mean_cmp(sum, len, &alpha).is_ge();

    let u_len = (1..=n).rev().find(|&k| mean_ok(sums[k], k)).unwrap_or(0);
    let w_len = (1..=n - u_len)
        .rev()
        .find(|&k| mean_ok(sums[n] - sums[n - k], k))
        .unwrap_or(0);
    let result = DecompositionResult {
        u: z.prefix(u_len),
        y: z.slice(u_len, n - w_len),
        w: z.suffix(w_len),
    };
    if !good(&result.y, &alpha) {
        return Err(Error::Invariant(format!(
            "middle factor {} of {z} is not in G",
            result.y
        )));
    }
    Ok(result)
}

/// Split `z = u·v·w` with `u, w ∈ B` of length `<= m` and `v ∈ G`, if any.
pub fn split_g_m(spec: &ShiftSpec, z: &Word, m: usize) -> Result<Option<DecompositionResult>> {
    require_admissible(spec, z)?;
    let alpha = spec.alpha();
    let n = z.len();
    for i in 0..=m.min(n) {
        let u = z.prefix(i);
        if !bad(&u, &alpha) {
            continue;
        }
        for j in 0..=m.min(n - i) {
            let w = z.suffix(j);
            let v = z.slice(i, n - j);
            if bad(&w, &alpha) && good(&v, &alpha) {
                return Ok(Some(DecompositionResult { u, y: v, w }));
            }
        }
    }
    Ok(None)
}

/// Membership in `G(M) = { u·v·w : u, w ∈ B, |u|, |w| <= M, v ∈ G }`.
pub fn in_g_m(spec: &ShiftSpec, z: &Word, m: usize) -> Result<bool> {
    Ok(split_g_m(spec, z, m)?.is_some())
}

/// `τ(M) = ⌈2M⌊f(1)⌋ / α_f⌉`.
pub fn tau(spec: &ShiftSpec, m: usize) -> Result<usize> {
    let alpha = spec.alpha();
    if alpha == int(0) {
        return Err(Error::ZeroGradient);
    }
    let bound = int(2 * m as i128 * i128::from(spec.max_letter())) / alpha;
    Ok(rational::ceil_i128(&bound) as usize)
}

/// `0^τ·z·0^τ` for `z ∈ G(M)`, which lands in `G`.
pub fn pad_to_g(spec: &ShiftSpec, z: &Word, m: usize) -> Result<Word> {
    spec.require_canonical()?;
    let t = tau(spec, m)?;
    if !in_g_m(spec, z, m)? {
        return Err(Error::NotInGM { word: z.clone(), m });
    }
    let zeros = Word::zeros(t);
    let padded = Word::concat_all([&zeros, z, &zeros]);
    if !is_in_g(spec, &padded)? {
        return Err(Error::Invariant(format!(
            "padding {z} with {t} zeros did not land in G"
        )));
    }
    Ok(padded)
}

/// Whether `w1···wk` is admissible and its periodic repetition lies in `X_f`.
/// Every input must be in `G`.
pub fn check_free_concatenation(spec: &ShiftSpec, words: &[Word]) -> Result<bool> {
    spec.require_canonical()?;
    for w in words {
        if !is_in_g(spec, w)? {
            return Err(Error::NotInG(w.clone()));
        }
    }
    let joined = Word::concat_all(words);
    if joined.is_empty() {
        return Ok(true);
    }
    if !shift::admissible_unchecked(spec, &joined) {
        return Ok(false);
    }
    Ok(periodic::certify_exact(spec, &joined)? == Certification::Certified)
}

/// Looks for admissible `u, w` with `|u|, |w| <= horizon` such that `u·0^M`
/// and `0^M·w` are admissible but `u·0^M·w` is not. The first pair in
/// (shortlex `u`, shortlex `w`) order is reported, independent of scheduling.
pub fn sync_check(spec: &ShiftSpec, m: usize, horizon: usize) -> SyncReport {
    let mut words = vec![Word::empty()];
    words.extend(enumerate::words_up_to(spec, horizon));
    let zeros = Word::zeros(m);
    let lefts: Vec<&Word> = words
        .iter()
        .filter(|u| shift::admissible_unchecked(spec, &u.concat(&zeros)))
        .collect();
    let rights: Vec<(&Word, Word)> = words
        .iter()
        .map(|w| (w, zeros.concat(w)))
        .filter(|(_, zw)| shift::admissible_unchecked(spec, zw))
        .collect();
    let found = lefts.par_iter().find_map_first(|u| {
        rights.iter().find_map(|(w, zw)| {
            let joined = u.concat(zw);
            (!shift::admissible_unchecked(spec, &joined)).then(|| ((*u).clone(), (*w).clone()))
        })
    });
    SyncReport {
        m,
        horizon,
        verdict: match found {
            Some((u, w)) => SyncVerdict::Counterexample { u, w },
            None => SyncVerdict::NoCounterexample,
        },
    }
}
