//! Depth-first enumeration of `L(X_f)`.
//!
//! Appending a letter only creates windows that end at the new position, so
//! each extension costs `O(|w|)` comparisons against integer bounds
//! `⌊f(p)⌋`. Letters are tried in increasing order and the loop stops at the
//! first failure: a larger letter only raises window sums.
//!
//! Work is split by prefix: the first few levels are expanded breadth-first,
//! then each frontier word is explored on its own. Per-shard results are
//! merged in frontier order, so output never depends on scheduling.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

use crate::shift::ShiftSpec;

/// `floor[p] = ⌊f(p)⌋`.
#[derive(Clone, Debug)]
pub struct Bounds {
    floor: Vec<i64>,
}

impl Bounds {
    pub fn new(floor: Vec<i64>) -> Self {
        Self { floor }
    }

    #[inline]
    pub fn get(&self, p: usize) -> i64 {
        self.floor[p]
    }

    pub fn max_len(&self) -> usize {
        self.floor.len() - 1
    }

    /// Windows ending at the last position of a word given by its prefix sums.
    #[inline]
    pub fn admits_last(&self, sums: &[u64]) -> bool {
        let n = sums.len() - 1;
        let last = sums[n];
        (1..=n).all(|q| (last - sums[n - q]) as i64 <= self.floor[q])
    }

    /// Every window of the word.
    pub fn admits(&self, sums: &[u64]) -> bool {
        (1..sums.len()).all(|end| self.admits_last(&sums[..=end]))
    }
}

/// Receives each admissible nonempty word once.
pub trait Visitor: Send {
    /// Return `false` to skip the word's extensions.
    fn visit(&mut self, letters: &[u8], sums: &[u64]) -> bool;

    /// Fold in a shard that followed `self` in enumeration order.
    fn merge(&mut self, other: Self);
}

#[derive(Clone, Debug)]
pub struct WalkOptions {
    /// Maximum number of visited words before giving up.
    pub budget: Option<u64>,
    pub parallel: bool,
}

impl Default for WalkOptions {
    fn default() -> Self {
        Self {
            budget: None,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetHit {
    pub budget: u64,
}

const TARGET_SHARDS: usize = 256;
const FLUSH_EVERY: u64 = 1024;

struct Budget {
    limit: Option<u64>,
    used: AtomicU64,
    aborted: AtomicBool,
}

impl Budget {
    fn charge(&self, n: u64) -> bool {
        match self.limit {
            None => true,
            Some(limit) => {
                let total = self.used.fetch_add(n, Ordering::Relaxed) + n;
                if total > limit {
                    self.aborted.store(true, Ordering::Relaxed);
                    false
                } else {
                    !self.aborted.load(Ordering::Relaxed)
                }
            }
        }
    }

    fn aborted(&self) -> bool {
        self.aborted.load(Ordering::Relaxed)
    }
}

/// Visits every word of `L_n(X_f)`, `1 <= n <= max_len`.
pub fn walk<V, F>(spec: &ShiftSpec, max_len: usize, opts: &WalkOptions, make: F) -> Result<V, BudgetHit>
where
    V: Visitor,
    F: Fn() -> V + Sync,
{
    let bounds = spec.bounds(max_len);
    let m = spec.max_letter();
    let budget = Budget {
        limit: opts.budget,
        used: AtomicU64::new(0),
        aborted: AtomicBool::new(false),
    };
    let hit = || BudgetHit {
        budget: opts.budget.unwrap_or(u64::MAX),
    };

    let mut root = make();
    let mut frontier: Vec<Vec<u8>> = vec![Vec::new()];
    let mut depth = 0;
    while depth < max_len && !frontier.is_empty() && (frontier.len() < TARGET_SHARDS || !opts.parallel) {
        let mut next = Vec::new();
        for prefix in &frontier {
            let mut sums = prefix_sums(prefix);
            let mut letters = prefix.clone();
            for a in 0..=m {
                letters.push(a);
                sums.push(sums[depth] + u64::from(a));
                let ok = bounds.admits_last(&sums);
                if ok {
                    if !budget.charge(1) {
                        return Err(hit());
                    }
                    if root.visit(&letters, &sums) {
                        next.push(letters.clone());
                    }
                }
                letters.pop();
                sums.pop();
                if !ok {
                    break;
                }
            }
        }
        frontier = next;
        depth += 1;
        if !opts.parallel {
            // Sequential runs go depth-first from the first level on.
            break;
        }
    }
    if depth >= max_len || frontier.is_empty() {
        return Ok(root);
    }

    let explore = |prefix: &Vec<u8>| {
        let mut v = make();
        let mut letters = prefix.clone();
        let mut sums = prefix_sums(prefix);
        let mut pending = 0u64;
        dfs(
            &bounds,
            m,
            max_len,
            &mut letters,
            &mut sums,
            &mut v,
            &budget,
            &mut pending,
        );
        budget.charge(pending);
        v
    };
    let shards: Vec<V> = if opts.parallel {
        frontier.par_iter().map(explore).collect()
    } else {
        frontier.iter().map(explore).collect()
    };
    if budget.aborted() {
        return Err(hit());
    }
    for shard in shards {
        root.merge(shard);
    }
    Ok(root)
}

fn prefix_sums(letters: &[u8]) -> Vec<u64> {
    let mut sums = Vec::with_capacity(letters.len() + 1);
    sums.push(0);
    let mut acc = 0;
    for &a in letters {
        acc += u64::from(a);
        sums.push(acc);
    }
    sums
}

#[allow(clippy::too_many_arguments)]
fn dfs<V: Visitor>(
    bounds: &Bounds,
    m: u8,
    max_len: usize,
    letters: &mut Vec<u8>,
    sums: &mut Vec<u64>,
    v: &mut V,
    budget: &Budget,
    pending: &mut u64,
) {
    let depth = letters.len();
    if depth == max_len {
        return;
    }
    let base = sums[depth];
    for a in 0..=m {
        letters.push(a);
        sums.push(base + u64::from(a));
        if !bounds.admits_last(sums) {
            letters.pop();
            sums.pop();
            break;
        }
        *pending += 1;
        if *pending >= FLUSH_EVERY {
            let ok = budget.charge(*pending);
            *pending = 0;
            if !ok {
                letters.pop();
                sums.pop();
                return;
            }
        }
        if v.visit(letters, sums) {
            dfs(bounds, m, max_len, letters, sums, v, budget, pending);
        }
        letters.pop();
        sums.pop();
        if budget.aborted() {
            return;
        }
    }
}

/// Collects every nonempty admissible word up to `max_len`, in shortlex order.
pub fn words_up_to(spec: &ShiftSpec, max_len: usize) -> Vec<crate::word::Word> {
    struct Collect(Vec<Vec<u8>>);
    impl Visitor for Collect {
        fn visit(&mut self, letters: &[u8], _: &[u64]) -> bool {
            self.0.push(letters.to_vec());
            true
        }
        fn merge(&mut self, other: Self) {
            self.0.extend(other.0);
        }
    }
    let Ok(Collect(mut all)) = walk(spec, max_len, &WalkOptions::default(), || Collect(Vec::new())) else {
        unreachable!("no budget set")
    };
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all.into_iter().map(crate::word::Word::new).collect()
}
