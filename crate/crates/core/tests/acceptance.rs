//! Exit criteria. Runs as a plain binary so each line prints under
//! `cargo test`; any failing criterion makes the target fail.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bds_core::decomposition::{self, SyncVerdict};
use bds_core::enumerate::words_up_to;
use bds_core::extender;
use bds_core::fixtures;
use bds_core::language;
use bds_core::periodic::{self, Certificate, Certification};
use bds_core::rational::{self, int, rat};
use bds_core::shift::{self, CanonicalFunction};
use bds_core::{Rational, ShiftSpec, Word};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_words(alphabet: u8, len: usize) -> impl Iterator<Item = Vec<u8>> {
    let base = usize::from(alphabet);
    (0..base.pow(len as u32)).map(move |mut code| {
        let mut v = vec![0u8; len];
        for slot in v.iter_mut().rev() {
            *slot = (code % base) as u8;
            code /= base;
        }
        v
    })
}

fn golden_closed_form(p: usize) -> u64 {
    p.div_ceil(2) as u64
}

fn windows_ok(letters: &[u8], bound: impl Fn(usize) -> u64) -> bool {
    (0..letters.len()).all(|i| {
        (i + 1..=letters.len()).all(|j| letters[i..j].iter().map(|&a| u64::from(a)).sum::<u64>() <= bound(j - i))
    })
}

fn cyclic_ok(letters: &[u8], bound: impl Fn(usize) -> u64, reach: usize) -> bool {
    let p = letters.len();
    (1..=reach).all(|q| (0..p).all(|s| (0..q).map(|i| u64::from(letters[(s + i) % p])).sum::<u64>() <= bound(q)))
}

/// Parry measure of `[1]` for the golden mean shift, by power iteration on
/// its transition matrix.
fn parry_one() -> f64 {
    let mut v = [1.0f64, 1.0];
    for _ in 0..200 {
        let next = [v[0] + v[1], v[0]];
        let norm = next[0] + next[1];
        v = [next[0] / norm, next[1] / norm];
    }
    v[1] * v[1] / (v[0] * v[0] + v[1] * v[1])
}

fn counting_ground_truth() -> Outcome {
    let g = fixtures::golden_mean();
    let start = Instant::now();
    let series = language::count_words(&g, 7).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let got: Vec<u64> = (1..=7).map(|n| series.count_u64(n)).collect();
    let oracle: Vec<u64> = (1..=7)
        .map(|n| all_words(2, n).filter(|w| windows_ok(w, golden_closed_form)).count() as u64)
        .collect();
    let no_11: Vec<u64> = (1..=7)
        .map(|n| all_words(2, n).filter(|w| !w.windows(2).any(|p| p == [1, 1])).count() as u64)
        .collect();
    ensure(got == [2, 3, 5, 8, 13, 21, 34], || format!("counts {got:?}"))?;
    ensure(got == oracle, || format!("oracle {oracle:?}"))?;
    ensure(oracle == no_11, || "f = ⌈n/2⌉ differs from the no-11 shift".into())?;
    let more: Vec<u64> = (8..=12)
        .map(|n| all_words(2, n).filter(|w| windows_ok(w, golden_closed_form)).count() as u64)
        .collect();
    let nos: Vec<u64> = (8..=12)
        .map(|n| all_words(2, n).filter(|w| !w.windows(2).any(|p| p == [1, 1])).count() as u64)
        .collect();
    ensure(more == nos, || "f = ⌈n/2⌉ differs from the no-11 shift beyond 7".into())?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("{got:?} in {elapsed:?}"))
}

fn entropy_bracket() -> Outcome {
    let g = fixtures::golden_mean();
    let truth = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    let b = language::entropy_bracket(&g, 24).map_err(|e| e.to_string())?;
    ensure(b.upper >= truth, || format!("upper {} below log φ", b.upper))?;
    ensure(b.upper - truth <= 0.01, || format!("upper {} not within 0.01", b.upper))?;
    for n in 1..=24 {
        let bn = language::entropy_bracket(&g, n).map_err(|e| e.to_string())?;
        ensure(bn.lower <= bn.upper, || format!("lower > upper at n = {n}"))?;
    }
    Ok(format!(
        "upper {:.6} vs log φ {truth:.6}, lower {:.6}",
        b.upper, b.lower
    ))
}

fn periodic_counts() -> Outcome {
    let g = fixtures::golden_mean();
    let per = periodic::enumerate_per(&g, 8).map_err(|e| e.to_string())?;
    let fix: Vec<u64> = (1..=8).map(|k| per.fixed_points(k)).collect();
    ensure(fix[..6] == [1, 3, 4, 7, 11, 18], || format!("Fix {fix:?}"))?;
    let oracle: Vec<u64> = (1..=8)
        .map(|k| {
            all_words(2, k)
                .filter(|w| cyclic_ok(w, golden_closed_form, 4 * k + 8))
                .count() as u64
        })
        .collect();
    ensure(fix == oracle, || format!("Fix {fix:?} vs oracle {oracle:?}"))?;
    let per4 = periodic::enumerate_per(&g, 4).map_err(|e| e.to_string())?.per_count;
    ensure(per4 == 10, || format!("|Per(4)| = {per4}"))?;
    Ok(format!("Fix(σ^k), k=1..8: {fix:?}; |Per(4)| = {per4}"))
}

fn measure_convergence() -> Outcome {
    let g = fixtures::golden_mean();
    let one = Word::new(vec![1]);
    let mu = |n: usize| periodic::empirical_measure(&g, n, 1).map_err(|e| e.to_string());
    let mu2 = mu(2)?.measure(&one).map_err(|e| e.to_string())?;
    ensure(mu2 == rat(1, 3), || format!("μ_2([1]) = {mu2}"))?;
    let parry = parry_one();
    ensure((parry - 0.276393).abs() < 1e-6, || format!("Parry oracle {parry}"))?;
    let e10 = (mu(10)?.measure_f64(&one).map_err(|e| e.to_string())? - parry).abs();
    let e20 = (mu(20)?.measure_f64(&one).map_err(|e| e.to_string())? - parry).abs();
    ensure(e20 <= 0.05, || format!("|μ_20([1]) - Parry| = {e20}"))?;
    ensure(e20 < e10, || {
        format!("error at 20 ({e20}) not below error at 10 ({e10})")
    })?;
    Ok(format!("μ_2([1]) = 1/3; error at 10 = {e10:.5}, at 20 = {e20:.5}"))
}

fn certificates() -> Outcome {
    let cases = [
        (
            "⌈3n/5⌉",
            fixtures::ceil_three_fifths(),
            Certificate::IntrinsicallyErgodic,
        ),
        ("⌈n/2⌉", fixtures::golden_mean(), Certificate::Inconclusive),
        ("0", fixtures::zero_shift(), Certificate::TrivialShift),
    ];
    for (name, spec, expected) in cases {
        let got = periodic::certificate(&spec).map_err(|e| e.to_string())?;
        ensure(got == expected, || format!("f = {name}: {got:?}"))?;
    }
    Ok("IntrinsicallyErgodic / Inconclusive / TrivialShift".into())
}

fn mean_letter_below_gradient() -> Outcome {
    let mut notes = Vec::new();
    for (name, spec) in [
        ("⌈n/2⌉", fixtures::golden_mean()),
        ("⌈3n/5⌉", fixtures::ceil_three_fifths()),
    ] {
        for n in [10, 16, 20] {
            let mu = periodic::empirical_measure(&spec, n, 1).map_err(|e| e.to_string())?;
            let d = periodic::mme_diagnostics(&spec, &mu).map_err(|e| e.to_string())?;
            let alpha = spec.alpha();
            ensure(d.mean_letter < alpha, || {
                format!("f = {name}, n = {n}: {} >= {alpha}", d.mean_letter)
            })?;
            notes.push(format!("{name}/{n}: {:.4}", rational::to_f64(&d.mean_letter)));
        }
    }
    Ok(notes.join(", "))
}

fn test_instances() -> [(&'static str, ShiftSpec); 2] {
    [
        ("⌈n/2⌉", fixtures::golden_mean()),
        ("⌈3n/5⌉", fixtures::ceil_three_fifths()),
    ]
}

fn decomposition_suite() -> Outcome {
    let mut checked = 0usize;
    for (name, spec) in test_instances() {
        let alpha = spec.alpha();
        let mean_ge = |w: &Word| w.is_empty() || Rational::new(w.sum() as i128, w.len() as i128) >= alpha;
        let good = |w: &Word| (1..=w.len()).all(|k| !mean_ge(&w.prefix(k)) && !mean_ge(&w.suffix(k)));
        let mut words = words_up_to(&spec, 12);
        words.push(Word::empty());
        for z in &words {
            let d = decomposition::decompose(&spec, z).map_err(|e| format!("{name}: {z}: {e}"))?;
            ensure(d.joined() == *z, || format!("{name}: {z} does not round-trip"))?;
            ensure(mean_ge(&d.u) && mean_ge(&d.w) && good(&d.y), || {
                format!("{name}: {z} -> {d:?}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} words"))
}

fn g_free_concatenation() -> Outcome {
    let mut pairs = 0usize;
    for (name, spec) in test_instances() {
        let all = words_up_to(&spec, 8);
        for n in 1..=8 {
            let goods: Vec<&Word> = all
                .iter()
                .filter(|w| w.len() == n && decomposition::is_in_g(&spec, w).unwrap())
                .collect();
            for a in &goods {
                for b in &goods {
                    let joined = a.concat(b);
                    ensure(shift::is_admissible(&spec, &joined).unwrap(), || {
                        format!("{name}: {joined} inadmissible")
                    })?;
                    let c = periodic::certify_exact(&spec, &joined).map_err(|e| e.to_string())?;
                    ensure(c == Certification::Certified, || format!("{name}: ({joined})^∞ {c:?}"))?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} pairs"))
}

fn tau_padding() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let instances = test_instances();
    let pools: Vec<Vec<Word>> = instances.iter().map(|(_, s)| words_up_to(s, 10)).collect();
    let mut done = 0;
    let mut tries = 0;
    while done < 1000 {
        tries += 1;
        let i = rng.gen_range(0..instances.len());
        let (name, spec) = &instances[i];
        let z = &pools[i][rng.gen_range(0..pools[i].len())];
        let m = rng.gen_range(0..=4);
        if !decomposition::in_g_m(spec, z, m).map_err(|e| e.to_string())? {
            continue;
        }
        let t = decomposition::tau(spec, m).map_err(|e| e.to_string())?;
        let exact = int(2 * m as i128 * i128::from(spec.max_letter())) / spec.alpha();
        ensure(rational::ceil_i128(&exact) == t as i128, || format!("τ({m}) = {t}"))?;
        let padded = decomposition::pad_to_g(spec, z, m).map_err(|e| format!("{name}: {z}, M = {m}: {e}"))?;
        ensure(
            padded == Word::concat_all([&Word::zeros(t), z, &Word::zeros(t)]),
            || "wrong padding".into(),
        )?;
        ensure(decomposition::is_in_g(spec, &padded).unwrap(), || {
            format!("{name}: {padded} not in G")
        })?;
        done += 1;
    }
    Ok(format!("1000 cases ({tries} draws)"))
}

fn synchronization() -> Outcome {
    let g = fixtures::golden_mean();
    let one = decomposition::sync_check(&g, 1, 8);
    ensure(one.verdict == SyncVerdict::NoCounterexample, || {
        format!("M = 1: {:?}", one.verdict)
    })?;
    let zero = decomposition::sync_check(&g, 0, 8);
    let expected = SyncVerdict::Counterexample {
        u: Word::new(vec![1]),
        w: Word::new(vec![1]),
    };
    ensure(zero.verdict == expected, || format!("M = 0: {:?}", zero.verdict))?;
    Ok("M = 1 clean, M = 0 -> (1, 1)".into())
}

fn extender_suite() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(99);
    let mut hereditary = 0;
    for (name, spec) in test_instances() {
        let pool = words_up_to(&spec, 4);
        for _ in 0..100 {
            let v = &pool[rng.gen_range(0..pool.len())];
            let w = Word::new(v.letters().iter().map(|&a| rng.gen_range(0..=a)).collect());
            let verdict = extender::extender_subset(&spec, v, &w, 6).map_err(|e| e.to_string())?;
            ensure(!verdict.is_counterexample(), || {
                format!("{name}: {v} vs {w}: {:?}", verdict.verdict)
            })?;
            hereditary += 1;
        }
    }
    let mut padded = 0;
    for (name, spec) in test_instances() {
        let mut small = words_up_to(&spec, 3);
        small.push(Word::empty());
        for v in &small {
            for w in small.iter().filter(|w| w.sum() <= v.sum()) {
                let verdict = extender::zero_pad_containment(&spec, v, w, 5).map_err(|e| e.to_string())?;
                ensure(!verdict.is_counterexample(), || {
                    format!("{name}: {v} vs 0{w}0: {:?}", verdict.verdict)
                })?;
                padded += 1;
            }
        }
    }
    Ok(format!("{hereditary} hereditary pairs, {padded} zero-padded pairs"))
}

fn entropy_minimality_proxy() -> Outcome {
    let g = fixtures::golden_mean();
    let n_max = 14;
    let all = language::count_words(&g, n_max).map_err(|e| e.to_string())?;
    let mut failures = Vec::new();
    for w in words_up_to(&g, 3) {
        let avoiding = language::forbid_word_count(&g, &w, n_max).map_err(|e| e.to_string())?;
        // ratio(n+1) < ratio(n), cross-multiplied.
        let bad = (w.len() + 2..n_max).find(|&n| {
            let next: BigUint = avoiding.count(n + 1) * all.count(n);
            let here: BigUint = avoiding.count(n) * all.count(n + 1);
            next >= here
        });
        if let Some(n) = bad {
            failures.push(format!(
                "w = {w}: ratio not decreasing from n = {n} ({}/{})",
                avoiding.count(n),
                all.count(n)
            ));
        }
    }
    let support = periodic::full_support_check(&g, 10, 3).map_err(|e| e.to_string())?;
    if !support.missing.is_empty() {
        failures.push(format!("μ_10 misses {:?}", support.missing));
    }
    if failures.is_empty() {
        Ok("all ratios strictly decreasing; μ_10 has full support on L_3".into())
    } else {
        Err(failures.join("; "))
    }
}

fn gradient_containment() -> Outcome {
    for (name, spec) in test_instances() {
        let inner = shift::build_x_alpha(spec.alpha(), 10).map_err(|e| e.to_string())?;
        let ok = shift::check_containment(&inner, &spec, 10).map_err(|e| e.to_string())?;
        ensure(ok, || format!("X_α not inside X_f for f = {name}"))?;
    }
    Ok("X_α ⊆ X_f up to length 10 for both".into())
}

fn canonicalization() -> Outcome {
    let raw = ShiftSpec::new(CanonicalFunction::new(vec![int(1), int(3)], int(1)).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let hat = shift::canonicalize(&raw, 8).map_err(|e| e.to_string())?;
    ensure(hat.eval(2) == int(2), || format!("f̂(2) = {}", hat.eval(2)))?;
    let hat_spec = ShiftSpec::new(hat).map_err(|e| e.to_string())?;
    ensure(words_up_to(&raw, 8) == words_up_to(&hat_spec, 8), || {
        "languages differ".into()
    })?;
    Ok(format!(
        "f̂(2) = 2, {} words agree up to length 8",
        words_up_to(&raw, 8).len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 14] = [
        ("counting ground truth", counting_ground_truth),
        ("entropy bracket", entropy_bracket),
        ("periodic counts", periodic_counts),
        ("μ_n convergence", measure_convergence),
        ("ergodicity certificate", certificates),
        ("mean letter below α_f", mean_letter_below_gradient),
        ("decomposition suite", decomposition_suite),
        ("free concatenation of G", g_free_concatenation),
        ("τ-padding", tau_padding),
        ("synchronization", synchronization),
        ("extender suite", extender_suite),
        ("entropy-minimality proxy", entropy_minimality_proxy),
        ("X_α containment", gradient_containment),
        ("canonicalization", canonicalization),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
