//! Acceptance suite: one PASS/FAIL line per criterion. Run with
//! `cargo test --test acceptance`. Set `ISING_ACCEPTANCE_STRICT=1` to make
//! any FAIL a non-zero exit.

use std::collections::HashSet;
use std::sync::Arc;
use std::time::Instant;

use ising_storage::codecs::{all_messages, Codec, FieldDropletCodec, HoneycombCodec, StripeCodec};
use ising_storage::dynamics::{hitting_time_discrete, run_discrete, CoupledChains, DynamicsParams, Field};
use ising_storage::experiments::{
    droplet_capacity_lower_bound, erosion_trials, exact_mi, loglog_fit, run_trials, stripe_survival, uniform_prior,
    z_capacity, ErosionOptions, SmallChain,
};
use ising_storage::rng::trial_rng;
use ising_storage::stability::{absorb_path, census, horizontal_descriptions, is_stable, is_striped};
use ising_storage::{Boundary, Configuration, Lattice};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn grid(k: usize, b: Boundary) -> Arc<Lattice> {
    Arc::new(Lattice::square(k, b).unwrap())
}

/// Flip of `v` has positive zero-temperature probability: the site does not
/// strictly agree with its neighbourhood.
fn flip_allowed(cfg: &Configuration, v: usize) -> bool {
    let l = cfg.lattice();
    let s = cfg.spin(v);
    let same = l.neighbors(v).iter().filter(|&&w| cfg.spin(w as usize) == s).count();
    let frozen = l.frozen_neighbors(v) as usize;
    let same = same + if s < 0 { frozen } else { 0 };
    let other = l.degree(v) - same;
    same <= other
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let l = grid(4, Boundary::Free);
    let mut stable = 0;
    let mut mismatches = 0;
    for idx in 0..1u64 << 16 {
        let c = Configuration::from_index(l.clone(), idx);
        let s = is_stable(&c);
        stable += usize::from(s);
        if s != is_striped(&c).is_some() {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let row = census(4).unwrap();
    outcome(
        mismatches == 0 && stable == 6 && row.formula_count == 8 && row.distinct_striped_count == 6 && secs < 10.0,
        format!(
            "4x4 exhaustive: {mismatches} mismatches, {stable} stable, distinct {} vs formula {}, {secs:.2}s",
            row.distinct_striped_count, row.formula_count
        ),
    )
}

fn criterion_2() -> Outcome {
    let counts: Vec<usize> = (2..=12).map(|k| horizontal_descriptions(k).unwrap().len()).collect();
    let mut expected = vec![2usize, 2];
    while expected.len() < counts.len() {
        let n = expected.len();
        expected.push(expected[n - 1] + expected[n - 2]);
    }
    outcome(counts == expected, format!("a_2..a_12 = {counts:?}"))
}

fn criterion_3() -> Outcome {
    let mut bad_paths = 0;
    let l3 = grid(3, Boundary::Free);
    let l6 = grid(6, Boundary::Free);
    let check = |cfg: &Configuration| -> bool {
        let Ok(path) = absorb_path(cfg) else { return false };
        let ok_steps = path.windows(2).all(|w| {
            let diff: Vec<usize> = (0..w[0].len()).filter(|&v| w[0].spin(v) != w[1].spin(v)).collect();
            diff.len() == 1 && flip_allowed(&w[0], diff[0])
        });
        ok_steps && path.first() == Some(cfg) && path.last().is_some_and(is_stable)
    };
    for idx in 0..512 {
        bad_paths += usize::from(!check(&Configuration::from_index(l3.clone(), idx)));
    }
    let random = run_trials(10_000, 31, None, |_, rng| {
        check(&Configuration::random(l6.clone(), 0.5, rng).unwrap())
    })
    .unwrap();
    bad_paths += random.iter().filter(|&&ok| !ok).count();

    let l4 = grid(4, Boundary::Free);
    let p = DynamicsParams::zero_temperature();
    let hits = run_trials(10_000, 32, None, |_, rng| {
        let start = Configuration::random(l4.clone(), 0.5, rng).unwrap();
        hitting_time_discrete(start, is_stable, &p, rng, 1_000_000).unwrap()
    })
    .unwrap();
    let reached = hits.iter().filter(|h| h.is_some()).count();
    let frac = reached as f64 / hits.len() as f64;
    outcome(
        bad_paths == 0 && frac >= 0.999,
        format!("{bad_paths} bad paths over 512 + 10^4 inputs; k=4 reached stable in {reached}/10^4 runs"),
    )
}

struct Erosion {
    exponent: f64,
    means: Vec<f64>,
    timeouts: u64,
    snapshots: u64,
    violations: u64,
}

fn erosion_data() -> Erosion {
    let opts = ErosionOptions::default();
    let mut means = Vec::new();
    let mut timeouts = 0;
    let mut snapshots = 0;
    let mut violations = 0;
    for (i, ell) in [8usize, 16, 32].into_iter().enumerate() {
        let s = erosion_trials(ell, 500, 40 + i as u64, &opts).unwrap().summary;
        means.push(s.mean_tau);
        timeouts += s.timeouts;
        snapshots += s.hopf_snapshots;
        violations += s.hopf_violations;
    }
    // Denser snapshots on smaller droplets, so that sampling is not limited
    // to the long runs.
    let dense = ErosionOptions { hopf_every: 10, ..opts };
    for (i, ell) in [4usize, 6, 10].into_iter().enumerate() {
        let s = erosion_trials(ell, 300, 50 + i as u64, &dense).unwrap().summary;
        snapshots += s.hopf_snapshots;
        violations += s.hopf_violations;
    }
    let fit = loglog_fit(&[8.0, 16.0, 32.0], &means).unwrap();
    Erosion {
        exponent: fit.slope,
        means,
        timeouts,
        snapshots,
        violations,
    }
}

fn criterion_4(e: &Erosion) -> Outcome {
    outcome(
        (e.exponent - 2.0).abs() <= 0.3 && e.timeouts == 0,
        format!(
            "mean tau {:.2?} for l = 8, 16, 32; exponent {:.3}; {} timeouts",
            e.means, e.exponent, e.timeouts
        ),
    )
}

/// Z-channel mutual information at prior `p = P(X = 1)`, written out directly.
fn z_mi(p: f64, q: f64) -> f64 {
    let h = |x: f64| {
        let f = |y: f64| if y <= 0.0 { 0.0 } else { -y * y.log2() };
        f(x) + f(1.0 - x)
    };
    h(p * (1.0 - q)) - p * h(q)
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 1..100 {
        let q = i as f64 / 100.0;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..300 {
            let a = lo + (hi - lo) / 3.0;
            let b = hi - (hi - lo) / 3.0;
            if z_mi(a, q) < z_mi(b, q) {
                lo = a;
            } else {
                hi = b;
            }
        }
        let numeric = z_mi((lo + hi) / 2.0, q);
        worst = worst.max((numeric - z_capacity(q).unwrap()).abs());
    }
    let ends = z_capacity(0.0).unwrap() == 1.0 && z_capacity(1.0).unwrap() == 0.0;
    outcome(
        worst < 1e-9 && ends,
        format!("max |closed - numeric| over 99 q = {worst:.2e}; C(0) = 1, C(1) = 0: {ends}"),
    )
}

fn criterion_6() -> Outcome {
    let opts = ErosionOptions {
        hopf_every: 0,
        ..Default::default()
    };
    let pilot = erosion_trials(4, 1000, 60, &opts).unwrap().summary.mean_tau;
    let t = 0.1 * pilot;
    let b = droplet_capacity_lower_bound(64, 16, t, 10_000, 61, None).unwrap();
    let e = &b.estimate;
    outcome(
        e.q1_ci.hi <= 0.05 && e.zero_to_one == 0 && b.bits >= 0.9 * b.blocks as f64,
        format!(
            "pilot tau {pilot:.3}, t {t:.3}: q1 {:.2e} (Wilson hi {:.2e}), 0->1 errors {}, bound {:.3} of {} bits",
            e.q1_hat, e.q1_ci.hi, e.zero_to_one, b.bits, b.blocks
        ),
    )
}

fn criterion_7() -> Outcome {
    let all = uniform_prior(0..512);
    let curve = exact_mi(3, &all, 200).unwrap().curve;
    let monotone = curve.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let fixed = exact_mi(3, &uniform_prior([0, 511]), 200).unwrap().curve;
    let exact_one = fixed.iter().all(|&i| i == 1.0);

    // Absorption horizon: 99.9% quantile of discrete absorption times from
    // uniform 3x3 starts.
    let l3 = grid(3, Boundary::Free);
    let p = DynamicsParams::zero_temperature();
    let mut times: Vec<u64> = run_trials(10_000, 70, None, |_, rng| {
        let start = Configuration::random(l3.clone(), 0.5, rng).unwrap();
        hitting_time_discrete(start, is_stable, &p, rng, 1_000_000).unwrap().unwrap_or(u64::MAX)
    })
    .unwrap();
    times.sort_unstable();
    let t_abs = times[(times.len() * 999) / 1000];
    let chain = SmallChain::new(3, &p).unwrap();
    let at_abs = chain.mi_at(&all, t_abs).unwrap();
    let limit = chain.mi_limit(&all).unwrap();
    outcome(
        monotone && exact_one && (at_abs - 1.0).abs() <= 0.01,
        format!(
            "nonincreasing over t<=200: {monotone}; fixed-point prior exactly 1 bit: {exact_one}; \
             I({t_abs}) = {at_abs:.6}, limit {limit:.6} (target 1.0 +/- 0.01)"
        ),
    )
}

fn criterion_8() -> Outcome {
    let l = grid(16, Boundary::Free);
    let params = [
        DynamicsParams::zero_temperature(),
        DynamicsParams::finite(0.5),
        DynamicsParams::finite(2.0).with_freeze_minus(true),
    ];
    let results = run_trials(1000, 80, None, |i, rng| {
        let p = params[i as usize % params.len()];
        let mid = Configuration::random(l.clone(), 0.5, rng).unwrap();
        let start = vec![Configuration::all_plus(l.clone()), mid, Configuration::all_minus(l.clone())];
        let mut run = CoupledChains::new(start, p).unwrap();
        let (mut checks, mut violations) = (0u64, 0u64);
        for ring in 1..=100_000u64 {
            run.tick(rng, f64::INFINITY);
            if ring % 1000 == 0 {
                let c = run.chains();
                checks += 1;
                violations += u64::from(!(c[0].dominates(&c[1]) && c[1].dominates(&c[2])));
            }
        }
        (checks, violations)
    })
    .unwrap();
    let checks: u64 = results.iter().map(|r| r.0).sum();
    let violations: u64 = results.iter().map(|r| r.1).sum();
    outcome(
        violations == 0 && checks == 100_000,
        format!("{checks} checkpoints over 10^3 triples x 10^5 rings, {violations} violations"),
    )
}

fn criterion_9(e: &Erosion) -> Outcome {
    outcome(
        e.violations == 0 && e.snapshots >= 10_000,
        format!("{} qualifying snapshots, {} violations", e.snapshots, e.violations),
    )
}

fn criterion_10() -> Outcome {
    let s = stripe_survival(64, 4.0, 0.5, true, 1000, 90, None).unwrap();
    if s.success_fraction >= 2.0 / 3.0 {
        return outcome(
            true,
            format!(
                "beta 4, t0 {:.3}: majority kept in {}/1000 trials, mean N1+ {:.2}",
                s.t0, s.successes, s.mean_plus
            ),
        );
    }
    let sweep: Vec<f64> = [3.0, 4.0, 5.0, 6.0]
        .iter()
        .map(|&b| stripe_survival(64, b, 0.5, true, 1000, 91, None).unwrap().success_fraction)
        .collect();
    let monotone = sweep.windows(2).all(|w| w[1] >= w[0]);
    let reached = sweep.iter().any(|&f| f >= 2.0 / 3.0);
    outcome(
        monotone && reached,
        format!("beta 4 fraction {:.3}; sweep beta 3..6 = {sweep:.3?}", s.success_fraction),
    )
}

fn zero_error<C: Codec>(codec: &C, len: usize, seed: u64) -> (usize, usize) {
    let params = codec.dynamics();
    let mut errors = 0;
    let mut messages = 0;
    for (i, m) in all_messages(len).enumerate() {
        let cfg = codec.encode(&m).unwrap();
        let out = run_discrete(cfg.clone(), 1_000_000, &params, &mut trial_rng(seed, i as u64)).unwrap();
        let read = codec.decode_prefix(&out, len).unwrap();
        errors += m.iter().zip(&read).filter(|(a, b)| a != b).count();
        errors += usize::from(out != cfg);
        messages += 1;
    }
    (messages, errors)
}

fn criterion_11() -> Outcome {
    let stripe = StripeCodec::new(24).unwrap();
    let honey = HoneycombCodec::new(9, 8).unwrap();
    let plus = FieldDropletCodec::new(14, Field::Plus).unwrap();
    let minus = FieldDropletCodec::new(14, Field::Minus).unwrap();
    let runs = [
        ("stripe k=24", zero_error(&stripe, stripe.capacity().min(12), 100)),
        ("honeycomb 9x8", zero_error(&honey, honey.capacity().min(12), 101)),
        ("field droplet +", zero_error(&plus, plus.capacity().min(12), 102)),
        ("field droplet -", zero_error(&minus, minus.capacity().min(12), 103)),
    ];
    let total: usize = runs.iter().map(|r| r.1 .1).sum();
    let detail: Vec<String> = runs
        .iter()
        .map(|(name, (m, e))| format!("{name}: {m} messages, {e} errors"))
        .collect();
    outcome(total == 0, detail.join("; "))
}

fn main() {
    let started = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut record = |id, name, o: Outcome| {
        println!("{} [{id:>2}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((id, name, o));
    };
    record(1, "stable iff striped", criterion_1());
    record(2, "stripe description recursion", criterion_2());
    record(3, "absorption", criterion_3());
    let erosion = erosion_data();
    record(4, "erosion scaling", criterion_4(&erosion));
    record(5, "Z-channel capacity", criterion_5());
    record(6, "droplet scheme", criterion_6());
    record(7, "exact MI on 3x3", criterion_7());
    record(8, "monotone coupling", criterion_8());
    record(9, "Hopf identity", criterion_9(&erosion));
    record(10, "finite-beta stripe survival", criterion_10());
    record(11, "zero-error codecs", criterion_11());

    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    let distinct: HashSet<usize> = results.iter().map(|r| r.0).collect();
    assert_eq!(distinct.len(), 11);
    println!(
        "acceptance: {} passed, {} failed {:?} in {:.1}s",
        results.len() - failed.len(),
        failed.len(),
        failed,
        started.elapsed().as_secs_f64()
    );
    if !failed.is_empty() && std::env::var_os("ISING_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
