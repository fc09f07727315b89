//! Monte Carlo harnesses: droplet erosion, channel estimates, stripe
//! survival, plus exact small-grid mutual information.
//!
//! Trials run on a rayon pool. Trial `i` always draws from
//! `trial_rng(seed, i)`, and results come back in trial order, so outputs do
//! not depend on the worker count.

pub mod info;
pub mod mi;
pub mod output;
pub mod stats;

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codecs::{Codec, DropletCodec};
use crate::dynamics::{run_continuous, DynamicsParams, Kmc, RateConvention};
use crate::error::{Error, Result};
use crate::lattice::{Boundary, Configuration, Lattice};
use crate::rng::{trial_rng, SimRng};
use crate::stability::{hopf_counts, is_striped};

pub use info::{binary_channel_capacity, binary_channel_mi, entropy, fano_upper, z_capacity};
pub use mi::{exact_mi, uniform_prior, MiSmallGrid, Prior, SmallChain};
pub use stats::{ks_two_sample, loglog_fit, moments, ols, wilson, Interval, KsResult, LinearFit, Moments};

/// Streams at or above this index are reserved for calibration pilots.
const PILOT_STREAM: u64 = 1 << 63;

/// Runs `f(trial, rng)` for `trial in 0..trials`, on `workers` threads
/// (rayon's default when `None`). Results are in trial order.
pub fn run_trials<T, F>(trials: u64, seed: u64, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut SimRng) -> T + Sync + Send,
{
    let job = || {
        (0..trials)
            .into_par_iter()
            .map(|i| f(i, &mut trial_rng(seed, i)))
            .collect()
    };
    match workers {
        None => Ok(job()),
        Some(0) => Err(Error::InvalidArgument("workers must be >= 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
            .map(|pool| pool.install(job)),
    }
}

/// Free grid of side `ell + 2` with a centred `ell x ell` plus droplet.
pub fn droplet_start(ell: usize) -> Result<Configuration> {
    if ell == 0 {
        return Err(Error::InvalidArgument("droplet side must be >= 1".into()));
    }
    let lattice = Arc::new(Lattice::square(ell + 2, Boundary::Free)?);
    let l = lattice.clone();
    Ok(Configuration::from_fn(lattice, |v| {
        let (x, y) = l.coords(v);
        (2..=ell + 1).contains(&x) && (2..=ell + 1).contains(&y)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErosionOptions {
    pub convention: RateConvention,
    /// Time cap per trial; calibrated from a pilot when `None`.
    pub cap: Option<f64>,
    /// Hopf snapshot spacing in flips (0 disables snapshots).
    pub hopf_every: u64,
    pub workers: Option<usize>,
}

impl Default for ErosionOptions {
    fn default() -> Self {
        Self {
            convention: RateConvention::PerSiteUnit,
            cap: None,
            hopf_every: 1000,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErosionTrial {
    pub trial: u64,
    /// `None` on timeout.
    pub tau: Option<f64>,
    pub events: u64,
    pub hopf_snapshots: u64,
    pub hopf_violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErosionSummary {
    pub ell: usize,
    pub trials: u64,
    pub completed: u64,
    pub timeouts: u64,
    pub cap: f64,
    pub mean_tau: f64,
    pub sd_tau: f64,
    pub q10: f64,
    pub q50: f64,
    pub q90: f64,
    pub hopf_snapshots: u64,
    pub hopf_violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErosionRun {
    pub summary: ErosionSummary,
    pub trials: Vec<ErosionTrial>,
}

fn erosion_trial(start: &Configuration, params: &DynamicsParams, cap: f64, hopf_every: u64, trial: u64, rng: &mut SimRng) -> Result<ErosionTrial> {
    let mut out = ErosionTrial {
        trial,
        tau: None,
        events: 0,
        hopf_snapshots: 0,
        hopf_violations: 0,
    };
    let snapshot = |cfg: &Configuration, out: &mut ErosionTrial| {
        if let Some(ok) = hopf_counts(cfg).identity_holds() {
            out.hopf_snapshots += 1;
            out.hopf_violations += u64::from(!ok);
        }
    };
    if hopf_every > 0 {
        snapshot(start, &mut out);
    }
    if start.is_all_minus() {
        out.tau = Some(0.0);
        return Ok(out);
    }
    let mut kmc = Kmc::new(start.clone(), *params)?;
    while let Some((t, _)) = kmc.next_event(rng, cap) {
        if hopf_every > 0 && kmc.events() % hopf_every == 0 {
            snapshot(kmc.config(), &mut out);
        }
        if kmc.config().is_all_minus() {
            out.tau = Some(t);
            break;
        }
    }
    out.events = kmc.events();
    Ok(out)
}

/// Erosion times of an `ell x ell` droplet at zero temperature.
pub fn erosion_trials(ell: usize, trials: u64, seed: u64, opts: &ErosionOptions) -> Result<ErosionRun> {
    let start = droplet_start(ell)?;
    let params = DynamicsParams::zero_temperature().with_convention(opts.convention);
    let cap = match opts.cap {
        Some(c) if c > 0.0 => c,
        Some(c) => return Err(Error::InvalidArgument(format!("cap must be positive, got {c}"))),
        None => calibrate_cap(&start, &params, ell, seed, opts.workers)?,
    };
    let records = run_trials(trials, seed, opts.workers, |i, rng| {
        erosion_trial(&start, &params, cap, opts.hopf_every, i, rng)
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let taus: Vec<f64> = records.iter().filter_map(|r| r.tau).collect();
    let m = moments(&taus).unwrap_or(Moments {
        mean: f64::NAN,
        sd: f64::NAN,
        q10: f64::NAN,
        q50: f64::NAN,
        q90: f64::NAN,
    });
    Ok(ErosionRun {
        summary: ErosionSummary {
            ell,
            trials,
            completed: taus.len() as u64,
            timeouts: trials - taus.len() as u64,
            cap,
            mean_tau: m.mean,
            sd_tau: m.sd,
            q10: m.q10,
            q50: m.q50,
            q90: m.q90,
            hopf_snapshots: records.iter().map(|r| r.hopf_snapshots).sum(),
            hopf_violations: records.iter().map(|r| r.hopf_violations).sum(),
        },
        trials: records,
    })
}

/// `50 C ell^2` with `C` the pilot mean of `tau / ell^2` over 100 runs.
fn calibrate_cap(start: &Configuration, params: &DynamicsParams, ell: usize, seed: u64, workers: Option<usize>) -> Result<f64> {
    let area = (ell * ell) as f64;
    let scale = 1.0 / params.rate_scale(start.len());
    let generous = 1000.0 * (area + 1.0) * scale;
    let pilot = run_trials(100, seed, workers, |i, _| {
        let mut rng = trial_rng(seed, PILOT_STREAM + i);
        erosion_trial(start, params, generous, 0, i, &mut rng)
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let taus: Vec<f64> = pilot.iter().filter_map(|r| r.tau).collect();
    if taus.is_empty() {
        return Ok(generous);
    }
    let c_hat = taus.iter().sum::<f64>() / taus.len() as f64 / area;
    Ok((50.0 * c_hat * area).max(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErosionSweep {
    pub summaries: Vec<ErosionSummary>,
    /// Least-squares slope of `ln mean tau` against `ln ell`.
    pub exponent: Option<LinearFit>,
}

pub fn erosion_sweep(ells: &[usize], trials: u64, seed: u64, opts: &ErosionOptions) -> Result<(ErosionSweep, Vec<ErosionRun>)> {
    let runs = ells
        .iter()
        .enumerate()
        .map(|(i, &ell)| erosion_trials(ell, trials, seed.wrapping_add(i as u64), opts))
        .collect::<Result<Vec<_>>>()?;
    let summaries: Vec<ErosionSummary> = runs.iter().map(|r| r.summary.clone()).collect();
    let usable: Vec<&ErosionSummary> = summaries.iter().filter(|s| s.completed > 0).collect();
    let exponent = if usable.len() >= 3 {
        let xs: Vec<f64> = usable.iter().map(|s| s.ell as f64).collect();
        let ys: Vec<f64> = usable.iter().map(|s| s.mean_tau).collect();
        Some(loglog_fit(&xs, &ys)?)
    } else {
        None
    };
    Ok((ErosionSweep { summaries, exponent }, runs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelEstimate {
    pub trials: u64,
    pub ones_sent: u64,
    pub zeros_sent: u64,
    pub one_to_zero: u64,
    pub zero_to_one: u64,
    pub q0_hat: f64,
    pub q1_hat: f64,
    pub q0_ci: Interval,
    pub q1_ci: Interval,
}

impl ChannelEstimate {
    fn from_counts(trials: u64, ones: u64, zeros: u64, e10: u64, e01: u64) -> Self {
        let ratio = |e: u64, n: u64| if n == 0 { 0.0 } else { e as f64 / n as f64 };
        Self {
            trials,
            ones_sent: ones,
            zeros_sent: zeros,
            one_to_zero: e10,
            zero_to_one: e01,
            q0_hat: ratio(e01, zeros),
            q1_hat: ratio(e10, ones),
            q0_ci: wilson(e01, zeros),
            q1_ci: wilson(e10, ones),
        }
    }
}

/// Per-block crossover rates of the droplet codec on a `k x k` grid at
/// time `t`. Each trial sends a uniformly random message through the
/// zero-temperature dynamics (unit rate per site).
pub fn crossover_estimate(k: usize, area: usize, t: f64, trials: u64, seed: u64, workers: Option<usize>) -> Result<ChannelEstimate> {
    let codec = DropletCodec::new(k, area)?;
    let params = codec.dynamics();
    let cap = codec.capacity();
    let counts = run_trials(trials, seed, workers, |_, rng| -> Result<[u64; 4]> {
        let msg: Vec<bool> = (0..cap).map(|_| rng.gen()).collect();
        let (out, _) = run_continuous(codec.encode(&msg)?, t, &params, rng)?;
        let read = codec.decode(&out)?;
        let mut c = [0u64; 4];
        for (&m, &r) in msg.iter().zip(&read) {
            c[usize::from(m)] += 1;
            if m != r {
                c[2 + usize::from(m)] += 1;
            }
        }
        Ok(c)
    })?;
    let mut total = [0u64; 4];
    for c in counts {
        for (a, b) in total.iter_mut().zip(c?) {
            *a += b;
        }
    }
    Ok(ChannelEstimate::from_counts(trials, total[1], total[0], total[3], total[2]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityBound {
    pub k: usize,
    pub area: usize,
    pub blocks: usize,
    pub t: f64,
    pub estimate: ChannelEstimate,
    pub z_capacity: f64,
    /// `blocks * z_capacity(q1_hat)`.
    pub bits: f64,
    /// Bound evaluated at the ends of the Wilson interval of `q1`.
    pub bits_lo: f64,
    pub bits_hi: f64,
}

/// `K^2 C_Z(q1)`: the droplet codec's blocks used as independent Z-channels.
pub fn droplet_capacity_lower_bound(k: usize, area: usize, t: f64, trials: u64, seed: u64, workers: Option<usize>) -> Result<CapacityBound> {
    let blocks = DropletCodec::new(k, area)?.capacity();
    let estimate = crossover_estimate(k, area, t, trials, seed, workers)?;
    let z = z_capacity(estimate.q1_hat)?;
    Ok(CapacityBound {
        k,
        area,
        blocks,
        t,
        z_capacity: z,
        bits: blocks as f64 * z,
        bits_lo: blocks as f64 * z_capacity(estimate.q1_ci.hi)?,
        bits_hi: blocks as f64 * z_capacity(estimate.q1_ci.lo)?,
        estimate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripeSurvival {
    pub k: usize,
    pub beta: f64,
    pub c: f64,
    pub freeze_minus: bool,
    pub t0: f64,
    pub trials: u64,
    pub mean_plus: f64,
    pub sd_plus: f64,
    /// Trials whose bottom row keeps more than `k / 2` plus spins.
    pub successes: u64,
    pub success_fraction: f64,
    pub success_ci: Interval,
    pub bottom_counts: Vec<u32>,
}

/// Free `k x k` grid with only the bottom row plus.
pub fn bottom_stripe(k: usize) -> Result<Configuration> {
    let lattice = Arc::new(Lattice::square(k, Boundary::Free)?);
    let l = lattice.clone();
    Ok(Configuration::from_fn(lattice, |v| l.coords(v).1 == 1))
}

/// Plus count of the bottom row.
pub fn bottom_plus(cfg: &Configuration) -> usize {
    let l = cfg.lattice();
    (1..=l.width()).filter(|&x| cfg.is_plus(l.site(x, 1))).count()
}

/// Finite-temperature run of the bottom-stripe start to `t0 = e^(c beta)`.
pub fn stripe_survival(k: usize, beta: f64, c: f64, freeze_minus: bool, trials: u64, seed: u64, workers: Option<usize>) -> Result<StripeSurvival> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidArgument(format!("c must lie in (0, 1), got {c}")));
    }
    let params = DynamicsParams::finite(beta).with_freeze_minus(freeze_minus);
    params.validate()?;
    let start = bottom_stripe(k)?;
    let t0 = (c * beta).exp();
    let counts = run_trials(trials, seed, workers, |_, rng| -> Result<u32> {
        let (out, _) = run_continuous(start.clone(), t0, &params, rng)?;
        Ok(bottom_plus(&out) as u32)
    })?
    .into_iter()
    .collect::<Result<Vec<u32>>>()?;
    let xs: Vec<f64> = counts.iter().map(|&n| f64::from(n)).collect();
    let m = moments(&xs).ok_or_else(|| Error::InvalidArgument("trials must be >= 1".into()))?;
    let successes = counts.iter().filter(|&&n| 2 * n as usize > k).count() as u64;
    Ok(StripeSurvival {
        k,
        beta,
        c,
        freeze_minus,
        t0,
        trials,
        mean_plus: m.mean,
        sd_plus: m.sd,
        successes,
        success_fraction: successes as f64 / trials as f64,
        success_ci: wilson(successes, trials),
        bottom_counts: counts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalEstimate {
    pub k: usize,
    pub t: f64,
    pub p: f64,
    pub trials: u64,
    pub not_striped: u64,
    pub fraction: f64,
    pub ci: Interval,
}

/// Fraction of Bernoulli(`p`) starts on a free `k x k` grid that are not
/// striped after zero-temperature dynamics up to time `t`.
pub fn survival_probability(k: usize, t: f64, p: f64, trials: u64, seed: u64, workers: Option<usize>) -> Result<SurvivalEstimate> {
    let lattice = Arc::new(Lattice::square(k, Boundary::Free)?);
    let params = DynamicsParams::zero_temperature();
    let flags = run_trials(trials, seed, workers, |_, rng| -> Result<bool> {
        let start = Configuration::random(lattice.clone(), p, rng)?;
        let (out, _) = run_continuous(start, t, &params, rng)?;
        Ok(is_striped(&out).is_none())
    })?
    .into_iter()
    .collect::<Result<Vec<bool>>>()?;
    let not_striped = flags.iter().filter(|&&f| f).count() as u64;
    Ok(SurvivalEstimate {
        k,
        t,
        p,
        trials,
        not_striped,
        fraction: not_striped as f64 / trials.max(1) as f64,
        ci: wilson(not_striped, trials),
    })
}
