use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::{refreshed_spin, DynamicsParams};
use crate::error::{Error, Result};
use crate::lattice::Configuration;

/// Several chains driven by one stream of `(time, site, uniform)` clock
/// rings. Every site carries a clock (rate 1 per site, or `1/n` under the
/// per-system convention) and each ring refreshes that site in every chain
/// with the same uniform, which keeps the coordinatewise order.
#[derive(Debug, Clone)]
pub struct CoupledChains {
    chains: Vec<Configuration>,
    params: DynamicsParams,
    clock: Exp<f64>,
    time: f64,
    rings: u64,
}

impl CoupledChains {
    pub fn new(chains: Vec<Configuration>, params: DynamicsParams) -> Result<Self> {
        params.validate()?;
        let Some(first) = chains.first() else {
            return Err(Error::InvalidArgument("no chains to couple".into()));
        };
        let lattice = first.lattice().clone();
        if chains.iter().any(|c| **c.lattice() != *lattice) {
            return Err(Error::LatticeMismatch);
        }
        let n = lattice.site_count();
        let clock = Exp::new(n as f64 * params.rate_scale(n)).expect("positive rate");
        Ok(Self {
            chains,
            params,
            clock,
            time: 0.0,
            rings: 0,
        })
    }

    pub fn chains(&self) -> &[Configuration] {
        &self.chains
    }

    pub fn into_chains(self) -> Vec<Configuration> {
        self.chains
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Clock rings processed so far, including ones that changed nothing.
    pub fn rings(&self) -> u64 {
        self.rings
    }

    /// Processes the next ring if it falls no later than `horizon`.
    pub fn tick<R: Rng + ?Sized>(&mut self, rng: &mut R, horizon: f64) -> bool {
        let dt = self.clock.sample(rng);
        if self.time + dt > horizon {
            self.time = horizon;
            return false;
        }
        self.time += dt;
        self.rings += 1;
        let n = self.chains[0].len();
        let v = rng.gen_range(0..n);
        let u: f64 = rng.gen();
        for cfg in &mut self.chains {
            let s = refreshed_spin(cfg, v, &self.params, u);
            cfg.set(v, s);
        }
        true
    }
}

/// Runs the coupled chains to `horizon`.
pub fn coupled_run<R: Rng + ?Sized>(
    configs: Vec<Configuration>,
    horizon: f64,
    params: &DynamicsParams,
    rng: &mut R,
) -> Result<Vec<Configuration>> {
    coupled_run_observed(configs, horizon, params, rng, u64::MAX, |_, _, _| {})
}

/// As [`coupled_run`], calling `observe(rings, time, chains)` at the start,
/// after every `every` rings, and at the end.
pub fn coupled_run_observed<R: Rng + ?Sized>(
    configs: Vec<Configuration>,
    horizon: f64,
    params: &DynamicsParams,
    rng: &mut R,
    every: u64,
    mut observe: impl FnMut(u64, f64, &[Configuration]),
) -> Result<Vec<Configuration>> {
    if horizon.is_nan() || horizon < 0.0 {
        return Err(Error::InvalidArgument(format!("horizon must be >= 0, got {horizon}")));
    }
    let every = every.max(1);
    let mut run = CoupledChains::new(configs, *params)?;
    observe(0, 0.0, run.chains());
    while run.tick(rng, horizon) {
        if run.rings() % every == 0 {
            observe(run.rings(), run.time(), run.chains());
        }
    }
    observe(run.rings(), run.time(), run.chains());
    Ok(run.into_chains())
}
