//! Exact mutual information `I(X_0; X_t)` on grids with at most 512 states.
//!
//! The one-step kernel of the discrete chain is built explicitly; each state
//! in the prior's support is propagated `t` steps and the joint law is formed
//! from the rows.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{site_rate, DynamicsParams};
use crate::error::{Error, Result};
use crate::lattice::{Boundary, Configuration, Lattice};

/// Largest state space handled (`k = 3`).
pub const MAX_STATES: usize = 512;

/// Probability mass over state indices (see [`Configuration::index`]).
pub type Prior = Vec<(u64, f64)>;

pub fn uniform_prior(states: impl IntoIterator<Item = u64>) -> Prior {
    let states: Vec<u64> = states.into_iter().collect();
    let p = 1.0 / states.len() as f64;
    states.into_iter().map(|s| (s, p)).collect()
}

#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Sparse one-step kernel of the discrete chain on a free `k x k` grid.
#[derive(Debug, Clone)]
pub struct SmallChain {
    lattice: Arc<Lattice>,
    rows: Vec<Vec<(u32, f64)>>,
}

impl SmallChain {
    pub fn new(k: usize, params: &DynamicsParams) -> Result<Self> {
        params.validate()?;
        let lattice = Arc::new(Lattice::square(k, Boundary::Free)?);
        let n = lattice.site_count();
        if n >= 64 || 1usize << n > MAX_STATES {
            return Err(Error::InvalidArgument(format!(
                "exact computation limited to {MAX_STATES} states, k = {k} has 2^{n}"
            )));
        }
        let rows = (0..1u64 << n)
            .map(|s| {
                let cfg = Configuration::from_index(lattice.clone(), s);
                let mut row = Vec::new();
                let mut stay = 1.0;
                for v in 0..n {
                    let r = site_rate(&cfg, v, params) / n as f64;
                    if r > 0.0 {
                        row.push(((s ^ 1 << v) as u32, r));
                        stay -= r;
                    }
                }
                if stay > 0.0 {
                    row.push((s as u32, stay));
                }
                row
            })
            .collect();
        Ok(Self { lattice, rows })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn states(&self) -> usize {
        self.rows.len()
    }

    pub fn transitions(&self, s: u64) -> &[(u32, f64)] {
        &self.rows[s as usize]
    }

    /// One step applied to the row vector `dist`.
    pub fn step(&self, dist: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; dist.len()];
        for (s, &p) in dist.iter().enumerate() {
            if p != 0.0 {
                for &(to, w) in &self.rows[s] {
                    out[to as usize] += p * w;
                }
            }
        }
        out
    }

    fn check_prior(&self, prior: &Prior) -> Result<()> {
        let mut total = Kahan::default();
        for &(s, p) in prior {
            if s as usize >= self.states() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("bad prior entry ({s}, {p})")));
            }
            total.add(p);
        }
        if prior.is_empty() || (total.sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("prior sums to {}", total.sum)));
        }
        Ok(())
    }

    /// `I(X_0; X_t)` in bits for `t = 0..=t_max`.
    pub fn mi_curve(&self, prior: &Prior, t_max: u64) -> Result<Vec<f64>> {
        self.check_prior(prior)?;
        let m = self.states();
        let mut rows: Vec<Vec<f64>> = prior
            .iter()
            .map(|&(s, _)| {
                let mut r = vec![0.0; m];
                r[s as usize] = 1.0;
                r
            })
            .collect();
        let mut curve = Vec::with_capacity(t_max as usize + 1);
        for t in 0..=t_max {
            if t > 0 {
                for r in rows.iter_mut() {
                    *r = self.step(r);
                }
            }
            curve.push(mutual_information(prior, &rows));
        }
        Ok(curve)
    }

    /// `I(X_0; X_t)` at a single `t`.
    pub fn mi_at(&self, prior: &Prior, t: u64) -> Result<f64> {
        Ok(*self.mi_curve(prior, t)?.last().expect("non-empty curve"))
    }

    /// Probability of being absorbed in each fixed point, from every state,
    /// by value iteration until the change is below `tol`.
    pub fn absorption(&self, tol: f64) -> Vec<Vec<(u64, f64)>> {
        let m = self.states();
        let fixed: Vec<u64> = (0..m as u64)
            .filter(|&s| self.rows[s as usize].iter().all(|&(to, _)| to as u64 == s))
            .collect();
        let mut out = vec![Vec::new(); m];
        for &f in &fixed {
            let mut h = vec![0.0; m];
            h[f as usize] = 1.0;
            loop {
                let mut delta: f64 = 0.0;
                for s in 0..m {
                    let v: f64 = self.rows[s].iter().map(|&(to, w)| w * h[to as usize]).sum();
                    delta = delta.max((v - h[s]).abs());
                    h[s] = v;
                }
                if delta < tol {
                    break;
                }
            }
            for s in 0..m {
                if h[s] > 0.0 {
                    out[s].push((f, h[s]));
                }
            }
        }
        out
    }

    /// `lim_{t -> inf} I(X_0; X_t)` for a chain absorbed in fixed points.
    pub fn mi_limit(&self, prior: &Prior) -> Result<f64> {
        self.check_prior(prior)?;
        let absorbed = self.absorption(1e-15);
        let m = self.states();
        let rows: Vec<Vec<f64>> = prior
            .iter()
            .map(|&(s, _)| {
                let mut r = vec![0.0; m];
                for &(f, p) in &absorbed[s as usize] {
                    r[f as usize] = p;
                }
                r
            })
            .collect();
        Ok(mutual_information(prior, &rows))
    }
}

fn mutual_information(prior: &Prior, rows: &[Vec<f64>]) -> f64 {
    let m = rows.first().map_or(0, Vec::len);
    let mut marginal = vec![Kahan::default(); m];
    for (&(_, p), r) in prior.iter().zip(rows) {
        for (y, &q) in r.iter().enumerate() {
            marginal[y].add(p * q);
        }
    }
    let mut total = Kahan::default();
    for (&(_, p), r) in prior.iter().zip(rows) {
        if p == 0.0 {
            continue;
        }
        for (y, &q) in r.iter().enumerate() {
            // Underflowed mass contributes nothing (0 log 0 = 0).
            if p * q > 0.0 && marginal[y].sum > 0.0 {
                total.add(p * q * (q / marginal[y].sum).log2());
            }
        }
    }
    total.sum.max(0.0)
}

/// Result row of [`exact_mi`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiSmallGrid {
    pub k: usize,
    pub support: usize,
    pub prior_entropy: f64,
    pub curve: Vec<f64>,
}

/// Exact `I(X_0; X_t)` for `t = 0..=t_max` under zero-temperature dynamics.
pub fn exact_mi(k: usize, prior: &Prior, t_max: u64) -> Result<MiSmallGrid> {
    let chain = SmallChain::new(k, &DynamicsParams::zero_temperature())?;
    let curve = chain.mi_curve(prior, t_max)?;
    let mut h = Kahan::default();
    for &(_, p) in prior {
        h.add(-super::info::xlog2x(p));
    }
    Ok(MiSmallGrid {
        k,
        support: prior.len(),
        prior_entropy: h.sum,
        curve,
    })
}
