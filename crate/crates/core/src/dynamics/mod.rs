//! Glauber dynamics at zero and positive temperature.
//!
//! All rules are expressed through a per-site flip rate `r_v(σ)`, the
//! probability that refreshing site `v` changes its spin:
//!
//! * `β = ∞`: `1` if the site disagrees with a strict majority of its
//!   neighbours, `0` if it agrees with one, and at a tie `1/2` or, with an
//!   external field, `1` exactly when the spin opposes the field.
//! * finite `β`: heat-bath refresh; the new spin is `-1` with probability
//!   `φ(S)`, `φ(a) = e^{aβ} / (e^{aβ} + e^{-aβ})`, where `S` is
//!   `#minus - #plus` among the neighbours. With `freeze_minus` set,
//!   minus sites never flip.
//!
//! The discrete chain picks a uniform site per step and flips it with
//! probability `r_v`; the continuous chain flips site `v` at rate `r_v`
//! (per-site clocks) or `r_v / n` (one clock for the whole system).

mod coupling;
mod sim;
mod tree;

pub use coupling::{coupled_run, coupled_run_observed, CoupledChains};
pub use sim::{
    hitting_time, hitting_time_discrete, read_jsonl, run_continuous, run_continuous_logged,
    run_discrete, run_discrete_logged, run_discrete_naive, step_discrete, Event, EventLog, Hitting,
    JumpChain, Kmc,
};
pub use tree::RateTree;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{Configuration, Spin, MINUS, PLUS};

/// Sign of the external field used to break zero-temperature ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    #[default]
    None,
    Plus,
    Minus,
}

impl Field {
    pub fn spin(self) -> Option<Spin> {
        match self {
            Field::None => None,
            Field::Plus => Some(PLUS),
            Field::Minus => Some(MINUS),
        }
    }
}

/// Clock convention for continuous time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateConvention {
    /// Each site carries a rate-1 clock.
    #[default]
    PerSiteUnit,
    /// The whole system carries one rate-1 clock; a site rings at rate `1/n`.
    PerSystemUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsParams {
    /// Inverse temperature; `f64::INFINITY` for the zero-temperature rule.
    /// Accepts a number or the string `"inf"`.
    #[serde(default = "infinite", with = "beta_serde")]
    pub beta: f64,
    #[serde(default)]
    pub field: Field,
    #[serde(default)]
    pub rate_convention: RateConvention,
    #[serde(default)]
    pub freeze_minus: bool,
}

fn infinite() -> f64 {
    f64::INFINITY
}

impl Default for DynamicsParams {
    fn default() -> Self {
        Self::zero_temperature()
    }
}

impl DynamicsParams {
    pub fn zero_temperature() -> Self {
        Self {
            beta: f64::INFINITY,
            field: Field::None,
            rate_convention: RateConvention::PerSiteUnit,
            freeze_minus: false,
        }
    }

    pub fn finite(beta: f64) -> Self {
        Self {
            beta,
            ..Self::zero_temperature()
        }
    }

    pub fn with_field(mut self, field: Field) -> Self {
        self.field = field;
        self
    }

    pub fn with_convention(mut self, rate_convention: RateConvention) -> Self {
        self.rate_convention = rate_convention;
        self
    }

    pub fn with_freeze_minus(mut self, freeze_minus: bool) -> Self {
        self.freeze_minus = freeze_minus;
        self
    }

    #[inline]
    pub fn is_zero_temperature(&self) -> bool {
        self.beta.is_infinite()
    }

    /// Rejects combinations the dynamics do not define: a field at finite
    /// temperature, or frozen minus sites at zero temperature.
    pub fn validate(&self) -> Result<()> {
        if self.beta.is_nan() || self.beta <= 0.0 {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {}", self.beta)));
        }
        if self.field != Field::None && !self.is_zero_temperature() {
            return Err(Error::InvalidArgument(
                "an external field is only defined at beta = inf".into(),
            ));
        }
        if self.freeze_minus && self.is_zero_temperature() {
            return Err(Error::InvalidArgument("freeze_minus requires a finite beta".into()));
        }
        Ok(())
    }

    /// Multiplier turning a per-site rate into this convention's rate.
    pub fn rate_scale(&self, n: usize) -> f64 {
        match self.rate_convention {
            RateConvention::PerSiteUnit => 1.0,
            RateConvention::PerSystemUnit => 1.0 / n as f64,
        }
    }
}

mod beta_serde {
    use super::*;

    pub fn serialize<S: Serializer>(beta: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if beta.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*beta)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Text(t) => match t.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
                other => other
                    .parse()
                    .map_err(|_| serde::de::Error::custom(format!("invalid beta `{t}`"))),
            },
        }
    }
}

/// `φ(a) = e^{aβ} / (e^{aβ} + e^{-aβ})`.
#[inline]
pub fn phi(a: f64, beta: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * a * beta).exp())
}

/// `S = #minus - #plus` over the neighbours of `v`, frozen frame included.
#[inline]
pub fn minus_excess(cfg: &Configuration, v: usize) -> i32 {
    -cfg.neighbor_sum(v)
}

/// Probability that a heat-bath refresh at `v` yields `-1`.
pub fn minus_update_prob(cfg: &Configuration, v: usize, beta: f64) -> Result<f64> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::InvalidArgument(
            "heat-bath probability needs finite positive beta; use zero_temp_flip_prob".into(),
        ));
    }
    Ok(phi(minus_excess(cfg, v) as f64, beta))
}

/// Probability that a zero-temperature refresh at `v` changes its spin.
#[inline]
pub fn zero_temp_flip_prob(cfg: &Configuration, v: usize, field: Field) -> f64 {
    let (m, l) = cfg.local_counts(v);
    if m < l {
        1.0
    } else if m > l {
        0.0
    } else {
        match field.spin() {
            None => 0.5,
            Some(h) if h != cfg.spin(v) => 1.0,
            Some(_) => 0.0,
        }
    }
}

/// Per-site flip rate `r_v(σ)` (probability that a refresh changes the spin).
#[inline]
pub fn site_rate(cfg: &Configuration, v: usize, params: &DynamicsParams) -> f64 {
    if params.is_zero_temperature() {
        return zero_temp_flip_prob(cfg, v, params.field);
    }
    let s = minus_excess(cfg, v) as f64;
    if cfg.is_plus(v) {
        phi(s, params.beta)
    } else if params.freeze_minus {
        0.0
    } else {
        phi(-s, params.beta)
    }
}

/// Spin a site takes after a refresh driven by uniform `u`. Used by the
/// coupled chains; monotone in the neighbourhood for fixed `u`.
#[inline]
pub fn refreshed_spin(cfg: &Configuration, v: usize, params: &DynamicsParams, u: f64) -> Spin {
    if params.is_zero_temperature() {
        let sum = cfg.neighbor_sum(v);
        return match sum.signum() {
            1 => PLUS,
            -1 => MINUS,
            _ => match params.field.spin() {
                Some(h) => h,
                None if u < 0.5 => PLUS,
                None => MINUS,
            },
        };
    }
    if params.freeze_minus && !cfg.is_plus(v) {
        return MINUS;
    }
    if u < phi(minus_excess(cfg, v) as f64, params.beta) {
        MINUS
    } else {
        PLUS
    }
}
