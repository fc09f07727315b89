use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Distribution, Exp, Geometric};
use serde::{Deserialize, Serialize};

use super::{site_rate, DynamicsParams, RateTree};
use crate::error::{Error, Result};
use crate::lattice::{Configuration, Spin};

fn rate_tree(cfg: &Configuration, params: &DynamicsParams) -> RateTree {
    RateTree::from_weights((0..cfg.len()).map(|v| site_rate(cfg, v, params)))
}

fn refresh_around(tree: &mut RateTree, cfg: &Configuration, params: &DynamicsParams, v: usize) {
    tree.set(v, site_rate(cfg, v, params));
    for &w in cfg.lattice().neighbors(v) {
        let w = w as usize;
        tree.set(w, site_rate(cfg, w, params));
    }
}

/// Event-driven continuous-time simulator. Only sites with a nonzero flip
/// rate can be selected, so stable regions cost nothing.
#[derive(Debug, Clone)]
pub struct Kmc {
    cfg: Configuration,
    params: DynamicsParams,
    tree: RateTree,
    scale: f64,
    time: f64,
    events: u64,
}

impl Kmc {
    pub fn new(cfg: Configuration, params: DynamicsParams) -> Result<Self> {
        params.validate()?;
        let tree = rate_tree(&cfg, &params);
        let scale = params.rate_scale(cfg.len());
        Ok(Self {
            cfg,
            params,
            tree,
            scale,
            time: 0.0,
            events: 0,
        })
    }

    pub fn config(&self) -> &Configuration {
        &self.cfg
    }

    pub fn into_config(self) -> Configuration {
        self.cfg
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    /// Total flip rate under the configured clock convention.
    pub fn total_rate(&self) -> f64 {
        self.tree.total() * self.scale
    }

    /// Advances to the next flip if it happens no later than `horizon`.
    /// Otherwise the clock stops at `horizon` and `None` is returned.
    pub fn next_event<R: Rng + ?Sized>(&mut self, rng: &mut R, horizon: f64) -> Option<(f64, usize)> {
        let total = self.total_rate();
        if total <= 0.0 {
            self.time = self.time.max(horizon);
            return None;
        }
        let dt = Exp::new(total).expect("positive rate").sample(rng);
        if self.time + dt > horizon {
            self.time = horizon;
            return None;
        }
        let v = self.tree.sample(rng.gen())?;
        self.time += dt;
        self.events += 1;
        self.cfg.flip(v);
        refresh_around(&mut self.tree, &self.cfg, &self.params, v);
        Some((self.time, v))
    }
}

/// Exact jump chain of the discrete-time dynamics: the number of steps
/// until the next flip is geometric with success probability `R / n`,
/// where `R` is the sum of per-site flip rates.
#[derive(Debug, Clone)]
pub struct JumpChain {
    cfg: Configuration,
    params: DynamicsParams,
    tree: RateTree,
    step: u64,
}

impl JumpChain {
    pub fn new(cfg: Configuration, params: DynamicsParams) -> Result<Self> {
        params.validate()?;
        let tree = rate_tree(&cfg, &params);
        Ok(Self {
            cfg,
            params,
            tree,
            step: 0,
        })
    }

    pub fn config(&self) -> &Configuration {
        &self.cfg
    }

    pub fn into_config(self) -> Configuration {
        self.cfg
    }

    /// Steps taken so far.
    pub fn step(&self) -> u64 {
        self.step
    }

    /// Advances to the next flip if it happens at step `<= max_step`.
    pub fn next_flip<R: Rng + ?Sized>(&mut self, rng: &mut R, max_step: u64) -> Option<(u64, usize)> {
        let n = self.cfg.len() as f64;
        let p = (self.tree.total() / n).min(1.0);
        if p <= 0.0 {
            self.step = self.step.max(max_step);
            return None;
        }
        let wait = if p >= 1.0 {
            1
        } else {
            Geometric::new(p).expect("valid probability").sample(rng).saturating_add(1)
        };
        let at = self.step.saturating_add(wait);
        if at > max_step {
            self.step = max_step;
            return None;
        }
        let v = self.tree.sample(rng.gen())?;
        self.step = at;
        self.cfg.flip(v);
        refresh_around(&mut self.tree, &self.cfg, &self.params, v);
        Some((at, v))
    }
}

/// One step of the discrete chain: pick a uniform site and refresh it.
/// Returns the flipped site, if any.
pub fn step_discrete<R: Rng + ?Sized>(
    cfg: &mut Configuration,
    params: &DynamicsParams,
    rng: &mut R,
) -> Option<usize> {
    let v = rng.gen_range(0..cfg.len());
    let r = site_rate(cfg, v, params);
    if r > 0.0 && (r >= 1.0 || rng.gen::<f64>() < r) {
        cfg.flip(v);
        Some(v)
    } else {
        None
    }
}

/// `steps` literal applications of [`step_discrete`].
pub fn run_discrete_naive<R: Rng + ?Sized>(
    mut cfg: Configuration,
    steps: u64,
    params: &DynamicsParams,
    rng: &mut R,
) -> Result<Configuration> {
    params.validate()?;
    for _ in 0..steps {
        step_discrete(&mut cfg, params, rng);
    }
    Ok(cfg)
}

/// `steps` steps of the discrete chain, simulated through the jump chain.
pub fn run_discrete<R: Rng + ?Sized>(
    cfg: Configuration,
    steps: u64,
    params: &DynamicsParams,
    rng: &mut R,
) -> Result<Configuration> {
    let mut chain = JumpChain::new(cfg, *params)?;
    while chain.next_flip(rng, steps).is_some() {}
    Ok(chain.into_config())
}

/// As [`run_discrete`], recording every flip with its step index as `t`.
pub fn run_discrete_logged<R: Rng + ?Sized>(
    cfg: Configuration,
    steps: u64,
    params: &DynamicsParams,
    rng: &mut R,
) -> Result<EventLog> {
    let initial = cfg.clone();
    let mut chain = JumpChain::new(cfg, *params)?;
    let mut events = Vec::new();
    while let Some((step, v)) = chain.next_flip(rng, steps) {
        events.push(Event {
            t: step as f64,
            site: v as u32,
            spin: chain.config().spin(v),
        });
    }
    Ok(EventLog {
        initial,
        events,
        final_config: chain.into_config(),
    })
}

/// Continuous-time dynamics up to `horizon`; returns the final
/// configuration and the number of flips.
pub fn run_continuous<R: Rng + ?Sized>(
    cfg: Configuration,
    horizon: f64,
    params: &DynamicsParams,
    rng: &mut R,
) -> Result<(Configuration, u64)> {
    check_horizon(horizon)?;
    let mut kmc = Kmc::new(cfg, *params)?;
    while kmc.next_event(rng, horizon).is_some() {}
    let events = kmc.events();
    Ok((kmc.into_config(), events))
}

pub fn run_continuous_logged<R: Rng + ?Sized>(
    cfg: Configuration,
    horizon: f64,
    params: &DynamicsParams,
    rng: &mut R,
) -> Result<EventLog> {
    check_horizon(horizon)?;
    let initial = cfg.clone();
    let mut kmc = Kmc::new(cfg, *params)?;
    let mut events = Vec::new();
    while let Some((t, v)) = kmc.next_event(rng, horizon) {
        events.push(Event {
            t,
            site: v as u32,
            spin: kmc.config().spin(v),
        });
    }
    Ok(EventLog {
        initial,
        events,
        final_config: kmc.into_config(),
    })
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_nan() || horizon < 0.0 {
        return Err(Error::InvalidArgument(format!("horizon must be >= 0, got {horizon}")));
    }
    Ok(())
}

/// Outcome of a hitting-time run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hitting {
    Hit(f64),
    /// The cap elapsed first, or the dynamics froze without reaching the target.
    Timeout,
}

impl Hitting {
    pub fn time(self) -> Option<f64> {
        match self {
            Hitting::Hit(t) => Some(t),
            Hitting::Timeout => None,
        }
    }
}

/// First continuous time at which `target` holds, checked after every flip.
pub fn hitting_time<R: Rng + ?Sized>(
    cfg: Configuration,
    target: impl Fn(&Configuration) -> bool,
    params: &DynamicsParams,
    rng: &mut R,
    cap: f64,
) -> Result<Hitting> {
    if cap.is_nan() || cap <= 0.0 {
        return Err(Error::InvalidArgument(format!("cap must be positive, got {cap}")));
    }
    if target(&cfg) {
        return Ok(Hitting::Hit(0.0));
    }
    let mut kmc = Kmc::new(cfg, *params)?;
    while let Some((t, _)) = kmc.next_event(rng, cap) {
        if target(kmc.config()) {
            return Ok(Hitting::Hit(t));
        }
    }
    Ok(Hitting::Timeout)
}

/// Discrete-time counterpart of [`hitting_time`]; the result counts steps.
pub fn hitting_time_discrete<R: Rng + ?Sized>(
    cfg: Configuration,
    target: impl Fn(&Configuration) -> bool,
    params: &DynamicsParams,
    rng: &mut R,
    max_steps: u64,
) -> Result<Option<u64>> {
    if target(&cfg) {
        return Ok(Some(0));
    }
    let mut chain = JumpChain::new(cfg, *params)?;
    while let Some((step, _)) = chain.next_flip(rng, max_steps) {
        if target(chain.config()) {
            return Ok(Some(step));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub site: u32,
    pub spin: Spin,
}

/// Trajectory as an initial configuration plus the flips applied to it.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub initial: Configuration,
    pub events: Vec<Event>,
    pub final_config: Configuration,
}

impl EventLog {
    /// Applies the events to the initial configuration, checking that each
    /// one sets a new spin at a strictly later time.
    pub fn replay(&self) -> Result<Configuration> {
        replay(self.initial.clone(), &self.events)
    }

    /// One JSON object `{t, site, spin}` per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for e in &self.events {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

pub(crate) fn replay(mut cfg: Configuration, events: &[Event]) -> Result<Configuration> {
    let mut last = f64::NEG_INFINITY;
    for e in events {
        let v = e.site as usize;
        if v >= cfg.len() || e.t.is_nan() || e.t <= last || cfg.spin(v) == e.spin {
            return Err(Error::Parse(format!("inconsistent event {e:?}")));
        }
        cfg.flip(v);
        last = e.t;
    }
    Ok(cfg)
}

/// Parses a JSONL event stream written by [`EventLog::write_jsonl`].
/// Blank lines and `{"header": ...}` lines are skipped.
pub fn read_jsonl<Rd: BufRead>(input: Rd) -> Result<Vec<Event>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)?;
        if value.get("header").is_some() {
            continue;
        }
        out.push(serde_json::from_value(value)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Field, RateConvention};
    use crate::lattice::{Boundary, Lattice};
    use crate::rng::master_rng;
    use std::sync::Arc;

    fn grid(k: usize, b: Boundary) -> Arc<Lattice> {
        Arc::new(Lattice::square(k, b).unwrap())
    }

    fn stripes(l: &Arc<Lattice>) -> Configuration {
        Configuration::from_fn(l.clone(), |v| l.coords(v).1 <= 2)
    }

    #[test]
    fn stable_inputs_never_move() {
        let l = grid(6, Boundary::Free);
        let mut rng = master_rng(1);
        let p = DynamicsParams::zero_temperature();
        for cfg in [Configuration::all_minus(l.clone()), Configuration::all_plus(l.clone()), stripes(&l)] {
            let mut c = cfg.clone();
            for _ in 0..10_000 {
                assert!(step_discrete(&mut c, &p, &mut rng).is_none());
            }
            assert_eq!(run_discrete(cfg.clone(), 1_000_000, &p, &mut rng).unwrap(), cfg);
            let (out, n) = run_continuous(cfg.clone(), 1e6, &p, &mut rng).unwrap();
            assert_eq!((out, n), (cfg, 0));
        }
    }

    #[test]
    fn isolated_plus_flips_when_selected() {
        let l = grid(3, Boundary::Free);
        let centre = l.site(2, 2);
        let cfg = Configuration::from_fn(l.clone(), |v| v == centre);
        let mut rng = master_rng(2);
        let p = DynamicsParams::zero_temperature();
        for _ in 0..200 {
            let mut c = cfg.clone();
            match step_discrete(&mut c, &p, &mut rng) {
                Some(v) => {
                    assert_eq!(v, centre);
                    assert!(c.is_all_minus());
                }
                None => assert_eq!(c, cfg),
            }
        }
    }

    #[test]
    fn single_site_hitting_time_is_exponential() {
        let l = grid(5, Boundary::MinusFrame);
        let centre = l.site(3, 3);
        let cfg = Configuration::from_fn(l.clone(), |v| v == centre);
        let p = DynamicsParams::zero_temperature();
        let mut rng = master_rng(3);
        let n = 40_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let h = hitting_time(cfg.clone(), |c| c.is_all_minus(), &p, &mut rng, 1e3).unwrap();
            sum += h.time().unwrap();
        }
        let mean = sum / n as f64;
        // Exp(1): sd of the mean is 1/sqrt(n).
        assert!((mean - 1.0).abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");

        let sys = p.with_convention(RateConvention::PerSystemUnit);
        let mut sum = 0.0;
        for _ in 0..n {
            sum += hitting_time(cfg.clone(), |c| c.is_all_minus(), &sys, &mut rng, 1e6)
                .unwrap()
                .time()
                .unwrap();
        }
        let mean = sum / n as f64 / 25.0;
        assert!((mean - 1.0).abs() < 4.0 / (n as f64).sqrt(), "scaled mean {mean}");
    }

    #[test]
    fn hitting_time_edge_cases() {
        let l = grid(4, Boundary::Free);
        let p = DynamicsParams::zero_temperature();
        let mut rng = master_rng(4);
        let minus = Configuration::all_minus(l.clone());
        assert_eq!(
            hitting_time(minus.clone(), |c| c.is_all_minus(), &p, &mut rng, 1.0).unwrap(),
            Hitting::Hit(0.0)
        );
        assert_eq!(
            hitting_time(minus.clone(), |c| c.is_all_plus(), &p, &mut rng, 1.0).unwrap(),
            Hitting::Timeout
        );
        assert!(hitting_time(minus.clone(), |_| false, &p, &mut rng, 0.0).is_err());
        assert!(run_continuous(minus, -1.0, &p, &mut rng).is_err());
    }

    #[test]
    fn logs_replay_and_round_trip() {
        let l = grid(6, Boundary::Free);
        let mut rng = master_rng(5);
        let cfg = Configuration::random(l, 0.5, &mut rng).unwrap();
        let p = DynamicsParams::zero_temperature();
        let log = run_continuous_logged(cfg.clone(), 50.0, &p, &mut rng).unwrap();
        assert!(!log.events.is_empty());
        assert_eq!(log.replay().unwrap(), log.final_config);
        let mut buf = Vec::new();
        log.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().next().unwrap().starts_with("{\"t\":"));
        let events = read_jsonl(&buf[..]).unwrap();
        assert_eq!(replay(cfg.clone(), &events).unwrap(), log.final_config);
        let mut with_header = b"{\"header\":{\"master_seed\":1}}\n".to_vec();
        with_header.extend_from_slice(&buf);
        assert_eq!(read_jsonl(&with_header[..]).unwrap(), events);

        let log = run_discrete_logged(cfg, 5_000, &DynamicsParams::finite(0.5), &mut rng).unwrap();
        assert_eq!(log.replay().unwrap(), log.final_config);
        assert!(log.events.windows(2).all(|w| w[0].t < w[1].t));
    }

    #[test]
    fn seeded_runs_are_deterministic() {
        let l = grid(8, Boundary::Free);
        let cfg = Configuration::random(l, 0.5, &mut master_rng(6)).unwrap();
        let p = DynamicsParams::finite(1.2);
        let a = run_continuous(cfg.clone(), 10.0, &p, &mut master_rng(7)).unwrap();
        let b = run_continuous(cfg, 10.0, &p, &mut master_rng(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn field_stabilises_small_droplet() {
        let l = grid(6, Boundary::Free);
        let cfg = Configuration::from_fn(l.clone(), |v| {
            let (i, j) = l.coords(v);
            (3..=4).contains(&i) && (3..=4).contains(&j)
        });
        let mut rng = master_rng(8);
        let plus = DynamicsParams::zero_temperature().with_field(Field::Plus);
        assert_eq!(run_discrete(cfg.clone(), 100_000, &plus, &mut rng).unwrap(), cfg);
        let none = DynamicsParams::zero_temperature();
        assert_ne!(run_discrete(cfg.clone(), 100_000, &none, &mut rng).unwrap(), cfg);
    }

    /// Exact one-step flip distribution on a 3x3 checkerboard against the
    /// empirical frequencies of the naive stepper.
    #[test]
    fn checkerboard_one_step_frequencies() {
        let l = grid(3, Boundary::Free);
        let cfg = Configuration::from_fn(l.clone(), |v| {
            let (i, j) = l.coords(v);
            (i + j) % 2 == 0
        });
        let p = DynamicsParams::zero_temperature();
        let expected: Vec<f64> = (0..9).map(|v| super::super::site_rate(&cfg, v, &p) / 9.0).collect();
        // Every site disagrees with all neighbours on a checkerboard.
        assert!(expected.iter().all(|&e| (e - 1.0 / 9.0).abs() < 1e-15));
        let mut rng = master_rng(9);
        let trials = 90_000;
        let mut counts = [0usize; 9];
        for _ in 0..trials {
            let mut c = cfg.clone();
            if let Some(v) = step_discrete(&mut c, &p, &mut rng) {
                counts[v] += 1;
            }
        }
        for v in 0..9 {
            let f = counts[v] as f64 / trials as f64;
            let sd = (expected[v] * (1.0 - expected[v]) / trials as f64).sqrt();
            assert!((f - expected[v]).abs() < 4.0 * sd, "site {v}: {f}");
        }
    }

    /// The jump chain and the literal stepper give the same law after a
    /// fixed number of steps (two-sample chi-square on the plus count).
    #[test]
    fn jump_chain_matches_naive_stepper() {
        let l = grid(3, Boundary::Free);
        let start = Configuration::from_index(l, 0b101_110_011);
        let p = DynamicsParams::zero_temperature();
        let trials = 20_000;
        let mut rng = master_rng(10);
        let mut a = [0f64; 10];
        let mut b = [0f64; 10];
        for _ in 0..trials {
            a[run_discrete_naive(start.clone(), 25, &p, &mut rng).unwrap().plus_count()] += 1.0;
            b[run_discrete(start.clone(), 25, &p, &mut rng).unwrap().plus_count()] += 1.0;
        }
        let mut chi2 = 0.0;
        let mut df = -1i32;
        for i in 0..10 {
            let tot = a[i] + b[i];
            if tot > 0.0 {
                chi2 += (a[i] - b[i]).powi(2) / tot;
                df += 1;
            }
        }
        // 0.999 quantile of chi-square with 9 degrees of freedom.
        assert!(df <= 9);
        assert!(chi2 < 27.88, "chi2 {chi2} df {df}");
    }
}
