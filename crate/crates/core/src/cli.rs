//! Command-line runner. Each subcommand reads its section of a TOML config,
//! writes JSONL/CSV/JSON files to the output directory and prints a short
//! summary.
//!
//! ```toml
//! seed = 42
//! trials = 500
//! out = "runs/erode"
//!
//! [erode]
//! ells = [8, 16, 32]
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codecs::{all_messages, bits_from_hex, bits_to_hex, Codec, CodecSpec};
use crate::dynamics::{run_continuous_logged, run_discrete, run_discrete_logged, DynamicsParams, RateConvention};
use crate::error::{Error, Result};
use crate::experiments::output::{create, write_csv, write_jsonl, RunHeader};
use crate::experiments::{
    binary_channel_capacity, droplet_capacity_lower_bound, erosion_sweep, erosion_trials, run_trials,
    uniform_prior, ErosionOptions, SmallChain,
};
use crate::lattice::{Boundary, Configuration, LatticeDescriptor, LatticeKind};
use crate::rng::{master_rng, trial_rng};
use crate::stability::{census, enumerate_stable, is_stable, is_striped};

#[derive(Debug, Parser)]
#[command(name = "ising-storage", version, about = "Glauber dynamics as a storage channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML experiment config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Run the dynamics once and log every flip.
    Simulate,
    /// Droplet erosion times over a sweep of sizes.
    Erode,
    /// Encode, run, and decode messages.
    Codec,
    /// Droplet crossover estimate and capacity bounds.
    Capacity,
    /// Count stable configurations three ways.
    Census,
    /// Exact mutual information curve on a small grid.
    Mi,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Erode => "erode",
            Command::Codec => "codec",
            Command::Capacity => "capacity",
            Command::Census => "census",
            Command::Mi => "mi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional guard: must match the subcommand when present.
    pub experiment: Option<Command>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub erode: ErodeConfig,
    #[serde(default)]
    pub codec: CodecConfig,
    #[serde(default)]
    pub capacity: CapacityConfig,
    #[serde(default)]
    pub census: CensusConfig,
    #[serde(default)]
    pub mi: MiConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Initial {
    AllPlus,
    AllMinus,
    Random { p: f64 },
    Hex { spins_hex: String },
    /// Centred square droplet; needs a square lattice.
    Droplet { side: usize },
    /// Codeword of `message` (hex, `bits` long); the codec fixes the lattice.
    Codec { codec: CodecSpec, message: String, bits: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub lattice: LatticeDescriptor,
    pub initial: Initial,
    pub dynamics: DynamicsParams,
    /// Continuous-time horizon.
    pub horizon: f64,
    /// Run the discrete chain for this many steps instead.
    pub steps: Option<u64>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            lattice: LatticeDescriptor {
                kind: LatticeKind::SquareGrid,
                side: Some(16),
                rows: None,
                cols: None,
                boundary: Boundary::Free,
            },
            initial: Initial::Random { p: 0.5 },
            dynamics: DynamicsParams::zero_temperature(),
            horizon: 100.0,
            steps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErodeConfig {
    pub ells: Vec<usize>,
    pub hopf_every: u64,
    pub cap: Option<f64>,
    pub convention: RateConvention,
}

impl Default for ErodeConfig {
    fn default() -> Self {
        Self {
            ells: vec![8, 16, 32],
            hopf_every: 1000,
            cap: None,
            convention: RateConvention::PerSiteUnit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodecConfig {
    pub codec: CodecSpec,
    /// Hex messages; when absent every message of `bits` bits is tried
    /// (up to 16 bits), or `random` random ones beyond that.
    pub messages: Option<Vec<String>>,
    /// Message length; defaults to the codec capacity.
    pub bits: Option<usize>,
    pub random: u64,
    /// Discrete steps of the dynamics between encoding and decoding.
    pub steps: u64,
    /// Overrides the codec's own dynamics.
    pub dynamics: Option<DynamicsParams>,
}

impl Default for CodecConfig {
    fn default() -> Self {
        Self {
            codec: CodecSpec::Stripe { k: 8 },
            messages: None,
            bits: None,
            random: 256,
            steps: 1_000_000,
            dynamics: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapacityConfig {
    pub k: usize,
    pub area: usize,
    /// Read-out time; defaults to `t_fraction` times the pilot mean erosion time.
    pub t: Option<f64>,
    pub t_fraction: f64,
    pub pilot_trials: u64,
}

impl Default for CapacityConfig {
    fn default() -> Self {
        Self {
            k: 64,
            area: 16,
            t: None,
            t_fraction: 0.1,
            pilot_trials: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CensusConfig {
    pub ks: Vec<usize>,
}

impl Default for CensusConfig {
    fn default() -> Self {
        Self { ks: vec![2, 3, 4, 5] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MiPrior {
    /// Uniform over all states.
    All,
    /// Uniform over all-plus and all-minus.
    FixedPoints,
    /// Uniform over the stable set.
    Stable,
    /// Uniform over the listed state indices.
    States(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MiConfig {
    pub k: usize,
    pub prior: MiPrior,
    pub t_max: u64,
}

impl Default for MiConfig {
    fn default() -> Self {
        Self {
            k: 3,
            prior: MiPrior::All,
            t_max: 200,
        }
    }
}

/// Settings after merging the config file with command-line flags.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub trials: Option<u64>,
    pub workers: Option<usize>,
    pub out: PathBuf,
}

pub fn resolve(command: Command, common: &CommonArgs) -> Result<Resolved> {
    let config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(kind) = config.experiment {
        if kind != command {
            return Err(Error::Parse(format!(
                "config is for `{}`, not `{}`",
                kind.name(),
                command.name()
            )));
        }
    }
    let seed = common
        .seed
        .or(config.seed)
        .ok_or_else(|| Error::Parse("a seed is required (config `seed` or --seed)".into()))?;
    Ok(Resolved {
        seed,
        trials: common.trials.or(config.trials),
        workers: common.workers.or(config.workers),
        out: common.out.clone().or(config.out.clone()).unwrap_or_else(|| PathBuf::from("out")),
        config,
    })
}

/// Runs one subcommand and returns the summary printed to stdout.
pub fn run(cli: &Cli) -> Result<String> {
    let r = resolve(cli.command, &cli.common)?;
    match cli.command {
        Command::Simulate => cmd_simulate(&r),
        Command::Erode => cmd_erode(&r),
        Command::Codec => cmd_codec(&r),
        Command::Capacity => cmd_capacity(&r),
        Command::Census => cmd_census(&r),
        Command::Mi => cmd_mi(&r),
    }
}

fn write_json<T: Serialize>(path: &Path, header: &RunHeader, body: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, &serde_json::json!({ "header": header, "result": body }))?;
    std::io::Write::write_all(&mut out, b"\n")?;
    Ok(())
}

fn initial_config(cfg: &SimulateConfig, seed: u64) -> Result<Configuration> {
    let lattice = || -> Result<_> { Ok(Arc::new(cfg.lattice.build()?)) };
    match &cfg.initial {
        Initial::AllPlus => Ok(Configuration::all_plus(lattice()?)),
        Initial::AllMinus => Ok(Configuration::all_minus(lattice()?)),
        Initial::Random { p } => Configuration::random(lattice()?, *p, &mut trial_rng(seed, u64::MAX)),
        Initial::Hex { spins_hex } => Configuration::from_hex(lattice()?, spins_hex),
        Initial::Droplet { side } => {
            let l = lattice()?;
            let k = l.side().ok_or_else(|| Error::InvalidArgument("droplet start needs a square grid".into()))?;
            if *side == 0 || *side > k {
                return Err(Error::InfeasibleGeometry(format!("droplet side {side} does not fit side {k}")));
            }
            let lo = (k - side) / 2 + 1;
            let ll = l.clone();
            Ok(Configuration::from_fn(l, |v| {
                let (x, y) = ll.coords(v);
                (lo..lo + side).contains(&x) && (lo..lo + side).contains(&y)
            }))
        }
        Initial::Codec { codec, message, bits } => codec.build()?.encode(&bits_from_hex(message, *bits)?),
    }
}

#[derive(Debug, Serialize)]
struct SimulateSummary {
    events: usize,
    horizon: f64,
    discrete: bool,
    initial_magnetization: f64,
    final_magnetization: f64,
    final_stable: bool,
    final_striped: bool,
}

pub fn cmd_simulate(r: &Resolved) -> Result<String> {
    let cfg = &r.config.simulate;
    let start = initial_config(cfg, r.seed)?;
    let mut rng = master_rng(r.seed);
    let (log, horizon) = match cfg.steps {
        Some(steps) => (run_discrete_logged(start, steps, &cfg.dynamics, &mut rng)?, steps as f64),
        None => (run_continuous_logged(start, cfg.horizon, &cfg.dynamics, &mut rng)?, cfg.horizon),
    };
    let header = RunHeader::new("simulate", r.seed);
    write_jsonl(create(&r.out.join("events.jsonl"))?, &header, &log.events)?;
    write_json(&r.out.join("initial.json"), &header, &log.initial.to_record())?;
    write_json(&r.out.join("final.json"), &header, &log.final_config.to_record())?;
    let summary = SimulateSummary {
        events: log.events.len(),
        horizon,
        discrete: cfg.steps.is_some(),
        initial_magnetization: log.initial.magnetization(),
        final_magnetization: log.final_config.magnetization(),
        final_stable: is_stable(&log.final_config),
        final_striped: is_striped(&log.final_config).is_some(),
    };
    write_json(&r.out.join("summary.json"), &header, &summary)?;
    Ok(format!(
        "simulate: {} flips, magnetization {:.4} -> {:.4}, stable {}\n{}",
        summary.events,
        summary.initial_magnetization,
        summary.final_magnetization,
        summary.final_stable,
        log.final_config.render()
    ))
}

pub fn cmd_erode(r: &Resolved) -> Result<String> {
    let cfg = &r.config.erode;
    if cfg.ells.is_empty() {
        return Err(Error::InvalidArgument("erode needs at least one size".into()));
    }
    let opts = ErosionOptions {
        convention: cfg.convention,
        cap: cfg.cap,
        hopf_every: cfg.hopf_every,
        workers: r.workers,
    };
    let trials = r.trials.unwrap_or(500);
    let (sweep, runs) = if cfg.ells.len() >= 3 {
        erosion_sweep(&cfg.ells, trials, r.seed, &opts)?
    } else {
        let runs = cfg
            .ells
            .iter()
            .enumerate()
            .map(|(i, &ell)| erosion_trials(ell, trials, r.seed.wrapping_add(i as u64), &opts))
            .collect::<Result<Vec<_>>>()?;
        let summaries = runs.iter().map(|run| run.summary.clone()).collect();
        (crate::experiments::ErosionSweep { summaries, exponent: None }, runs)
    };
    let header = RunHeader::new("erode", r.seed);
    #[derive(Serialize)]
    struct Row<'a> {
        ell: usize,
        #[serde(flatten)]
        trial: &'a crate::experiments::ErosionTrial,
    }
    let rows: Vec<Row> = runs
        .iter()
        .flat_map(|run| run.trials.iter().map(move |t| Row { ell: run.summary.ell, trial: t }))
        .collect();
    write_jsonl(create(&r.out.join("erode_trials.jsonl"))?, &header, &rows)?;
    write_csv(create(&r.out.join("erode_summary.csv"))?, &header, &sweep.summaries)?;
    write_json(&r.out.join("erode_summary.json"), &header, &sweep)?;
    let mut text = String::from("ell,trials,timeouts,mean_tau,sd_tau,hopf_snapshots,hopf_violations\n");
    for s in &sweep.summaries {
        text += &format!(
            "{},{},{},{:.4},{:.4},{},{}\n",
            s.ell, s.trials, s.timeouts, s.mean_tau, s.sd_tau, s.hopf_snapshots, s.hopf_violations
        );
    }
    if let Some(fit) = sweep.exponent {
        text += &format!("fitted exponent {:.3} (r^2 {:.4})\n", fit.slope, fit.r_squared);
    }
    Ok(text)
}

#[derive(Debug, Clone, Serialize)]
struct CodecRow {
    message: String,
    bits: usize,
    bit_errors: usize,
    one_to_zero: usize,
    zero_to_one: usize,
    exact: bool,
}

pub fn cmd_codec(r: &Resolved) -> Result<String> {
    let cfg = &r.config.codec;
    let codec = cfg.codec.build()?;
    let len = cfg.bits.unwrap_or(codec.capacity());
    let messages: Vec<Vec<bool>> = match &cfg.messages {
        Some(list) => list.iter().map(|m| bits_from_hex(m, len)).collect::<Result<_>>()?,
        None if len <= 16 => all_messages(len).collect(),
        None => {
            let mut rng = trial_rng(r.seed, u64::MAX);
            (0..cfg.random).map(|_| (0..len).map(|_| rng.gen()).collect()).collect()
        }
    };
    let params = cfg.dynamics.unwrap_or_else(|| codec.dynamics());
    let rows = run_trials(messages.len() as u64, r.seed, r.workers, |i, rng| -> Result<CodecRow> {
        let msg = &messages[i as usize];
        let out = run_discrete(codec.encode(msg)?, cfg.steps, &params, rng)?;
        let read = codec.decode_prefix(&out, msg.len())?;
        let e10 = msg.iter().zip(&read).filter(|(m, r)| **m && !**r).count();
        let e01 = msg.iter().zip(&read).filter(|(m, r)| !**m && **r).count();
        Ok(CodecRow {
            message: bits_to_hex(msg),
            bits: msg.len(),
            bit_errors: e10 + e01,
            one_to_zero: e10,
            zero_to_one: e01,
            exact: e10 + e01 == 0,
        })
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let header = RunHeader::new("codec", r.seed);
    write_csv(create(&r.out.join("codec_results.csv"))?, &header, &rows)?;
    write_json(&r.out.join("codec.json"), &header, &codec.describe())?;
    let errors: usize = rows.iter().map(|row| row.bit_errors).sum();
    let exact = rows.iter().filter(|row| row.exact).count();
    Ok(format!(
        "codec: capacity {} bits, {} messages, {} exact, {} bit errors after {} steps\n",
        codec.capacity(),
        rows.len(),
        exact,
        errors,
        cfg.steps
    ))
}

#[derive(Debug, Serialize)]
struct CapacityRow {
    k: usize,
    area: usize,
    blocks: usize,
    pilot_mean_tau: Option<f64>,
    t: f64,
    trials: u64,
    q0_hat: f64,
    q1_hat: f64,
    q1_hi: f64,
    zero_to_one: u64,
    z_capacity: f64,
    binary_capacity: f64,
    bits: f64,
    bits_lo: f64,
}

pub fn cmd_capacity(r: &Resolved) -> Result<String> {
    let cfg = &r.config.capacity;
    let side = (cfg.area as f64).sqrt().round() as usize;
    let (t, pilot) = match cfg.t {
        Some(t) => (t, None),
        None => {
            let opts = ErosionOptions {
                hopf_every: 0,
                workers: r.workers,
                ..Default::default()
            };
            let pilot = erosion_trials(side, cfg.pilot_trials, r.seed ^ 0x9e37_79b9_7f4a_7c15, &opts)?.summary;
            (cfg.t_fraction * pilot.mean_tau, Some(pilot.mean_tau))
        }
    };
    let trials = r.trials.unwrap_or(10_000);
    let bound = droplet_capacity_lower_bound(cfg.k, cfg.area, t, trials, r.seed, r.workers)?;
    let e = &bound.estimate;
    let row = CapacityRow {
        k: cfg.k,
        area: cfg.area,
        blocks: bound.blocks,
        pilot_mean_tau: pilot,
        t,
        trials,
        q0_hat: e.q0_hat,
        q1_hat: e.q1_hat,
        q1_hi: e.q1_ci.hi,
        zero_to_one: e.zero_to_one,
        z_capacity: bound.z_capacity,
        binary_capacity: binary_channel_capacity(e.q0_hat, e.q1_hat)?,
        bits: bound.bits,
        bits_lo: bound.bits_lo,
    };
    let header = RunHeader::new("capacity", r.seed);
    write_csv(create(&r.out.join("capacity.csv"))?, &header, std::slice::from_ref(&row))?;
    write_json(&r.out.join("capacity.json"), &header, &bound)?;
    Ok(format!(
        "capacity: t {:.4}, q1 {:.5} (<= {:.5}), 0->1 errors {}, bound {:.3} of {} bits\n",
        t, row.q1_hat, row.q1_hi, row.zero_to_one, row.bits, row.blocks
    ))
}

pub fn cmd_census(r: &Resolved) -> Result<String> {
    let rows = r.config.census.ks.iter().map(|&k| census(k)).collect::<Result<Vec<_>>>()?;
    #[derive(Serialize)]
    struct Row {
        k: usize,
        formula_count: String,
        brute_force_count: Option<String>,
        distinct_striped_count: String,
        discrepancy: bool,
    }
    let flat: Vec<Row> = rows
        .iter()
        .map(|c| Row {
            k: c.k,
            formula_count: c.formula_count.to_string(),
            brute_force_count: c.brute_force_count.map(|b| b.to_string()),
            distinct_striped_count: c.distinct_striped_count.to_string(),
            discrepancy: c.discrepancy(),
        })
        .collect();
    let header = RunHeader::new("census", r.seed);
    write_csv(create(&r.out.join("census.csv"))?, &header, &flat)?;
    let mut text = String::from("k,formula,brute_force,distinct_striped,discrepancy\n");
    for row in &flat {
        text += &format!(
            "{},{},{},{},{}\n",
            row.k,
            row.formula_count,
            row.brute_force_count.as_deref().unwrap_or("-"),
            row.distinct_striped_count,
            row.discrepancy
        );
    }
    Ok(text)
}

pub fn cmd_mi(r: &Resolved) -> Result<String> {
    let cfg = &r.config.mi;
    let chain = SmallChain::new(cfg.k, &DynamicsParams::zero_temperature())?;
    let n = cfg.k * cfg.k;
    let prior = match &cfg.prior {
        MiPrior::All => uniform_prior(0..1u64 << n),
        MiPrior::FixedPoints => uniform_prior([0, (1u64 << n) - 1]),
        MiPrior::Stable => uniform_prior(enumerate_stable(cfg.k)?.iter().map(Configuration::index)),
        MiPrior::States(s) => uniform_prior(s.iter().copied()),
    };
    let curve = chain.mi_curve(&prior, cfg.t_max)?;
    let limit = chain.mi_limit(&prior)?;
    #[derive(Serialize)]
    struct Row {
        t: u64,
        mi_bits: f64,
    }
    let rows: Vec<Row> = curve.iter().enumerate().map(|(t, &mi)| Row { t: t as u64, mi_bits: mi }).collect();
    let header = RunHeader::new("mi", r.seed);
    write_csv(create(&r.out.join("mi.csv"))?, &header, &rows)?;
    write_json(
        &r.out.join("mi.json"),
        &header,
        &serde_json::json!({ "k": cfg.k, "support": prior.len(), "limit": limit, "curve": curve }),
    )?;
    Ok(format!(
        "mi: k {}, support {}, I(0) {:.6}, I({}) {:.6}, limit {:.6}\n",
        cfg.k,
        prior.len(),
        curve[0],
        cfg.t_max,
        curve[cfg.t_max as usize],
        limit
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(ExperimentConfig::from_toml("seed = 1\nbogus = 2").is_err());
        assert!(ExperimentConfig::from_toml("seed = 1\n[erode]\nells = [4]\nextra = 1").is_err());
        let c = ExperimentConfig::from_toml(
            "seed = 7\n[mi]\nk = 2\nprior = \"fixed_points\"\n[mi.extra]\n",
        );
        assert!(c.is_err());
    }

    #[test]
    fn config_sections_parse() {
        let text = r#"
            experiment = "simulate"
            seed = 3
            workers = 2
            [simulate]
            lattice = { kind = "square_grid", side = 6, boundary = "minus_frame" }
            initial = { type = "droplet", side = 2 }
            dynamics = { beta = 1.5, freeze_minus = true }
            horizon = 5.0
            [codec]
            codec = { scheme = "honeycomb", rows = 6, cols = 5 }
            messages = ["07"]
            bits = 3
            [mi]
            prior = { states = [0, 1, 511] }
        "#;
        let c = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(c.experiment, Some(Command::Simulate));
        assert_eq!(c.simulate.initial, Initial::Droplet { side: 2 });
        assert_eq!(c.simulate.dynamics.beta, 1.5);
        assert_eq!(c.mi.prior, MiPrior::States(vec![0, 1, 511]));
        assert_eq!(c.erode, ErodeConfig::default());
    }

    #[test]
    fn seed_is_mandatory_and_kind_checked() {
        let common = CommonArgs {
            config: None,
            seed: None,
            trials: None,
            workers: None,
            out: None,
        };
        assert!(matches!(resolve(Command::Census, &common), Err(Error::Parse(_))));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "experiment = \"mi\"\nseed = 1\n").unwrap();
        let common = CommonArgs {
            config: Some(path),
            ..common
        };
        assert!(resolve(Command::Mi, &common).is_ok());
        assert!(matches!(resolve(Command::Erode, &common), Err(Error::Parse(_))));
    }

    #[test]
    fn exit_codes_are_distinct() {
        assert_eq!(Error::Parse(String::new()).exit_code(), 2);
        assert_eq!(Error::InfeasibleGeometry(String::new()).exit_code(), 3);
        assert_eq!(Error::Defect(String::new()).exit_code(), 4);
        assert_eq!(Error::Io(std::io::Error::other("x")).exit_code(), 5);
    }

    #[test]
    fn droplet_initial_is_centred() {
        let cfg = SimulateConfig {
            initial: Initial::Droplet { side: 2 },
            lattice: LatticeDescriptor {
                kind: LatticeKind::SquareGrid,
                side: Some(4),
                rows: None,
                cols: None,
                boundary: Boundary::Free,
            },
            ..Default::default()
        };
        let c = initial_config(&cfg, 0).unwrap();
        assert_eq!(c, crate::experiments::droplet_start(2).unwrap());
        let cfg = SimulateConfig {
            initial: Initial::Droplet { side: 5 },
            ..cfg
        };
        assert!(matches!(initial_config(&cfg, 0), Err(Error::InfeasibleGeometry(_))));
    }
}
