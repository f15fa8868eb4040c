//! Command-line front end: `check`, `phase-diagram`, `sample`, `compare`, `fidelity`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::channels::{self, UniformLossLon};
use crate::criteria::{self, ClassicalityReport, ExperimentSpec};
use crate::detectors::{self, DetectorSpec, OutcomeTable};
use crate::error::Error;
use crate::fidelity;
use crate::interferometer;
use crate::linalg::CMatrix;
use crate::sampler;
use crate::state::GaussianState;

pub const PHASE_DIAGRAM_VERSION: u32 = 1;

/// Criteria columns of the phase-diagram CSV, in order.
pub const PHASE_DIAGRAM_CRITERIA: [&str; 7] = [
    "general_condition",
    "uniform_recast",
    "gbs_condition",
    "gbs_threshold_temperature",
    "universal_threshold",
    "approx_condition",
    "quesada_zero_t_condition",
];

const PARAM_KEYS: [&str; 10] = [
    "r",
    "eta_l",
    "n_bar",
    "temperature",
    "omega",
    "eta_d",
    "p_d",
    "epsilon",
    "m",
    "seed",
];

#[derive(Debug, Parser)]
#[command(name = "thermal-gbs", version, about = "Finite-temperature Gaussian boson sampling: simulability criteria and samplers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every applicable classicality criterion for one experiment.
    Check(Common),
    /// Criterion margins over a 1D or 2D parameter sweep.
    PhaseDiagram {
        #[command(flatten)]
        common: Common,
        /// Sweep axis `key:min:max:steps`; give once or twice.
        #[arg(long, value_name = "KEY:MIN:MAX:STEPS", required = true)]
        sweep: Vec<String>,
    },
    /// Draw click patterns from the classical sampler (or the exact table with --exact).
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Sample the exact oracle distribution instead.
        #[arg(long)]
        exact: bool,
        /// Newline-delimited bitstrings instead of counts.
        #[arg(long)]
        raw: bool,
    },
    /// Monte-Carlo TVD between the classical sampler and the exact oracle.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Maximal fidelity to a classical state and the implied TVD bound.
    Fidelity(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Experiment config (JSON).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override a config field.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output file (stdout when absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Experiment parameters. Temperature is given either as `n_bar` or as
/// `temperature` (kelvin) with `omega` (rad/s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_eta_l")]
    pub eta_l: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_bar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default = "default_eta_d")]
    pub eta_d: f64,
    #[serde(default)]
    pub p_d: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_m")]
    pub m: usize,
    /// Interferometer as row-major `[re, im]` pairs; Haar-random from `seed` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub seed: u64,
}

fn default_r() -> f64 {
    1.0
}
fn default_eta_l() -> f64 {
    0.5
}
fn default_eta_d() -> f64 {
    1.0
}
fn default_epsilon() -> f64 {
    0.1
}
fn default_m() -> usize {
    4
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("config: {e}")))
    }

    /// Applies `key=value` or a sweep value to a named field.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), CliError> {
        match key {
            "r" => self.r = value,
            "eta_l" => self.eta_l = value,
            "n_bar" => {
                self.n_bar = Some(value);
                self.temperature = None;
            }
            "temperature" => {
                self.temperature = Some(value);
                self.n_bar = None;
            }
            "omega" => self.omega = Some(value),
            "eta_d" => self.eta_d = value,
            "p_d" => self.p_d = value,
            "epsilon" => self.epsilon = value,
            "m" | "seed" => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(CliError::config(format!("{key} must be a non-negative integer, got {value}")));
                }
                if key == "m" {
                    self.m = value as usize;
                } else {
                    self.seed = value as u64;
                }
            }
            other => {
                return Err(CliError::config(format!(
                    "unknown parameter '{other}' (expected one of {})",
                    PARAM_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn apply_override(&mut self, spec: &str) -> Result<(), CliError> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("--set expects key=value, got '{spec}'")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("--set {key}: '{value}' is not a number")))?;
        self.set(key.trim(), value)
    }

    pub fn n_bar(&self) -> Result<f64, CliError> {
        match (self.n_bar, self.temperature) {
            (Some(_), Some(_)) => Err(CliError::config("give either n_bar or temperature, not both")),
            (Some(n), None) => Ok(n),
            (None, Some(t)) => {
                let omega = self
                    .omega
                    .ok_or_else(|| CliError::config("temperature requires omega"))?;
                Ok(criteria::nbar_from_temperature(t, omega)?)
            }
            (None, None) => Ok(0.0),
        }
    }

    pub fn detector(&self) -> Result<DetectorSpec, CliError> {
        Ok(DetectorSpec::new(self.eta_d, self.p_d)?)
    }

    pub fn experiment(&self) -> Result<ExperimentSpec, CliError> {
        let spec = ExperimentSpec {
            r: self.r,
            eta_l: self.eta_l,
            n_bar: self.n_bar()?,
            detector: self.detector()?,
            modes: self.m,
            epsilon: self.epsilon,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn interferometer(&self) -> Result<CMatrix, CliError> {
        match &self.w {
            Some(pairs) => {
                let w = interferometer::from_pairs(pairs)?;
                if w.nrows() != self.m {
                    return Err(CliError::config(format!(
                        "w is {0}x{0} but m = {1}",
                        w.nrows(),
                        self.m
                    )));
                }
                Ok(w)
            }
            None => Ok(interferometer::haar_unitary(
                self.m,
                &mut ChaCha8Rng::seed_from_u64(self.seed),
            )),
        }
    }

    pub fn channel(&self) -> Result<UniformLossLon, CliError> {
        Ok(UniformLossLon::from_n_bar(self.interferometer()?, self.eta_l, self.n_bar()?)?)
    }

    /// Squeezed vacuum with parameter `r` on every mode.
    pub fn input_state(&self) -> Result<GaussianState, CliError> {
        Ok(GaussianState::squeezed_vacuum(self.r, self.m)?)
    }
}

/// One sweep axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub key: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 4 {
            return Err(CliError::config(format!("--sweep expects key:min:max:steps, got '{spec}'")));
        }
        let key = parts[0].trim().to_string();
        if !PARAM_KEYS.contains(&key.as_str()) || key == "seed" {
            return Err(CliError::config(format!("invalid sweep axis '{key}'")));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("--sweep {key}: '{s}' is not a number")))
        };
        let steps: usize = parts[3]
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("--sweep {key}: steps '{}' is not an integer", parts[3])))?;
        if steps == 0 {
            return Err(CliError::config("sweep steps must be >= 1"));
        }
        let (min, max) = (num(parts[1])?, num(parts[2])?);
        Ok(Self { key, min, max, steps })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        (0..self.steps)
            .map(|i| {
                let v = self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64;
                if self.key == "m" {
                    v.round()
                } else {
                    v
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub const CONFIG: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
    pub const ORACLE_SCALE: i32 = 4;

    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: Self::CONFIG,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PlanInfeasible { .. } => Self::INFEASIBLE,
            Error::OracleScale { .. } => Self::ORACLE_SCALE,
            Error::NumericalConsistency(_) | Error::Truncation { .. } => 1,
            _ => Self::CONFIG,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    for s in &common.set {
        cfg.apply_override(s)?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn emit(common: &Common, bytes: &[u8]) -> Result<(), CliError> {
    match &common.out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

/// All criteria for one configuration, in [`PHASE_DIAGRAM_CRITERIA`] order.
/// The zero-temperature comparison bound is included when `include_zero_t` is set.
pub fn evaluate(cfg: &RunConfig, include_zero_t: bool) -> Result<Vec<ClassicalityReport>, CliError> {
    let spec = cfg.experiment()?;
    let w = cfg.interferometer()?;
    let ch = spec.channel(&w)?;
    let (s_bar, t_bar) = criteria::gbs_orderings(spec.r, &spec.detector, spec.modes)?;
    let mut out = vec![
        criteria::general_condition(&ch, &s_bar, &t_bar)?,
        criteria::uniform_recast(spec.eta_l, spec.k(), &s_bar, &t_bar, &w)?,
        criteria::gbs_condition(spec.r, spec.eta_l, spec.n_bar, &spec.detector),
        criteria::threshold_temperature_gbs(spec.r, spec.eta_l)?.report("gbs_threshold_temperature", spec.n_bar),
        criteria::universal_threshold(spec.eta_l)?.report("universal_threshold", spec.n_bar),
        criteria::approx_condition(&spec)?,
    ];
    if include_zero_t {
        out.push(criteria::quesada_zero_t_condition(&spec)?);
    }
    Ok(out)
}

/// Reports for `check`; the zero-temperature bound only applies at `n̄ = 0`.
pub fn cmd_check(cfg: &RunConfig) -> Result<Vec<ClassicalityReport>, CliError> {
    evaluate(cfg, cfg.n_bar()? == 0.0)
}

fn reports_csv(reports: &[ClassicalityReport]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["criterion", "verdict", "margin"]).map_err(csv_err)?;
    for r in reports {
        w.write_record([r.criterion.as_str(), r.verdict.as_str(), &r.margin.to_string()])
            .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::from(e.into_error()))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError {
        code: 1,
        message: e.to_string(),
    }
}

/// One evaluated grid point of a phase diagram.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseRow {
    pub params: BTreeMap<String, f64>,
    pub reports: Vec<ClassicalityReport>,
}

/// Column header of the phase-diagram CSV.
pub fn phase_diagram_header() -> Vec<String> {
    let mut h: Vec<String> = ["r", "eta_l", "n_bar", "eta_d", "p_d", "epsilon", "m"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for c in PHASE_DIAGRAM_CRITERIA {
        h.push(format!("{c}_margin"));
        h.push(format!("{c}_verdict"));
    }
    h.extend(["a_minus", "n_bar_star", "universal_n_bar_star", "min_epsilon"].map(String::from));
    h
}

pub fn cmd_phase_diagram(cfg: &RunConfig, sweeps: &[Sweep]) -> Result<Vec<PhaseRow>, CliError> {
    if sweeps.is_empty() || sweeps.len() > 2 {
        return Err(CliError::config("phase-diagram takes one or two --sweep axes"));
    }
    if sweeps.len() == 2 && sweeps[0].key == sweeps[1].key {
        return Err(CliError::config("sweep axes must differ"));
    }
    let mut points: Vec<Vec<(String, f64)>> = vec![vec![]];
    for sw in sweeps {
        points = points
            .into_iter()
            .flat_map(|p| {
                sw.values().into_iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((sw.key.clone(), v));
                    q
                })
            })
            .collect();
    }
    points
        .into_par_iter()
        .map(|assign| {
            let mut c = cfg.clone();
            for (k, v) in &assign {
                c.set(k, *v)?;
            }
            let spec = c.experiment()?;
            let params = BTreeMap::from([
                ("r".to_string(), spec.r),
                ("eta_l".to_string(), spec.eta_l),
                ("n_bar".to_string(), spec.n_bar),
                ("eta_d".to_string(), spec.detector.eta_d()),
                ("p_d".to_string(), spec.detector.p_d()),
                ("epsilon".to_string(), spec.epsilon),
                ("m".to_string(), spec.modes as f64),
            ]);
            Ok(PhaseRow {
                params,
                reports: evaluate(&c, true)?,
            })
        })
        .collect()
}

fn phase_csv(rows: &[PhaseRow]) -> Result<Vec<u8>, CliError> {
    let mut buf = format!("# thermal-gbs phase-diagram v{PHASE_DIAGRAM_VERSION}\n").into_bytes();
    let mut w = csv::Writer::from_writer(&mut buf);
    w.write_record(phase_diagram_header()).map_err(csv_err)?;
    for row in rows {
        let mut rec: Vec<String> = ["r", "eta_l", "n_bar", "eta_d", "p_d", "epsilon", "m"]
            .iter()
            .map(|k| row.params[*k].to_string())
            .collect();
        for r in &row.reports {
            rec.push(r.margin.to_string());
            rec.push(r.verdict.as_str().to_string());
        }
        let gbs = &row.reports[2];
        let gbs_th = &row.reports[3];
        let uni = &row.reports[4];
        let approx = &row.reports[5];
        for v in [
            gbs.detail("a_minus"),
            gbs_th.detail("n_bar_star"),
            uni.detail("n_bar_star"),
            approx.detail("min_epsilon"),
        ] {
            rec.push(v.map(|x| x.to_string()).unwrap_or_default());
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    drop(w);
    Ok(buf)
}

/// Samples from the classical sampler (or the exact table).
pub fn cmd_sample(cfg: &RunConfig, n_samples: usize, exact: bool) -> Result<Vec<usize>, CliError> {
    let d = cfg.detector()?;
    let ch = cfg.channel()?;
    let input = cfg.input_state()?;
    if exact {
        let out = channels::apply_channel(&ch.as_lon(), &input)?;
        Ok(sampler::exact_sample(&out, &d, n_samples, cfg.seed)?)
    } else {
        let plan = sampler::build_plan(&input, &ch.as_lon(), &d, cfg.seed)?;
        Ok(sampler::classical_sample(&plan, n_samples))
    }
}

pub fn cmd_compare(cfg: &RunConfig, n_samples: usize) -> Result<sampler::CompareReport, CliError> {
    if cfg.m > detectors::MAX_ORACLE_MODES {
        return Err(Error::OracleScale {
            modes: cfg.m,
            max: detectors::MAX_ORACLE_MODES,
        }
        .into());
    }
    if n_samples == 0 {
        return Err(CliError::config("--samples must be positive"));
    }
    let d = cfg.detector()?;
    let ch = cfg.channel()?.as_lon();
    let input = cfg.input_state()?;
    let plan = sampler::build_plan(&input, &ch, &d, cfg.seed)?;
    let exact = detectors::exact_outcome_probabilities(&channels::apply_channel(&ch, &input)?, &d)?;
    Ok(sampler::compare(&plan, &exact, n_samples)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    pub f_max: f64,
    pub t: f64,
    pub b_plus: f64,
    pub b_minus: f64,
    pub tvd_bound: f64,
    pub a_plus: f64,
    pub a_minus: f64,
    pub q_d: f64,
    pub m: usize,
}

pub fn cmd_fidelity(cfg: &RunConfig) -> Result<FidelityReport, CliError> {
    let spec = cfg.experiment()?;
    let tau = fidelity::noisy_squeezed_input(spec.r, spec.eta_l, spec.k())?;
    let q_d = spec.detector.q_d();
    let res = fidelity::f_max(&tau, q_d)?;
    let rec = res.optimizer.clone().expect("f_max records its optimum");
    Ok(FidelityReport {
        f_max: res.value,
        t: rec.t,
        b_plus: rec.cov[0],
        b_minus: rec.cov[3],
        tvd_bound: fidelity::tvd_bound(res.value, spec.modes)?,
        a_plus: spec.a_plus(),
        a_minus: spec.a_minus(),
        q_d,
        m: spec.modes,
    })
}

fn counts_output(modes: usize, samples: &[usize], format: Format, sampler_name: &str) -> Result<Vec<u8>, CliError> {
    let counts = sampler::pattern_counts(modes, samples);
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["pattern", "count"]).map_err(csv_err)?;
            for (p, c) in counts.iter().enumerate() {
                w.write_record([detectors::pattern_string(p, modes), c.to_string()])
                    .map_err(csv_err)?;
            }
            w.into_inner().map_err(|e| CliError::from(e.into_error()))
        }
        Format::Json => {
            let map: BTreeMap<String, u64> = counts
                .iter()
                .enumerate()
                .map(|(p, c)| (detectors::pattern_string(p, modes), *c))
                .collect();
            Ok(to_json(&json!({
                "sampler": sampler_name,
                "modes": modes,
                "n_samples": samples.len(),
                "counts": map,
            })))
        }
    }
}

/// Runs a parsed command, writing to `--out` or stdout.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Check(common) => {
            let cfg = load_config(&common)?;
            let reports = cmd_check(&cfg)?;
            let bytes = match common.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&reports),
                Format::Csv => reports_csv(&reports)?,
            };
            emit(&common, &bytes)
        }
        Command::PhaseDiagram { common, sweep } => {
            let cfg = load_config(&common)?;
            let sweeps = sweep.iter().map(|s| Sweep::parse(s)).collect::<Result<Vec<_>, _>>()?;
            let rows = cmd_phase_diagram(&cfg, &sweeps)?;
            let bytes = match common.format.unwrap_or(Format::Csv) {
                Format::Csv => phase_csv(&rows)?,
                Format::Json => to_json(&json!({ "version": PHASE_DIAGRAM_VERSION, "rows": rows })),
            };
            emit(&common, &bytes)
        }
        Command::Sample { common, samples, exact, raw } => {
            let cfg = load_config(&common)?;
            if exact && cfg.m > detectors::MAX_ORACLE_MODES {
                return Err(Error::OracleScale {
                    modes: cfg.m,
                    max: detectors::MAX_ORACLE_MODES,
                }
                .into());
            }
            let draws = cmd_sample(&cfg, samples, exact)?;
            let bytes = if raw {
                let mut s = String::with_capacity(draws.len() * (cfg.m + 1));
                for p in &draws {
                    s.push_str(&detectors::pattern_string(*p, cfg.m));
                    s.push('\n');
                }
                s.into_bytes()
            } else {
                counts_output(
                    cfg.m,
                    &draws,
                    common.format.unwrap_or(Format::Csv),
                    if exact { "exact" } else { "classical" },
                )?
            };
            emit(&common, &bytes)
        }
        Command::Compare { common, samples } => {
            let cfg = load_config(&common)?;
            let report = cmd_compare(&cfg, samples)?;
            let bytes = match common.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&report),
                Format::Csv => format!(
                    "tvd,n_samples,stat_err\n{},{},{}\n",
                    report.tvd, report.n_samples, report.stat_err
                )
                .into_bytes(),
            };
            emit(&common, &bytes)
        }
        Command::Fidelity(common) => {
            let cfg = load_config(&common)?;
            let report = cmd_fidelity(&cfg)?;
            let bytes = match common.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&report),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.serialize(&report).map_err(csv_err)?;
                    w.into_inner().map_err(|e| CliError::from(e.into_error()))?
                }
            };
            emit(&common, &bytes)
        }
    }
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { CliError::CONFIG } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

/// Exact table of the configured experiment, for examples and tests.
pub fn exact_table(cfg: &RunConfig) -> Result<OutcomeTable, CliError> {
    let ch = cfg.channel()?.as_lon();
    let out = channels::apply_channel(&ch, &cfg.input_state()?)?;
    Ok(detectors::exact_outcome_probabilities(&out, &cfg.detector()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_overrides() {
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.m, 4);
        assert_eq!(cfg.n_bar().unwrap(), 0.0);
        cfg.apply_override("n_bar=0.7").unwrap();
        assert_eq!(cfg.n_bar().unwrap(), 0.7);
        cfg.apply_override("temperature=1.0").unwrap();
        assert!(cfg.n_bar().is_err());
        cfg.apply_override("omega=1e10").unwrap();
        assert!(cfg.n_bar().unwrap() > 0.0);
        assert_eq!(cfg.apply_override("bogus=1").unwrap_err().code, 2);
        assert_eq!(cfg.apply_override("m=2.5").unwrap_err().code, 2);
    }

    #[test]
    fn config_rejects_unknown_fields() {
        let err = RunConfig::from_json("{\n  \"r\": 1.0,\n  \"eta\": 0.5\n}").unwrap_err();
        assert_eq!(err.code, 2);
        assert!(err.message.contains("eta"));
        assert!(err.message.contains("line 3"));
    }

    #[test]
    fn sweep_parsing() {
        let s = Sweep::parse("n_bar:0:1:5").unwrap();
        assert_eq!(s.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(Sweep::parse("r:0.3:9:1").unwrap().values(), vec![0.3]);
        assert!(Sweep::parse("n_bar:0:1:0").is_err());
        assert!(Sweep::parse("foo:0:1:3").is_err());
        assert!(Sweep::parse("r:0:1").is_err());
    }

    #[test]
    fn ideal_lossless_zero_t_is_not_certified() {
        let mut cfg = RunConfig::default();
        cfg.eta_l = 1.0;
        let reports = cmd_check(&cfg).unwrap();
        assert_eq!(reports.len(), 7);
        assert!(reports.iter().all(|r| !r.is_simulable()), "{reports:#?}");
    }

    #[test]
    fn hot_environment_is_simulable() {
        let mut cfg = RunConfig::default();
        cfg.n_bar = Some(1.0 + 1e-3);
        let reports = cmd_check(&cfg).unwrap();
        assert_eq!(reports.len(), 6);
        assert!(reports.iter().all(|r| r.is_simulable()), "{reports:#?}");
    }

    #[test]
    fn no_squeezing_is_simulable_at_any_temperature() {
        for n in [0.0, 0.01, 0.3, 2.0] {
            let mut cfg = RunConfig::default();
            cfg.r = 0.0;
            cfg.n_bar = Some(n);
            for rep in cmd_check(&cfg).unwrap() {
                if rep.criterion != "universal_threshold" {
                    assert!(rep.is_simulable(), "{rep:?} at n_bar = {n}");
                }
            }
        }
    }

    #[test]
    fn gbs_margin_changes_sign_at_threshold() {
        let mut cfg = RunConfig::default();
        cfg.m = 2;
        let rows = cmd_phase_diagram(&cfg, &[Sweep::parse("n_bar:0:1:101").unwrap()]).unwrap();
        let crossing = rows
            .windows(2)
            .find(|w| w[0].reports[2].margin < 0.0 && w[1].reports[2].margin >= 0.0)
            .unwrap();
        assert!(crossing[0].params["n_bar"] < 0.432_332 && crossing[1].params["n_bar"] > 0.432_332);
    }

    #[test]
    fn single_point_sweep_matches_check() {
        let mut cfg = RunConfig::default();
        cfg.n_bar = Some(0.2);
        let rows = cmd_phase_diagram(&cfg, &[Sweep::parse("n_bar:0.2:0.9:1").unwrap()]).unwrap();
        let check = cmd_check(&cfg).unwrap();
        assert_eq!(&rows[0].reports[..check.len()], &check[..]);
    }
}
