//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric or solver error,
//! 4 I/O error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{ConfigError, Format, PolicyKind, RunConfig};
use crate::experiments::{
    amplitude_sweep, beta_sweep, crossover_find, gamma_sweep, AmplitudeMode, AmplitudeSweep,
    DisplacementPolicy, Engine, MonteCarlo, Receiver, SweepResult, TransmittancePolicy,
};
use crate::output::{write_json, write_pulse_log_csv, write_sweep_csv, Document, Provenance};
use crate::receivers::{displacement_error, homodyne_error_with, DiscriminationProblem, DisplacementSetup};
use crate::sim::{generate_pulse_log, summarize_log, ErrorEstimate};
use crate::solver::{optimal_beta, optimal_transmittance, optimal_beta_residual};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("numeric error: {context}: {source}")]
    Numeric {
        context: &'static str,
        source: crate::Error,
    },
    #[error("I/O error: {path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric { .. } => EXIT_NUMERIC,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

fn numeric(context: &'static str) -> impl FnOnce(crate::Error) -> CliError {
    move |source| CliError::Numeric { context, source }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "coherent-rx",
    version,
    about = "Error rates of binary coherent-state receivers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Error probability of every receiver across a grid of |α|²
    Compare(Overrides),
    /// Displacement-receiver error versus |β|² at fixed |α|²
    SweepBeta(Overrides),
    /// Minimal displacement-receiver error versus auxiliary power |γ|²
    SweepGamma(Overrides),
    /// Optimal displacement (and transmittance, for a fixed |γ|²)
    Optimize(Overrides),
    /// Simulate a pulse sequence observed by both receivers
    Simulate(Overrides),
    /// Amplitude at which two ideal receivers perform equally
    Crossover {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, value_enum)]
        receiver_a: Option<ReceiverArg>,
        #[arg(long, value_enum)]
        receiver_b: Option<ReceiverArg>,
        /// Lower end of the |α|² bracket
        #[arg(long)]
        lo: Option<f64>,
        /// Upper end of the |α|² bracket
        #[arg(long)]
        hi: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum ReceiverArg {
    Helstrom,
    Kennedy,
    Homodyne,
    OptDisplacement,
}

impl From<ReceiverArg> for Receiver {
    fn from(r: ReceiverArg) -> Self {
        match r {
            ReceiverArg::Helstrom => Receiver::Helstrom,
            ReceiverArg::Kennedy => Receiver::Kennedy,
            ReceiverArg::Homodyne => Receiver::Homodyne,
            ReceiverArg::OptDisplacement => Receiver::OptDisplacement,
        }
    }
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum EngineArg {
    Analytic,
    Montecarlo,
    Both,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum ModeArg {
    Ideal,
    Corrected,
}

/// Flags that override the configuration file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Signal mean photon number |α|²
    #[arg(long)]
    pub alpha2: Option<f64>,
    /// On/off detector quantum efficiency
    #[arg(long)]
    pub eta: Option<f64>,
    /// Dark counts per gate
    #[arg(long)]
    pub nu: Option<f64>,
    /// Displacement interference visibility
    #[arg(long)]
    pub xi: Option<f64>,
    /// Auxiliary-oscillator power |γ|² (selects the fixed-γ policy)
    #[arg(long)]
    pub gamma2: Option<f64>,
    /// Beam-splitter transmittance
    #[arg(long)]
    pub transmittance: Option<f64>,
    #[arg(long, value_enum)]
    pub policy: Option<PolicyKind>,
    /// Homodyne detector efficiency
    #[arg(long)]
    pub eta_hd: Option<f64>,
    /// Homodyne excess noise in shot-noise units
    #[arg(long)]
    pub excess_noise: Option<f64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for Monte Carlo runs (results do not depend on it)
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum)]
    pub engine: Option<EngineArg>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Output file; CSV outputs get a JSON sidecar with provenance
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Overrides {
    /// Loads the configuration file (if any) and applies the flags on top.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.alpha2 {
            cfg.alpha2 = v;
        }
        if let Some(v) = self.eta {
            cfg.detector.eta = v;
        }
        if let Some(v) = self.nu {
            cfg.detector.nu = v;
        }
        if let Some(v) = self.xi {
            cfg.detector.xi = v;
        }
        if let Some(v) = self.transmittance {
            cfg.displacement.transmittance = v;
        }
        if let Some(v) = self.gamma2 {
            cfg.displacement.gamma2 = v;
            cfg.displacement.policy = PolicyKind::FixedGamma;
        }
        if let Some(v) = self.policy {
            cfg.displacement.policy = v;
        }
        if let Some(v) = self.eta_hd {
            cfg.homodyne.efficiency = v;
        }
        if let Some(v) = self.excess_noise {
            cfg.homodyne.excess_noise = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = Some(v);
        }
        if let Some(v) = self.workers {
            cfg.workers = Some(v);
        }
        if let Some(v) = self.engine {
            cfg.engine = match v {
                EngineArg::Analytic => Engine::Analytic,
                EngineArg::Montecarlo => Engine::Montecarlo,
                EngineArg::Both => Engine::Both,
            };
        }
        if let Some(v) = self.mode {
            cfg.mode = match v {
                ModeArg::Ideal => AmplitudeMode::Ideal,
                ModeArg::Corrected => AmplitudeMode::Corrected,
            };
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `args` and runs the command. Primary output that is not written
/// to a file goes to `stdout`; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_CONFIG;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(warnings) => {
            for w in warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command, returning any non-fatal warnings.
pub fn execute(command: &Command, stdout: &mut dyn Write) -> Result<Vec<String>, CliError> {
    match command {
        Command::Compare(o) => cmd_compare(&o.resolve()?, stdout),
        Command::SweepBeta(o) => cmd_sweep_beta(&o.resolve()?, stdout),
        Command::SweepGamma(o) => cmd_sweep_gamma(&o.resolve()?, stdout),
        Command::Optimize(o) => cmd_optimize(&o.resolve()?, stdout).map(|_| Vec::new()),
        Command::Simulate(o) => cmd_simulate(&o.resolve()?, stdout).map(|_| Vec::new()),
        Command::Crossover {
            overrides,
            receiver_a,
            receiver_b,
            lo,
            hi,
        } => {
            let mut cfg = overrides.resolve()?;
            if let Some(r) = receiver_a {
                cfg.crossover.a = (*r).into();
            }
            if let Some(r) = receiver_b {
                cfg.crossover.b = (*r).into();
            }
            if let Some(v) = lo {
                cfg.crossover.lo = *v;
            }
            if let Some(v) = hi {
                cfg.crossover.hi = *v;
            }
            cmd_crossover(&cfg, stdout).map(|_| Vec::new())
        }
    }
}

fn monte_carlo(cfg: &RunConfig) -> Result<Option<MonteCarlo>, CliError> {
    if !cfg.engine.montecarlo() {
        return Ok(None);
    }
    Ok(Some(MonteCarlo {
        trials: cfg.trials,
        seed: cfg.require_seed()?,
        sim: cfg.sim_options(),
    }))
}

fn policy(cfg: &RunConfig) -> Result<DisplacementPolicy, CliError> {
    Ok(cfg.displacement.policy()?)
}

fn problem(cfg: &RunConfig) -> Result<DiscriminationProblem, CliError> {
    DiscriminationProblem::from_mean_photons(cfg.alpha2)
        .map_err(|e| ConfigError::new("alpha2", e.to_string()).into())
}

/// Path of the JSON document that accompanies a CSV output.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let candidate = out.with_extension("json");
    if candidate == out {
        let mut name = out.as_os_str().to_owned();
        name.push(".provenance.json");
        PathBuf::from(name)
    } else {
        candidate
    }
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(io_err(path))
}

fn emit_json<T: Serialize>(
    command: &str,
    cfg: &RunConfig,
    result: &T,
    w: impl Write,
    path: &Path,
) -> Result<(), CliError> {
    let doc = Document {
        provenance: Provenance::new(command, cfg),
        result,
    };
    write_json(&doc, w).map_err(io_err(path))
}

fn emit_sweep(command: &str, cfg: &RunConfig, result: &SweepResult, stdout: &mut dyn Write) -> Result<Vec<String>, CliError> {
    let stdout_path = Path::new("<stdout>");
    match (&cfg.out, cfg.format) {
        (None, Format::Csv) => write_sweep_csv(result, stdout).map_err(io_err(stdout_path))?,
        (None, Format::Json) => emit_json(command, cfg, result, stdout, stdout_path)?,
        (Some(path), Format::Csv) => {
            write_sweep_csv(result, create(path)?).map_err(io_err(path))?;
            let sidecar = sidecar_path(path);
            emit_json(command, cfg, result, create(&sidecar)?, &sidecar)?;
        }
        (Some(path), Format::Json) => emit_json(command, cfg, result, create(path)?, path)?,
    }
    Ok(result.warnings.clone())
}

pub fn cmd_compare(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Vec<String>, CliError> {
    let spec = AmplitudeSweep {
        receivers: cfg.receivers.clone(),
        engine: cfg.engine,
        mode: cfg.mode,
        policy: policy(cfg)?,
        monte_carlo: monte_carlo(cfg)?,
    };
    let result = amplitude_sweep(&cfg.alpha2_grid.values(), &cfg.detector_model(), &cfg.homodyne_model(), &spec)
        .map_err(numeric("amplitude sweep"))?;
    emit_sweep("compare", cfg, &result, stdout)
}

pub fn cmd_sweep_beta(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Vec<String>, CliError> {
    let t_policy = match policy(cfg)? {
        DisplacementPolicy::FixedGamma { gamma } => TransmittancePolicy::FixedGamma { gamma },
        DisplacementPolicy::Optimize { transmittance }
        | DisplacementPolicy::FixedBeta { transmittance, .. } => {
            TransmittancePolicy::Fixed { transmittance }
        }
    };
    let mc = monte_carlo(cfg)?;
    let result = beta_sweep(&problem(cfg)?, &cfg.detector_model(), t_policy, &cfg.beta2_values(), mc.as_ref())
        .map_err(numeric("displacement sweep"))?;
    emit_sweep("sweep-beta", cfg, &result, stdout)
}

pub fn cmd_sweep_gamma(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Vec<String>, CliError> {
    let result = gamma_sweep(&problem(cfg)?, &cfg.detector_model(), &cfg.gamma2_grid.values())
        .map_err(numeric("auxiliary-power sweep"))?;
    emit_sweep("sweep-gamma", cfg, &result, stdout)
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedTransmittanceOptimum {
    pub transmittance: f64,
    pub beta: f64,
    pub beta2: f64,
    pub residual: f64,
    pub iterations: usize,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedGammaOptimum {
    pub gamma2: f64,
    pub transmittance: f64,
    pub beta: f64,
    pub beta2: f64,
    /// Residual of the closed-form stationarity condition in `T`.
    pub residual: f64,
    /// Residual of the optimal-displacement condition at the optimum.
    pub beta_condition_residual: f64,
    pub iterations: usize,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeReport {
    pub alpha2: f64,
    pub fixed_transmittance: FixedTransmittanceOptimum,
    pub fixed_gamma: Option<FixedGammaOptimum>,
}

pub fn optimize_report(cfg: &RunConfig) -> Result<OptimizeReport, CliError> {
    let problem = problem(cfg)?;
    let det = &cfg.detector_model();
    let t = cfg.displacement.transmittance;
    let root = optimal_beta(&problem, det, t).map_err(numeric("optimal displacement"))?;
    let setup = DisplacementSetup::new(t, root.root).map_err(numeric("optimal displacement"))?;
    let error = displacement_error(&problem, det, &setup)
        .map_err(numeric("optimal displacement"))?
        .value();
    let fixed_transmittance = FixedTransmittanceOptimum {
        transmittance: t,
        beta: root.root,
        beta2: root.root * root.root,
        residual: root.residual,
        iterations: root.iterations,
        error,
    };
    let fixed_gamma = match cfg.displacement.policy {
        PolicyKind::FixedGamma => {
            let gamma = cfg.displacement.gamma2.sqrt();
            let ctx = "optimal transmittance";
            let root = optimal_transmittance(&problem, det, gamma).map_err(numeric(ctx))?;
            let setup = DisplacementSetup::from_gamma(root.root, gamma).map_err(numeric(ctx))?;
            Some(FixedGammaOptimum {
                gamma2: cfg.displacement.gamma2,
                transmittance: root.root,
                beta: setup.beta(),
                beta2: setup.beta().powi(2),
                residual: root.residual,
                beta_condition_residual: optimal_beta_residual(&problem, det, root.root, setup.beta()).abs(),
                iterations: root.iterations,
                error: displacement_error(&problem, det, &setup).map_err(numeric(ctx))?.value(),
            })
        }
        _ => None,
    };
    Ok(OptimizeReport {
        alpha2: cfg.alpha2,
        fixed_transmittance,
        fixed_gamma,
    })
}

pub fn cmd_optimize(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let report = optimize_report(cfg)?;
    if cfg.format == Format::Json {
        return match &cfg.out {
            Some(path) => emit_json("optimize", cfg, &report, create(path)?, path),
            None => emit_json("optimize", cfg, &report, stdout, Path::new("<stdout>")),
        };
    }
    let mut text = String::new();
    let f = &report.fixed_transmittance;
    text.push_str(&format!("alpha2 = {}\n", report.alpha2));
    text.push_str(&format!(
        "fixed T = {}: beta* = {:.6} (beta*^2 = {:.6}), residual = {:.3e}, error = {:.6}\n",
        f.transmittance, f.beta, f.beta2, f.residual, f.error
    ));
    if let Some(g) = &report.fixed_gamma {
        text.push_str(&format!(
            "fixed gamma2 = {}: T* = {:.6}, beta = {:.6} (beta^2 = {:.6}), residual = {:.3e}, error = {:.6}\n",
            g.gamma2, g.transmittance, g.beta, g.beta2, g.residual, g.error
        ));
    }
    let path = cfg.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    match &cfg.out {
        Some(p) => create(p)?.write_all(text.as_bytes()),
        None => stdout.write_all(text.as_bytes()),
    }
    .map_err(io_err(&path))
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    pub alpha2: f64,
    pub transmittance: f64,
    pub beta: f64,
    pub apd: ErrorEstimate,
    pub homodyne: ErrorEstimate,
    pub apd_analytic: f64,
    pub homodyne_analytic: f64,
}

pub fn cmd_simulate(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let seed = cfg.require_seed()?;
    let problem = problem(cfg)?;
    let ctx = "simulation";
    let det = cfg.detector_model();
    let hd = cfg.homodyne_model();
    let setup = policy(cfg)?.resolve(&problem, &det).map_err(numeric(ctx))?;
    let log = generate_pulse_log(
        &problem,
        &det,
        &setup,
        &hd,
        cfg.trials,
        seed,
        &cfg.sim_options(),
    )
    .map_err(numeric(ctx))?;
    let (apd, homodyne) = summarize_log(&log).map_err(numeric(ctx))?;
    let summary = SimulationSummary {
        alpha2: cfg.alpha2,
        transmittance: setup.transmittance(),
        beta: setup.beta(),
        apd,
        homodyne,
        apd_analytic: displacement_error(&problem, &det, &setup)
            .map_err(numeric(ctx))?
            .value(),
        homodyne_analytic: homodyne_error_with(&problem, &hd)
            .map_err(numeric(ctx))?
            .value(),
    };
    let stdout_path = Path::new("<stdout>");
    match (&cfg.out, cfg.format) {
        (None, Format::Csv) => write_pulse_log_csv(&log, stdout).map_err(io_err(stdout_path)),
        (None, Format::Json) => emit_json("simulate", cfg, &summary, stdout, stdout_path),
        (Some(path), Format::Csv) => {
            write_pulse_log_csv(&log, create(path)?).map_err(io_err(path))?;
            let sidecar = sidecar_path(path);
            emit_json("simulate", cfg, &summary, create(&sidecar)?, &sidecar)
        }
        (Some(path), Format::Json) => emit_json("simulate", cfg, &summary, create(path)?, path),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossoverReport {
    pub a: Receiver,
    pub b: Receiver,
    pub alpha2: f64,
    pub error: f64,
}

pub fn cmd_crossover(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let c = &cfg.crossover;
    let alpha2 = crossover_find(c.a, c.b, (c.lo, c.hi), c.tol).map_err(numeric("crossover"))?;
    let report = CrossoverReport {
        a: c.a,
        b: c.b,
        alpha2,
        error: crate::experiments::ideal_error(c.a, alpha2).map_err(numeric("crossover"))?,
    };
    let stdout_path = Path::new("<stdout>");
    match (&cfg.out, cfg.format) {
        (None, Format::Json) => emit_json("crossover", cfg, &report, stdout, stdout_path),
        (Some(path), Format::Json) => emit_json("crossover", cfg, &report, create(path)?, path),
        (out, Format::Csv) => {
            let text = format!("a,b,alpha2,error\n{},{},{:?},{:?}\n", c.a, c.b, alpha2, report.error);
            match out {
                Some(path) => create(path)?.write_all(text.as_bytes()).map_err(io_err(path)),
                None => stdout.write_all(text.as_bytes()).map_err(io_err(stdout_path)),
            }
        }
    }
}
