//! Command-line surface: `analyze`, `simulate`, `spectrum`, `verify`, `export`.
//!
//! Every command prints a JSON envelope (or a table with `--format table`)
//! carrying the schema id, schema version and the resolved configuration.
//! Values come from flags, then `ISING_OUT_DIR` / `ISING_THREADS`, then the
//! `--config` file.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use config::{ConfigFile, KEYS};

use crate::classes::{build_lumped_chain, ClassState, LumpedChainDocument};
use crate::dynamics::{
    fit_constants, mixing_time, sample_hitting_times, simulate, simulate_lumped, spectral_gap, FittedConstants, HittingStats,
    SampleConfig, SimMode, SimOptions, SpectrumResult, DEFAULT_MIXING_BUDGET,
};
use crate::error::Error;
use crate::exact::format_rational;
use crate::landscape::{
    gamma_values, identify_states, landscape_report, Barrier, Gate, GateOutcome, LandscapeReport, NamedState,
};
use crate::oracle::{
    default_grid, full_transition_matrix, run_checks, verify_gate, GateVerdict, OracleReport, StateGraph, DEFAULT_N_MAX,
    FULL_MATRIX_N_MAX,
};
use crate::params::Params;

pub const SCHEMA_VERSION: u32 = 1;
pub const ENV_OUT_DIR: &str = "ISING_OUT_DIR";
pub const ENV_THREADS: &str = "ISING_THREADS";

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Runtime = 1,
    InvalidConfig = 2,
    Capacity = 3,
    CheckFailure = 4,
    Censored = 5,
}

impl ExitCode {
    pub fn of_error(e: &Error) -> ExitCode {
        match e {
            Error::Capacity(_) => ExitCode::Capacity,
            Error::Unreachable | Error::NonConvergence(_) | Error::Io(_) => ExitCode::Runtime,
            _ => ExitCode::InvalidConfig,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "clustered-ising", version, about = "Ising metastability on the two-cluster graph G(2,n)")]
pub struct Cli {
    /// Flat key = value file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for parallel trials and enumeration.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for JSON and CSV outputs.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Cross coupling in [−1, 1], decimal or p/q.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<String>,
    /// External field in [0, 1], decimal or p/q.
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form landscape report.
    Analyze {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Sample hitting times by Metropolis simulation.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        beta: Option<f64>,
        /// Start: +1, -1, +-1, -+1 or p1,p2,a.
        #[arg(long, allow_hyphen_values = true)]
        from: Option<String>,
        /// Target (repeatable): +1, -1, +-1, -+1 or p1,p2,a.
        #[arg(long, allow_hyphen_values = true)]
        to: Vec<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_steps: Option<u64>,
        /// Simulate the lumped class chain instead of configurations.
        #[arg(long)]
        lumped: bool,
        /// Half-width δ of the window (e^{β(Γ−δ)}, e^{β(Γ+δ)}).
        #[arg(long)]
        delta: Option<f64>,
        /// Γ for the window; defaults to the closed form for this transition.
        #[arg(long)]
        barrier: Option<f64>,
        /// Number of trajectory CSVs to write.
        #[arg(long)]
        trajectories: Option<usize>,
    },
    /// Spectral gap ρ_β and (−1/β)·log ρ_β over a β list.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',')]
        beta: Vec<f64>,
        /// Use the full 2^{2n} matrix (n ≤ 4).
        #[arg(long)]
        full: bool,
        /// Also compute t_mix(γ) on the lumped chain.
        #[arg(long)]
        gamma: Option<f64>,
        /// Step budget for t_mix.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Brute-force checks of the closed forms (n ≤ 6).
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// `default` runs the built-in (ε, h) grid.
        #[arg(long)]
        grid: Option<String>,
        /// Only verify the stated gate for this point.
        #[arg(long, alias = "gate-from-paper")]
        stated_gate: bool,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Write the lumped chain (classes, sizes, energies, transition triplets).
    Export {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        beta: Option<f64>,
    },
}

/// The configuration after merging flags, environment and config file.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n: usize,
    pub k: usize,
    pub epsilon: String,
    pub h: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub beta: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<SimMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub to: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub barrier: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stated_gate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema: String,
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub config: &'a RunConfig,
    pub result: T,
}

/// What a command produced: the text for stdout and the exit code.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub code: ExitCode,
}

/// Environment values the CLI reads.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub out_dir: Option<String>,
    pub threads: Option<String>,
}

impl Env {
    pub fn from_process() -> Self {
        Env { out_dir: std::env::var(ENV_OUT_DIR).ok(), threads: std::env::var(ENV_THREADS).ok() }
    }
}

fn parse_env<T: std::str::FromStr>(v: &Option<String>, name: &str) -> Result<Option<T>, Error> {
    v.as_deref().filter(|s| !s.is_empty()).map(|s| s.parse::<T>().map_err(|_| Error::Parse(format!("{name}={s}")))).transpose()
}

/// Parses a state name or an explicit `p1,p2,a` class.
pub fn parse_state(s: &str, n: usize) -> Result<ClassState, Error> {
    if let Ok(named) = s.parse::<NamedState>() {
        return Ok(named.class(n));
    }
    let parts: Vec<&str> = s.trim().trim_start_matches('(').trim_end_matches(')').split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("state {s:?}: expected +1, -1, +-1, -+1 or p1,p2,a")));
    }
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("state {s:?}")));
    ClassState::new(n, num(parts[0])?, num(parts[1])?, num(parts[2])?)
}

struct Resolver {
    file: ConfigFile,
    config: RunConfig,
}

impl Resolver {
    fn params(&mut self, m: &ModelArgs) -> Result<Params, Error> {
        let n = self.file.pick(m.n, "n")?.ok_or_else(|| Error::Domain("--n is required".into()))?;
        let k = self.file.pick(m.k, "k")?.unwrap_or(2);
        let eps = self.file.pick(m.epsilon.clone(), "epsilon")?.unwrap_or_else(|| "0".into());
        let h = self.file.pick(m.h.clone(), "h")?.unwrap_or_else(|| "0".into());
        let params = Params::parse(n, &eps, &h)?.with_clusters(k)?;
        self.config.n = n;
        self.config.k = k;
        self.config.epsilon = format_rational(params.epsilon());
        self.config.h = format_rational(params.h());
        Ok(params)
    }

    fn betas(&mut self, flag: Vec<f64>) -> Result<Vec<f64>, Error> {
        let betas = if flag.is_empty() {
            match self.file.get("beta") {
                Some(v) => v
                    .split(',')
                    .map(|b| b.trim().parse::<f64>().map_err(|_| Error::Parse(format!("config key beta: {v:?}"))))
                    .collect::<Result<Vec<_>, _>>()?,
                None => vec![],
            }
        } else {
            flag
        };
        if betas.is_empty() {
            return Err(Error::Domain("--beta is required".into()));
        }
        if let Some(b) = betas.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return Err(Error::Domain(format!("β must be positive and finite, got {b}")));
        }
        self.config.beta = betas.clone();
        Ok(betas)
    }
}

fn envelope<T: Serialize>(command: &str, config: &RunConfig, result: T) -> Result<String, Error> {
    let env = Envelope {
        schema: format!("clustered-ising/{command}"),
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        config,
        result,
    };
    serde_json::to_string_pretty(&env).map_err(|e| Error::Io(e.to_string()))
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, format!("{}\n", text.trim_end())).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Parses arguments, runs the command and returns stdout text plus exit code.
pub fn execute(cli: Cli, env: &Env) -> Result<Output, Error> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => match parse_env::<usize>(&env.threads, ENV_THREADS)? {
            Some(t) => Some(t),
            None => file.pick::<usize>(None, "threads")?,
        },
    };
    let out_dir = match cli.out_dir.clone() {
        Some(d) => Some(d),
        None => match env.out_dir.as_deref().filter(|s| !s.is_empty()) {
            Some(d) => Some(PathBuf::from(d)),
            None => file.pick::<String>(None, "out_dir")?.map(PathBuf::from),
        },
    };
    let format = match cli.format {
        Some(f) => f,
        None => match file.get("format") {
            None | Some("json") => Format::Json,
            Some("table") => Format::Table,
            Some(other) => return Err(Error::Parse(format!("config key format: {other:?}"))),
        },
    };
    if threads == Some(0) {
        return Err(Error::Domain("--threads must be at least 1".into()));
    }
    let config =
        RunConfig { format, threads, out_dir: out_dir.as_ref().map(|d| d.display().to_string()), ..RunConfig::default() };
    let mut r = Resolver { file, config };
    let job = || run_command(cli.command, &mut r, out_dir.as_deref());
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build().map_err(|e| Error::Io(e.to_string()))?.install(job),
        None => job(),
    }
}

struct Rendered {
    command: &'static str,
    json: String,
    table: String,
    code: ExitCode,
}

fn run_command(command: Command, r: &mut Resolver, out_dir: Option<&Path>) -> Result<Output, Error> {
    let rendered = match command {
        Command::Analyze { model } => analyze(model, r)?,
        Command::Simulate { model, beta, from, to, trials, seed, max_steps, lumped, delta, barrier, trajectories } => {
            let opts = SimulateArgs { beta, from, to, trials, seed, max_steps, lumped, delta, barrier, trajectories };
            simulate_cmd(model, opts, r, out_dir)?
        }
        Command::Spectrum { model, beta, full, gamma, budget } => spectrum(model, beta, full, gamma, budget, r)?,
        Command::Verify { model, grid, stated_gate, n_max } => verify(model, grid, stated_gate, n_max, r)?,
        Command::Export { model, beta } => export(model, beta, r)?,
    };
    if let Some(dir) = out_dir {
        write_file(dir, &format!("{}.json", rendered.command), &rendered.json)?;
    }
    let text = match r.config.format {
        Format::Json => rendered.json,
        Format::Table => rendered.table,
    };
    Ok(Output { text, code: rendered.code })
}

fn analyze(model: ModelArgs, r: &mut Resolver) -> Result<Rendered, Error> {
    r.config.command = "analyze".into();
    let params = r.params(&model)?;
    let report: LandscapeReport = landscape_report(&params)?;
    Ok(Rendered {
        command: "analyze",
        json: envelope("analyze", &r.config, &report)?,
        table: report.to_table(),
        code: ExitCode::Success,
    })
}

struct SimulateArgs {
    beta: Option<f64>,
    from: Option<String>,
    to: Vec<String>,
    trials: Option<usize>,
    seed: Option<u64>,
    max_steps: Option<u64>,
    lumped: bool,
    delta: Option<f64>,
    barrier: Option<f64>,
    trajectories: Option<usize>,
}

/// The closed-form barrier whose transition is exactly `start → targets`.
fn matching_barrier(params: &Params, start: ClassState, targets: &[ClassState]) -> Result<Option<Barrier>, Error> {
    let n = params.n();
    let g = gamma_values(params)?;
    let mut want: Vec<ClassState> = targets.to_vec();
    want.sort();
    Ok([g.gamma_s, g.gamma_m].into_iter().flatten().find(|b| {
        let mut to: Vec<ClassState> = b.transition.to.iter().map(|s| s.class(n)).collect();
        to.sort();
        b.transition.from.class(n) == start && to == want
    }))
}

#[derive(Serialize)]
struct SimulateResult {
    stats: HittingStats,
    trajectory_files: Vec<String>,
}

fn simulate_cmd(model: ModelArgs, a: SimulateArgs, r: &mut Resolver, out_dir: Option<&Path>) -> Result<Rendered, Error> {
    r.config.command = "simulate".into();
    let params = r.params(&model)?;
    let n = params.n();
    let beta = r.file.pick(a.beta, "beta")?.ok_or_else(|| Error::Domain("--beta is required".into()))?;
    let params = params.with_beta(beta)?;
    r.config.beta = vec![beta];
    let from = r.file.pick(a.from, "from")?.ok_or_else(|| Error::Domain("--from is required".into()))?;
    let to: Vec<String> = if a.to.is_empty() {
        r.file.get("to").map(|v| v.split(';').map(|s| s.trim().to_string()).collect()).unwrap_or_default()
    } else {
        a.to
    };
    if to.is_empty() {
        return Err(Error::EmptyTargets);
    }
    let start = parse_state(&from, n)?;
    let targets: Vec<ClassState> = to.iter().map(|s| parse_state(s, n)).collect::<Result<_, _>>()?;
    let trials = r.file.pick(a.trials, "trials")?.unwrap_or(1);
    let seed = r.file.pick(a.seed, "seed")?.unwrap_or(0);
    let max_steps = r.file.pick(a.max_steps, "max_steps")?.unwrap_or(10_000_000);
    let lumped = a.lumped || r.file.get("mode") == Some("lumped");
    let mode = if lumped { SimMode::Lumped } else { SimMode::Full };
    let delta = r.file.pick(a.delta, "delta")?;
    let barrier = match r.file.pick(a.barrier, "barrier")? {
        Some(b) => Some(b),
        None => matching_barrier(&params, start, &targets)?.map(|b| b.value_f64),
    };
    let window = match delta {
        Some(d) => {
            Some((barrier.ok_or_else(|| Error::Domain("--delta needs --barrier: no closed form for this transition".into()))?, d))
        }
        None => None,
    };
    let trajectories = r.file.pick(a.trajectories, "trajectories")?.unwrap_or(usize::from(out_dir.is_some())).min(trials);
    r.config.from = Some(from);
    r.config.to = to;
    r.config.trials = Some(trials);
    r.config.seed = Some(seed);
    r.config.max_steps = Some(max_steps);
    r.config.mode = Some(mode);
    r.config.delta = delta;
    r.config.barrier = window.map(|w| w.0);
    r.config.trajectories = Some(trajectories);

    let cfg = SampleConfig { mode, beta, trials, seed, max_steps, window, exact: true };
    let stats = sample_hitting_times(&params, start, &targets, &cfg)?;

    let mut files = Vec::new();
    if trajectories > 0 {
        let dir = out_dir.unwrap_or(Path::new("."));
        let chain = build_lumped_chain(&params, beta)?;
        for trial in 0..trajectories {
            let opts = SimOptions { seed, stream: trial as u64, max_steps, record: true };
            let t = match mode {
                SimMode::Full => simulate(&params, beta, &crate::classes::representative(start, n)?, &targets, opts)?,
                SimMode::Lumped => simulate_lumped(&chain, start, &targets, opts)?,
            };
            let mut buf = Vec::new();
            t.write_csv(&mut buf)?;
            let name = format!("trajectory-{trial}.csv");
            write_file(dir, &name, &String::from_utf8(buf).expect("csv is utf-8"))?;
            files.push(dir.join(name).display().to_string());
        }
    }

    let mut table = String::new();
    let _ = writeln!(table, "mode        {mode:?}");
    let _ = writeln!(table, "transition  {start} → {}", targets.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "));
    let _ = writeln!(table, "trials      {} ({} censored)", stats.trials, stats.censored);
    let _ = writeln!(table, "mean τ      {:.6} ± {:.6} (s.e.)", stats.mean, stats.std_error);
    if let Some(m) = stats.exact_mean {
        let _ = writeln!(table, "exact E[τ]  {m:.6}");
    }
    let _ = writeln!(table, "(1/β)log Eτ {:.6}", stats.log_rate);
    if let Some(w) = &stats.window {
        let _ = writeln!(
            table,
            "in window   {:.4} of trials, (e^(β(Γ−δ)), e^(β(Γ+δ))) = ({:.4}, {:.4})",
            w.fraction, w.lower, w.upper
        );
    }
    let code = if stats.censored > 0 { ExitCode::Censored } else { ExitCode::Success };
    let result = SimulateResult { stats, trajectory_files: files };
    Ok(Rendered { command: "simulate", json: envelope("simulate", &r.config, &result)?, table, code })
}

/// The barrier controlling the spectral gap: `Γs` when several stable states
/// compete, the maximal stability level `Γm` otherwise.
pub fn spectral_barrier(params: &Params) -> Result<Option<Barrier>, Error> {
    let states = identify_states(params)?;
    let g = gamma_values(params)?;
    Ok(if states.stable.len() > 1 { g.gamma_s } else { g.gamma_m })
}

#[derive(Serialize)]
struct GapComparison {
    beta: f64,
    lumped: f64,
    full: f64,
    agree: bool,
    note: Option<String>,
}

#[derive(Serialize)]
struct SpectrumReport {
    matrix: &'static str,
    points: Vec<SpectrumResult>,
    barrier: Option<Barrier>,
    fitted_constants: Option<FittedConstants>,
    full_chain_check: Vec<GapComparison>,
}

fn spectrum(
    model: ModelArgs,
    beta: Vec<f64>,
    full: bool,
    gamma: Option<f64>,
    budget: Option<u64>,
    r: &mut Resolver,
) -> Result<Rendered, Error> {
    r.config.command = "spectrum".into();
    let params = r.params(&model)?;
    let betas = r.betas(beta)?;
    let full = r.file.flag(full, "full")?;
    let gamma = r.file.pick(gamma, "gamma")?;
    let budget = r.file.pick(budget, "budget")?.unwrap_or(DEFAULT_MIXING_BUDGET);
    r.config.full = Some(full);
    r.config.gamma = gamma;
    r.config.budget = gamma.map(|_| budget);
    if full && params.n() > FULL_MATRIX_N_MAX {
        return Err(Error::Capacity(format!(
            "--full builds a 2^(2n) matrix; n = {} exceeds the limit {FULL_MATRIX_N_MAX}",
            params.n()
        )));
    }
    let mut points = Vec::new();
    let mut checks = Vec::new();
    for &b in &betas {
        let lumped = build_lumped_chain(&params, b)?;
        let mut point = if full {
            let (_, chain) = full_transition_matrix(&params, b)?;
            spectral_gap(&chain, b)?
        } else {
            spectral_gap(lumped.chain(), b)?
        };
        if !full && params.n() <= FULL_MATRIX_N_MAX {
            let (_, chain) = full_transition_matrix(&params, b)?;
            let f = spectral_gap(&chain, b)?.gap;
            let agree = (f - point.gap).abs() <= 1e-9;
            let note = (!agree).then(|| "slow mode outside symmetric subspace".to_string());
            checks.push(GapComparison { beta: b, lumped: point.gap, full: f, agree, note });
        }
        if let Some(g) = gamma {
            point.mixing = Some(mixing_time(&lumped, g, budget)?);
        }
        points.push(point);
    }
    let barrier = spectral_barrier(&params)?;
    let fitted = barrier.as_ref().and_then(|b| fit_constants(&points, b.value_f64));

    let slopes = points.len() > 1;
    let mut table = String::new();
    let _ = write!(table, "{:>8}  {:>22}", "beta", "gap");
    if slopes {
        let _ = write!(table, "  {:>16}", "(-1/beta)log gap");
    }
    let _ = write!(table, "  {:>14}", "method");
    if gamma.is_some() {
        let _ = write!(table, "  {:>10}", "t_mix");
    }
    table.push('\n');
    for p in &points {
        let _ = write!(table, "{:>8}  {:>22.15e}", p.beta, p.gap);
        if slopes {
            let _ = write!(table, "  {:>16.6}", p.rate);
        }
        let method = serde_json::to_value(p.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let _ = write!(table, "  {method:>14}");
        if let Some(m) = &p.mixing {
            let _ = write!(table, "  {:>10}{}", m.steps, if m.lower_bound_only { "+" } else { "" });
        }
        table.push('\n');
    }
    if let Some(b) = &barrier {
        let _ = writeln!(table, "Γ = {} = {} ({})", b.formula.expr, format_rational(b.value()), b.transition);
    }
    if let Some(f) = &fitted {
        let _ = writeln!(table, "fitted over this β range: c1 = {:.6e}, c2 = {:.6e}", f.c1, f.c2);
    }
    for c in checks.iter().filter(|c| !c.agree) {
        let _ = writeln!(
            table,
            "β = {}: full gap {:.6e} differs from lumped gap: slow mode outside symmetric subspace",
            c.beta, c.full
        );
    }
    let report = SpectrumReport {
        matrix: if full { "full" } else { "lumped" },
        points,
        barrier,
        fitted_constants: fitted,
        full_chain_check: checks,
    };
    Ok(Rendered { command: "spectrum", json: envelope("spectrum", &r.config, &report)?, table, code: ExitCode::Success })
}

#[derive(Serialize)]
struct GateReport {
    gate: Option<Gate>,
    outcome: GateOutcome,
    verdict: Option<GateVerdict>,
}

fn checks_table(reports: &[OracleReport]) -> String {
    let mut t = String::new();
    for rep in reports {
        let _ =
            writeln!(t, "n = {}, ε = {}, h = {} [{}]", rep.n, format_rational(rep.epsilon), format_rational(rep.h), rep.regime);
        for c in &rep.checks {
            let _ = writeln!(
                t,
                "  {} {}: expected {}; observed {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.expected,
                c.observed
            );
        }
    }
    t
}

fn verify(
    model: ModelArgs,
    grid: Option<String>,
    gate_only: bool,
    n_max: Option<usize>,
    r: &mut Resolver,
) -> Result<Rendered, Error> {
    r.config.command = "verify".into();
    let grid = r.file.pick(grid, "grid")?;
    let n_max = r.file.pick(n_max, "n_max")?.unwrap_or(DEFAULT_N_MAX);
    r.config.n_max = Some(n_max);
    r.config.stated_gate = Some(gate_only);
    let params = r.params(&model)?;
    if gate_only {
        let outcome = crate::landscape::gate_set(&params)?;
        let g = StateGraph::build(&params, n_max)?;
        let verdict = match outcome.gate() {
            Some(gate) => {
                Some(verify_gate(&g, g.named_code(gate.transition.from), g.named_code(gate.transition.to[0]), &gate.classes)?)
            }
            None => None,
        };
        let ok = verdict.as_ref().is_none_or(|v| v.is_gate);
        let table = match (&outcome, &verdict) {
            (GateOutcome::Stated(gate), Some(v)) => format!(
                "gate {} for {}: {} (minimal: {:?})\nsaddle classes: {:?}\n",
                gate.label,
                gate.transition,
                if v.is_gate { "TRUE" } else { "FALSE" },
                v.minimal,
                v.saddle_classes.iter().map(|c| c.to_string()).collect::<Vec<_>>()
            ),
            (GateOutcome::NotStated { reason }, _) => format!("no gate stated: {reason}\n"),
            _ => String::new(),
        };
        let report = GateReport { gate: outcome.gate().cloned(), outcome, verdict };
        let code = if ok { ExitCode::Success } else { ExitCode::CheckFailure };
        return Ok(Rendered { command: "verify", json: envelope("verify", &r.config, &report)?, table, code });
    }
    let points: Vec<Params> = match grid.as_deref() {
        None => vec![params],
        Some("default") => default_grid().into_iter().map(|(e, h)| Params::new(params.n(), e, h)).collect::<Result<_, _>>()?,
        Some(other) => return Err(Error::Domain(format!("unknown grid {other:?}; only \"default\" is built in"))),
    };
    r.config.grid = grid;
    let reports: Vec<OracleReport> = points.iter().map(|p| run_checks(p, n_max)).collect::<Result<_, _>>()?;
    let ok = reports.iter().all(OracleReport::all_passed);
    let code = if ok { ExitCode::Success } else { ExitCode::CheckFailure };
    Ok(Rendered { command: "verify", json: envelope("verify", &r.config, &reports)?, table: checks_table(&reports), code })
}

fn export(model: ModelArgs, beta: Option<f64>, r: &mut Resolver) -> Result<Rendered, Error> {
    r.config.command = "export".into();
    let params = r.params(&model)?;
    let beta = r.file.pick(beta, "beta")?.ok_or_else(|| Error::Domain("--beta is required".into()))?;
    let params = params.with_beta(beta)?;
    r.config.beta = vec![beta];
    let doc: LumpedChainDocument = build_lumped_chain(&params, beta)?.to_document();
    let table =
        format!("{} classes, {} nonzero entries, lumpability {}\n", doc.classes.len(), doc.triplets.len(), doc.lumpability);
    Ok(Rendered { command: "export", json: envelope("export", &r.config, &doc)?, table, code: ExitCode::Success })
}

/// Entry point for the binary: prints the output and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::InvalidConfig as i32 } else { 0 };
        }
    };
    match execute(cli, &Env::from_process()) {
        Ok(out) => {
            println!("{}", out.text.trim_end());
            out.code as i32
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::of_error(&e) as i32
        }
    }
}
