//! `roughvol` command-line front end.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use roughvol::analysis::{mc_strong_error, theory_constants, McConfig};
use roughvol::kernels::{asymptotic_constants, r_y, r_z};
use roughvol::rng::ReplicationKey;
use roughvol::sampler::{build_covariance, cholesky_factor, sample_fou_davis_harte, sample_joint, Grid};
use roughvol::Error;
use serde::Serialize;

use config::{ExperimentConfig, Format, ModeArg, SamplerKind};
use output::{first_non_finite, to_csv, to_json, Cell};

#[derive(Parser, Debug)]
#[command(name = "roughvol", version, about = "Rough volatility simulation and strong-error analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Asymptotic error constants of both schemes and the lower-bound constant.
    Constants(Common),
    /// Covariance of Y and of exp(aY) on a lag grid.
    Kernel {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        kernel: KernelArgs,
    },
    /// One sampled path.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum)]
        sampler: Option<SamplerKind>,
    },
    /// Monte Carlo strong-error study with oracles and fitted rates.
    Convergence {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mc: McArgs,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// JSON experiment configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    hurst: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_final: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Exponent of the transform exp(aY).
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_steps: Option<usize>,
}

#[derive(Args, Debug)]
struct McArgs {
    /// Comma-separated, strictly increasing step counts.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long)]
    fine_factor: Option<usize>,
    #[arg(long)]
    replications: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Number of largest grid sizes used in the rate fit.
    #[arg(long)]
    fit_points: Option<usize>,
}

#[derive(Debug)]
enum Failure {
    Model(Error),
    Usage(String),
    NonFinite(f64),
    Output(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Model(e) => match e {
                Error::QuadratureNotConverged { .. } => 3,
                Error::NotPositiveDefinite { .. } | Error::EmbeddingNotPsd { .. } => 4,
                Error::TractabilityExceeded(_) => 5,
                _ => 2,
            },
            Failure::Usage(_) => 2,
            Failure::NonFinite(_) => 3,
            Failure::Output(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Model(e) => write!(f, "{e}"),
            Failure::NonFinite(x) => write!(f, "computation produced a non-finite value ({x})"),
            Failure::Usage(s) | Failure::Output(s) => f.write_str(s),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

fn load(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    let p = &mut cfg.params;
    let overrides = [
        (&mut p.hurst, common.hurst),
        (&mut p.lambda, common.lambda),
        (&mut p.theta, common.theta),
        (&mut p.mu, common.mu),
        (&mut p.rho, common.rho),
        (&mut p.s0, common.s0),
        (&mut p.t_final, common.t_final),
    ];
    for (field, value) in overrides {
        if let Some(v) = value {
            *field = v;
        }
    }
    cfg.params.validate()?;
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = common.a {
        cfg.a = v;
    }
    if common.format.is_some() {
        cfg.format = common.format;
    }
    if common.out.is_some() {
        cfg.out.clone_from(&common.out);
    }
    if common.threads.is_some() {
        cfg.threads = common.threads;
    }
    Ok(cfg)
}

fn check_finite(values: impl IntoIterator<Item = f64>) -> Result<(), Failure> {
    match first_non_finite(values) {
        Some(x) => Err(Failure::NonFinite(x)),
        None => Ok(()),
    }
}

fn emit(cfg: &ExperimentConfig, text: std::io::Result<String>) -> Result<(), Failure> {
    let text = text.map_err(|e| Failure::Output(e.to_string()))?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Output(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Output(e.to_string()))
        }
    }
}

#[derive(Serialize)]
struct ConstantsOut {
    c_euler: f64,
    c_trapezoid: f64,
    lower_bound: f64,
    hurst: f64,
    c0: f64,
    c1: f64,
    variance_y: f64,
}

fn cmd_constants(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let t = theory_constants(&cfg.params);
    let a = asymptotic_constants(&cfg.params, cfg.a)?;
    let out = ConstantsOut {
        c_euler: t.c_euler,
        c_trapezoid: t.c_trapezoid,
        lower_bound: t.lower_bound,
        hurst: t.hurst,
        c0: a.c0,
        c1: a.c1,
        variance_y: a.variance_y,
    };
    check_finite([out.c_euler, out.c_trapezoid, out.lower_bound, out.c0, out.c1, out.variance_y])?;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => to_csv(
            &["c_euler", "c_trapezoid", "lower_bound", "hurst", "c0", "c1", "variance_y"],
            [vec![
                out.c_euler.into(),
                out.c_trapezoid.into(),
                out.lower_bound.into(),
                out.hurst.into(),
                out.c0.into(),
                out.c1.into(),
                out.variance_y.into(),
            ]],
        ),
    };
    emit(cfg, text)
}

#[derive(Serialize)]
struct KernelRow {
    tau: f64,
    r_y: f64,
    r_z: f64,
}

fn tau_grid(cfg: &ExperimentConfig) -> Result<Vec<f64>, Failure> {
    let (lo, hi, steps) = (cfg.tau_min, cfg.tau_max, cfg.tau_steps);
    if !(lo >= 0.0 && hi >= lo && hi.is_finite()) || steps == 0 {
        return Err(Failure::Usage(format!(
            "tau grid needs 0 <= tau_min <= tau_max and tau_steps >= 1, got [{lo}, {hi}] with {steps} steps"
        )));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * (i as f64 / (steps - 1) as f64))
        .collect())
}

fn cmd_kernel(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let taus = tau_grid(cfg)?;
    let p = &cfg.params;
    let rows: Vec<KernelRow> = taus
        .par_iter()
        .map(|&tau| {
            Ok(KernelRow {
                tau,
                r_y: r_y(p, tau)?,
                r_z: r_z(p, cfg.a, tau)?,
            })
        })
        .collect::<Result<_, Error>>()?;
    check_finite(rows.iter().flat_map(|r| [r.r_y, r.r_z]))?;
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&rows),
        Format::Csv => to_csv(
            &["tau", "r_y", "r_z"],
            rows.iter().map(|r| vec![r.tau.into(), r.r_y.into(), r.r_z.into()]),
        ),
    };
    emit(cfg, text)
}

#[derive(Serialize)]
struct SampleOut {
    sampler: SamplerKind,
    seed: u64,
    jitter: Option<f64>,
    t: Vec<f64>,
    y: Vec<f64>,
    dv: Option<Vec<f64>>,
    dw: Option<Vec<f64>>,
}

fn cmd_sample(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let p = &cfg.params;
    let grid = Grid::new(cfg.n, p.t_final)?;
    let key = ReplicationKey::new(cfg.seed, 0);
    let out = match cfg.sampler {
        SamplerKind::Cholesky => {
            let factor = cholesky_factor(&build_covariance(p, &grid)?)?;
            if let Some(j) = factor.jitter() {
                eprintln!("note: covariance factorized with diagonal jitter {j:e}");
            }
            let path = sample_joint(&factor, &grid, p, key)?;
            SampleOut {
                sampler: cfg.sampler,
                seed: cfg.seed,
                jitter: factor.jitter(),
                t: grid.times(),
                y: path.y,
                dv: Some(path.dv),
                dw: Some(path.dw),
            }
        }
        SamplerKind::DavisHarte => SampleOut {
            sampler: cfg.sampler,
            seed: cfg.seed,
            jitter: None,
            t: grid.times(),
            y: sample_fou_davis_harte(p, &grid, key)?,
            dv: None,
            dw: None,
        },
    };
    check_finite(out.y.iter().chain(out.dv.iter().flatten()).chain(out.dw.iter().flatten()).copied())?;
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&out),
        Format::Csv => {
            let inc = |v: &Option<Vec<f64>>, k: usize| -> Cell {
                v.as_ref().and_then(|v| v.get(k).copied()).into()
            };
            to_csv(
                &["k", "t", "y", "dv", "dw"],
                (0..=cfg.n).map(|k| {
                    vec![
                        k.into(),
                        out.t[k].into(),
                        out.y[k].into(),
                        inc(&out.dv, k),
                        inc(&out.dw, k),
                    ]
                }),
            )
        }
    };
    emit(cfg, text)
}

fn cmd_convergence(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let mc = McConfig {
        n_list: cfg.n_list.clone(),
        fine_factor: cfg.fine_factor,
        replications: cfg.replications,
        seed: cfg.seed,
        mode: cfg.mode.into(),
        fit_points: cfg.fit_points,
    };
    let report = mc_strong_error(&cfg.params, &mc)?;
    let fits = [report.fits.euler, report.fits.trapezoid];
    check_finite(
        report
            .rows
            .iter()
            .flat_map(|r| [r.mse_euler, r.mse_trap, r.oracle_euler, r.oracle_trap])
            .chain(report.rows.iter().flat_map(|r| [r.se_euler, r.se_trap]).flatten())
            .chain(fits.iter().flatten().flat_map(|f| [f.rate, f.log_constant])),
    )?;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report),
        Format::Csv => to_csv(
            &["n", "mse_euler", "se_euler", "mse_trap", "se_trap", "oracle_euler", "oracle_trap"],
            report.rows.iter().map(|r| {
                vec![
                    r.n.into(),
                    r.mse_euler.into(),
                    r.se_euler.into(),
                    r.mse_trap.into(),
                    r.se_trap.into(),
                    r.oracle_euler.into(),
                    r.oracle_trap.into(),
                ]
            }),
        ),
    };
    emit(cfg, text)
}

type Overrides<'a> = Box<dyn Fn(&mut ExperimentConfig) + 'a>;

fn run(cli: Cli) -> Result<(), Failure> {
    let (common, apply): (&Common, Overrides) = match &cli.command {
        Command::Constants(c) => (c, Box::new(|_| {})),
        Command::Kernel { common, kernel } => (
            common,
            Box::new(move |cfg| {
                if let Some(v) = kernel.tau_min {
                    cfg.tau_min = v;
                }
                if let Some(v) = kernel.tau_max {
                    cfg.tau_max = v;
                }
                if let Some(v) = kernel.tau_steps {
                    cfg.tau_steps = v;
                }
            }),
        ),
        Command::Sample { common, n, sampler } => (
            common,
            Box::new(move |cfg| {
                if let Some(v) = *n {
                    cfg.n = v;
                }
                if let Some(v) = *sampler {
                    cfg.sampler = v;
                }
            }),
        ),
        Command::Convergence { common, mc } => (
            common,
            Box::new(move |cfg| {
                if let Some(v) = &mc.n_list {
                    cfg.n_list.clone_from(v);
                }
                if let Some(v) = mc.fine_factor {
                    cfg.fine_factor = v;
                }
                if let Some(v) = mc.replications {
                    cfg.replications = v;
                }
                if let Some(v) = mc.mode {
                    cfg.mode = v;
                }
                if mc.fit_points.is_some() {
                    cfg.fit_points = mc.fit_points;
                }
            }),
        ),
    };
    let mut cfg = load(common)?;
    apply(&mut cfg);
    if let Some(threads) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start {threads} threads: {e}")))?;
    }
    match cli.command {
        Command::Constants(_) => cmd_constants(&cfg),
        Command::Kernel { .. } => cmd_kernel(&cfg),
        Command::Sample { .. } => cmd_sample(&cfg),
        Command::Convergence { .. } => cmd_convergence(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
