use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use param_elliptic_cli::commands::{self, CliError, Run};
use param_elliptic_cli::config::{Preset, RunConfig};

#[derive(Parser)]
#[command(name = "param-elliptic", version, about = "Parameter-elliptic boundary problems: checks, solvers and sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,
    /// Operator file `{"interior": symbol, "boundary": [symbol, ...]}`
    #[arg(long, global = true)]
    operator: Option<PathBuf>,
    #[arg(long, global = true)]
    theta: Option<f64>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true)]
    lambda0: Option<f64>,
    /// Dimension of the half-space
    #[arg(long = "grid-n", global = true)]
    grid_n: Option<usize>,
    /// Points per periodic direction
    #[arg(long = "grid-N", global = true)]
    grid_points: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Use the second-order heat problem with dynamic boundary condition
    #[arg(long, global = true)]
    heat: bool,
    /// Spectral parameter as `re,im`
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    lambda: Option<[f64; 2]>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Parameter-ellipticity constant of the interior operator over the sector
    CheckEllipticity,
    /// Shapiro-Lopatinskii determinant over the sector
    CheckSl,
    /// Mixed-smoothness norm of a grid field
    Norm {
        #[arg(long, allow_negative_numbers = true)]
        s: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sigma: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Solve the half-space model problem at one λ
    SolveModel,
    /// A-priori estimate ratios along rays
    AprioriSweep,
    /// Symbol sweeps for the Cahn-Hilliard resolvent
    ChVerify,
    /// Cahn-Hilliard resolvent at one λ
    ChResolvent,
    /// Resolvent decay ratios along rays
    ChSweep,
    /// Apply the analytic semigroup to a probe state
    ChSemigroup {
        #[arg(long)]
        t: Option<f64>,
    },
    /// Every check for the selected preset
    VerifyAll,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::CheckEllipticity => "check-ellipticity",
            Command::CheckSl => "check-sl",
            Command::Norm { .. } => "norm",
            Command::SolveModel => "solve-model",
            Command::AprioriSweep => "apriori-sweep",
            Command::ChVerify => "ch-verify",
            Command::ChResolvent => "ch-resolvent",
            Command::ChSweep => "ch-sweep",
            Command::ChSemigroup { .. } => "ch-semigroup",
            Command::VerifyAll => "verify-all",
        }
    }
}

fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    let parse = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok([parse(re)?, 0.0]),
        [re, im] => Ok([parse(re)?, parse(im)?]),
        _ => Err("expected re or re,im".into()),
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if c.preset.is_some() {
        cfg.preset = c.preset;
    }
    if c.operator.is_some() {
        cfg.operator = c.operator.clone();
    }
    cfg.theta = c.theta.unwrap_or(cfg.theta);
    cfg.eps = c.eps.unwrap_or(cfg.eps);
    cfg.lambda0 = c.lambda0.unwrap_or(cfg.lambda0);
    cfg.grid.n = c.grid_n.unwrap_or(cfg.grid.n);
    cfg.grid.points = c.grid_points.unwrap_or(cfg.grid.points);
    cfg.seed = c.seed.unwrap_or(cfg.seed);
    cfg.out = c.out.clone().unwrap_or(cfg.out);
    cfg.heat |= c.heat;
    cfg.lambda = c.lambda.unwrap_or(cfg.lambda);
    match cli.command {
        Command::Norm { s, sigma, p } => {
            cfg.norm.s = s.unwrap_or(cfg.norm.s);
            cfg.norm.sigma = sigma.unwrap_or(cfg.norm.sigma);
            cfg.norm.p = p.unwrap_or(cfg.norm.p);
            if let Some(l) = c.lambda {
                cfg.norm.lambda = l;
            }
        }
        Command::ChSemigroup { t } => cfg.t = t.unwrap_or(cfg.t),
        _ => {}
    }
    cfg.validate()?;
    cfg.operator()?;
    Ok(cfg)
}

fn dispatch(command: Command, run: &mut Run) -> Result<(), CliError> {
    match command {
        Command::CheckEllipticity => commands::check_ellipticity(run),
        Command::CheckSl => commands::check_sl(run),
        Command::Norm { .. } => commands::norm(run),
        Command::SolveModel => commands::solve_model(run),
        Command::AprioriSweep => commands::apriori(run),
        Command::ChVerify => commands::ch_verify(run),
        Command::ChResolvent => commands::ch_resolvent(run),
        Command::ChSweep => commands::ch_sweep(run),
        Command::ChSemigroup { .. } => commands::ch_semigroup(run),
        Command::VerifyAll => commands::verify_all(run),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(cfg) => cfg,
        Err(CliError::Config(msg)) | Err(CliError::Compute { message: msg, .. }) => {
            eprintln!("configuration error: {msg}");
            return ExitCode::from(2);
        }
    };
    let mut run = Run::new(&cfg);
    let outcome = dispatch(cli.command, &mut run);
    if let Err(CliError::Config(msg)) = &outcome {
        eprintln!("configuration error: {msg}");
        return ExitCode::from(2);
    }
    if let Err(CliError::Compute { check, message }) = &outcome {
        run.failed.push(check.clone());
        run.results.insert(check.clone(), json!({"error": message, "pass": false}));
    }
    let pass = run.failed.is_empty();
    let report = json!({
        "tool": "param-elliptic",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "config": cfg,
        "results": run.results,
        "timings": run.timings,
        "artifacts": run.artifacts,
        "failed": run.failed,
        "pass": pass,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    let path = cfg.out.join("report.json");
    if let Err(e) = fs::create_dir_all(&cfg.out).and_then(|_| fs::write(&path, &text)) {
        eprintln!("cannot write {}: {e}", path.display());
        return ExitCode::from(1);
    }
    println!("{text}");
    match &outcome {
        Err(CliError::Compute { check, message }) => {
            eprintln!("{check} failed: {message}");
            ExitCode::from(1)
        }
        _ if !pass => {
            eprintln!("failed checks: {}", run.failed.join(", "));
            ExitCode::from(1)
        }
        _ => ExitCode::SUCCESS,
    }
}
