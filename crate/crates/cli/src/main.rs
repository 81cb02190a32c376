mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigError, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "berger", about = "Minimal surfaces in Berger spheres and their sisters in H2xR")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, allow_hyphen_values = true)]
    kappa: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    tau: Option<String>,
    /// Mean curvature of the sister surface
    #[arg(long = "H", global = true)]
    h: Option<String>,
    #[arg(long, global = true)]
    c: Option<String>,
    #[arg(long, global = true)]
    lambda: Option<String>,
    /// Comma-separated list for `sweep`
    #[arg(long, global = true)]
    alpha: Option<String>,
    #[arg(long, global = true)]
    nx: Option<String>,
    #[arg(long, global = true)]
    ny: Option<String>,
    #[arg(long, global = true)]
    tol: Option<String>,
    /// coons, umbrella, helicoid or a path to an .s3mesh file
    #[arg(long = "seed-mesh", global = true)]
    seed_mesh: Option<String>,
    /// Output file; the extension picks the format. Stdout when absent.
    #[arg(long, global = true)]
    out: Option<String>,
    /// key=value configuration file
    #[arg(long, global = true)]
    config: Option<String>,
    /// Extra `section.key=value` settings
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Emit a helicoid, f^c or Lawson surface mesh
    GenHelicoid,
    /// Emit the geodesic polygon and check its reflection
    Polygon,
    /// Plateau solve from a seed mesh
    Solve,
    /// Reconstruct and diagnose the sister surface
    Sister,
    /// Closed-form constants over an (H, c) grid
    Tables,
    /// Run the identity suite
    Verify,
    /// Continuation in alpha around the horizontal unduloid
    Sweep,
}

pub enum Failure {
    Verify(String),
    Config(String),
    NoConvergence(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<berger::GeomError> for Failure {
    fn from(e: berger::GeomError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{path}: {e}")))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    let flags = [
        ("params.kappa", &cli.kappa),
        ("params.tau", &cli.tau),
        ("surface.H", &cli.h),
        ("surface.c", &cli.c),
        ("polygon.lambda", &cli.lambda),
        ("sweep.alpha", &cli.alpha),
        ("mesh.nx", &cli.nx),
        ("mesh.ny", &cli.ny),
        ("solver.tol", &cli.tol),
        ("solver.seed_mesh", &cli.seed_mesh),
        ("output.out", &cli.out),
    ];
    for kv in &cli.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError(format!("--set expects key=value, got {kv:?}")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    Ok(cfg)
}

fn configure_threads() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var("BERGER_THREADS") else { return Ok(()) };
    let n: usize =
        v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| ConfigError(format!("BERGER_THREADS={v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| ConfigError(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads()
        .map_err(Failure::from)
        .and_then(|_| build_config(&cli).map_err(Failure::from))
        .and_then(|cfg| match cli.command {
            Command::GenHelicoid => commands::gen_helicoid(&cfg),
            Command::Polygon => commands::polygon(&cfg),
            Command::Solve => commands::solve(&cfg),
            Command::Sister => commands::sister(&cfg),
            Command::Tables => commands::tables(&cfg),
            Command::Verify => commands::verify(&cfg),
            Command::Sweep => commands::sweep(&cfg),
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("bad config: {m}");
            ExitCode::from(2)
        }
        Err(Failure::NoConvergence(m)) => {
            eprintln!("no convergence: {m}");
            ExitCode::from(3)
        }
    }
}
