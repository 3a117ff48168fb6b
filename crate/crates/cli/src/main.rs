//! `fglab` command-line driver.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity, clippy::needless_range_loop)]

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fglab::{Error, Result};

use crate::config::{Profile, RunConfig};

#[derive(Parser)]
#[command(name = "fglab", version, about = "Fefferman-Graham expansions and boundary constraint experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand the FG series of (γ, g_(n)) and report its residual slope.
    FgExpand(Overrides),
    /// Integrate the radial Einstein equation from a series seed.
    Evolve(Overrides),
    /// Check the boundary constraints and Killing-extension criteria.
    Constraints(Overrides),
    /// Horizon, period and geodesic-gauge curve of AdS-Schwarzschild.
    Schwarzschild(Overrides),
    /// Integral identity and obstruction for the flat-torus example.
    TorusExample(Overrides),
    /// Decay of the difference between two evolved solutions.
    Decay(Overrides),
    /// Run the acceptance suite.
    Verify(Overrides),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::FgExpand(_) => "fg-expand",
            Command::Evolve(_) => "evolve",
            Command::Constraints(_) => "constraints",
            Command::Schwarzschild(_) => "schwarzschild",
            Command::TorusExample(_) => "torus-example",
            Command::Decay(_) => "decay",
            Command::Verify(_) => "verify",
        }
    }

    fn overrides(&self) -> &Overrides {
        match self {
            Command::FgExpand(o)
            | Command::Evolve(o)
            | Command::Constraints(o)
            | Command::Schwarzschild(o)
            | Command::TorusExample(o)
            | Command::Decay(o)
            | Command::Verify(o) => o,
        }
    }
}

/// Flags that override values of the configuration file.
#[derive(Args, Default)]
struct Overrides {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    ode_tol: Option<f64>,
    #[arg(long)]
    ode_tol_b: Option<f64>,
    #[arg(long)]
    fit_tol: Option<f64>,
    #[arg(long)]
    identity_tol: Option<f64>,
    #[arg(long)]
    floor: Option<f64>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    t1: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    profile: Option<Profile>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    resolve_log: bool,
    /// Comma-separated g_(n) values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    g_n: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    g_n_b: Option<Vec<f64>>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        fn set<T: Clone>(slot: &mut T, v: &Option<T>) {
            if let Some(v) = v {
                *slot = v.clone();
            }
        }
        fn set_opt<T: Clone>(slot: &mut Option<T>, v: &Option<T>) {
            if v.is_some() {
                *slot = v.clone();
            }
        }
        set_opt(&mut cfg.preset, &self.preset);
        set_opt(&mut cfg.n, &self.n);
        set_opt(&mut cfg.m, &self.m);
        set_opt(&mut cfg.order, &self.order);
        set(&mut cfg.tolerances.ode, &self.ode_tol);
        set_opt(&mut cfg.tolerances.ode_b, &self.ode_tol_b);
        set(&mut cfg.tolerances.fit, &self.fit_tol);
        set(&mut cfg.tolerances.identity, &self.identity_tol);
        set_opt(&mut cfg.tolerances.floor, &self.floor);
        set(&mut cfg.window.t0, &self.t0);
        set(&mut cfg.window.t1, &self.t1);
        set(&mut cfg.window.points, &self.points);
        set(&mut cfg.seed, &self.seed);
        set_opt(&mut cfg.profile, &self.profile);
        set_opt(&mut cfg.resolution, &self.resolution);
        set_opt(&mut cfg.g_n, &self.g_n);
        set_opt(&mut cfg.g_n_b, &self.g_n_b);
        cfg.resolve_log |= self.resolve_log;
    }

    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        self.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(command: &Command) -> Result<bool> {
    let cfg = command.overrides().resolve()?;
    let outcome = match command {
        Command::FgExpand(_) => commands::fg_expand(&cfg)?,
        Command::Evolve(_) => commands::evolve(&cfg)?,
        Command::Constraints(_) => commands::constraints(&cfg)?,
        Command::Schwarzschild(_) => commands::schwarzschild(&cfg)?,
        Command::TorusExample(_) => commands::torus_example(&cfg)?,
        Command::Decay(_) => commands::decay(&cfg)?,
        Command::Verify(_) => commands::verify_suite()?,
    };
    let name = command.name();
    let json = report::to_json(&report::envelope(name, &cfg, outcome.result)?)?;
    let mut files = outcome.files;
    files.push((format!("{name}.json"), json.clone()));
    report::write_artifacts(&files)?;
    print!("{json}");
    Ok(outcome.success)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let body = serde_json::json!({ "error": report::ErrorReport::from(&e) });
            eprintln!("{body}");
            ExitCode::from(if e.is_rejection() || matches!(e, Error::Json(_)) { 2 } else { 1 })
        }
    }
}
