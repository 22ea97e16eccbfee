#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use hyperfill::solver::Method;

use config::{RunConfig, SpaceSource};

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Assertion(String),
    #[error("{0}")]
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl From<hyperfill::Error> for Failure {
    fn from(e: hyperfill::Error) -> Self {
        use hyperfill::Error as E;
        match e {
            E::NotConverged { .. } | E::Degenerate(_) | E::Unbounded(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "hyperfill", version, about = "Dirichlet problems on hyperbolic fillings of sampled metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an example space to `<out>/space.json`.
    Generate(Common),
    /// Build (or reuse) the nets and filling for a space.
    Build(Common),
    /// Solve the Dirichlet problem described by a problem file.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Problem JSON with p, theta and the f/G CSV paths.
        #[arg(long)]
        problem: PathBuf,
    },
    /// Run one property suite and write its report.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        suite: String,
        /// Feed the comparison suite data that violates its hypothesis.
        #[arg(long)]
        inject_violation: bool,
    },
    /// Capacity scaling and Wiener ratios around a boundary sample.
    Capacity {
        #[command(flatten)]
        common: Common,
        /// Index of the center among the boundary samples.
        #[arg(long, default_value_t = 0)]
        center: usize,
    },
    /// Boundary error of the homogeneous solution across filling depths.
    Kellogg {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
        depths: Vec<usize>,
        /// Boundary data as `id,value` CSV; defaults to the first coordinate.
        #[arg(long)]
        f: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Generator name or path to a space JSON file.
    #[arg(long, default_value = "interval")]
    space: String,
    /// Generator depth.
    #[arg(long, default_value_t = 6)]
    depth: u32,
    #[arg(long, default_value_t = 3.0)]
    alpha: f64,
    #[arg(long, default_value_t = 3.0)]
    tau: f64,
    /// Finest filling level N (default: matched to the sample resolution).
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 0.75)]
    theta: f64,
    #[arg(long)]
    sigma: Option<f64>,
    /// Width of the pinned band next to the boundary.
    #[arg(long)]
    band: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value = "auto")]
    method: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl Common {
    fn config(&self) -> Result<RunConfig, Failure> {
        let method: Method = self.method.parse()?;
        let config = RunConfig {
            space: SpaceSource::parse(&self.space, self.depth),
            alpha: self.alpha,
            tau: self.tau,
            levels: self.levels,
            p: self.p,
            theta: self.theta,
            sigma: self.sigma,
            band_width: self.band,
            tol: self.tol,
            max_iter: self.max_iter,
            method,
            seed: self.seed,
            out: self.out.clone(),
        };
        config.validate_geometry()?;
        Ok(config)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate(c) => commands::generate(&c.config()?),
        Command::Build(c) => commands::build(&c.config()?),
        Command::Solve { common, problem } => commands::solve(&common.config()?, &problem),
        Command::Check { common, suite, inject_violation } => commands::check(&common.config()?, &suite, inject_violation),
        Command::Capacity { common, center } => commands::capacity(&common.config()?, center),
        Command::Kellogg { common, depths, f } => commands::kellogg(&common.config()?, &depths, f.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
