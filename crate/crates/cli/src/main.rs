//! `croft`: batch front-end for the crofton workbench.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser, serde::Serialize)]
#[command(name = "croft", version, about = "Quermassintegrals, Minkowski valuations and volume-product inequalities")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct Common {
    /// Seed of every random stream; mandatory for Monte Carlo commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Grassmannian samples per Kubota mean.
    #[arg(long, global = true, default_value_t = 200_000)]
    pub samples: usize,
    /// Coarse and fine sphere-grid resolutions (32 64 for n = 3, lighter above).
    #[arg(long, global = true, num_args = 2, value_names = ["COARSE", "FINE"])]
    pub grid: Option<Vec<usize>>,
    /// Product-rule degree of orbit averages in Crofton evaluations.
    #[arg(long, global = true, default_value_t = 6)]
    pub orbit_degree: usize,
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    /// CSV destination (stdout when absent).
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// JSON run manifest destination (defaults to <out>.manifest.json when --out is given).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand, serde::Serialize)]
pub enum Command {
    /// W and A for every body and degree.
    Quermass {
        #[arg(long)]
        bodies: PathBuf,
        /// Projection dimensions (default 1..n-1).
        #[arg(long, value_delimiter = ',')]
        i: Vec<usize>,
    },
    /// The three chain quantities for every (body, valuation) pair.
    Chain {
        #[arg(long)]
        bodies: PathBuf,
        #[arg(long)]
        specs: PathBuf,
        /// Accept valuations without a nonnegative Crofton measure and check only the left inequality.
        #[arg(long)]
        left_only: bool,
    },
    /// Classification of the profiles 1 + α P_2 over an α grid.
    LalphaScan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        i: usize,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Sign of the Crofton density of generating-function valuations.
    CroftonCheck {
        #[arg(long)]
        specs: PathBuf,
        #[arg(long, default_value_t = 1000)]
        resolution: usize,
    },
    /// Support values of ΦK on the fine grid.
    Apply {
        #[arg(long)]
        bodies: PathBuf,
        #[arg(long)]
        specs: PathBuf,
    },
    /// Polar volumes and volume products of bodies.
    PolarVolume {
        #[arg(long)]
        bodies: PathBuf,
    },
    /// Derivative-free search over bodies of revolution.
    Optimize {
        #[arg(long)]
        specs: PathBuf,
        /// Section id of the valuation.
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::MaxPolarProduct)]
        objective: ObjectiveArg,
        /// Legendre band limit of the profile.
        #[arg(long, default_value_t = 24)]
        degree: usize,
        #[arg(long, default_value_t = 4)]
        multistarts: usize,
        /// Objective evaluations over all starts.
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        #[arg(long, default_value_t = 0.1)]
        init_scale: f64,
        /// Where to write the best body.
        #[arg(long)]
        best: Option<PathBuf>,
    },
    /// Monotonicity class of the degree-1 valuation h(K,·) ∗ μ.
    Classify {
        #[arg(long)]
        n: usize,
        /// Legendre coefficients of the density of μ.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        density: Vec<f64>,
        /// Circle atoms as t:w.
        #[arg(long, allow_hyphen_values = true)]
        atom: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, serde::Serialize)]
pub enum ObjectiveArg {
    MaxPolarProduct,
    MinNonpolarRatio,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(commands::Outcome::Ok) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Violated(msg)) => {
            eprintln!("croft: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("croft: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
