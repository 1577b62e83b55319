mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "superw", version, about = "Build and verify finite W-superalgebra generators from pyramids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the triple, e, h, rho, row lengths and centralizer dimension.
    Describe {
        #[command(flatten)]
        common: Common,
    },
    /// Dump the generators of a shape as JSON.
    Generators {
        #[command(flatten)]
        common: Common,
        #[arg(long, env = "SUPERW_SHAPE", default_value = "min")]
        shape: String,
        #[arg(long, env = "SUPERW_RMAX", default_value_t = 4)]
        rmax: usize,
    },
    /// Run one verification suite, or all of them.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, env = "SUPERW_SUITE", value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, env = "SUPERW_SHAPE", default_value = "min")]
        shape: String,
        /// Superscript bound for invariance, series orders, psi and baby.
        #[arg(long, env = "SUPERW_RMAX", default_value_t = 4)]
        rmax: usize,
        /// Filtration degree bound for PBW ranks and injectivity probes.
        #[arg(long, env = "SUPERW_DMAX", default_value_t = 3)]
        dmax: usize,
        /// Degree bound r+s+t for relation instances.
        #[arg(long, env = "SUPERW_BOUND", default_value_t = 6)]
        bound: usize,
        /// Replace computed generators by the entries of a dump.
        #[arg(long, env = "SUPERW_GENERATORS")]
        generators: Option<PathBuf>,
        /// Row-shifted pyramid for the iota suite.
        #[arg(long, env = "SUPERW_SHIFTED")]
        shifted: Option<PathBuf>,
        /// Block to split and where, as `p,x`, for the refine suite.
        #[arg(long, env = "SUPERW_SPLIT")]
        split: Option<String>,
        /// Check only this many relation instances, drawn with `--seed`.
        #[arg(long, env = "SUPERW_SAMPLE")]
        sample: Option<usize>,
        #[arg(long, env = "SUPERW_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "SUPERW_JOBS", default_value_t = 0)]
        jobs: usize,
        /// Evaluate checks one after another.
        #[arg(long, env = "SUPERW_SEQUENTIAL")]
        sequential: bool,
    },
}

#[derive(Args, Debug)]
pub struct Common {
    #[arg(long, env = "SUPERW_PYRAMID")]
    pub pyramid: PathBuf,
    #[arg(long, env = "SUPERW_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, env = "SUPERW_FORMAT", value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Relations,
    Invariance,
    Truncation,
    Pbw,
    Psi,
    Baby,
    TSeries,
    Refine,
    Roots,
    Iota,
    Eval,
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
