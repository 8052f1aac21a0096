// SPDX-License-Identifier: Apache-2.0

//! `cheb-lab`: sieving, zero computation, Chebotarev censuses and
//! discrepancy mean squares from the command line.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 uncertified zeros,
//! 4 a violated exact identity, 1 anything else (I/O).

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{execute, DEGENERATE_WARNING};
pub use config::{CommandKind, RunConfig, Statistic};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "cheb-lab", version, about = "Chebotarev sets, discrepancies and explicit-formula mean squares")]
pub struct Cli {
    /// Cache directory for prime tables and zero files (default: $CHEB_CACHE_DIR).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Print the run configuration in key = value form and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Isolate zeros of a primitive Dirichlet L-function on the critical line.
    Zeros {
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        index: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// List the extensions that Frobenius sets can be built from.
    Catalog,
    /// Frobenius class frequencies against |C|/|G|.
    Census {
        #[arg(long)]
        ext: Option<String>,
        #[arg(long)]
        x: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Empirical and predicted mean squares of a set's discrepancy.
    MeanSquare {
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        reference: Option<String>,
        #[arg(long, value_parser = clap::value_parser!(Statistic))]
        statistic: Option<Statistic>,
        #[command(flatten)]
        common: Common,
    },
    /// P_odd against a genuine Chebotarev set, side by side.
    Witness {
        #[arg(long)]
        control: Option<String>,
        #[arg(long)]
        reference: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Both sides of the Dirichlet-series identity for a residue set.
    DirichletCheck {
        #[arg(long)]
        set: Option<String>,
        /// Complex point with Re s >= 1.5, e.g. `2` or `2+1i`.
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        x_cut: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Replay a saved key = value configuration.
    Run { file: PathBuf },
}

impl clap::builder::ValueParserFactory for Statistic {
    type Parser = clap::builder::ValueParser;

    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<Statistic>())
    }
}

#[derive(Debug, Args, Default)]
pub struct Common {
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub height: Option<f64>,
    /// y-step of the mean-square quadrature.
    #[arg(long)]
    pub step: Option<f64>,
    /// Proceed with zero sets that failed certification (exit code 3 still reported).
    #[arg(long)]
    pub allow_uncertified: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

impl Common {
    fn apply(self, cfg: &mut RunConfig) {
        cfg.x_max = self.x_max;
        cfg.height = self.height;
        cfg.step = self.step;
        cfg.allow_uncertified = self.allow_uncertified;
        cfg.out = self.out;
        cfg.csv = self.csv;
        cfg.json = self.json;
    }
}

impl Cli {
    /// Resolves the command line into a run configuration.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let mut cfg = match self.command {
            Command::Run { file } => {
                let text = std::fs::read_to_string(&file)
                    .map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
                text.parse::<RunConfig>()?
            }
            Command::Catalog => RunConfig::new(CommandKind::Catalog),
            Command::Zeros { q, index, common } => {
                let mut c = RunConfig::new(CommandKind::Zeros);
                common.apply(&mut c);
                c.q = q;
                c.index = index;
                c
            }
            Command::Census { ext, x, common } => {
                let mut c = RunConfig::new(CommandKind::Census);
                common.apply(&mut c);
                c.ext = ext;
                c.x = x;
                c
            }
            Command::MeanSquare { set, reference, statistic, common } => {
                let mut c = RunConfig::new(CommandKind::MeanSquare);
                common.apply(&mut c);
                c.set = set;
                c.reference = reference;
                c.statistic = statistic;
                c
            }
            Command::Witness { control, reference, common } => {
                let mut c = RunConfig::new(CommandKind::Witness);
                common.apply(&mut c);
                c.control = control;
                c.reference = reference;
                c
            }
            Command::DirichletCheck { set, s, x_cut, common } => {
                let mut c = RunConfig::new(CommandKind::DirichletCheck);
                common.apply(&mut c);
                c.set = set;
                c.s = s;
                c.x_cut = x_cut;
                c
            }
        };
        if self.cache_dir.is_some() {
            cfg.cache_dir = self.cache_dir;
        }
        Ok(cfg)
    }
}

/// Runs a parsed command line, writing the report to `out`. Returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let dump = cli.dump_config;
    let result = cli.into_config().and_then(|cfg| {
        if dump {
            write!(out, "{cfg}")?;
            Ok(())
        } else {
            execute(&cfg, out)
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
