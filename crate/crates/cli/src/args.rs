use std::path::PathBuf;

use cantorvis_core::{CantorParams, Scalar};
use clap::{Parser, Subcommand, ValueEnum};

/// Exact-rational level sets, quotient covers and visibility certificates
/// for middle Cantor sets.
///
/// Rationals are given as `p/q`, integers, or finite decimals (`0.3` is read
/// as exactly 3/10). Reports are written to `--out`, or to
/// `$CANTORVIS_OUT_DIR/<name>` when that variable is set, or to stdout.
#[derive(Parser, Debug, Clone)]
#[command(name = "cantorvis", version, about, long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,

    /// Report file path.
    #[arg(long = "out", global = true)]
    pub out_path: Option<PathBuf>,

    /// Allow ranks above the built-in ceilings.
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Basic intervals of rank n.
    Level {
        #[arg(long, value_parser = parse_lambda)]
        lambda: CantorParams,
        #[arg(long)]
        rank: u32,
        /// Approximate F' = f1(F) instead of F.
        #[arg(long)]
        prime: bool,
    },
    /// Gaps removed in construction steps 1..=rank.
    Gaps {
        #[arg(long, value_parser = parse_lambda)]
        lambda: CantorParams,
        #[arg(long)]
        rank: u32,
    },
    /// Rank-n outer cover of the squared Cantor set.
    Square {
        #[arg(long, value_parser = parse_lambda)]
        lambda: CantorParams,
        #[arg(long)]
        rank: u32,
    },
    /// Rank-n cover of x^2/y over F' x F', or of D inside a window.
    Quotient {
        #[arg(long, value_parser = parse_lambda)]
        lambda: CantorParams,
        #[arg(long)]
        rank: u32,
        /// Window LO HI (both positive) for a cover of D.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], value_parser = parse_scalar)]
        window: Option<Vec<Scalar>>,
    },
    /// Certificate for whether the line y = k x is visible.
    Visible {
        #[arg(long, value_parser = parse_lambda)]
        lambda: CantorParams,
        #[arg(long, value_parser = parse_scalar)]
        k: Scalar,
        #[arg(long, default_value_t = 10)]
        max_rank: u32,
    },
    /// Exact checks of the merge, squared-gap and closed-interval conditions.
    Verify {
        #[command(subcommand)]
        check: VerifyCheck,
    },
    /// Where lambda sits relative to 1/3, alpha and (2 - sqrt 2)/2.
    Thresholds {
        #[arg(long, value_parser = parse_lambda)]
        lambda: CantorParams,
    },
    /// SVG band diagram of ranks 0..=rank (1..=rank for `square`).
    Plot {
        #[arg(long, value_parser = parse_lambda)]
        lambda: CantorParams,
        #[arg(long, value_enum)]
        what: PlotKind,
        #[arg(long)]
        rank: u32,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum VerifyCheck {
    /// Merge orderings over all endpoint pairs of rank 1..=j-max.
    Merge {
        #[arg(long, value_parser = parse_lambda)]
        lambda: CantorParams,
        #[arg(long, default_value_t = 5)]
        j_max: u32,
    },
    /// Squared-gap facts: c_n decrease, case-2 residual, largest gap.
    Nss {
        #[arg(long, value_parser = parse_lambda)]
        lambda: CantorParams,
        #[arg(long, default_value_t = 20)]
        n_max: u32,
    },
    /// Perfect-square identities and slope band on a lattice.
    ClosedInterval {
        #[arg(long, value_parser = parse_lambda)]
        lambda: CantorParams,
        #[arg(long, default_value_t = 50)]
        grid: u32,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Svg,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Svg => "svg",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Level,
    Prime,
    Square,
    Quotient,
}

pub fn parse_scalar(s: &str) -> Result<Scalar, String> {
    s.parse::<Scalar>().map_err(|e| e.to_string())
}

pub fn parse_lambda(s: &str) -> Result<CantorParams, String> {
    CantorParams::new(parse_scalar(s)?).map_err(|e| e.to_string())
}
