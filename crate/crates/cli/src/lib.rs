//! The `cantorvis` command line: argument parsing, dispatch to
//! `cantorvis-core`, and report serialization.
//!
//! Exit status: 0 on success or a passing check, 1 when a check fails,
//! 2 on usage, input or I/O errors.

pub mod args;
pub mod report;
pub mod svg;

use std::path::PathBuf;

use cantorvis_core::{
    classify_k, d_outer_cover, gap_list, level_set, nss_evidence, prime_level_set,
    quotient::{base_hull, prime_quotient_cover},
    squared_level_set, sweep_merge, threshold_tests, verify_closed_interval_conditions,
    CantorParams, Interval, DEFAULT_RANK_CEILING,
};
use thiserror::Error;

pub use args::{Cli, Command, OutputFormat, PlotKind, VerifyCheck};
use report::{Payload, QuotientResult, ReportEnvelope, RequestEcho};
use svg::Layer;

/// Ceiling for pairwise quotient covers (`4^rank` pairs).
pub const QUOTIENT_RANK_CEILING: u32 = 10;
/// Ceiling for the merge sweep.
pub const J_MAX_CEILING: u32 = 10;
/// Ceiling for lattice checks (`grid^2` points).
pub const GRID_CEILING: u32 = 400;
/// Ceiling for `c_n` families.
pub const N_MAX_CEILING: u32 = 200;

pub const OUT_DIR_ENV: &str = "CANTORVIS_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] cantorvis_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// A rendered report.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub body: String,
    pub passed: bool,
    /// File stem used under the output directory.
    pub name: String,
    pub format: OutputFormat,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn ceiling(what: &str, value: u32, max: u32, force: bool) -> Result<(), CliError> {
    if value > max && !force {
        return Err(CliError::Usage(format!(
            "{what} {value} exceeds the ceiling {max}; pass --force to run anyway"
        )));
    }
    Ok(())
}

fn stem(sub: &str, p: &CantorParams) -> String {
    format!("{sub}-lambda-{}", p.lambda().to_string().replace('/', "_"))
}

fn unit() -> Interval {
    Interval::new(0.into(), 1.into()).expect("unit interval")
}

/// Run one command and render its report. Nothing is written here.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let fmt = cli.output;
    let out = fmt.extension();
    let force = cli.force;

    let (echo, payload, name, layers): (
        RequestEcho,
        Payload,
        String,
        Option<(Vec<Layer>, Interval)>,
    ) = match &cli.command {
        Command::Level {
            lambda,
            rank,
            prime,
        } => {
            ceiling("rank", *rank, DEFAULT_RANK_CEILING, force)?;
            let ls = if *prime {
                prime_level_set(lambda, *rank)
            } else {
                level_set(lambda, *rank)
            };
            let mut echo = RequestEcho::new("level", out);
            echo.lambda = Some(lambda.lambda().clone());
            echo.variant = Some(if *prime { "prime" } else { "full" });
            echo.rank = Some(*rank);
            let layer = Layer {
                set: ls.set.clone(),
                label: format!("rank {rank}"),
            };
            let hull = ls.hull();
            (
                echo,
                Payload::Level(ls),
                stem("level", lambda),
                Some((vec![layer], hull)),
            )
        }
        Command::Gaps { lambda, rank } => {
            ceiling("rank", *rank, DEFAULT_RANK_CEILING, force)?;
            let mut gaps = Vec::new();
            for k in 1..=*rank {
                gaps.extend(gap_list(lambda, k)?);
            }
            let mut echo = RequestEcho::new("gaps", out);
            echo.lambda = Some(lambda.lambda().clone());
            echo.rank = Some(*rank);
            (echo, Payload::Gaps(gaps), stem("gaps", lambda), None)
        }
        Command::Square { lambda, rank } => {
            ceiling("rank", *rank, DEFAULT_RANK_CEILING, force)?;
            let sq = squared_level_set(lambda, *rank);
            let mut echo = RequestEcho::new("square", out);
            echo.lambda = Some(lambda.lambda().clone());
            echo.rank = Some(*rank);
            let layer = Layer {
                set: sq.set.clone(),
                label: format!("squared rank {rank}"),
            };
            (
                echo,
                Payload::Square(sq),
                stem("square", lambda),
                Some((vec![layer], unit())),
            )
        }
        Command::Quotient {
            lambda,
            rank,
            window,
        } => {
            ceiling("rank", *rank, QUOTIENT_RANK_CEILING, force)?;
            let mut echo = RequestEcho::new("quotient", out);
            echo.lambda = Some(lambda.lambda().clone());
            echo.rank = Some(*rank);
            let (result, hull) = match window.as_deref() {
                Some([lo, hi]) => {
                    let w = Interval::new(lo.clone(), hi.clone())?;
                    echo.window = Some([lo.clone(), hi.clone()]);
                    let cover = d_outer_cover(lambda, *rank, &w)?;
                    let covered = cover
                        .set
                        .as_single()
                        .is_some_and(|part| part.contains_interval(&w));
                    (
                        QuotientResult {
                            cover,
                            window_covered: Some(covered),
                        },
                        w,
                    )
                }
                Some(_) => return Err(CliError::Usage("--window takes LO HI".into())),
                None => (
                    QuotientResult {
                        cover: prime_quotient_cover(lambda, *rank),
                        window_covered: None,
                    },
                    base_hull(lambda),
                ),
            };
            let layer = Layer {
                set: result.cover.set.clone(),
                label: format!("quotient rank {rank}"),
            };
            let layers = hull.length().is_positive().then(|| (vec![layer], hull));
            (
                echo,
                Payload::Quotient(result),
                stem("quotient", lambda),
                layers,
            )
        }
        Command::Visible {
            lambda,
            k,
            max_rank,
        } => {
            ceiling("max-rank", *max_rank, QUOTIENT_RANK_CEILING, force)?;
            let cert = classify_k(lambda, k, *max_rank)?;
            let mut echo = RequestEcho::new("visible", out);
            echo.lambda = Some(lambda.lambda().clone());
            echo.k = Some(k.clone());
            echo.max_rank = Some(*max_rank);
            (
                echo,
                Payload::Certificate(cert),
                stem("visible", lambda),
                None,
            )
        }
        Command::Verify { check } => {
            let mut echo = RequestEcho::new("verify", out);
            let (report, p, name) = match check {
                VerifyCheck::Merge { lambda, j_max } => {
                    ceiling("j-max", *j_max, J_MAX_CEILING, force)?;
                    echo.check = Some("merge");
                    echo.j_max = Some(*j_max);
                    (sweep_merge(lambda, *j_max)?, lambda, "verify-merge")
                }
                VerifyCheck::Nss { lambda, n_max } => {
                    ceiling("n-max", *n_max, N_MAX_CEILING, force)?;
                    echo.check = Some("nss");
                    echo.n_max = Some(*n_max);
                    (nss_evidence(lambda, *n_max)?, lambda, "verify-nss")
                }
                VerifyCheck::ClosedInterval { lambda, grid } => {
                    ceiling("grid", *grid, GRID_CEILING, force)?;
                    echo.check = Some("closed-interval");
                    echo.grid = Some(*grid);
                    (
                        verify_closed_interval_conditions(lambda, *grid)?,
                        lambda,
                        "verify-closed-interval",
                    )
                }
            };
            echo.lambda = Some(p.lambda().clone());
            (echo, Payload::Verification(report), stem(name, p), None)
        }
        Command::Thresholds { lambda } => {
            let mut echo = RequestEcho::new("thresholds", out);
            echo.lambda = Some(lambda.lambda().clone());
            (
                echo,
                Payload::Verification(threshold_tests(lambda)),
                stem("thresholds", lambda),
                None,
            )
        }
        Command::Plot { lambda, what, rank } => {
            if fmt != OutputFormat::Svg {
                return Err(CliError::Usage("plot only writes --output svg".into()));
            }
            let (layers, hull) = plot_layers(lambda, *what, *rank, force)?;
            let body = svg::render(&layers, &hull)?;
            let kind = match what {
                PlotKind::Level => "level",
                PlotKind::Prime => "prime",
                PlotKind::Square => "square",
                PlotKind::Quotient => "quotient",
            };
            return Ok(Outcome {
                body,
                passed: true,
                name: stem(&format!("plot-{kind}"), lambda),
                format: fmt,
            });
        }
    };

    let passed = payload.passed();
    let body = match fmt {
        OutputFormat::Json => ReportEnvelope::new(echo, payload).to_json()?,
        OutputFormat::Csv => ReportEnvelope::new(echo, payload).to_csv()?,
        OutputFormat::Svg => match layers {
            Some((layers, hull)) => svg::render(&layers, &hull)?,
            None => {
                return Err(CliError::Usage(format!(
                    "{} has no SVG rendering; use json or csv",
                    echo.subcommand
                )))
            }
        },
    };
    Ok(Outcome {
        body,
        passed,
        name,
        format: fmt,
    })
}

fn plot_layers(
    p: &CantorParams,
    what: PlotKind,
    rank: u32,
    force: bool,
) -> Result<(Vec<Layer>, Interval), CliError> {
    let max = match what {
        PlotKind::Quotient => QUOTIENT_RANK_CEILING,
        _ => DEFAULT_RANK_CEILING,
    };
    ceiling("rank", rank, max, force)?;
    Ok(match what {
        PlotKind::Level => (
            (0..=rank)
                .map(|n| Layer {
                    set: level_set(p, n).set,
                    label: format!("rank {n}"),
                })
                .collect(),
            unit(),
        ),
        PlotKind::Prime => (
            (0..=rank)
                .map(|n| Layer {
                    set: prime_level_set(p, n).set,
                    label: format!("prime rank {n}"),
                })
                .collect(),
            p.prime_hull(),
        ),
        PlotKind::Square => (
            (1..=rank.max(1))
                .map(|n| Layer {
                    set: squared_level_set(p, n).set,
                    label: format!("squared rank {n}"),
                })
                .collect(),
            unit(),
        ),
        PlotKind::Quotient => (
            (0..=rank)
                .map(|n| Layer {
                    set: prime_quotient_cover(p, n).set,
                    label: format!("quotient rank {n}"),
                })
                .collect(),
            base_hull(p),
        ),
    })
}

/// Where the report goes: `--out`, else `$CANTORVIS_OUT_DIR/<name>.<ext>`,
/// else stdout (`None`).
pub fn destination(cli: &Cli, outcome: &Outcome) -> Option<PathBuf> {
    if let Some(path) = &cli.out_path {
        return Some(path.clone());
    }
    std::env::var_os(OUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|dir| {
            PathBuf::from(dir).join(format!("{}.{}", outcome.name, outcome.format.extension()))
        })
}

/// Run, write the report, and return the process exit code.
pub fn main_with(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(outcome) => {
            let written = match destination(cli, &outcome) {
                Some(path) => std::fs::write(&path, &outcome.body).map_err(CliError::from),
                None => {
                    use std::io::Write;
                    std::io::stdout()
                        .write_all(outcome.body.as_bytes())
                        .map_err(CliError::from)
                }
            };
            match written {
                Ok(()) => outcome.exit_code(),
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
