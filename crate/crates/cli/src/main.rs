use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use enclose_core::enclosure::ObstacleKind;
use enclose_core::gen::{generate, GenParams, Structure};
use enclose_core::io::{parse_instance, parse_solution, write_instance, write_solution, Method};
use enclose_core::solution::{check, solve, SolveOptions};
use enclose_core::{lp, svg, Error, Instance, ObstacleSet};

mod bench;

#[derive(Parser)]
#[command(name = "enclose", version, about = "Enclose point sets with few unit disks or segments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    UnitDisks,
    Segments,
}

#[derive(Clone, Copy, ValueEnum)]
enum StructureArg {
    Random,
    Ring,
    Nested,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Mincut,
    Lp,
    Exact,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Mincut => Method::Mincut,
            MethodArg::Lp => Method::Lp,
            MethodArg::Exact => Method::Exact,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 6)]
        obstacles: usize,
        #[arg(long, default_value_t = 1)]
        points: usize,
        #[arg(long, value_enum, default_value = "random")]
        structure: StructureArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance and write a verified solution.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to mincut for unit disks and lp for segments.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_retries: usize,
        /// Largest subset size tried by the exact method.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the LP model in a readable form (lp method only).
        #[arg(long)]
        dump_lp: Option<PathBuf>,
    },
    /// Check that a solution encloses every point.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Draw an instance, optionally with a solution, as SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        solution: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve every instance in a directory and report sizes and ratios.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compute the exact optimum only up to this many obstacles.
        #[arg(long, default_value_t = 14)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Exit code 1: the instance or solution fails; 2: the input is unusable.
enum Failure {
    Verification(anyhow::Error),
    Input(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::Infeasible(_) | Error::VerificationFailed(_) | Error::NoFiniteCut | Error::BudgetExceeded(_)) => {
                Failure::Verification(e)
            }
            Some(
                Error::Parse(_)
                | Error::InvalidInstance(_)
                | Error::DegenerateInput(..)
                | Error::DegenerateSegment(_)
                | Error::PointOnObstacle(_)
                | Error::PointCoveredByObstacle(_)
                | Error::MethodKindMismatch { .. },
            )
            | None => Failure::Input(e),
            Some(_) => Failure::Verification(e),
        }
    }
}

fn read_instance(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).map_err(anyhow::Error::from).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn infeasible_context(e: Error) -> anyhow::Error {
    match e {
        Error::Infeasible(i) => anyhow::Error::from(e).context(format!("point {i} cannot be enclosed")),
        other => other.into(),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Gen { kind, obstacles, points, structure, seed, out } => {
            let kind = match kind {
                KindArg::UnitDisks => ObstacleKind::UnitDisks,
                KindArg::Segments => ObstacleKind::Segments,
            };
            let structure = match structure {
                StructureArg::Random => Structure::Random,
                StructureArg::Ring => Structure::Ring,
                StructureArg::Nested => Structure::Nested,
            };
            let inst: Instance =
                generate(&GenParams { kind, obstacles, points, seed, structure }).map_err(|e| Failure::Verification(e.into()))?;
            emit(out.as_deref(), &write_instance(&inst))?;
        }
        Command::Solve { input, method, seed, max_retries, budget, out, dump_lp } => {
            let inst = read_instance(&input)?;
            let method = method.map(Method::from).unwrap_or(match inst.obstacles {
                ObstacleSet::UnitDisks(_) => Method::Mincut,
                ObstacleSet::Segments(_) => Method::Lp,
            });
            if let (Some(path), ObstacleSet::Segments(segs)) = (&dump_lp, &inst.obstacles) {
                if !inst.points.is_empty() {
                    let model = lp::build_lp(&inst.points, segs).map_err(anyhow::Error::from)?;
                    fs::write(path, model.dump()).with_context(|| format!("writing {}", path.display()))?;
                }
            }
            let opts = SolveOptions { seed, max_retries, budget: budget.unwrap_or(usize::MAX) };
            let sol = solve(&inst, method, &opts).map_err(infeasible_context)?;
            log::info!("{method}: {} obstacles selected", sol.objective);
            emit(out.as_deref(), &write_solution(&sol))?;
        }
        Command::Check { input, solution } => {
            let inst = read_instance(&input)?;
            let text = fs::read_to_string(&solution).with_context(|| format!("reading {}", solution.display()))?;
            let sol = parse_solution(&text).map_err(anyhow::Error::from)?;
            let verdicts = check(&inst, &sol).map_err(|e| Failure::Input(e.into()))?;
            for (i, ok) in verdicts.iter().enumerate() {
                println!("point {i}: {}", if *ok { "enclosed" } else { "NOT enclosed" });
            }
            if verdicts.iter().any(|ok| !ok) {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Render { input, solution, out } => {
            let inst = read_instance(&input)?;
            let selected = match solution {
                Some(path) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    let sol = parse_solution(&text).map_err(anyhow::Error::from)?;
                    sol.check_indices(inst.obstacles.len()).map_err(anyhow::Error::from)?;
                    Some(sol.selected)
                }
                None => None,
            };
            let drawing = svg::render(&inst, selected.as_deref()).map_err(anyhow::Error::from)?;
            emit(out.as_deref(), &drawing)?;
        }
        Command::Bench { dir, out, budget, seed } => {
            let report = bench::run(&dir, budget, seed).map_err(Failure::Input)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            emit(out.as_deref(), &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ENCLOSE_LOG", "error")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Verification(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
