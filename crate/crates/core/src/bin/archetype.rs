use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use archetype::geometry::{convex_hull_2d, PointSet};
use archetype::harness::experiments::summary_lines;
use archetype::harness::svg::{Bounds, Figure, ARCHETYPE_HULL, DATA_HULL};
use archetype::harness::verify::run_verify;
use archetype::harness::{run_experiment, write_artifacts, ExperimentConfig};
use archetype::samplers::{fmt_f64, load_csv, save_csv};
use archetype::solver::{fit, AaProblem, Init, SolverConfig};
use archetype::{Error, Matrix};

const EXIT_VERIFY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "archetype", version, about = "Archetypal analysis by alternating minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit archetypes to points read from a CSV file (one point per row).
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        max_iters: usize,
        /// `random`, or a CSV file with one starting archetype per row.
        #[arg(long, default_value = "random")]
        init: String,
        /// Output directory (default `out/fit/seed-<seed>`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the four planar experiments.
    Example {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        id: u8,
        /// Flat `key = value` file overriding the defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default `out/example<id>/seed-<seed>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Smaller samples and fewer repeats.
        #[arg(long)]
        quick: bool,
    },
    /// Run the oracle and property self-checks.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SolverAbort(_) | Error::NoConvergence { .. } => EXIT_SOLVER,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit {
            data,
            k,
            alpha,
            tol,
            tau,
            seed,
            max_iters,
            init,
            out,
        } => {
            let out = out.unwrap_or_else(|| Path::new("out").join("fit").join(format!("seed-{seed}")));
            cmd_fit(&data, k, alpha, tol, tau, seed, max_iters, &init, &out)
        }
        Command::Example {
            id,
            config,
            repeats,
            seed,
            out,
            quick,
        } => cmd_example(id, config.as_deref(), repeats, seed, out, quick),
        Command::Verify { seed } => {
            let report = run_verify(seed);
            for line in report.lines() {
                println!("{line}");
            }
            if report.passed() {
                return ExitCode::SUCCESS;
            }
            eprintln!("failed: {}", report.failures().join(", "));
            return ExitCode::from(EXIT_VERIFY);
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_fit(data: &Path, k: usize, alpha: f64, tol: f64, tau: f64, seed: u64, max_iters: usize, init: &str, out: &Path) -> archetype::Result<()> {
    let x = load_csv(data)?;
    let init = if init == "random" {
        Init::RandomDataPoints
    } else {
        let z = load_csv(init)?;
        if z.rows() != x.rows() || z.cols() != k {
            return Err(Error::Dimension(format!(
                "initial archetypes: expected {k} rows of dimension {}, got {} rows of dimension {}",
                x.rows(),
                z.cols(),
                z.rows()
            )));
        }
        Init::Archetypes(z)
    };
    let mut cfg = SolverConfig {
        tol,
        max_iters,
        seed,
        init,
        ..SolverConfig::default()
    };
    cfg.pgd.tau = tau;
    let p = AaProblem::new(x.clone(), k, alpha)?;
    let report = fit(&p, &cfg)?;
    std::fs::create_dir_all(out)?;
    save_csv(out.join("archetypes.csv"), report.archetypes(), None)?;
    let mut trace = String::from("iteration,objective\n");
    for (i, f) in report.objective_trace.iter().enumerate() {
        trace.push_str(&format!("{i},{}\n", fmt_f64(*f)));
    }
    std::fs::write(out.join("trace.csv"), trace)?;
    if x.rows() == 2 {
        std::fs::write(out.join("fit.svg"), fit_figure(&x, report.archetypes())?)?;
    }
    println!(
        "{} iterations, converged: {}, objective {:.10}, {:.3} s",
        report.iterations,
        report.converged,
        report.final_objective(),
        report.wall_time.as_secs_f64()
    );
    if report.skipped_updates > 0 {
        eprintln!("warning: {} archetype updates skipped (row of B without mass)", report.skipped_updates);
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn fit_figure(x: &Matrix, z: &Matrix) -> archetype::Result<String> {
    let hull = convex_hull_2d(&PointSet::new(x.clone())?)?;
    let pts: Vec<[f64; 2]> = x.columns().take(3000).map(|p| [p[0], p[1]]).collect();
    let mut f = Figure::new(520.0, 520.0, Bounds::of_points(pts.iter().copied().chain(hull.vertices().iter().copied()))).equal_aspect();
    f.points(&pts, "steelblue", 1.0);
    f.polygon(&hull, DATA_HULL, 1.5);
    let zs: Vec<[f64; 2]> = z.columns().map(|p| [p[0], p[1]]).collect();
    f.polygon(&convex_hull_2d(&PointSet::new(z.clone())?)?, ARCHETYPE_HULL, 2.0);
    f.points(&zs, ARCHETYPE_HULL, 3.0);
    Ok(f.render())
}

fn cmd_example(id: u8, config: Option<&Path>, repeats: Option<usize>, seed: Option<u64>, out: Option<PathBuf>, quick: bool) -> archetype::Result<()> {
    let mut cfg = ExperimentConfig::defaults(id, quick)?;
    if let Some(path) = config {
        cfg.apply_file(path)?;
    }
    if let Some(r) = repeats {
        cfg.repeats = r;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let dir = out.unwrap_or_else(|| cfg.default_out_dir());
    let res = run_experiment(&cfg)?;
    write_artifacts(&res, &dir)?;
    for line in summary_lines(&res) {
        println!("{line}");
    }
    println!("wrote {}", dir.display());
    Ok(())
}
