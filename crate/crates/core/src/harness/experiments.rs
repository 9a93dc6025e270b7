//! The four planar experiments: growing disk samples, penalty sweeps on a
//! normal and an annular sample, and initialization studies.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use super::config::{Distribution, ExperimentConfig};
use super::svg::{grid, Bounds, Figure, ARCHETYPE_HULL, DATA_HULL};
use crate::error::{Error, Result};
use crate::geometry::{contains, convex_hull_2d, d2_infty, dist_to_hull, interior_angles, polygon_area, PointSet, Polygon2D};
use crate::numkernel::Matrix;
use crate::oracle::{d2_infty_to_regular_polygon, optimal_objective_sq};
use crate::samplers::{fmt_f64, rng_for, sample_stream, save_csv, DistributionSpec};
use crate::solver::{fit, AaProblem, FitReport, SolverConfig};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "ARCHETYPE_THREADS";

/// Points drawn in scatter figures; the sample is iid, so a prefix is a
/// fair thinning.
const MAX_PLOTTED_POINTS: usize = 3_000;

/// One fit in an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    /// Sub-study label, e.g. `sweep` or `robust`.
    pub group: String,
    pub n: usize,
    pub alpha: f64,
    pub repeat: usize,
    pub seed: u64,
    pub objective: f64,
    pub area: f64,
    pub min_angle: f64,
    pub max_angle: f64,
    /// Distance to the best-rotated disk optimum (uniform-disk data, k ≥ 3).
    pub d2inf_to_oracle: Option<f64>,
    pub contains_mean: bool,
    /// Distance from the population mean to the archetype hull.
    pub mean_distance: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest increase between consecutive objective values (≤ 0 when
    /// the trace is non-increasing).
    pub max_trace_rise: f64,
    pub max_violation: f64,
    pub skipped_updates: usize,
    pub wall_time: Duration,
}

impl TrialRow {
    fn sort_key(&self) -> (&str, usize, u64, usize) {
        (&self.group, self.n, self.alpha.to_bits(), self.repeat)
    }
}

/// Iterates of one fit for the snapshot figures.
#[derive(Debug, Clone)]
pub struct SnapshotRun {
    pub title: String,
    pub data_hull: Polygon2D,
    pub mean: [f64; 2],
    /// `(iteration, archetypes)`; the last entry is the final iterate.
    pub frames: Vec<(usize, Matrix)>,
    pub archetypes: Matrix,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub rows: Vec<TrialRow>,
    pub snapshots: Vec<SnapshotRun>,
    /// `(init a, init b, d₂,∞)` between final archetype sets of a robustness run.
    pub pairwise: Vec<(String, usize, usize, f64)>,
    /// Sample means per data set, keyed by group.
    pub sample_means: Vec<(String, [f64; 2])>,
    /// A representative final fit (data prefix, hull, archetypes) for the
    /// overlay figure.
    pub overlay: Option<(Matrix, Matrix)>,
    pub wall_time: Duration,
}

/// Worker pool honouring [`THREADS_ENV`].
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::invalid(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))
}

/// Independent per-trial seed derived from the experiment seed.
fn derived_seed(base: u64, tag: u64) -> u64 {
    rng_for(base, (1 << 40) | tag).random()
}

/// Area and extreme interior angles (degrees) of the archetype hull.
/// A degenerate hull has area 0 and angles 0 and 180.
pub fn hull_shape(z: &Matrix) -> Result<(Polygon2D, f64, f64, f64)> {
    let poly = convex_hull_2d(&PointSet::new(z.clone())?)?;
    if poly.len() < 3 {
        return Ok((poly, 0.0, 0.0, 180.0));
    }
    let angles = interior_angles(&poly)?;
    let min = angles.iter().copied().fold(f64::INFINITY, f64::min);
    let max = angles.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((poly.clone(), polygon_area(&poly), min, max))
}

struct TrialSpec<'a> {
    group: String,
    /// Full sample; the trial fits its first `n` points.
    data: &'a Matrix,
    n: usize,
    k: usize,
    alpha: f64,
    repeat: usize,
    solver: SolverConfig,
    mean: [f64; 2],
    disk_oracle: bool,
}

fn run_trial(t: &TrialSpec) -> Result<(TrialRow, FitReport)> {
    let start = Instant::now();
    let k = t.k;
    let x = if t.n == t.data.cols() {
        t.data.clone()
    } else {
        t.data.select_columns(&(0..t.n).collect::<Vec<_>>())
    };
    let p = AaProblem::new(x, k, t.alpha)?;
    let report = fit(&p, &t.solver)?;
    let z = report.archetypes();
    let (poly, area, min_angle, max_angle) = hull_shape(z)?;
    let d2inf_to_oracle = if t.disk_oracle && k >= 3 {
        Some(d2_infty_to_regular_polygon(&PointSet::new(z.clone())?)?.0)
    } else {
        None
    };
    let max_trace_rise = report
        .objective_trace
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let row = TrialRow {
        group: t.group.clone(),
        n: t.n,
        alpha: t.alpha,
        repeat: t.repeat,
        seed: t.solver.seed,
        objective: report.final_objective(),
        area,
        min_angle,
        max_angle,
        d2inf_to_oracle,
        contains_mean: contains(&poly, t.mean),
        mean_distance: dist_to_hull(t.mean, &poly),
        iterations: report.iterations,
        converged: report.converged,
        max_trace_rise: if max_trace_rise.is_finite() { max_trace_rise } else { 0.0 },
        max_violation: report.state.max_simplex_violation(),
        skipped_updates: report.skipped_updates,
        wall_time: start.elapsed(),
    };
    Ok((row, report))
}

fn mean2(spec: &DistributionSpec) -> [f64; 2] {
    let m = spec.mean();
    [m[0], m[1]]
}

fn sample_mean2(x: &Matrix) -> [f64; 2] {
    let m = x.column_mean();
    [m[0], m[1]]
}

fn run_parallel<'a>(trials: &[TrialSpec<'a>], keep: impl Fn(&TrialSpec<'a>) -> bool + Sync) -> Result<Vec<(TrialRow, Option<FitReport>)>> {
    let pool = thread_pool()?;
    pool.install(|| {
        trials
            .par_iter()
            .map(|t| {
                let (row, rep) = run_trial(t)?;
                Ok((row, keep(t).then_some(rep)))
            })
            .collect()
    })
}

/// Runs the configured experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let mut result = match cfg.experiment {
        1 => run_growing_n(cfg)?,
        2 | 3 => run_sweep(cfg)?,
        4 => run_mixture(cfg)?,
        id => return Err(Error::invalid(format!("unknown experiment {id}"))),
    };
    result.rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    result.wall_time = start.elapsed();
    Ok(result)
}

fn empty_result(cfg: &ExperimentConfig) -> ExperimentResult {
    ExperimentResult {
        config: cfg.clone(),
        rows: Vec::new(),
        snapshots: Vec::new(),
        pairwise: Vec::new(),
        sample_means: Vec::new(),
        overlay: None,
        wall_time: Duration::ZERO,
    }
}

/// Nested samples: repeat `r` uses stream `r`, and size `N` its first `N`
/// points.
fn run_growing_n(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let spec = &cfg.specs()[0];
    let n_max = *cfg.ns.iter().max().expect("validated nonempty");
    let full: Vec<Matrix> = (0..cfg.repeats)
        .map(|r| sample_stream(spec, n_max, cfg.seed, r as u64))
        .collect::<Result<_>>()?;
    let mut trials = Vec::new();
    for (r, x) in full.iter().enumerate() {
        for (j, &n) in cfg.ns.iter().enumerate() {
            for &alpha in &cfg.alphas {
                trials.push(TrialSpec {
                    group: "growing-n".into(),
                    data: x,
                    n,
                    k: cfg.k,
                    alpha,
                    repeat: r,
                    solver: cfg.solver(derived_seed(cfg.seed, ((r as u64) << 20) | j as u64)),
                    mean: mean2(spec),
                    disk_oracle: cfg.distribution == Distribution::UniformDisk,
                });
            }
        }
    }
    let out = run_parallel(&trials, |t| t.repeat == 0 && t.n == n_max)?;
    let mut result = empty_result(cfg);
    for (row, rep) in out {
        if let Some(rep) = rep {
            result.overlay = Some((full[0].clone(), rep.archetypes().clone()));
        }
        result.rows.push(row);
    }
    result.sample_means.push(("growing-n".into(), sample_mean2(&full[0])));
    Ok(result)
}

fn snapshot_run(title: String, x: &Matrix, mean: [f64; 2], rep: &FitReport, wanted: &[usize]) -> Result<SnapshotRun> {
    let mut frames: Vec<(usize, Matrix)> = wanted
        .iter()
        .filter(|&&i| i < rep.history.len())
        .map(|&i| (i, rep.history[i].clone()))
        .collect();
    let last = rep.history.len().saturating_sub(1);
    if frames.last().is_none_or(|(i, _)| *i != last) {
        frames.push((last, rep.archetypes().clone()));
    }
    Ok(SnapshotRun {
        title,
        data_hull: convex_hull_2d(&PointSet::new(x.clone())?)?,
        mean,
        frames,
        archetypes: rep.archetypes().clone(),
    })
}

/// Fits from `inits` random initializations at `alpha`, keeping iterates.
fn robustness(cfg: &ExperimentConfig, group: &str, tag: u64, x: &Matrix, mean: [f64; 2], alpha: f64, result: &mut ExperimentResult) -> Result<()> {
    let trials: Vec<TrialSpec> = (0..cfg.inits)
        .map(|i| {
            let mut solver = cfg.solver(derived_seed(cfg.seed, (tag << 32) | (1 << 24) | i as u64));
            solver.keep_history = true;
            TrialSpec {
                group: group.to_string(),
                data: x,
                n: x.cols(),
                k: cfg.k,
                alpha,
                repeat: i,
                solver,
                mean,
                disk_oracle: false,
            }
        })
        .collect();
    let out = run_parallel(&trials, |_| true)?;
    let mut finals = Vec::new();
    for (row, rep) in out {
        let rep = rep.expect("kept");
        result.snapshots.push(snapshot_run(format!("{group}, init {}", row.repeat), x, mean, &rep, &cfg.snapshots)?);
        finals.push(PointSet::new(rep.archetypes().clone())?);
        result.rows.push(row);
    }
    for i in 0..finals.len() {
        for j in i + 1..finals.len() {
            result.pairwise.push((group.to_string(), i, j, d2_infty(&finals[i], &finals[j])?));
        }
    }
    Ok(())
}

/// Penalty sweep on one sample per repeat, plus the initialization study
/// for the annular data.
fn run_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let spec = &cfg.specs()[0];
    let n = cfg.ns[0];
    if cfg.ns.len() > 1 {
        return Err(Error::invalid("the penalty sweep uses a single sample size"));
    }
    let data: Vec<Matrix> = (0..cfg.repeats)
        .map(|r| sample_stream(spec, n, cfg.seed, r as u64))
        .collect::<Result<_>>()?;
    let mut trials = Vec::new();
    for (r, x) in data.iter().enumerate() {
        // One initialization per repeat, shared across the sweep.
        let seed = derived_seed(cfg.seed, r as u64);
        for &alpha in &cfg.alphas {
            trials.push(TrialSpec {
                group: "sweep".into(),
                data: x,
                n,
                k: cfg.k,
                alpha,
                repeat: r,
                solver: cfg.solver(seed),
                mean: mean2(spec),
                disk_oracle: false,
            });
        }
    }
    let out = run_parallel(&trials, |t| t.repeat == 0)?;
    let mut result = empty_result(cfg);
    let mut sweep_hulls = Vec::new();
    for (row, rep) in out {
        if let Some(rep) = rep {
            sweep_hulls.push((row.alpha, rep.archetypes().clone()));
            if row.alpha == cfg.alphas[0] {
                result.overlay = Some((data[0].clone(), rep.archetypes().clone()));
            }
        }
        result.rows.push(row);
    }
    for (alpha, z) in sweep_hulls.into_iter().filter(|(a, _)| SWEEP_SNAPSHOT_ALPHAS.contains(a)) {
        result.snapshots.push(SnapshotRun {
            title: format!("alpha = {alpha}"),
            data_hull: convex_hull_2d(&PointSet::new(data[0].clone())?)?,
            mean: mean2(spec),
            frames: vec![(0, z.clone())],
            archetypes: z,
        });
    }
    result.sample_means.push(("sweep".into(), sample_mean2(&data[0])));
    if cfg.experiment == 3 {
        robustness(cfg, "robust", 0, &data[0], mean2(spec), cfg.robust_alpha, &mut result)?;
    }
    Ok(result)
}

/// Penalties shown as hull insets next to the area curve.
const SWEEP_SNAPSHOT_ALPHAS: [f64; 6] = [0.0, 0.1, 0.5, 1.0, 2.0, 5.0];

/// Initialization study on each mixture, at every configured penalty.
fn run_mixture(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let mut result = empty_result(cfg);
    let n = cfg.ns[0];
    for (s, (spec, v2)) in cfg.specs().iter().zip(&cfg.second_variances).enumerate() {
        let x = sample_stream(spec, n, cfg.seed, s as u64)?;
        let group = format!("sigma2={v2}");
        result.sample_means.push((group.clone(), sample_mean2(&x)));
        for (ai, &alpha) in cfg.alphas.iter().enumerate() {
            let g = if cfg.alphas.len() > 1 { format!("{group},alpha={alpha}") } else { group.clone() };
            robustness(cfg, &g, ((s as u64) << 8) | ai as u64, &x, mean2(spec), alpha, &mut result)?;
        }
    }
    Ok(result)
}

/// Per-`N` means over repeats: `(N, mean min angle, mean max angle, mean objective, mean d₂,∞ to the optimum)`.
pub fn angle_summary(rows: &[TrialRow]) -> Vec<(usize, f64, f64, f64, Option<f64>)> {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let sel: Vec<&TrialRow> = rows.iter().filter(|r| r.n == n).collect();
            let m = sel.len() as f64;
            let d2: Option<f64> = sel.iter().map(|r| r.d2inf_to_oracle).sum::<Option<f64>>().map(|s| s / m);
            (
                n,
                sel.iter().map(|r| r.min_angle).sum::<f64>() / m,
                sel.iter().map(|r| r.max_angle).sum::<f64>() / m,
                sel.iter().map(|r| r.objective).sum::<f64>() / m,
                d2,
            )
        })
        .collect()
}

/// Per-`α` summary over repeats: `(α, mean area, min area, max area, all contain the mean, mean objective)`.
pub fn area_summary(rows: &[TrialRow]) -> Vec<(f64, f64, f64, f64, bool, f64)> {
    let mut alphas: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    alphas
        .into_iter()
        .map(|a| {
            let sel: Vec<&TrialRow> = rows.iter().filter(|r| r.alpha == a).collect();
            let m = sel.len() as f64;
            (
                a,
                sel.iter().map(|r| r.area).sum::<f64>() / m,
                sel.iter().map(|r| r.area).fold(f64::INFINITY, f64::min),
                sel.iter().map(|r| r.area).fold(f64::NEG_INFINITY, f64::max),
                sel.iter().all(|r| r.contains_mean),
                sel.iter().map(|r| r.objective).sum::<f64>() / m,
            )
        })
        .collect()
}

fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::invalid(format!("csv: {other:?}")),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, fmt_f64)
}

fn scatter_figure(x: &Matrix, data_hull: &Polygon2D, z: &Matrix, mean: [f64; 2], size: f64) -> Result<Figure> {
    let pts: Vec<[f64; 2]> = x.columns().take(MAX_PLOTTED_POINTS).map(|p| [p[0], p[1]]).collect();
    let bounds = Bounds::of_points(data_hull.vertices().iter().copied().chain(pts.iter().copied()));
    let mut f = Figure::new(size, size, bounds).equal_aspect();
    f.points(&pts, "steelblue", 1.0);
    f.polygon(data_hull, DATA_HULL, 1.5);
    hull_outline(&mut f, z)?;
    f.points(&[mean], "black", 3.0);
    Ok(f)
}

fn hull_outline(f: &mut Figure, z: &Matrix) -> Result<()> {
    let poly = convex_hull_2d(&PointSet::new(z.clone())?)?;
    f.polygon(&poly, ARCHETYPE_HULL, 2.0);
    let pts: Vec<[f64; 2]> = z.columns().map(|p| [p[0], p[1]]).collect();
    f.points(&pts, ARCHETYPE_HULL, 3.0);
    Ok(())
}

fn snapshot_grid(runs: &[SnapshotRun]) -> Result<String> {
    snapshot_grid_labeled(runs, |run, it, last| {
        if last {
            format!("{}: final ({it})", run.title)
        } else {
            format!("{}: iter {it}", run.title)
        }
    })
}

fn snapshot_grid_labeled(runs: &[SnapshotRun], label: impl Fn(&SnapshotRun, usize, bool) -> String) -> Result<String> {
    let cols = runs.iter().map(|r| r.frames.len()).max().unwrap_or(1);
    let mut panels = Vec::new();
    for run in runs {
        let bounds = Bounds::of_points(
            run.data_hull
                .vertices()
                .iter()
                .copied()
                .chain(run.frames.iter().flat_map(|(_, z)| z.columns().map(|p| [p[0], p[1]]).collect::<Vec<_>>())),
        );
        for (i, (it, z)) in run.frames.iter().enumerate() {
            let mut f = Figure::new(220.0, 220.0, bounds).equal_aspect();
            f.polygon(&run.data_hull, DATA_HULL, 1.0);
            hull_outline(&mut f, z)?;
            f.points(&[run.mean], "black", 2.5);
            panels.push((label(run, *it, i + 1 == run.frames.len()), f));
        }
        // Pad ragged rows so each run starts a new row.
        for _ in run.frames.len()..cols {
            panels.push((String::new(), Figure::new(220.0, 220.0, bounds)));
        }
    }
    Ok(grid(&panels, cols))
}

fn trial_record(r: &TrialRow) -> Vec<String> {
    vec![
        r.group.clone(),
        r.n.to_string(),
        fmt_f64(r.alpha),
        r.repeat.to_string(),
        r.seed.to_string(),
        fmt_f64(r.objective),
        fmt_f64(r.area),
        fmt_f64(r.min_angle),
        fmt_f64(r.max_angle),
        opt(r.d2inf_to_oracle),
        r.contains_mean.to_string(),
        fmt_f64(r.mean_distance),
        r.iterations.to_string(),
        r.converged.to_string(),
        fmt_f64(r.max_trace_rise),
        fmt_f64(r.max_violation),
        r.skipped_updates.to_string(),
    ]
}

const TRIAL_HEADER: [&str; 17] = [
    "group",
    "n",
    "alpha",
    "repeat",
    "seed",
    "objective",
    "area",
    "min_angle",
    "max_angle",
    "d2inf_to_oracle",
    "contains_mean",
    "mean_distance",
    "iterations",
    "converged",
    "max_trace_rise",
    "max_violation",
    "skipped_updates",
];

/// Writes tables, figures, the resolved config and timings into `dir`.
/// Everything except `timing.txt` is a pure function of the config.
pub fn write_artifacts(res: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut out = ArtifactDir { dir, written: Vec::new() };
    out.text("config.ini", res.config.to_text())?;
    let total: Duration = res.rows.iter().map(|r| r.wall_time).sum();
    out.text(
        "timing.txt",
        format!("wall_time_s = {:.3}\nsum_of_fit_times_s = {:.3}\nfits = {}\n", res.wall_time.as_secs_f64(), total.as_secs_f64(), res.rows.len()),
    )?;
    out.table("trials.csv", &TRIAL_HEADER, res.rows.iter().map(trial_record))?;
    out.table("sample_means.csv",
        &["group", "mean_x", "mean_y"],
        res.sample_means.iter().map(|(g, m)| vec![g.clone(), fmt_f64(m[0]), fmt_f64(m[1])]),
    )?;

    match res.config.experiment {
        1 => {
            let summary = angle_summary(&res.rows);
            let oracle = optimal_objective_sq(res.config.k).ok();
            out.table("angles.csv",
                &["n", "mean_min_angle", "mean_max_angle", "mean_objective", "oracle_objective", "mean_d2inf_to_oracle"],
                summary.iter().map(|&(n, lo, hi, obj, d2)| vec![n.to_string(), fmt_f64(lo), fmt_f64(hi), fmt_f64(obj), opt(oracle), opt(d2)]),
            )?;
            let lo: Vec<[f64; 2]> = summary.iter().map(|s| [s.0 as f64, s.1]).collect();
            let hi: Vec<[f64; 2]> = summary.iter().map(|s| [s.0 as f64, s.2]).collect();
            let xs = (lo.first().map_or(1.0, |p| p[0]), lo.last().map_or(10.0, |p| p[0]).max(lo.first().map_or(1.0, |p| p[0]) + 1.0));
            let mut f = Figure::new(640.0, 420.0, Bounds { x: xs, y: (0.0, 180.0) }).log_x();
            f.frame("N (log scale)", "angle (degrees)");
            f.polyline(&hi, "red", "mean max angle");
            f.polyline(&lo, "blue", "mean min angle");
            out.text("angles.svg", f.render())?;
        }
        _ => {
            let summary = area_summary(res.rows.iter().filter(|r| r.group == "sweep").cloned().collect::<Vec<_>>().as_slice());
            if !summary.is_empty() {
                out.table("area_vs_alpha.csv",
                    &["alpha", "mean_area", "min_area", "max_area", "all_contain_mean", "mean_objective"],
                    summary.iter().map(|&(a, m, lo, hi, c, o)| vec![fmt_f64(a), fmt_f64(m), fmt_f64(lo), fmt_f64(hi), c.to_string(), fmt_f64(o)]),
                )?;
                let pts: Vec<[f64; 2]> = summary.iter().map(|s| [s.0, s.1]).collect();
                let ymax = pts.iter().map(|p| p[1]).fold(0.0, f64::max);
                let xmax = pts.iter().map(|p| p[0]).fold(0.0, f64::max).max(1e-3);
                let mut f = Figure::new(640.0, 420.0, Bounds { x: (0.0, xmax), y: (0.0, ymax.max(1e-9) * 1.05) });
                f.frame("alpha", "area of co(A)");
                f.polyline(&pts, "black", "mean area");
                out.text("area_vs_alpha.svg", f.render())?;
            }
            let insets: Vec<SnapshotRun> = res.snapshots.iter().filter(|s| s.title.starts_with("alpha")).cloned().collect();
            if !insets.is_empty() {
                // One row; the frame index selects the penalty.
                let row = SnapshotRun {
                    title: "sweep".into(),
                    data_hull: insets[0].data_hull.clone(),
                    mean: insets[0].mean,
                    frames: insets.iter().enumerate().map(|(i, s)| (i, s.archetypes.clone())).collect(),
                    archetypes: insets[0].archetypes.clone(),
                };
                let body = snapshot_grid_labeled(std::slice::from_ref(&row), |_, i, _| insets[i].title.clone())?;
                out.text("hulls_vs_alpha.svg", body)?;
            }
            let iter_runs: Vec<SnapshotRun> = res.snapshots.iter().filter(|s| !s.title.starts_with("alpha")).cloned().collect();
            if !iter_runs.is_empty() {
                out.text("snapshots.svg", snapshot_grid(&iter_runs)?)?;
                out.table("pairwise_d2inf.csv",
                    &["group", "init_a", "init_b", "d2inf"],
                    res.pairwise.iter().map(|(g, a, b, d)| vec![g.clone(), a.to_string(), b.to_string(), fmt_f64(*d)]),
                )?;
                for (i, run) in iter_runs.iter().enumerate() {
                    let name = format!("snapshot_{i}.svg");
                    out.text(&name, snapshot_grid(std::slice::from_ref(run))?)?;
                }
            }
        }
    }
    if let Some((x, z)) = &res.overlay {
        let hull = convex_hull_2d(&PointSet::new(x.clone())?)?;
        let mean = res.config.specs()[0].mean();
        let f = scatter_figure(x, &hull, z, [mean[0], mean[1]], 520.0)?;
        out.text("fit.svg", f.render())?;
        save_csv(dir.join("final_archetypes.csv"), z, None)?;
        out.written.push(dir.join("final_archetypes.csv"));
    }
    Ok(out.written)
}

struct ArtifactDir<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl ArtifactDir<'_> {
    fn text(&mut self, name: &str, body: String) -> Result<()> {
        let p = self.dir.join(name);
        std::fs::write(&p, body)?;
        self.written.push(p);
        Ok(())
    }

    fn table(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let p = self.dir.join(name);
        write_table(&p, header, rows)?;
        self.written.push(p);
        Ok(())
    }
}

/// Human-readable summary lines.
pub fn summary_lines(res: &ExperimentResult) -> Vec<String> {
    let mut out = Vec::new();
    let fits = res.rows.len();
    let worst_rise = res.rows.iter().map(|r| r.max_trace_rise).fold(f64::NEG_INFINITY, f64::max);
    let worst_viol = res.rows.iter().map(|r| r.max_violation).fold(0.0, f64::max);
    out.push(format!("example {}: {fits} fits in {:.1} s", res.config.experiment, res.wall_time.as_secs_f64()));
    match res.config.experiment {
        1 => {
            if let Some(&(n, lo, hi, obj, d2)) = angle_summary(&res.rows).last() {
                out.push(format!("largest N = {n}: mean min angle {lo:.2}, mean max angle {hi:.2}"));
                if let Ok(o) = optimal_objective_sq(res.config.k) {
                    out.push(format!("mean objective {obj:.6} vs disk optimum {o:.6}"));
                }
                if let Some(d) = d2 {
                    out.push(format!("mean d2,inf to rotated optimum {d:.4}"));
                }
            }
        }
        _ => {
            for (a, m, _, _, c, _) in area_summary(&res.rows.iter().filter(|r| r.group == "sweep").cloned().collect::<Vec<_>>()) {
                if SWEEP_SNAPSHOT_ALPHAS.contains(&a) {
                    out.push(format!("alpha {a}: mean area {m:.3}, contains mean: {c}"));
                }
            }
            for (g, a, b, d) in &res.pairwise {
                out.push(format!("{g}: d2,inf(init {a}, init {b}) = {d:.4}"));
            }
            for r in res.rows.iter().filter(|r| r.group != "sweep") {
                out.push(format!(
                    "{} init {}: {} iterations, area {:.3}, contains mean: {} (distance {:.2e})",
                    r.group, r.repeat, r.iterations, r.area, r.contains_mean, r.mean_distance
                ));
            }
        }
    }
    out.push(format!("largest trace increase {worst_rise:.3e}, largest simplex violation {worst_viol:.3e}"));
    out
}
