//! Archetypal analysis by alternating minimization.
//!
//! With data `X` (`d×N`, points as columns) and `k` archetypes `Z = XA`, the
//! objective is
//!
//! `F²(A, B) = (1/N)‖X − XAB‖²_F + α·V(Z)`, `V(Z) = (1/k) Σ ‖a_ℓ − ā‖²`,
//!
//! with `A` (`N×k`) and `B` (`k×N`) column-stochastic. Each iteration sweeps
//! the archetypes one column at a time (Gauss–Seidel, `B` fixed) and then
//! re-solves every column of `B` for the new archetypes. Both block updates
//! are simplex-constrained least-squares problems handled by
//! [`crate::simplex::ClsSolver`].

use std::time::{Duration, Instant};

use rand::seq::index;

use crate::error::{Error, Result};
use crate::geometry::convex_hull_indices;
use crate::numkernel::{dist_sq, dot, Matrix};
use crate::samplers::rng_for;
use crate::simplex::{min_norm_point, violation, ClsSolver, ClsWorkspace, PgdConfig, GAP_TOL};

/// Stream of the fit seed reserved for initialization draws.
const INIT_STREAM: u64 = 0x1417;

#[derive(Debug, Clone)]
pub struct AaProblem {
    data: Matrix,
    k: usize,
    alpha: f64,
}

impl AaProblem {
    pub fn new(data: Matrix, k: usize, alpha: f64) -> Result<Self> {
        if data.rows() == 0 || data.cols() == 0 {
            return Err(Error::invalid("data must contain at least one point of dimension >= 1"));
        }
        if k == 0 {
            return Err(Error::invalid("need at least one archetype"));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be finite and >= 0, got {alpha}")));
        }
        Ok(Self { data, k, alpha })
    }

    pub fn data(&self) -> &Matrix {
        &self.data
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of data points.
    pub fn n(&self) -> usize {
        self.data.cols()
    }

    pub fn dim(&self) -> usize {
        self.data.rows()
    }
}

/// Coefficients and the cached archetypes `Z = XA`.
#[derive(Debug, Clone, PartialEq)]
pub struct AaState {
    a: Matrix,
    b: Matrix,
    z: Matrix,
}

impl AaState {
    /// Builds a state from coefficient matrices, computing `Z = XA`.
    pub fn from_coefficients(p: &AaProblem, a: Matrix, b: Matrix) -> Result<Self> {
        let (n, k) = (p.n(), p.k());
        if a.rows() != n || a.cols() != k {
            return Err(Error::dim(format!("A must be {n}x{k}, got {}x{}", a.rows(), a.cols())));
        }
        if b.rows() != k || b.cols() != n {
            return Err(Error::dim(format!("B must be {k}x{n}, got {}x{}", b.rows(), b.cols())));
        }
        for (name, m) in [("A", &a), ("B", &b)] {
            let v = max_column_violation(m);
            if v > 1e-10 {
                return Err(Error::invalid(format!("{name} is not column-stochastic (violation {v:e})")));
            }
        }
        let z = p.data.matmul(&a)?;
        Ok(Self { a, b, z })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    /// Archetypes as columns.
    pub fn z(&self) -> &Matrix {
        &self.z
    }

    /// Worst simplex violation over the columns of `A` and `B`.
    pub fn max_simplex_violation(&self) -> f64 {
        max_column_violation(&self.a).max(max_column_violation(&self.b))
    }
}

fn max_column_violation(m: &Matrix) -> f64 {
    m.columns().map(violation).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// `k` distinct data points drawn with the fit seed.
    RandomDataPoints,
    /// Explicit starting archetypes (`d×k`); each is replaced by its nearest
    /// point in the data hull.
    Archetypes(Matrix),
    /// Explicit column-stochastic `A` (`N×k`).
    Coefficients(Matrix),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Caratheodory {
    /// On for planar data with more than [`CARATHEODORY_AUTO_MIN_N`] points.
    Auto,
    On,
    Off,
}

pub const CARATHEODORY_AUTO_MIN_N: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Stop when `‖Z_new − Z_old‖²_F` falls below this.
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub init: Init,
    pub pgd: PgdConfig,
    pub caratheodory: Caratheodory,
    /// Keep `Z` after initialization and after every iteration.
    pub keep_history: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iters: 1000,
            seed: 0,
            init: Init::RandomDataPoints,
            pgd: PgdConfig::default(),
            caratheodory: Caratheodory::Auto,
            keep_history: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        self.pgd.validate()
    }
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub state: AaState,
    /// Objective after initialization, then after every iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time: Duration,
    /// Column updates skipped because the column of `B` carried no mass.
    pub skipped_updates: usize,
    /// Archetypes after initialization and each iteration, when requested.
    pub history: Vec<Matrix>,
    /// Number of data columns the archetype update was allowed to use.
    pub design_size: usize,
}

impl FitReport {
    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace is never empty")
    }

    pub fn archetypes(&self) -> &Matrix {
        self.state.z()
    }
}

/// Spread of the archetypes, `(1/k) Σ ‖a_ℓ − ā‖²`.
pub fn variance(z: &Matrix) -> f64 {
    let k = z.cols();
    if k == 0 {
        return 0.0;
    }
    let mean = z.column_mean();
    z.columns().map(|c| dist_sq(c, &mean)).sum::<f64>() / k as f64
}

/// `(1/N)‖X − ZB‖²_F + α V(Z)` for the state's archetypes and weights.
pub fn objective(p: &AaProblem, s: &AaState) -> Result<f64> {
    if s.z.rows() != p.dim() || s.z.cols() != p.k() || s.b.rows() != p.k() || s.b.cols() != p.n() {
        return Err(Error::dim("state does not match the problem"));
    }
    Ok(reconstruction_error(&p.data, &s.z, &s.b) + p.alpha * variance(&s.z))
}

fn reconstruction_error(x: &Matrix, z: &Matrix, b: &Matrix) -> f64 {
    let d = x.rows();
    let mut r = vec![0.0; d];
    let mut total = 0.0;
    for (xi, bi) in x.columns().zip(b.columns()) {
        r.copy_from_slice(xi);
        for (s, &w) in bi.iter().enumerate() {
            if w != 0.0 {
                for (rj, zj) in r.iter_mut().zip(z.col(s)) {
                    *rj -= zj * w;
                }
            }
        }
        total += dot(&r, &r);
    }
    total / x.cols() as f64
}

/// Column indices of the extreme points of `co(X)` for planar data; every
/// index otherwise (and for fewer than three points).
pub fn extreme_point_indices(x: &Matrix) -> Result<Vec<usize>> {
    if x.rows() != 2 || x.cols() < 3 {
        return Ok((0..x.cols()).collect());
    }
    let mut idx = convex_hull_indices(x)?;
    idx.sort_unstable();
    Ok(idx)
}

/// The extreme points of `co(X)` (planar data), in column order.
pub fn extreme_point_filter(x: &Matrix) -> Result<Matrix> {
    Ok(x.select_columns(&extreme_point_indices(x)?))
}

/// Target point of the `ℓ`-th archetype update with `B` and the other
/// archetypes fixed:
///
/// `t = [(1/N) Σ_i B_ℓi ξ_i + (α/k²) Σ_{s≠ℓ} a_s] / [(1/N) Σ_i B_ℓi² + α(k−1)/k²]`,
/// `ξ_i = x_i − Σ_{s≠ℓ} B_si a_s`.
///
/// `None` when the denominator vanishes (no mass on row `ℓ` and `α = 0`).
pub fn z_column_target(p: &AaProblem, s: &AaState, ell: usize) -> Result<Option<Vec<f64>>> {
    if ell >= p.k() {
        return Err(Error::invalid(format!("archetype index {ell} out of range for k = {}", p.k())));
    }
    let stats = BlockStats::new(&p.data, &s.b);
    Ok(stats.target(p, &s.z, ell))
}

/// `XBᵀ` and `BBᵀ`, fixed during a sweep.
struct BlockStats {
    xbt: Matrix,
    bbt: Matrix,
}

impl BlockStats {
    fn new(x: &Matrix, b: &Matrix) -> Self {
        let (d, k) = (x.rows(), b.rows());
        let mut xbt = Matrix::zeros(d, k);
        let mut bbt = Matrix::zeros(k, k);
        for (xi, bi) in x.columns().zip(b.columns()) {
            for (l, &bl) in bi.iter().enumerate() {
                if bl == 0.0 {
                    continue;
                }
                for (o, xv) in xbt.col_mut(l).iter_mut().zip(xi) {
                    *o += bl * xv;
                }
                for (s, &bs) in bi.iter().enumerate() {
                    let cur = bbt.get(s, l);
                    bbt.set(s, l, cur + bl * bs);
                }
            }
        }
        Self { xbt, bbt }
    }

    fn target(&self, p: &AaProblem, z: &Matrix, ell: usize) -> Option<Vec<f64>> {
        let (k, n) = (p.k(), p.n() as f64);
        let kf = k as f64;
        let den = self.bbt.get(ell, ell) / n + p.alpha * (kf - 1.0) / (kf * kf);
        if den <= 1e-300 {
            return None;
        }
        let mut num: Vec<f64> = self.xbt.col(ell).iter().map(|v| v / n).collect();
        for s in (0..k).filter(|&s| s != ell) {
            let w = -self.bbt.get(ell, s) / n + p.alpha / (kf * kf);
            for (o, zv) in num.iter_mut().zip(z.col(s)) {
                *o += w * zv;
            }
        }
        num.iter_mut().for_each(|v| *v /= den);
        Some(num)
    }
}

/// Precomputed machinery for one problem and configuration.
pub struct AaSolver<'a> {
    problem: &'a AaProblem,
    cfg: SolverConfig,
    design_idx: Vec<usize>,
    design: ClsSolver,
}

impl<'a> AaSolver<'a> {
    pub fn new(problem: &'a AaProblem, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let x = &problem.data;
        let filter = match cfg.caratheodory {
            Caratheodory::On => true,
            Caratheodory::Off => false,
            Caratheodory::Auto => x.rows() == 2 && x.cols() > CARATHEODORY_AUTO_MIN_N,
        };
        let design_idx = if filter {
            extreme_point_indices(x)?
        } else {
            (0..x.cols()).collect()
        };
        let design = ClsSolver::new(x.select_columns(&design_idx), cfg.pgd)?;
        Ok(Self {
            problem,
            cfg,
            design_idx,
            design,
        })
    }

    pub fn design_indices(&self) -> &[usize] {
        &self.design_idx
    }

    fn gap_tol(&self, u: &[f64]) -> f64 {
        let scale = self
            .design
            .design()
            .columns()
            .map(|c| dot(c, c))
            .fold(dot(u, u), f64::max)
            .max(f64::MIN_POSITIVE);
        GAP_TOL * scale
    }

    /// Design-basis weights of the hull point nearest to `target`.
    fn represent(&self, target: &[f64]) -> Vec<f64> {
        min_norm_point(self.design.design(), target, None, self.gap_tol(target))
    }

    fn scatter_column(&self, a: &mut Matrix, ell: usize, w: &[f64]) {
        let col = a.col_mut(ell);
        col.iter_mut().for_each(|v| *v = 0.0);
        for (&i, &wi) in self.design_idx.iter().zip(w) {
            col[i] = wi;
        }
    }

    /// Starting state: archetypes from the configured initialization, `B`
    /// uniform (not yet optimized).
    pub fn initial_state(&self) -> Result<AaState> {
        let p = self.problem;
        let (n, k, d) = (p.n(), p.k(), p.dim());
        let mut a = Matrix::zeros(n, k);
        match &self.cfg.init {
            Init::RandomDataPoints => {
                if k > n {
                    return Err(Error::invalid(format!("cannot pick {k} distinct data points out of {n}")));
                }
                let mut rng = rng_for(self.cfg.seed, INIT_STREAM);
                let picks = index::sample(&mut rng, n, k).into_vec();
                for (ell, &i) in picks.iter().enumerate() {
                    match self.design_idx.binary_search(&i) {
                        Ok(_) => a.set(i, ell, 1.0),
                        Err(_) => {
                            let w = self.represent(p.data.col(i));
                            self.scatter_column(&mut a, ell, &w);
                        }
                    }
                }
            }
            Init::Archetypes(z0) => {
                if z0.rows() != d || z0.cols() != k {
                    return Err(Error::dim(format!(
                        "initial archetypes must be {d}x{k}, got {}x{}",
                        z0.rows(),
                        z0.cols()
                    )));
                }
                for ell in 0..k {
                    let w = self.represent(z0.col(ell));
                    self.scatter_column(&mut a, ell, &w);
                }
            }
            Init::Coefficients(a0) => {
                a = a0.clone();
            }
        }
        let b = Matrix::new(k, n, vec![1.0 / k as f64; k * n])?;
        AaState::from_coefficients(p, a, b)
    }

    /// Re-solves every column of `B` for the current archetypes, warm
    /// starting from the current columns.
    pub fn update_b(&self, s: &mut AaState) -> Result<()> {
        let cls = ClsSolver::new(s.z.clone(), self.cfg.pgd)?;
        let mut ws = ClsWorkspace::default();
        let x = &self.problem.data;
        for i in 0..x.cols() {
            cls.solve_in_place(x.col(i), s.b.col_mut(i), &mut ws);
        }
        Ok(())
    }

    /// Updates archetype `ell` in place. Returns `false` when the update was
    /// skipped because its target is undefined.
    pub fn update_z_column(&self, s: &mut AaState, ell: usize) -> Result<bool> {
        if ell >= self.problem.k() {
            return Err(Error::invalid(format!("archetype index {ell} out of range")));
        }
        let stats = BlockStats::new(&self.problem.data, &s.b);
        self.update_z_column_with(s, ell, &stats)
    }

    fn update_z_column_with(&self, s: &mut AaState, ell: usize, stats: &BlockStats) -> Result<bool> {
        let Some(target) = stats.target(self.problem, &s.z, ell) else {
            return Ok(false);
        };
        if target.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverAbort(format!("non-finite target for archetype {ell}")));
        }
        let acol = s.a.col(ell);
        let mut w: Vec<f64> = self.design_idx.iter().map(|&i| acol[i]).collect();
        if violation(&w) > 1e-9 {
            w = self.represent(s.z.col(ell));
        }
        let mut ws = ClsWorkspace::default();
        self.design.solve_in_place(&target, &mut w, &mut ws);
        self.scatter_column(&mut s.a, ell, &w);
        let new_col = self.design.design().matvec(&w)?;
        s.z.col_mut(ell).copy_from_slice(&new_col);
        Ok(true)
    }

    /// One Gauss–Seidel pass over all archetypes. Returns the number of
    /// skipped columns.
    pub fn sweep(&self, s: &mut AaState) -> Result<usize> {
        let stats = BlockStats::new(&self.problem.data, &s.b);
        let mut skipped = 0;
        for ell in 0..self.problem.k() {
            if !self.update_z_column_with(s, ell, &stats)? {
                skipped += 1;
            }
        }
        Ok(skipped)
    }

    pub fn fit(&self) -> Result<FitReport> {
        let start = Instant::now();
        let p = self.problem;
        let mut state = self.initial_state()?;
        let mut history = Vec::new();
        if self.cfg.keep_history {
            history.push(state.z.clone());
        }
        self.update_b(&mut state)?;
        let mut trace = vec![checked_objective(p, &state, 0)?];

        let mut converged = false;
        let mut iterations = 0;
        let mut skipped_updates = 0;
        while iterations < self.cfg.max_iters {
            iterations += 1;
            let z_old = state.z.clone();
            skipped_updates += self.sweep(&mut state)?;
            self.update_b(&mut state)?;
            trace.push(checked_objective(p, &state, iterations)?);
            if self.cfg.keep_history {
                history.push(state.z.clone());
            }
            if state.z.sub(&z_old)?.frobenius_norm_sq() < self.cfg.tol {
                converged = true;
                break;
            }
        }
        Ok(FitReport {
            state,
            objective_trace: trace,
            iterations,
            converged,
            wall_time: start.elapsed(),
            skipped_updates,
            history,
            design_size: self.design_idx.len(),
        })
    }
}

fn checked_objective(p: &AaProblem, s: &AaState, iteration: usize) -> Result<f64> {
    let f = objective(p, s)?;
    if !f.is_finite() {
        return Err(Error::SolverAbort(format!("objective became {f} at iteration {iteration}")));
    }
    Ok(f)
}

/// Fits `k` archetypes to the problem's data.
pub fn fit(p: &AaProblem, cfg: &SolverConfig) -> Result<FitReport> {
    AaSolver::new(p, cfg.clone())?.fit()
}

/// Returns a copy of the state with every column of `B` re-solved.
pub fn update_b(p: &AaProblem, s: &AaState, cfg: &SolverConfig) -> Result<AaState> {
    let solver = AaSolver::new(p, cfg.clone())?;
    let mut out = s.clone();
    solver.update_b(&mut out)?;
    Ok(out)
}

/// Returns a copy of the state with archetype `ell` updated, and whether
/// the update was applied.
pub fn update_z_column(p: &AaProblem, s: &AaState, ell: usize, cfg: &SolverConfig) -> Result<(AaState, bool)> {
    let solver = AaSolver::new(p, cfg.clone())?;
    let mut out = s.clone();
    let applied = solver.update_z_column(&mut out, ell)?;
    Ok((out, applied))
}
