//! Simplex-constrained least squares.
//!
//! Solves `min ‖u − Cω‖²` over the probability simplex with the projected
//! gradient scheme: integrate the gradient flow `ω' = −CᵀCω + Cᵀu` exactly
//! for a time `τ`, project back onto the simplex, repeat. The exact flow is a
//! preconditioned step, so its fixed points are only approximately optimal
//! when constraints are active; every solve therefore ends with a
//! Frank–Wolfe gap certificate, and a Wolfe minimum-norm-point pass finishes
//! the problem whenever the certificate fails.

use crate::error::{Error, Result};
use crate::numkernel::{dot, solve_dense, sym_eig, Matrix};

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexVector(Vec<f64>);

/// Sum-to-one tolerance accepted by [`SimplexVector::new`].
pub const SIMPLEX_TOL: f64 = 1e-12;

impl SimplexVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("simplex vector must be nonempty"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("simplex weights"));
        }
        let v = violation(&weights);
        if v > SIMPLEX_TOL {
            return Err(Error::invalid(format!(
                "weights are not on the simplex (violation {v:e})"
            )));
        }
        Ok(Self(weights))
    }

    pub fn vertex(q: usize, j: usize) -> Self {
        let mut w = vec![0.0; q];
        w[j] = 1.0;
        Self(w)
    }

    pub fn uniform(q: usize) -> Self {
        Self(vec![1.0 / q as f64; q])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Largest violation of the simplex constraints: negative mass or the
/// deviation of the sum from one.
pub fn violation(w: &[f64]) -> f64 {
    let neg = w.iter().fold(0.0f64, |m, &v| m.max(-v));
    let sum: f64 = w.iter().sum();
    neg.max((sum - 1.0).abs())
}

/// Euclidean projection onto the probability simplex (sort, threshold,
/// clamp).
pub fn project_simplex(v: &[f64]) -> Result<SimplexVector> {
    if v.is_empty() {
        return Err(Error::invalid("cannot project an empty vector"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("projection input"));
    }
    let mut w = v.to_vec();
    let mut scratch = Vec::with_capacity(v.len());
    project_in_place(&mut w, &mut scratch);
    Ok(SimplexVector(w))
}

/// In-place projection. All reductions run over the sorted values so the
/// result does not depend on the input order. Inputs that are already
/// feasible up to rounding come back untouched, which makes the projection
/// bitwise idempotent.
pub(crate) fn project_in_place(v: &mut [f64], mu: &mut Vec<f64>) {
    let q = v.len();
    mu.clear();
    mu.extend_from_slice(v);
    mu.sort_unstable_by(|a, b| b.total_cmp(a));

    let total: f64 = mu.iter().sum();
    if mu[q - 1] >= 0.0 && (total - 1.0).abs() <= 4.0 * q as f64 * f64::EPSILON {
        return;
    }

    let mut cum = 0.0;
    let mut rho = 1;
    let mut cum_rho = mu[0];
    for (j, &m) in mu.iter().enumerate() {
        cum += m;
        if m - (cum - 1.0) / (j + 1) as f64 > 0.0 {
            rho = j + 1;
            cum_rho = cum;
        }
    }
    let theta = (cum_rho - 1.0) / rho as f64;

    let mut s = 0.0;
    for &m in mu.iter().take(rho) {
        s += (m - theta).max(0.0);
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0) / s;
    }
}

/// Target `u` and design `C` of `min_{ω∈simplex} ‖u − Cω‖²`.
#[derive(Debug, Clone)]
pub struct ClsProblem {
    target: Vec<f64>,
    design: Matrix,
}

impl ClsProblem {
    pub fn new(target: Vec<f64>, design: Matrix) -> Result<Self> {
        if design.rows() == 0 || design.cols() == 0 {
            return Err(Error::invalid("design matrix must be at least 1x1"));
        }
        if target.len() != design.rows() {
            return Err(Error::dim(format!(
                "target has length {}, design has {} rows",
                target.len(),
                design.rows()
            )));
        }
        if target.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("target"));
        }
        Ok(Self { target, design })
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn design(&self) -> &Matrix {
        &self.design
    }

    pub fn objective(&self, w: &[f64]) -> f64 {
        residual_norm_sq(&self.design, &self.target, w)
    }
}

fn residual_norm_sq(c: &Matrix, u: &[f64], w: &[f64]) -> f64 {
    let mut r = u.to_vec();
    for (j, &wj) in w.iter().enumerate() {
        if wj != 0.0 {
            for (ri, ci) in r.iter_mut().zip(c.col(j)) {
                *ri -= ci * wj;
            }
        }
    }
    dot(&r, &r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgdConfig {
    /// Flow time per outer step.
    pub tau: f64,
    pub max_outer: usize,
    /// Stop once successive iterates move less than this (ℓ₂).
    pub step_tol: f64,
}

impl Default for PgdConfig {
    fn default() -> Self {
        Self {
            tau: 0.5,
            max_outer: 500,
            step_tol: 1e-8,
        }
    }
}

impl PgdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid(format!("tau must be positive, got {}", self.tau)));
        }
        if self.max_outer == 0 {
            return Err(Error::invalid("max_outer must be at least 1"));
        }
        if !(self.step_tol > 0.0) {
            return Err(Error::invalid("step_tol must be positive"));
        }
        Ok(())
    }
}

/// Relative threshold below which an eigenvalue of `CᵀC` counts as zero.
pub const ZERO_EIG_REL: f64 = 1e-12;

fn check_flow_args(p: &ClsProblem, w0: &[f64], t: f64) -> Result<()> {
    if w0.len() != p.design.cols() {
        return Err(Error::dim(format!(
            "initial weights have length {}, design has {} columns",
            w0.len(),
            p.design.cols()
        )));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("flow time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Exact solution at time `t` of `ω' = −CᵀCω + Cᵀu`, `ω(0) = w0`, through the
/// eigendecomposition `CᵀC = VΣVᵀ`.
pub fn ode_flow(p: &ClsProblem, w0: &[f64], t: f64) -> Result<Vec<f64>> {
    check_flow_args(p, w0, t)?;
    if t == 0.0 {
        return Ok(w0.to_vec());
    }
    let eig = sym_eig(&p.design.gram())?;
    let v = &eig.vectors;
    let ctu = p.design.tr_matvec(&p.target)?;
    let b = v.tr_matvec(&ctu)?;
    let p0 = v.tr_matvec(w0)?;
    let smax = eig.values[0].max(0.0);
    let coeffs: Vec<f64> = eig
        .values
        .iter()
        .zip(p0.iter().zip(&b))
        .map(|(&s, (&p0i, &bi))| {
            if s > ZERO_EIG_REL * smax && s > 0.0 {
                let e = (-s * t).exp();
                e * p0i - e * bi / s + bi / s
            } else {
                p0i + t * bi
            }
        })
        .collect();
    v.matvec(&coeffs)
}

/// Forward-Euler approximation of the same flow. `step · λ_max(CᵀC)` must be
/// below 2; the last step is shortened so the run ends exactly at `t`.
pub fn ode_flow_euler(p: &ClsProblem, w0: &[f64], t: f64, step: f64) -> Result<Vec<f64>> {
    check_flow_args(p, w0, t)?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid(format!("Euler step must be positive, got {step}")));
    }
    let c = &p.design;
    let small = if c.rows() < c.cols() { c.outer_gram() } else { c.gram() };
    let lmax = sym_eig(&small)?.values[0].max(0.0);
    if step * lmax >= 2.0 {
        return Err(Error::invalid(format!(
            "Euler step {step} is unstable for largest eigenvalue {lmax} (needs step * lambda < 2)"
        )));
    }
    let mut w = w0.to_vec();
    if t == 0.0 {
        return Ok(w);
    }
    let ctu = c.tr_matvec(&p.target)?;
    let n = ((t / step) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let h = t / n as f64;
    let mut cw = vec![0.0; c.rows()];
    for _ in 0..n {
        c.matvec_into(&w, &mut cw);
        for (j, wj) in w.iter_mut().enumerate() {
            *wj += h * (ctu[j] - dot(c.col(j), &cw));
        }
    }
    Ok(w)
}

/// `φ(σ) = (1 − e^{−στ})/σ`, with the linear branch `τ` at zero.
fn flow_gain(s: f64, smax: f64, tau: f64) -> f64 {
    if s > ZERO_EIG_REL * smax && s > 0.0 {
        -(-s * tau).exp_m1() / s
    } else {
        tau
    }
}

/// The time-`τ` flow map written as `ω ↦ ω + φ(CᵀC)(Cᵀu − CᵀCω)`, where
/// `φ(CᵀC)Cᵀ = Cᵀφ(CCᵀ)`. Whichever Gram matrix is smaller gets
/// decomposed.
#[derive(Debug, Clone)]
enum FlowMap {
    /// `φ(CᵀC)` and `CᵀC`, both `q×q`.
    Coefficient { gain: Matrix, gram: Matrix },
    /// `φ(CCᵀ)`, `n×n`; the step is `Cᵀ φ(CCᵀ) (u − Cω)`.
    Ambient { gain: Matrix },
}

fn gain_matrix(gram: &Matrix, tau: f64) -> Result<Matrix> {
    let eig = sym_eig(gram)?;
    let smax = eig.values[0].max(0.0);
    let n = gram.rows();
    let mut out = Matrix::zeros(n, n);
    for (k, &s) in eig.values.iter().enumerate() {
        let g = flow_gain(s, smax, tau);
        let v = eig.vectors.col(k);
        for j in 0..n {
            for i in 0..n {
                let cur = out.get(i, j);
                out.set(i, j, cur + g * v[i] * v[j]);
            }
        }
    }
    Ok(out)
}

/// Diagnostics from a single simplex-constrained solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ClsSolution {
    pub weights: SimplexVector,
    pub objective: f64,
    /// Flow/projection steps taken.
    pub outer_iterations: usize,
    /// Whether the minimum-norm-point finish was needed.
    pub finished_exactly: bool,
}

/// Reusable solver for many targets sharing one design matrix.
#[derive(Debug, Clone)]
pub struct ClsSolver {
    design: Matrix,
    flow: FlowMap,
    cfg: PgdConfig,
    scale: f64,
}

/// Scratch buffers for [`ClsSolver::solve_in_place`].
#[derive(Debug, Default, Clone)]
pub struct ClsWorkspace {
    r: Vec<f64>,
    y: Vec<f64>,
    g: Vec<f64>,
    mu: Vec<f64>,
    prev: Vec<f64>,
    best: Vec<f64>,
}

/// Relative Frank–Wolfe gap accepted as optimal.
pub const GAP_TOL: f64 = 1e-14;

impl ClsSolver {
    pub fn new(design: Matrix, cfg: PgdConfig) -> Result<Self> {
        cfg.validate()?;
        if design.rows() == 0 || design.cols() == 0 {
            return Err(Error::invalid("design matrix must be at least 1x1"));
        }
        let flow = if design.cols() <= design.rows() {
            let gram = design.gram();
            FlowMap::Coefficient {
                gain: gain_matrix(&gram, cfg.tau)?,
                gram,
            }
        } else {
            FlowMap::Ambient {
                gain: gain_matrix(&design.outer_gram(), cfg.tau)?,
            }
        };
        let scale = design
            .columns()
            .map(|c| dot(c, c))
            .fold(f64::MIN_POSITIVE, f64::max);
        Ok(Self {
            design,
            flow,
            cfg,
            scale,
        })
    }

    pub fn design(&self) -> &Matrix {
        &self.design
    }

    pub fn config(&self) -> &PgdConfig {
        &self.cfg
    }

    pub fn solve(&self, target: &[f64], w0: &SimplexVector) -> Result<ClsSolution> {
        if target.len() != self.design.rows() {
            return Err(Error::dim(format!(
                "target has length {}, design has {} rows",
                target.len(),
                self.design.rows()
            )));
        }
        if w0.len() != self.design.cols() {
            return Err(Error::dim(format!(
                "initial weights have length {}, design has {} columns",
                w0.len(),
                self.design.cols()
            )));
        }
        if target.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("target"));
        }
        let mut w = w0.as_slice().to_vec();
        let mut ws = ClsWorkspace::default();
        let (iters, finished) = self.solve_in_place(target, &mut w, &mut ws);
        let objective = residual_norm_sq(&self.design, target, &w);
        Ok(ClsSolution {
            weights: SimplexVector(w),
            objective,
            outer_iterations: iters,
            finished_exactly: finished,
        })
    }

    /// Residual `u − Cω` into `ws.r`, half-gradient `−Cᵀr` into `ws.g`;
    /// returns `(‖r‖², Frank–Wolfe gap)`.
    fn evaluate(&self, u: &[f64], w: &[f64], ws: &mut ClsWorkspace) -> (f64, f64) {
        let c = &self.design;
        ws.r.clear();
        ws.r.extend_from_slice(u);
        for (j, &wj) in w.iter().enumerate() {
            if wj != 0.0 {
                for (ri, ci) in ws.r.iter_mut().zip(c.col(j)) {
                    *ri -= ci * wj;
                }
            }
        }
        ws.g.clear();
        ws.g.extend(c.columns().map(|col| -dot(col, &ws.r)));
        let gmin = ws.g.iter().copied().fold(f64::INFINITY, f64::min);
        let gap = dot(&ws.g, w) - gmin;
        (dot(&ws.r, &ws.r), gap)
    }

    fn flow_step(&self, u: &[f64], w: &mut [f64], ws: &mut ClsWorkspace) {
        let c = &self.design;
        match &self.flow {
            FlowMap::Coefficient { gain, gram } => {
                // y = Cᵀu − CᵀCω
                ws.y.clear();
                ws.y.extend(c.columns().map(|col| dot(col, u)));
                for (j, &wj) in w.iter().enumerate() {
                    if wj != 0.0 {
                        for (yi, gi) in ws.y.iter_mut().zip(gram.col(j)) {
                            *yi -= gi * wj;
                        }
                    }
                }
                for (j, &yj) in ws.y.iter().enumerate() {
                    for (wi, gi) in w.iter_mut().zip(gain.col(j)) {
                        *wi += gi * yj;
                    }
                }
            }
            FlowMap::Ambient { gain } => {
                ws.r.clear();
                ws.r.extend_from_slice(u);
                for (j, &wj) in w.iter().enumerate() {
                    if wj != 0.0 {
                        for (ri, ci) in ws.r.iter_mut().zip(c.col(j)) {
                            *ri -= ci * wj;
                        }
                    }
                }
                ws.y.resize(c.rows(), 0.0);
                gain.matvec_into(&ws.r, &mut ws.y);
                for (wj, col) in w.iter_mut().zip(c.columns()) {
                    *wj += dot(col, &ws.y);
                }
            }
        }
    }

    /// Runs the flow/projection iteration from the feasible point in `w`,
    /// leaving the best point found in `w`. Returns the number of outer steps
    /// and whether the minimum-norm-point finish ran.
    pub fn solve_in_place(&self, u: &[f64], w: &mut [f64], ws: &mut ClsWorkspace) -> (usize, bool) {
        let q = w.len();
        if q == 1 {
            w[0] = 1.0;
            return (0, false);
        }
        let scale = self.scale.max(dot(u, u));
        let gap_tol = GAP_TOL * scale;

        let (f0, gap0) = self.evaluate(u, w, ws);
        if gap0 <= gap_tol {
            return (0, false);
        }
        ws.best.clear();
        ws.best.extend_from_slice(w);
        let mut best_f = f0;
        let mut best_gap = gap0;

        let mut iters = 0;
        while iters < self.cfg.max_outer {
            iters += 1;
            ws.prev.clear();
            ws.prev.extend_from_slice(w);
            self.flow_step(u, w, ws);
            if w.iter().any(|v| !v.is_finite()) {
                w.copy_from_slice(&ws.prev);
                break;
            }
            project_in_place(w, &mut ws.mu);
            let step = w
                .iter()
                .zip(&ws.prev)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let (f, gap) = self.evaluate(u, w, ws);
            if f < best_f || (f == best_f && gap < best_gap) {
                best_f = f;
                best_gap = gap;
                ws.best.copy_from_slice(w);
            }
            if gap <= gap_tol || step < self.cfg.step_tol {
                break;
            }
        }
        w.copy_from_slice(&ws.best);
        if best_gap <= gap_tol {
            return (iters, false);
        }

        let start = ws
            .best
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(j, _)| j);
        let exact = min_norm_point(&self.design, u, start, gap_tol);
        let fe = residual_norm_sq(&self.design, u, &exact);
        if fe <= best_f {
            w.copy_from_slice(&exact);
        }
        (iters, true)
    }
}

/// Projected-gradient solve of `min_{ω∈simplex} ‖u − Cω‖²` from `w0`.
pub fn solve_cls(p: &ClsProblem, w0: &SimplexVector, cfg: &PgdConfig) -> Result<ClsSolution> {
    ClsSolver::new(p.design.clone(), *cfg)?.solve(&p.target, w0)
}

/// Wolfe's minimum-norm-point method on the translated columns `c_j − u`:
/// returns simplex weights of the point of `co(C)` nearest to `u`.
///
/// The active set ("corral") stays affinely independent, so at most
/// `rows + 1` columns carry weight.
pub fn min_norm_point(c: &Matrix, u: &[f64], start: Option<usize>, gap_tol: f64) -> Vec<f64> {
    let (n, q) = (c.rows(), c.cols());
    let shifted = |j: usize, out: &mut [f64]| {
        for ((o, cj), ui) in out.iter_mut().zip(c.col(j)).zip(u) {
            *o = cj - ui;
        }
    };
    let norms: Vec<f64> = (0..q).map(|j| crate::numkernel::dist_sq(c.col(j), u)).collect();
    let j0 = start.unwrap_or_else(|| {
        (0..q)
            .min_by(|&a, &b| norms[a].total_cmp(&norms[b]))
            .unwrap_or(0)
    });

    let mut corral: Vec<usize> = vec![j0];
    let mut lam: Vec<f64> = vec![1.0];
    let mut x = vec![0.0; n];
    shifted(j0, &mut x);
    let mut pj = vec![0.0; n];

    let max_major = 100 + 10 * q;
    'major: for _ in 0..max_major {
        let xx = dot(&x, &x);
        let (j, v) = (0..q)
            .map(|j| {
                let s: f64 = c.col(j).iter().zip(u).zip(&x).map(|((a, b), xi)| (a - b) * xi).sum();
                (j, s)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if xx - v <= gap_tol || corral.contains(&j) {
            break;
        }
        corral.push(j);
        lam.push(0.0);

        for _minor in 0..=n + 2 {
            let Some(alpha) = affine_minimizer(c, u, &corral) else {
                corral.pop();
                lam.pop();
                break 'major;
            };
            if alpha.iter().all(|&a| a > 0.0) {
                lam = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (&l, &a) in lam.iter().zip(&alpha) {
                if a <= 0.0 {
                    let t = l / (l - a);
                    if t < theta {
                        theta = t;
                    }
                }
            }
            for (l, &a) in lam.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            let drop_idx = lam
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap();
            let mut keep = 0;
            for i in 0..corral.len() {
                if i != drop_idx && lam[i] > 0.0 {
                    corral[keep] = corral[i];
                    lam[keep] = lam[i];
                    keep += 1;
                }
            }
            corral.truncate(keep);
            lam.truncate(keep);
            let s: f64 = lam.iter().sum();
            lam.iter_mut().for_each(|l| *l /= s);
        }

        x.iter_mut().for_each(|xi| *xi = 0.0);
        for (&j, &l) in corral.iter().zip(&lam) {
            shifted(j, &mut pj);
            for (xi, p) in x.iter_mut().zip(&pj) {
                *xi += l * p;
            }
        }
    }

    let mut w = vec![0.0; q];
    let s: f64 = lam.iter().sum();
    for (&j, &l) in corral.iter().zip(&lam) {
        w[j] = l / s;
    }
    w
}

/// Weights `α` (summing to one) of the point of minimum norm in the affine
/// hull of the translated corral columns.
fn affine_minimizer(c: &Matrix, u: &[f64], corral: &[usize]) -> Option<Vec<f64>> {
    let m = corral.len();
    let p: Vec<Vec<f64>> = corral
        .iter()
        .map(|&j| c.col(j).iter().zip(u).map(|(a, b)| a - b).collect())
        .collect();
    let mut gram = vec![0.0; m * m];
    let mut diag_max = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            gram[i * m + j] = dot(&p[i], &p[j]);
        }
        diag_max = diag_max.max(gram[i * m + i]);
    }
    let s = diag_max.max(f64::MIN_POSITIVE);
    let k = m + 1;
    let mut a = vec![0.0; k * k];
    let mut b = vec![0.0; k];
    for i in 0..m {
        for j in 0..m {
            a[i * k + j] = gram[i * m + j];
        }
        a[i * k + m] = s;
        a[m * k + i] = s;
    }
    b[m] = s;
    solve_dense(&mut a, &mut b, k, 1e-13)?;
    b.truncate(m);
    if b.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projection_examples() {
        assert_eq!(project_simplex(&[0.5, 0.5]).unwrap().as_slice(), &[0.5, 0.5]);
        assert_eq!(project_simplex(&[2.0, 0.0]).unwrap().as_slice(), &[1.0, 0.0]);
        assert_eq!(project_simplex(&[-3.0]).unwrap().as_slice(), &[1.0]);
        assert!(project_simplex(&[]).is_err());
        assert!(project_simplex(&[f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn projection_ties() {
        let w = project_simplex(&[1.0, 1.0, 1.0, 0.0]).unwrap();
        for &x in &w.as_slice()[..3] {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(w.as_slice()[3], 0.0);
    }

    #[test]
    fn simplex_vector_validation() {
        assert!(SimplexVector::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexVector::new(vec![1.5, -0.5]).is_err());
        assert!(SimplexVector::new(vec![0.5, 0.4]).is_err());
        assert!(SimplexVector::new(vec![]).is_err());
    }

    #[test]
    fn problem_validation() {
        let c = Matrix::identity(2);
        assert!(ClsProblem::new(vec![1.0, 2.0, 3.0], c.clone()).is_err());
        assert!(ClsProblem::new(vec![f64::INFINITY, 2.0], c).is_err());
        assert!(PgdConfig { tau: 0.0, ..Default::default() }.validate().is_err());
        assert!(PgdConfig { max_outer: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn flow_initial_condition_and_decay() {
        let p = ClsProblem::new(vec![0.0; 3], Matrix::identity(3)).unwrap();
        let w0 = [1.0, 0.0, 0.0];
        assert_eq!(ode_flow(&p, &w0, 0.0).unwrap(), w0.to_vec());
        let w = ode_flow(&p, &w0, 1.0).unwrap();
        assert!((w[0] - (-1.0f64).exp()).abs() < 1e-15);
        assert!(w[1].abs() < 1e-15 && w[2].abs() < 1e-15);
        assert!(ode_flow(&p, &w0, -1.0).is_err());
        assert!(ode_flow(&p, &[1.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn flow_zero_eigenvalue_branch_is_linear() {
        // C = [1 1]: CᵀC has a zero eigenvalue along (1,-1).
        let c = Matrix::from_rows(&[&[1.0, 1.0]]).unwrap();
        let p = ClsProblem::new(vec![2.0], c).unwrap();
        let w = ode_flow(&p, &[0.7, 0.3], 3.0).unwrap();
        // Difference of the components is conserved; the sum relaxes to 2.
        assert!(((w[0] - w[1]) - 0.4).abs() < 1e-12);
        let s = w[0] + w[1];
        let expected = 2.0 + (1.0 - 2.0) * (-2.0f64 * 3.0).exp();
        assert!((s - expected).abs() < 1e-12);
    }

    #[test]
    fn euler_single_step_and_stability() {
        let c = Matrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        let u = vec![1.0, -1.0];
        let p = ClsProblem::new(u.clone(), c.clone()).unwrap();
        let w0 = [0.25, 0.75];
        assert_eq!(ode_flow_euler(&p, &w0, 0.0, 0.01).unwrap(), w0.to_vec());
        let h = 0.01;
        let w = ode_flow_euler(&p, &w0, h, h).unwrap();
        let ctu = c.tr_matvec(&u).unwrap();
        let ctcw = c.gram().matvec(&w0).unwrap();
        for j in 0..2 {
            assert!((w[j] - (w0[j] + h * (ctu[j] - ctcw[j]))).abs() < 1e-15);
        }
        assert!(ode_flow_euler(&p, &w0, 1.0, 1.0).is_err());
    }

    #[test]
    fn flow_map_matches_explicit_flow() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (n, q) in [(2, 3), (4, 3), (2, 40), (3, 3)] {
            let data = (0..n * q).map(|_| rng.random_range(-2.0..2.0)).collect();
            let c = Matrix::new(n, q, data).unwrap();
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let w0: Vec<f64> = (0..q).map(|_| rng.random_range(0.0..1.0)).collect();
            let p = ClsProblem::new(u.clone(), c.clone()).unwrap();
            let solver = ClsSolver::new(c, PgdConfig::default()).unwrap();
            let mut w = w0.clone();
            let mut ws = ClsWorkspace::default();
            solver.flow_step(&u, &mut w, &mut ws);
            let exact = ode_flow(&p, &w0, 0.5).unwrap();
            for (a, b) in w.iter().zip(&exact) {
                assert!((a - b).abs() < 1e-9, "n={n} q={q}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn singleton_simplex() {
        let c = Matrix::from_rows(&[&[3.0], &[1.0]]).unwrap();
        let p = ClsProblem::new(vec![-5.0, 2.0], c).unwrap();
        let s = solve_cls(&p, &SimplexVector::vertex(1, 0), &PgdConfig::default()).unwrap();
        assert_eq!(s.weights.as_slice(), &[1.0]);
    }

    #[test]
    fn attainable_vertex_target() {
        let c = Matrix::from_rows(&[&[0.0, 1.0, 0.0, 2.0], &[0.0, 0.0, 1.0, 2.0]]).unwrap();
        let p = ClsProblem::new(vec![2.0, 2.0], c).unwrap();
        let s = solve_cls(&p, &SimplexVector::uniform(4), &PgdConfig::default()).unwrap();
        assert!(s.objective < 1e-12, "{s:?}");
        assert!((s.weights.as_slice()[3] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn min_norm_point_on_triangle() {
        let c = Matrix::from_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
        // Nearest point of the triangle to (1,1) is (0.5, 0.5).
        let w = min_norm_point(&c, &[1.0, 1.0], None, 1e-14);
        assert!(w[0].abs() < 1e-14);
        assert!((w[1] - 0.5).abs() < 1e-14 && (w[2] - 0.5).abs() < 1e-14);
        // Interior target is reproduced.
        let w = min_norm_point(&c, &[0.2, 0.3], None, 1e-14);
        assert!((w[1] - 0.2).abs() < 1e-12 && (w[2] - 0.3).abs() < 1e-12);
    }
}
