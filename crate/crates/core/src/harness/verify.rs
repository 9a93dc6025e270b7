//! Self-check suite: each item compares a library routine against an
//! independent oracle and reports PASS or FAIL.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{d2_infty, hausdorff, PointSet};
use crate::numkernel::{dist_sq, solve_dense, Matrix};
use crate::oracle::{repeated_point, sector_integral};
use crate::samplers::{sample_stream, DistributionSpec};
use crate::simplex::{ode_flow, project_simplex, solve_cls, ClsProblem, PgdConfig, SimplexVector};
use crate::solver::{fit, AaProblem, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
            .collect()
    }
}

/// The routine under test for the disk-oracle items; swapped out by the
/// negative-control test.
pub type SectorFn = dyn Fn(f64) -> Result<f64> + Sync;

pub fn run_verify(seed: u64) -> VerifyReport {
    run_verify_with(seed, &sector_integral)
}

pub fn run_verify_with(seed: u64, sector: &SectorFn) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport::default();
    let mut push = |name: &'static str, r: Result<(bool, String)>| {
        let (passed, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
        report.checks.push(CheckResult { name, passed, detail });
    };
    push("sector-integral-endpoints", check_endpoints(sector));
    push("sector-integral-quadrature", check_quadrature(sector));
    push("d2inf-worked-example", check_worked_pair());
    push("projection-oracle", check_projection(&mut rng));
    push("cls-oracle", check_cls(&mut rng));
    push("ode-flow-rk4", check_flow(&mut rng));
    push("metric-axioms", check_metric(&mut rng));
    push("single-archetype-mean", check_k1(&mut rng));
    push("shrinkage-bound", check_shrinkage(seed));
    report
}

fn check_endpoints(sector: &SectorFn) -> Result<(bool, String)> {
    let (a, b) = (sector(0.0)?, sector(PI)?);
    Ok((a == 0.0 && b == 0.125, format!("I(0) = {a:e}, I(pi) = {b:e}")))
}

/// Squared distance from polar `(r, θ)` to the triangle spanned by the
/// origin and the arc endpoints at angles `0` and `α`.
fn sector_dist_sq(r: f64, theta: f64, alpha: f64) -> f64 {
    let (x, y) = (r * theta.cos(), r * theta.sin());
    let (ex, ey) = (alpha.cos() - 1.0, alpha.sin());
    if (x - 1.0) * ey - y * ex <= 0.0 {
        return 0.0;
    }
    let t = (((x - 1.0) * ex + y * ey) / (ex * ex + ey * ey)).clamp(0.0, 1.0);
    (x - 1.0 - t * ex).powi(2) + (y - t * ey).powi(2)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (0.5 * (a + m), 0.5 * (m + b));
        let (fl, fr) = (f(l), f(r));
        let left = (m - a) / 6.0 * (fa + 4.0 * fl + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * fr + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, fl, fm, left, 0.5 * eps, depth - 1) + step(f, m, b, fm, fr, fb, right, 0.5 * eps, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, 40)
}

/// `I(α)` by polar quadrature over the sector, normalized by the disk area.
pub fn sector_quadrature(alpha: f64) -> f64 {
    let inner = |theta: f64| adaptive_simpson(&|r| r * sector_dist_sq(r, theta, alpha), 0.0, 1.0, 1e-13);
    adaptive_simpson(&inner, 0.0, alpha, 1e-12) / PI
}

fn check_quadrature(sector: &SectorFn) -> Result<(bool, String)> {
    let alpha = 2.0 * PI / 3.0;
    let (v, q) = (sector(alpha)?, sector_quadrature(alpha));
    Ok(((v - q).abs() <= 1e-8, format!("I(2pi/3) = {v:.12}, quadrature {q:.12}, 3I = {:.6}", 3.0 * v)))
}

fn check_worked_pair() -> Result<(bool, String)> {
    let a = PointSet::from_points(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])?;
    let b = PointSet::from_points(&[[0.5, 0.0], [2.0, 0.1], [2.0, -0.1]])?;
    let (d, h) = (d2_infty(&a, &b)?, hausdorff(&a, &b)?);
    let ok = (d - 1.01f64.sqrt()).abs() <= 1e-12 && (h - 0.5).abs() <= 1e-12;
    Ok((ok, format!("d2,inf = {d:.15} (sqrt 1.01 = {:.15}), d_H = {h}", 1.01f64.sqrt())))
}

fn projection_oracle(v: &[f64]) -> Vec<f64> {
    let q = v.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << q) {
        let support: Vec<usize> = (0..q).filter(|i| mask >> i & 1 == 1).collect();
        let theta = (support.iter().map(|&i| v[i]).sum::<f64>() - 1.0) / support.len() as f64;
        let mut w = vec![0.0; q];
        for &i in &support {
            w[i] = v[i] - theta;
        }
        if w.iter().any(|&x| x < 0.0) {
            continue;
        }
        let d = dist_sq(&w, v);
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, w));
        }
    }
    best.map(|b| b.1).unwrap_or_default()
}

fn check_projection(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let q = rng.random_range(1..=8);
        let v: Vec<f64> = (0..q).map(|_| rng.random_range(-3.0..3.0)).collect();
        let got = project_simplex(&v)?;
        for (a, b) in got.as_slice().iter().zip(projection_oracle(&v)) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok((worst <= 1e-10, format!("1000 vectors, max deviation {worst:.3e}")))
}

/// Minimum over supports of the equality-constrained least-squares
/// solution, solved through its KKT system.
fn cls_oracle(c: &Matrix, u: &[f64]) -> f64 {
    let q = c.cols();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << q) {
        let s: Vec<usize> = (0..q).filter(|i| mask >> i & 1 == 1).collect();
        let m = s.len() + 1;
        let mut a = vec![0.0; m * m];
        let mut b = vec![0.0; m];
        for (r, &i) in s.iter().enumerate() {
            for (cc, &j) in s.iter().enumerate() {
                a[r * m + cc] = 2.0 * c.col(i).iter().zip(c.col(j)).map(|(x, y)| x * y).sum::<f64>();
            }
            a[r * m + m - 1] = 1.0;
            a[(m - 1) * m + r] = 1.0;
            b[r] = 2.0 * c.col(i).iter().zip(u).map(|(x, y)| x * y).sum::<f64>();
        }
        b[m - 1] = 1.0;
        if solve_dense(&mut a, &mut b, m, 1e-11).is_none() || b[..m - 1].iter().any(|&w| w < -1e-12) {
            continue;
        }
        let mut r = u.to_vec();
        for (k, &i) in s.iter().enumerate() {
            for (ri, ci) in r.iter_mut().zip(c.col(i)) {
                *ri -= ci * b[k].max(0.0);
            }
        }
        best = best.min(r.iter().map(|x| x * x).sum());
    }
    best
}

fn random_cls(rng: &mut ChaCha8Rng) -> Result<ClsProblem> {
    let n = rng.random_range(1..=4);
    let q = rng.random_range(1..=5);
    let data: Vec<f64> = (0..n * q).map(|_| rng.random_range(-2.0..2.0)).collect();
    let u: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    ClsProblem::new(u, Matrix::new(n, q, data)?)
}

fn check_cls(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = random_cls(rng)?;
        let sol = solve_cls(&p, &SimplexVector::uniform(p.design().cols()), &PgdConfig::default())?;
        let want = cls_oracle(p.design(), p.target());
        worst = worst.max((sol.objective - want).abs());
    }
    Ok((worst <= 1e-6, format!("100 problems, max objective gap {worst:.3e}")))
}

fn rk4(p: &ClsProblem, w0: &[f64], t: f64, h: f64) -> Result<Vec<f64>> {
    let c = p.design();
    let rhs = |w: &[f64]| -> Result<Vec<f64>> {
        let cw = c.matvec(w)?;
        let r: Vec<f64> = p.target().iter().zip(&cw).map(|(a, b)| a - b).collect();
        c.tr_matvec(&r)
    };
    let steps = (t / h).round() as usize;
    let h = t / steps as f64;
    let mut w = w0.to_vec();
    let axpy = |w: &[f64], k: &[f64], s: f64| -> Vec<f64> { w.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    for _ in 0..steps {
        let k1 = rhs(&w)?;
        let k2 = rhs(&axpy(&w, &k1, 0.5 * h))?;
        let k3 = rhs(&axpy(&w, &k2, 0.5 * h))?;
        let k4 = rhs(&axpy(&w, &k3, h))?;
        for j in 0..w.len() {
            w[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    Ok(w)
}

fn check_flow(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = random_cls(rng)?;
        let w0: Vec<f64> = (0..p.design().cols()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let exact = ode_flow(&p, &w0, 0.5)?;
        for (a, b) in exact.iter().zip(rk4(&p, &w0, 0.5, 1e-4)?) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok((worst <= 1e-8, format!("100 problems, max deviation {worst:.3e}")))
}

fn random_set(rng: &mut ChaCha8Rng, k: usize, d: usize) -> Result<PointSet> {
    PointSet::new(Matrix::new(d, k, (0..k * d).map(|_| rng.random_range(-1.0..1.0)).collect())?)
}

fn check_metric(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut bad = 0;
    for _ in 0..2000 {
        let (k, d) = (rng.random_range(1..=5), rng.random_range(1..=3));
        let (a, b, c) = (random_set(rng, k, d)?, random_set(rng, k, d)?, random_set(rng, k, d)?);
        let (ab, bc, ac) = (d2_infty(&a, &b)?, d2_infty(&b, &c)?, d2_infty(&a, &c)?);
        if ac > ab + bc + 1e-12 || hausdorff(&a, &b)? > ab + 1e-15 {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("2000 triples, {bad} violations")))
}

fn check_k1(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (d, n) = (rng.random_range(1..=5), rng.random_range(1..=300));
        let x = Matrix::new(d, n, (0..d * n).map(|_| rng.random_range(-5.0..5.0)).collect())?;
        let mean = x.column_mean();
        let r = fit(&AaProblem::new(x, 1, 0.0)?, &SolverConfig::default())?;
        worst = worst.max(dist_sq(r.archetypes().col(0), &mean).sqrt());
    }
    Ok((worst <= 1e-6, format!("10 instances, max distance to mean {worst:.3e}")))
}

/// Shrinkage and diameter bounds for penalized fits on normal data.
pub fn shrinkage_margins(x: &Matrix, k: usize, alpha: f64, seed: u64) -> Result<(f64, f64, f64, f64)> {
    let n = x.cols() as f64;
    let mean = x.column_mean();
    let sigma = (x.columns().map(|c| dist_sq(c, &mean)).sum::<f64>() / n).sqrt();
    let r = fit(&AaProblem::new(x.clone(), k, alpha)?, &SolverConfig { seed, ..SolverConfig::default() })?;
    let z = PointSet::new(r.archetypes().clone())?;
    let dist = d2_infty(&z, &repeated_point(&mean, k)?)?;
    let kf = (k as f64).sqrt();
    let bound = 8.0 * kf * alpha.powf(-0.25) * sigma;
    let diam_bound = 4.0 * kf / alpha.sqrt() * r.final_objective().sqrt();
    Ok((dist, bound, z.diameter(), diam_bound))
}

fn check_shrinkage(seed: u64) -> Result<(bool, String)> {
    let spec = DistributionSpec::isotropic_gaussian(2, 10.0);
    let mut ok = true;
    let mut worst = 0.0f64;
    for s in 0..3u64 {
        let x = sample_stream(&spec, 1000, seed, 100 + s)?;
        for alpha in [4.0, 16.0, 64.0, 256.0] {
            let (d, b, diam, db) = shrinkage_margins(&x, 3, alpha, seed.wrapping_add(s))?;
            ok &= d <= b && diam <= db;
            worst = worst.max(d / b).max(diam / db);
        }
    }
    Ok((ok, format!("3 samples x 4 penalties, largest ratio to bound {worst:.3}")))
}
