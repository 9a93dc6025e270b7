//! Closed-form values for archetypes of the uniform measure on the unit
//! disk, where the optimal `k` archetypes are the vertices of an inscribed
//! regular `k`-gon.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::geometry::{d2_infty, PointSet};
use crate::numkernel::Matrix;

/// Mean squared distance (normalized by the disk area `π`) from the points
/// of a circular sector of opening `alpha` to the inscribed triangle spanned
/// by the centre and the two arc endpoints:
///
/// `I(α) = (α/4 − (13/12) sin α + α cos²(α/2) − (1/3) sin(α/2) cos³(α/2)) / 2π`.
///
/// The half-angle cosine is evaluated as `sin(π/2 − α/2)` and `sin α` as
/// `2 sin(α/2) cos(α/2)`, so both endpoints come out exact: `I(0) = 0`,
/// `I(π) = 1/8`.
pub fn sector_integral(alpha: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&alpha) {
        return Err(Error::invalid(format!("sector angle must lie in [0, pi], got {alpha}")));
    }
    let h = 0.5 * alpha;
    let s = h.sin();
    let c = (FRAC_PI_2 - h).sin();
    let sin_alpha = 2.0 * s * c;
    let v = alpha / 4.0 - (13.0 / 12.0) * sin_alpha + alpha * c * c - s * c * c * c / 3.0;
    Ok(v / (2.0 * PI))
}

/// Optimal squared objective `k · I(2π/k)` for `k ≥ 3` archetypes.
pub fn optimal_objective_sq(k: usize) -> Result<f64> {
    if k < 3 {
        return Err(Error::invalid(format!("the disk optimum is a polygon; need k >= 3, got {k}")));
    }
    Ok(k as f64 * sector_integral(2.0 * PI / k as f64)?)
}

/// Vertices of the regular `k`-gon inscribed in the unit circle, the first
/// one at angle `rotation`.
pub fn regular_polygon(k: usize, rotation: f64) -> Result<PointSet> {
    if k < 3 {
        return Err(Error::invalid(format!("a polygon needs k >= 3 vertices, got {k}")));
    }
    let cols: Vec<[f64; 2]> = (0..k)
        .map(|j| {
            let t = rotation + 2.0 * PI * j as f64 / k as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    PointSet::from_points(&cols)
}

/// `min_φ d₂,∞(points, regular_polygon(k, φ))`: grid over one period of
/// rotations at 1e-3 rad, then golden-section refinement around the best
/// grid point. Returns `(distance, rotation)`.
pub fn d2_infty_to_regular_polygon(points: &PointSet) -> Result<(f64, f64)> {
    let k = points.len();
    if points.dim() != 2 {
        return Err(Error::dim("regular polygon comparison is planar"));
    }
    let period = 2.0 * PI / k as f64;
    let eval = |phi: f64| -> Result<f64> { d2_infty(points, &regular_polygon(k, phi)?) };
    let steps = (period / 1e-3).ceil() as usize;
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..steps {
        let phi = i as f64 * period / steps as f64;
        let v = eval(phi)?;
        if v < best.0 {
            best = (v, phi);
        }
    }
    let h = period / steps as f64;
    let (mut a, mut b) = (best.1 - h, best.1 + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (eval(x1)?, eval(x2)?);
    for _ in 0..60 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = eval(x2)?;
        }
    }
    let (fm, xm) = if f1 <= f2 { (f1, x1) } else { (f2, x2) };
    if fm < best.0 {
        best = (fm, xm);
    }
    Ok(best)
}

/// The `k` copies of a point, the degenerate set all regularized archetypes
/// collapse onto for large penalties.
pub fn repeated_point(p: &[f64], k: usize) -> Result<PointSet> {
    let cols: Vec<&[f64]> = (0..k).map(|_| p).collect();
    PointSet::new(Matrix::from_columns(&cols)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{convex_hull_2d, interior_angles};

    #[test]
    fn endpoints_exact() {
        assert_eq!(sector_integral(0.0).unwrap(), 0.0);
        assert_eq!(sector_integral(PI).unwrap(), 0.125);
        assert!(sector_integral(-0.1).is_err());
        assert!(sector_integral(3.2).is_err());
        assert!(sector_integral(f64::NAN).is_err());
    }

    #[test]
    fn three_archetype_value() {
        let v = optimal_objective_sq(3).unwrap();
        assert!((v - 0.035).abs() < 5e-4, "{v}");
        assert!(optimal_objective_sq(2).is_err());
        assert!(optimal_objective_sq(6).unwrap() < optimal_objective_sq(5).unwrap());
    }

    #[test]
    fn decreasing_in_k() {
        let vals: Vec<f64> = (3..=20).map(|k| optimal_objective_sq(k).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn increasing_and_convex() {
        let grid: Vec<f64> = (0..=200).map(|i| PI * i as f64 / 200.0).collect();
        let vals: Vec<f64> = grid.iter().map(|&a| sector_integral(a).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
        for i in (0..=200).step_by(7) {
            for j in (i + 2..=200).step_by(11) {
                let mid = sector_integral(0.5 * (grid[i] + grid[j])).unwrap();
                assert!(mid < 0.5 * (vals[i] + vals[j]));
            }
        }
    }

    #[test]
    fn polygon_construction() {
        let sq = regular_polygon(4, 0.0).unwrap();
        let expect = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (p, e) in sq.iter().zip(expect) {
            assert!((p[0] - e[0]).abs() < 1e-15 && (p[1] - e[1]).abs() < 1e-15);
        }
        for k in 3..=9 {
            let p = regular_polygon(k, 0.3).unwrap();
            assert!(p.iter().all(|v| ((v[0] * v[0] + v[1] * v[1]).sqrt() - 1.0).abs() < 1e-15));
            let target = (k as f64 - 2.0) * 180.0 / k as f64;
            for a in interior_angles(&convex_hull_2d(&p).unwrap()).unwrap() {
                assert!((a - target).abs() < 1e-9);
            }
        }
        assert!(regular_polygon(2, 0.0).is_err());
    }

    #[test]
    fn rotation_search_recovers_angle() {
        let p = regular_polygon(3, 0.987).unwrap();
        let (d, phi) = d2_infty_to_regular_polygon(&p).unwrap();
        assert!(d < 1e-9, "{d}");
        let period = 2.0 * PI / 3.0;
        assert!(((phi - 0.987).rem_euclid(period)).min((0.987 - phi).rem_euclid(period)) < 1e-8);
    }
}
