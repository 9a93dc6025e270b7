//! Independent reference solvers shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Projection onto the simplex by enumerating every candidate support and
/// keeping the feasible candidate nearest to `v`.
pub fn projection_by_enumeration(v: &[f64]) -> Vec<f64> {
    let q = v.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << q) {
        let support: Vec<usize> = (0..q).filter(|i| mask & (1 << i) != 0).collect();
        let theta = (support.iter().map(|&i| v[i]).sum::<f64>() - 1.0) / support.len() as f64;
        let mut w = vec![0.0; q];
        let mut ok = true;
        for &i in &support {
            w[i] = v[i] - theta;
            if w[i] < 0.0 {
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        let d: f64 = w.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum();
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, w));
        }
    }
    best.unwrap().1
}

/// Minimum of `‖u − Cω‖²` over the simplex by enumerating supports and
/// solving each equality-constrained subproblem through its KKT system.
/// `c` is given as columns.
pub fn cls_by_enumeration(c: &[Vec<f64>], u: &[f64]) -> f64 {
    let q = c.len();
    let n = u.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << q) {
        let s: Vec<usize> = (0..q).filter(|i| mask & (1 << i) != 0).collect();
        let m = s.len();
        let mut kkt = DMatrix::<f64>::zeros(m + 1, m + 1);
        let mut rhs = DVector::<f64>::zeros(m + 1);
        for (a, &i) in s.iter().enumerate() {
            for (b, &j) in s.iter().enumerate() {
                kkt[(a, b)] = 2.0 * (0..n).map(|r| c[i][r] * c[j][r]).sum::<f64>();
            }
            kkt[(a, m)] = 1.0;
            kkt[(m, a)] = 1.0;
            rhs[a] = 2.0 * (0..n).map(|r| c[i][r] * u[r]).sum::<f64>();
        }
        rhs[m] = 1.0;
        let svd = kkt.clone().svd(true, true);
        let smax = svd.singular_values.max();
        if svd.singular_values.min() <= 1e-11 * smax {
            continue;
        }
        let Some(sol) = kkt.lu().solve(&rhs) else { continue };
        if (0..m).any(|a| sol[a] < -1e-12) {
            continue;
        }
        let mut r = u.to_vec();
        for (a, &i) in s.iter().enumerate() {
            for k in 0..n {
                r[k] -= c[i][k] * sol[a].max(0.0);
            }
        }
        best = best.min(r.iter().map(|x| x * x).sum());
    }
    best
}

/// Brute force over a simplex grid of the given spacing (q ≤ 3), followed
/// by pairwise-transfer local search.
pub fn cls_by_grid(c: &[Vec<f64>], u: &[f64], spacing: f64) -> f64 {
    let q = c.len();
    let f = |w: &[f64]| -> f64 {
        let mut s = 0.0;
        for k in 0..u.len() {
            let mut r = u[k];
            for j in 0..q {
                r -= c[j][k] * w[j];
            }
            s += r * r;
        }
        s
    };
    let steps = (1.0 / spacing).round() as usize;
    let mut best = (f64::INFINITY, vec![0.0; q]);
    let mut visit = |w: Vec<f64>| {
        let v = f(&w);
        if v < best.0 {
            best = (v, w);
        }
    };
    match q {
        1 => visit(vec![1.0]),
        2 => (0..=steps).for_each(|i| {
            let a = i as f64 / steps as f64;
            visit(vec![a, 1.0 - a])
        }),
        3 => {
            for i in 0..=steps {
                for j in 0..=steps - i {
                    let (a, b) = (i as f64 / steps as f64, j as f64 / steps as f64);
                    visit(vec![a, b, (1.0 - a - b).max(0.0)]);
                }
            }
        }
        _ => panic!("grid oracle supports q <= 3"),
    }
    let (mut fv, mut w) = best;
    let mut h = spacing;
    while h > 1e-13 {
        let mut improved = false;
        for i in 0..q {
            for j in 0..q {
                if i == j {
                    continue;
                }
                let t = h.min(w[j]);
                if t <= 0.0 {
                    continue;
                }
                let mut cand = w.clone();
                cand[i] += t;
                cand[j] -= t;
                let v = f(&cand);
                if v < fv {
                    fv = v;
                    w = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    fv
}

/// Classic fourth-order Runge–Kutta for `ω' = Cᵀu − CᵀCω`.
pub fn rk4_flow(c: &[Vec<f64>], u: &[f64], w0: &[f64], t: f64, h: f64) -> Vec<f64> {
    let q = c.len();
    let n = u.len();
    let rhs = |w: &[f64]| -> Vec<f64> {
        let mut r = u.to_vec();
        for j in 0..q {
            for k in 0..n {
                r[k] -= c[j][k] * w[j];
            }
        }
        (0..q).map(|j| (0..n).map(|k| c[j][k] * r[k]).sum()).collect()
    };
    let steps = (t / h).round() as usize;
    let h = t / steps as f64;
    let mut w = w0.to_vec();
    for _ in 0..steps {
        let k1 = rhs(&w);
        let w2: Vec<f64> = w.iter().zip(&k1).map(|(a, b)| a + 0.5 * h * b).collect();
        let k2 = rhs(&w2);
        let w3: Vec<f64> = w.iter().zip(&k2).map(|(a, b)| a + 0.5 * h * b).collect();
        let k3 = rhs(&w3);
        let w4: Vec<f64> = w.iter().zip(&k3).map(|(a, b)| a + h * b).collect();
        let k4 = rhs(&w4);
        for j in 0..q {
            w[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    w
}

/// Gift-wrapping (Jarvis march) hull of planar points; returns the vertex
/// set, sorted, with collinear boundary points excluded.
pub fn gift_wrap(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let d2 = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    let start = pts[0];
    let mut hull = vec![];
    let mut cur = start;
    loop {
        hull.push(cur);
        let mut next = if pts[0] == cur { pts[1] } else { pts[0] };
        for &p in &pts {
            if p == cur {
                continue;
            }
            let c = cross(cur, next, p);
            if c < 0.0 || (c == 0.0 && d2(cur, p) > d2(cur, next)) {
                next = p;
            }
        }
        cur = next;
        if cur == start || hull.len() > pts.len() {
            break;
        }
    }
    hull.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    hull
}
