//! Planar hulls, polygon measures and distances between point sets.

use crate::error::{Error, Result};
use crate::numkernel::{dist_sq, Matrix};

/// Finite, nonempty collection of points in ℝᵈ stored as matrix columns.
/// Order carries no meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Matrix,
}

impl PointSet {
    pub fn new(points: Matrix) -> Result<Self> {
        if points.cols() == 0 || points.rows() == 0 {
            return Err(Error::invalid("point set must contain at least one point"));
        }
        Ok(Self { points })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        Self::new(Matrix::from_columns(points)?)
    }

    pub fn len(&self) -> usize {
        self.points.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.points.cols() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.rows()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.col(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.columns()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.points
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                best = best.max(dist_sq(self.point(i), self.point(j)));
            }
        }
        best.sqrt()
    }
}

/// Convex polygon with counter-clockwise vertices and no collinear
/// triples. Degenerate hulls (a point or a segment) have fewer than three
/// vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon2D {
    vertices: Vec<[f64; 2]>,
}

/// Edge tolerance for the closed-polygon membership test.
pub const EDGE_TOL: f64 = 1e-10;

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl Polygon2D {
    /// Accepts vertices already in strictly convex counter-clockwise order.
    pub fn from_ccw(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("polygon vertices"));
        }
        let m = vertices.len();
        if m >= 3 {
            for i in 0..m {
                let c = cross(vertices[i], vertices[(i + 1) % m], vertices[(i + 2) % m]);
                if c <= 0.0 {
                    return Err(Error::invalid("vertices are not strictly convex and counter-clockwise"));
                }
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

fn planar(pts: &Matrix) -> Result<()> {
    if pts.rows() != 2 {
        return Err(Error::dim(format!("planar operation on {}-dimensional points", pts.rows())));
    }
    Ok(())
}

/// Column indices of the hull vertices of planar points, counter-clockwise
/// starting from the lowest-leftmost point (Andrew's monotone chain).
/// Collinear boundary points and duplicates are dropped.
pub fn convex_hull_indices(pts: &Matrix) -> Result<Vec<usize>> {
    planar(pts)?;
    if pts.cols() == 0 {
        return Err(Error::invalid("convex hull of an empty set"));
    }
    let p = |i: usize| [pts.get(0, i), pts.get(1, i)];
    let mut idx: Vec<usize> = (0..pts.cols()).collect();
    idx.sort_by(|&a, &b| {
        let (pa, pb) = (p(a), p(b));
        pa[0].total_cmp(&pb[0]).then(pa[1].total_cmp(&pb[1])).then(a.cmp(&b))
    });
    idx.dedup_by(|a, b| p(*a) == p(*b));
    if idx.len() <= 2 {
        return Ok(idx);
    }

    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for &i in &idx {
        while hull.len() >= 2 && cross(p(hull[hull.len() - 2]), p(hull[hull.len() - 1]), p(i)) <= 0.0 {
            hull.pop();
        }
        hull.push(i);
    }
    let lower = hull.len() + 1;
    for &i in idx.iter().rev().skip(1) {
        while hull.len() >= lower && cross(p(hull[hull.len() - 2]), p(hull[hull.len() - 1]), p(i)) <= 0.0 {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    Ok(hull)
}

pub fn convex_hull_2d(pts: &PointSet) -> Result<Polygon2D> {
    let idx = convex_hull_indices(pts.as_matrix())?;
    let m = pts.as_matrix();
    Ok(Polygon2D {
        vertices: idx.iter().map(|&i| [m.get(0, i), m.get(1, i)]).collect(),
    })
}

/// Shoelace area; zero for degenerate polygons.
pub fn polygon_area(poly: &Polygon2D) -> f64 {
    let v = &poly.vertices;
    if v.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..v.len() {
        let (a, b) = (v[i], v[(i + 1) % v.len()]);
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

/// Interior angle at each vertex, in degrees.
pub fn interior_angles(poly: &Polygon2D) -> Result<Vec<f64>> {
    let v = &poly.vertices;
    let m = v.len();
    if m < 3 {
        return Err(Error::invalid(format!("interior angles need 3 or more vertices, got {m}")));
    }
    Ok((0..m)
        .map(|i| {
            let prev = v[(i + m - 1) % m];
            let next = v[(i + 1) % m];
            let a = [prev[0] - v[i][0], prev[1] - v[i][1]];
            let b = [next[0] - v[i][0], next[1] - v[i][1]];
            let c = a[0] * b[1] - a[1] * b[0];
            let d = a[0] * b[0] + a[1] * b[1];
            c.abs().atan2(d).to_degrees()
        })
        .collect())
}

fn segment_dist_sq(x: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let e = [b[0] - a[0], b[1] - a[1]];
    let len2 = e[0] * e[0] + e[1] * e[1];
    let t = if len2 > 0.0 {
        (((x[0] - a[0]) * e[0] + (x[1] - a[1]) * e[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let p = [a[0] + t * e[0], a[1] + t * e[1]];
    (x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2)
}

fn boundary_dist(poly: &Polygon2D, x: [f64; 2]) -> f64 {
    let v = &poly.vertices;
    match v.len() {
        0 => f64::INFINITY,
        1 => dist_sq(&x, &v[0]).sqrt(),
        m => (0..m)
            .map(|i| segment_dist_sq(x, v[i], v[(i + 1) % m]))
            .fold(f64::INFINITY, f64::min)
            .sqrt(),
    }
}

/// Closed-polygon membership; points within [`EDGE_TOL`] of the boundary
/// count as inside.
pub fn contains(poly: &Polygon2D, x: [f64; 2]) -> bool {
    let v = &poly.vertices;
    let m = v.len();
    if m < 3 {
        return boundary_dist(poly, x) <= EDGE_TOL;
    }
    (0..m).all(|i| {
        let (a, b) = (v[i], v[(i + 1) % m]);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        cross(a, b, x) / len >= -EDGE_TOL
    })
}

/// Euclidean distance from `x` to the closed polygon.
pub fn dist_to_hull(x: [f64; 2], poly: &Polygon2D) -> f64 {
    if contains(poly, x) {
        0.0
    } else {
        boundary_dist(poly, x)
    }
}

/// Symmetric Hausdorff distance between two finite sets.
pub fn hausdorff(a: &PointSet, b: &PointSet) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::dim("point sets live in different dimensions"));
    }
    let directed = |from: &PointSet, to: &PointSet| {
        from.iter()
            .map(|p| to.iter().map(|q| dist_sq(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0f64, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)).sqrt())
}

/// Cardinality up to which `d2_infty` enumerates all permutations.
pub const EXHAUSTIVE_MAX_K: usize = 8;
/// Largest cardinality `d2_infty` accepts.
pub const D2_INFTY_MAX_K: usize = 64;

/// `min_σ max_i ‖a_i − b_σ(i)‖`: the bottleneck matching distance between
/// equal-size sets.
pub fn d2_infty(a: &PointSet, b: &PointSet) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "d2_infty needs equal cardinalities, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.dim() != b.dim() {
        return Err(Error::dim("point sets live in different dimensions"));
    }
    let k = a.len();
    if k > D2_INFTY_MAX_K {
        return Err(Error::invalid(format!("d2_infty supports at most {D2_INFTY_MAX_K} points, got {k}")));
    }
    let d: Vec<f64> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .map(|(i, j)| dist_sq(a.point(i), b.point(j)))
        .collect();
    let best = if k <= EXHAUSTIVE_MAX_K {
        exhaustive_bottleneck(&d, k)
    } else {
        assignment_bottleneck(&d, k)
    };
    Ok(best.sqrt())
}

/// Heap's algorithm over all permutations.
fn exhaustive_bottleneck(d: &[f64], k: usize) -> f64 {
    let mut perm: Vec<usize> = (0..k).collect();
    let cost = |perm: &[usize]| (0..k).map(|i| d[i * k + perm[i]]).fold(0.0f64, f64::max);
    let mut best = cost(&perm);
    let mut c = vec![0usize; k];
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(cost(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// Binary search over the sorted distances for the smallest threshold that
/// admits a perfect matching.
fn assignment_bottleneck(d: &[f64], k: usize) -> f64 {
    let mut values = d.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let (mut lo, mut hi) = (0, values.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(d, k, values[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    values[lo]
}

fn has_perfect_matching(d: &[f64], k: usize, thr: f64) -> bool {
    fn augment(u: usize, d: &[f64], k: usize, thr: f64, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for v in 0..k {
            if d[u * k + v] <= thr && !seen[v] {
                seen[v] = true;
                if owner[v].is_none_or(|w| augment(w, d, k, thr, seen, owner)) {
                    owner[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; k];
    (0..k).all(|u| {
        let mut seen = vec![false; k];
        augment(u, d, k, thr, &mut seen, &mut owner)
    })
}
