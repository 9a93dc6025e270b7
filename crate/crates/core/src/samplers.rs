//! Seeded generators for the experiment distributions, plus CSV input and
//! output of point clouds.
//!
//! Every sampler draws from a ChaCha8 stream keyed by `(seed, stream)`.
//! Points are generated one after another with a fixed number of draws per
//! point, so a sample of size `n` is always the prefix of a larger sample
//! with the same key.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numkernel::{cholesky, Matrix};

/// Generator for stream `stream` of seed `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub cov: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    /// Uniform on the planar unit disk via `(√r cos 2πθ, √r sin 2πθ)`.
    UniformDisk,
    Gaussian { mean: Vec<f64>, cov: Matrix },
    /// `(√|r| cos 2πθ, √|r| sin 2πθ)` with `r ~ N(radius_mean, radius_var)`.
    Annular { radius_mean: f64, radius_var: f64 },
    GaussianMixture { components: Vec<MixtureComponent> },
}

fn scaled_identity(d: usize, s: f64) -> Matrix {
    let mut m = Matrix::identity(d);
    for i in 0..d {
        m.set(i, i, s);
    }
    m
}

impl DistributionSpec {
    /// Centred isotropic normal `N(0, variance·I)` in `d` dimensions.
    pub fn isotropic_gaussian(d: usize, variance: f64) -> Self {
        DistributionSpec::Gaussian {
            mean: vec![0.0; d],
            cov: scaled_identity(d, variance),
        }
    }

    /// Annulus concentrated near radius 5: `r ~ N(25, 50)`.
    pub fn default_annular() -> Self {
        DistributionSpec::Annular {
            radius_mean: 25.0,
            radius_var: 50.0,
        }
    }

    /// Equal-weight mixture of `N((8,8), 9I)` and `N((−8,−8), s·I)`.
    pub fn two_cluster_mixture(second_variance: f64, first_weight: f64) -> Self {
        DistributionSpec::GaussianMixture {
            components: vec![
                MixtureComponent {
                    weight: first_weight,
                    mean: vec![8.0, 8.0],
                    cov: scaled_identity(2, 9.0),
                },
                MixtureComponent {
                    weight: 1.0 - first_weight,
                    mean: vec![-8.0, -8.0],
                    cov: scaled_identity(2, second_variance),
                },
            ],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DistributionSpec::UniformDisk | DistributionSpec::Annular { .. } => 2,
            DistributionSpec::Gaussian { mean, .. } => mean.len(),
            DistributionSpec::GaussianMixture { components } => components.first().map_or(0, |c| c.mean.len()),
        }
    }

    /// Population mean.
    pub fn mean(&self) -> Vec<f64> {
        match self {
            DistributionSpec::UniformDisk | DistributionSpec::Annular { .. } => vec![0.0, 0.0],
            DistributionSpec::Gaussian { mean, .. } => mean.clone(),
            DistributionSpec::GaussianMixture { components } => {
                let mut m = vec![0.0; self.dim()];
                for c in components {
                    for (mi, ci) in m.iter_mut().zip(&c.mean) {
                        *mi += c.weight * ci;
                    }
                }
                m
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn check_gaussian(mean: &[f64], cov: &Matrix) -> Result<()> {
            if mean.is_empty() {
                return Err(Error::invalid("gaussian mean must be nonempty"));
            }
            if mean.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("gaussian mean"));
            }
            if cov.rows() != mean.len() || cov.cols() != mean.len() {
                return Err(Error::dim(format!(
                    "covariance is {}x{}, mean has length {}",
                    cov.rows(),
                    cov.cols(),
                    mean.len()
                )));
            }
            for i in 0..cov.rows() {
                for j in 0..i {
                    if cov.get(i, j) != cov.get(j, i) {
                        return Err(Error::invalid("covariance is not symmetric"));
                    }
                }
            }
            if cholesky(cov).is_none() {
                return Err(Error::invalid("covariance is not positive definite"));
            }
            Ok(())
        }
        match self {
            DistributionSpec::UniformDisk => Ok(()),
            DistributionSpec::Gaussian { mean, cov } => check_gaussian(mean, cov),
            DistributionSpec::Annular { radius_mean, radius_var } => {
                if !radius_mean.is_finite() || !(*radius_var > 0.0 && radius_var.is_finite()) {
                    return Err(Error::invalid("annulus needs a finite mean and positive variance"));
                }
                Ok(())
            }
            DistributionSpec::GaussianMixture { components } => {
                if components.is_empty() {
                    return Err(Error::invalid("mixture needs at least one component"));
                }
                let d = components[0].mean.len();
                for c in components {
                    if c.mean.len() != d {
                        return Err(Error::dim("mixture components differ in dimension"));
                    }
                    check_gaussian(&c.mean, &c.cov)?;
                }
                let w: Vec<f64> = components.iter().map(|c| c.weight).collect();
                if crate::simplex::violation(&w) > 1e-12 {
                    return Err(Error::invalid("mixture weights must be nonnegative and sum to one"));
                }
                Ok(())
            }
        }
    }
}

/// Box–Muller pair of independent standard normals.
fn normal_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = 2.0 * PI * u2;
    (r * t.cos(), r * t.sin())
}

fn standard_normals<R: Rng>(rng: &mut R, out: &mut [f64]) {
    for pair in out.chunks_mut(2) {
        let (a, b) = normal_pair(rng);
        pair[0] = a;
        if pair.len() > 1 {
            pair[1] = b;
        }
    }
}

/// `mean + L z` for the lower Cholesky factor `L`.
fn affine_normal(mean: &[f64], chol: &Matrix, z: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = mean[i];
        for (j, zj) in z.iter().enumerate().take(i + 1) {
            s += chol.get(i, j) * zj;
        }
        *o = s;
    }
}

/// Draws `n` points (as columns) from stream 0 of `seed`.
pub fn sample(spec: &DistributionSpec, n: usize, seed: u64) -> Result<Matrix> {
    sample_stream(spec, n, seed, 0)
}

pub fn sample_stream(spec: &DistributionSpec, n: usize, seed: u64, stream: u64) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    spec.validate()?;
    let d = spec.dim();
    let mut rng = rng_for(seed, stream);
    let mut data = vec![0.0; d * n];
    let mut z = vec![0.0; d];
    match spec {
        DistributionSpec::UniformDisk => {
            for p in data.chunks_exact_mut(2) {
                let r = rng.random::<f64>();
                let theta = rng.random::<f64>();
                let rho = r.sqrt();
                p[0] = rho * (2.0 * PI * theta).cos();
                p[1] = rho * (2.0 * PI * theta).sin();
            }
        }
        DistributionSpec::Annular { radius_mean, radius_var } => {
            let sd = radius_var.sqrt();
            for p in data.chunks_exact_mut(2) {
                let theta = rng.random::<f64>();
                let (g, _) = normal_pair(&mut rng);
                let rho = (radius_mean + sd * g).abs().sqrt();
                p[0] = rho * (2.0 * PI * theta).cos();
                p[1] = rho * (2.0 * PI * theta).sin();
            }
        }
        DistributionSpec::Gaussian { mean, cov } => {
            let l = cholesky(cov).expect("validated");
            for p in data.chunks_exact_mut(d) {
                standard_normals(&mut rng, &mut z);
                affine_normal(mean, &l, &z, p);
            }
        }
        DistributionSpec::GaussianMixture { components } => {
            let chols: Vec<Matrix> = components.iter().map(|c| cholesky(&c.cov).expect("validated")).collect();
            for p in data.chunks_exact_mut(d) {
                let u = rng.random::<f64>();
                let mut acc = 0.0;
                let mut pick = components.len() - 1;
                for (i, c) in components.iter().enumerate() {
                    acc += c.weight;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                standard_normals(&mut rng, &mut z);
                affine_normal(&components[pick].mean, &chols[pick], &z, p);
            }
        }
    }
    Matrix::new(d, n, data)
}

/// Reads points, one per row, from a comma-separated file. A first row that
/// does not parse as numbers is taken as a header.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(&shown, e))?;

    let mut width: Option<usize> = None;
    let mut data = Vec::new();
    let mut count = 0;
    for (idx, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(&shown, e))?;
        let line = rec.position().map_or(idx + 1, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, _>> = rec.iter().map(str::parse::<f64>).collect();
        if idx == 0 && parsed.iter().any(|p| p.is_err()) {
            continue;
        }
        match width {
            None => width = Some(rec.len()),
            Some(w) if w != rec.len() => {
                return Err(Error::Parse {
                    path: shown,
                    line,
                    msg: format!("expected {w} fields, found {}", rec.len()),
                })
            }
            _ => {}
        }
        for (col, (field, value)) in rec.iter().zip(parsed).enumerate() {
            match value {
                Ok(v) if v.is_finite() => data.push(v),
                _ => {
                    return Err(Error::Parse {
                        path: shown,
                        line,
                        msg: format!("column {}: {field:?} is not a finite number", col + 1),
                    })
                }
            }
        }
        count += 1;
    }
    let Some(d) = width else {
        return Err(Error::Parse {
            path: shown,
            line: 1,
            msg: "no data rows".into(),
        });
    };
    Matrix::new(d, count, data)
}

fn csv_error(path: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            path: path.to_string(),
            line,
            msg: format!("{other:?}"),
        },
    }
}

/// Formats a float with 17 significant digits, enough to round-trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes points (matrix columns) one per row.
pub fn save_csv(path: impl AsRef<Path>, points: &Matrix, header: Option<&[&str]>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    if let Some(h) = header {
        writeln!(out, "{}", h.join(","))?;
    }
    for p in points.columns() {
        let row: Vec<String> = p.iter().map(|&v| fmt_f64(v)).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_points_inside() {
        let x = sample(&DistributionSpec::UniformDisk, 5000, 1).unwrap();
        assert!(x.columns().all(|p| p[0] * p[0] + p[1] * p[1] <= 1.0));
    }

    #[test]
    fn deterministic_and_nested() {
        for spec in [
            DistributionSpec::UniformDisk,
            DistributionSpec::isotropic_gaussian(3, 10.0),
            DistributionSpec::default_annular(),
            DistributionSpec::two_cluster_mixture(4.0, 0.5),
        ] {
            let a = sample(&spec, 50, 7).unwrap();
            let b = sample(&spec, 50, 7).unwrap();
            assert_eq!(a, b);
            let big = sample(&spec, 120, 7).unwrap();
            assert_eq!(a.data(), &big.data()[..a.data().len()]);
            let other = sample_stream(&spec, 50, 7, 1).unwrap();
            assert_ne!(a, other);
        }
    }

    #[test]
    fn invalid_specs() {
        let bad_cov = DistributionSpec::Gaussian {
            mean: vec![0.0, 0.0],
            cov: Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap(),
        };
        assert!(sample(&bad_cov, 3, 0).is_err());
        let bad_w = DistributionSpec::two_cluster_mixture(1.0, 1.5);
        assert!(sample(&bad_w, 3, 0).is_err());
        assert!(sample(&DistributionSpec::UniformDisk, 0, 0).is_err());
        let bad_ann = DistributionSpec::Annular {
            radius_mean: 25.0,
            radius_var: -1.0,
        };
        assert!(bad_ann.validate().is_err());
    }

    #[test]
    fn mixture_mean() {
        let spec = DistributionSpec::two_cluster_mixture(0.25, 0.5);
        assert_eq!(spec.mean(), vec![0.0, 0.0]);
    }

    #[test]
    fn csv_basic_and_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        std::fs::write(&p, "0,0\n1,0\n0,1\n").unwrap();
        let m = load_csv(&p).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 3));
        assert_eq!(m.col(1), &[1.0, 0.0]);

        std::fs::write(&p, "x,y\n1.5,2\n3,4\n").unwrap();
        let m = load_csv(&p).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(m.col(0), &[1.5, 2.0]);
    }

    #[test]
    fn csv_errors_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "0,0\n1,0,5\n").unwrap();
        match load_csv(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        std::fs::write(&p, "0,0\n1,abc\n").unwrap();
        match load_csv(&p) {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("column 2"));
            }
            other => panic!("unexpected {other:?}"),
        }
        std::fs::write(&p, "").unwrap();
        assert!(load_csv(&p).is_err());
        assert!(matches!(load_csv(dir.path().join("missing.csv")), Err(Error::Io(_))));
    }
}
