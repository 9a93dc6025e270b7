use std::f64::consts::PI;

use archetype::numkernel::Matrix;
use archetype::samplers::{load_csv, sample, sample_stream, save_csv, DistributionSpec};
use statrs::distribution::{ContinuousCDF, Normal};

/// Kolmogorov–Smirnov statistic of `xs` against `cdf`.
fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at level 0.001.
fn ks_critical(n: usize) -> f64 {
    1.949 / (n as f64).sqrt()
}

#[test]
fn gaussian_moments_converge() {
    let cov = Matrix::from_rows(&[&[4.0, 1.0], &[1.0, 2.0]]).unwrap();
    let spec = DistributionSpec::Gaussian { mean: vec![1.0, -3.0], cov: cov.clone() };
    let n = 200_000;
    let x = sample(&spec, n, 41).unwrap();
    let m = x.column_mean();
    assert!((m[0] - 1.0).abs() < 0.03 && (m[1] + 3.0).abs() < 0.03, "{m:?}");
    let mut s = [[0.0; 2]; 2];
    for p in x.columns() {
        for i in 0..2 {
            for j in 0..2 {
                s[i][j] += (p[i] - m[i]) * (p[j] - m[j]) / n as f64;
            }
        }
    }
    for i in 0..2 {
        for j in 0..2 {
            assert!((s[i][j] - cov.get(i, j)).abs() < 0.05, "{s:?}");
        }
    }
}

#[test]
fn gaussian_marginal_passes_ks() {
    let n = 20_000;
    let x = sample(&DistributionSpec::isotropic_gaussian(3, 2.0), n, 42).unwrap();
    let normal = Normal::new(0.0, 2f64.sqrt()).unwrap();
    for c in 0..3 {
        let xs: Vec<f64> = x.columns().map(|p| p[c]).collect();
        assert!(ks_statistic(xs, |v| normal.cdf(v)) < ks_critical(n));
    }
}

#[test]
fn disk_radius_and_angle_pass_ks() {
    let n = 20_000;
    let x = sample(&DistributionSpec::UniformDisk, n, 43).unwrap();
    let r2: Vec<f64> = x.columns().map(|p| p[0] * p[0] + p[1] * p[1]).collect();
    assert!(ks_statistic(r2, |v| v.clamp(0.0, 1.0)) < ks_critical(n));
    let th: Vec<f64> = x.columns().map(|p| p[1].atan2(p[0])).collect();
    assert!(ks_statistic(th, |v| ((v + PI) / (2.0 * PI)).clamp(0.0, 1.0)) < ks_critical(n));
}

#[test]
fn annular_radius_peaks_near_five() {
    let n = 100_000;
    let x = sample(&DistributionSpec::default_annular(), n, 44).unwrap();
    let mut bins = [0usize; 40];
    for p in x.columns() {
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        let b = (r / 0.25) as usize;
        if b < bins.len() {
            bins[b] += 1;
        }
    }
    let mode = bins.iter().enumerate().max_by_key(|(_, c)| **c).unwrap().0;
    let centre = (mode as f64 + 0.5) * 0.25;
    assert!((centre - 5.0).abs() <= 0.5, "mode at {centre}");
    // The squared radius is normal with mean 25 and variance 50.
    let r2: Vec<f64> = x.columns().take(20_000).map(|p| p[0] * p[0] + p[1] * p[1]).collect();
    let normal = Normal::new(25.0, 50f64.sqrt()).unwrap();
    assert!(ks_statistic(r2, |v| normal.cdf(v)) < ks_critical(20_000));
}

#[test]
fn mixture_weights_respected() {
    let spec = DistributionSpec::two_cluster_mixture(1.0, 0.3);
    let x = sample(&spec, 50_000, 45).unwrap();
    let frac = x.columns().filter(|p| p[0] + p[1] > 0.0).count() as f64 / 50_000.0;
    assert!((frac - 0.3).abs() < 0.01, "{frac}");
}

#[test]
fn streams_are_independent_and_reproducible() {
    let spec = DistributionSpec::UniformDisk;
    let a = sample_stream(&spec, 100, 7, 1).unwrap();
    let b = sample_stream(&spec, 100, 7, 2).unwrap();
    assert_ne!(a, b);
    assert_eq!(a, sample_stream(&spec, 100, 7, 1).unwrap());
}

#[test]
fn csv_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.csv");
    let x = sample(&DistributionSpec::isotropic_gaussian(3, 1e6), 500, 46).unwrap();
    save_csv(&path, &x, Some(&["x", "y", "z"])).unwrap();
    assert_eq!(load_csv(&path).unwrap(), x);
    save_csv(&path, &x, None).unwrap();
    assert_eq!(load_csv(&path).unwrap(), x);
}
