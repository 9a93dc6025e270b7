//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment; blank lines are ignored.
//! Lists are comma separated, and a list item of the form `start:step:stop`
//! expands to an inclusive arithmetic range.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::samplers::DistributionSpec;
use crate::solver::{Caratheodory, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    UniformDisk,
    Gaussian,
    Annular,
    Mixture,
}

impl Distribution {
    fn name(self) -> &'static str {
        match self {
            Distribution::UniformDisk => "uniform-disk",
            Distribution::Gaussian => "gaussian",
            Distribution::Annular => "annular",
            Distribution::Mixture => "mixture",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "uniform-disk" => Some(Distribution::UniformDisk),
            "gaussian" => Some(Distribution::Gaussian),
            "annular" => Some(Distribution::Annular),
            "mixture" => Some(Distribution::Mixture),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: u8,
    pub distribution: Distribution,
    /// Variance of the isotropic normal.
    pub variance: f64,
    pub radius_mean: f64,
    pub radius_var: f64,
    /// Variances of the second mixture component, one data set per entry.
    pub second_variances: Vec<f64>,
    pub first_weight: f64,
    pub k: usize,
    pub alphas: Vec<f64>,
    pub ns: Vec<usize>,
    pub repeats: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iters: usize,
    pub tau: f64,
    /// Initializations per data set in the robustness runs.
    pub inits: usize,
    /// Penalty of the robustness runs.
    pub robust_alpha: f64,
    /// Iterations shown in snapshot figures; the final iterate is always added.
    pub snapshots: Vec<usize>,
}

/// The three-phase sample-size schedule of the disk experiment, cut at `max_n`.
pub fn disk_schedule(max_n: usize) -> Vec<usize> {
    let mut ns: Vec<usize> = (4..=13).chain((13..=333).step_by(10)).chain((333..=30_033).step_by(300)).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.retain(|&n| n <= max_n);
    ns
}

fn alpha_sweep() -> Vec<f64> {
    let mut a = vec![0.0];
    a.extend((1..=50).map(|i| i as f64 / 10.0));
    a
}

impl ExperimentConfig {
    /// Defaults for experiment `id`. Quick mode shrinks the sample sizes and
    /// repeat counts for desk runs.
    pub fn defaults(id: u8, quick: bool) -> Result<Self> {
        let base = ExperimentConfig {
            experiment: id,
            distribution: Distribution::UniformDisk,
            variance: 10.0,
            radius_mean: 25.0,
            radius_var: 50.0,
            second_variances: vec![4.0, 1.0, 0.25],
            first_weight: 0.5,
            k: 3,
            alphas: vec![0.0],
            ns: vec![30_000],
            repeats: 1,
            seed: 0,
            tol: 1e-6,
            max_iters: 1000,
            tau: 0.5,
            inits: 3,
            robust_alpha: 2.0,
            snapshots: vec![0, 1, 2, 3, 19],
        };
        let n = if quick { 3_000 } else { 30_000 };
        let cfg = match id {
            1 => ExperimentConfig {
                ns: disk_schedule(if quick { 3_333 } else { 30_033 }),
                repeats: if quick { 20 } else { 100 },
                ..base
            },
            2 => ExperimentConfig {
                distribution: Distribution::Gaussian,
                ns: vec![n],
                alphas: alpha_sweep(),
                ..base
            },
            3 => ExperimentConfig {
                distribution: Distribution::Annular,
                ns: vec![n],
                alphas: alpha_sweep(),
                ..base
            },
            4 => ExperimentConfig {
                distribution: Distribution::Mixture,
                ns: vec![n],
                alphas: vec![2.0],
                inits: 2,
                snapshots: vec![0, 1, 2, 5, 10, 20],
                ..base
            },
            _ => return Err(Error::invalid(format!("unknown experiment {id}; expected 1-4"))),
        };
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() || self.alphas.is_empty() {
            return Err(Error::invalid("sample-size and alpha schedules must be nonempty"));
        }
        if self.repeats == 0 || self.inits == 0 {
            return Err(Error::invalid("repeats and inits must be at least 1"));
        }
        if self.ns.iter().any(|&n| n < self.k) {
            return Err(Error::invalid(format!("every sample size must be at least k = {}", self.k)));
        }
        if self.alphas.iter().chain([&self.robust_alpha]).any(|a| !(*a >= 0.0 && a.is_finite())) {
            return Err(Error::invalid("alpha values must be finite and >= 0"));
        }
        if self.distribution == Distribution::Mixture && self.second_variances.is_empty() {
            return Err(Error::invalid("mixture experiments need at least one second_variance"));
        }
        for spec in self.specs() {
            spec.validate()?;
        }
        self.solver(0).validate()
    }

    /// Sampling distributions; several only for the mixture study.
    pub fn specs(&self) -> Vec<DistributionSpec> {
        match self.distribution {
            Distribution::UniformDisk => vec![DistributionSpec::UniformDisk],
            Distribution::Gaussian => vec![DistributionSpec::isotropic_gaussian(2, self.variance)],
            Distribution::Annular => vec![DistributionSpec::Annular {
                radius_mean: self.radius_mean,
                radius_var: self.radius_var,
            }],
            Distribution::Mixture => self
                .second_variances
                .iter()
                .map(|&v| DistributionSpec::two_cluster_mixture(v, self.first_weight))
                .collect(),
        }
    }

    /// Solver settings for one fit with the given seed.
    pub fn solver(&self, seed: u64) -> SolverConfig {
        let mut cfg = SolverConfig {
            tol: self.tol,
            max_iters: self.max_iters,
            seed,
            caratheodory: Caratheodory::Auto,
            ..SolverConfig::default()
        };
        cfg.pgd.tau = self.tau;
        cfg
    }

    /// Default output directory, `out/example<id>/seed-<seed>`.
    pub fn default_out_dir(&self) -> PathBuf {
        Path::new("out").join(format!("example{}", self.experiment)).join(format!("seed-{}", self.seed))
    }

    /// Applies `key = value` lines on top of `self`.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<()> {
        for (key, (line, value)) in parse_pairs(text, origin)? {
            let bad = |msg: String| Error::Parse {
                path: origin.to_string(),
                line,
                msg,
            };
            let num = |v: &str| v.parse::<f64>().map_err(|_| bad(format!("`{key}`: not a number: {v}")));
            let int = |v: &str| v.parse::<u64>().map_err(|_| bad(format!("`{key}`: not an integer: {v}")));
            match key.as_str() {
                "experiment" => {
                    let id = int(&value)?;
                    if id != self.experiment as u64 {
                        return Err(bad(format!("config is for experiment {id}, running {}", self.experiment)));
                    }
                }
                "distribution" => {
                    self.distribution = Distribution::parse(&value).ok_or_else(|| bad(format!("unknown distribution `{value}`")))?
                }
                "variance" => self.variance = num(&value)?,
                "radius_mean" => self.radius_mean = num(&value)?,
                "radius_var" => self.radius_var = num(&value)?,
                "second_variances" => self.second_variances = parse_f64_list(&value).map_err(bad)?,
                "first_weight" => self.first_weight = num(&value)?,
                "k" => self.k = int(&value)? as usize,
                "alpha" => self.alphas = parse_f64_list(&value).map_err(bad)?,
                "n" => self.ns = parse_usize_list(&value).map_err(bad)?,
                "repeats" => self.repeats = int(&value)? as usize,
                "seed" => self.seed = int(&value)?,
                "tol" => self.tol = num(&value)?,
                "max_iters" => self.max_iters = int(&value)? as usize,
                "tau" => self.tau = num(&value)?,
                "inits" => self.inits = int(&value)? as usize,
                "robust_alpha" => self.robust_alpha = num(&value)?,
                "snapshots" => self.snapshots = parse_usize_list(&value).map_err(bad)?,
                _ => return Err(bad(format!("unknown key `{key}`"))),
            }
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        self.apply_text(&text, &path.display().to_string())
    }

    /// Resolved configuration in the same format `apply_text` reads.
    pub fn to_text(&self) -> String {
        let join_f = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let join_u = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let _ = writeln!(s, "experiment = {}", self.experiment);
        let _ = writeln!(s, "distribution = {}", self.distribution.name());
        let _ = writeln!(s, "variance = {:?}", self.variance);
        let _ = writeln!(s, "radius_mean = {:?}", self.radius_mean);
        let _ = writeln!(s, "radius_var = {:?}", self.radius_var);
        let _ = writeln!(s, "second_variances = {}", join_f(&self.second_variances));
        let _ = writeln!(s, "first_weight = {:?}", self.first_weight);
        let _ = writeln!(s, "k = {}", self.k);
        let _ = writeln!(s, "alpha = {}", join_f(&self.alphas));
        let _ = writeln!(s, "n = {}", join_u(&self.ns));
        let _ = writeln!(s, "repeats = {}", self.repeats);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "tol = {:?}", self.tol);
        let _ = writeln!(s, "max_iters = {}", self.max_iters);
        let _ = writeln!(s, "tau = {:?}", self.tau);
        let _ = writeln!(s, "inits = {}", self.inits);
        let _ = writeln!(s, "robust_alpha = {:?}", self.robust_alpha);
        let _ = writeln!(s, "snapshots = {}", join_u(&self.snapshots));
        s
    }
}

/// Key to `(line, value)`; a repeated key is an error.
fn parse_pairs(text: &str, origin: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: origin.to_string(),
            line: i + 1,
            msg,
        };
        let (k, v) = line.split_once('=').ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
        let key = k.trim().to_string();
        if key.is_empty() {
            return Err(parse_err("empty key".into()));
        }
        if out.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
            return Err(parse_err(format!("duplicate key `{key}`")));
        }
    }
    Ok(out)
}

fn parse_f64_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        let nums: Vec<f64> = parts.iter().map(|p| p.parse::<f64>().map_err(|_| format!("not a number: {p}"))).collect::<std::result::Result<_, _>>()?;
        match nums.as_slice() {
            [x] => out.push(*x),
            [start, step, stop] => {
                if !(*step > 0.0) || stop < start {
                    return Err(format!("bad range `{item}`"));
                }
                // Index-based so the grid does not accumulate rounding.
                let count = ((stop - start) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|i| start + i as f64 * step));
            }
            _ => return Err(format!("bad list item `{item}`")),
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

fn parse_usize_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<usize> = item
            .split(':')
            .map(|p| p.trim().parse::<usize>().map_err(|_| format!("not a nonnegative integer: {p}")))
            .collect::<std::result::Result<_, _>>()?;
        match parts.as_slice() {
            [x] => out.push(*x),
            [start, step, stop] if *step > 0 && stop >= start => out.extend((*start..=*stop).step_by(*step)),
            _ => return Err(format!("bad list item `{item}`")),
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_matches_three_phases() {
        let ns = disk_schedule(usize::MAX);
        assert_eq!(&ns[..11], &[4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 23]);
        assert!(ns.contains(&333) && ns.contains(&633) && ns.contains(&30_033));
        assert_eq!(ns.len(), 10 + 32 + 99);
        assert_eq!(*disk_schedule(3_333).last().unwrap(), 3_333);
    }

    #[test]
    fn alpha_sweep_is_exact_on_tenths() {
        let a = alpha_sweep();
        assert_eq!(a.len(), 51);
        assert_eq!(a[1], 0.1);
        assert_eq!(a[50], 5.0);
    }

    #[test]
    fn parses_lists_ranges_and_comments() {
        let mut c = ExperimentConfig::defaults(2, true).unwrap();
        c.apply_text("# sweep\nalpha = 0, 0.5:0.5:2  # trailing\nn = 100, 10:10:30\nseed=9\n", "t").unwrap();
        assert_eq!(c.alphas, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(c.ns, vec![10, 20, 30, 100]);
        assert_eq!(c.seed, 9);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input_with_line_numbers() {
        let mut c = ExperimentConfig::defaults(1, true).unwrap();
        let e = c.apply_text("k = 3\n\nbogus = 1\n", "cfg").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        assert!(c.apply_text("k = x", "cfg").is_err());
        assert!(c.apply_text("k = 3\nk = 4", "cfg").is_err());
        assert!(c.apply_text("no equals sign", "cfg").is_err());
        assert!(c.apply_text("experiment = 2", "cfg").is_err());
        assert!(c.apply_text("alpha = 1:0:2", "cfg").is_err());
        assert!(ExperimentConfig::defaults(5, false).is_err());
    }

    #[test]
    fn text_round_trip() {
        for id in 1..=4 {
            let c = ExperimentConfig::defaults(id, false).unwrap();
            let mut d = ExperimentConfig::defaults(id, true).unwrap();
            d.apply_text(&c.to_text(), "rt").unwrap();
            assert_eq!(c, d);
        }
    }
}
