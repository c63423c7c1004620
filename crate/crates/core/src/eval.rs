//! Evaluation harness: synthetic histograms, error measurement against the
//! analytic guarantees, parameter sweeps and power-law fits.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::circulant::CirculantOperator;
use crate::error::{Error, Result};
use crate::mechanism::{privatize, Histogram, ReconstructionConfig};
use crate::norm::Norm;
use crate::reconstruct::{reconstruct_profile, OperatorCache, Profile};
use crate::{derive_seed, seeded_rng};

/// Default exponent for [`Distribution::Zipf`].
pub const DEFAULT_ZIPF_ALPHA: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// Every item has count `c`.
    PointMass(u64),
    /// Counts i.i.d. uniform on `0..=n`.
    UniformCounts,
    /// Count of the item with rank `k` is `round(n · k^{-α})`; ranks are shuffled.
    Zipf(f64),
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::PointMass(c) => write!(f, "point_mass:{c}"),
            Distribution::UniformCounts => f.write_str("uniform"),
            Distribution::Zipf(a) => write!(f, "zipf:{a}"),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    /// Parses `point_mass:C`, `uniform`, `zipf` or `zipf:A`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::invalid("dist", reason);
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        match (kind, arg) {
            ("point_mass", Some(c)) => c
                .parse()
                .map(Distribution::PointMass)
                .map_err(|_| bad(format!("point_mass count `{c}` is not a non-negative integer"))),
            ("uniform", None) => Ok(Distribution::UniformCounts),
            ("zipf", None) => Ok(Distribution::Zipf(DEFAULT_ZIPF_ALPHA)),
            ("zipf", Some(a)) => match a.parse::<f64>() {
                Ok(alpha) if alpha.is_finite() && alpha > 0.0 => Ok(Distribution::Zipf(alpha)),
                _ => Err(bad(format!("zipf exponent `{a}` must be a positive number"))),
            },
            _ => Err(bad(format!(
                "unknown distribution `{s}` (expected point_mass:C, uniform or zipf:A)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub distribution: Distribution,
    pub d: usize,
    pub n: u64,
    pub seed: u64,
}

pub fn synth_histogram(spec: &SynthSpec) -> Result<Histogram> {
    if spec.d == 0 {
        return Err(Error::invalid("d", "must be at least 1"));
    }
    let n = spec.n;
    let mut rng = seeded_rng(spec.seed);
    let counts = match spec.distribution {
        Distribution::PointMass(c) => {
            if c > n {
                return Err(Error::invalid("point_mass", format!("count {c} exceeds n = {n}")));
            }
            vec![c; spec.d]
        }
        Distribution::UniformCounts => (0..spec.d).map(|_| rng.random_range(0..=n)).collect(),
        Distribution::Zipf(alpha) => {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Error::invalid("zipf", format!("exponent must be positive, got {alpha}")));
            }
            let mut ranks: Vec<usize> = (1..=spec.d).collect();
            ranks.shuffle(&mut rng);
            ranks
                .into_iter()
                .map(|k| ((n as f64) * (k as f64).powf(-alpha)).round() as u64)
                .collect()
        }
    };
    Histogram::new(counts, n)
}

/// Exact profile of `h`: `f[t] = |{ℓ : h[ℓ] = t}| / d`.
pub fn true_profile(h: &Histogram) -> Profile {
    let mut bins = vec![0u64; h.n() as usize + 1];
    for &c in h.counts() {
        bins[c as usize] += 1;
    }
    let d = h.d() as f64;
    Profile::new(bins.into_iter().map(|k| k as f64 / d).collect())
        .expect("profile of a valid histogram")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoreticalBounds {
    pub b1: f64,
    pub b2: f64,
    pub binf: f64,
}

impl TheoreticalBounds {
    pub fn get(&self, p: Norm) -> f64 {
        match p {
            Norm::L1 => self.b1,
            Norm::L2 => self.b2,
            Norm::Linf => self.binf,
        }
    }
}

/// High-probability deviations `‖f̃ − A f‖_p` of the noisy profile from its mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviations {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

pub fn deviation_bounds(cfg: &ReconstructionConfig, f: &Profile, op: &CirculantOperator) -> Result<Deviations> {
    if f.n() != cfg.n || op.n() != cfg.n || op.b() != cfg.b() {
        return Err(Error::invalid("f", "profile, config and operator disagree on (n, B)"));
    }
    let d = cfg.d as f64;
    let log_eta = (1.0 / cfg.eta).ln();
    let expected = op.apply(&f.padded(cfg.b()))?;
    let root_sum: f64 = expected.iter().map(|&e| e.max(0.0).sqrt()).sum();
    let log_n = (cfg.n as f64 / cfg.eta).ln();
    Ok(Deviations {
        l1: root_sum / d.sqrt() + (2.0 * log_eta / d).sqrt(),
        l2: (1.0 / d).sqrt() + (log_eta / d).sqrt(),
        linf: (2.0 / op.p_norm() * log_n).sqrt() / d.sqrt() + log_n / (3.0 * d),
    })
}

/// High-probability bounds on `‖r − f‖_p`: `2 · ‖A⁻¹‖_p-bound · deviation_p`, with a
/// further factor 2 on ℓ∞ for rounding.
pub fn theoretical_bounds(cfg: &ReconstructionConfig, f: &Profile, op: &CirculantOperator) -> Result<TheoreticalBounds> {
    let dev = deviation_bounds(cfg, f, op)?;
    let norms = op.norm_bounds()?;
    Ok(TheoreticalBounds {
        b1: 2.0 * norms.bound_1_inf * dev.l1,
        b2: 2.0 * norms.bound_2 * dev.l2,
        binf: 2.0 * 2.0 * norms.bound_1_inf * dev.linf,
    })
}

/// One measured error of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub d: usize,
    pub n: u64,
    pub epsilon: f64,
    pub eta: f64,
    pub trial: u64,
    pub p: Norm,
    pub err: f64,
    pub bound: f64,
    pub seconds: f64,
}

/// Privatizes the synthetic histogram once (unclipped, noise from `seed`) and
/// reconstructs it under each norm.
pub fn run_trial(spec: &SynthSpec, cfg: &ReconstructionConfig, trial: u64, seed: u64) -> Result<[ErrorReport; 3]> {
    if spec.d != cfg.d || spec.n != cfg.n {
        return Err(Error::invalid("cfg", "synthetic spec and config disagree on (d, n)"));
    }
    let h = synth_histogram(spec)?;
    let f = true_profile(&h);
    let mut rng = seeded_rng(seed);
    let sketch = privatize(&h, cfg.epsilon, false, &mut rng)?;
    let op = OperatorCache::global().get(cfg)?;
    let bounds = theoretical_bounds(cfg, &f, &op)?;

    let mut out = Vec::with_capacity(3);
    for p in Norm::ALL {
        let start = Instant::now();
        let r = reconstruct_profile(&sketch, &cfg.with_norm(p), &mut rng)?;
        let seconds = start.elapsed().as_secs_f64();
        out.push(ErrorReport {
            d: cfg.d,
            n: cfg.n,
            epsilon: cfg.epsilon,
            eta: cfg.eta,
            trial,
            p,
            err: p.distance(r.values(), f.values()),
            bound: bounds.get(p),
            seconds,
        });
    }
    Ok([out[0], out[1], out[2]])
}

/// Runs `trials` trials of every grid cell. Rows come back in cell, trial, norm order.
pub fn sweep(grid: &[(SynthSpec, ReconstructionConfig)], trials: u64, master_seed: u64) -> Result<Vec<ErrorReport>> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "must contain at least one cell"));
    }
    let jobs: Vec<(usize, u64)> = (0..grid.len())
        .flat_map(|cell| (0..trials).map(move |t| (cell, t)))
        .collect();
    let results: Vec<[ErrorReport; 3]> = jobs
        .par_iter()
        .map(|&(cell, trial)| {
            let (spec, cfg) = &grid[cell];
            run_trial(spec, cfg, trial, derive_seed(&[master_seed, cell as u64, trial]))
        })
        .collect::<Result<_>>()?;
    Ok(results.into_iter().flatten().collect())
}

/// Least-squares slope of `log(mean err)` against `log d` over the rows for norm `p`.
pub fn fit_scaling(rows: &[ErrorReport], p: Norm) -> Result<f64> {
    let mut by_d: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.p == p) {
        by_d.entry(r.d).or_default().push(r.err);
    }
    if by_d.len() < 3 {
        return Err(Error::invalid(
            "rows",
            format!("scaling fit needs at least 3 distinct d values, got {}", by_d.len()),
        ));
    }
    let mut points = Vec::with_capacity(by_d.len());
    for (d, errs) in &by_d {
        if errs.len() < 20 {
            return Err(Error::invalid(
                "rows",
                format!("scaling fit needs at least 20 trials per d, got {} at d = {d}", errs.len()),
            ));
        }
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        if mean <= 0.0 {
            return Err(Error::invalid("rows", format!("mean error at d = {d} is zero")));
        }
        points.push(((*d as f64).ln(), mean.ln()));
    }
    Ok(ols_slope(&points))
}

fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}
