//! The discrete Laplace (two-sided geometric) mechanism on histograms.
//!
//! A [`Histogram`] is privatized into a [`PrivateSketch`] by adding i.i.d.
//! `DLap(e^{-ε})` noise to every coordinate, optionally clipping into `[0, n]`.
//! Clipped sketches can be [`unfold`]ed back into sketches distributed exactly
//! like unclipped ones, and unclipped sketches support additive [`update`]s.
//! [`empirical_profile`] turns an unclipped sketch into the noisy
//! frequency-of-frequencies vector consumed by reconstruction.

use rand::distr::{Distribution, Open01};
use rand::Rng;

use crate::error::{Error, Result};
use crate::norm::Norm;

/// Raw per-item counts over a domain of size `d`, each in `[0, n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: Vec<u64>,
    n: u64,
}

impl Histogram {
    pub fn new(counts: Vec<u64>, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "maximum count must be at least 1"));
        }
        if counts.is_empty() {
            return Err(Error::invalid("counts", "histogram must have at least one item"));
        }
        if let Some((i, c)) = counts.iter().enumerate().find(|(_, &c)| c > n) {
            return Err(Error::invalid(
                "counts",
                format!("count {c} at item {i} exceeds n = {n}"),
            ));
        }
        Ok(Histogram { counts, n })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Domain size.
    pub fn d(&self) -> usize {
        self.counts.len()
    }
}

/// Noisy counts released by the mechanism, with the parameters that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivateSketch {
    pub counts: Vec<i64>,
    pub epsilon: f64,
    pub n: u64,
    pub clipped: bool,
}

impl PrivateSketch {
    pub fn d(&self) -> usize {
        self.counts.len()
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("epsilon", format!("must be a positive finite number, got {epsilon}")))
    }
}

/// Geometric distribution on `{0, 1, 2, ...}` with `P[G = t] = (1 - e^{-ε}) e^{-ε t}`.
#[derive(Debug, Clone, Copy)]
pub struct Geometric {
    epsilon: f64,
}

impl Geometric {
    pub fn new(epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Geometric { epsilon })
    }
}

impl Distribution<u64> for Geometric {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        // P[floor(-ln U / ε) >= k] = P[U <= e^{-εk}] = e^{-εk}
        let u: f64 = Open01.sample(rng);
        (-u.ln() / self.epsilon).floor() as u64
    }
}

/// Discrete Laplace distribution `P[Z = t] ∝ e^{-ε|t|}` on the integers,
/// sampled as the difference of two independent geometric variables.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteLaplace {
    geometric: Geometric,
}

impl DiscreteLaplace {
    pub fn new(epsilon: f64) -> Result<Self> {
        Ok(DiscreteLaplace {
            geometric: Geometric::new(epsilon)?,
        })
    }
}

impl Distribution<i64> for DiscreteLaplace {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let a = self.geometric.sample(rng) as i64;
        let b = self.geometric.sample(rng) as i64;
        a - b
    }
}

pub fn sample_geometric<R: Rng + ?Sized>(epsilon: f64, rng: &mut R) -> Result<u64> {
    Ok(Geometric::new(epsilon)?.sample(rng))
}

pub fn sample_dlap<R: Rng + ?Sized>(epsilon: f64, rng: &mut R) -> Result<i64> {
    Ok(DiscreteLaplace::new(epsilon)?.sample(rng))
}

/// Draws the `d` i.i.d. noise values the mechanism would add.
pub fn sample_noise<R: Rng + ?Sized>(d: usize, epsilon: f64, rng: &mut R) -> Result<Vec<i64>> {
    let dist = DiscreteLaplace::new(epsilon)?;
    Ok((0..d).map(|_| dist.sample(rng)).collect())
}

/// Applies a fixed noise realization to `h` (the mechanism as a deterministic
/// function of its input and its coin tosses).
pub fn privatize_with_noise(
    h: &Histogram,
    epsilon: f64,
    clip: bool,
    noise: &[i64],
) -> Result<PrivateSketch> {
    check_epsilon(epsilon)?;
    if noise.len() != h.d() {
        return Err(Error::DimensionMismatch {
            expected: h.d(),
            actual: noise.len(),
        });
    }
    let n = h.n as i64;
    let counts = h
        .counts
        .iter()
        .zip(noise)
        .map(|(&c, &z)| {
            let v = c as i64 + z;
            if clip {
                v.clamp(0, n)
            } else {
                v
            }
        })
        .collect();
    Ok(PrivateSketch {
        counts,
        epsilon,
        n: h.n,
        clipped: clip,
    })
}

pub fn privatize<R: Rng + ?Sized>(
    h: &Histogram,
    epsilon: f64,
    clip: bool,
    rng: &mut R,
) -> Result<PrivateSketch> {
    let noise = sample_noise(h.d(), epsilon, rng)?;
    privatize_with_noise(h, epsilon, clip, &noise)
}

/// Converts a clipped sketch into one distributed as the unclipped mechanism
/// output, by pushing boundary entries outward with fresh geometric noise.
pub fn unfold<R: Rng + ?Sized>(s: &PrivateSketch, rng: &mut R) -> Result<PrivateSketch> {
    if !s.clipped {
        return Err(Error::UnclippedSketch);
    }
    let geo = Geometric::new(s.epsilon)?;
    let n = s.n as i64;
    let counts = s
        .counts
        .iter()
        .map(|&c| {
            if c <= 0 {
                c - geo.sample(rng) as i64
            } else if c >= n {
                c + geo.sample(rng) as i64
            } else {
                c
            }
        })
        .collect();
    Ok(PrivateSketch {
        counts,
        epsilon: s.epsilon,
        n: s.n,
        clipped: false,
    })
}

/// Adds `delta` to an unclipped sketch, as if the mechanism had run on `h + delta`.
pub fn update(s: &PrivateSketch, delta: &[i64]) -> Result<PrivateSketch> {
    if s.clipped {
        return Err(Error::ClippedSketch);
    }
    if delta.len() != s.d() {
        return Err(Error::DimensionMismatch {
            expected: s.d(),
            actual: delta.len(),
        });
    }
    let counts = s.counts.iter().zip(delta).map(|(c, dl)| c + dl).collect();
    Ok(PrivateSketch {
        counts,
        ..s.clone()
    })
}

/// Truncation radius: the smallest integer `B` with
/// `B >= (1/ε) ln max{ 2d / (η(e^ε + 1)), 8e^ε / (e^{2ε} - 1) }`, floored at 0.
pub fn truncation_radius(epsilon: f64, eta: f64, d: usize) -> u64 {
    let tail = 2.0 * d as f64 / (eta * (epsilon.exp() + 1.0));
    // 8e^ε / (e^{2ε} - 1) = 4 / sinh(ε)
    let conditioning = 4.0 / epsilon.sinh();
    let arg = tail.max(conditioning);
    let b = arg.ln() / epsilon;
    if b.is_nan() || b <= 0.0 {
        0
    } else {
        b.ceil() as u64
    }
}

/// Parameters shared by the empirical profile, the operator and the reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionConfig {
    pub epsilon: f64,
    pub eta: f64,
    pub n: u64,
    pub d: usize,
    pub norm: Norm,
    b: u64,
}

impl ReconstructionConfig {
    /// Validated config with `B` derived from `(ε, η, d)`. Fails when `n < B`.
    pub fn new(epsilon: f64, eta: f64, n: u64, d: usize, norm: Norm) -> Result<Self> {
        let cfg = Self::new_unchecked_range(epsilon, eta, n, d, norm)?;
        cfg.check_range()?;
        Ok(cfg)
    }

    /// Like [`ReconstructionConfig::new`] but accepts `n < B`; the algorithms
    /// stay well defined, only the accuracy guarantee is lost.
    pub fn new_unchecked_range(
        epsilon: f64,
        eta: f64,
        n: u64,
        d: usize,
        norm: Norm,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::invalid("eta", format!("must lie in (0, 1), got {eta}")));
        }
        if n == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        if d == 0 {
            return Err(Error::invalid("d", "must be at least 1"));
        }
        Ok(ReconstructionConfig {
            epsilon,
            eta,
            n,
            d,
            norm,
            b: truncation_radius(epsilon, eta, d),
        })
    }

    /// Overrides the derived truncation radius. Still requires `n >= B`.
    pub fn with_b(mut self, b: u64) -> Result<Self> {
        self.b = b;
        self.check_range()?;
        Ok(self)
    }

    pub fn with_norm(mut self, norm: Norm) -> Self {
        self.norm = norm;
        self
    }

    fn check_range(&self) -> Result<()> {
        if self.n < self.b {
            Err(Error::TruncationExceedsRange { n: self.n, b: self.b })
        } else {
            Ok(())
        }
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// Dimension `n + 2B + 1` of the padded profile space.
    pub fn m(&self) -> usize {
        (self.n + 2 * self.b + 1) as usize
    }
}

/// Profile of a noisy histogram, indexed `t = -B ..= n + B` (stored at `t + B`).
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalProfile {
    values: Vec<f64>,
    b: u64,
    n: u64,
    d: usize,
}

impl EmpiricalProfile {
    /// Builds a profile from bin counts over `-B..=n+B`.
    pub fn from_bin_counts(bins: &[u64], b: u64, n: u64) -> Result<Self> {
        let m = (n + 2 * b + 1) as usize;
        if bins.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: bins.len(),
            });
        }
        let d: u64 = bins.iter().sum();
        if d == 0 {
            return Err(Error::invalid("bins", "empty profile"));
        }
        let values = bins.iter().map(|&k| k as f64 / d as f64).collect();
        Ok(EmpiricalProfile {
            values,
            b,
            n,
            d: d as usize,
        })
    }

    /// Values in array order (`t = -B` first).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at `t`, or 0 outside `-B..=n+B`.
    pub fn get(&self, t: i64) -> f64 {
        let i = t + self.b as i64;
        if i < 0 {
            return 0.0;
        }
        self.values.get(i as usize).copied().unwrap_or(0.0)
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Fraction of items at each noisy count. Counts beyond `[-B, n + B]` are
/// clamped to the nearest end so the profile always sums to one.
pub fn empirical_profile(s: &PrivateSketch, cfg: &ReconstructionConfig) -> Result<EmpiricalProfile> {
    if s.clipped {
        return Err(Error::ClippedSketch);
    }
    if s.d() != cfg.d {
        return Err(Error::DimensionMismatch {
            expected: cfg.d,
            actual: s.d(),
        });
    }
    if s.n != cfg.n {
        return Err(Error::invalid(
            "n",
            format!("sketch has n = {} but config has n = {}", s.n, cfg.n),
        ));
    }
    let b = cfg.b() as i64;
    let hi = cfg.n as i64 + b;
    let mut bins = vec![0u64; cfg.m()];
    for &c in &s.counts {
        bins[(c.clamp(-b, hi) + b) as usize] += 1;
    }
    EmpiricalProfile::from_bin_counts(&bins, cfg.b(), cfg.n)
}
