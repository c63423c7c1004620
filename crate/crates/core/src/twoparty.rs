//! Two-party inner-product estimation from updatable sketches.
//!
//! Alice holds `x ∈ {−1, +1}^d` and sends a private sketch of `x + 1`. Bob adds
//! `y + 1`, so every count of the combined histogram lies in `{0, 2, 4}`, then
//! reconstructs its profile `r` and publishes
//! `d · (r[4] + r[0] − r[2] + 3Δ · Lap(1/ε))`, an estimate of `⟨x, y⟩`.

use rand::distr::{Distribution, Open01};
use rand::Rng;
use rayon::prelude::*;

use crate::circulant::CirculantOperator;
use crate::error::{Error, Result};
use crate::mechanism::{privatize, update, Histogram, PrivateSketch, ReconstructionConfig};
use crate::norm::Norm;
use crate::reconstruct::{reconstruct_profile, OperatorCache, Profile};
use crate::{derive_seed, seeded_rng};

/// Largest count of the combined histogram.
pub const PROTOCOL_N: u64 = 4;
/// Failure probability used to size the truncation radius.
pub const PROTOCOL_ETA: f64 = 0.05;
/// Smallest supported dimension.
pub const MIN_DIMENSION: usize = 16;

/// A vector of `±1` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartyVector {
    bits: Vec<i8>,
}

impl PartyVector {
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        if let Some(i) = bits.iter().position(|&b| b != 1 && b != -1) {
            return Err(Error::invalid("bits", format!("entry {i} is {}, not ±1", bits[i])));
        }
        Ok(PartyVector { bits })
    }

    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        PartyVector {
            bits: (0..d).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect(),
        }
    }

    pub fn bits(&self) -> &[i8] {
        &self.bits
    }

    pub fn d(&self) -> usize {
        self.bits.len()
    }

    pub fn dot(&self, other: &PartyVector) -> i64 {
        self.bits.iter().zip(&other.bits).map(|(&a, &b)| (a * b) as i64).sum()
    }

    /// `x + 1`, with entries in `{0, 2}`.
    pub fn shifted(&self) -> Vec<i64> {
        self.bits.iter().map(|&b| b as i64 + 1).collect()
    }

    /// The same vector with entry `i` negated.
    pub fn flipped(&self, i: usize) -> Self {
        let mut bits = self.bits.clone();
        bits[i] = -bits[i];
        PartyVector { bits }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolResult {
    pub d: usize,
    pub trial: u64,
    pub true_ip: i64,
    pub m_b: f64,
    pub abs_error: f64,
    pub delta_used: f64,
}

/// `d · (f[4] + f[0] − f[2])` on the exact combined histogram, in integer arithmetic.
pub fn profile_identity(x: &PartyVector, y: &PartyVector) -> i64 {
    let mut bins = [0i64; 5];
    for (a, b) in x.shifted().into_iter().zip(y.shifted()) {
        bins[(a + b) as usize] += 1;
    }
    bins[4] + bins[0] - bins[2]
}

/// Reconstruction settings used by the protocol for dimension `d`.
///
/// `B` may exceed `n = 4`. Reconstruction uses the ℓ1 direction, whose
/// correction step is data-independent.
pub fn protocol_config(d: usize, epsilon: f64) -> Result<ReconstructionConfig> {
    ReconstructionConfig::new_unchecked_range(epsilon, PROTOCOL_ETA, PROTOCOL_N, d, Norm::L1)
}

/// `Δ = (6/d) · bound_1_inf`.
pub fn sensitivity_bound(op: &CirculantOperator, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("d", "must be at least 1"));
    }
    Ok(6.0 / d as f64 * op.norm_bounds()?.bound_1_inf)
}

/// Continuous Laplace with density `(ε/2) e^{−ε|z|}`, by inverse CDF.
pub fn sample_laplace<R: Rng + ?Sized>(epsilon: f64, rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    let u = u - 0.5;
    -u.signum() * (1.0 - 2.0 * u.abs()).ln() / epsilon
}

pub fn alice_message<R: Rng + ?Sized>(x: &PartyVector, epsilon: f64, rng: &mut R) -> Result<PrivateSketch> {
    let counts = x.shifted().into_iter().map(|c| c as u64).collect();
    privatize(&Histogram::new(counts, PROTOCOL_N)?, epsilon, false, rng)
}

/// Bob's reconstructed profile of `x + y + 2` (no output noise yet).
pub fn bob_profile(m_a: &PrivateSketch, y: &PartyVector) -> Result<Profile> {
    if m_a.d() != y.d() {
        return Err(Error::DimensionMismatch {
            expected: m_a.d(),
            actual: y.d(),
        });
    }
    let combined = update(m_a, &y.shifted())?;
    let cfg = protocol_config(y.d(), m_a.epsilon)?;
    // the sketch is unclipped, so no randomness is drawn here
    reconstruct_profile(&combined, &cfg, &mut seeded_rng(0))
}

/// `d · (r[4] + r[0] − r[2])`.
pub fn profile_statistic(r: &Profile, d: usize) -> f64 {
    let v = r.values();
    d as f64 * (v[4] + v[0] - v[2])
}

/// Bob's published estimate `d · (r[4] + r[0] − r[2] + 3Δ · Lap(1/ε))`.
pub fn bob_estimate<R: Rng + ?Sized>(
    m_a: &PrivateSketch,
    y: &PartyVector,
    epsilon: f64,
    delta: f64,
    rng: &mut R,
) -> Result<f64> {
    let r = bob_profile(m_a, y)?;
    let noise = 3.0 * delta * sample_laplace(epsilon, rng);
    Ok(profile_statistic(&r, y.d()) + y.d() as f64 * noise)
}

/// End-to-end protocol on `trials` random `(x, y)` pairs.
pub fn run_protocol(d: usize, epsilon: f64, trials: u64, master_seed: u64) -> Result<Vec<ProtocolResult>> {
    if d < MIN_DIMENSION {
        return Err(Error::invalid("d", format!("must be at least {MIN_DIMENSION}, got {d}")));
    }
    let cfg = protocol_config(d, epsilon)?;
    let op = OperatorCache::global().get(&cfg)?;
    let delta = sensitivity_bound(&op, d)?;
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = seeded_rng(derive_seed(&[master_seed, d as u64, trial]));
            let x = PartyVector::random(d, &mut rng);
            let y = PartyVector::random(d, &mut rng);
            let m_a = alice_message(&x, epsilon, &mut rng)?;
            let m_b = bob_estimate(&m_a, &y, epsilon, delta, &mut rng)?;
            let true_ip = x.dot(&y);
            Ok(ProtocolResult {
                d,
                trial,
                true_ip,
                m_b,
                abs_error: (m_b - true_ip as f64).abs(),
                delta_used: delta,
            })
        })
        .collect()
}
