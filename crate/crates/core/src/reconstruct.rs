//! Profile reconstruction: constrained inversion followed by rounding.
//!
//! [`fast_inversion`] solves `min ‖A r − f̃‖_p s.t. Σ_{t=0}^{n} r[t] = 1` exactly
//! by moving `A⁻¹ f̃` along the direction that fixes the mass constraint most
//! cheaply. [`rounding`] then projects the relaxed vector onto valid profiles
//! (entries in `[0, 1]` summing to one) without increasing the ℓ1/ℓ2 error and
//! at most doubling the ℓ∞ error.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;

use crate::circulant::{build_operator, CirculantOperator};
use crate::error::{Error, Result};
use crate::mechanism::{empirical_profile, unfold, EmpiricalProfile, PrivateSketch, ReconstructionConfig};
use crate::norm::Norm;

/// Tolerance on the unit-mass constraint of profiles and relaxed solutions.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// An estimated (or true) profile over counts `0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    values: Vec<f64>,
}

impl Profile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("profile", "must have at least one entry"));
        }
        if let Some((t, v)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid("profile", format!("entry {t} = {v} outside [0, 1]")));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::invalid("profile", format!("entries sum to {total}, not 1")));
        }
        Ok(Profile { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Largest count index `n`.
    pub fn n(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    /// The profile embedded in `-B..=n+B` with zeros outside `0..=n`.
    pub fn padded(&self, b: u64) -> Vec<f64> {
        let b = b as usize;
        let mut out = vec![0.0; self.values.len() + 2 * b];
        out[b..b + self.values.len()].copy_from_slice(&self.values);
        out
    }
}

/// Output of [`fast_inversion`], indexed `-B..=n+B`; may violate box constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedSolution {
    pub values: Vec<f64>,
    pub b: u64,
    pub n: u64,
    pub norm: Norm,
}

impl RelaxedSolution {
    /// `⟨1_{0:n}, r⟩`.
    pub fn mass(&self) -> f64 {
        self.range().iter().sum()
    }

    /// Entries at `t = 0..=n`.
    pub fn range(&self) -> &[f64] {
        let b = self.b as usize;
        &self.values[b..=b + self.n as usize]
    }
}

/// Unit-`p`-norm vector `a` maximizing `⟨c, a⟩`.
///
/// Ties in `|c_t|` for ℓ1 go to the lowest index; `sign(0)` is taken as `+1`.
pub fn direction_vector(c: &[f64], p: Norm) -> Result<Vec<f64>> {
    if c.iter().all(|&v| v == 0.0) {
        return Err(Error::invalid("c", "direction of an all-zero vector is undefined"));
    }
    let sign = |v: f64| if v < 0.0 { -1.0 } else { 1.0 };
    let a = match p {
        Norm::L1 => {
            let mut best = 0;
            for (i, v) in c.iter().enumerate() {
                if v.abs() > c[best].abs() {
                    best = i;
                }
            }
            let mut a = vec![0.0; c.len()];
            a[best] = sign(c[best]);
            a
        }
        Norm::L2 => {
            let len = Norm::L2.of(c);
            c.iter().map(|v| v / len).collect()
        }
        Norm::Linf => c.iter().map(|&v| sign(v)).collect(),
    };
    Ok(a)
}

/// Optimal solution of the mass-constrained ℓp regression `min ‖A r − f̃‖_p`.
pub fn fast_inversion(op: &CirculantOperator, f_tilde: &EmpiricalProfile, p: Norm) -> Result<RelaxedSolution> {
    fast_inversion_values(op, f_tilde.values(), p)
}

/// [`fast_inversion`] on a raw vector indexed `-B..=n+B`.
pub fn fast_inversion_values(op: &CirculantOperator, f_tilde: &[f64], p: Norm) -> Result<RelaxedSolution> {
    let b = op.b() as usize;
    let n = op.n() as usize;
    let in_range = |v: &[f64]| -> f64 { v[b..=b + n].iter().sum() };

    let u = op.apply_inverse(f_tilde)?;
    // the mass row comes from the operator alone, so the direction never depends on the data
    let a = direction_vector(op.mass_row()?, p)?;
    let correction = op.apply_inverse(&a)?;
    let denom = in_range(&correction);
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::Internal(format!(
            "⟨1_(0:n), A⁻¹a⟩ = {denom:e} must be positive"
        )));
    }
    let step = (in_range(&u) - 1.0) / denom;
    let values = u.iter().zip(&correction).map(|(ui, ci)| ui - step * ci).collect();
    Ok(RelaxedSolution {
        values,
        b: op.b(),
        n: op.n(),
        norm: p,
    })
}

/// `τ ≥ 0` with `Σ_t min{τ, r[t]} = s`, found by a sorted prefix scan.
pub fn threshold_tau(r: &[f64], s: f64) -> Result<f64> {
    let total: f64 = r.iter().sum();
    let slack = 1e-12 * total.abs().max(1.0);
    if !(s >= 0.0 && s <= total + slack) {
        return Err(Error::invalid("s", format!("must lie in [0, {total}], got {s}")));
    }
    let mut sorted = r.to_vec();
    sorted.sort_by(f64::total_cmp);
    let len = sorted.len();
    let mut prefix = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        let remaining = (len - i) as f64;
        if prefix + remaining * v >= s {
            return Ok((s - prefix) / remaining);
        }
        prefix += v;
    }
    // only reachable when s exceeds the total by rounding
    Ok(sorted.last().copied().unwrap_or(0.0))
}

/// Lowers every entry by `min{τ, r[t]}` so that the total drops by exactly `s`.
pub fn threshold_adjust(r: &[f64], s: f64) -> Result<Vec<f64>> {
    let tau = threshold_tau(r, s)?;
    Ok(r.iter().map(|&v| v - v.min(tau)).collect())
}

/// Projects a relaxed solution onto the set of valid profiles.
pub fn rounding(r: &RelaxedSolution) -> Result<Profile> {
    // phase 1: drop everything outside 0..=n
    let mut values = r.range().to_vec();

    // phase 2: clip into [0, 1]
    let mut s_above = 0.0;
    let mut s_below = 0.0;
    for v in values.iter_mut() {
        if *v > 1.0 {
            s_above += 1.0 - *v;
            *v = 1.0;
        } else if *v < 0.0 {
            s_below += -*v;
            *v = 0.0;
        }
    }

    // phase 3: remove the surplus mass
    let s = s_above + s_below;
    if s < -MASS_TOLERANCE {
        return Err(Error::Internal(format!(
            "negative surplus s = {s:e}; input mass was {}",
            r.mass()
        )));
    }
    if s > 0.0 {
        values = threshold_adjust(&values, s)?;
    }
    Profile::new(values)
}

type Slot = Arc<Mutex<Option<Arc<CirculantOperator>>>>;

/// Cache of operators keyed by `(n, B, ε)`; each key is built at most once.
#[derive(Debug, Default)]
pub struct OperatorCache {
    slots: Mutex<HashMap<(u64, u64, u64), Slot>>,
}

impl OperatorCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide cache used by [`reconstruct_profile`].
    pub fn global() -> &'static OperatorCache {
        static GLOBAL: OnceLock<OperatorCache> = OnceLock::new();
        GLOBAL.get_or_init(OperatorCache::new)
    }

    pub fn get(&self, cfg: &ReconstructionConfig) -> Result<Arc<CirculantOperator>> {
        let key = (cfg.n, cfg.b(), cfg.epsilon.to_bits());
        let slot = {
            let mut slots = self.slots.lock().unwrap_or_else(|e| e.into_inner());
            Arc::clone(slots.entry(key).or_default())
        };
        let mut guard = slot.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(op) = guard.as_ref() {
            return Ok(Arc::clone(op));
        }
        let op = Arc::new(build_operator(cfg)?);
        *guard = Some(Arc::clone(&op));
        Ok(op)
    }

    pub fn len(&self) -> usize {
        self.slots.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.slots.lock().unwrap_or_else(|e| e.into_inner()).clear();
    }
}

/// Fast inversion followed by rounding on an already-computed empirical profile.
pub fn reconstruct_from_empirical(op: &CirculantOperator, f_tilde: &EmpiricalProfile, p: Norm) -> Result<Profile> {
    rounding(&fast_inversion(op, f_tilde, p)?)
}

/// Full pipeline: unfold (if clipped), empirical profile, inversion, rounding.
/// `rng` is only consumed when the sketch is clipped.
pub fn reconstruct_profile<R: Rng + ?Sized>(
    s: &PrivateSketch,
    cfg: &ReconstructionConfig,
    rng: &mut R,
) -> Result<Profile> {
    reconstruct_profile_with(OperatorCache::global(), s, cfg, rng)
}

pub fn reconstruct_profile_with<R: Rng + ?Sized>(
    cache: &OperatorCache,
    s: &PrivateSketch,
    cfg: &ReconstructionConfig,
    rng: &mut R,
) -> Result<Profile> {
    if s.epsilon != cfg.epsilon {
        return Err(Error::invalid(
            "epsilon",
            format!("sketch has ε = {} but config has ε = {}", s.epsilon, cfg.epsilon),
        ));
    }
    let unfolded;
    let sketch = if s.clipped {
        unfolded = unfold(s, rng)?;
        &unfolded
    } else {
        s
    };
    let f_tilde = empirical_profile(sketch, cfg)?;
    let op = cache.get(cfg)?;
    reconstruct_from_empirical(&op, &f_tilde, cfg.norm)
}
