//! Brute-force references for testing the fast paths.
//!
//! Everything here is O(m²) or worse and guarded by size limits. Nothing in the
//! production pipeline calls into this module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::distr::{Distribution, Open01};
use rand::Rng;
use rayon::prelude::*;

use crate::circulant::p_norm;
use crate::error::{Error, Result};
use crate::mechanism::{check_epsilon, ReconstructionConfig};
use crate::reconstruct::Profile;
use crate::{derive_seed, seeded_rng};

/// Largest dimension a dense operator may have.
pub const MAX_DENSE_DIM: usize = 4096;
/// Largest dimension accepted by [`equality_constrained_ls`].
pub const MAX_KKT_DIM: usize = 1024;

fn guard(m: usize, limit: usize) -> Result<()> {
    if m > limit {
        Err(Error::invalid("m", format!("dense oracle limited to m <= {limit}, got {m}")))
    } else {
        Ok(())
    }
}

/// Explicit `m × m` realization of the circulant operator.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub entries: DMatrix<f64>,
    pub n: u64,
    pub b: u64,
}

fn ring_distance(k: usize, l: usize, m: usize) -> usize {
    let d = k.abs_diff(l);
    d.min(m - d)
}

pub fn dense_operator(cfg: &ReconstructionConfig) -> Result<DenseOperator> {
    dense_operator_for(cfg.n, cfg.b(), cfg.epsilon)
}

pub fn dense_operator_for(n: u64, b: u64, epsilon: f64) -> Result<DenseOperator> {
    check_epsilon(epsilon)?;
    let m = (n + 2 * b + 1) as usize;
    guard(m, MAX_DENSE_DIM)?;
    let norm = p_norm(epsilon, b);
    let entries = DMatrix::from_fn(m, m, |k, l| {
        let dist = ring_distance(k, l, m);
        if dist as u64 <= b {
            (-epsilon * dist as f64).exp() / norm
        } else {
            0.0
        }
    });
    Ok(DenseOperator { entries, n, b })
}

impl DenseOperator {
    pub fn m(&self) -> usize {
        self.entries.nrows()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (&self.entries * DVector::from_column_slice(x)).as_slice().to_vec()
    }

    pub fn row(&self, k: usize) -> Vec<f64> {
        self.entries.row(k).iter().copied().collect()
    }

    pub fn column(&self, l: usize) -> Vec<f64> {
        self.entries.column(l).iter().copied().collect()
    }

    /// Dense inverse via LU with partial pivoting.
    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        self.entries
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::Internal("dense operator is singular".into()))
    }

    /// Eigenvalues by direct evaluation of `Σ_j c_j e^{-2πijk/m}` on the first row.
    pub fn direct_eigenvalues(&self) -> Vec<Complex64> {
        let m = self.m();
        let row = self.row(0);
        (0..m)
            .map(|k| {
                row.iter()
                    .enumerate()
                    .map(|(j, &c)| {
                        let r = (j * k) % m;
                        c * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * r as f64 / m as f64)
                    })
                    .sum()
            })
            .collect()
    }
}

/// Solves `A y = x` by Gaussian elimination with partial pivoting.
pub fn dense_solve(a: &DenseOperator, x: &[f64]) -> Result<Vec<f64>> {
    guard(a.m(), MAX_DENSE_DIM)?;
    if x.len() != a.m() {
        return Err(Error::DimensionMismatch {
            expected: a.m(),
            actual: x.len(),
        });
    }
    let y = a
        .entries
        .clone()
        .lu()
        .solve(&DVector::from_column_slice(x))
        .ok_or_else(|| Error::Internal("dense operator is singular".into()))?;
    Ok(y.as_slice().to_vec())
}

/// `vᵀ A⁻¹` by solving `Aᵀ y = v`.
pub fn dense_left_solve(a: &DenseOperator, v: &[f64]) -> Result<Vec<f64>> {
    let y = a
        .entries
        .transpose()
        .lu()
        .solve(&DVector::from_column_slice(v))
        .ok_or_else(|| Error::Internal("dense operator is singular".into()))?;
    Ok(y.as_slice().to_vec())
}

/// Induced matrix norms of a dense matrix.
pub fn matrix_norm_1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn matrix_norm_inf(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest singular value.
pub fn matrix_norm_2(m: &DMatrix<f64>) -> f64 {
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Minimizer of `‖A r − f̃‖₂` subject to `Σ_{t=0}^{n} r[t] = 1`, from the dense KKT system
/// `[2AᵀA  e; eᵀ  0] [r; λ] = [2Aᵀf̃; 1]`.
pub fn equality_constrained_ls(a: &DenseOperator, f_tilde: &[f64]) -> Result<Vec<f64>> {
    let m = a.m();
    guard(m, MAX_KKT_DIM)?;
    if f_tilde.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: f_tilde.len(),
        });
    }
    let b = a.b as usize;
    let n = a.n as usize;
    let ata = a.entries.transpose() * &a.entries;
    let atf = a.entries.transpose() * DVector::from_column_slice(f_tilde);
    let mut kkt = DMatrix::zeros(m + 1, m + 1);
    let mut rhs = DVector::zeros(m + 1);
    for i in 0..m {
        for j in 0..m {
            kkt[(i, j)] = 2.0 * ata[(i, j)];
        }
        rhs[i] = 2.0 * atf[i];
    }
    for t in b..=b + n {
        kkt[(t, m)] = 1.0;
        kkt[(m, t)] = 1.0;
    }
    rhs[m] = 1.0;
    let sol = kkt
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Internal("KKT system is singular".into()))?;
    Ok(sol.as_slice()[..m].to_vec())
}

/// Discrete Laplace conditioned on `|Z| <= B`, sampled by inverse CDF.
#[derive(Debug, Clone)]
pub struct TruncatedDiscreteLaplace {
    b: i64,
    cdf: Vec<f64>,
}

impl TruncatedDiscreteLaplace {
    pub fn new(epsilon: f64, b: u64) -> Result<Self> {
        check_epsilon(epsilon)?;
        let norm = p_norm(epsilon, b);
        let b = b as i64;
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = (-b..=b)
            .map(|t| {
                acc += (-epsilon * t.unsigned_abs() as f64).exp() / norm;
                acc
            })
            .collect();
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(TruncatedDiscreteLaplace { b, cdf })
    }
}

impl Distribution<i64> for TruncatedDiscreteLaplace {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = Open01.sample(rng);
        let idx = self.cdf.partition_point(|&c| c < u);
        idx.min(self.cdf.len() - 1) as i64 - self.b
    }
}

pub fn sample_truncated_dlap<R: Rng + ?Sized>(epsilon: f64, b: u64, rng: &mut R) -> Result<i64> {
    Ok(TruncatedDiscreteLaplace::new(epsilon, b)?.sample(rng))
}

/// One run of the private profile generator: each of the `r[t]·d` items at
/// count `t` moves to `t + Z` with truncated noise `Z`. Returns the perturbed
/// profile over `-B..=n+B` as bin counts.
fn generator_run<R: Rng + ?Sized>(
    items: &[u64],
    b: u64,
    noise: &TruncatedDiscreteLaplace,
    rng: &mut R,
) -> Vec<u64> {
    let m = items.len() + 2 * b as usize;
    let mut bins = vec![0u64; m];
    for (t, &count) in items.iter().enumerate() {
        for _ in 0..count {
            let target = t as i64 + noise.sample(rng) + b as i64;
            bins[target as usize] += 1;
        }
    }
    bins
}

/// Integer item counts `r[t]·d`, rejecting profiles that are not multiples of `1/d`.
fn item_counts(r: &Profile, d: usize) -> Result<Vec<u64>> {
    r.values()
        .iter()
        .map(|&v| {
            let k = v * d as f64;
            if (k - k.round()).abs() > 1e-6 {
                Err(Error::invalid("r", format!("entry {v} is not a multiple of 1/{d}")))
            } else {
                Ok(k.round() as u64)
            }
        })
        .collect()
}

/// Single-run output of the generator, normalized by `d`.
pub fn generator_sample<R: Rng + ?Sized>(
    r: &Profile,
    cfg: &ReconstructionConfig,
    d: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let items = item_counts(r, d)?;
    let noise = TruncatedDiscreteLaplace::new(cfg.epsilon, cfg.b())?;
    Ok(generator_run(&items, cfg.b(), &noise, rng)
        .into_iter()
        .map(|k| k as f64 / d as f64)
        .collect())
}

/// Mean perturbed profile over `trials` independent generator runs.
pub fn monte_carlo_generator<R: Rng + ?Sized>(
    r: &Profile,
    cfg: &ReconstructionConfig,
    d: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    if r.n() != cfg.n {
        return Err(Error::DimensionMismatch {
            expected: cfg.n as usize + 1,
            actual: r.values().len(),
        });
    }
    let items = item_counts(r, d)?;
    let noise = TruncatedDiscreteLaplace::new(cfg.epsilon, cfg.b())?;
    let base = rng.random::<u64>();
    let runs: Vec<Vec<u64>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| generator_run(&items, cfg.b(), &noise, &mut seeded_rng(derive_seed(&[base, trial]))))
        .collect();
    let mut total = vec![0u64; cfg.m()];
    for run in runs {
        for (acc, k) in total.iter_mut().zip(run) {
            *acc += k;
        }
    }
    let scale = 1.0 / (trials as f64 * d as f64);
    Ok(total.into_iter().map(|k| k as f64 * scale).collect())
}

/// `τ` with `Σ min{τ, r[t]} = s` by bisection on `[0, max(1, max r)]`.
pub fn bisection_tau(r: &[f64], s: f64) -> Result<f64> {
    let total: f64 = r.iter().sum();
    if !(s >= 0.0 && s <= total + 1e-12) {
        return Err(Error::invalid("s", format!("bracket violation: s = {s}, Σr = {total}")));
    }
    if s <= 0.0 {
        return Ok(0.0);
    }
    let g = |tau: f64| r.iter().map(|&v| v.min(tau)).sum::<f64>();
    let mut lo = 0.0;
    let mut hi = r.iter().copied().fold(1.0, f64::max);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // g is flat above max r; report the smallest solution
    let max_r = r.iter().copied().fold(0.0, f64::max);
    Ok((0.5 * (lo + hi)).min(max_r))
}

/// Iterated adjustment: walking the entries in ascending order, repeatedly
/// lower all remaining entries by `min(r[t], s / remaining)`.
pub fn iterated_adjustment(r: &[f64], s: f64) -> Result<Vec<f64>> {
    if r.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::invalid("r", "entries must lie in [0, 1]"));
    }
    let total: f64 = r.iter().sum();
    if !(s >= 0.0 && s <= total + 1e-12) {
        return Err(Error::invalid("s", format!("must lie in [0, {total}], got {s}")));
    }
    let mut order: Vec<usize> = (0..r.len()).collect();
    order.sort_by(|&i, &j| r[i].total_cmp(&r[j]));
    let mut sorted: Vec<f64> = order.iter().map(|&i| r[i]).collect();

    let len = sorted.len();
    let mut s = s;
    let mut t = 0;
    while t < len && s > 0.0 {
        let remaining = (len - t) as f64;
        let step = sorted[t].min(s / remaining);
        for v in &mut sorted[t..] {
            *v -= step;
        }
        s -= step * remaining;
        t += 1;
    }

    let mut out = vec![0.0; len];
    for (pos, &i) in order.iter().enumerate() {
        out[i] = sorted[pos];
    }
    Ok(out)
}
