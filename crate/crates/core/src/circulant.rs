//! The circulant expectation operator `A = circ(c) / P_norm`.
//!
//! Row `k` of `A` puts weight `e^{-ε·dist(k, ℓ)} / P_norm` on column `ℓ` whenever
//! the cyclic distance `dist(k, ℓ)` is at most `B`, so `A` maps a (padded) true
//! profile to the expected noisy profile under noise truncated to `[-B, B]`.
//! Array index `i` corresponds to profile index `t = i - B`.
//!
//! With `w_k = e^{-2πik/m}`, `A = V diag(φ) V^H` where `V[j][k] = w_k^j / √m`,
//! so `A x = F(φ ⊙ F⁻(x)) / m` with `F` the forward and `F⁻` the unnormalized
//! inverse DFT.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Dft;
use crate::mechanism::{check_epsilon, ReconstructionConfig};

/// Eigenvalues below this magnitude are treated as a degenerate configuration.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Imaginary parts above `RESIDUE_TOLERANCE · (1 + ‖x‖∞)` indicate a bug.
pub const RESIDUE_TOLERANCE: f64 = 1e-8;

/// Analytic upper bounds on the norms of `A⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBounds {
    /// Bound on `‖A⁻¹‖₁ = ‖A⁻¹‖∞`.
    pub bound_1_inf: f64,
    /// Bound on `‖A⁻¹‖₂`.
    pub bound_2: f64,
}

#[derive(Debug)]
pub struct CirculantOperator {
    n: u64,
    b: u64,
    epsilon: f64,
    p_norm: f64,
    generator: Vec<f64>,
    eigenvalues: Vec<Complex64>,
    inverse_eigenvalues: Vec<Complex64>,
    dft: Dft,
    mass_row: OnceLock<Vec<f64>>,
}

/// Normalizer of the truncated discrete Laplace distribution on `[-B, B]`.
pub fn p_norm(epsilon: f64, b: u64) -> f64 {
    // (1 + q - 2q^{B+1}) / (1 - q) written as 1 + 2q(1 - q^B)/(1 - q), exact at B = 0
    let q = (-epsilon).exp();
    1.0 + 2.0 * q * (-epsilon * b as f64).exp_m1() / (-epsilon).exp_m1()
}

/// First row of `A` (already divided by `P_norm`).
pub fn generator(n: u64, b: u64, epsilon: f64) -> Vec<f64> {
    let m = (n + 2 * b + 1) as usize;
    let b = b as usize;
    let norm = p_norm(epsilon, b as u64);
    let mut c = vec![0.0; m];
    for j in 0..=b {
        let v = (-epsilon * j as f64).exp() / norm;
        c[j] = v;
        c[(m - j) % m] = v;
    }
    c
}

/// Closed-form eigenvalue of `A` at array index `k`. `A` is symmetric, so it is real:
/// with `θ = 2πk/m`,
/// `φ = (1 − q² − 2q^{B+1}(cos((B+1)θ) − q cos(Bθ))) / ((1 + q² − 2q cos θ) P_norm)`.
fn eigenvalue(k: usize, m: usize, b: u64, q: f64, p_norm: f64) -> Complex64 {
    // reduce k·j mod m in integers so the angle stays accurate for large m
    let cos = |j: u64| {
        let r = (k as u128 * j as u128) % m as u128;
        (2.0 * std::f64::consts::PI * r as f64 / m as f64).cos()
    };
    let tail = q.powi(b as i32 + 1);
    let numerator = 1.0 - q * q - 2.0 * tail * (cos(b + 1) - q * cos(b));
    let denominator = 1.0 + q * q - 2.0 * q * cos(1);
    Complex64::new(numerator / denominator / p_norm, 0.0)
}

impl CirculantOperator {
    pub fn new(n: u64, b: u64, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if n == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        let m = (n + 2 * b + 1) as usize;
        let q = (-epsilon).exp();
        let p_norm = p_norm(epsilon, b);
        let eigenvalues: Vec<Complex64> = (0..m).map(|k| eigenvalue(k, m, b, q, p_norm)).collect();

        let floor = spectral_floor(epsilon, b).max(0.0);
        for (index, phi) in eigenvalues.iter().enumerate() {
            let magnitude = phi.norm();
            if magnitude < EIGENVALUE_FLOOR {
                return Err(Error::IllConditioned { index, magnitude });
            }
            if magnitude < floor * (1.0 - 1e-9) {
                return Err(Error::Internal(format!(
                    "eigenvalue {index} has |φ| = {magnitude:e} below the analytic floor {floor:e}"
                )));
            }
        }
        let inverse_eigenvalues = eigenvalues.iter().map(|phi| phi.inv()).collect();

        Ok(CirculantOperator {
            n,
            b,
            epsilon,
            p_norm,
            generator: generator(n, b, epsilon),
            eigenvalues,
            inverse_eigenvalues,
            dft: Dft::new(m),
            mass_row: OnceLock::new(),
        })
    }

    pub fn m(&self) -> usize {
        self.generator.len()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn p_norm(&self) -> f64 {
        self.p_norm
    }

    pub fn generator(&self) -> &[f64] {
        &self.generator
    }

    /// Eigenvalues in array order (`t = -B` first).
    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.spectral_multiply(x, &self.eigenvalues, false)
    }

    /// `A⁻¹ x`.
    pub fn apply_inverse(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.spectral_multiply(x, &self.inverse_eigenvalues, false)
    }

    /// `vᵀ A⁻¹`, returned as a column vector `(A⁻¹)ᵀ v`.
    pub fn left_apply_inverse(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.spectral_multiply(v, &self.inverse_eigenvalues, true)
    }

    /// `1_{0:n}ᵀ A⁻¹`, computed once per operator.
    pub fn mass_row(&self) -> Result<&[f64]> {
        if let Some(row) = self.mass_row.get() {
            return Ok(row);
        }
        let row = self.left_apply_inverse(&self.range_indicator())?;
        Ok(self.mass_row.get_or_init(|| row))
    }

    /// Indicator of the array positions holding `t = 0..=n`.
    pub fn range_indicator(&self) -> Vec<f64> {
        let b = self.b as usize;
        let n = self.n as usize;
        (0..self.m())
            .map(|i| if (b..=b + n).contains(&i) { 1.0 } else { 0.0 })
            .collect()
    }

    fn spectral_multiply(&self, x: &[f64], spectrum: &[Complex64], conjugate: bool) -> Result<Vec<f64>> {
        let m = self.m();
        if x.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: x.len(),
            });
        }
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.dft.inverse(&mut buf);
        for (z, phi) in buf.iter_mut().zip(spectrum) {
            *z *= if conjugate { phi.conj() } else { *phi };
        }
        self.dft.forward(&mut buf);

        let scale = 1.0 / m as f64;
        let x_max = x.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
        let limit = RESIDUE_TOLERANCE * (1.0 + x_max);
        let mut out = Vec::with_capacity(m);
        for z in buf {
            let z = z * scale;
            if z.im.abs() > limit {
                return Err(Error::Internal(format!(
                    "imaginary residue {:e} exceeds {limit:e}",
                    z.im.abs()
                )));
            }
            out.push(z.re);
        }
        Ok(out)
    }

    pub fn norm_bounds(&self) -> Result<NormBounds> {
        norm_bounds(self.epsilon, self.b)
    }
}

pub fn build_operator(cfg: &ReconstructionConfig) -> Result<CirculantOperator> {
    CirculantOperator::new(cfg.n, cfg.b(), cfg.epsilon)
}

/// Lower bound `(1 - q - 2q^{B+1}) / ((1 + q) P_norm)` on `|φ_t|`, `q = e^{-ε}`.
/// Negative (hence vacuous) when `B` is small relative to `1/ε`.
pub fn spectral_floor(epsilon: f64, b: u64) -> f64 {
    let q = (-epsilon).exp();
    (1.0 - q - 2.0 * q.powi(b as i32 + 1)) / ((1.0 + q) * p_norm(epsilon, b))
}

pub fn norm_bounds(epsilon: f64, b: u64) -> Result<NormBounds> {
    let q = (-epsilon).exp();
    let pn = p_norm(epsilon, b);
    let denom_1 = epsilon.exp() - q - 4.0 * (-epsilon * b as f64).exp();
    if denom_1.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::invalid(
            "B",
            format!("e^ε - e^-ε - 4e^(-εB) = {denom_1:e} is not positive (ε = {epsilon}, B = {b})"),
        ));
    }
    let denom_2 = 1.0 - q - 2.0 * q.powi(b as i32 + 1);
    if denom_2.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::invalid(
            "B",
            format!("1 - e^-ε - 2e^(-ε(B+1)) = {denom_2:e} is not positive (ε = {epsilon}, B = {b})"),
        ));
    }
    Ok(NormBounds {
        bound_1_inf: (2.0 + q + epsilon.exp()) / denom_1 * pn,
        bound_2: pn * (1.0 + q) / denom_2,
    })
}
