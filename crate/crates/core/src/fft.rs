//! Arbitrary-length complex DFT.
//!
//! Lengths of the form `2^a 3^b` go straight to a rustfft plan. Every other
//! length is rewritten as a chirp convolution (Bluestein) evaluated with a
//! `2^a 3^b` transform of size `>= 2m - 1`, so run time tracks the padded size
//! and not the factorization of `m`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

fn is_three_smooth(mut k: usize) -> bool {
    while k.is_multiple_of(2) {
        k /= 2;
    }
    while k.is_multiple_of(3) {
        k /= 3;
    }
    k == 1
}

/// Smallest `2^a 3^b >= k`.
pub fn next_three_smooth(k: usize) -> usize {
    let mut best = k.next_power_of_two();
    let mut p3 = 1usize;
    while p3 < best {
        let mut v = p3;
        while v < k {
            v *= 2;
        }
        best = best.min(v);
        p3 *= 3;
    }
    best
}

/// Unnormalized DFT of a fixed length: `forward` uses `e^{-2πijk/m}`,
/// `inverse` uses `e^{+2πijk/m}` (no `1/m` factor).
pub struct Dft {
    len: usize,
    kind: Kind,
    /// Padded work buffers kept between calls; large allocations would
    /// otherwise be mapped and faulted in afresh every time.
    pool: Mutex<Vec<Vec<Complex64>>>,
}

enum Kind {
    Direct {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
    Bluestein {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
        /// `e^{-πi j² / m}` for `j < m`.
        chirp: Vec<Complex64>,
        /// Forward transform of the conjugate chirp laid out circularly, pre-scaled by `1/len`.
        kernel: Vec<Complex64>,
    },
}

impl fmt::Debug for Dft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strategy = match self.kind {
            Kind::Direct { .. } => "direct",
            Kind::Bluestein { .. } => "bluestein",
        };
        f.debug_struct("Dft")
            .field("len", &self.len)
            .field("strategy", &strategy)
            .finish()
    }
}

impl Dft {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "DFT length must be positive");
        let mut planner = FftPlanner::new();
        if is_three_smooth(len) {
            return Dft {
                len,
                kind: Kind::Direct {
                    forward: planner.plan_fft_forward(len),
                    inverse: planner.plan_fft_inverse(len),
                },
                pool: Mutex::new(Vec::new()),
            };
        }

        let padded = next_three_smooth(2 * len - 1);
        let forward = planner.plan_fft_forward(padded);
        let inverse = planner.plan_fft_inverse(padded);

        // j² mod 2m keeps the phase argument small and exact for large j.
        let modulus = 2 * len as u128;
        let chirp: Vec<Complex64> = (0..len)
            .map(|j| {
                let r = (j as u128 * j as u128) % modulus;
                Complex64::from_polar(1.0, -PI * r as f64 / len as f64)
            })
            .collect();

        let mut kernel = vec![Complex64::new(0.0, 0.0); padded];
        kernel[0] = chirp[0].conj();
        for j in 1..len {
            kernel[j] = chirp[j].conj();
            kernel[padded - j] = chirp[j].conj();
        }
        forward.process(&mut kernel);
        let scale = 1.0 / padded as f64;
        kernel.iter_mut().for_each(|k| *k *= scale);

        Dft {
            len,
            kind: Kind::Bluestein {
                forward,
                inverse,
                chirp,
                kernel,
            },
            pool: Mutex::new(Vec::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place `X_k = Σ_j x_j e^{-2πijk/m}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len, "DFT input length");
        match &self.kind {
            Kind::Direct { forward, .. } => forward.process(data),
            Kind::Bluestein { .. } => self.bluestein(data),
        }
    }

    /// In-place `x_j = Σ_k X_k e^{+2πijk/m}` (unnormalized).
    pub fn inverse(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len, "DFT input length");
        match &self.kind {
            Kind::Direct { inverse, .. } => inverse.process(data),
            Kind::Bluestein { .. } => {
                data.iter_mut().for_each(|z| *z = z.conj());
                self.bluestein(data);
                data.iter_mut().for_each(|z| *z = z.conj());
            }
        }
    }

    fn bluestein(&self, data: &mut [Complex64]) {
        let Kind::Bluestein {
            forward,
            inverse,
            chirp,
            kernel,
        } = &self.kind
        else {
            unreachable!()
        };
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        let mut buf = self.take_buffer(kernel.len());
        let mut scratch = self.take_buffer(scratch_len);
        for (b, (x, w)) in buf.iter_mut().zip(data.iter().zip(chirp)) {
            *b = x * w;
        }
        buf[data.len()..].fill(Complex64::new(0.0, 0.0));
        forward.process_with_scratch(&mut buf, &mut scratch);
        for (b, k) in buf.iter_mut().zip(kernel) {
            *b *= k;
        }
        inverse.process_with_scratch(&mut buf, &mut scratch);
        for (x, (b, w)) in data.iter_mut().zip(buf.iter().zip(chirp)) {
            *x = b * w;
        }
        let mut pool = self.pool.lock().unwrap();
        pool.push(buf);
        pool.push(scratch);
    }

    fn take_buffer(&self, len: usize) -> Vec<Complex64> {
        let mut buf = self.pool.lock().unwrap().pop().unwrap_or_default();
        buf.resize(len, Complex64::new(0.0, 0.0));
        buf
    }
}
