//! Differentially private profile estimation.
//!
//! A histogram `h ∈ [0..n]^d` is released through the discrete Laplace
//! mechanism; its *profile* `f[t]` (the fraction of items appearing exactly `t`
//! times) is then reconstructed from the noisy counts in `O(d + n log n)` time.
//!
//! The pipeline is:
//!
//! 1. [`mechanism::privatize`] (optionally clipped; [`mechanism::unfold`] undoes clipping
//!    in distribution),
//! 2. [`mechanism::empirical_profile`] over `-B..=n+B`,
//! 3. [`reconstruct::fast_inversion`] against the circulant operator of [`circulant`],
//! 4. [`reconstruct::rounding`] onto the set of valid profiles.
//!
//! [`reconstruct::reconstruct_profile`] runs all of it. [`eval`] measures errors against
//! the analytic guarantees, [`twoparty`] runs the inner-product reduction built on
//! updatable sketches, and [`oracle`] holds dense brute-force references for testing.

pub mod circulant;
pub mod error;
pub mod eval;
pub mod fft;
pub mod io;
pub mod mechanism;
pub mod norm;
pub mod oracle;
pub mod reconstruct;
pub mod twoparty;

pub use circulant::{build_operator, CirculantOperator, NormBounds};
pub use error::{Error, Result};
pub use mechanism::{
    empirical_profile, privatize, unfold, update, EmpiricalProfile, Histogram, PrivateSketch,
    ReconstructionConfig,
};
pub use norm::Norm;
pub use reconstruct::{fast_inversion, reconstruct_profile, rounding, Profile, RelaxedSolution};

/// Deterministic RNG used throughout the crate and its tools.
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// Creates the crate's RNG from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}

/// SplitMix64-style mixing of several words into one seed.
pub fn derive_seed(words: &[u64]) -> u64 {
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    for &w in words {
        state ^= w;
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        state = z ^ (z >> 31);
    }
    state
}
