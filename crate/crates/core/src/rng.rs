//! Seeded random streams.
//!
//! Every randomized routine takes a `u64` seed and derives independent
//! ChaCha8 streams from it with [`stream_rng`]: the seed fixes the key and the
//! stream index selects the ChaCha stream, so per-start or per-cell streams
//! are reproducible across platforms and independent of thread scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMat, CVec, C64};

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derive a child seed, used when a routine hands a seed to a sub-routine.
pub fn child_seed(seed: u64, label: u64) -> u64 {
    stream_rng(seed, label ^ 0x9e37_79b9_7f4a_7c15).next_u64()
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    C64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_gaussian_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVec {
    CVec::from_fn(len, |_, _| complex_gaussian(rng))
}

pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Uniformly random unit vector.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVec {
    loop {
        let v = complex_gaussian_vec(rng, len);
        let n = v.norm();
        if n > 1e-8 {
            return v.unscale(n);
        }
    }
}
