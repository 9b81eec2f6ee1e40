//! Seeded random sources.
//!
//! Every stochastic routine draws from ChaCha8 (`rand_chacha`) seeded through
//! `seed_from_u64`. Independent streams for sample `i` of a batch use the same
//! seed with `set_stream(i)`. Normal variates come from `rand_distr`'s
//! `StandardNormal` (ziggurat method).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `stream` of the generator seeded with `seed`.
pub fn seeded_stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn normal(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Complex normal with independent real and imaginary parts of variance `var / 2`.
pub fn complex_normal(rng: &mut Rng, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    Complex64::new(s * normal(rng), s * normal(rng))
}

/// Random Hermitian `l × l` matrix with entries of order `scale`.
pub fn random_hermitian(rng: &mut Rng, l: usize, scale: f64) -> DMatrix<Complex64> {
    let mut h = DMatrix::from_fn(l, l, |_, _| complex_normal(rng, 1.0));
    h = (&h + h.adjoint()) * Complex64::new(0.5 * scale, 0.0);
    for i in 0..l {
        h[(i, i)].im = 0.0;
    }
    h
}
