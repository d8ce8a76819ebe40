//! Seeded rational sampling.
//!
//! Real coordinates are `k/1000` with `k` uniform in `[-1000·B, 1000·B]`;
//! imaginary parts are `k/1000` with `k` uniform in `[1, 1000·B]`.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::EvalPoint;
use crate::rational::{ExactComplex, Rational};

pub const DEFAULT_BOX: i64 = 10;
const GRID: i64 = 1000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn real_coord(rng: &mut impl Rng, bound: i64) -> Rational {
    let k = rng.gen_range(-GRID * bound..=GRID * bound);
    Rational::new(BigInt::from(k), BigInt::from(GRID))
}

pub fn imag_coord(rng: &mut impl Rng, bound: i64) -> Rational {
    let k = rng.gen_range(1..=GRID * bound);
    Rational::new(BigInt::from(k), BigInt::from(GRID))
}

pub fn real_point(rng: &mut impl Rng, d: usize, bound: i64) -> Vec<Rational> {
    (0..d).map(|_| real_coord(rng, bound)).collect()
}

/// Point with every imaginary part strictly positive.
pub fn upper_point(rng: &mut impl Rng, d: usize, bound: i64) -> EvalPoint {
    EvalPoint::new(
        (0..d)
            .map(|_| {
                let re = real_coord(rng, bound);
                ExactComplex::new(re, imag_coord(rng, bound))
            })
            .collect(),
    )
}
