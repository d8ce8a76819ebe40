#![allow(dead_code)]

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sospencil::poly::{MultiIndex, Poly};
use sospencil::rational::Rational;

pub fn random_monomial(rng: &mut ChaCha8Rng, d: usize, max_deg: u32) -> MultiIndex {
    let total = rng.gen_range(0..=max_deg);
    let mut e = vec![0u32; d];
    for _ in 0..total {
        e[rng.gen_range(0..d)] += 1;
    }
    MultiIndex(e)
}

pub fn random_coeff(rng: &mut ChaCha8Rng) -> Rational {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-6i64..=6);
    }
    let den = rng.gen_range(1i64..=3);
    Rational::new(BigInt::from(n), BigInt::from(den))
}

/// Nonzero polynomial in `d` variables with total degree at most `max_deg`.
pub fn random_poly(rng: &mut ChaCha8Rng, d: usize, max_deg: u32) -> Poly {
    loop {
        let nterms = rng.gen_range(1..=4);
        let p = Poly::from_terms(d, (0..nterms).map(|_| (random_monomial(rng, d, max_deg), random_coeff(rng))));
        if !p.is_zero() {
            return p;
        }
    }
}

/// Seeded `(q, p)` pairs with `d ∈ {1,2,3}` and degree at most 3.
pub fn random_pairs(seed: u64, count: usize) -> Vec<(Poly, Poly)> {
    let mut rng = sospencil::sampling::rng(seed);
    (0..count)
        .map(|_| {
            let d = rng.gen_range(1..=3);
            let q = random_poly(&mut rng, d, 3);
            let p = random_poly(&mut rng, d, 3);
            (q, p)
        })
        .collect()
}

/// Full expansion of `Ψ(ζ)·B(z)·Ψ(z)ᵀ` in `2d` variables (`ζ` first).
pub fn bilinear_expansion(pencil: &sospencil::pencil::MatrixPencil) -> Poly {
    let d = pencil.nvars();
    let mons = pencil.basis.monomials();
    let mut out = Poly::zero(2 * d);
    for (k, m) in pencil.coeffs.iter().enumerate() {
        for (i, j, c) in m.nonzeros() {
            let mut e = mons[i].0.clone();
            e.extend(&mons[j].0);
            if k > 0 {
                e[d + k - 1] += 1;
            }
            out.add_term(MultiIndex(e), c.clone());
        }
    }
    out
}

/// `q(ζ)·p(z)` in `2d` variables.
pub fn split_product(q: &Poly, p: &Poly) -> Poly {
    let d = q.nvars();
    let mut out = Poly::zero(2 * d);
    for (mq, cq) in q.terms() {
        for (mp, cp) in p.terms() {
            let mut e = mq.0.clone();
            e.extend(&mp.0);
            out.add_term(MultiIndex(e), cq * cp);
        }
    }
    out
}
