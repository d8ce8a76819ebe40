//! Product polarization: a symmetric pencil `B(z)` with
//! `q(ζ)·p(z) = Ψ(ζ)·B(z)·Ψ(z)ᵀ`.
//!
//! The pencil is assembled from chain pencils, which realize
//! `ζ1ζ3⋯ζ_{2k+1}` from `ζ2ζ4⋯ζ_{2k}`, and from monomial transfer pencils
//! obtained by substituting variables into them.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::basis::{build_basis, DegreeBounds, MonomialBasis};
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::pencil::{basis_derivative, MatrixPencil};
use crate::poly::{wronskian, MultiIndex, Poly};
use crate::rational::{frac, Rational};

/// `C(ζ) = ζ1 C_1 + … + ζ_{2k+1} C_{2k+1}` with `C(ζ)·ζ^μ = (ζ^ν, 0, …, 0)ᵀ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainPencil {
    pub k: usize,
    /// `C_1, …, C_{2k+1}`.
    pub matrices: Vec<SymMatrix>,
    /// Exponent vectors of `ζ^{μ_1}, …, ζ^{μ_{2k+1}}` in `2k+1` variables.
    pub mu: Vec<MultiIndex>,
}

impl ChainPencil {
    pub fn size(&self) -> usize {
        2 * self.k + 1
    }

    /// `ζ^ν = ζ1ζ3⋯ζ_{2k+1}`.
    pub fn nu(&self) -> MultiIndex {
        let n = self.size();
        MultiIndex((0..n).map(|s| u32::from(s % 2 == 0)).collect())
    }

    /// Rows of `C(ζ)·(ζ^{μ})ᵀ` as polynomials in `ζ`.
    pub fn rows(&self) -> Vec<Poly> {
        let n = self.size();
        let mut out = vec![Poly::zero(n); n];
        for (s, c) in self.matrices.iter().enumerate() {
            let zs = MultiIndex::unit(n, s);
            for (i, j, v) in c.nonzeros() {
                out[i].add_term(self.mu[j].add(&zs), v.clone());
            }
        }
        out
    }
}

pub fn chain_pencil(k: usize) -> ChainPencil {
    let n = 2 * k + 1;
    let mut matrices = vec![SymMatrix::zeros(n); n];
    if k == 0 {
        matrices[0].set(0, 0, Rational::one());
        return ChainPencil { k, matrices, mu: vec![MultiIndex::zero(1)] };
    }
    let half = frac(1, 2);
    // 1-based (i, j): c_ij = (−1)^max ζ_min / 2 for |i−j| = 1, ζ_max / 2 for |i−j| = 2k.
    for i in 1..n {
        let j = i + 1;
        let sign = if j % 2 == 0 { half.clone() } else { -half.clone() };
        matrices[i - 1].set(i - 1, j - 1, sign);
    }
    matrices[n - 1].set(0, n - 1, half);

    let mut mu = vec![MultiIndex::zero(n); n];
    for s in (1..n).step_by(2) {
        mu[0].0[s] = 1; // ζ2 ζ4 ⋯ ζ2k
    }
    for s in (2..n).step_by(2) {
        mu[1].0[s] = 1; // ζ3 ζ5 ⋯ ζ2k+1
    }
    for j in 2..n {
        let mut m = mu[j - 2].add(&MultiIndex::unit(n, j - 2));
        assert!(m.0[j - 1] > 0, "chain monomial not divisible");
        m.0[j - 1] -= 1;
        mu[j] = m;
    }
    ChainPencil { k, matrices, mu }
}

/// Compact transfer pencil: small monomial list (first entry `α1`) and, per
/// pencil slot (`0` constant, `k` for `z_k`), a small symmetric matrix.
struct SmallTransfer {
    monomials: Vec<MultiIndex>,
    slots: Vec<(usize, SymMatrix)>,
}

struct ChainCache(HashMap<usize, ChainPencil>);

impl ChainCache {
    fn get(&mut self, k: usize) -> &ChainPencil {
        self.0.entry(k).or_insert_with(|| chain_pencil(k))
    }
}

fn small_transfer(alpha1: &MultiIndex, beta: &MultiIndex, cache: &mut ChainCache) -> SmallTransfer {
    let d = alpha1.len();
    let (da, db) = (alpha1.degree() as i64, beta.degree() as i64);
    let n = da.max(db - 1);
    let l = (n - da) as u32;
    let m = (n + 1 - db) as u32;
    let mut a = alpha1.0.clone();
    a.push(l);
    let mut b = beta.0.clone();
    b.push(m);
    let (a, b) = (MultiIndex(a), MultiIndex(b));
    let gamma = a.gcd(&b);
    let a_rest = a.checked_sub(&gamma).unwrap();
    let b_rest = b.checked_sub(&gamma).unwrap();
    // Variables with multiplicity in storage order: z1, …, zd, then z0.
    let expand = |m: &MultiIndex| -> Vec<usize> {
        m.0.iter().enumerate().flat_map(|(v, &e)| std::iter::repeat(v).take(e as usize)).collect()
    };
    let evens = expand(&a_rest);
    let odds = expand(&b_rest);
    let k = evens.len();
    debug_assert_eq!(odds.len(), k + 1);
    // var_of[s] is the homogenized variable substituted for ζ_{s+1}.
    let var_of: Vec<usize> = (0..2 * k + 1).map(|s| if s % 2 == 1 { evens[s / 2] } else { odds[s / 2] }).collect();

    let chain = cache.get(k);
    let monomials = chain
        .mu
        .iter()
        .map(|mu| {
            let mut h = gamma.clone();
            for (s, &e) in mu.0.iter().enumerate() {
                h.0[var_of[s]] += e;
            }
            h.0.truncate(d);
            MultiIndex(h.0)
        })
        .collect();
    let mut by_slot: Vec<Option<SymMatrix>> = vec![None; d + 1];
    for (s, c) in chain.matrices.iter().enumerate() {
        let v = var_of[s];
        let slot = if v == d { 0 } else { v + 1 };
        let acc = by_slot[slot].get_or_insert_with(|| SymMatrix::zeros(c.size()));
        *acc = acc.add(c);
    }
    let slots = by_slot.into_iter().enumerate().filter_map(|(s, m)| m.map(|m| (s, m))).collect();
    SmallTransfer { monomials, slots }
}

/// Adds `scale·D(z)` to `target`, where `D(z)Ψᵀ = z^β e_{idx(α1)}`.
fn add_transfer(
    target: &mut [SymMatrix],
    basis: &MonomialBasis,
    alpha1: &MultiIndex,
    beta: &MultiIndex,
    scale: &Rational,
    cache: &mut ChainCache,
) -> Result<()> {
    let small = small_transfer(alpha1, beta, cache);
    let idx = small
        .monomials
        .iter()
        .map(|m| {
            basis.index_of(m).ok_or_else(|| {
                Error::BoundViolation(format!("transfer monomial {:?} is outside the basis", m.0))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for (slot, m) in &small.slots {
        target[*slot].add_embedded(&m.scale(scale), &idx);
    }
    Ok(())
}

/// Transfer pencil over the basis of `bounds`: `D(z)·Ψ(z)ᵀ = z^β` in the
/// row of `α1` and zero elsewhere.
pub fn monomial_transfer_pencil(alpha1: &MultiIndex, beta: &MultiIndex, bounds: &DegreeBounds) -> Result<MatrixPencil> {
    for (name, m) in [("alpha1", alpha1), ("beta", beta)] {
        if !bounds.admits(m) {
            return Err(Error::BoundViolation(format!("{name} = {:?} violates the degree bounds", m.0)));
        }
    }
    let basis = build_basis(bounds)?;
    let mut coeffs = vec![SymMatrix::zeros(basis.len()); bounds.nvars() + 1];
    add_transfer(&mut coeffs, &basis, alpha1, beta, &Rational::one(), &mut ChainCache(HashMap::new()))?;
    MatrixPencil::new(basis, coeffs)
}

/// Pencil with `B(z)·Ψ(z)ᵀ = (a_1 p, …, a_N p)ᵀ`, `a_j` the coefficients of `q`
/// on the basis.
pub fn product_pencil(q: &Poly, p: &Poly) -> Result<MatrixPencil> {
    product_pencil_capped(q, p, crate::basis::DEFAULT_BASIS_CAP)
}

pub fn product_pencil_capped(q: &Poly, p: &Poly, cap: usize) -> Result<MatrixPencil> {
    if q.nvars() != p.nvars() {
        return Err(Error::NvarsMismatch { left: q.nvars(), right: p.nvars() });
    }
    if q.is_zero() {
        return Err(Error::ZeroPolynomial("q"));
    }
    let bounds = DegreeBounds::from_pair(q, p);
    let basis = crate::basis::build_basis_capped(&bounds, cap)?;
    let mut coeffs = vec![SymMatrix::zeros(basis.len()); bounds.nvars() + 1];
    let mut cache = ChainCache(HashMap::new());
    let q_terms: Vec<_> = basis.monomials().iter().map(|m| (m, q.coeff(m))).filter(|(_, c)| !c.is_zero()).collect();
    let p_terms: Vec<_> = basis.monomials().iter().map(|m| (m, p.coeff(m))).filter(|(_, c)| !c.is_zero()).collect();
    for (alpha, a) in &q_terms {
        for (beta, b) in &p_terms {
            add_transfer(&mut coeffs, &basis, alpha, beta, &(a * b), &mut cache)?;
        }
    }
    MatrixPencil::new(basis, coeffs)
}

/// Exact check of `q(ζ)p(z) = Ψ(ζ)B(z)Ψ(z)ᵀ`.
///
/// Distinct basis monomials `ζ^{α_i}` are linearly independent, so the
/// identity holds iff row `i` of `B(z)Ψ(z)ᵀ` equals `coeff_q(α_i)·p(z)` and
/// every term of `q` is a basis monomial (or `p = 0`).
pub fn verify_polarization(q: &Poly, p: &Poly, pencil: &MatrixPencil) -> Result<bool> {
    if q.nvars() != p.nvars() {
        return Err(Error::NvarsMismatch { left: q.nvars(), right: p.nvars() });
    }
    if pencil.nvars() != q.nvars() || pencil.basis.is_homogenized() {
        return Err(Error::DimensionMismatch("pencil does not match the polynomial ring".into()));
    }
    let rows = pencil.apply_to_basis();
    let mons = pencil.basis.monomials();
    if !p.is_zero() && q.terms().any(|(m, _)| pencil.basis.index_of(m).is_none()) {
        return Ok(false);
    }
    Ok(rows.iter().zip(mons).all(|(row, m)| *row == p.scale(&q.coeff(m))))
}

/// `Ψ·B_k·Ψᵀ = W_k[q,p]` for every `k = 1..d`.
pub fn wronskian_diagonal_holds(q: &Poly, p: &Poly, pencil: &MatrixPencil) -> Result<bool> {
    let psi = pencil.basis.polys();
    for k in 1..=pencil.nvars() {
        if pencil.coeffs[k].poly_quad_form(&psi) != wronskian(q, p, k)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `B_k·∂^{n_k}Ψᵀ/∂z_k^{n_k} = 0` for every `k = 1..d`.
pub fn derivative_annihilation_holds(pencil: &MatrixPencil) -> bool {
    (1..=pencil.nvars()).all(|k| {
        let nk = pencil.basis.bounds.nk[k - 1];
        let dpsi = basis_derivative(&pencil.basis, k - 1, nk);
        pencil.coeffs[k].mul_poly_vec(&dpsi).iter().all(Poly::is_zero)
    })
}
