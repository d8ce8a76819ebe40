//! Constrained monomial row vectors and their homogenization.
//!
//! Basis order is by ascending total degree, and within one degree from the
//! lexicographically largest monomial down, so `{1, z1, z2, z1*z2}`.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{MultiIndex, Poly};
use crate::rational::Rational;

pub const DEFAULT_BASIS_CAP: usize = 5000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeBounds {
    /// Total-degree bound.
    pub n0: u32,
    /// Per-variable bounds `n_1, …, n_d`.
    pub nk: Vec<u32>,
}

impl DegreeBounds {
    pub fn new(n0: u32, nk: Vec<u32>) -> Self {
        DegreeBounds { n0, nk }
    }

    pub fn nvars(&self) -> usize {
        self.nk.len()
    }

    /// `n0 = max(deg p, deg q)`, `n_k = max(deg_k p, deg_k q)`.
    pub fn from_pair(q: &Poly, p: &Poly) -> Self {
        assert_eq!(q.nvars(), p.nvars());
        let d = q.nvars();
        let mx = |a: Option<u32>, b: Option<u32>| a.unwrap_or(0).max(b.unwrap_or(0));
        DegreeBounds {
            n0: mx(q.degree(), p.degree()),
            nk: (0..d).map(|k| mx(q.degree_in(k), p.degree_in(k))).collect(),
        }
    }

    /// Half-degree bounds for a Gram basis of `f`.
    pub fn half_of(f: &Poly) -> Self {
        DegreeBounds {
            n0: f.degree().unwrap_or(0) / 2,
            nk: (0..f.nvars()).map(|k| f.degree_in(k).unwrap_or(0) / 2).collect(),
        }
    }

    pub fn admits(&self, m: &MultiIndex) -> bool {
        m.len() == self.nk.len()
            && m.degree() <= self.n0
            && m.0.iter().zip(&self.nk).all(|(e, n)| e <= n)
    }
}

/// Canonical basis comparison.
pub fn basis_cmp(a: &MultiIndex, b: &MultiIndex) -> Ordering {
    a.degree().cmp(&b.degree()).then_with(|| b.0.cmp(&a.0))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    pub bounds: DegreeBounds,
    monomials: Vec<MultiIndex>,
    homogenized: bool,
    index: HashMap<MultiIndex, usize>,
}

impl MonomialBasis {
    /// Builds a basis from an explicit monomial list kept in the given order.
    pub fn from_monomials(bounds: DegreeBounds, monomials: Vec<MultiIndex>, homogenized: bool) -> Result<Self> {
        let index: HashMap<_, _> = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        if index.len() != monomials.len() {
            return Err(Error::Artifact("basis has repeated monomials".into()));
        }
        let width = bounds.nvars() + usize::from(homogenized);
        if monomials.iter().any(|m| m.len() != width) {
            return Err(Error::Artifact("basis monomials have inconsistent length".into()));
        }
        Ok(MonomialBasis { bounds, monomials, homogenized, index })
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn is_homogenized(&self) -> bool {
        self.homogenized
    }

    /// Number of affine variables `d`.
    pub fn nvars(&self) -> usize {
        self.bounds.nvars()
    }

    /// Length of stored exponent vectors (`d`, or `d+1` when homogenized).
    pub fn width(&self) -> usize {
        self.nvars() + usize::from(self.homogenized)
    }

    /// 0-based position of `m`, if present.
    pub fn index_of(&self, m: &MultiIndex) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Entries of the row vector as polynomials in `width()` variables.
    pub fn polys(&self) -> Vec<Poly> {
        self.monomials.iter().map(|m| Poly::monomial(m.clone(), Rational::one())).collect()
    }

    /// Drops `z0`, recovering the affine basis.
    pub fn dehomogenize(&self) -> Result<MonomialBasis> {
        if !self.homogenized {
            return Err(Error::Precondition("basis is not homogenized".into()));
        }
        let d = self.nvars();
        let mons = self.monomials.iter().map(|m| MultiIndex(m.0[..d].to_vec())).collect();
        MonomialBasis::from_monomials(self.bounds.clone(), mons, false)
    }
}

/// Every `z^α` with `|α| ≤ n0` and `α_k ≤ n_k`, in canonical order.
pub fn build_basis(bounds: &DegreeBounds) -> Result<MonomialBasis> {
    build_basis_capped(bounds, DEFAULT_BASIS_CAP)
}

pub fn build_basis_capped(bounds: &DegreeBounds, cap: usize) -> Result<MonomialBasis> {
    let d = bounds.nvars();
    let mut out = Vec::new();
    let mut cur = vec![0u32; d];
    fn rec(k: usize, left: u32, b: &DegreeBounds, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>, cap: usize) -> bool {
        if k == cur.len() {
            out.push(MultiIndex(cur.clone()));
            return out.len() <= cap;
        }
        for e in 0..=b.nk[k].min(left) {
            cur[k] = e;
            if !rec(k + 1, left - e, b, cur, out, cap) {
                return false;
            }
        }
        cur[k] = 0;
        true
    }
    if !rec(0, bounds.n0, bounds, &mut cur, &mut out, cap) {
        return Err(Error::BasisCap { size: count_basis(bounds), cap });
    }
    out.sort_by(basis_cmp);
    MonomialBasis::from_monomials(bounds.clone(), out, false)
}

/// Number of basis monomials, without materializing them.
pub fn count_basis(bounds: &DegreeBounds) -> usize {
    // ways[t] = number of partial exponent vectors of total degree t
    let n0 = bounds.n0 as usize;
    let mut ways = vec![0usize; n0 + 1];
    ways[0] = 1;
    for &nk in &bounds.nk {
        let mut next = vec![0usize; n0 + 1];
        for (t, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for e in 0..=(nk as usize).min(n0 - t) {
                next[t + e] = next[t + e].saturating_add(w);
            }
        }
        ways = next;
    }
    ways.iter().fold(0usize, |a, &b| a.saturating_add(b))
}

/// Multiplies each `z^α` by `z0^(n0 − |α|)`; `z0` is stored last.
pub fn homogenize_basis(b: &MonomialBasis) -> Result<MonomialBasis> {
    if b.homogenized {
        return Err(Error::Precondition("basis is already homogenized".into()));
    }
    let n0 = b.bounds.n0;
    let mons = b
        .monomials
        .iter()
        .map(|m| {
            let mut e = m.0.clone();
            e.push(n0 - m.degree());
            MultiIndex(e)
        })
        .collect();
    MonomialBasis::from_monomials(b.bounds.clone(), mons, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mons(b: &MonomialBasis) -> Vec<Vec<u32>> {
        b.monomials().iter().map(|m| m.0.clone()).collect()
    }

    #[test]
    fn small_bases() {
        let b = build_basis(&DegreeBounds::new(2, vec![1, 1])).unwrap();
        assert_eq!(mons(&b), vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        let b = build_basis(&DegreeBounds::new(1, vec![1, 1])).unwrap();
        assert_eq!(mons(&b), vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
        let b = build_basis(&DegreeBounds::new(2, vec![2])).unwrap();
        assert_eq!(mons(&b), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn index_lookup() {
        let b = build_basis(&DegreeBounds::new(1, vec![1, 1])).unwrap();
        assert_eq!(b.index_of(&MultiIndex(vec![0, 1])), Some(2));
        assert_eq!(b.index_of(&MultiIndex(vec![1, 1])), None);
        assert_eq!(b.index_of(&MultiIndex(vec![0, 0])), Some(0));
    }

    #[test]
    fn homogenization() {
        let b = build_basis(&DegreeBounds::new(2, vec![1, 1])).unwrap();
        let h = homogenize_basis(&b).unwrap();
        assert_eq!(mons(&h), vec![vec![0, 0, 2], vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 0]]);
        assert!(h.monomials().iter().all(|m| m.degree() == 2));
        assert_eq!(h.dehomogenize().unwrap(), b);
        assert!(homogenize_basis(&h).is_err());
        let one = build_basis(&DegreeBounds::new(0, vec![3])).unwrap();
        assert_eq!(mons(&homogenize_basis(&one).unwrap()), vec![vec![0, 0]]);
    }

    #[test]
    fn cap_is_enforced() {
        let bounds = DegreeBounds::new(30, vec![10, 10, 10]);
        match build_basis_capped(&bounds, 100) {
            Err(Error::BasisCap { size, cap }) => {
                assert_eq!(cap, 100);
                assert_eq!(size, 1331);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bounds_from_pair() {
        let q = Poly::parse("z1 + z2").unwrap();
        let p = Poly::parse("z1*z2").unwrap();
        let b = DegreeBounds::from_pair(&q, &p);
        assert_eq!(b, DegreeBounds::new(2, vec![1, 1]));
    }
}
