//! Exact positive-semidefiniteness via pivoted `LDLᵀ`.

use num_traits::{Signed, Zero};

use crate::matrix::{Matrix, SymMatrix};
use crate::rational::Rational;

/// `P·M·Pᵀ = L·D·Lᵀ` where row `i` of `P·M·Pᵀ` is row `perm[i]` of `M`.
/// Only the first `d.len()` columns of `L` are used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdlWitness {
    pub perm: Vec<usize>,
    pub l: Matrix,
    pub d: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsdVerdict {
    Psd(LdlWitness),
    /// `vectorᵀ·M·vector = value < 0`.
    NotPsd { vector: Vec<Rational>, value: Rational },
}

impl PsdVerdict {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdVerdict::Psd(_))
    }
}

/// Lifts a vector `u` on the trailing Schur block after `k` pivots to the
/// original coordinates, keeping the quadratic form value.
fn lift_witness(l: &Matrix, perm: &[usize], k: usize, u: &[Rational]) -> Vec<Rational> {
    let n = perm.len();
    let mut w = vec![Rational::zero(); n];
    w[k..].clone_from_slice(u);
    // L11ᵀ x = −L21ᵀ u, L11 unit lower triangular.
    for c in (0..k).rev() {
        let mut s = Rational::zero();
        for i in c + 1..n {
            if !l[i][c].is_zero() && !w[i].is_zero() {
                s += &l[i][c] * &w[i];
            }
        }
        w[c] = -s;
    }
    let mut v = vec![Rational::zero(); n];
    for (i, &p) in perm.iter().enumerate() {
        v[p] = w[i].clone();
    }
    v
}

pub fn exact_psd_check(m: &SymMatrix) -> PsdVerdict {
    let n = m.size();
    let mut a = m.rows().clone();
    let mut l = vec![vec![Rational::zero(); n]; n];
    let mut perm: Vec<usize> = (0..n).collect();
    let mut d = Vec::new();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][i].cmp(&a[j][j]).then(j.cmp(&i))).unwrap();
        let negative = (k..n).find(|&i| a[i][i].is_negative());
        if let Some(i) = negative {
            let mut u = vec![Rational::zero(); n - k];
            u[i - k] = Rational::from_integer(1.into());
            let vector = lift_witness(&l, &perm, k, &u);
            let value = m.quad_form(&vector);
            return PsdVerdict::NotPsd { vector, value };
        }
        if a[p][p].is_zero() {
            // Zero diagonal: the Schur block is PSD only if it vanishes.
            for i in k..n {
                for j in i + 1..n {
                    if !a[i][j].is_zero() {
                        let mut u = vec![Rational::zero(); n - k];
                        u[i - k] = Rational::from_integer(1.into());
                        u[j - k] = Rational::from_integer(if a[i][j].is_positive() { (-1).into() } else { 1.into() });
                        let vector = lift_witness(&l, &perm, k, &u);
                        let value = m.quad_form(&vector);
                        return PsdVerdict::NotPsd { vector, value };
                    }
                }
            }
            break;
        }
        if p != k {
            a.swap(p, k);
            for row in a.iter_mut() {
                row.swap(p, k);
            }
            l.swap(p, k);
            perm.swap(p, k);
        }
        let piv = a[k][k].clone();
        l[k][k] = Rational::from_integer(1.into());
        for i in k + 1..n {
            l[i][k] = &a[i][k] / &piv;
        }
        for i in k + 1..n {
            if l[i][k].is_zero() {
                continue;
            }
            for j in k + 1..=i {
                if l[j][k].is_zero() {
                    continue;
                }
                let t = &l[i][k] * &l[j][k] * &piv;
                a[i][j] -= &t;
                if i != j {
                    a[j][i] -= t;
                }
            }
        }
        d.push(piv);
    }
    PsdVerdict::Psd(LdlWitness { perm, l, d })
}
