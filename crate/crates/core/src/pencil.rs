//! Linear symmetric matrix pencils `A(z) = A_0 + z_1 A_1 + … + z_d A_d`
//! over a monomial basis.

use num_traits::{One, Zero};

use crate::basis::MonomialBasis;
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::poly::{MultiIndex, Poly};
use crate::rational::{ExactComplex, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixPencil {
    pub basis: MonomialBasis,
    /// `[A_0, A_1, …, A_d]`.
    pub coeffs: Vec<SymMatrix>,
}

impl MatrixPencil {
    pub fn new(basis: MonomialBasis, coeffs: Vec<SymMatrix>) -> Result<Self> {
        let n = basis.len();
        if coeffs.len() != basis.nvars() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficient matrices for {} variables",
                coeffs.len(),
                basis.nvars()
            )));
        }
        if let Some(bad) = coeffs.iter().find(|m| m.size() != n) {
            return Err(Error::DimensionMismatch(format!("matrix of size {} over a basis of {n}", bad.size())));
        }
        Ok(MatrixPencil { basis, coeffs })
    }

    pub fn zero(basis: MonomialBasis) -> Self {
        let n = basis.len();
        let coeffs = vec![SymMatrix::zeros(n); basis.nvars() + 1];
        MatrixPencil { basis, coeffs }
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn nvars(&self) -> usize {
        self.basis.nvars()
    }

    pub fn add(&self, o: &MatrixPencil) -> MatrixPencil {
        MatrixPencil {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &MatrixPencil) -> MatrixPencil {
        MatrixPencil {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    /// Entry `(i,j)` of `A(z)` as a linear polynomial.
    pub fn entry_poly(&self, i: usize, j: usize) -> Poly {
        let d = self.nvars();
        let mut p = Poly::constant(d, self.coeffs[0].get(i, j).clone());
        for k in 1..=d {
            p.add_term(MultiIndex::unit(d, k - 1), self.coeffs[k].get(i, j).clone());
        }
        p
    }

    /// `A(z)` with polynomial entries.
    pub fn poly_matrix(&self) -> Vec<Vec<Poly>> {
        let n = self.size();
        (0..n).map(|i| (0..n).map(|j| self.entry_poly(i, j)).collect()).collect()
    }

    /// `A(z)·Ψ(z)ᵀ` for an affine basis.
    pub fn apply_to_basis(&self) -> Vec<Poly> {
        let d = self.nvars();
        let mons = self.basis.monomials();
        let mut out = vec![Poly::zero(d); self.size()];
        for (k, m) in self.coeffs.iter().enumerate() {
            let shift = if k == 0 { MultiIndex::zero(d) } else { MultiIndex::unit(d, k - 1) };
            for (i, j, c) in m.nonzeros() {
                out[i].add_term(mons[j].add(&shift), c.clone());
            }
        }
        out
    }

    /// `A(z)` at a complex point.
    pub fn evaluate(&self, z: &[ExactComplex]) -> Vec<Vec<ExactComplex>> {
        let n = self.size();
        let mut out = vec![vec![ExactComplex::zero(); n]; n];
        for (k, m) in self.coeffs.iter().enumerate() {
            let w = if k == 0 { ExactComplex::one() } else { z[k - 1].clone() };
            for (i, j, c) in m.nonzeros() {
                out[i][j] = &out[i][j] + &w.scale(c);
            }
        }
        out
    }

    /// `A(z)` at a real rational point.
    pub fn evaluate_real(&self, z: &[Rational]) -> Vec<Vec<Rational>> {
        let n = self.size();
        let mut out = vec![vec![Rational::zero(); n]; n];
        for (k, m) in self.coeffs.iter().enumerate() {
            let w = if k == 0 { Rational::one() } else { z[k - 1].clone() };
            if w.is_zero() {
                continue;
            }
            for (i, j, c) in m.nonzeros() {
                out[i][j] += c * &w;
            }
        }
        out
    }

    /// Restriction to the principal rows/columns `idx`.
    pub fn principal(&self, idx: &[usize]) -> Result<MatrixPencil> {
        let mons = idx.iter().map(|&i| self.basis.monomials()[i].clone()).collect();
        let basis = MonomialBasis::from_monomials(self.basis.bounds.clone(), mons, self.basis.is_homogenized())?;
        MatrixPencil::new(basis, self.coeffs.iter().map(|m| m.principal(idx)).collect())
    }
}

/// `∂^n Ψ / ∂z_k^n` for the 0-based variable `k`.
pub fn basis_derivative(basis: &MonomialBasis, k: usize, n: u32) -> Vec<Poly> {
    basis.polys().iter().map(|p| p.nth_derivative(k, n)).collect()
}
