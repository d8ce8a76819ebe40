//! Long-resolvent representations `f = A11 − A12·A22⁻¹·A21` obtained from a
//! product pencil, and the inverse-resolvent form with a PSD last coefficient.

use num_traits::Zero;

use crate::ambiguity::psd_repair;
use crate::basis::MonomialBasis;
use crate::error::{Error, Result};
use crate::matrix::{self, det_bareiss, Matrix, SymMatrix};
use crate::pencil::MatrixPencil;
use crate::poly::{wronskian, EvalPoint, Poly, RationalFunction};
use crate::polarize::product_pencil;
use crate::rational::{ExactComplex, Rational};
use crate::sampling;
use crate::sos::{exact_psd_check, GramCertificate};

/// Transformed pencil `Ã = Q⁻ᵀ B Q⁻¹` with the retained block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolventRep {
    /// `Ã` over the permuted basis; row `scalar_index` stands for `q(z)`.
    pub pencil: MatrixPencil,
    pub scalar_index: usize,
    /// Rows of the nonsingular principal block `A22`.
    pub block_indices: Vec<usize>,
    /// First row of `Q`: coefficients of `q` in permuted basis order.
    pub q_coeffs: Vec<Rational>,
    /// `permutation[t]` is the original basis position now at position `t`.
    pub permutation: Vec<usize>,
}

impl ResolventRep {
    /// The `M × M` pencil on `{scalar_index} ∪ block_indices`.
    pub fn reduced(&self) -> Result<MatrixPencil> {
        let mut idx = vec![self.scalar_index];
        idx.extend(&self.block_indices);
        self.pencil.principal(&idx)
    }
}

/// Principal-minor nonzeroness oracle over a fixed pencil.
struct MinorOracle<'a> {
    pencil: &'a MatrixPencil,
    points: Vec<Matrix>,
    rng: rand_chacha::ChaCha8Rng,
}

const BASE_POINTS: usize = 4;
const WIDE_POINTS: usize = 40;
const SYMBOLIC_LIMIT: usize = 8;

impl<'a> MinorOracle<'a> {
    fn new(pencil: &'a MatrixPencil) -> Self {
        let mut o = MinorOracle { pencil, points: Vec::new(), rng: sampling::rng(0x5eed) };
        o.extend_points(BASE_POINTS);
        o
    }

    fn extend_points(&mut self, total: usize) {
        let d = self.pencil.nvars();
        while self.points.len() < total {
            let z = sampling::real_point(&mut self.rng, d, sampling::DEFAULT_BOX);
            self.points.push(self.pencil.evaluate_real(&z));
        }
    }

    fn nonzero_at(&self, idx: &[usize], from: usize) -> bool {
        self.points[from..].iter().any(|m| {
            let sub: Matrix = idx.iter().map(|&i| idx.iter().map(|&j| m[i][j].clone()).collect()).collect();
            !matrix::det(&sub).is_zero()
        })
    }

    /// Whether `det` of the principal subpencil on `idx` is a nonzero polynomial.
    fn nonzero(&mut self, idx: &[usize]) -> bool {
        if self.nonzero_at(idx, 0) {
            return true;
        }
        if idx.len() <= SYMBOLIC_LIMIT {
            let full = self.pencil.poly_matrix();
            let sub = idx.iter().map(|&i| idx.iter().map(|&j| full[i][j].clone()).collect()).collect();
            return !det_bareiss(sub, self.pencil.nvars()).is_zero();
        }
        self.extend_points(WIDE_POINTS);
        self.nonzero_at(idx, BASE_POINTS)
    }
}

/// Greedy maximal nonsingular principal block among `candidates`.
///
/// Single indices are tried in order; when none extends the block, pairs are
/// tried. For a symmetric matrix this reaches full rank: a nonzero Schur
/// complement has either a nonzero diagonal entry or a nonsingular 2×2
/// principal minor with zero diagonal.
fn select_block(pencil: &MatrixPencil, candidates: &[usize]) -> Vec<usize> {
    let mut oracle = MinorOracle::new(pencil);
    let mut chosen: Vec<usize> = Vec::new();
    loop {
        let mut grew = false;
        for &i in candidates {
            if chosen.contains(&i) {
                continue;
            }
            let mut trial = chosen.clone();
            trial.push(i);
            if oracle.nonzero(&trial) {
                chosen = trial;
                grew = true;
            }
        }
        if grew {
            continue;
        }
        let rest: Vec<usize> = candidates.iter().copied().filter(|i| !chosen.contains(i)).collect();
        'pairs: for (a, &i) in rest.iter().enumerate() {
            for &j in &rest[a + 1..] {
                let mut trial = chosen.clone();
                trial.extend([i, j]);
                if oracle.nonzero(&trial) {
                    chosen = trial;
                    grew = true;
                    break 'pairs;
                }
            }
        }
        if !grew {
            break;
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Applies the coefficient normalization and block selection to a pencil
/// satisfying `B(z)Ψᵀ = (a_j p)_j` for the coefficients `a_j` of `q`.
pub fn reduce_pencil(pencil: &MatrixPencil, q: &Poly) -> Result<ResolventRep> {
    if q.is_zero() {
        return Err(Error::ZeroPolynomial("q"));
    }
    let n = pencil.size();
    let mons = pencil.basis.monomials();
    let coeffs: Vec<Rational> = mons.iter().map(|m| q.coeff(m)).collect();
    let lead = coeffs
        .iter()
        .position(|c| !c.is_zero())
        .ok_or_else(|| Error::BasisInsufficient { monomial: q.leading().unwrap().0 .0.clone() })?;
    let mut permutation: Vec<usize> = (0..n).collect();
    permutation.swap(0, lead);

    let perm_basis = MonomialBasis::from_monomials(
        pencil.basis.bounds.clone(),
        permutation.iter().map(|&i| mons[i].clone()).collect(),
        pencil.basis.is_homogenized(),
    )?;
    let a: Vec<Rational> = permutation.iter().map(|&i| coeffs[i].clone()).collect();
    // T = P·Q⁻¹ where P permutes rows and Q⁻¹ has first row (1/a1, −a2/a1, …).
    let mut q_inv = matrix::identity(n);
    let inv_a1 = a[0].recip();
    q_inv[0][0] = inv_a1.clone();
    for j in 1..n {
        q_inv[0][j] = -(&a[j] * &inv_a1);
    }
    let mut t = matrix::zeros(n, n);
    for (new, &old) in permutation.iter().enumerate() {
        t[old] = q_inv[new].clone();
    }
    let coeffs_t = pencil.coeffs.iter().map(|m| m.congruence(&t)).collect();
    let transformed = MatrixPencil::new(perm_basis, coeffs_t)?;
    let candidates: Vec<usize> = (1..n).collect();
    let block_indices = select_block(&transformed, &candidates);
    Ok(ResolventRep { pencil: transformed, scalar_index: 0, block_indices, q_coeffs: a, permutation })
}

pub fn long_resolvent(f: &RationalFunction) -> Result<ResolventRep> {
    let b = product_pencil(&f.den, &f.num)?;
    reduce_pencil(&b, &f.den)
}

/// Solves `A x = B` over exact complex numbers; `None` if `A` is singular.
fn solve_complex(mut a: Vec<Vec<ExactComplex>>, mut b: Vec<Vec<ExactComplex>>) -> Option<Vec<Vec<ExactComplex>>> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        let piv = a[c][c].clone();
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].checked_div(&piv).unwrap();
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] = &a[i][j] - &t;
            }
            for j in 0..m {
                let t = &f * &b[c][j];
                b[i][j] = &b[i][j] - &t;
            }
        }
    }
    Some(
        b.into_iter()
            .enumerate()
            .map(|(i, row)| row.into_iter().map(|x| x.checked_div(&a[i][i]).unwrap()).collect())
            .collect(),
    )
}

/// Exact Schur complement `A11 − A12·A22⁻¹·A21` at `z`.
pub fn eval_resolvent(rep: &ResolventRep, z: &EvalPoint) -> Result<ExactComplex> {
    if z.len() != rep.pencil.nvars() {
        return Err(Error::LengthMismatch { expected: rep.pencil.nvars(), found: z.len() });
    }
    let a = rep.pencil.evaluate(&z.coords);
    let s = rep.scalar_index;
    let blk = &rep.block_indices;
    let a11 = a[s][s].clone();
    if blk.is_empty() {
        return Ok(a11);
    }
    let a22 = blk.iter().map(|&i| blk.iter().map(|&j| a[i][j].clone()).collect()).collect();
    let a21 = blk.iter().map(|&i| vec![a[i][s].clone()]).collect();
    let x = solve_complex(a22, a21).ok_or(Error::SingularBlock)?;
    let mut acc = a11;
    for (k, &j) in blk.iter().enumerate() {
        acc = &acc - &(&a[s][j] * &x[k][0]);
    }
    Ok(acc)
}

/// `π·A(z)⁻¹·πᵀ` with `π = (1, 0, …, 0)` for a reduced pencil; `None` if `A(z)` is singular.
pub fn inverse_corner(pencil: &MatrixPencil, z: &EvalPoint) -> Option<ExactComplex> {
    let a = pencil.evaluate(&z.coords);
    let n = a.len();
    let mut e1 = vec![vec![ExactComplex::zero()]; n];
    e1[0][0] = ExactComplex::one();
    solve_complex(a, e1).map(|x| x[0][0].clone())
}

/// Pencil `A(z)` with `f = [π·A(z)⁻¹·πᵀ]⁻¹` and `A_d ⪰ 0`, built from a Gram
/// certificate for `s²·W_d[q, p]` over the basis of `(q·s, p·s)`.
pub fn inverse_resolvent_form(f: &RationalFunction, s: &Poly, cert: &GramCertificate) -> Result<MatrixPencil> {
    let d = f.nvars();
    if s.nvars() != d {
        return Err(Error::NvarsMismatch { left: d, right: s.nvars() });
    }
    let (qs, ps) = (&f.den * s, &f.num * s);
    let target = &(s * s) * &wronskian(&f.den, &f.num, d)?;
    if cert.target != target {
        return Err(Error::CertificateMismatch("target is not s²·W_d[q, p]".into()));
    }
    cert.verify()?;
    let b = product_pencil(&qs, &ps)?;
    if cert.basis != b.basis {
        return Err(Error::CertificateMismatch("certificate basis differs from the pencil basis".into()));
    }
    let repaired = psd_repair(&b, &qs, &ps, &cert.gram)?;
    let rep = reduce_pencil(&repaired, &qs)?;
    let a = rep.reduced()?;
    if !exact_psd_check(&a.coeffs[d]).is_psd() {
        return Err(Error::Internal("reduced A_d lost positive semidefiniteness".into()));
    }
    Ok(a)
}

/// Congruence by `Q` preserves the sign pattern of each coefficient, and a
/// principal block of a PSD matrix is PSD.
pub fn reduced_coefficient(rep: &ResolventRep, k: usize) -> Result<SymMatrix> {
    Ok(rep.reduced()?.coeffs[k].clone())
}
