//! The affine Gram slice of a target polynomial, its pruning, and exact
//! re-projection of rounded numeric Gram matrices.

use std::collections::{BTreeMap, HashMap, HashSet};

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};

use crate::basis::MonomialBasis;
use crate::error::{Error, Result};
use crate::matrix::{rref, Matrix, SymMatrix};
use crate::poly::{monomial_string, MultiIndex, Poly};
use crate::rational::{approximate, to_f64, Rational};

use super::sdp::SdpProblem;

/// Linear constraints on a Gram matrix over the surviving basis rows.
/// Local index `i` refers to basis row `active[i]`.
#[derive(Clone, Debug)]
pub struct GramSystem {
    pub n: usize,
    pub active: Vec<usize>,
    /// `(γ, unordered local pairs (a ≤ b) with α_a + α_b = γ, coefficient of z^γ)`.
    pub groups: Vec<(MultiIndex, Vec<(usize, usize)>, Rational)>,
    /// Additional constraints in local indices.
    pub extra: Vec<LinearConstraint>,
}

/// `Σ c·G[i][j] = rhs` over upper-triangular entries `i ≤ j`; the symmetric
/// partner is implied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, usize, Rational)>,
    pub rhs: Rational,
}

pub enum Prepared {
    System(GramSystem),
    /// Exact obstruction found while pruning.
    Infeasible(String),
}

fn dot(w: &[i64], m: &MultiIndex) -> i64 {
    w.iter().zip(&m.0).map(|(a, b)| a * *b as i64).sum()
}

fn directions(width: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for k in 0..width {
        for s in [1, -1] {
            let mut w = vec![0; width];
            w[k] = s;
            out.push(w);
        }
    }
    out.push(vec![1; width]);
    out.push(vec![-1; width]);
    out
}

/// Checks coverage, then discards rows forced to vanish in every PSD Gram
/// matrix: monomials on a face of the basis hull beyond the target's
/// support, and diagonal entries whose only contribution is a zero
/// coefficient.
pub fn prepare(f: &Poly, basis: &MonomialBasis) -> Result<Prepared> {
    if basis.width() != f.nvars() {
        return Err(Error::NvarsMismatch { left: basis.width(), right: f.nvars() });
    }
    let mons = basis.monomials();
    let n = mons.len();
    let mut sums: HashSet<MultiIndex> = HashSet::new();
    for a in 0..n {
        for b in a..n {
            sums.insert(mons[a].add(&mons[b]));
        }
    }
    if let Some((m, _)) = f.terms().find(|(m, _)| !sums.contains(*m)) {
        return Err(Error::BasisInsufficient { monomial: m.0.clone() });
    }

    let mut active = vec![!f.is_zero(); n];
    let dirs = directions(f.nvars());
    let fmax: Vec<Option<i64>> = dirs.iter().map(|w| f.terms().map(|(m, _)| dot(w, m)).max()).collect();
    loop {
        let mut changed = false;
        for (w, fm) in dirs.iter().zip(&fmax) {
            let Some(fm) = fm else { continue };
            let Some(top) = (0..n).filter(|&i| active[i]).map(|i| dot(w, &mons[i])).max() else { continue };
            if 2 * top > *fm {
                for i in 0..n {
                    if active[i] && dot(w, &mons[i]) == top {
                        active[i] = false;
                    }
                }
                changed = true;
            }
        }
        for i in 0..n {
            if !active[i] {
                continue;
            }
            let g = mons[i].add(&mons[i]);
            let contributors = (0..n)
                .filter(|&a| active[a])
                .filter_map(|a| g.checked_sub(&mons[a]).and_then(|r| basis.index_of(&r)))
                .filter(|&b| active[b])
                .count();
            if contributors == 1 {
                let c = f.coeff(&g);
                if c.is_negative() {
                    return Ok(Prepared::Infeasible(format!(
                        "the coefficient of {} is negative and can only come from a diagonal entry",
                        monomial_string(&g)
                    )));
                }
                if c.is_zero() {
                    active[i] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let active: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
    let mut groups: BTreeMap<MultiIndex, Vec<(usize, usize)>> = BTreeMap::new();
    for (a, &ia) in active.iter().enumerate() {
        for (b, &ib) in active.iter().enumerate().skip(a) {
            groups.entry(mons[ia].add(&mons[ib])).or_default().push((a, b));
        }
    }
    if let Some((m, _)) = f.terms().find(|(m, _)| !groups.contains_key(*m)) {
        return Ok(Prepared::Infeasible(format!(
            "monomial {} is not reachable by the rows that can be nonzero",
            monomial_string(m)
        )));
    }
    let groups = groups.into_iter().map(|(g, ps)| {
        let c = f.coeff(&g);
        (g, ps, c)
    });
    Ok(Prepared::System(GramSystem { n, active, groups: groups.collect(), extra: Vec::new() }))
}

impl GramSystem {
    pub fn size(&self) -> usize {
        self.active.len()
    }

    /// Restricts the system by constraints over full basis indices. Entries
    /// in pruned rows are zero in every PSD Gram matrix and drop out; `Err`
    /// carries the reason when a constraint collapses to `0 = c ≠ 0`.
    pub fn constrain(&mut self, cons: &[LinearConstraint]) -> std::result::Result<(), String> {
        let local: HashMap<usize, usize> = self.active.iter().enumerate().map(|(l, &i)| (i, l)).collect();
        for c in cons {
            let terms: Vec<_> = c
                .terms
                .iter()
                .filter_map(|(i, j, v)| Some((local.get(i)?, local.get(j)?, v)))
                .map(|(&a, &b, v)| (a.min(b), a.max(b), v.clone()))
                .filter(|t| !t.2.is_zero())
                .collect();
            if terms.is_empty() {
                if !c.rhs.is_zero() {
                    return Err("an imposed linear constraint forces a pruned entry to be nonzero".into());
                }
                continue;
            }
            self.extra.push(LinearConstraint { terms, rhs: c.rhs.clone() });
        }
        let nv = self.vars().len();
        if rref(&mut self.constraint_rows()).last() == Some(&nv) {
            return Err("the imposed linear constraints are inconsistent with the coefficient identities".into());
        }
        Ok(())
    }

    /// Upper-triangular entries `(a, b)`, `a ≤ b`, in variable order.
    fn vars(&self) -> Vec<(usize, usize)> {
        let k = self.size();
        (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect()
    }

    /// Augmented constraint rows over the upper-triangular entries.
    fn constraint_rows(&self) -> Matrix {
        let k = self.size();
        let nv = k * (k + 1) / 2;
        let two = Rational::from_integer(2.into());
        let mut rows: Matrix = Vec::new();
        for (_, ps, c) in &self.groups {
            let mut row = vec![Rational::zero(); nv + 1];
            for &(a, b) in ps {
                row[var_index(k, a, b)] = if a == b { Rational::from_integer(1.into()) } else { two.clone() };
            }
            row[nv] = c.clone();
            rows.push(row);
        }
        for c in &self.extra {
            let mut row = vec![Rational::zero(); nv + 1];
            for (a, b, v) in &c.terms {
                row[var_index(k, *a, *b)] += v;
            }
            row[nv] = c.rhs.clone();
            rows.push(row);
        }
        rows
    }

    /// Coefficient groups have disjoint supports and are independent; with
    /// extra constraints the rows are first reduced to an independent set.
    pub fn numeric_problem(&self) -> SdpProblem {
        let sym = |a: usize, b: usize, w: f64| if a == b { vec![(a, a, w)] } else { vec![(a, b, w / 2.0), (b, a, w / 2.0)] };
        let mut rows = self.constraint_rows();
        if !self.extra.is_empty() {
            let r = rref(&mut rows).len();
            rows.truncate(r);
        }
        let vars = self.vars();
        let nv = vars.len();
        let pairs = rows
            .iter()
            .map(|row| {
                row[..nv]
                    .iter()
                    .zip(&vars)
                    .filter(|(c, _)| !c.is_zero())
                    .flat_map(|(c, &(a, b))| sym(a, b, to_f64(c)))
                    .collect()
            })
            .collect();
        let rhs = rows.iter().map(|row| to_f64(&row[nv])).collect();
        SdpProblem { n: self.size(), pairs, rhs }
    }

    /// Places a local Gram matrix into the full basis.
    pub fn embed(&self, local: &SymMatrix) -> SymMatrix {
        SymMatrix::embed(local, &self.active, self.n)
    }
}

/// Exact parametrization of the slice: RREF of the constraints on the
/// upper-triangular entries, pivots solved from the free entries.
pub struct Slice {
    k: usize,
    vars: Vec<(usize, usize)>,
    reduced: Matrix,
    pivots: Vec<usize>,
}

fn var_index(k: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a * k - a * (a + 1) / 2 + b
}

impl Slice {
    /// `None` when the constraints (including `G·v = 0` for each kernel
    /// vector) are inconsistent.
    pub fn new(sys: &GramSystem, kernel: &[Vec<Rational>]) -> Option<Slice> {
        let k = sys.size();
        let vars = sys.vars();
        let nv = vars.len();
        let mut rows = sys.constraint_rows();
        for v in kernel {
            for a in 0..k {
                let mut row = vec![Rational::zero(); nv + 1];
                for (b, vb) in v.iter().enumerate() {
                    if !vb.is_zero() {
                        row[var_index(k, a, b)] += vb;
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
        let pivots = rref(&mut rows);
        if pivots.last() == Some(&nv) {
            return None;
        }
        Some(Slice { k, vars, reduced: rows, pivots })
    }

    /// Rounds the free entries of `x` to denominators at most `max_den`
    /// and solves the pivot entries exactly.
    pub fn project(&self, x: &DMatrix<f64>, max_den: u64) -> SymMatrix {
        let nv = self.vars.len();
        let is_pivot: HashMap<usize, usize> = self.pivots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
        let mut val: Vec<Rational> = vec![Rational::zero(); nv];
        for (c, &(a, b)) in self.vars.iter().enumerate() {
            if !is_pivot.contains_key(&c) {
                val[c] = approximate(x[(a, b)], max_den);
            }
        }
        for (r, &pc) in self.pivots.iter().enumerate() {
            let row = &self.reduced[r];
            let mut s = row[nv].clone();
            for (c, coef) in row.iter().enumerate().take(nv) {
                if c != pc && !coef.is_zero() && !val[c].is_zero() {
                    s -= coef * &val[c];
                }
            }
            val[pc] = s;
        }
        let mut g = SymMatrix::zeros(self.k);
        for (c, &(a, b)) in self.vars.iter().enumerate() {
            g.set(a, b, val[c].clone());
        }
        g
    }
}

/// Near-kernel of a numeric PSD matrix, cut at the largest eigenvalue gap
/// below `cutoff·λ_max`; `None` if there is no clear gap.
pub fn numeric_kernel(x: &DMatrix<f64>, cutoff: f64) -> Option<DMatrix<f64>> {
    let eig = x.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let lmax = eig.eigenvalues.max().max(f64::MIN_POSITIVE);
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0) / lmax).collect();
    let mut best: Option<(usize, f64)> = None;
    for i in 0..vals.len().saturating_sub(1) {
        if vals[i] >= cutoff {
            break;
        }
        let ratio = vals[i + 1] / vals[i].max(1e-300);
        if best.is_none_or(|(_, r)| ratio > r) {
            best = Some((i, ratio));
        }
    }
    let (cut, ratio) = best?;
    if ratio < 1e3 {
        return None;
    }
    let cols: Vec<_> = order[..=cut].iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    Some(DMatrix::from_columns(&cols))
}

/// Rational row-echelon basis of the column span of `k`, entries rounded
/// to denominators at most `max_den`.
pub fn rationalize_span(k: &DMatrix<f64>, max_den: u64) -> Vec<Vec<Rational>> {
    let mut m = k.transpose();
    let (rows, cols) = m.shape();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = (r..rows).max_by(|&i, &j| m[(i, c)].abs().total_cmp(&m[(j, c)].abs())).unwrap();
        if m[(p, c)].abs() < 1e-6 {
            continue;
        }
        m.swap_rows(r, p);
        let piv = m[(r, c)];
        for j in 0..cols {
            m[(r, j)] /= piv;
        }
        for i in 0..rows {
            if i != r {
                let f = m[(i, c)];
                for j in 0..cols {
                    m[(i, j)] -= f * m[(r, j)];
                }
            }
        }
        r += 1;
    }
    (0..r).map(|i| (0..cols).map(|j| approximate(m[(i, j)], max_den)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_basis, DegreeBounds};

    #[test]
    fn pruning_keeps_only_needed_rows() {
        let f = Poly::parse("z2^2").unwrap();
        let basis = build_basis(&DegreeBounds::new(1, vec![1, 1])).unwrap();
        let Prepared::System(sys) = prepare(&f, &basis).unwrap() else { panic!() };
        assert_eq!(sys.active, vec![basis.index_of(&MultiIndex(vec![0, 1])).unwrap()]);
    }

    #[test]
    fn negative_forced_diagonal() {
        let f = Poly::parse("z1^2*z2^2 - z1^4").unwrap();
        let basis = build_basis(&DegreeBounds::new(2, vec![2, 2])).unwrap();
        assert!(matches!(prepare(&f, &basis).unwrap(), Prepared::Infeasible(_)));
    }

    #[test]
    fn insufficient_basis() {
        let f = Poly::parse_with_nvars("z1^6", 2).unwrap();
        let basis = build_basis(&DegreeBounds::new(1, vec![1, 1])).unwrap();
        assert!(matches!(prepare(&f, &basis), Err(Error::BasisInsufficient { .. })));
    }

    #[test]
    fn projection_is_exact_on_slice() {
        let f = Poly::parse("z1^2 + z1*z2 + z2^2").unwrap();
        let basis = build_basis(&DegreeBounds::new(1, vec![1, 1])).unwrap();
        let Prepared::System(sys) = prepare(&f, &basis).unwrap() else { panic!() };
        let slice = Slice::new(&sys, &[]).unwrap();
        let x = DMatrix::from_row_slice(2, 2, &[1.0000001, 0.4999999, 0.4999999, 0.9999999]);
        let g = sys.embed(&slice.project(&x, 10_000));
        assert_eq!(g.poly_quad_form(&basis.polys()), f);
    }

    #[test]
    fn kernel_of_rank_one() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0 + 1e-12]);
        let k = numeric_kernel(&x, 1e-4).unwrap();
        let v = rationalize_span(&k, 100);
        assert_eq!(v, vec![vec![Rational::from_integer(1.into()), Rational::from_integer(1.into())]]);
    }
}
