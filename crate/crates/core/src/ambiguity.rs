//! Ambiguity of symmetric pencil representations: symmetric `S` with
//! `Ψ̃·S·Ψ̃ᵀ = 0`, an explicit basis of that space built from pairs of
//! monomials, lifting a last-coefficient ambiguity to a full pencil, and
//! replacing `B_d` by a PSD Gram matrix.
//!
//! Homogenized exponent vectors store `z0` last, so storage index `k < d`
//! is `z_{k+1}` and storage index `d` is `z0`. Pencil slot 0 is the
//! constant term (the `z0` coefficient) and slot `k` is the `z_k`
//! coefficient.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::basis::{build_basis, homogenize_basis, DegreeBounds, MonomialBasis};
use crate::error::{Error, Result};
use crate::matrix::{nullspace, solve, Matrix, SymMatrix};
use crate::pencil::{basis_derivative, MatrixPencil};
use crate::polarize::verify_polarization;
use crate::poly::{wronskian, MultiIndex, Poly};
use crate::rational::{int, Rational};
use crate::sos::{exact_psd_check, sos_feasibility_constrained, LinearConstraint, SosOptions, SosOutcome};

/// All unordered pairs `{α_i, α_j}` of basis monomials with `α_i + α_j = β`.
/// Each pair is stored as `(i, j)` with `α_i ≥ α_j` in graded-lex order, and
/// the list is sorted by that key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSet {
    pub beta: MultiIndex,
    pub pairs: Vec<(usize, usize)>,
}

impl PairSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn pairs_for_beta(basis: &MonomialBasis, beta: &MultiIndex) -> PairSet {
    let mons = basis.monomials();
    let mut pairs: Vec<(usize, usize)> = mons
        .iter()
        .enumerate()
        .filter_map(|(i, a)| {
            let b = beta.checked_sub(a)?;
            let j = basis.index_of(&b)?;
            (a >= &b).then_some((i, j))
        })
        .collect();
    pairs.sort_by(|x, y| (&mons[x.0], &mons[x.1]).cmp(&(&mons[y.0], &mons[y.1])));
    PairSet { beta: beta.clone(), pairs }
}

/// Every `β` reachable as a pairwise sum, with its pairs, in increasing `β`.
pub fn all_pair_sets(basis: &MonomialBasis) -> Vec<PairSet> {
    let mons = basis.monomials();
    let mut betas: Vec<MultiIndex> = Vec::new();
    for a in 0..mons.len() {
        for b in a..mons.len() {
            betas.push(mons[a].add(&mons[b]));
        }
    }
    betas.sort();
    betas.dedup();
    betas.iter().map(|b| pairs_for_beta(basis, b)).collect()
}

/// Multiply the first member by `z_plus / z_minus` and the second by the
/// inverse (storage indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Move {
    pub plus: usize,
    pub minus: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    pub from: usize,
    pub to: usize,
    pub mv: Move,
}

fn apply_move(m: &MultiIndex, plus: usize, minus: usize) -> Option<MultiIndex> {
    if m.0[minus] == 0 {
        return None;
    }
    let mut e = m.0.clone();
    e[plus] += 1;
    e[minus] -= 1;
    Some(MultiIndex(e))
}

/// Canonical position of the pair `{x, y}` in `ps`.
fn pair_position(basis: &MonomialBasis, ps: &PairSet, x: &MultiIndex, y: &MultiIndex) -> Option<usize> {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    let key = (basis.index_of(hi)?, basis.index_of(lo)?);
    ps.pairs.iter().position(|p| *p == key)
}

/// Neighbors of pair `k` under single moves, sorted by target position.
fn neighbors(basis: &MonomialBasis, ps: &PairSet, k: usize) -> Vec<(usize, Move)> {
    let mons = basis.monomials();
    let (x, y) = (&mons[ps.pairs[k].0], &mons[ps.pairs[k].1]);
    let w = basis.width();
    let mut out: BTreeMap<usize, Move> = BTreeMap::new();
    for plus in 0..w {
        for minus in 0..w {
            if plus == minus {
                continue;
            }
            let (Some(x2), Some(y2)) = (apply_move(x, plus, minus), apply_move(y, minus, plus)) else { continue };
            if let Some(t) = pair_position(basis, ps, &x2, &y2) {
                if t != k {
                    out.entry(t).or_insert(Move { plus, minus });
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Breadth-first spanning tree of the single-move graph, rooted at the
/// canonically smallest pair.
pub fn elementary_transform_tree(basis: &MonomialBasis, ps: &PairSet) -> Result<Vec<TreeEdge>> {
    let m = ps.len();
    if m == 0 {
        return Err(Error::Precondition("empty pair set".into()));
    }
    let mut seen = vec![false; m];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    let mut edges = Vec::new();
    while let Some(k) = queue.pop_front() {
        for (t, mv) in neighbors(basis, ps, k) {
            if !seen[t] {
                seen[t] = true;
                edges.push(TreeEdge { from: k, to: t, mv });
                queue.push_back(t);
            }
        }
    }
    if edges.len() + 1 != m {
        return Err(Error::Internal(format!(
            "pair graph for β = {:?} is disconnected ({} of {} pairs reached)",
            ps.beta.0,
            edges.len() + 1,
            m
        )));
    }
    Ok(edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    /// Support `(z_r²z^γ, z_r z_l z^γ, z_l²z^γ)`.
    Triple,
    /// Support `(z_μ z^γ1, z_ν z^γ1, z_ν z^γ2, z_μ z^γ2)`.
    Quad,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbiguityBasisElement {
    pub kind: ElementKind,
    pub beta: MultiIndex,
    /// Basis indices in stencil order.
    pub support: Vec<usize>,
    pub stencil: SymMatrix,
    /// Storage indices `(r, l)` for a triple, `(μ, ν)` for a quad.
    pub vars: (usize, usize),
    /// `[γ]` for a triple, `[γ1, γ2]` for a quad.
    pub gammas: Vec<MultiIndex>,
}

impl AmbiguityBasisElement {
    pub fn matrix(&self, n: usize) -> SymMatrix {
        let mut out = SymMatrix::zeros(n);
        out.add_embedded(&self.stencil, &self.support);
        out
    }

    fn uses_var(&self, k: usize) -> bool {
        self.vars.0 == k || self.vars.1 == k
    }
}

pub fn triple_stencil() -> SymMatrix {
    SymMatrix::from_rows(vec![
        vec![int(0), int(0), int(-1)],
        vec![int(0), int(2), int(0)],
        vec![int(-1), int(0), int(0)],
    ])
    .expect("symmetric")
}

pub fn quad_stencil() -> SymMatrix {
    let mut s = SymMatrix::zeros(4);
    s.set(0, 2, int(1));
    s.set(1, 3, int(-1));
    s
}

fn edge_element(basis: &MonomialBasis, ps: &PairSet, e: &TreeEdge) -> Result<AmbiguityBasisElement> {
    let mons = basis.monomials();
    let (x, y) = (&mons[ps.pairs[e.from].0], &mons[ps.pairs[e.from].1]);
    let (k, l) = (e.mv.plus, e.mv.minus);
    let missing = || Error::Internal("elementary move left the basis".into());
    let x2 = apply_move(x, k, l).ok_or_else(missing)?;
    let y2 = apply_move(y, l, k).ok_or_else(missing)?;
    let idx = |m: &MultiIndex| basis.index_of(m).ok_or_else(missing);
    let unit = |i: usize| MultiIndex::unit(basis.width(), i);
    let (kind, support, vars, gammas) = if x == y {
        // {z_r z_l z^γ, same} to {z_r² z^γ, z_l² z^γ}
        let g = x.checked_sub(&unit(k).add(&unit(l))).ok_or_else(missing)?;
        (ElementKind::Triple, vec![idx(&x2)?, idx(x)?, idx(&y2)?], (k, l), vec![g])
    } else if x2 == y2 {
        let g = x2.checked_sub(&unit(k).add(&unit(l))).ok_or_else(missing)?;
        (ElementKind::Triple, vec![idx(x)?, idx(&x2)?, idx(y)?], (l, k), vec![g])
    } else {
        let g1 = x.gcd(&x2);
        let g2 = y.gcd(&y2);
        (ElementKind::Quad, vec![idx(&x2)?, idx(x)?, idx(&y2)?, idx(y)?], (k, l), vec![g1, g2])
    };
    let stencil = match kind {
        ElementKind::Triple => triple_stencil(),
        ElementKind::Quad => quad_stencil(),
    };
    Ok(AmbiguityBasisElement { kind, beta: ps.beta.clone(), support, stencil, vars, gammas })
}

/// Basis elements of `{S symmetric : Ψ̃·S·Ψ̃ᵀ = 0}`, `m_β − 1` per `β`, in
/// increasing `β`.
pub fn ambiguity_space_basis(basis: &MonomialBasis) -> Result<Vec<AmbiguityBasisElement>> {
    if !basis.is_homogenized() {
        return Err(Error::Precondition("ambiguity basis needs a homogenized basis".into()));
    }
    let mut out = Vec::new();
    for ps in all_pair_sets(basis) {
        if ps.len() < 2 {
            continue;
        }
        for e in elementary_transform_tree(basis, &ps)? {
            out.push(edge_element(basis, &ps, &e)?);
        }
    }
    Ok(out)
}

/// `Σ s_ij z^(α_i+α_j)` over the homogenized basis.
pub fn homogeneous_form(s: &SymMatrix, basis: &MonomialBasis) -> Poly {
    s.poly_quad_form(&basis.polys())
}

fn slot_of(storage: usize, d: usize) -> usize {
    if storage == d {
        0
    } else {
        storage + 1
    }
}

fn require_box_basis(basis: &MonomialBasis, bounds: &DegreeBounds) -> Result<()> {
    if basis.is_homogenized() {
        return Err(Error::Precondition("expected an affine basis".into()));
    }
    if &basis.bounds != bounds || build_basis(bounds)?.monomials() != basis.monomials() {
        return Err(Error::Precondition("basis is not the full monomial basis of the bounds".into()));
    }
    if bounds.nvars() == 0 {
        return Err(Error::Precondition("no variables".into()));
    }
    Ok(())
}

/// Checks `Ψ·S_d·Ψᵀ = 0` and `S_d·∂^{n_d}Ψᵀ/∂z_d^{n_d} = 0`.
pub fn lift_preconditions_hold(s_d: &SymMatrix, basis: &MonomialBasis) -> bool {
    let d = basis.nvars();
    let nd = basis.bounds.nk[d - 1];
    s_d.size() == basis.len()
        && s_d.poly_quad_form(&basis.polys()).is_zero()
        && s_d.mul_poly_vec(&basis_derivative(basis, d - 1, nd)).iter().all(Poly::is_zero)
}

/// Completes a last coefficient `S_d` to a pencil `S` with `S(z)·Ψ(z)ᵀ = 0`.
pub fn lift_ambiguity(s_d: &SymMatrix, basis: &MonomialBasis, bounds: &DegreeBounds) -> Result<MatrixPencil> {
    require_box_basis(basis, bounds)?;
    let d = bounds.nvars();
    let n = basis.len();
    if s_d.size() != n {
        return Err(Error::DimensionMismatch(format!("S_d is {0}x{0}, basis has {1} entries", s_d.size(), n)));
    }
    if !s_d.poly_quad_form(&basis.polys()).is_zero() {
        return Err(Error::Precondition("Ψ·S_d·Ψᵀ is not zero".into()));
    }
    let nd = bounds.nk[d - 1];
    if !s_d.mul_poly_vec(&basis_derivative(basis, d - 1, nd)).iter().all(Poly::is_zero) {
        return Err(Error::Precondition("S_d does not annihilate the top z_d derivative of Ψ".into()));
    }
    let mut coeffs = vec![SymMatrix::zeros(n); d + 1];
    coeffs[d] = s_d.clone();
    if s_d.is_zero() {
        return MatrixPencil::new(basis.clone(), coeffs);
    }

    let hom = homogenize_basis(basis)?;
    let zd = d - 1;
    let low: Vec<usize> = (0..n).filter(|&i| hom.monomials()[i].0[zd] < nd).collect();
    let mut low_bounds = bounds.clone();
    low_bounds.nk[zd] = nd - 1;
    let psi = MonomialBasis::from_monomials(low_bounds, low.iter().map(|&i| hom.monomials()[i].clone()).collect(), true)?;
    let mut by_beta: BTreeMap<MultiIndex, Vec<AmbiguityBasisElement>> = BTreeMap::new();
    for mut e in ambiguity_space_basis(&psi)? {
        e.support = e.support.iter().map(|&i| low[i]).collect();
        by_beta.entry(e.beta.clone()).or_default().push(e);
    }

    // Split S_d into its β-components.
    let mut parts: BTreeMap<MultiIndex, Vec<(usize, usize, Rational)>> = BTreeMap::new();
    for (i, j, v) in s_d.nonzeros() {
        if i <= j {
            let beta = hom.monomials()[i].add(&hom.monomials()[j]);
            parts.entry(beta).or_default().push((i, j, v.clone()));
        }
    }

    for (beta, entries) in &parts {
        let elems = by_beta.get(beta).map(Vec::as_slice).unwrap_or(&[]);
        let coeffs_e = decompose(entries, elems, n)?;
        let mut residual = SymMatrix::zeros(n);
        for (e, c) in elems.iter().zip(&coeffs_e) {
            if c.is_zero() {
                continue;
            }
            if e.uses_var(zd) {
                residual = residual.add(&e.matrix(n).scale(c));
            } else {
                add_block_solution(&mut coeffs, &hom, e, c, d)?;
            }
        }
        if !residual.is_zero() {
            solve_sigma(&mut coeffs, &hom, &residual, beta, d)?;
        }
    }

    let pencil = MatrixPencil::new(basis.clone(), coeffs)?;
    if !pencil.apply_to_basis().iter().all(Poly::is_zero) {
        return Err(Error::Internal("lifted pencil does not annihilate Ψ".into()));
    }
    Ok(pencil)
}

/// Coefficients of the β-part of `S_d` in the elements of that β.
fn decompose(entries: &[(usize, usize, Rational)], elems: &[AmbiguityBasisElement], n: usize) -> Result<Vec<Rational>> {
    let mut keys: Vec<(usize, usize)> = entries.iter().map(|(i, j, _)| (*i, *j)).collect();
    let mats: Vec<SymMatrix> = elems.iter().map(|e| e.matrix(n)).collect();
    for m in &mats {
        for (i, j, _) in m.nonzeros() {
            if i <= j && !keys.contains(&(i, j)) {
                keys.push((i, j));
            }
        }
    }
    let a: Matrix = keys.iter().map(|&(i, j)| mats.iter().map(|m| m.get(i, j).clone()).collect()).collect();
    let b: Vec<Rational> = keys
        .iter()
        .map(|k| entries.iter().find(|(i, j, _)| (*i, *j) == *k).map_or_else(Rational::zero, |e| e.2.clone()))
        .collect();
    if elems.is_empty() {
        return Err(Error::Internal("nonzero ambiguity component with no basis elements".into()));
    }
    solve(&a, &b).ok_or_else(|| Error::Internal("ambiguity component outside the basis span".into()))
}

/// Closed-form 5×5 (triple) and 6×6 (quad) block solutions, scaled by `c`.
fn add_block_solution(
    coeffs: &mut [SymMatrix],
    hom: &MonomialBasis,
    e: &AmbiguityBasisElement,
    c: &Rational,
    d: usize,
) -> Result<()> {
    let w = hom.width();
    let zd = d - 1;
    let unit = |k: usize| MultiIndex::unit(w, k);
    let idx = |m: MultiIndex| {
        hom.index_of(&m).ok_or_else(|| Error::Internal(format!("block monomial {:?} missing from the basis", m.0)))
    };
    // Block positions may coincide in the basis; an off-diagonal block
    // entry landing on the diagonal counts twice.
    let mut put = |var: usize, i: usize, j: usize, sign: i64| {
        let k = if i == j { 2 * sign } else { sign };
        coeffs[slot_of(var, d)].add_at(i, j, &(c * int(k)));
    };
    match e.kind {
        ElementKind::Triple => {
            let (r, l) = e.vars;
            let g = &e.gammas[0];
            let u = idx(g.add(&unit(zd)).add(&unit(r)))?;
            let v = idx(g.add(&unit(zd)).add(&unit(l)))?;
            let (sc, sa, se) = (e.support[0], e.support[1], e.support[2]);
            put(l, u, sa, -1);
            put(r, u, se, 1);
            put(l, v, sc, 1);
            put(r, v, sa, -1);
        }
        ElementKind::Quad => {
            let (mu, nu) = e.vars;
            let w2 = idx(e.gammas[1].add(&unit(zd)))?;
            let w1 = idx(e.gammas[0].add(&unit(zd)))?;
            let (a, b, cc, dd) = (e.support[0], e.support[1], e.support[2], e.support[3]);
            put(nu, w2, a, -1);
            put(mu, w2, b, 1);
            put(mu, w1, cc, -1);
            put(nu, w1, dd, 1);
        }
    }
    Ok(())
}

/// Solves the coefficient equations of `z^σ`, `σ = β + e_d`, for the lower
/// coefficients given the β-part `t` of `S_d`.
fn solve_sigma(coeffs: &mut [SymMatrix], hom: &MonomialBasis, t: &SymMatrix, beta: &MultiIndex, d: usize) -> Result<()> {
    let w = hom.width();
    let zd = d - 1;
    let mons = hom.monomials();
    let sigma = beta.add(&MultiIndex::unit(w, zd));
    // Unknowns: (storage var k, i ≤ j) with α_i + α_j + e_k = σ.
    let mut unknowns: Vec<(usize, usize, usize)> = Vec::new();
    let mut lookup: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for k in (0..w).filter(|&k| k != zd) {
        let Some(bk) = sigma.checked_sub(&MultiIndex::unit(w, k)) else { continue };
        for (i, j) in pairs_for_beta(hom, &bk).pairs {
            let key = (k, i.min(j), i.max(j));
            lookup.insert(key, unknowns.len());
            unknowns.push(key);
        }
    }
    let mut rows: Matrix = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for (i, ai) in mons.iter().enumerate() {
        let Some(omega) = sigma.checked_sub(ai) else { continue };
        let mut row = vec![Rational::zero(); unknowns.len()];
        let mut known = Rational::zero();
        for k in 0..w {
            let Some(aj) = omega.checked_sub(&MultiIndex::unit(w, k)) else { continue };
            let Some(j) = hom.index_of(&aj) else { continue };
            if k == zd {
                known += t.get(i, j);
            } else if let Some(&u) = lookup.get(&(k, i.min(j), i.max(j))) {
                row[u] += Rational::one();
            }
        }
        if row.iter().any(|x| !x.is_zero()) || !known.is_zero() {
            rows.push(row);
            rhs.push(-known);
        }
    }
    let sol = if unknowns.is_empty() {
        rhs.iter().all(Zero::is_zero).then(Vec::new)
    } else {
        solve(&rows, &rhs)
    };
    let sol = sol.ok_or_else(|| Error::NotLiftable { beta: beta.0.clone() })?;
    for (x, &(k, i, j)) in sol.iter().zip(&unknowns) {
        if !x.is_zero() {
            coeffs[slot_of(k, d)].add_at(i, j, x);
        }
    }
    Ok(())
}

/// Linear functionals `Σ c·S[i][j]` (over `i ≤ j`) that vanish exactly on
/// the last coefficients `S_d` admitting symmetric `S_0, …, S_{d−1}` with
/// `S(z)·Ψ(z)ᵀ = 0`.
pub fn liftability_constraints(basis: &MonomialBasis) -> Result<Vec<Vec<(usize, usize, Rational)>>> {
    if basis.is_homogenized() {
        return Err(Error::Precondition("expected an affine basis".into()));
    }
    let d = basis.nvars();
    if d == 0 {
        return Err(Error::Precondition("no variables".into()));
    }
    let hom = homogenize_basis(basis)?;
    let mons = hom.monomials();
    let (w, zd) = (hom.width(), d - 1);
    let mut sigmas: Vec<MultiIndex> = Vec::new();
    for i in 0..mons.len() {
        for j in i..mons.len() {
            sigmas.push(mons[i].add(&mons[j]).add(&MultiIndex::unit(w, zd)));
        }
    }
    sigmas.sort();
    sigmas.dedup();

    let mut out = Vec::new();
    for sigma in sigmas {
        let mut low: HashMap<(usize, usize, usize), usize> = HashMap::new();
        let mut top: Vec<(usize, usize)> = Vec::new();
        for k in 0..w {
            let Some(bk) = sigma.checked_sub(&MultiIndex::unit(w, k)) else { continue };
            for (i, j) in pairs_for_beta(&hom, &bk).pairs {
                let (i, j) = (i.min(j), i.max(j));
                if k == zd {
                    top.push((i, j));
                } else {
                    let n = low.len();
                    low.insert((k, i, j), n);
                }
            }
        }
        let mut rows_low: Matrix = Vec::new();
        let mut rows_top: Matrix = Vec::new();
        for (i, ai) in mons.iter().enumerate() {
            let Some(omega) = sigma.checked_sub(ai) else { continue };
            let mut rl = vec![Rational::zero(); low.len()];
            let mut rt = vec![Rational::zero(); top.len()];
            for k in 0..w {
                let Some(aj) = omega.checked_sub(&MultiIndex::unit(w, k)) else { continue };
                let Some(j) = hom.index_of(&aj) else { continue };
                let key = (i.min(j), i.max(j));
                if k == zd {
                    rt[top.iter().position(|t| *t == key).unwrap()] += Rational::one();
                } else {
                    rl[low[&(k, key.0, key.1)]] += Rational::one();
                }
            }
            rows_low.push(rl);
            rows_top.push(rt);
        }
        // Left kernel of the lower block.
        let r = rows_low.len();
        let ys: Vec<Vec<Rational>> = if low.is_empty() {
            (0..r).map(|t| (0..r).map(|u| if t == u { Rational::one() } else { Rational::zero() }).collect()).collect()
        } else {
            let lt: Matrix = (0..low.len()).map(|c| rows_low.iter().map(|row| row[c].clone()).collect()).collect();
            nullspace(&lt, r)
        };
        for y in ys {
            let terms: Vec<_> = top
                .iter()
                .enumerate()
                .map(|(c, &(i, j))| (i, j, y.iter().zip(&rows_top).map(|(yr, row)| yr * &row[c]).sum::<Rational>()))
                .filter(|t| !t.2.is_zero())
                .collect();
            if !terms.is_empty() {
                out.push(terms);
            }
        }
    }
    Ok(out)
}

/// Searches for a PSD Gram matrix of the last Wronskian whose difference
/// with `B_d` lifts, so that `psd_repair` is guaranteed to succeed on it.
pub fn repairable_gram(b: &MatrixPencil, q: &Poly, p: &Poly, opts: SosOptions) -> Result<SosOutcome> {
    let d = b.nvars();
    let b_d = &b.coeffs[d];
    let cons: Vec<LinearConstraint> = liftability_constraints(&b.basis)?
        .into_iter()
        .map(|terms| {
            let rhs = terms.iter().map(|(i, j, c)| c * b_d.get(*i, *j)).sum();
            LinearConstraint { terms, rhs }
        })
        .collect();
    sos_feasibility_constrained(&wronskian(q, p, d)?, &b.basis, &cons, opts)
}

/// Replaces the last coefficient of a polarization pencil by the PSD Gram
/// matrix `a_d` of the last Wronskian, correcting the lower coefficients.
pub fn psd_repair(b: &MatrixPencil, q: &Poly, p: &Poly, a_d: &SymMatrix) -> Result<MatrixPencil> {
    if !verify_polarization(q, p, b)? {
        return Err(Error::Precondition("input pencil does not polarize q·p".into()));
    }
    let d = b.nvars();
    if a_d.size() != b.size() {
        return Err(Error::DimensionMismatch(format!("A_d is {0}x{0}, pencil is {1}x{1}", a_d.size(), b.size())));
    }
    let psi = b.basis.polys();
    if a_d.poly_quad_form(&psi) != wronskian(q, p, d)? {
        return Err(Error::Precondition("Ψ·A_d·Ψᵀ differs from the last Wronskian".into()));
    }
    let nd = b.basis.bounds.nk[d - 1];
    if !a_d.mul_poly_vec(&basis_derivative(&b.basis, d - 1, nd)).iter().all(Poly::is_zero) {
        return Err(Error::Precondition("A_d does not annihilate the top z_d derivative of Ψ".into()));
    }
    if !exact_psd_check(a_d).is_psd() {
        return Err(Error::Precondition("A_d is not positive semidefinite".into()));
    }
    if a_d == &b.coeffs[d] {
        return Ok(b.clone());
    }
    let s = lift_ambiguity(&a_d.sub(&b.coeffs[d]), &b.basis, &b.basis.bounds)?;
    let a = b.add(&s);
    if !verify_polarization(q, p, &a)? || a.coeffs[d] != *a_d {
        return Err(Error::Internal("repaired pencil lost the polarization identity".into()));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_basis;
    use crate::polarize::product_pencil;

    fn hom(n0: u32, nk: Vec<u32>) -> MonomialBasis {
        homogenize_basis(&build_basis(&DegreeBounds::new(n0, nk)).unwrap()).unwrap()
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn pairs_and_tree_for_square() {
        // z1²z2² with n0 = 2: the z0 exponent is 0.
        let b = hom(2, vec![2, 2]);
        let ps = pairs_for_beta(&b, &mi(&[2, 2, 0]));
        let mons = b.monomials();
        let named: Vec<_> = ps.pairs.iter().map(|&(i, j)| (mons[i].0.clone(), mons[j].0.clone())).collect();
        assert_eq!(named, vec![(vec![1, 1, 0], vec![1, 1, 0]), (vec![2, 0, 0], vec![0, 2, 0])]);
        let tree = elementary_transform_tree(&b, &ps).unwrap();
        assert_eq!(tree, vec![TreeEdge { from: 0, to: 1, mv: Move { plus: 0, minus: 1 } }]);
        let e = edge_element(&b, &ps, &tree[0]).unwrap();
        assert_eq!(e.kind, ElementKind::Triple);
        let sup: Vec<_> = e.support.iter().map(|&i| mons[i].0.clone()).collect();
        assert_eq!(sup, vec![vec![2, 0, 0], vec![1, 1, 0], vec![0, 2, 0]]);
        assert_eq!(e.stencil, triple_stencil());
    }

    #[test]
    fn four_variable_product() {
        let b = homogenize_basis(&build_basis(&DegreeBounds::new(2, vec![1, 1, 1, 1])).unwrap()).unwrap();
        let ps = pairs_for_beta(&b, &mi(&[1, 1, 1, 1, 0]));
        assert_eq!(ps.len(), 3);
        assert_eq!(elementary_transform_tree(&b, &ps).unwrap().len(), 2);
        let elems: Vec<_> =
            ambiguity_space_basis(&b).unwrap().into_iter().filter(|e| e.beta == ps.beta).collect();
        assert_eq!(elems.len(), 2);
        assert!(elems.iter().all(|e| e.kind == ElementKind::Quad));
    }

    #[test]
    fn counts_match_nullspace() {
        for (n0, nk) in [(2, vec![2, 2]), (3, vec![2, 1]), (2, vec![1, 1, 1]), (3, vec![3])] {
            let b = hom(n0, nk);
            let elems = ambiguity_space_basis(&b).unwrap();
            for ps in all_pair_sets(&b) {
                // Pair weights must sum to zero: one equation, m unknowns.
                let m = ps.len();
                let dim = nullspace(&vec![vec![int(1); m]], m).len();
                assert_eq!(elems.iter().filter(|e| e.beta == ps.beta).count(), dim);
            }
            for e in &elems {
                assert!(homogeneous_form(&e.matrix(b.len()), &b).is_zero());
            }
        }
    }

    #[test]
    fn zero_lift() {
        let b = build_basis(&DegreeBounds::new(2, vec![2, 2])).unwrap();
        let s = lift_ambiguity(&SymMatrix::zeros(b.len()), &b, &b.bounds.clone()).unwrap();
        assert!(s.coeffs.iter().all(SymMatrix::is_zero));
    }

    #[test]
    fn triple_lift_uses_block() {
        // d = 2, n0 = 2, n2 = 2: the triple on (z1², z1·z0, z0²) avoids z2.
        let b = build_basis(&DegreeBounds::new(2, vec![2, 2])).unwrap();
        let h = homogenize_basis(&b).unwrap();
        let e = ambiguity_space_basis(&h)
            .unwrap()
            .into_iter()
            .find(|e| e.kind == ElementKind::Triple && !e.uses_var(1))
            .unwrap();
        let s_d = e.matrix(b.len());
        let s = lift_ambiguity(&s_d, &b, &b.bounds.clone()).unwrap();
        assert_eq!(s.coeffs[2], s_d);
        assert!(s.apply_to_basis().iter().all(Poly::is_zero));
    }

    #[test]
    fn last_variable_in_stencil_can_fail() {
        // Ψ = (1, z, z², z³); S_1 = triple stencil on (1, z, z²).
        let b = build_basis(&DegreeBounds::new(3, vec![3])).unwrap();
        let mut s = SymMatrix::zeros(4);
        s.add_embedded(&triple_stencil(), &[2, 1, 0]);
        assert!(lift_preconditions_hold(&s, &b));
        assert!(matches!(lift_ambiguity(&s, &b, &b.bounds.clone()), Err(Error::NotLiftable { .. })));
    }

    #[test]
    fn liftability_constraints_decide_the_lift() {
        let mut seen = [0usize; 2];
        for (n0, nk) in [(3, vec![3]), (2, vec![2, 2]), (2, vec![1, 2]), (3, vec![2, 1]), (2, vec![1, 1, 2])] {
            let b = build_basis(&DegreeBounds::new(n0, nk)).unwrap();
            let hom = homogenize_basis(&b).unwrap();
            let cons = liftability_constraints(&b).unwrap();
            for e in ambiguity_space_basis(&hom).unwrap() {
                let s = e.matrix(b.len());
                if !lift_preconditions_hold(&s, &b) {
                    continue;
                }
                let passes = cons.iter().all(|t| t.iter().map(|(i, j, c)| c * s.get(*i, *j)).sum::<Rational>().is_zero());
                let lifted = lift_ambiguity(&s, &b, &b.bounds.clone());
                assert_eq!(passes, lifted.is_ok(), "{e:?}");
                seen[passes as usize] += 1;
            }
        }
        assert!(seen[0] > 0 && seen[1] > 0);
    }

    #[test]
    fn precondition_violation() {
        let b = build_basis(&DegreeBounds::new(1, vec![1])).unwrap();
        assert!(matches!(
            lift_ambiguity(&SymMatrix::identity(2), &b, &b.bounds.clone()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn repair_examples() {
        let q = Poly::parse("z1").unwrap();
        let p = Poly::parse("-1").unwrap();
        let b = product_pencil(&q, &p).unwrap();
        let mut a1 = SymMatrix::zeros(2);
        a1.set(0, 0, int(1));
        let a = psd_repair(&b, &q, &p, &a1).unwrap();
        assert_eq!(a.coeffs[1], a1);
        assert!(verify_polarization(&q, &p, &a).unwrap());

        let (p, q) = crate::parse::parse_pair("z1*z2", "z1 + z2").unwrap();
        let b = product_pencil(&q, &p).unwrap();
        let mut a2 = SymMatrix::zeros(b.size());
        let i = b.basis.index_of(&mi(&[1, 0])).unwrap();
        a2.set(i, i, int(1));
        let a = psd_repair(&b, &q, &p, &a2).unwrap();
        assert_eq!(a.coeffs[2], a2);
        assert!(verify_polarization(&q, &p, &a).unwrap());
    }
}
