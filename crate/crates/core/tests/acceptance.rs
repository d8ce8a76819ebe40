//! Acceptance harness: one line per criterion. Runs as a plain binary so the
//! report is always printed.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::Zero;
use rand::Rng;
use sospencil::ambiguity::{
    ambiguity_space_basis, lift_ambiguity, lift_preconditions_hold, liftability_constraints, psd_repair,
    repairable_gram,
};
use sospencil::artin::{
    minimal_denominator_strip, upper_halfplane_zero, FactoredPoly, SosCertifier, StripOptions, ZeroSearchOptions,
};
use sospencil::basis::{build_basis, homogenize_basis, DegreeBounds, MonomialBasis};
use sospencil::matrix::{nullspace, rank, Matrix, SymMatrix};
use sospencil::polarize::{chain_pencil, product_pencil, verify_polarization};
use sospencil::poly::{EvalPoint, MultiIndex, Poly, RationalFunction};
use sospencil::rational::{frac, int, Rational};
use sospencil::resolvent::{eval_resolvent, long_resolvent};
use sospencil::sampling;
use sospencil::sos::{
    exact_psd_check, main_theorem_pipeline, nevanlinna_sample_check, sos_feasibility, sum_of_squares, SosOptions,
    SosOutcome,
};
use sospencil::Error;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn poly(s: &str, nvars: usize) -> Poly {
    Poly::parse_with_nvars(s, nvars).unwrap()
}

fn catalog() -> Vec<(&'static str, Poly, Poly)> {
    // (name, q, p) with f = p/q
    vec![
        ("z", poly("1", 1), poly("z1", 1)),
        ("-1/z", poly("z1", 1), poly("-1", 1)),
        ("z1z2/(z1+z2)", poly("z1 + z2", 2), poly("z1*z2", 2)),
        ("(z1+z2)/2", poly("1", 2), poly("1/2*z1 + 1/2*z2", 2)),
    ]
}

fn motzkin() -> Poly {
    poly("z1^4*z2^2 + z1^2*z2^4 - 3*z1^2*z2^2 + 1", 2)
}

fn wronskian_oracle(q: &Poly, p: &Poly, k: usize) -> Poly {
    &(q * &p.derivative(k - 1)) - &(p * &q.derivative(k - 1))
}

fn criterion_1() -> Check {
    let pairs = common::random_pairs(1, 50);
    for (n, (q, p)) in pairs.iter().enumerate() {
        let b = product_pencil(q, p).map_err(|e| format!("pair {n}: {e}"))?;
        ensure!(verify_polarization(q, p, &b).unwrap(), "pair {n}: verify_polarization failed");
        ensure!(common::bilinear_expansion(&b) == common::split_product(q, p), "pair {n}: bilinear expansion differs");
    }
    Ok(format!("{} pairs", pairs.len()))
}

fn criterion_2() -> Check {
    for k in 0..=5 {
        let c = chain_pencil(k);
        let n = 2 * k + 1;
        let rows = c.rows();
        let nu = MultiIndex((0..n).map(|s| u32::from(s % 2 == 0)).collect());
        ensure!(rows[0] == Poly::monomial(nu, int(1)), "k={k}: first row is {}", rows[0]);
        ensure!(rows[1..].iter().all(Poly::is_zero), "k={k}: lower rows do not vanish");
    }
    let c = chain_pencil(1);
    let mut want = vec![SymMatrix::zeros(3); 3];
    want[0].set(0, 1, frac(1, 2));
    want[1].set(1, 2, frac(-1, 2));
    want[2].set(0, 2, frac(1, 2));
    ensure!(c.matrices == want, "k=1 entries differ: {:?}", c.matrices);
    Ok("k = 0..5".into())
}

fn criterion_3() -> Check {
    let mut checks = 0;
    for (n, (q, p)) in common::random_pairs(1, 50).iter().enumerate() {
        let b = product_pencil(q, p).unwrap();
        let psi = b.basis.polys();
        for k in 1..=q.nvars() {
            ensure!(
                b.coeffs[k].poly_quad_form(&psi) == wronskian_oracle(q, p, k),
                "pair {n}, k={k}: Ψ·B_k·Ψᵀ differs from W_k"
            );
            checks += 1;
        }
    }
    Ok(format!("{checks} identities"))
}

fn criterion_4() -> Check {
    let mut checks = 0;
    for (n, (q, p)) in common::random_pairs(1, 50).iter().enumerate() {
        let b = product_pencil(q, p).unwrap();
        for k in 1..=q.nvars() {
            let nk = b.basis.bounds.nk[k - 1];
            let dpsi: Vec<Poly> = b.basis.polys().iter().map(|m| m.nth_derivative(k - 1, nk)).collect();
            ensure!(b.coeffs[k].mul_poly_vec(&dpsi).iter().all(Poly::is_zero), "pair {n}, k={k}: not annihilated");
            checks += 1;
        }
    }
    Ok(format!("{checks} identities"))
}

fn criterion_5() -> Check {
    let mut fs: Vec<(Poly, Poly)> = common::random_pairs(5, 48);
    fs.push((poly("z1 + z2", 2), poly("z1*z2", 2)));
    fs.push((poly("z1", 1), poly("1", 1)));
    let mut rng = sampling::rng(55);
    let mut points = 0;
    for (n, (q, p)) in fs.iter().enumerate() {
        let f = RationalFunction::new(p.clone(), q.clone()).unwrap();
        let rep = long_resolvent(&f).map_err(|e| format!("f{n}: {e}"))?;
        let mut ok = 0;
        let mut tries = 0;
        while ok < 20 {
            tries += 1;
            ensure!(tries < 1000, "f{n}: could not find 20 regular points");
            let z = sampling::real_point(&mut rng, f.nvars(), 10);
            let qz = q.eval_rational(&z);
            if qz.is_zero() {
                continue;
            }
            let expect = p.eval_rational(&z) / qz;
            match eval_resolvent(&rep, &EvalPoint::real(&z)) {
                Ok(v) => {
                    ensure!(v.im.is_zero() && v.re == expect, "f{n}: resolvent differs at {z:?}");
                    ok += 1;
                }
                Err(Error::SingularBlock) => continue,
                Err(e) => return Err(format!("f{n}: {e}")),
            }
        }
        points += ok;
    }
    Ok(format!("{} functions, {points} points", fs.len()))
}

/// Per-β nullity of `S ↦ Σ s_ij z^(α_i+α_j)` over the unknowns `s_ij`, `i ≤ j`.
fn brute_force_nullities(h: &MonomialBasis) -> BTreeMap<MultiIndex, usize> {
    let mons = h.monomials();
    let mut groups: BTreeMap<MultiIndex, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..mons.len() {
        for j in i..mons.len() {
            groups.entry(mons[i].add(&mons[j])).or_default().push((i, j));
        }
    }
    let mut out = BTreeMap::new();
    for (beta, unknowns) in groups {
        // The coefficient of z^β; all other coefficients force s_ij = 0
        // outside this group.
        let row: Vec<Rational> = unknowns.iter().map(|&(i, j)| if i == j { int(1) } else { int(2) }).collect();
        out.insert(beta, nullspace(&vec![row], unknowns.len()).len());
    }
    out
}

fn upper_vector(s: &SymMatrix) -> Vec<Rational> {
    let n = s.size();
    let mut v = Vec::new();
    for i in 0..n {
        for j in i..n {
            v.push(s.get(i, j).clone());
        }
    }
    v
}

fn random_bounds(rng: &mut impl Rng) -> DegreeBounds {
    let d = rng.gen_range(1..=3);
    let n0 = rng.gen_range(1..=3);
    DegreeBounds::new(n0, (0..d).map(|_| rng.gen_range(1..=n0)).collect())
}

fn criterion_6() -> Check {
    let mut rng = sampling::rng(6);
    let mut total = 0;
    for t in 0..20 {
        let bounds = random_bounds(&mut rng);
        let h = homogenize_basis(&build_basis(&bounds).unwrap()).unwrap();
        let n = h.len();
        let elems = ambiguity_space_basis(&h).map_err(|e| format!("basis {t}: {e}"))?;
        let psi = h.polys();
        let mut by_beta: BTreeMap<MultiIndex, Vec<Vec<Rational>>> = BTreeMap::new();
        for e in &elems {
            let s = e.matrix(n);
            ensure!(s.poly_quad_form(&psi).is_zero(), "basis {t}: element {:?} is not in the ambiguity space", e.beta.0);
            by_beta.entry(e.beta.clone()).or_default().push(upper_vector(&s));
        }
        for (beta, dim) in brute_force_nullities(&h) {
            let vecs = by_beta.remove(&beta).unwrap_or_default();
            ensure!(vecs.len() == dim, "basis {t} {:?}: β={:?} has {} elements, nullity {dim}", bounds, beta.0, vecs.len());
            let m: Matrix = vecs;
            ensure!(rank(&m) == dim, "basis {t}: elements of β={:?} are dependent", beta.0);
        }
        ensure!(by_beta.is_empty(), "basis {t}: elements for a β outside the pair products");
        total += elems.len();
    }
    Ok(format!("20 bases, {total} elements"))
}

/// `(row monomial, column monomial, entry)` in the affine variables; only
/// the upper triangle in listed order, mirrored on embedding.
type Fixture = (DegreeBounds, Vec<(&'static str, &'static str, &'static str)>);

/// Triple on `(z1², z1z2, z2²)` with `z_d = z3`.
fn triple_fixture() -> Fixture {
    (
        DegreeBounds::new(2, vec![2, 2, 1]),
        vec![
            ("z3*z1", "z1*z2", "-z2"),
            ("z3*z1", "z2^2", "z1"),
            ("z3*z2", "z1^2", "z2"),
            ("z3*z2", "z1*z2", "-z1"),
            ("z1^2", "z2^2", "-z3"),
            ("z1*z2", "z1*z2", "2*z3"),
        ],
    )
}

/// Quad on `(z1, z2, z2·z1, z1·z1)`: μ = z1, ν = z2, γ1 = 1, γ2 = z1.
fn quad_fixture() -> Fixture {
    (
        DegreeBounds::new(2, vec![2, 1, 1]),
        vec![
            ("z3*z1", "z1", "-z2"),
            ("z3*z1", "z2", "z1"),
            ("z3", "z1*z2", "-z1"),
            ("z3", "z1^2", "z2"),
            ("z1", "z1*z2", "z3"),
            ("z2", "z1^2", "-z3"),
        ],
    )
}

fn check_fixture(name: &str, (bounds, entries): Fixture) -> Result<(), String> {
    let b = build_basis(&bounds).unwrap();
    let d = bounds.nvars();
    let idx = |s: &str| {
        let m = poly(s, d);
        b.index_of(m.leading().unwrap().0).unwrap()
    };
    let n = b.len();
    let mut want = vec![vec![Poly::zero(d); n]; n];
    for (r, c, v) in &entries {
        let (i, j) = (idx(r), idx(c));
        want[i][j] = poly(v, d);
        want[j][i] = poly(v, d);
    }
    // Last coefficient of the fixture block.
    let mut s_d = SymMatrix::zeros(n);
    for (i, row) in want.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            s_d.set(i, j, e.coeff(&MultiIndex::unit(d, d - 1)));
        }
    }
    let h = homogenize_basis(&b).unwrap();
    let elems = ambiguity_space_basis(&h).unwrap();
    ensure!(
        elems.iter().any(|e| e.matrix(n) == s_d || e.matrix(n) == s_d.scale(&int(-1))),
        "{name}: fixture S_d is not an ambiguity basis element"
    );
    ensure!(lift_preconditions_hold(&s_d, &b), "{name}: preconditions fail");
    let lifted = lift_ambiguity(&s_d, &b, &bounds).map_err(|e| format!("{name}: {e}"))?;
    ensure!(lifted.poly_matrix() == want, "{name}: lifted pencil differs from the fixture block");
    ensure!(lifted.apply_to_basis().iter().all(Poly::is_zero), "{name}: does not annihilate Ψ");
    Ok(())
}

fn criterion_7() -> Check {
    check_fixture("5x5 block", triple_fixture())?;
    check_fixture("6x6 block", quad_fixture())?;
    let (mut eligible, mut lifted, mut failed) = (0, 0, 0);
    for d in 1..=3usize {
        for n0 in 1..=3u32 {
            for mask in 0..(1u32 << d) {
                let nk: Vec<u32> = (0..d).map(|k| if mask >> k & 1 == 1 { n0 } else { n0.div_ceil(2) }).collect();
                let b = build_basis(&DegreeBounds::new(n0, nk)).unwrap();
                let h = homogenize_basis(&b).unwrap();
                let cons = liftability_constraints(&b).unwrap();
                for e in ambiguity_space_basis(&h).unwrap() {
                    let s = e.matrix(b.len());
                    if !lift_preconditions_hold(&s, &b) {
                        continue;
                    }
                    eligible += 1;
                    let uses_zd = e.vars.0 == d - 1 || e.vars.1 == d - 1;
                    match lift_ambiguity(&s, &b, &b.bounds.clone()) {
                        Ok(pen) => {
                            ensure!(pen.coeffs[d] == s, "lift changed S_d");
                            ensure!(pen.apply_to_basis().iter().all(Poly::is_zero), "lift does not annihilate Ψ");
                            lifted += 1;
                        }
                        Err(Error::NotLiftable { .. }) => {
                            // Only the documented gap is tolerated: z_d is a
                            // stencil variable and the exact constraints agree.
                            ensure!(uses_zd, "element without z_d failed to lift: {e:?}");
                            let violated = cons
                                .iter()
                                .any(|t| !t.iter().map(|(i, j, c)| c * s.get(*i, *j)).sum::<Rational>().is_zero());
                            ensure!(violated, "lift failed but the liftability constraints pass: {e:?}");
                            failed += 1;
                        }
                        Err(x) => return Err(format!("{x}")),
                    }
                }
            }
        }
    }
    let msg = format!(
        "fixtures reproduced; {lifted}/{eligible} eligible elements lift, {failed} are not liftable (z_d in the stencil)"
    );
    if failed == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_8() -> Check {
    for (name, q, p) in catalog() {
        let b = product_pencil(&q, &p).unwrap();
        let d = q.nvars();
        let cert = match repairable_gram(&b, &q, &p, SosOptions::default()).map_err(|e| format!("{name}: {e}"))? {
            SosOutcome::Certified(c) => c,
            o => return Err(format!("{name}: no liftable PSD Gram matrix ({})", o.status())),
        };
        let a = psd_repair(&b, &q, &p, &cert.gram).map_err(|e| format!("{name}: {e}"))?;
        ensure!(verify_polarization(&q, &p, &a).unwrap(), "{name}: repaired pencil fails polarization");
        ensure!(common::bilinear_expansion(&a) == common::split_product(&q, &p), "{name}: bilinear expansion differs");
        ensure!(exact_psd_check(&a.coeffs[d]).is_psd(), "{name}: last coefficient not PSD");
    }
    Ok("4 catalog functions".into())
}

fn criterion_9() -> Check {
    let mut n = 0;
    for (name, q, p) in catalog() {
        let f = RationalFunction::new(p.clone(), q.clone()).unwrap();
        let report = main_theorem_pipeline(&f).map_err(|e| format!("{name}: {e}"))?;
        for v in &report.variables {
            let c = v.outcome.certificate().ok_or_else(|| format!("{name}: W_{} {}", v.variable, v.outcome.status()))?;
            c.verify().map_err(|e| format!("{name}: {e}"))?;
            let w = wronskian_oracle(&q, &p, v.variable);
            ensure!(c.target == w, "{name}: certificate target is not W_{}", v.variable);
            ensure!(sum_of_squares(&c.factors, q.nvars()) == w, "{name}: factors do not re-expand to W_{}", v.variable);
            ensure!(c.factors.iter().all(|s| s.weight > Rational::zero()), "{name}: bad weight");
            n += 1;
        }
    }
    Ok(format!("{n} certificates"))
}

fn criterion_10() -> Check {
    let m = motzkin();
    let o = sos_feasibility(&m, &build_basis(&DegreeBounds::half_of(&m)).unwrap(), 1e-9).unwrap();
    ensure!(!matches!(o, SosOutcome::Certified(_)), "Motzkin was certified");
    let s = poly("z1^2 + z2^2", 2);
    let f = &(&s * &s) * &m;
    let o2 = sos_feasibility(&f, &build_basis(&DegreeBounds::half_of(&f)).unwrap(), 1e-9).unwrap();
    let c = o2.certificate().ok_or_else(|| format!("(z1²+z2²)²·Motzkin: {}", o2.status()))?;
    c.verify().map_err(|e| e.to_string())?;
    ensure!(c.target == f && sum_of_squares(&c.factors, 2) == f, "certificate does not expand to the product");
    Ok(format!("Motzkin {}, product certified with {} squares", o.status(), c.factors.len()))
}

fn criterion_11() -> Check {
    let m = motzkin();
    let (z1, r) = (poly("z1", 2), poly("z1^2 + z2^2", 2));
    let s = FactoredPoly::new(vec![(z1.clone(), 1), (r.clone(), 1)]).unwrap();
    let oracle = SosCertifier::default();
    let rep = minimal_denominator_strip(&m, &s, &oracle, StripOptions::default()).map_err(|e| e.to_string())?;
    ensure!(rep.indefinite == vec![z1], "indefinite factors: {:?}", rep.indefinite);
    ensure!(rep.result.factors == vec![(r.clone(), 1)], "result: {:?}", rep.result.factors);
    ensure!(rep.certificate.target == &(&r * &r) * &m, "certificate target");
    rep.certificate.verify().map_err(|e| e.to_string())?;
    // Removing the only remaining factor leaves Motzkin alone.
    let bare = sos_feasibility(&m, &build_basis(&DegreeBounds::half_of(&m)).unwrap(), 1e-9).unwrap();
    ensure!(!matches!(bare, SosOutcome::Certified(_)), "Motzkin alone was certified");
    ensure!(!rep.inconclusive_trials, "a final-round trial was inconclusive");
    Ok("kept z1^2 + z2^2, dropped z1".into())
}

fn criterion_12() -> Check {
    let s = poly("z1^2 + z2^2", 2);
    let z = upper_halfplane_zero(&s, 0, ZeroSearchOptions::default())
        .map_err(|e| e.to_string())?
        .ok_or("no zero found within the budget")?;
    ensure!(z.point.iter().all(|c| c.im > 0.0), "imaginary parts {:?}", z.point);
    let r = s.eval_c64(&z.point).norm();
    ensure!(r < 1e-8, "residual {r}");
    Ok(format!("|s| = {r:.1e}"))
}

fn criterion_13() -> Check {
    let f = RationalFunction::new(poly("-z1", 1), poly("1", 1)).unwrap();
    ensure!(!nevanlinna_sample_check(&f, 1000, 0).unwrap().passed(), "-z passed the gate");
    for (name, q, p) in catalog() {
        let f = RationalFunction::new(p, q).unwrap();
        ensure!(nevanlinna_sample_check(&f, 1000, 0).unwrap().passed(), "{name} flagged");
    }
    Ok("-z rejected, catalog clean over 1000 samples".into())
}

fn main() {
    let criteria: Vec<(usize, fn() -> Check)> = vec![
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
        (13, criterion_13),
    ];
    // Criterion 7 fails by design for elements whose stencil uses z_d; the
    // harness still insists that every other element lifts.
    let expected_fail = [7];
    let mut unexpected = Vec::new();
    for (n, run) in criteria {
        let t = Instant::now();
        let res = run();
        let secs = t.elapsed().as_secs_f64();
        match &res {
            Ok(msg) => println!("criterion {n}: PASS ({msg}) [{secs:.1}s]"),
            Err(msg) => println!("criterion {n}: FAIL ({msg}) [{secs:.1}s]"),
        }
        let fixtures_ok = !matches!(&res, Err(m) if !m.starts_with("fixtures reproduced"));
        if res.is_err() && !(expected_fail.contains(&n) && fixtures_ok) {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
