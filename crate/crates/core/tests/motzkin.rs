//! Independent check of the Motzkin obstruction: the half Newton polytope
//! leaves a single way to produce z1²z2², through a diagonal entry.

use sospencil::basis::{build_basis, DegreeBounds};
use sospencil::poly::Poly;
use sospencil::rational::Rational;
use sospencil::sos::{sos_feasibility, SosOutcome};

const MOTZKIN: &str = "z1^4*z2^2 + z1^2*z2^4 - 3*z1^2*z2^2 + 1";

/// Exact membership of `(x, y)` in the triangle with vertices `(0,0), (4,2), (2,4)`.
fn in_newton_polytope(x: i64, y: i64) -> bool {
    // Edges: y ≤ 2x, x ≤ 2y, x + y ≤ 6.
    y <= 2 * x && x <= 2 * y && x + y <= 6
}

#[test]
fn half_newton_polytope_forces_negative_diagonal() {
    let m = Poly::parse(MOTZKIN).unwrap();
    let basis = build_basis(&DegreeBounds::half_of(&m)).unwrap();
    let usable: Vec<(i64, i64)> = basis
        .monomials()
        .iter()
        .map(|a| (a.0[0] as i64, a.0[1] as i64))
        .filter(|&(x, y)| in_newton_polytope(2 * x, 2 * y))
        .collect();
    assert_eq!(usable, vec![(0, 0), (1, 1), (2, 1), (1, 2)]);
    let ways: Vec<_> = usable
        .iter()
        .flat_map(|a| usable.iter().map(move |b| (*a, *b)))
        .filter(|(a, b)| a.0 + b.0 == 2 && a.1 + b.1 == 2)
        .collect();
    assert_eq!(ways, vec![((1, 1), (1, 1))]);
    assert_eq!(m.coeff(&sospencil::poly::MultiIndex(vec![2, 2])), Rational::from_integer((-3).into()));

    match sos_feasibility(&m, &basis, 1e-9).unwrap() {
        SosOutcome::Infeasible(ev) => assert!(ev.rigorous, "{}", ev.reason),
        o => panic!("Motzkin: {}", o.status()),
    }
}

#[test]
fn shifted_motzkin_is_not_certified() {
    // M + 1/4 is still not SOS; the obstruction does not depend on the constant.
    let m = Poly::parse("z1^4*z2^2 + z1^2*z2^4 - 3*z1^2*z2^2 + 5/4").unwrap();
    let basis = build_basis(&DegreeBounds::half_of(&m)).unwrap();
    assert!(!matches!(sos_feasibility(&m, &basis, 1e-9).unwrap(), SosOutcome::Certified(_)));
}
