//! Ambiguity space of a homogenized basis and the lift of one element.

use sospencil::ambiguity::{ambiguity_space_basis, lift_ambiguity, lift_preconditions_hold};
use sospencil::basis::{build_basis, homogenize_basis, DegreeBounds};
use sospencil::poly::Poly;

fn main() -> sospencil::Result<()> {
    let bounds = DegreeBounds::new(2, vec![2, 2]);
    let b = build_basis(&bounds)?;
    let h = homogenize_basis(&b)?;
    let elems = ambiguity_space_basis(&h)?;
    for e in &elems {
        let sup: Vec<_> = e.support.iter().map(|&i| &h.monomials()[i].0).collect();
        println!("{:?} beta={:?} support={:?}", e.kind, e.beta.0, sup);
    }

    let liftable = elems.iter().map(|e| e.matrix(b.len())).find(|s| lift_preconditions_hold(s, &b));
    if let Some(s_d) = liftable {
        let pencil = lift_ambiguity(&s_d, &b, &bounds)?;
        println!("lifted; S(z)Ψ(z)ᵀ = 0: {}", pencil.apply_to_basis().iter().all(Poly::is_zero));
    }
    Ok(())
}
