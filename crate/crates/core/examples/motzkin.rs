//! PSD but not SOS: the Motzkin polynomial, and a multiplier that fixes it.

use sospencil::basis::{build_basis, DegreeBounds};
use sospencil::poly::Poly;
use sospencil::sos::{psd_sampling_test, sos_feasibility, SosOutcome};

fn main() -> sospencil::Result<()> {
    let m = Poly::parse("z1^4*z2^2 + z1^2*z2^4 - 3*z1^2*z2^2 + 1")?;
    println!("sampling: {:?}", psd_sampling_test(&m, 1000, 0));
    match sos_feasibility(&m, &build_basis(&DegreeBounds::half_of(&m))?, 1e-9)? {
        SosOutcome::Infeasible(ev) => println!("Motzkin: {} (rigorous: {})", ev.reason, ev.rigorous),
        other => println!("Motzkin: {}", other.status()),
    }

    let s = Poly::parse("z1^2 + z2^2")?;
    let f = &(&s * &s) * &m;
    let out = sos_feasibility(&f, &build_basis(&DegreeBounds::half_of(&f))?, 1e-9)?;
    if let Some(c) = out.certificate() {
        c.verify()?;
        println!("(z1^2 + z2^2)^2 * Motzkin = sum of {} weighted squares", c.factors.len());
    }
    Ok(())
}
