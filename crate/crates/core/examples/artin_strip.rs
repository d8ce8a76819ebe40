//! Strips z1·(z1² + z2²) down to a minimal denominator for the Motzkin polynomial.

use sospencil::artin::{minimal_denominator_strip, FactoredPoly, SosCertifier, StripOptions};
use sospencil::poly::Poly;

fn main() -> sospencil::Result<()> {
    let m = Poly::parse("z1^4*z2^2 + z1^2*z2^4 - 3*z1^2*z2^2 + 1")?;
    let s = FactoredPoly::new(vec![(Poly::parse_with_nvars("z1", 2)?, 1), (Poly::parse("z1^2 + z2^2")?, 1)])?;
    let rep = minimal_denominator_strip(&m, &s, &SosCertifier::default(), StripOptions::default())?;
    for p in &rep.indefinite {
        println!("dropped (changes sign): {p}");
    }
    for t in &rep.trials {
        println!("trial without {}: {}", t.factor, t.status);
    }
    for (p, e) in &rep.result.factors {
        println!("kept: ({p})^{e}");
    }
    println!("certificate: {} weighted squares", rep.certificate.factors.len());
    Ok(())
}
