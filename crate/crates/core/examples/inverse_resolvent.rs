//! f = [π A(z)⁻¹ πᵀ]⁻¹ with a PSD last coefficient, for f = −1/z and s = z² + 1.

use sospencil::ambiguity::repairable_gram;
use sospencil::polarize::product_pencil;
use sospencil::poly::{EvalPoint, Poly, RationalFunction};
use sospencil::rational::{frac, ExactComplex};
use sospencil::resolvent::{inverse_corner, inverse_resolvent_form};
use sospencil::sos::{SosOptions, SosOutcome};

fn main() -> sospencil::Result<()> {
    let f = RationalFunction::parse("-1", "z1")?;
    let s = Poly::parse("z1^2 + 1")?;
    let (q, p) = (f.den.clone(), f.num.clone());
    let (qs, ps) = (&q * &s, &p * &s);
    // The plain analytic-center certificate may not lift; search a liftable one.
    let b = product_pencil(&qs, &ps)?;
    let SosOutcome::Certified(cert) = repairable_gram(&b, &qs, &ps, SosOptions::default())? else {
        println!("no liftable certificate");
        return Ok(());
    };
    let a = inverse_resolvent_form(&f, &s, &cert)?;
    println!("{}x{} pencil", a.size(), a.size());
    let z = EvalPoint::new(vec![ExactComplex::new(frac(1, 3), frac(2, 1))]);
    let corner = inverse_corner(&a, &z).expect("A(z) invertible");
    let value = f.evaluate(&z)?.expect("not a pole");
    println!("1/(π A⁻¹ πᵀ) = {}", ExactComplex::one().checked_div(&corner).unwrap());
    println!("f(z)         = {value}");
    Ok(())
}
