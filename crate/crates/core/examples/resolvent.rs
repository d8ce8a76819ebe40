//! Long-resolvent realization of z1·z2/(z1 + z2), evaluated exactly.

use sospencil::poly::{EvalPoint, RationalFunction};
use sospencil::rational::{frac, ExactComplex};
use sospencil::resolvent::{eval_resolvent, long_resolvent};

fn main() -> sospencil::Result<()> {
    let f = RationalFunction::parse("z1*z2", "z1 + z2")?;
    let rep = long_resolvent(&f)?;
    println!("retained block {:?} of a {}x{} pencil", rep.block_indices, rep.pencil.size(), rep.pencil.size());

    let z = EvalPoint::new(vec![ExactComplex::new(frac(1, 2), frac(1, 1)), ExactComplex::new(frac(-3, 1), frac(2, 1))]);
    let via_pencil = eval_resolvent(&rep, &z)?;
    let direct = f.evaluate(&z)?.expect("not a pole");
    println!("A11 - A12 A22^-1 A21 = {via_pencil}");
    println!("p/q                  = {direct}");
    assert_eq!(via_pencil, direct);
    Ok(())
}
