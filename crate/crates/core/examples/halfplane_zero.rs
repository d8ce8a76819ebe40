//! A zero of z1² + z2² with both imaginary parts positive.

use sospencil::artin::{upper_halfplane_zero, ZeroSearchOptions};
use sospencil::poly::Poly;

fn main() -> sospencil::Result<()> {
    let s = Poly::parse("z1^2 + z2^2")?;
    match upper_halfplane_zero(&s, 0, ZeroSearchOptions::default())? {
        Some(z) => println!("z = {:?}, |s(z)| = {:.2e}", z.point, z.residual),
        None => println!("no zero found"),
    }
    Ok(())
}
