//! Product pencil of a pair and the chain pencil it is built from.

use sospencil::polarize::{chain_pencil, product_pencil, verify_polarization};
use sospencil::poly::Poly;

fn main() -> sospencil::Result<()> {
    let q = Poly::parse("z1 + z2")?;
    let p = Poly::parse("z1*z2")?;
    let b = product_pencil(&q, &p)?;
    println!("basis: {:?}", b.basis.monomials().iter().map(|m| &m.0).collect::<Vec<_>>());
    for (k, m) in b.coeffs.iter().enumerate() {
        println!("B_{k}:");
        for row in m.rows() {
            println!("  {}", row.iter().map(ToString::to_string).collect::<Vec<_>>().join("\t"));
        }
    }
    println!("q(ζ)p(z) = Ψ(ζ)B(z)Ψ(z)ᵀ: {}", verify_polarization(&q, &p, &b)?);

    let c = chain_pencil(2);
    println!("chain k=2 rows: {:?}", c.rows().iter().map(ToString::to_string).collect::<Vec<_>>());
    Ok(())
}
