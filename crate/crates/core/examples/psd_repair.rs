//! Replaces the last coefficient of a product pencil by a PSD Gram matrix.

use sospencil::ambiguity::{psd_repair, repairable_gram};
use sospencil::polarize::{product_pencil, verify_polarization};
use sospencil::poly::Poly;
use sospencil::sos::{exact_psd_check, SosOptions, SosOutcome};

fn main() -> sospencil::Result<()> {
    let q = Poly::parse("z1 + z2")?;
    let p = Poly::parse("z1*z2")?;
    let b = product_pencil(&q, &p)?;
    let d = b.nvars();
    println!("B_d PSD before: {}", exact_psd_check(&b.coeffs[d]).is_psd());

    let SosOutcome::Certified(cert) = repairable_gram(&b, &q, &p, SosOptions::default())? else {
        println!("no repairable Gram matrix found");
        return Ok(());
    };
    let a = psd_repair(&b, &q, &p, &cert.gram)?;
    println!("A_d PSD after:  {}", exact_psd_check(&a.coeffs[d]).is_psd());
    println!("polarization kept: {}", verify_polarization(&q, &p, &a)?);
    Ok(())
}
