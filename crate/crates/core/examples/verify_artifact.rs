//! Writes a certificate artifact, reads it back and re-checks it.

use sospencil::basis::{build_basis, DegreeBounds};
use sospencil::json::{verify_artifact, Artifact, CertificateJson};
use sospencil::poly::Poly;
use sospencil::sos::sos_feasibility;

fn main() -> sospencil::Result<()> {
    let f = Poly::parse("z1^2 - 2*z1*z2 + 2*z2^2 + 1")?;
    let out = sos_feasibility(&f, &build_basis(&DegreeBounds::half_of(&f))?, 1e-9)?;
    let cert = out.certificate().expect("certified");
    let art = Artifact::Certificates { certificates: vec![CertificateJson::from_certificate(cert)] };
    let text = serde_json::to_string_pretty(&art)?;
    println!("{text}");

    let back: Artifact = serde_json::from_str(&text)?;
    match verify_artifact(&back, 0)? {
        Ok(()) => println!("verified"),
        Err(why) => println!("rejected: {why}"),
    }
    Ok(())
}
