//! Partial Wronskians of a Nevanlinna function and their SOS certificates.

use sospencil::poly::RationalFunction;
use sospencil::rational::format_rational;
use sospencil::sos::{main_theorem_pipeline, SosOutcome};

fn main() -> sospencil::Result<()> {
    let f = RationalFunction::parse("z1*z2", "z1 + z2")?;
    let report = main_theorem_pipeline(&f)?;
    println!("sampling gate passed: {}", report.nevanlinna.passed());
    for v in &report.variables {
        print!("W_{} = {}: ", v.variable, v.wronskian);
        match &v.outcome {
            SosOutcome::Certified(c) => {
                let terms: Vec<_> = c.factors.iter().map(|s| format!("{}*({})^2", format_rational(&s.weight), s.poly)).collect();
                println!("{}", terms.join(" + "));
            }
            other => println!("{}", other.status()),
        }
    }
    Ok(())
}
