//! Upper half-plane sampling gate on a few functions.

use sospencil::poly::RationalFunction;
use sospencil::sos::{nevanlinna_sample_check, NevanlinnaOutcome};

fn main() -> sospencil::Result<()> {
    for (num, den) in [("z1", "1"), ("-1", "z1"), ("z1*z2", "z1 + z2"), ("-z1", "1"), ("z1^2", "1")] {
        let f = RationalFunction::parse(num, den)?;
        match nevanlinna_sample_check(&f, 1000, 0)? {
            NevanlinnaOutcome::NoViolation { checked, poles } => println!("{f}: ok ({checked} points, {poles} poles)"),
            NevanlinnaOutcome::Counterexample { point, value } => {
                let z: Vec<_> = point.coords.iter().map(ToString::to_string).collect();
                println!("{f}: Im f < 0 at ({}), f = {value}", z.join(", "));
            }
        }
    }
    Ok(())
}
