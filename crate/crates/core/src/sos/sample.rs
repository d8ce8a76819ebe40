//! Seeded sampling checks for nonnegativity and the upper half-plane
//! condition `Im f ≥ 0`.

use num_traits::Signed;

use crate::error::Result;
use crate::poly::{EvalPoint, Poly, RationalFunction};
use crate::rational::{to_f64, ExactComplex, Rational};
use crate::sampling::{real_point, rng, upper_point, DEFAULT_BOX};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SampleOutcome {
    NoViolation { samples: usize },
    Counterexample { point: Vec<Rational>, value: Rational },
}

/// Evaluates `f` exactly at `samples` seeded points of `[−10, 10]^d` on the
/// `1/1000` grid; reports the first strictly negative value.
pub fn psd_sampling_test(f: &Poly, samples: usize, seed: u64) -> SampleOutcome {
    let mut r = rng(seed);
    for _ in 0..samples {
        let z = real_point(&mut r, f.nvars(), DEFAULT_BOX);
        let v = f.eval_rational(&z);
        if v.is_negative() {
            return SampleOutcome::Counterexample { point: z, value: v };
        }
    }
    SampleOutcome::NoViolation { samples }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NevanlinnaOutcome {
    NoViolation { checked: usize, poles: usize },
    Counterexample { point: EvalPoint, value: ExactComplex },
}

impl NevanlinnaOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, NevanlinnaOutcome::NoViolation { .. })
    }
}

/// Probes `(i, …, i)` and then `samples` seeded points with every imaginary
/// part in `(0, 10]`; flags `Im f < −10⁻¹²·max(1, |f|)`. Poles are skipped.
pub fn nevanlinna_sample_check(f: &RationalFunction, samples: usize, seed: u64) -> Result<NevanlinnaOutcome> {
    let d = f.nvars();
    let mut r = rng(seed);
    let probe = EvalPoint::new(vec![ExactComplex::i(); d]);
    let points = std::iter::once(probe).chain((0..samples).map(|_| upper_point(&mut r, d, DEFAULT_BOX)));
    let (mut checked, mut poles) = (0, 0);
    for z in points {
        match f.evaluate(&z)? {
            None => poles += 1,
            Some(v) => {
                checked += 1;
                if v.im.is_negative() {
                    let scale = v.to_f64().norm().max(1.0);
                    if to_f64(&v.im) < -1e-12 * scale {
                        return Ok(NevanlinnaOutcome::Counterexample { point: z, value: v });
                    }
                }
            }
        }
    }
    Ok(NevanlinnaOutcome::NoViolation { checked, poles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn sampling_examples() {
        let sq = Poly::parse_with_nvars("z2^2", 2).unwrap();
        assert_eq!(psd_sampling_test(&sq, 1000, 1), SampleOutcome::NoViolation { samples: 1000 });
        let neg = Poly::parse("-1").unwrap();
        assert!(matches!(psd_sampling_test(&neg, 5, 1), SampleOutcome::Counterexample { value, .. } if value == int(-1)));
        let indef = Poly::parse("z1^2 - z2^2").unwrap();
        assert!(matches!(psd_sampling_test(&indef, 1000, 3), SampleOutcome::Counterexample { .. }));
    }

    #[test]
    fn nevanlinna_examples() {
        let f = RationalFunction::parse("-1", "z1").unwrap();
        assert!(nevanlinna_sample_check(&f, 500, 2).unwrap().passed());
        let f = RationalFunction::parse("z1*z2", "z1 + z2").unwrap();
        assert!(nevanlinna_sample_check(&f, 1000, 2).unwrap().passed());
        let f = RationalFunction::parse("-z1", "1").unwrap();
        match nevanlinna_sample_check(&f, 10, 2).unwrap() {
            NevanlinnaOutcome::Counterexample { point, value } => {
                assert_eq!(point, EvalPoint::new(vec![ExactComplex::i()]));
                assert_eq!(value.im, int(-1));
            }
            o => panic!("{o:?}"),
        }
    }
}
