//! JSON artifacts and their independent re-verification.
//!
//! Rationals are strings (`"p/q"` or `"p"`), polynomials are printer output
//! parsed with the artifact's `nvars`, matrices are dense rows.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::ambiguity::{AmbiguityBasisElement, ElementKind};
use crate::basis::{DegreeBounds, MonomialBasis};
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::pencil::MatrixPencil;
use crate::polarize::verify_polarization;
use crate::poly::{wronskian, EvalPoint, MultiIndex, Poly, RationalFunction};
use crate::rational::{format_rational, parse_rational, ExactComplex, Rational};
use crate::resolvent::{eval_resolvent, ResolventRep};
use crate::sampling;
use crate::sos::{exact_psd_check, nevanlinna_sample_check, sum_of_squares, GramCertificate, WeightedSquare};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PencilJson {
    pub d: usize,
    pub bounds: DegreeBounds,
    #[serde(default)]
    pub homogenized: bool,
    pub basis: Vec<Vec<u32>>,
    pub matrices: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedSquareJson {
    pub weight: String,
    pub poly: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub nvars: usize,
    pub bounds: DegreeBounds,
    pub basis: Vec<Vec<u32>>,
    pub gram: Vec<Vec<String>>,
    pub target: String,
    pub factors: Vec<WeightedSquareJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub beta: Vec<u32>,
    pub kind: ElementKind,
    pub support: Vec<usize>,
    /// Nonzero entries `[i, j, value]` with `i ≤ j`.
    pub matrix: Vec<(usize, usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorJson {
    pub poly: String,
    pub multiplicity: u32,
}

/// Every artifact written by the command-line tool.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Artifact {
    /// `q(ζ)p(z) = Ψ(ζ)B(z)Ψ(z)ᵀ`; with `psd_last` the last coefficient is PSD.
    Polarization { q: String, p: String, psd_last: bool, pencil: PencilJson },
    /// Schur complement on `scalar_index` against `block_indices` equals `num/den`.
    Resolvent {
        num: String,
        den: String,
        scalar_index: usize,
        block_indices: Vec<usize>,
        psd_last: bool,
        pencil: PencilJson,
    },
    Wronskian { q: String, p: String, j: usize, w: String },
    Certificates { certificates: Vec<CertificateJson> },
    AmbiguityBasis { bounds: DegreeBounds, basis: Vec<Vec<u32>>, elements: Vec<ElementJson> },
    /// `S(z)·Ψ(z)ᵀ = 0`.
    Lift { pencil: PencilJson },
    Strip { f: String, result: Vec<FactorJson>, certificate: CertificateJson },
    /// Sampling outcome; a counterexample is stored as `(re, im)` pairs.
    Nevanlinna { num: String, den: String, samples: usize, seed: u64, counterexample: Option<Vec<(String, String)>> },
}

fn rat(s: &str) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| Error::Artifact(format!("malformed rational {s:?}")))
}

fn matrix_to_json(m: &SymMatrix) -> Vec<Vec<String>> {
    m.rows().iter().map(|r| r.iter().map(format_rational).collect()).collect()
}

fn matrix_from_json(rows: &[Vec<String>]) -> Result<SymMatrix> {
    let m = rows.iter().map(|r| r.iter().map(|s| rat(s)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    if m.iter().any(|r| r.len() != m.len()) {
        return Err(Error::Artifact("matrix is not square".into()));
    }
    SymMatrix::from_rows(m)
}

fn basis_to_json(b: &MonomialBasis) -> Vec<Vec<u32>> {
    b.monomials().iter().map(|m| m.0.clone()).collect()
}

fn basis_from_json(bounds: &DegreeBounds, mons: &[Vec<u32>], homogenized: bool) -> Result<MonomialBasis> {
    MonomialBasis::from_monomials(bounds.clone(), mons.iter().map(|m| MultiIndex(m.clone())).collect(), homogenized)
}

fn poly(src: &str, nvars: usize) -> Result<Poly> {
    Poly::parse_with_nvars(src, nvars)
}

impl PencilJson {
    pub fn from_pencil(p: &MatrixPencil) -> Self {
        PencilJson {
            d: p.nvars(),
            bounds: p.basis.bounds.clone(),
            homogenized: p.basis.is_homogenized(),
            basis: basis_to_json(&p.basis),
            matrices: p.coeffs.iter().map(matrix_to_json).collect(),
        }
    }

    pub fn to_pencil(&self) -> Result<MatrixPencil> {
        if self.d != self.bounds.nvars() {
            return Err(Error::Artifact(format!("d = {} but bounds have {} variables", self.d, self.bounds.nvars())));
        }
        let basis = basis_from_json(&self.bounds, &self.basis, self.homogenized)?;
        let coeffs = self.matrices.iter().map(|m| matrix_from_json(m)).collect::<Result<Vec<_>>>()?;
        MatrixPencil::new(basis, coeffs)
    }
}

impl CertificateJson {
    pub fn from_certificate(c: &GramCertificate) -> Self {
        CertificateJson {
            nvars: c.target.nvars(),
            bounds: c.basis.bounds.clone(),
            basis: basis_to_json(&c.basis),
            gram: matrix_to_json(&c.gram),
            target: c.target.to_string(),
            factors: c
                .factors
                .iter()
                .map(|f| WeightedSquareJson { weight: format_rational(&f.weight), poly: f.poly.to_string() })
                .collect(),
        }
    }

    /// Rebuilds the certificate without recomputing factors; `verify` then
    /// checks the stored factors as well.
    pub fn to_certificate(&self) -> Result<GramCertificate> {
        let factors = self
            .factors
            .iter()
            .map(|f| Ok(WeightedSquare { weight: rat(&f.weight)?, poly: poly(&f.poly, self.nvars)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(GramCertificate {
            basis: basis_from_json(&self.bounds, &self.basis, false)?,
            gram: matrix_from_json(&self.gram)?,
            target: poly(&self.target, self.nvars)?,
            factors,
        })
    }
}

impl ElementJson {
    pub fn from_element(e: &AmbiguityBasisElement, n: usize) -> Self {
        ElementJson {
            beta: e.beta.0.clone(),
            kind: e.kind,
            support: e.support.clone(),
            matrix: e.matrix(n).nonzeros().filter(|(i, j, _)| i <= j).map(|(i, j, v)| (i, j, format_rational(v))).collect(),
        }
    }
}

/// Outcome of re-checking an artifact: `Ok(())` or the first failed claim.
pub type Verdict = std::result::Result<(), String>;

macro_rules! ensure {
    ($ok:expr, $claim:expr) => {
        if !$ok {
            return Ok(Err($claim.to_string()));
        }
    };
}

fn check(ok: bool, claim: &str) -> Verdict {
    if ok {
        Ok(())
    } else {
        Err(claim.to_string())
    }
}

fn check_certificate(c: &CertificateJson) -> Result<Verdict> {
    let cert = c.to_certificate()?;
    if cert.factors.is_empty() && !cert.target.is_zero() {
        return Ok(Err("certificate carries no factors".into()));
    }
    Ok(match cert.verify() {
        Ok(()) => check(sum_of_squares(&cert.factors, c.nvars) == cert.target, "factors re-expand to the target"),
        Err(e) => Err(e.to_string()),
    })
}

const VERIFY_POINTS: usize = 20;

/// Re-checks every claim of an artifact by exact recomputation. `Err` is
/// reserved for artifacts that cannot be read at all.
pub fn verify_artifact(a: &Artifact, seed: u64) -> Result<Verdict> {
    match a {
        Artifact::Polarization { q, p, psd_last, pencil } => {
            let pen = pencil.to_pencil()?;
            let (q, p) = (poly(q, pen.nvars())?, poly(p, pen.nvars())?);
            ensure!(verify_polarization(&q, &p, &pen)?, "q(ζ)p(z) = Ψ(ζ)B(z)Ψ(z)ᵀ");
            Ok(check(!psd_last || exact_psd_check(&pen.coeffs[pen.nvars()]).is_psd(), "last coefficient is PSD"))
        }
        Artifact::Resolvent { num, den, scalar_index, block_indices, psd_last, pencil } => {
            let pen = pencil.to_pencil()?;
            let d = pen.nvars();
            let f = RationalFunction::new(poly(num, d)?, poly(den, d)?)?;
            if *scalar_index >= pen.size() || block_indices.iter().any(|&i| i >= pen.size() || i == *scalar_index) {
                return Err(Error::Artifact("resolvent indices out of range".into()));
            }
            if *psd_last && !exact_psd_check(&pen.coeffs[d]).is_psd() {
                return Ok(Err("last coefficient is PSD".into()));
            }
            let n = pen.size();
            let rep = ResolventRep {
                pencil: pen,
                scalar_index: *scalar_index,
                block_indices: block_indices.clone(),
                q_coeffs: Vec::new(),
                permutation: (0..n).collect(),
            };
            let mut r = sampling::rng(seed);
            let (mut checked, mut tries) = (0, 0);
            while checked < VERIFY_POINTS && tries < 50 * VERIFY_POINTS {
                tries += 1;
                let z = EvalPoint::real(&sampling::real_point(&mut r, d, sampling::DEFAULT_BOX));
                let Some(v) = f.evaluate(&z)? else { continue };
                match eval_resolvent(&rep, &z) {
                    Ok(s) if s == v => checked += 1,
                    Ok(_) => return Ok(Err(format!("Schur complement differs from f at {:?}", z.coords))),
                    Err(Error::SingularBlock) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(check(checked == VERIFY_POINTS, "enough regular points to compare"))
        }
        Artifact::Wronskian { q, p, j, w } => {
            let (q, p) = crate::parse::parse_pair(q, p)?;
            let w = poly(w, q.nvars())?;
            Ok(check(wronskian(&q, &p, *j)? == w, "W_j = q·∂_j p − p·∂_j q"))
        }
        Artifact::Certificates { certificates } => {
            for c in certificates {
                if let Err(e) = check_certificate(c)? {
                    return Ok(Err(e));
                }
            }
            Ok(Ok(()))
        }
        Artifact::AmbiguityBasis { bounds, basis, elements } => {
            let b = basis_from_json(bounds, basis, true)?;
            let psi = b.polys();
            for e in elements {
                let mut s = SymMatrix::zeros(b.len());
                for (i, j, v) in &e.matrix {
                    if *i >= b.len() || *j >= b.len() {
                        return Err(Error::Artifact("element entry out of range".into()));
                    }
                    s.set(*i, *j, rat(v)?);
                }
                ensure!(s.poly_quad_form(&psi).is_zero(), format!("Ψ·S·Ψᵀ = 0 for the element at β = {:?}", e.beta));
                let beta = MultiIndex(e.beta.clone());
                let on_beta = s.nonzeros().all(|(i, j, _)| b.monomials()[i].add(&b.monomials()[j]) == beta);
                ensure!(on_beta, format!("element at β = {:?} lives on its β", e.beta));
            }
            Ok(Ok(()))
        }
        Artifact::Lift { pencil } => {
            let pen = pencil.to_pencil()?;
            Ok(check(pen.apply_to_basis().iter().all(Poly::is_zero), "S(z)·Ψ(z)ᵀ = 0"))
        }
        Artifact::Strip { f, result, certificate } => {
            let f = poly(f, certificate.nvars)?;
            let mut s = Poly::one(f.nvars());
            for fac in result {
                s = &s * &poly(&fac.poly, f.nvars())?.pow(fac.multiplicity);
            }
            ensure!(poly(&certificate.target, f.nvars())? == &(&s * &s) * &f, "certificate target is s²·F");
            check_certificate(certificate)
        }
        Artifact::Nevanlinna { num, den, samples, seed, counterexample } => {
            let (p, q) = crate::parse::parse_pair(num, den)?;
            let f = RationalFunction::new(p, q)?;
            match counterexample {
                Some(pt) => {
                    let coords = pt.iter().map(|(re, im)| Ok(ExactComplex::new(rat(re)?, rat(im)?))).collect::<Result<Vec<_>>>()?;
                    ensure!(coords.iter().all(|c| c.im.is_positive()), "counterexample lies in the upper half-plane");
                    let v = f.evaluate(&EvalPoint::new(coords))?;
                    Ok(check(v.is_some_and(|v| v.im.is_negative()), "Im f < 0 at the counterexample"))
                }
                None => Ok(check(
                    nevanlinna_sample_check(&f, *samples, *seed)?.passed(),
                    "no sampled point has Im f < 0",
                )),
            }
        }
    }
}
