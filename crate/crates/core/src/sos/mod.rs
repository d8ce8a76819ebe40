//! Sum-of-squares certificates: Gram feasibility, exact verification and
//! factor extraction, sampling checks, and the per-variable Wronskian
//! pipeline.

pub mod gram;
pub mod psd;
pub mod sample;
pub mod sdp;

use num_traits::Zero;

use crate::basis::{build_basis, DegreeBounds, MonomialBasis};
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::poly::{wronskian, Poly, RationalFunction};
use crate::rational::Rational;

use gram::{numeric_kernel, prepare, rationalize_span, Prepared, Slice};
pub use gram::LinearConstraint;
pub use psd::{exact_psd_check, LdlWitness, PsdVerdict};
pub use sample::{nevanlinna_sample_check, psd_sampling_test, NevanlinnaOutcome, SampleOutcome};
use sdp::{solve_feasibility, SdpOutcome, SdpSettings};

/// `weight · poly²` with `weight > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSquare {
    pub weight: Rational,
    pub poly: Poly,
}

/// Exact Gram certificate: `Ψ·gram·Ψᵀ = target` with `gram ⪰ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramCertificate {
    pub basis: MonomialBasis,
    pub gram: SymMatrix,
    pub target: Poly,
    pub factors: Vec<WeightedSquare>,
}

impl GramCertificate {
    /// Checks both invariants and attaches the weighted squares.
    pub fn new(basis: MonomialBasis, gram: SymMatrix, target: Poly) -> Result<Self> {
        let mut cert = GramCertificate { basis, gram, target, factors: Vec::new() };
        cert.check_identity()?;
        cert.factors = extract_sos(&cert)?;
        Ok(cert)
    }

    pub fn expand(&self) -> Poly {
        self.gram.poly_quad_form(&self.basis.polys())
    }

    fn check_identity(&self) -> Result<()> {
        if self.gram.size() != self.basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "gram is {0}x{0}, basis has {1} entries",
                self.gram.size(),
                self.basis.len()
            )));
        }
        if self.basis.width() != self.target.nvars() {
            return Err(Error::NvarsMismatch { left: self.basis.width(), right: self.target.nvars() });
        }
        if self.expand() != self.target {
            return Err(Error::CertificateMismatch("Ψ·G·Ψᵀ differs from the target".into()));
        }
        Ok(())
    }

    /// Re-checks the identity, PSD-ness and the factor expansion.
    pub fn verify(&self) -> Result<()> {
        self.check_identity()?;
        if let PsdVerdict::NotPsd { value, .. } = exact_psd_check(&self.gram) {
            return Err(Error::NotPsd(format!("quadratic form value {value}")));
        }
        if !self.factors.is_empty() {
            if self.factors.iter().any(|f| f.weight <= Rational::zero()) {
                return Err(Error::CertificateMismatch("non-positive factor weight".into()));
            }
            if sum_of_squares(&self.factors, self.target.nvars()) != self.target {
                return Err(Error::CertificateMismatch("weighted squares do not sum to the target".into()));
            }
        }
        Ok(())
    }
}

pub fn sum_of_squares(factors: &[WeightedSquare], nvars: usize) -> Poly {
    factors.iter().fold(Poly::zero(nvars), |acc, f| &acc + &(&f.poly * &f.poly).scale(&f.weight))
}

/// `target = Σ d_k·h_k²` read off the `LDLᵀ` factorization of the Gram matrix.
pub fn extract_sos(cert: &GramCertificate) -> Result<Vec<WeightedSquare>> {
    let w = match exact_psd_check(&cert.gram) {
        PsdVerdict::Psd(w) => w,
        PsdVerdict::NotPsd { value, .. } => return Err(Error::NotPsd(format!("quadratic form value {value}"))),
    };
    let psi = cert.basis.polys();
    let nvars = cert.basis.width();
    let mut out = Vec::new();
    for (k, dk) in w.d.iter().enumerate() {
        let mut h = Poly::zero(nvars);
        for i in k..w.perm.len() {
            if !w.l[i][k].is_zero() {
                h = &h + &psi[w.perm[i]].scale(&w.l[i][k]);
            }
        }
        out.push(WeightedSquare { weight: dk.clone(), poly: h });
    }
    if sum_of_squares(&out, nvars) != cert.target {
        return Err(Error::Internal("LDL factors do not re-expand to the target".into()));
    }
    Ok(out)
}

/// Evidence that no PSD Gram matrix exists.
#[derive(Clone, Debug, PartialEq)]
pub struct InfeasibleEvidence {
    pub reason: String,
    /// Normalized dual margin when the evidence is numeric.
    pub margin: Option<f64>,
    /// True only for exact obstructions found by pruning.
    pub rigorous: bool,
}

#[derive(Clone, Debug)]
pub enum SosOutcome {
    Certified(GramCertificate),
    Infeasible(InfeasibleEvidence),
    Inconclusive(String),
}

impl SosOutcome {
    pub fn certificate(&self) -> Option<&GramCertificate> {
        match self {
            SosOutcome::Certified(c) => Some(c),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            SosOutcome::Certified(_) => "certified",
            SosOutcome::Infeasible(_) => "infeasible-evidence",
            SosOutcome::Inconclusive(_) => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SosOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Number of denominator doublings tried, starting from `10⁴`.
    pub rounding_retries: usize,
}

impl Default for SosOptions {
    fn default() -> Self {
        SosOptions { tol: 1e-9, max_iter: 200, rounding_retries: 24 }
    }
}

pub fn sos_feasibility(f: &Poly, basis: &MonomialBasis, tol: f64) -> Result<SosOutcome> {
    sos_feasibility_with(f, basis, SosOptions { tol, ..SosOptions::default() })
}

pub fn sos_feasibility_with(f: &Poly, basis: &MonomialBasis, opts: SosOptions) -> Result<SosOutcome> {
    sos_feasibility_constrained(f, basis, &[], opts)
}

/// Gram search restricted by extra linear constraints on the Gram entries
/// (full basis indices).
pub fn sos_feasibility_constrained(
    f: &Poly,
    basis: &MonomialBasis,
    constraints: &[LinearConstraint],
    opts: SosOptions,
) -> Result<SosOutcome> {
    let rigorous = |reason| Ok(SosOutcome::Infeasible(InfeasibleEvidence { reason, margin: None, rigorous: true }));
    let mut sys = match prepare(f, basis)? {
        Prepared::System(s) => s,
        Prepared::Infeasible(reason) => return rigorous(reason),
    };
    if let Err(reason) = sys.constrain(constraints) {
        return rigorous(reason);
    }
    if sys.size() == 0 {
        let cert = GramCertificate::new(basis.clone(), SymMatrix::zeros(basis.len()), f.clone())?;
        return Ok(SosOutcome::Certified(cert));
    }
    let settings = SdpSettings { tol: opts.tol, max_iter: opts.max_iter };
    let x = match solve_feasibility(&sys.numeric_problem(), settings) {
        SdpOutcome::Feasible { x, .. } => x,
        SdpOutcome::Infeasible { margin } => {
            return Ok(SosOutcome::Infeasible(InfeasibleEvidence {
                reason: "numeric dual ray separates the target from the Gram cone (not a proof)".into(),
                margin: Some(margin),
                rigorous: false,
            }))
        }
        SdpOutcome::Stalled { residual } => {
            return Ok(SosOutcome::Inconclusive(format!("numeric solver stalled at residual {residual:.3e}")))
        }
    };

    let try_slice = |slice: &Slice, retries: usize| -> Result<Option<GramCertificate>> {
        let mut den: u64 = 10_000;
        for _ in 0..retries {
            let local = slice.project(&x, den);
            if exact_psd_check(&local).is_psd() {
                return GramCertificate::new(basis.clone(), sys.embed(&local), f.clone()).map(Some);
            }
            den = den.saturating_mul(2);
        }
        Ok(None)
    };

    if let Some(slice) = Slice::new(&sys, &[]) {
        if let Some(c) = try_slice(&slice, opts.rounding_retries)? {
            return Ok(SosOutcome::Certified(c));
        }
    }
    // The numeric solution sits on a proper face: pin its kernel exactly.
    if let Some(k) = numeric_kernel(&x, opts.tol.sqrt().max(1e-6)) {
        let mut kden = 100;
        while kden <= 100_000_000 {
            let kernel = rationalize_span(&k, kden);
            if let Some(slice) = Slice::new(&sys, &kernel) {
                if let Some(c) = try_slice(&slice, 8)? {
                    return Ok(SosOutcome::Certified(c));
                }
            }
            kden *= 10;
        }
    }
    Ok(SosOutcome::Inconclusive("rounding retry cap exceeded without an exact PSD Gram matrix".into()))
}

/// Per-variable result of the Wronskian pipeline.
#[derive(Clone, Debug)]
pub struct VariableReport {
    /// 1-based variable index.
    pub variable: usize,
    pub wronskian: Poly,
    pub outcome: SosOutcome,
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    /// Advisory upper half-plane sampling gate.
    pub nevanlinna: NevanlinnaOutcome,
    pub variables: Vec<VariableReport>,
}

impl PipelineReport {
    pub fn all_certified(&self) -> bool {
        self.variables.iter().all(|v| matches!(v.outcome, SosOutcome::Certified(_)))
    }

    pub fn certificates(&self) -> Vec<&GramCertificate> {
        self.variables.iter().filter_map(|v| v.outcome.certificate()).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PipelineOptions {
    pub sos: SosOptions,
    pub samples: usize,
    pub seed: u64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { sos: SosOptions::default(), samples: 200, seed: 0 }
    }
}

/// Certifies `W_j[q,p] = q·∂_j p − p·∂_j q` as a Gram form over the basis
/// of the pair `(q, p)`, for every `j`.
pub fn main_theorem_pipeline(f: &RationalFunction) -> Result<PipelineReport> {
    main_theorem_pipeline_with(f, PipelineOptions::default())
}

pub fn main_theorem_pipeline_with(f: &RationalFunction, opts: PipelineOptions) -> Result<PipelineReport> {
    let nevanlinna = nevanlinna_sample_check(f, opts.samples, opts.seed)?;
    let (q, p) = (&f.den, &f.num);
    let basis = build_basis(&DegreeBounds::from_pair(q, p))?;
    let mut variables = Vec::new();
    for j in 1..=f.nvars() {
        let w = wronskian(q, p, j)?;
        let outcome = sos_feasibility_with(&w, &basis, opts.sos)?;
        variables.push(VariableReport { variable: j, wronskian: w, outcome });
    }
    Ok(PipelineReport { nevanlinna, variables })
}

/// Unit weight squares `Σ h_k²` when every weight is a rational square.
pub fn unit_weight_factors(factors: &[WeightedSquare]) -> Option<Vec<Poly>> {
    factors
        .iter()
        .map(|f| {
            let r = rational_sqrt(&f.weight)?;
            Some(f.poly.scale(&r))
        })
        .collect()
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom() && !d.is_zero()).then(|| Rational::new(n, d))
}
