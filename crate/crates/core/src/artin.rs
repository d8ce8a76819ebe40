//! Denominators of sum-of-squares representations: sign classification of
//! factors, greedy stripping of a multiplier `s` with `s²·F` SOS down to a
//! minimal one, and zeros of `s` in the open upper poly-half-plane.
//!
//! Irreducibility of the supplied factors is trusted and never checked.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::basis::{build_basis, DegreeBounds};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{int, to_f64, Rational};
use crate::sampling;
use crate::sos::{sos_feasibility_with, GramCertificate, SosOptions, SosOutcome};

/// Product `Π s_i^{m_i}` of factors the caller asserts are irreducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredPoly {
    pub factors: Vec<(Poly, u32)>,
}

impl FactoredPoly {
    pub fn new(factors: Vec<(Poly, u32)>) -> Result<Self> {
        if let Some((first, _)) = factors.first() {
            for (p, _) in &factors {
                if p.nvars() != first.nvars() {
                    return Err(Error::NvarsMismatch { left: first.nvars(), right: p.nvars() });
                }
                if p.is_zero() {
                    return Err(Error::ZeroPolynomial("factor"));
                }
            }
        }
        Ok(FactoredPoly { factors: factors.into_iter().filter(|(_, m)| *m > 0).collect() })
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn expand(&self, nvars: usize) -> Poly {
        self.factors.iter().fold(Poly::one(nvars), |acc, (p, m)| &acc * &p.pow(*m))
    }

    fn without_one(&self, idx: usize) -> FactoredPoly {
        let mut out = self.clone();
        out.factors[idx].1 -= 1;
        out.factors.retain(|(_, m)| *m > 0);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignClass {
    Indefinite { positive: Vec<Rational>, negative: Vec<Rational> },
    /// Only sampled evidence; never a proof of semidefiniteness.
    NoSignChange { samples: usize },
}

impl SignClass {
    pub fn is_indefinite(&self) -> bool {
        matches!(self, SignClass::Indefinite { .. })
    }
}

const GRID_LIMIT: usize = 6;

/// Tries the grid `{−1, 0, 1}^d` (for `d ≤ 6`), then `samples` seeded points
/// of `[−10, 10]^d`, until values of both strict signs have been seen.
pub fn sign_classification_sample(s: &Poly, samples: usize, seed: u64) -> Result<SignClass> {
    if s.is_zero() {
        return Err(Error::ZeroPolynomial("s"));
    }
    let d = s.nvars();
    let mut grid: Vec<Vec<Rational>> = Vec::new();
    if d <= GRID_LIMIT {
        for code in 0..3usize.pow(d as u32) {
            grid.push((0..d).map(|k| int((code / 3usize.pow(k as u32) % 3) as i64 - 1)).collect());
        }
    }
    let mut r = sampling::rng(seed);
    let random = (0..samples).map(move |_| sampling::real_point(&mut r, d, sampling::DEFAULT_BOX));
    let (mut pos, mut neg) = (None, None);
    let mut seen = 0;
    for z in grid.into_iter().chain(random) {
        seen += 1;
        let v = s.eval_rational(&z);
        if v.is_positive() && pos.is_none() {
            pos = Some(z);
        } else if v.is_negative() && neg.is_none() {
            neg = Some(z);
        }
        if let (Some(p), Some(n)) = (&pos, &neg) {
            return Ok(SignClass::Indefinite { positive: p.clone(), negative: n.clone() });
        }
    }
    Ok(SignClass::NoSignChange { samples: seen })
}

/// An SOS decision procedure for a single polynomial.
pub trait Certifier {
    fn certify(&self, f: &Poly) -> Result<SosOutcome>;
}

/// Gram search over the full basis with bounds `⌊deg/2⌋`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SosCertifier {
    pub opts: SosOptions,
}

impl Certifier for SosCertifier {
    fn certify(&self, f: &Poly) -> Result<SosOutcome> {
        let basis = build_basis(&DegreeBounds::half_of(f))?;
        sos_feasibility_with(f, &basis, self.opts)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StripTrial {
    pub factor: String,
    pub status: &'static str,
}

#[derive(Clone, Debug)]
pub struct StripReport {
    pub result: FactoredPoly,
    /// Factors removed because they change sign.
    pub indefinite: Vec<Poly>,
    /// Every single-factor removal attempted, in order.
    pub trials: Vec<StripTrial>,
    /// Certificate for `result²·F`.
    pub certificate: GramCertificate,
    /// Some final-round trial was inconclusive, so minimality is weaker than
    /// "every removal is refuted".
    pub inconclusive_trials: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct StripOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for StripOptions {
    fn default() -> Self {
        StripOptions { samples: 1000, seed: 0 }
    }
}

fn certify_product(f: &Poly, s: &FactoredPoly, oracle: &dyn Certifier) -> Result<SosOutcome> {
    let sp = s.expand(f.nvars());
    oracle.certify(&(&(&sp * &sp) * f))
}

fn require_certified(outcome: SosOutcome, what: &str) -> Result<GramCertificate> {
    match outcome {
        SosOutcome::Certified(c) => Ok(c),
        SosOutcome::Inconclusive(msg) => Err(Error::Inconclusive(format!("{what}: {msg}"))),
        SosOutcome::Infeasible(ev) => Err(Error::Precondition(format!("{what} is not certified: {}", ev.reason))),
    }
}

/// Drops sign-changing factors, then removes single factors in input order
/// while `(s/s_j)²·F` stays certified, until no removal is accepted.
pub fn minimal_denominator_strip(f: &Poly, s: &FactoredPoly, oracle: &dyn Certifier, opts: StripOptions) -> Result<StripReport> {
    if s.factors.iter().any(|(p, _)| p.nvars() != f.nvars()) {
        return Err(Error::NvarsMismatch { left: f.nvars(), right: s.factors[0].0.nvars() });
    }
    require_certified(certify_product(f, s, oracle)?, "s²·F")?;

    let mut indefinite = Vec::new();
    let mut cur = FactoredPoly { factors: Vec::new() };
    for (p, m) in &s.factors {
        if sign_classification_sample(p, opts.samples, opts.seed)?.is_indefinite() {
            indefinite.push(p.clone());
        } else {
            cur.factors.push((p.clone(), *m));
        }
    }
    let mut cert = require_certified(certify_product(f, &cur, oracle)?, "s²·F without sign-changing factors")?;

    let mut trials = Vec::new();
    loop {
        let mut accepted = false;
        let mut inconclusive = false;
        for idx in 0..cur.factors.len() {
            let cand = cur.without_one(idx);
            let out = certify_product(f, &cand, oracle)?;
            trials.push(StripTrial { factor: cur.factors[idx].0.to_string(), status: out.status() });
            match out {
                SosOutcome::Certified(c) => {
                    cur = cand;
                    cert = c;
                    accepted = true;
                    break;
                }
                SosOutcome::Inconclusive(_) => inconclusive = true,
                SosOutcome::Infeasible(_) => {}
            }
        }
        if !accepted {
            return Ok(StripReport { result: cur, indefinite, trials, certificate: cert, inconclusive_trials: inconclusive });
        }
    }
}

/// Approximate zero of `s` with every imaginary part positive.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfPlaneZero {
    pub point: Vec<Complex64>,
    pub residual: f64,
    /// 0-based coordinate solved for.
    pub variable: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct ZeroSearchOptions {
    pub attempts: usize,
    pub tol: f64,
}

impl Default for ZeroSearchOptions {
    fn default() -> Self {
        ZeroSearchOptions { attempts: 200, tol: 1e-8 }
    }
}

/// Coefficients (ascending) of `s` restricted to the line through `z` in
/// direction `e_j`.
fn restrict(s: &Poly, z: &[Complex64], j: usize) -> Vec<Complex64> {
    let deg = s.degree_in(j).unwrap_or(0) as usize;
    let mut c = vec![Complex64::zero(); deg + 1];
    for (m, v) in s.terms() {
        let mut t = Complex64::new(to_f64(v), 0.0);
        for (k, &e) in m.0.iter().enumerate() {
            if k != j {
                t *= z[k].powi(e as i32);
            }
        }
        c[m.0[j] as usize] += t;
    }
    c
}

fn horner(c: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let (mut p, mut dp) = (Complex64::zero(), Complex64::zero());
    for a in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

fn newton(c: &[Complex64], mut x: Complex64) -> Complex64 {
    for _ in 0..60 {
        let (p, dp) = horner(c, x);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        x -= step;
        if step.norm() <= 1e-12 * x.norm().max(1.0) {
            break;
        }
    }
    x
}

/// Roots of `Σ c_k x^k` from the eigenvalues of the companion matrix.
fn univariate_roots(c: &[Complex64]) -> Vec<Complex64> {
    let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let Some(deg) = c.iter().rposition(|x| x.norm() > 1e-14 * scale) else { return Vec::new() };
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c[..deg].iter().map(|x| x / lead).collect();
    let real = monic.iter().all(|x| x.im.abs() <= 1e-14 * x.norm().max(1.0));
    let raw: Vec<Complex64> = if real {
        let mut m = DMatrix::<f64>::zeros(deg, deg);
        for k in 1..deg {
            m[(k, k - 1)] = 1.0;
        }
        for k in 0..deg {
            m[(k, deg - 1)] = -monic[k].re;
        }
        m.complex_eigenvalues().iter().copied().collect()
    } else {
        let mut m = DMatrix::<Complex64>::zeros(deg, deg);
        for k in 1..deg {
            m[(k, k - 1)] = Complex64::new(1.0, 0.0);
        }
        for k in 0..deg {
            m[(k, deg - 1)] = -monic[k];
        }
        m.schur().eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default()
    };
    raw.into_iter().map(|x| newton(&c[..=deg], x)).collect()
}

/// Searches for `z′` with `min Im z′_k > 0` and `|s(z′)| < tol·scale(s)`.
///
/// A real base point `x̂` is sampled for the other coordinates, the roots of
/// `s(x̂, ·)` with positive imaginary part are kept, and `x̂` is pushed into
/// the upper half-plane by a shrinking `iε` while the root is re-polished.
/// `Ok(None)` means the attempt budget ran out.
pub fn upper_halfplane_zero(s: &Poly, seed: u64, opts: ZeroSearchOptions) -> Result<Option<HalfPlaneZero>> {
    if s.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    let d = s.nvars();
    let j = (0..d).rev().find(|&k| !s.derivative(k).is_zero()).ok_or(Error::ConstantPolynomial)?;
    let bound = opts.tol * s.coeff_scale().max(1.0);
    let mut r = sampling::rng(seed);
    for _ in 0..opts.attempts {
        let base: Vec<Complex64> =
            sampling::real_point(&mut r, d, 2).iter().map(|x| Complex64::new(to_f64(x), 0.0)).collect();
        for root in univariate_roots(&restrict(s, &base, j)) {
            if root.im <= 1e-9 {
                continue;
            }
            let mut eps = 1e-2;
            while eps >= 1e-8 {
                let mut z = base.clone();
                for (k, zk) in z.iter_mut().enumerate() {
                    if k != j {
                        zk.im = eps * (1.0 + zk.re.abs());
                    }
                }
                z[j] = newton(&restrict(s, &z, j), root);
                let residual = s.eval_c64(&z).norm();
                if z.iter().all(|x| x.im > 0.0) && residual < bound {
                    return Ok(Some(HalfPlaneZero { point: z, residual, variable: j }));
                }
                eps /= 10.0;
            }
        }
    }
    Ok(None)
}
