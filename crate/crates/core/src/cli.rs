//! Command-line front end.
//!
//! Exit codes: 0 success or certified, 1 tool failure (I/O, parse, caps,
//! unmet preconditions), 2 a verified negative result, 3 inconclusive.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::ambiguity::{ambiguity_space_basis, lift_ambiguity, psd_repair, repairable_gram};
use crate::artin::{minimal_denominator_strip, upper_halfplane_zero, FactoredPoly, SosCertifier, StripOptions};
use crate::basis::{build_basis, homogenize_basis, DegreeBounds};
use crate::error::{Error, Result};
use crate::json::{verify_artifact, Artifact, CertificateJson, ElementJson, FactorJson, PencilJson};
use crate::matrix::SymMatrix;
use crate::parse::{parse_many, parse_pair};
use crate::pencil::MatrixPencil;
use crate::polarize::{product_pencil, verify_polarization};
use crate::poly::{wronskian, Poly, RationalFunction};
use crate::rational::format_rational;
use crate::resolvent::{inverse_resolvent_form, long_resolvent};
use crate::sos::{
    main_theorem_pipeline_with, nevanlinna_sample_check, sos_feasibility_with, NevanlinnaOutcome, PipelineOptions,
    SosOptions, SosOutcome,
};

#[derive(Parser, Debug)]
#[command(name = "sospencil", version, about = "Symmetric pencils, Wronskian SOS certificates and their verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print the machine-readable artifact or report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the JSON artifact to this path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every randomized step (0 when omitted).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    /// Denominator / left factor q.
    #[arg(short, long, allow_hyphen_values = true)]
    pub q: String,
    /// Numerator / right factor p.
    #[arg(short, long, allow_hyphen_values = true)]
    pub p: String,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SdpArgs {
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 24)]
    pub rounding_retries: usize,
}

impl SdpArgs {
    fn options(&self) -> SosOptions {
        SosOptions { tol: self.tol, max_iter: self.max_iter, rounding_retries: self.rounding_retries }
    }
}

#[derive(Args, Debug, Clone)]
pub struct BoundsArgs {
    /// Total degree bound n0.
    #[arg(long)]
    pub n0: u32,
    /// Per-variable bounds n1, …, nd (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub nk: Vec<u32>,
}

impl BoundsArgs {
    fn bounds(&self) -> DegreeBounds {
        DegreeBounds::new(self.n0, self.nk.clone())
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Product pencil B(z) with q(ζ)p(z) = Ψ(ζ)B(z)Ψ(z)ᵀ.
    Polarize(PairArgs),
    /// Long-resolvent representation of p/q; with --psd the inverse form with PSD last coefficient.
    Resolvent {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        psd: bool,
        /// Multiplier s for the --psd form (Gram certificate of s²·W_d).
        #[arg(short, long, default_value = "1", allow_hyphen_values = true)]
        s: String,
        #[command(flatten)]
        sdp: SdpArgs,
    },
    /// Partial Wronskian W_j = q·∂_j p − p·∂_j q.
    Wronskian {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(short, long)]
        j: usize,
    },
    /// Gram certificate for F, or for every Wronskian of p/q.
    Sos {
        #[arg(short, long, conflicts_with_all = ["q", "p"], required_unless_present = "q", allow_hyphen_values = true)]
        f: Option<String>,
        #[arg(short, long, requires = "p", allow_hyphen_values = true)]
        q: Option<String>,
        #[arg(short, long, requires = "q", allow_hyphen_values = true)]
        p: Option<String>,
        #[command(flatten)]
        sdp: SdpArgs,
    },
    /// Basis of the ambiguity space of the homogenized monomial basis.
    AmbiguityBasis(BoundsArgs),
    /// Lift a last coefficient S_d to S(z) with S(z)Ψ(z)ᵀ = 0.
    Lift {
        #[command(flatten)]
        bounds: BoundsArgs,
        /// S_d as a JSON array of rational strings, or a path to one.
        #[arg(long)]
        sd: String,
    },
    /// Product pencil with its last coefficient replaced by a PSD Gram matrix of W_d.
    PsdRepair {
        #[command(flatten)]
        pair: PairArgs,
        /// PSD Gram matrix (JSON array or path); searched for when omitted.
        #[arg(long)]
        gram: Option<String>,
        #[command(flatten)]
        sdp: SdpArgs,
    },
    /// Sampled check of Im f ≥ 0 on the upper poly-half-plane.
    NevanlinnaCheck {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Strip a multiplier s with s²·F SOS down to a minimal one.
    ArtinStrip {
        #[arg(short, long, allow_hyphen_values = true)]
        f: String,
        /// Irreducible factor of s (trusted); repeat for multiplicity.
        #[arg(long = "factor", required = true, allow_hyphen_values = true)]
        factors: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Also search each kept factor for a zero with all Im > 0.
        #[arg(long)]
        halfplane_zero: bool,
        #[command(flatten)]
        sdp: SdpArgs,
    },
    /// Re-check a JSON artifact by exact recomputation.
    Verify { path: PathBuf },
}

/// Exit status of a verb.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Failure = 1,
    Negative = 2,
    Inconclusive = 3,
}

pub struct Outcome {
    pub status: Status,
    pub text: String,
    pub artifact: Option<Artifact>,
    /// Printed with `--json` when there is no artifact.
    pub report: Option<serde_json::Value>,
}

impl Outcome {
    fn new(status: Status, text: String, artifact: Option<Artifact>) -> Self {
        Outcome { status, text, artifact, report: None }
    }
}

fn sos_status(o: &SosOutcome) -> Status {
    match o {
        SosOutcome::Certified(_) => Status::Ok,
        SosOutcome::Infeasible(_) => Status::Negative,
        SosOutcome::Inconclusive(_) => Status::Inconclusive,
    }
}

fn describe_sos(o: &SosOutcome) -> String {
    match o {
        SosOutcome::Certified(c) => {
            let mut s = format!("certified: {} weighted squares", c.factors.len());
            for f in &c.factors {
                let _ = write!(s, "\n  {} * ({})^2", format_rational(&f.weight), f.poly);
            }
            s
        }
        SosOutcome::Infeasible(ev) => {
            let kind = if ev.rigorous { "exact obstruction" } else { "numeric, not a proof" };
            let margin = ev.margin.map(|m| format!(", margin {m:.3e}")).unwrap_or_default();
            format!("infeasible-evidence ({kind}{margin}): {}", ev.reason)
        }
        SosOutcome::Inconclusive(msg) => format!("inconclusive: {msg}"),
    }
}

fn read_matrix(src: &str) -> Result<SymMatrix> {
    let text = if src.trim_start().starts_with('[') { src.to_string() } else { std::fs::read_to_string(src)? };
    let rows: Vec<Vec<String>> = serde_json::from_str(&text)?;
    let m = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| crate::rational::parse_rational(x).ok_or_else(|| Error::Artifact(format!("malformed rational {x:?}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SymMatrix::from_rows(m)
}

fn pencil_summary(p: &MatrixPencil) -> String {
    format!("{}x{} pencil in {} variables", p.size(), p.size(), p.nvars())
}

/// Runs a parsed command; `Err` values are mapped to exit codes by [`exit_code`].
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Polarize(pair) => {
            let (q, p) = parse_pair(&pair.q, &pair.p)?;
            let b = product_pencil(&q, &p)?;
            let ok = verify_polarization(&q, &p, &b)?;
            let text = format!("{}; polarization identity: {}", pencil_summary(&b), if ok { "verified" } else { "FAILED" });
            let art = Artifact::Polarization { q: q.to_string(), p: p.to_string(), psd_last: false, pencil: PencilJson::from_pencil(&b) };
            Ok(Outcome::new(if ok { Status::Ok } else { Status::Failure }, text, Some(art)))
        }
        Command::Resolvent { pair, psd, s, sdp } => {
            let f = RationalFunction::parse(&pair.p, &pair.q)?;
            if !*psd {
                let rep = long_resolvent(&f)?;
                let text = format!(
                    "{}; scalar row {}, nonsingular block of size {}",
                    pencil_summary(&rep.pencil),
                    rep.scalar_index,
                    rep.block_indices.len()
                );
                let art = Artifact::Resolvent {
                    num: f.num.to_string(),
                    den: f.den.to_string(),
                    scalar_index: rep.scalar_index,
                    block_indices: rep.block_indices.clone(),
                    psd_last: false,
                    pencil: PencilJson::from_pencil(&rep.pencil),
                };
                return Ok(Outcome::new(Status::Ok, text, Some(art)));
            }
            let s = Poly::parse_with_nvars(s, f.nvars())?;
            let (qs, ps) = (&f.den * &s, &f.num * &s);
            let b = product_pencil(&qs, &ps)?;
            let gram = repairable_gram(&b, &qs, &ps, sdp.options())?;
            let Some(cert) = gram.certificate() else {
                return Ok(Outcome::new(sos_status(&gram), format!("no repairable Gram matrix: {}", describe_sos(&gram)), None));
            };
            let a = inverse_resolvent_form(&f, &s, cert)?;
            let text = format!("{}; f = [π A(z)⁻¹ πᵀ]⁻¹ with A_{} PSD (verified)", pencil_summary(&a), f.nvars());
            let art = Artifact::Resolvent {
                num: f.num.to_string(),
                den: f.den.to_string(),
                scalar_index: 0,
                block_indices: (1..a.size()).collect(),
                psd_last: true,
                pencil: PencilJson::from_pencil(&a),
            };
            Ok(Outcome::new(Status::Ok, text, Some(art)))
        }
        Command::Wronskian { pair, j } => {
            let (q, p) = parse_pair(&pair.q, &pair.p)?;
            let w = wronskian(&q, &p, *j)?;
            let art = Artifact::Wronskian { q: q.to_string(), p: p.to_string(), j: *j, w: w.to_string() };
            Ok(Outcome::new(Status::Ok, w.to_string(), Some(art)))
        }
        Command::Sos { f, q, p, sdp } => {
            if let Some(f) = f {
                let f = Poly::parse(f)?;
                let basis = build_basis(&DegreeBounds::half_of(&f))?;
                let out = sos_feasibility_with(&f, &basis, sdp.options())?;
                let art = out.certificate().map(|c| Artifact::Certificates { certificates: vec![CertificateJson::from_certificate(c)] });
                let mut o = Outcome::new(sos_status(&out), describe_sos(&out), art);
                o.report = Some(serde_json::json!({ "status": out.status(), "detail": describe_sos(&out) }));
                return Ok(o);
            }
            let (q, p) = (q.as_deref().unwrap_or_default(), p.as_deref().unwrap_or_default());
            let f = RationalFunction::parse(p, q)?;
            let report = main_theorem_pipeline_with(&f, PipelineOptions { sos: sdp.options(), samples: 200, seed })?;
            let mut text = format!(
                "sampling gate: {}",
                if report.nevanlinna.passed() { "no violation" } else { "counterexample (advisory)" }
            );
            let mut status = Status::Ok;
            let mut statuses = Vec::new();
            for v in &report.variables {
                let _ = write!(text, "\nW_{} = {}\n  {}", v.variable, v.wronskian, describe_sos(&v.outcome));
                status = status.max_by_severity(sos_status(&v.outcome));
                statuses.push(serde_json::json!({ "variable": v.variable, "wronskian": v.wronskian.to_string(), "status": v.outcome.status() }));
            }
            let certs: Vec<_> = report.certificates().into_iter().map(CertificateJson::from_certificate).collect();
            let art = (!certs.is_empty()).then_some(Artifact::Certificates { certificates: certs });
            let mut o = Outcome::new(status, text, art);
            o.report = Some(serde_json::json!({ "variables": statuses }));
            Ok(o)
        }
        Command::AmbiguityBasis(b) => {
            let basis = homogenize_basis(&build_basis(&b.bounds())?)?;
            let elems = ambiguity_space_basis(&basis)?;
            let mut text = format!("{} basis elements over {} monomials", elems.len(), basis.len());
            for e in &elems {
                let _ = write!(text, "\n  {:?} {:?} support {:?}", e.beta.0, e.kind, e.support);
            }
            let art = Artifact::AmbiguityBasis {
                bounds: b.bounds(),
                basis: basis.monomials().iter().map(|m| m.0.clone()).collect(),
                elements: elems.iter().map(|e| ElementJson::from_element(e, basis.len())).collect(),
            };
            Ok(Outcome::new(Status::Ok, text, Some(art)))
        }
        Command::Lift { bounds, sd } => {
            let bounds = bounds.bounds();
            let basis = build_basis(&bounds)?;
            let s_d = read_matrix(sd)?;
            let s = lift_ambiguity(&s_d, &basis, &bounds)?;
            let text = format!("{}; S(z)Ψ(z)ᵀ = 0 verified", pencil_summary(&s));
            Ok(Outcome::new(Status::Ok, text, Some(Artifact::Lift { pencil: PencilJson::from_pencil(&s) })))
        }
        Command::PsdRepair { pair, gram, sdp } => {
            let (q, p) = parse_pair(&pair.q, &pair.p)?;
            let b = product_pencil(&q, &p)?;
            let a_d = match gram {
                Some(g) => read_matrix(g)?,
                None => {
                    let out = repairable_gram(&b, &q, &p, sdp.options())?;
                    match out.certificate() {
                        Some(c) => c.gram.clone(),
                        None => {
                            return Ok(Outcome::new(sos_status(&out), format!("no repairable Gram matrix: {}", describe_sos(&out)), None))
                        }
                    }
                }
            };
            let a = psd_repair(&b, &q, &p, &a_d)?;
            let text = format!("{}; polarization verified, last coefficient PSD", pencil_summary(&a));
            let art = Artifact::Polarization { q: q.to_string(), p: p.to_string(), psd_last: true, pencil: PencilJson::from_pencil(&a) };
            Ok(Outcome::new(Status::Ok, text, Some(art)))
        }
        Command::NevanlinnaCheck { pair, samples } => {
            let f = RationalFunction::parse(&pair.p, &pair.q)?;
            let out = nevanlinna_sample_check(&f, *samples, seed)?;
            let (status, text, ce) = match &out {
                NevanlinnaOutcome::NoViolation { checked, poles } => {
                    (Status::Ok, format!("no violation at {checked} points ({poles} poles skipped)"), None)
                }
                NevanlinnaOutcome::Counterexample { point, value } => {
                    let pt: Vec<(String, String)> =
                        point.coords.iter().map(|c| (format_rational(&c.re), format_rational(&c.im))).collect();
                    let shown: Vec<String> = pt.iter().map(|(a, b)| format!("{a} + {b}i")).collect();
                    let text = format!(
                        "counterexample at ({}): Im f = {}",
                        shown.join(", "),
                        format_rational(&value.im)
                    );
                    (Status::Negative, text, Some(pt))
                }
            };
            let art = Artifact::Nevanlinna { num: f.num.to_string(), den: f.den.to_string(), samples: *samples, seed, counterexample: ce };
            Ok(Outcome::new(status, text, Some(art)))
        }
        Command::ArtinStrip { f, factors, samples, halfplane_zero, sdp } => {
            let mut srcs: Vec<&str> = vec![f];
            srcs.extend(factors.iter().map(String::as_str));
            let mut polys = parse_many(&srcs)?;
            let f = polys.remove(0);
            let mut grouped: Vec<(Poly, u32)> = Vec::new();
            for p in polys {
                match grouped.iter_mut().find(|(g, _)| *g == p) {
                    Some(e) => e.1 += 1,
                    None => grouped.push((p, 1)),
                }
            }
            let s = FactoredPoly::new(grouped)?;
            let oracle = SosCertifier { opts: sdp.options() };
            let rep = minimal_denominator_strip(&f, &s, &oracle, StripOptions { samples: *samples, seed })?;
            let shown: Vec<String> = rep.result.factors.iter().map(|(p, m)| format!("({p})^{m}")).collect();
            let mut text = format!("minimal multiplier: {}", if shown.is_empty() { "1".into() } else { shown.join(" * ") });
            for p in &rep.indefinite {
                let _ = write!(text, "\n  dropped sign-changing factor {p}");
            }
            for t in &rep.trials {
                let _ = write!(text, "\n  removal of {}: {}", t.factor, t.status);
            }
            if rep.inconclusive_trials {
                text.push_str("\n  note: some final removals were inconclusive; minimality is relative to the certifier");
            }
            if *halfplane_zero {
                for (p, _) in &rep.result.factors {
                    match upper_halfplane_zero(p, seed, Default::default()) {
                        Ok(Some(z)) => {
                            let pts: Vec<String> = z.point.iter().map(|c| format!("{:.6}{:+.6}i", c.re, c.im)).collect();
                            let _ = write!(text, "\n  zero of {p} with all Im > 0: ({}), |s| = {:.2e}", pts.join(", "), z.residual);
                        }
                        Ok(None) => {
                            let _ = write!(text, "\n  no upper half-plane zero of {p} found");
                        }
                        Err(e) => {
                            let _ = write!(text, "\n  zero search for {p}: {e}");
                        }
                    }
                }
            }
            let art = Artifact::Strip {
                f: f.to_string(),
                result: rep.result.factors.iter().map(|(p, m)| FactorJson { poly: p.to_string(), multiplicity: *m }).collect(),
                certificate: CertificateJson::from_certificate(&rep.certificate),
            };
            Ok(Outcome::new(Status::Ok, text, Some(art)))
        }
        Command::Verify { path } => {
            let text = std::fs::read_to_string(path)?;
            let art: Artifact = serde_json::from_str(&text)?;
            let mut o = match verify_artifact(&art, seed)? {
                Ok(()) => Outcome::new(Status::Ok, "verified".into(), None),
                Err(claim) => Outcome::new(Status::Negative, format!("verification failed: {claim}"), None),
            };
            o.report = Some(serde_json::json!({ "verified": o.status == Status::Ok, "detail": o.text }));
            Ok(o)
        }
    }
}

impl Status {
    fn severity(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Inconclusive => 1,
            Status::Negative => 2,
            Status::Failure => 3,
        }
    }

    fn max_by_severity(self, other: Status) -> Status {
        if other.severity() > self.severity() {
            other
        } else {
            self
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Inconclusive(_) => Status::Inconclusive as i32,
        Error::NotLiftable { .. } => Status::Negative as i32,
        _ => Status::Failure as i32,
    }
}

fn uses_seed(c: &Command) -> bool {
    matches!(
        c,
        Command::Resolvent { .. }
            | Command::Sos { q: Some(_), .. }
            | Command::NevanlinnaCheck { .. }
            | Command::ArtinStrip { .. }
            | Command::Verify { .. }
    )
}

/// Parses `args`, runs the command, prints, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return Status::Failure as i32;
            }
            let _ = write!(stdout, "{e}");
            return Status::Ok as i32;
        }
    };
    if cli.seed.is_none() && uses_seed(&cli.command) {
        let _ = writeln!(stderr, "seed: 0 (default)");
    }
    let out = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    if let (Some(path), Some(art)) = (&cli.out, &out.artifact) {
        let written = serde_json::to_string_pretty(art).map_err(Error::from).and_then(|s| Ok(std::fs::write(path, s + "\n")?));
        if let Err(e) = written {
            let _ = writeln!(stderr, "error: {e}");
            return Status::Failure as i32;
        }
    }
    let printed = if cli.json {
        let v = match (&out.artifact, &out.report) {
            (_, Some(r)) => r.clone(),
            (Some(a), None) => serde_json::to_value(a).unwrap_or_default(),
            (None, None) => serde_json::json!({ "detail": out.text }),
        };
        serde_json::to_string_pretty(&v).unwrap_or_default()
    } else {
        out.text.clone()
    };
    let _ = writeln!(stdout, "{printed}");
    out.status as i32
}
