//! Numeric feasibility SDP on a Gram slice.
//!
//! Solves `find X ⪰ 0` with `⟨A_k, X⟩ = b_k` by an infeasible-start
//! primal-dual path-following method (HKM direction) with zero objective,
//! so the iterates approach the analytic center of the feasible set.
//! If the slice misses the cone the dual iterates run off along a ray
//! `y` with `−Σ y_k A_k ⪰ 0` and `bᵀy > 0`, which is reported as evidence.

use nalgebra::DMatrix;

/// Constraint `k` is `Σ_{(a,b,w) ∈ pairs[k]} w·X[a][b] = rhs[k]` over ordered pairs.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub n: usize,
    pub pairs: Vec<Vec<(usize, usize, f64)>>,
    pub rhs: Vec<f64>,
}

#[derive(Clone, Debug)]
pub enum SdpOutcome {
    Feasible { x: DMatrix<f64>, residual: f64 },
    /// Normalized dual ray: `bᵀy / ‖Σ y_k A_k‖_F`.
    Infeasible { margin: f64 },
    Stalled { residual: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct SdpSettings {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpSettings {
    fn default() -> Self {
        SdpSettings { tol: 1e-9, max_iter: 200 }
    }
}

impl SdpProblem {
    fn apply(&self, z: &DMatrix<f64>) -> Vec<f64> {
        self.pairs.iter().map(|ps| ps.iter().map(|&(a, b, w)| w * z[(a, b)]).sum()).collect()
    }

    fn adjoint(&self, y: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for (ps, &yk) in self.pairs.iter().zip(y) {
            for &(a, b, w) in ps {
                out[(a, b)] += w * yk;
            }
        }
        out
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest `α ≤ 1` keeping `z + α·dz` positive definite.
fn max_step(z: &DMatrix<f64>, dz: &DMatrix<f64>) -> Option<f64> {
    let l = z.clone().cholesky()?.l();
    let li = l.try_inverse()?;
    let w = sym(&(&li * dz * li.transpose()));
    let mn = w.symmetric_eigenvalues().min();
    Some(if mn >= 0.0 { 1.0 } else { (-1.0 / mn).min(1.0) })
}

fn min_eig(m: &DMatrix<f64>) -> f64 {
    sym(m).symmetric_eigenvalues().min()
}

pub fn solve_feasibility(p: &SdpProblem, settings: SdpSettings) -> SdpOutcome {
    let n = p.n;
    let m = p.pairs.len();
    if n == 0 {
        let residual = norm(&p.rhs);
        return if residual <= settings.tol {
            SdpOutcome::Feasible { x: DMatrix::zeros(0, 0), residual }
        } else {
            SdpOutcome::Infeasible { margin: f64::INFINITY }
        };
    }
    let scale = p.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
    let b: Vec<f64> = p.rhs.iter().map(|x| x / scale).collect();
    let bnorm = 1.0 + norm(&b);

    let mut x = DMatrix::<f64>::identity(n, n);
    let mut s = DMatrix::<f64>::identity(n, n);
    let mut y = vec![0.0; m];
    let mut last_residual = f64::INFINITY;

    for _ in 0..settings.max_iter {
        let mu = x.dot(&s) / n as f64;
        let ax = p.apply(&x);
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let aty = p.adjoint(&y);
        let rd = -&aty - &s;
        let residual = norm(&rp) / bnorm;
        last_residual = residual;

        if residual < settings.tol && mu < settings.tol && rd.norm() < settings.tol * (1.0 + s.norm()) {
            return SdpOutcome::Feasible { x: sym(&x) * scale, residual };
        }
        let by: f64 = b.iter().zip(&y).map(|(a, c)| a * c).sum();
        let ray = aty.norm();
        if by > 0.0 && ray > 1e8 && rd.norm() < 1e-6 * ray && min_eig(&(-&aty)) >= -1e-9 * ray {
            return SdpOutcome::Infeasible { margin: by / ray };
        }

        let Some(si) = s.clone().try_inverse() else { break };
        let si = sym(&si);
        let sigma = 0.2;

        let mut schur = DMatrix::<f64>::zeros(m, m);
        for (i, pi) in p.pairs.iter().enumerate() {
            for (j, pj) in p.pairs.iter().enumerate().skip(i) {
                let mut acc = 0.0;
                for &(c, d, wi) in pi {
                    for &(a, bb, wj) in pj {
                        acc += wi * wj * x[(c, a)] * si[(bb, d)];
                    }
                }
                schur[(i, j)] = acc;
                schur[(j, i)] = acc;
            }
        }
        let t1 = p.apply(&si);
        let t2 = p.apply(&(&x * &rd * &si));
        let rhs = nalgebra::DVector::from_iterator(
            m,
            (0..m).map(|k| b[k] - sigma * mu * t1[k] + t2[k]),
        );
        let dy = match schur.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => match schur.lu().solve(&rhs) {
                Some(v) => v,
                None => break,
            },
        };
        let dyv: Vec<f64> = dy.iter().copied().collect();
        let ds = &rd - p.adjoint(&dyv);
        let dx = sym(&(&si * (sigma * mu) - &x - &x * &ds * &si));

        let (Some(ap), Some(ad)) = (max_step(&x, &dx), max_step(&s, &ds)) else { break };
        let ap = (0.95 * ap).min(1.0);
        let ad = (0.95 * ad).min(1.0);
        x += dx * ap;
        s += ds * ad;
        for (yk, dk) in y.iter_mut().zip(&dyv) {
            *yk += ad * dk;
        }
        if !x.iter().chain(s.iter()).all(|v| v.is_finite()) {
            break;
        }
    }
    SdpOutcome::Stalled { residual: last_residual }
}
