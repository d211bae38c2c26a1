//! Universal kriging on the line with polynomial drift of degree `d-1`.
//!
//! The error measure of the predictor (observation weights plus a unit
//! negative mass at the target) must annihilate the drift monomials, which
//! is exactly allowability of order `d`. Weights come from the closed-form
//! expression built on two factorizations; an independent solve of the
//! symmetric augmented KKT system cross-checks them.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covariance::{CovarianceError, IntrinsicCovariance};

#[derive(Debug, Error)]
pub enum KrigingError {
    #[error("invalid kriging problem: {0}")]
    InvalidProblem(String),
    #[error("singular system in block '{block}'")]
    SingularSystem { block: &'static str },
    #[error("drift constraints violated by {residual:e} after solving")]
    ConstraintResidual { residual: f64 },
    #[error("kriging variance {value:e} is negative beyond rounding")]
    NegativeVariance { value: f64 },
    #[error(transparent)]
    Covariance(#[from] CovarianceError),
}

/// Observations plus the drift degree and kernel that define the predictor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "KrigingProblemRepr", into = "KrigingProblemRepr")]
pub struct KrigingProblem {
    obs_t: Vec<f64>,
    obs_x: Vec<f64>,
    d: usize,
    icf: IntrinsicCovariance,
    nugget: f64,
}

#[derive(Serialize, Deserialize)]
struct KrigingProblemRepr {
    t: Vec<f64>,
    x: Vec<f64>,
    d: usize,
    icf: IntrinsicCovariance,
    #[serde(default)]
    nugget: f64,
}

impl TryFrom<KrigingProblemRepr> for KrigingProblem {
    type Error = KrigingError;
    fn try_from(r: KrigingProblemRepr) -> Result<Self, KrigingError> {
        KrigingProblem::new(r.t, r.x, r.d, r.icf, r.nugget)
    }
}

impl From<KrigingProblem> for KrigingProblemRepr {
    fn from(p: KrigingProblem) -> Self {
        KrigingProblemRepr {
            t: p.obs_t,
            x: p.obs_x,
            d: p.d,
            icf: p.icf,
            nugget: p.nugget,
        }
    }
}

impl KrigingProblem {
    pub fn new(
        obs_t: Vec<f64>,
        obs_x: Vec<f64>,
        d: usize,
        icf: IntrinsicCovariance,
        nugget: f64,
    ) -> Result<Self, KrigingError> {
        if obs_t.len() != obs_x.len() {
            return Err(KrigingError::InvalidProblem(format!(
                "{} locations but {} values",
                obs_t.len(),
                obs_x.len()
            )));
        }
        if d < 1 {
            return Err(KrigingError::InvalidProblem(
                "drift degree d must be at least 1".into(),
            ));
        }
        if obs_t.len() < d {
            return Err(KrigingError::InvalidProblem(format!(
                "need at least d = {d} observations for the drift constraints, got {}",
                obs_t.len()
            )));
        }
        if !(nugget >= 0.0) || !nugget.is_finite() {
            return Err(KrigingError::InvalidProblem(format!(
                "nugget must be a finite nonnegative variance, got {nugget}"
            )));
        }
        if obs_t.iter().chain(obs_x.iter()).any(|v| !v.is_finite()) {
            return Err(KrigingError::InvalidProblem(
                "observations must be finite".into(),
            ));
        }
        icf.validate()?;
        let mut pairs: Vec<(f64, f64)> = obs_t.into_iter().zip(obs_x).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pairs
            .windows(2)
            .any(|w| w[1].0 - w[0].0 < crate::ATOM_MERGE_TOL)
        {
            return Err(KrigingError::InvalidProblem(
                "duplicate observation locations".into(),
            ));
        }
        let (obs_t, obs_x) = pairs.into_iter().unzip();
        Ok(KrigingProblem {
            obs_t,
            obs_x,
            d,
            icf,
            nugget,
        })
    }

    pub fn obs_t(&self) -> &[f64] {
        &self.obs_t
    }

    pub fn obs_x(&self) -> &[f64] {
        &self.obs_x
    }

    pub fn drift_order(&self) -> usize {
        self.d
    }

    pub fn icf(&self) -> &IntrinsicCovariance {
        &self.icf
    }

    pub fn nugget(&self) -> f64 {
        self.nugget
    }

    /// Copy of the problem with every location (and later every target)
    /// translated by `h`.
    pub fn shifted(&self, h: f64) -> KrigingProblem {
        KrigingProblem {
            obs_t: self.obs_t.iter().map(|t| t + h).collect(),
            ..self.clone()
        }
    }
}

/// Assembled kriging system for one target location.
#[derive(Debug, Clone)]
pub struct KrigingSystem {
    /// `psi[i][j] = K(t_i - t_j)`.
    pub psi: DMatrix<f64>,
    /// `phi[i] = K(t_i - t0)`.
    pub phi: DVector<f64>,
    /// Drift design, row i = `(1, t_i, ..., t_i^{d-1})`.
    pub q: DMatrix<f64>,
    /// Drift basis at the target, `(1, t0, ..., t0^{d-1})`.
    pub q0: DVector<f64>,
    /// `K(0)`.
    pub k0: f64,
}

/// Build the system exactly as written: monomials in the raw coordinates.
/// [`predict`] re-centers coordinates first, which leaves the weights
/// unchanged but keeps the drift block well conditioned.
pub fn build_system(p: &KrigingProblem, t0: f64) -> Result<KrigingSystem, KrigingError> {
    let n = p.obs_t.len();
    let d = p.d;
    let mut psi = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            psi[(i, j)] = p.icf.eval(p.obs_t[i] - p.obs_t[j])?;
        }
    }
    let mut phi = DVector::zeros(n);
    for i in 0..n {
        phi[i] = p.icf.eval(p.obs_t[i] - t0)?;
    }
    let q = DMatrix::from_fn(n, d, |i, j| monomial(p.obs_t[i], j));
    let q0 = DVector::from_fn(d, |j, _| monomial(t0, j));
    Ok(KrigingSystem {
        psi,
        phi,
        q,
        q0,
        k0: p.icf.eval(0.0)?,
    })
}

fn monomial(t: f64, j: usize) -> f64 {
    if j == 0 {
        1.0
    } else {
        t.powi(j as i32)
    }
}

/// Closed-form weights
/// `eta = A^{-1} [phi + Q {Q^T A^{-1} Q}^{-1} {q0 - Q^T A^{-1} phi}]`
/// with `A = Psi + nugget*I`, computed through an LU of `A` and an LU of the
/// small drift block. If `A` fails to factor, a single jitter of
/// `1e-10 * K(0)` is added to its diagonal before giving up.
pub fn solve_closed_form(sys: &KrigingSystem, nugget: f64) -> Result<DVector<f64>, KrigingError> {
    let n = sys.psi.nrows();
    let mut a = sys.psi.clone();
    for i in 0..n {
        a[(i, i)] += nugget;
    }

    let solve_all = |a: &DMatrix<f64>| -> Option<(DVector<f64>, DMatrix<f64>)> {
        let lu = a.clone().lu();
        let x_phi = lu.solve(&sys.phi)?;
        let x_q = lu.solve(&sys.q)?;
        Some((x_phi, x_q))
    };

    let (x_phi, x_q) = match solve_all(&a) {
        Some(sol) => sol,
        None => {
            let jitter = 1e-10 * sys.k0.abs();
            let mut a2 = a;
            for i in 0..n {
                a2[(i, i)] += jitter;
            }
            solve_all(&a2).ok_or(KrigingError::SingularSystem { block: "psi" })?
        }
    };

    let small = sys.q.transpose() * &x_q;
    let rhs = &sys.q0 - sys.q.transpose() * &x_phi;
    let s = small
        .lu()
        .solve(&rhs)
        .ok_or(KrigingError::SingularSystem { block: "drift" })?;
    Ok(x_phi + x_q * s)
}

/// Independent oracle: one dense LU solve of the symmetric augmented system
/// `[[Psi + nugget*I, Q], [Q^T, 0]] (eta, rho) = (phi, q0)`.
pub fn solve_kkt(
    sys: &KrigingSystem,
    nugget: f64,
) -> Result<(DVector<f64>, DVector<f64>), KrigingError> {
    let n = sys.psi.nrows();
    let d = sys.q.ncols();
    let mut kkt = DMatrix::zeros(n + d, n + d);
    for i in 0..n {
        for j in 0..n {
            kkt[(i, j)] = sys.psi[(i, j)];
        }
        kkt[(i, i)] += nugget;
        for j in 0..d {
            kkt[(i, n + j)] = sys.q[(i, j)];
            kkt[(n + j, i)] = sys.q[(i, j)];
        }
    }
    let mut rhs = DVector::zeros(n + d);
    for i in 0..n {
        rhs[i] = sys.phi[i];
    }
    for j in 0..d {
        rhs[n + j] = sys.q0[j];
    }
    let sol = kkt
        .lu()
        .solve(&rhs)
        .ok_or(KrigingError::SingularSystem { block: "kkt" })?;
    Ok((
        DVector::from_iterator(n, sol.iter().take(n).copied()),
        DVector::from_iterator(d, sol.iter().skip(n).copied()),
    ))
}

/// The prediction-error objective
/// `M(eta) = nugget*eta'eta + eta'Psi eta - 2 eta'phi + K(0) + 2(eta'Q - q0')rho`;
/// the multiplier term vanishes at any feasible point.
pub fn objective(sys: &KrigingSystem, nugget: f64, eta: &DVector<f64>, rho: &DVector<f64>) -> f64 {
    let quad = (eta.transpose() * &sys.psi * eta)[(0, 0)];
    let cross = eta.dot(&sys.phi);
    let feas = (sys.q.transpose() * eta) - &sys.q0;
    nugget * eta.dot(eta) + quad - 2.0 * cross + sys.k0 + 2.0 * feas.dot(rho)
}

/// Weights, multipliers, prediction and kriging variance at one target.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KrigingSolution {
    pub weights: Vec<f64>,
    pub multipliers: Vec<f64>,
    pub prediction: f64,
    pub kriging_variance: f64,
}

/// Predict at `t0` with the closed-form solver on re-centered coordinates.
/// The returned variance is the objective at the solution (its constraint
/// term is zero there by feasibility).
pub fn predict(p: &KrigingProblem, t0: f64) -> Result<KrigingSolution, KrigingError> {
    let center: f64 = p.obs_t.iter().sum::<f64>() / p.obs_t.len() as f64;
    let centered = p.shifted(-center);
    let sys = build_system(&centered, t0 - center)?;
    let eta = solve_closed_form(&sys, p.nugget)?;

    // Feasibility of the drift constraints, relative to the target basis.
    let feas = (sys.q.transpose() * &eta) - &sys.q0;
    let q0_scale = 1.0 + sys.q0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let worst = feas.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if worst > 1e-8 * q0_scale {
        return Err(KrigingError::ConstraintResidual { residual: worst });
    }

    // Multipliers from the stationarity condition A eta + Q rho = phi.
    let n = sys.psi.nrows();
    let mut a = sys.psi.clone();
    for i in 0..n {
        a[(i, i)] += p.nugget;
    }
    let resid = &sys.phi - &a * &eta;
    let qtq = sys.q.transpose() * &sys.q;
    let rho = qtq
        .lu()
        .solve(&(sys.q.transpose() * resid))
        .ok_or(KrigingError::SingularSystem { block: "drift" })?;

    let prediction = eta.iter().zip(&p.obs_x).map(|(w, x)| w * x).sum::<f64>();
    let kriging_variance = objective(&sys, p.nugget, &eta, &DVector::zeros(sys.q.ncols()));
    // The objective at the optimum is a prediction-error variance; anything
    // more negative than rounding on the system's scale means the solve went
    // wrong. K(0) alone is no scale for generalized covariances (it is zero
    // for the Brownian kernel), so the whole matrix magnitude enters.
    let psi_scale = sys.psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if kriging_variance < -1e-8 * (1.0 + sys.k0.abs() + psi_scale) {
        return Err(KrigingError::NegativeVariance {
            value: kriging_variance,
        });
    }
    Ok(KrigingSolution {
        weights: eta.iter().copied().collect(),
        multipliers: rho.iter().copied().collect(),
        prediction,
        kriging_variance,
    })
}
