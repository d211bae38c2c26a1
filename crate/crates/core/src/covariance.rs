//! Intrinsic (generalized) covariance kernels. A kernel `K` of order `d`
//! reproduces the covariance of any two allowable images as a double sum
//! over the measures, and the classical structure function is recovered by
//! applying the binomial difference weights on both sides.
//!
//! The kernel is a single fixed representative: since it is only ever
//! contracted against allowable measures, the usual equivalence class of
//! generalized covariances modulo even polynomials never shows up.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::{binomial, Measure, MeasureError};
use crate::spectral::{theoretical_stationary_cov, FrequencyGrid, SpectralModel};
use crate::TOL_ANNIHILATION;

#[derive(Debug, Error)]
pub enum CovarianceError {
    #[error("invalid kernel: {0}")]
    BadKernel(String),
    #[error("tabulated kernel queried at |h| = {h}, beyond its last knot {max}")]
    TabulatedRange { h: f64, max: f64 },
    #[error("measure {which} is not allowable at the kernel's order {order}")]
    NotAllowable { which: &'static str, order: usize },
    #[error("matrix is not symmetric at ({i},{j}): {a} vs {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// An evaluable stationary kernel `K(h)` together with the order of the
/// measures it is valid for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IntrinsicCovariance {
    /// Generalized covariance of Brownian motion with diffusion constant C:
    /// `K(h) = -C|h|/2`. Contracting it against measures that annihilate
    /// constants reproduces `C min{|t|,|s|}` covariances exactly.
    Brownian {
        #[serde(rename = "C")]
        c: f64,
    },
    /// Stationary covariance of the induced density `f_y(w)/w^{2d}` by
    /// quadrature on the given grid.
    FromSpectral {
        model: SpectralModel,
        fgrid: FrequencyGrid,
    },
    /// Linear interpolation between knots on `|h|`; refuses extrapolation.
    /// Knots must start at 0 so the kernel is even by construction.
    Tabulated {
        h: Vec<f64>,
        #[serde(rename = "K")]
        k: Vec<f64>,
        #[serde(default)]
        order: usize,
    },
}

impl IntrinsicCovariance {
    pub fn brownian(c: f64) -> Result<Self, CovarianceError> {
        if !(c > 0.0) {
            return Err(CovarianceError::BadKernel(format!(
                "brownian constant must be positive, got {c}"
            )));
        }
        Ok(IntrinsicCovariance::Brownian { c })
    }

    pub fn from_spectral(model: SpectralModel, fgrid: FrequencyGrid) -> Self {
        IntrinsicCovariance::FromSpectral { model, fgrid }
    }

    pub fn tabulated(h: Vec<f64>, k: Vec<f64>, order: usize) -> Result<Self, CovarianceError> {
        let kernel = IntrinsicCovariance::Tabulated { h, k, order };
        kernel.validate()?;
        Ok(kernel)
    }

    pub fn validate(&self) -> Result<(), CovarianceError> {
        match self {
            IntrinsicCovariance::Brownian { c } => {
                if !(*c > 0.0) {
                    return Err(CovarianceError::BadKernel(format!(
                        "brownian constant must be positive, got {c}"
                    )));
                }
            }
            IntrinsicCovariance::FromSpectral { .. } => {}
            IntrinsicCovariance::Tabulated { h, k, .. } => {
                if h.len() != k.len() || h.len() < 2 {
                    return Err(CovarianceError::BadKernel(
                        "tabulated kernel needs matching h/K arrays with at least 2 knots".into(),
                    ));
                }
                if h[0] != 0.0 {
                    return Err(CovarianceError::BadKernel(
                        "tabulated knots must start at h = 0".into(),
                    ));
                }
                if h.windows(2).any(|w| !(w[1] > w[0])) || h.iter().chain(k).any(|v| !v.is_finite())
                {
                    return Err(CovarianceError::BadKernel(
                        "tabulated knots must be finite and strictly increasing".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Order of measures the kernel is declared for (0 = unconstrained).
    pub fn order(&self) -> usize {
        match self {
            IntrinsicCovariance::Brownian { .. } => 1,
            IntrinsicCovariance::FromSpectral { model, .. } => model.order(),
            IntrinsicCovariance::Tabulated { order, .. } => *order,
        }
    }

    /// Evaluate `K(h)`.
    pub fn eval(&self, h: f64) -> Result<f64, CovarianceError> {
        match self {
            IntrinsicCovariance::Brownian { c } => Ok(-0.5 * c * h.abs()),
            IntrinsicCovariance::FromSpectral { model, fgrid } => Ok(theoretical_stationary_cov(
                |w| model.induced_density(w),
                fgrid,
                h,
            )),
            IntrinsicCovariance::Tabulated { h: knots, k, .. } => {
                let x = h.abs();
                let last = *knots.last().expect("validated: at least 2 knots");
                if x > last {
                    return Err(CovarianceError::TabulatedRange { h: x, max: last });
                }
                let idx = knots.partition_point(|&kn| kn <= x);
                if idx == knots.len() {
                    return Ok(*k.last().expect("validated"));
                }
                let (x0, x1) = (knots[idx - 1], knots[idx]);
                let (y0, y1) = (k[idx - 1], k[idx]);
                Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
            }
        }
    }
}

/// `Cov(X(l1), X(l2)) = sum_i sum_j w1_i w2_j K(x1_i - x2_j)`. Both measures
/// must be allowable at the kernel's declared order, otherwise the value
/// would pick up drift.
pub fn cov_between_measures(
    kernel: &IntrinsicCovariance,
    l1: &Measure,
    l2: &Measure,
) -> Result<f64, CovarianceError> {
    let order = kernel.order();
    if order > 0 {
        if !l1.is_allowable(order, TOL_ANNIHILATION)?.allowable {
            return Err(CovarianceError::NotAllowable {
                which: "first",
                order,
            });
        }
        if !l2.is_allowable(order, TOL_ANNIHILATION)?.allowable {
            return Err(CovarianceError::NotAllowable {
                which: "second",
                order,
            });
        }
    }
    let mut acc = 0.0;
    for &(x1, w1) in l1.atoms() {
        for &(x2, w2) in l2.atoms() {
            acc += w1 * w2 * kernel.eval(x1 - x2)?;
        }
    }
    Ok(acc)
}

/// Covariance of Brownian motion itself: `C min{|t|,|s|}` when `t` and `s`
/// lie on the same side of the origin, zero otherwise.
pub fn brownian_cov(t: f64, s: f64, c: f64) -> f64 {
    assert!(c > 0.0, "diffusion constant must be positive");
    if t * s < 0.0 {
        0.0
    } else {
        c * t.abs().min(s.abs())
    }
}

/// Structure function expressed through the kernel: the double binomial sum
/// `sum_{k1,k2} (-1)^{k1+k2} C(d,k1) C(d,k2) K(tau - k1*iota1 + k2*iota2)`.
///
/// Terms accumulate with `k1`, `k2` descending, which is the atom order of
/// the corresponding difference measures; on offsets that are exact in
/// floating point this makes the sum bitwise equal to
/// [`cov_between_measures`] on those measures.
pub fn structure_from_icf(
    kernel: &IntrinsicCovariance,
    d: usize,
    iota1: f64,
    iota2: f64,
    tau: f64,
) -> Result<f64, CovarianceError> {
    assert!(d >= 1, "structure function needs order d >= 1");
    let mut acc = 0.0;
    for k1 in (0..=d).rev() {
        let s1 = if k1 % 2 == 0 { 1.0 } else { -1.0 };
        let c1 = binomial(d, k1);
        for k2 in (0..=d).rev() {
            let s2 = if k2 % 2 == 0 { 1.0 } else { -1.0 };
            let c2 = binomial(d, k2);
            let offset = tau - k1 as f64 * iota1 + k2 as f64 * iota2;
            acc += s1 * s2 * c1 * c2 * kernel.eval(offset)?;
        }
    }
    Ok(acc)
}

/// The Brownian variogram `E[(X(t) - X(t-iota))^2] = C|iota|`.
pub fn variogram_brownian(iota: f64, c: f64) -> f64 {
    assert!(c > 0.0, "diffusion constant must be positive");
    c * iota.abs()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsdReport {
    pub psd: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Check a symmetric Gram matrix for positive semi-definiteness: smallest
/// eigenvalue at least `-1e-8` times the largest.
pub fn psd_check(matrix: &DMatrix<f64>) -> Result<PsdReport, CovarianceError> {
    assert_eq!(matrix.nrows(), matrix.ncols(), "matrix must be square");
    let scale = matrix.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    for i in 0..matrix.nrows() {
        for j in (i + 1)..matrix.ncols() {
            if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-10 * scale {
                return Err(CovarianceError::Asymmetric {
                    i,
                    j,
                    a: matrix[(i, j)],
                    b: matrix[(j, i)],
                });
            }
        }
    }
    let sym = (matrix + matrix.transpose()) * 0.5;
    let eigen = sym.symmetric_eigen();
    let min = eigen
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let max = eigen
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(PsdReport {
        psd: min >= -1e-8 * max,
        min_eigenvalue: min,
        max_eigenvalue: max,
    })
}
