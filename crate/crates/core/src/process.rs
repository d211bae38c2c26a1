//! Uniformly gridded sample paths, the alternating-binomial differencing
//! operator, polynomial trends, and the replicate-based empirical structure
//! function estimator.
//!
//! Grids are uniform by construction and the differencing lag is restricted
//! to integer multiples of the grid step, so no operation ever interpolates.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::{binomial, Measure};

#[derive(Debug, Error)]
pub enum PathError {
    #[error("path needs at least one value")]
    Empty,
    #[error("grid step must be positive and finite, got {dt}")]
    BadStep { dt: f64 },
    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },
    #[error("path of length {len} is too short: operation needs more than {needed} points")]
    TooShort { len: usize, needed: usize },
    #[error("measure atom at {location} is off the path grid (nearest grid point {nearest})")]
    OffGridAtom { location: f64, nearest: f64 },
    #[error("empty replicate set")]
    NoReplicates,
    #[error("replicates disagree in grid or length")]
    MismatchedReplicates,
    #[error("lag {lag} exceeds differenced length {len}")]
    LagTooLarge { lag: i64, len: usize },
    #[error("polynomial fit needs at least {needed} samples, got {got}")]
    FitUnderdetermined { needed: usize, got: usize },
}

/// Uniform time grid: `t_j = t0 + j*dt` for `j = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.time(j))
    }
}

/// Provenance carried along with a path.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PathMeta {
    pub order_d: usize,
    pub seed: Option<u64>,
    pub model_id: Option<String>,
}

/// A realization of a process on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
    meta: PathMeta,
}

impl SampledPath {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>, meta: PathMeta) -> Result<Self, PathError> {
        if values.is_empty() {
            return Err(PathError::Empty);
        }
        if !(dt > 0.0) || !dt.is_finite() || !t0.is_finite() {
            return Err(PathError::BadStep { dt });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(PathError::NonFiniteValue { index });
        }
        Ok(SampledPath {
            t0,
            dt,
            values,
            meta,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn meta(&self) -> &PathMeta {
        &self.meta
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid {
            t0: self.t0,
            dt: self.dt,
            n: self.values.len(),
        }
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    /// Apply the d-th difference with lag `iota = m*dt`:
    /// `out[j] = sum_k (-1)^k C(d,k) x[j - k*m]`, re-anchored so the output
    /// grid starts at `t0 + d*m*dt`. The claimed order drops by `d`.
    pub fn difference(&self, d: usize, m: usize) -> Result<SampledPath, PathError> {
        assert!(m >= 1, "lag multiplier must be at least 1");
        let n = self.values.len();
        let span = d * m;
        if n <= span {
            return Err(PathError::TooShort {
                len: n,
                needed: span,
            });
        }
        if d == 0 {
            return Ok(self.clone());
        }
        let weights: Vec<f64> = (0..=d)
            .map(|k| {
                if k % 2 == 0 {
                    binomial(d, k)
                } else {
                    -binomial(d, k)
                }
            })
            .collect();
        let out: Vec<f64> = (span..n)
            .map(|j| {
                weights
                    .iter()
                    .enumerate()
                    .map(|(k, w)| w * self.values[j - k * m])
                    .sum()
            })
            .collect();
        Ok(SampledPath {
            t0: self.t0 + span as f64 * self.dt,
            dt: self.dt,
            values: out,
            meta: PathMeta {
                order_d: self.meta.order_d.saturating_sub(d),
                ..self.meta.clone()
            },
        })
    }

    /// Grid index of a location, or an error if it is off-grid by more than
    /// `1e-9 * dt` or outside the sampled range.
    pub fn grid_index(&self, location: f64) -> Result<usize, PathError> {
        let raw = (location - self.t0) / self.dt;
        let idx = raw.round();
        let nearest = self.t0 + idx * self.dt;
        if (location - nearest).abs() > 1e-9 * self.dt
            || idx < 0.0
            || idx >= self.values.len() as f64
        {
            return Err(PathError::OffGridAtom { location, nearest });
        }
        Ok(idx as usize)
    }
}

/// Image of the path under a discrete measure, `sum w_i x(x_i)`; every atom
/// must sit on the grid (no interpolation).
pub fn apply_measure_to_path(m: &Measure, path: &SampledPath) -> Result<f64, PathError> {
    let mut acc = 0.0;
    for &(x, w) in m.atoms() {
        acc += w * path.values()[path.grid_index(x)?];
    }
    Ok(acc)
}

/// Polynomial in the monomial basis, low degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialTrend {
    coefficients: Vec<f64>,
}

impl PolynomialTrend {
    pub fn new(coefficients: Vec<f64>) -> Self {
        PolynomialTrend { coefficients }
    }

    pub fn zero() -> Self {
        PolynomialTrend {
            coefficients: Vec::new(),
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Degree of the highest nonzero coefficient; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coefficients
            .iter()
            .rposition(|&c| c != 0.0)
            .unwrap_or(0)
    }

    /// Horner evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * t + c)
    }

    /// Least-squares fit of a polynomial of the given degree. Solved through
    /// an SVD of the Vandermonde design, which keeps residuals reliable even
    /// when the monomial basis is poorly conditioned.
    pub fn fit(ts: &[f64], values: &[f64], degree: usize) -> Result<Self, PathError> {
        assert_eq!(ts.len(), values.len(), "sample lengths must match");
        if ts.len() < degree + 1 {
            return Err(PathError::FitUnderdetermined {
                needed: degree + 1,
                got: ts.len(),
            });
        }
        let design = nalgebra::DMatrix::from_fn(ts.len(), degree + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                ts[i].powi(j as i32)
            }
        });
        let rhs = nalgebra::DVector::from_column_slice(values);
        let svd = design.svd(true, true);
        let coef = svd
            .solve(&rhs, 1e-13)
            .expect("svd.solve is infallible when U and V are computed");
        Ok(PolynomialTrend {
            coefficients: coef.iter().copied().collect(),
        })
    }
}

/// One lag of the empirical structure function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LagEstimate {
    /// Lag in grid steps.
    pub lag_steps: i64,
    /// Lag in time units, `lag_steps * dt`.
    pub lag: f64,
    pub estimate: f64,
    /// Between-replicate standard error (0 when there is one replicate).
    pub std_error: f64,
    pub n_replicates: usize,
}

/// Estimate `E[ (D^d x)(t+h) (D^d x)(t) ]` at the requested lags, averaging
/// over time within each replicate and then over replicates. Standard errors
/// come from between-replicate variation only; within-path terms are
/// dependent and would understate the uncertainty.
pub fn empirical_structure_function(
    paths: &[SampledPath],
    d: usize,
    m: usize,
    lags: &[i64],
) -> Result<Vec<LagEstimate>, PathError> {
    if paths.is_empty() {
        return Err(PathError::NoReplicates);
    }
    let dt = paths[0].dt();
    let len = paths[0].len();
    for p in paths {
        if (p.dt() - dt).abs() > 1e-9 * dt || p.len() != len {
            return Err(PathError::MismatchedReplicates);
        }
    }
    let differenced: Vec<SampledPath> = paths
        .iter()
        .map(|p| p.difference(d, m))
        .collect::<Result<_, _>>()?;
    let dlen = differenced[0].len();
    for &lag in lags {
        if lag.unsigned_abs() as usize >= dlen {
            return Err(PathError::LagTooLarge { lag, len: dlen });
        }
    }

    let reps = differenced.len();
    let mut out = Vec::with_capacity(lags.len());
    for &lag in lags {
        let offset = lag.unsigned_abs() as usize;
        let means: Vec<f64> = differenced
            .iter()
            .map(|p| {
                let y = p.values();
                let count = y.len() - offset;
                let sum: f64 = (0..count).map(|j| y[j + offset] * y[j]).sum();
                sum / count as f64
            })
            .collect();
        let estimate = means.iter().sum::<f64>() / reps as f64;
        let std_error = if reps >= 2 {
            let var = means.iter().map(|m| (m - estimate).powi(2)).sum::<f64>() / (reps - 1) as f64;
            (var / reps as f64).sqrt()
        } else {
            0.0
        };
        out.push(LagEstimate {
            lag_steps: lag,
            lag: lag as f64 * dt,
            estimate,
            std_error,
            n_replicates: reps,
        });
    }
    Ok(out)
}

/// Exact Brownian motion on a grid with `Cov(X(t), X(s)) = c*min(t,s)` for
/// `t0 >= 0`: the value at `t0` is `N(0, c*t0)` and increments are
/// independent `N(0, c*dt)`. Serves as an independent oracle for the
/// spectral machinery.
pub fn brownian_path(c: f64, grid: &TimeGrid, seed: u64) -> SampledPath {
    assert!(c > 0.0, "diffusion constant must be positive");
    assert!(grid.t0 >= 0.0, "grid must start at a nonnegative time");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut values = Vec::with_capacity(grid.n);
    let mut x = if grid.t0 > 0.0 {
        let z: f64 = normal.sample(&mut rng);
        z * (c * grid.t0).sqrt()
    } else {
        0.0
    };
    let step_sd = (c * grid.dt).sqrt();
    for j in 0..grid.n {
        if j > 0 {
            let z: f64 = normal.sample(&mut rng);
            x += z * step_sd;
        }
        values.push(x);
    }
    SampledPath::new(
        grid.t0,
        grid.dt,
        values,
        PathMeta {
            order_d: 1,
            seed: Some(seed),
            model_id: Some("brownian-exact".to_owned()),
        },
    )
    .expect("generated values are finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::finite_difference_measure;
    use approx::assert_abs_diff_eq;

    fn path(values: &[f64]) -> SampledPath {
        SampledPath::new(0.0, 1.0, values.to_vec(), PathMeta::default()).unwrap()
    }

    #[test]
    fn first_difference_of_arithmetic_sequence() {
        let p = path(&[1.0, 2.0, 3.0, 4.0]);
        let d = p.difference(1, 1).unwrap();
        assert_eq!(d.values(), &[1.0, 1.0, 1.0]);
        assert_eq!(d.t0(), 1.0);
    }

    #[test]
    fn second_difference_of_quadratic_is_constant() {
        let values: Vec<f64> = (0..10).map(|j| (j as f64).powi(2)).collect();
        let p = path(&values);
        let d = p.difference(2, 1).unwrap();
        for v in d.values() {
            assert_abs_diff_eq!(*v, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zeroth_difference_is_identity() {
        let p = path(&[3.0, 1.0, 4.0]);
        assert_eq!(p.difference(0, 1).unwrap(), p);
    }

    #[test]
    fn difference_needs_enough_points() {
        let p = path(&[1.0, 2.0]);
        assert!(matches!(
            p.difference(2, 1),
            Err(PathError::TooShort { .. })
        ));
    }

    #[test]
    fn trend_eval_examples() {
        assert_eq!(PolynomialTrend::new(vec![1.0, 2.0]).eval(3.0), 7.0);
        assert_eq!(PolynomialTrend::zero().eval(5.0), 0.0);
        assert_eq!(PolynomialTrend::new(vec![0.0, 0.0, 1.0]).eval(-2.0), 4.0);
    }

    #[test]
    fn measure_application_matches_difference() {
        let values: Vec<f64> = (0..12).map(|j| ((j * j + 3) % 7) as f64).collect();
        let p = path(&values);
        let diff = p.difference(1, 1).unwrap();
        let m = finite_difference_measure(1, 1.0, 5.0);
        let via_measure = apply_measure_to_path(&m, &p).unwrap();
        assert_eq!(via_measure, diff.values()[4]);
    }

    #[test]
    fn single_atom_measure_reads_one_value() {
        let p = path(&[10.0, 20.0, 30.0]);
        let m = Measure::new(vec![(2.0, 1.0)], 0).unwrap();
        assert_eq!(apply_measure_to_path(&m, &p).unwrap(), 30.0);
    }

    #[test]
    fn off_grid_atom_is_rejected() {
        let p = path(&[1.0, 2.0]);
        let m = Measure::new(vec![(0.5, 1.0)], 0).unwrap();
        assert!(matches!(
            apply_measure_to_path(&m, &p),
            Err(PathError::OffGridAtom { .. })
        ));
    }

    #[test]
    fn constant_paths_have_zero_structure_function() {
        let paths: Vec<SampledPath> = (0..4).map(|_| path(&[2.0; 32])).collect();
        let est = empirical_structure_function(&paths, 1, 1, &[0, 1, 3]).unwrap();
        for e in est {
            assert_eq!(e.estimate, 0.0);
            assert_eq!(e.std_error, 0.0);
        }
    }

    #[test]
    fn iid_noise_has_unit_lag0_moment() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(42);
        let paths: Vec<SampledPath> = (0..300)
            .map(|_| {
                let values: Vec<f64> = (0..200)
                    .map(|_| rand_distr::Distribution::sample(&StandardNormal, &mut rng))
                    .collect();
                path(&values)
            })
            .collect();
        let est = empirical_structure_function(&paths, 0, 1, &[0]).unwrap();
        assert!(
            (est[0].estimate - 1.0).abs() <= 3.0 * est[0].std_error,
            "estimate {} se {}",
            est[0].estimate,
            est[0].std_error
        );
    }

    #[test]
    fn brownian_variogram_is_linear_in_lag() {
        let c = 2.0;
        let grid = TimeGrid {
            t0: 0.0,
            dt: 0.05,
            n: 400,
        };
        let paths: Vec<SampledPath> = (0..250)
            .map(|r| brownian_path(c, &grid, 9000 + r))
            .collect();
        let est = empirical_structure_function(&paths, 1, 1, &[0]).unwrap();
        let expected = c * grid.dt;
        assert!(
            (est[0].estimate - expected).abs() <= 3.0 * est[0].std_error,
            "estimate {} expected {} se {}",
            est[0].estimate,
            expected,
            est[0].std_error
        );
    }

    #[test]
    fn lag_symmetry_is_exact() {
        let values: Vec<f64> = (0..64)
            .map(|j| (j as f64 * 0.7).sin() + 0.1 * j as f64)
            .collect();
        let paths = vec![path(&values)];
        let est = empirical_structure_function(&paths, 1, 1, &[5, -5]).unwrap();
        assert_eq!(est[0].estimate.to_bits(), est[1].estimate.to_bits());
    }

    #[test]
    fn lag_beyond_length_errors() {
        let paths = vec![path(&[1.0, 2.0, 3.0, 4.0])];
        assert!(matches!(
            empirical_structure_function(&paths, 1, 1, &[3]),
            Err(PathError::LagTooLarge { .. })
        ));
    }
}
