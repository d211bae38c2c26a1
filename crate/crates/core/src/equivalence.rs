//! Monte Carlo harness for the equivalence between intrinsic shift
//! invariance and stationarity of differenced paths.
//!
//! Forward direction: images of an allowable measure under shifted copies
//! must have shift-independent means and lagged products. Reverse direction:
//! differenced paths windowed along time must look the same in every window.
//! The negative control injects a polynomial trend and applies a measure of
//! insufficient order, which must blow the statistics up.
//!
//! Decisions are standardized pairwise gaps (max |z| against a configured
//! threshold), not formal hypothesis tests: deterministic, explainable
//! pass/fail at desk scale.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::{Measure, MeasureError};
use crate::process::{apply_measure_to_path, PathError, PolynomialTrend, SampledPath, TimeGrid};
use crate::spectral::{FrequencyGrid, Spacing, SpectralError, SpectralModel, SpectralSynthesizer};
use crate::TOL_ANNIHILATION;

#[derive(Debug, Error)]
pub enum EquivalenceError {
    #[error("need at least 2 replicates, got {0}")]
    TooFewReplicates(usize),
    #[error("measure is not allowable at order {order}; use the negative control for that")]
    NotAllowable { order: usize },
    #[error("differenced paths leave {len} points, too short for {windows} windows with lags up to {max_lag}")]
    WindowsTooShort {
        len: usize,
        windows: usize,
        max_lag: usize,
    },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Simulation settings shared by the harness operations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub grid: TimeGrid,
    pub fgrid: FrequencyGrid,
    pub z_threshold: f64,
    /// Window count for the differenced-stationarity test.
    pub n_windows: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            grid: TimeGrid {
                t0: 0.0,
                dt: 1.0,
                n: 64,
            },
            fgrid: FrequencyGrid::new(1e-3, 50.0, 384, Spacing::Log)
                .expect("default harness grid is valid"),
            z_threshold: 4.0,
            n_windows: 4,
        }
    }
}

/// Group summary: one estimate per shift (or window start).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupStat {
    /// Shift h for invariance tests, window start time for windowed tests.
    pub label: f64,
    pub estimate: f64,
    pub std_error: f64,
}

/// One compared statistic: its per-group estimates and the largest
/// standardized pairwise gap among them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatisticReport {
    /// "mean" or "lag-cov".
    pub statistic: String,
    /// Lag for "lag-cov" statistics.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lag: Option<f64>,
    pub groups: Vec<GroupStat>,
    pub max_z: f64,
}

/// Verdict of one harness run; echoes the configuration that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub statistics: Vec<StatisticReport>,
    pub max_z: f64,
    pub z_threshold: f64,
    pub pass: bool,
    pub n_replicates: usize,
    pub seed: u64,
    pub config: HarnessConfig,
}

fn summarize(label: f64, per_replicate: &[f64]) -> GroupStat {
    let n = per_replicate.len();
    let estimate = per_replicate.iter().sum::<f64>() / n as f64;
    let std_error = if n >= 2 {
        let var = per_replicate
            .iter()
            .map(|v| (v - estimate).powi(2))
            .sum::<f64>()
            / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    GroupStat {
        label,
        estimate,
        std_error,
    }
}

fn max_pairwise_z(groups: &[GroupStat]) -> f64 {
    let mut max_z: f64 = 0.0;
    for i in 0..groups.len() {
        for j in (i + 1)..groups.len() {
            let gap = (groups[i].estimate - groups[j].estimate).abs();
            let denom = (groups[i].std_error.powi(2) + groups[j].std_error.powi(2)).sqrt();
            let z = if gap == 0.0 {
                0.0
            } else if denom == 0.0 {
                f64::INFINITY
            } else {
                gap / denom
            };
            max_z = max_z.max(z);
        }
    }
    max_z
}

fn finish(
    statistics: Vec<StatisticReport>,
    config: &HarnessConfig,
    n_replicates: usize,
    seed: u64,
) -> InvarianceReport {
    let max_z = statistics.iter().fold(0.0f64, |m, s| m.max(s.max_z));
    InvarianceReport {
        max_z,
        z_threshold: config.z_threshold,
        pass: max_z <= config.z_threshold,
        n_replicates,
        seed,
        statistics,
        config: config.clone(),
    }
}

/// Shared machinery for the shift-invariance direction: per replicate and
/// per shift, the image of the shifted measure; statistics are group means
/// and lagged products across shifts.
fn shift_statistics(
    paths: &[SampledPath],
    measure: &Measure,
    shifts: &[f64],
    lags: &[f64],
) -> Result<Vec<StatisticReport>, EquivalenceError> {
    let n_reps = paths.len();
    // images[s][r] = X_r(tau_{h_s} lambda); lagged[s][u][r] likewise at h+u.
    let mut images: Vec<Vec<f64>> = vec![vec![0.0; n_reps]; shifts.len()];
    let mut lagged: Vec<Vec<Vec<f64>>> = vec![vec![vec![0.0; n_reps]; lags.len()]; shifts.len()];
    for (s, &h) in shifts.iter().enumerate() {
        let shifted = measure.shift(h);
        for (r, path) in paths.iter().enumerate() {
            images[s][r] = apply_measure_to_path(&shifted, path)?;
        }
        for (u, &lag) in lags.iter().enumerate() {
            let far = measure.shift(h + lag);
            for (r, path) in paths.iter().enumerate() {
                lagged[s][u][r] = images[s][r] * apply_measure_to_path(&far, path)?;
            }
        }
    }

    let mut statistics = Vec::new();
    let mean_groups: Vec<GroupStat> = shifts
        .iter()
        .zip(&images)
        .map(|(&h, vals)| summarize(h, vals))
        .collect();
    statistics.push(StatisticReport {
        statistic: "mean".into(),
        lag: None,
        max_z: max_pairwise_z(&mean_groups),
        groups: mean_groups,
    });
    for (u, &lag) in lags.iter().enumerate() {
        let groups: Vec<GroupStat> = shifts
            .iter()
            .enumerate()
            .map(|(s, &h)| summarize(h, &lagged[s][u]))
            .collect();
        statistics.push(StatisticReport {
            statistic: "lag-cov".into(),
            lag: Some(lag),
            max_z: max_pairwise_z(&groups),
            groups,
        });
    }
    Ok(statistics)
}

/// Forward direction: for an allowable measure, the distribution of its
/// image must not depend on the shift. Requires the measure (and every
/// shifted copy) to land on the simulation grid.
pub fn shift_invariance_test(
    model: &SpectralModel,
    measure: &Measure,
    shifts: &[f64],
    lags: &[f64],
    n_reps: usize,
    seed: u64,
    config: &HarnessConfig,
) -> Result<InvarianceReport, EquivalenceError> {
    if n_reps < 2 {
        return Err(EquivalenceError::TooFewReplicates(n_reps));
    }
    let order = model.order();
    if order >= 1 && !measure.is_allowable(order, TOL_ANNIHILATION)?.allowable {
        return Err(EquivalenceError::NotAllowable { order });
    }
    let synth = SpectralSynthesizer::new(model, config.grid, &config.fgrid)?;
    let paths = synth.sample_many(seed, n_reps);
    let statistics = shift_statistics(&paths, measure, shifts, lags)?;
    Ok(finish(statistics, config, n_reps, seed))
}

/// Reverse direction: difference each simulated path `d` times at lag
/// `m * dt`, split into disjoint windows, and compare window means and
/// lag autocovariances across window positions.
pub fn differenced_stationarity_test(
    model: &SpectralModel,
    d: usize,
    m: usize,
    lags: &[usize],
    n_reps: usize,
    seed: u64,
    config: &HarnessConfig,
) -> Result<InvarianceReport, EquivalenceError> {
    if n_reps < 2 {
        return Err(EquivalenceError::TooFewReplicates(n_reps));
    }
    let synth = SpectralSynthesizer::new(model, config.grid, &config.fgrid)?;
    let paths = synth.sample_many(seed, n_reps);
    let differenced: Vec<SampledPath> = paths
        .iter()
        .map(|p| p.difference(d, m))
        .collect::<Result<_, _>>()?;

    let dlen = differenced[0].len();
    let windows = config.n_windows.max(3);
    let max_lag = lags.iter().copied().max().unwrap_or(0);
    let window_len = dlen / windows;
    if window_len < max_lag + 2 {
        return Err(EquivalenceError::WindowsTooShort {
            len: dlen,
            windows,
            max_lag,
        });
    }

    let window_mean = |y: &[f64], w: usize| -> f64 {
        let start = w * window_len;
        y[start..start + window_len].iter().sum::<f64>() / window_len as f64
    };
    let window_lag_product = |y: &[f64], w: usize, lag: usize| -> f64 {
        let start = w * window_len;
        let count = window_len - lag;
        (0..count)
            .map(|j| y[start + j + lag] * y[start + j])
            .sum::<f64>()
            / count as f64
    };

    let mut statistics = Vec::new();
    let labels: Vec<f64> = (0..windows)
        .map(|w| differenced[0].time(w * window_len))
        .collect();

    let mean_groups: Vec<GroupStat> = (0..windows)
        .map(|w| {
            let vals: Vec<f64> = differenced
                .iter()
                .map(|p| window_mean(p.values(), w))
                .collect();
            summarize(labels[w], &vals)
        })
        .collect();
    statistics.push(StatisticReport {
        statistic: "mean".into(),
        lag: None,
        max_z: max_pairwise_z(&mean_groups),
        groups: mean_groups,
    });

    for &lag in lags {
        let groups: Vec<GroupStat> = (0..windows)
            .map(|w| {
                let vals: Vec<f64> = differenced
                    .iter()
                    .map(|p| window_lag_product(p.values(), w, lag))
                    .collect();
                summarize(labels[w], &vals)
            })
            .collect();
        statistics.push(StatisticReport {
            statistic: "lag-cov".into(),
            lag: Some(lag as f64 * differenced[0].dt()),
            max_z: max_pairwise_z(&groups),
            groups,
        });
    }
    Ok(finish(statistics, config, n_reps, seed))
}

/// Falsifiability check: inject a deterministic polynomial trend and apply a
/// measure that does not annihilate it. The detector is the group MEAN: a
/// measure of insufficient order lets the trend leak into the mean of the
/// image, which then moves with the shift. The caller asserts that the
/// returned report FAILS; with a zero trend or a truly allowable measure it
/// passes.
pub fn negative_control(
    model: &SpectralModel,
    trend: &PolynomialTrend,
    measure: &Measure,
    shifts: &[f64],
    n_reps: usize,
    seed: u64,
    config: &HarnessConfig,
) -> Result<InvarianceReport, EquivalenceError> {
    if n_reps < 2 {
        return Err(EquivalenceError::TooFewReplicates(n_reps));
    }
    let synth =
        SpectralSynthesizer::new(model, config.grid, &config.fgrid)?.with_trend(trend.clone());
    let paths = synth.sample_many(seed, n_reps);
    let statistics = shift_statistics(&paths, measure, shifts, &[])?;
    Ok(finish(statistics, config, n_reps, seed))
}
