//! Intrinsic random functions of order `d` and processes with stationary
//! increments of order `d` on the real line, treated as one toolkit:
//!
//! - [`measure`]: finite discrete allowable measures, the objects that
//!   annihilate polynomial drift of degree `< d`.
//! - [`process`]: gridded sample paths, the alternating-binomial differencing
//!   operator, polynomial trends and empirical structure functions.
//! - [`spectral`]: spectral densities of the differenced process, harmonic
//!   synthesis of sample paths from the truncated-exponential kernel, and
//!   quadrature of theoretical covariances and structure functions.
//! - [`covariance`]: intrinsic (generalized) covariance kernels, the Brownian
//!   closed forms, and the bridge from kernels to structure functions.
//! - [`kriging`]: universal kriging with polynomial drift, solved both in
//!   closed form and through the augmented KKT system.
//! - [`equivalence`]: a seeded Monte Carlo harness that checks shift
//!   invariance of measure images against stationarity of differenced paths,
//!   with negative controls.
//!
//! All values are immutable after construction and every operation is a pure
//! function of its inputs (plus an explicit seed where randomness is
//! involved), so results are reproducible bit for bit.
//!
//! ```
//! use irf_core::measure::finite_difference_measure;
//!
//! // The order-2 difference measure annihilates constants and linears but
//! // not quadratics.
//! let m = finite_difference_measure(2, 1.0, 0.0);
//! assert_eq!(m.apply(|_| 1.0).unwrap(), 0.0);
//! assert_eq!(m.apply(|x| x).unwrap(), 0.0);
//! assert_eq!(m.apply(|x| x * x).unwrap(), 2.0);
//! ```

pub mod covariance;
pub mod equivalence;
pub mod io;
pub mod kriging;
pub mod measure;
pub mod process;
pub mod spectral;

pub use covariance::IntrinsicCovariance;
pub use kriging::{KrigingProblem, KrigingSolution};
pub use measure::Measure;
pub use process::{PolynomialTrend, SampledPath, TimeGrid};
pub use spectral::{DensityFamily, FrequencyGrid, SpectralModel};

/// Relative tolerance below which a polynomial-annihilation defect counts
/// as zero. Defects are normalized by a coordinate-aware scale so large
/// supports do not trip false failures.
pub const TOL_ANNIHILATION: f64 = 1e-10;

/// Atoms closer than this in location are merged into a single atom.
pub const ATOM_MERGE_TOL: f64 = 1e-12;
