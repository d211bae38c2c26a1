//! Finite discrete signed measures on the real line and the allowability
//! check: a measure of order `d` annihilates every polynomial of degree
//! less than `d`. The alternating-binomial finite-difference measure is the
//! canonical member; arbitrary members through a given support are built by
//! null-space extraction from the moment system.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{ATOM_MERGE_TOL, TOL_ANNIHILATION};

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("measure must contain at least one atom")]
    Empty,
    #[error("all weights are zero after merging atoms")]
    AllWeightsZero,
    #[error("non-finite atom at position {index}: ({location}, {weight})")]
    NonFiniteAtom {
        index: usize,
        location: f64,
        weight: f64,
    },
    #[error("function evaluated to a non-finite value at location {location}")]
    NonFiniteEvaluation { location: f64 },
    #[error("moment sum overflowed at degree {degree}")]
    MomentOverflow { degree: usize },
    #[error(
        "measure claims order {order} but degree-{degree} defect {defect:e} exceeds tolerance"
    )]
    OrderNotSatisfied {
        order: usize,
        degree: usize,
        defect: f64,
    },
    #[error("need at least {needed} distinct support points for order {order}, got {got}")]
    InfeasibleSupport {
        needed: usize,
        got: usize,
        order: usize,
    },
    #[error("duplicate support points at locations {a} and {b}")]
    DuplicatePoints { a: f64, b: f64 },
    #[error("weights ({weights}) and observation points ({points}) differ in length")]
    LengthMismatch { weights: usize, points: usize },
}

/// Annihilation defect of a single polynomial degree, with the scale used
/// to normalize it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeDefect {
    pub degree: usize,
    /// Raw moment `sum w_i x_i^degree`.
    pub defect: f64,
    /// Normalizer `sum |w_i| max(1,|x_i|)^degree`.
    pub scale: f64,
    pub normalized: f64,
}

/// Result of checking a measure against an annihilation order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AllowabilityReport {
    pub order: usize,
    pub allowable: bool,
    pub tol: f64,
    pub defects: Vec<DegreeDefect>,
}

/// A finite discrete signed measure: weighted point masses at strictly
/// increasing locations, together with a claimed annihilation order
/// (0 means no polynomial constraint).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct Measure {
    atoms: Vec<(f64, f64)>,
    order: usize,
}

/// Wire form: `{"order": d, "atoms": [[x, w], ...]}`.
#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    order: usize,
    atoms: Vec<(f64, f64)>,
}

impl TryFrom<MeasureRepr> for Measure {
    type Error = MeasureError;
    fn try_from(repr: MeasureRepr) -> Result<Self, MeasureError> {
        Measure::new(repr.atoms, repr.order)
    }
}

impl From<Measure> for MeasureRepr {
    fn from(m: Measure) -> Self {
        MeasureRepr {
            order: m.order,
            atoms: m.atoms,
        }
    }
}

impl Measure {
    /// Build a measure from `(location, weight)` atoms. Atoms are sorted by
    /// location, atoms closer than [`ATOM_MERGE_TOL`] are summed into one,
    /// and the claimed `order` is verified against [`TOL_ANNIHILATION`].
    pub fn new(atoms: Vec<(f64, f64)>, order: usize) -> Result<Self, MeasureError> {
        if atoms.is_empty() {
            return Err(MeasureError::Empty);
        }
        for (i, &(x, w)) in atoms.iter().enumerate() {
            if !x.is_finite() || !w.is_finite() {
                return Err(MeasureError::NonFiniteAtom {
                    index: i,
                    location: x,
                    weight: w,
                });
            }
        }
        let mut atoms = atoms;
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match merged.last_mut() {
                Some(last) if (x - last.0).abs() < ATOM_MERGE_TOL => last.1 += w,
                _ => merged.push((x, w)),
            }
        }
        merged.retain(|&(_, w)| w != 0.0);
        if merged.is_empty() {
            return Err(MeasureError::AllWeightsZero);
        }

        let m = Measure {
            atoms: merged,
            order,
        };
        if order >= 1 {
            let report = m.is_allowable(order, TOL_ANNIHILATION)?;
            if !report.allowable {
                let worst = report
                    .defects
                    .iter()
                    .max_by(|a, b| a.normalized.total_cmp(&b.normalized))
                    .expect("order >= 1 implies at least one defect");
                return Err(MeasureError::OrderNotSatisfied {
                    order,
                    degree: worst.degree,
                    defect: worst.normalized,
                });
            }
        }
        Ok(m)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Claimed annihilation order (0 = unconstrained).
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Image of a function under the measure: `sum w_i f(x_i)`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64, MeasureError> {
        let mut acc = 0.0;
        for &(x, w) in &self.atoms {
            let v = f(x);
            if !v.is_finite() {
                return Err(MeasureError::NonFiniteEvaluation { location: x });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// Raw moment `sum w_i x_i^ell` (with `0^0 = 1`). Overflow is reported
    /// rather than returned as an infinity.
    pub fn annihilation_defect(&self, ell: usize) -> Result<f64, MeasureError> {
        let sum: f64 = self
            .atoms
            .iter()
            .map(|&(x, w)| w * pow_zero_safe(x, ell))
            .sum();
        if sum.is_finite() {
            Ok(sum)
        } else {
            Err(MeasureError::MomentOverflow { degree: ell })
        }
    }

    /// Check annihilation of all polynomial degrees below `d`, normalizing
    /// each defect by `sum |w_i| max(1,|x_i|)^ell`.
    pub fn is_allowable(&self, d: usize, tol: f64) -> Result<AllowabilityReport, MeasureError> {
        let mut defects = Vec::with_capacity(d);
        let mut allowable = true;
        for ell in 0..d {
            let defect = self.annihilation_defect(ell)?;
            let scale: f64 = self
                .atoms
                .iter()
                .map(|&(x, w)| w.abs() * x.abs().max(1.0).powi(ell as i32))
                .sum();
            let normalized = if scale > 0.0 {
                defect.abs() / scale
            } else {
                0.0
            };
            if normalized > tol {
                allowable = false;
            }
            defects.push(DegreeDefect {
                degree: ell,
                defect,
                scale,
                normalized,
            });
        }
        Ok(AllowabilityReport {
            order: d,
            allowable,
            tol,
            defects,
        })
    }

    /// Translate every atom by `h`; the annihilation order is preserved.
    pub fn shift(&self, h: f64) -> Measure {
        Measure {
            atoms: self.atoms.iter().map(|&(x, w)| (x + h, w)).collect(),
            order: self.order,
        }
    }

    /// Largest order (up to `len() - 1`) at which this measure passes
    /// [`Measure::is_allowable`] at [`TOL_ANNIHILATION`].
    pub fn detected_order(&self) -> usize {
        let max_d = self.atoms.len().saturating_sub(1);
        let mut order = 0;
        for d in 1..=max_d {
            match self.is_allowable(d, TOL_ANNIHILATION) {
                Ok(r) if r.allowable => order = d,
                _ => break,
            }
        }
        order
    }
}

/// `x^ell` with the convention `0^0 = 1`.
fn pow_zero_safe(x: f64, ell: usize) -> f64 {
    if ell == 0 {
        1.0
    } else {
        x.powi(ell as i32)
    }
}

/// Binomial coefficient as a float; exact for the small degrees used here.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// The alternating-binomial difference measure: atoms at `t - k*iota` with
/// weights `(-1)^k C(d,k)` for `k = 0..=d`. Its annihilation order is `d`.
pub fn finite_difference_measure(d: usize, iota: f64, t: f64) -> Measure {
    assert!(iota > 0.0, "differencing lag must be positive");
    let atoms: Vec<(f64, f64)> = (0..=d)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            (t - k as f64 * iota, sign * binomial(d, k))
        })
        .collect();
    Measure::new(atoms, d).expect("difference weights annihilate low-degree monomials")
}

/// Build an allowable measure of order `d` supported on the given points:
/// a unit-norm vector in the null space of the `d x n` moment system
/// `sum_i w_i x_i^ell = 0` for `ell < d`. The atom set, the residual pick,
/// and the sign normalization (first component of magnitude above 1e-12
/// made positive) are all deterministic, so identical inputs give bitwise
/// identical weights.
pub fn construct_allowable(points: &[f64], d: usize) -> Result<Measure, MeasureError> {
    let n = points.len();
    if d == 0 {
        return Err(MeasureError::InfeasibleSupport {
            needed: 1,
            got: n,
            order: 0,
        });
    }
    if n <= d {
        return Err(MeasureError::InfeasibleSupport {
            needed: d + 1,
            got: n,
            order: d,
        });
    }
    for (i, &x) in points.iter().enumerate() {
        if !x.is_finite() {
            return Err(MeasureError::NonFiniteAtom {
                index: i,
                location: x,
                weight: 0.0,
            });
        }
        for &y in &points[i + 1..] {
            if (x - y).abs() < ATOM_MERGE_TOL {
                return Err(MeasureError::DuplicatePoints { a: x, b: y });
            }
        }
    }

    // Orthonormal basis of the row space of the moment matrix (rows are
    // normalized monomial rows), by modified Gram-Schmidt with one
    // re-orthogonalization pass.
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    for ell in 0..d {
        let mut row: Vec<f64> = points.iter().map(|&x| pow_zero_safe(x, ell)).collect();
        normalize(&mut row);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&row, q);
                for (r, qi) in row.iter_mut().zip(q) {
                    *r -= c * qi;
                }
            }
        }
        normalize(&mut row);
        basis.push(row);
    }

    // Candidate null vectors: residuals of the canonical basis vectors
    // after projecting out the row space. The largest residual wins; ties
    // break toward the smallest index.
    let mut best: Option<(f64, Vec<f64>)> = None;
    for j in 0..n {
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if best.as_ref().is_none_or(|(b, _)| norm > *b) {
            best = Some((norm, v));
        }
    }
    let (norm, mut weights) = best.expect("n > d >= 1 so candidates exist");
    if norm < 1e-8 {
        // All residuals collapse only if the moment system has full column
        // coverage, which cannot happen for n > d with distinct points.
        return Err(MeasureError::InfeasibleSupport {
            needed: d + 1,
            got: n,
            order: d,
        });
    }
    for w in &mut weights {
        *w /= norm;
    }
    if let Some(first) = weights.iter().find(|w| w.abs() > 1e-12) {
        if *first < 0.0 {
            for w in &mut weights {
                *w = -*w;
            }
        }
    }

    Measure::new(points.iter().copied().zip(weights).collect(), d)
}

/// The universal-kriging error measure: atoms `(t_i, eta_i)` plus
/// `(t0, -1)`, with coincident locations merged. The order field records
/// the largest drift degree the merged measure actually annihilates.
pub fn kriging_measure(weights: &[f64], obs: &[f64], t0: f64) -> Result<Measure, MeasureError> {
    if weights.len() != obs.len() {
        return Err(MeasureError::LengthMismatch {
            weights: weights.len(),
            points: obs.len(),
        });
    }
    let mut atoms: Vec<(f64, f64)> = obs.iter().copied().zip(weights.iter().copied()).collect();
    atoms.push((t0, -1.0));
    let unordered = Measure::new(atoms, 0)?;
    let order = unordered.detected_order();
    Ok(Measure {
        atoms: unordered.atoms,
        order,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}
