//! Reference fixed-point iterations used to cross-check the trackers.
//!
//! Both are reconstructions of the standard published forms: the NQZ power
//! method for the largest H-eigenvalue of a nonnegative tensor, and the
//! shifted symmetric higher-order power method (SS-HOPM) for Z-eigenpairs
//! of symmetric tensors. Each iteration costs one `A x^{m-1}` evaluation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homotopy::EigenKind;
use crate::tensor::{dot, norm, vec_power, DenseTensor, Symmetry};
use crate::tracker::EigenPair;

/// Evaluation cap used for the baseline comparisons.
pub const DEFAULT_MAX_EVAL: usize = 2000;

#[derive(Debug, Clone, Serialize)]
pub struct IterationReport {
    pub pair: EigenPair,
    pub evaluations: usize,
    pub converged: bool,
    pub iterations: usize,
    /// NQZ: bracket width `λ̄ - λ_` per iteration. SS-HOPM: objective
    /// `A x^m` per iteration.
    #[serde(skip)]
    pub history: Vec<f64>,
}

fn normalized(x: &[f64]) -> Option<Vec<f64>> {
    let nrm = norm(x);
    (nrm > 1e-300 && nrm.is_finite()).then(|| x.iter().map(|v| v / nrm).collect())
}

/// NQZ power iteration. Stops once `‖A x^{m-1} - λ x^{[m-1]}‖ < tol` with λ
/// the midpoint of the bracket `[min_i y_i / x_i^{m-1}, max_i y_i / x_i^{m-1}]`.
pub fn nqz(a: &DenseTensor, x_init: &[f64], tol: f64, max_eval: usize) -> Result<IterationReport> {
    a.require_nonnegative()?;
    if x_init.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: x_init.len() });
    }
    if x_init.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidInput("NQZ needs a strictly positive start".into()));
    }
    let p = a.order() as i32 - 1;
    let mut x = normalized(x_init).expect("positive vector");
    let mut evaluations = 0;
    let mut history = Vec::new();
    let mut restarted = false;
    let mut lambda = 0.0;
    let mut converged = false;

    while evaluations < max_eval {
        let y = a.apply(&x)?;
        evaluations += 1;
        let (lo, hi) = y.iter().zip(&x).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (yi, xi)| {
            let r = yi / xi.powi(p);
            (lo.min(r), hi.max(r))
        });
        lambda = 0.5 * (lo + hi);
        history.push(hi - lo);
        let res: f64 = y.iter().zip(&x).map(|(yi, xi)| (yi - lambda * xi.powi(p)).powi(2)).sum::<f64>().sqrt();
        if res < tol {
            converged = true;
            break;
        }
        let next = vec_power(&y, 1.0 / f64::from(p))?;
        match normalized(&next).filter(|v| v.iter().all(|c| *c > 0.0)) {
            Some(v) => x = v,
            None if !restarted => {
                restarted = true;
                let bumped: Vec<f64> = next.iter().map(|v| v.max(0.0) + 1e-3).collect();
                x = normalized(&bumped).expect("positive vector");
            }
            None => {
                return Err(Error::Anomaly("NQZ iterate lost positivity twice".into()));
            }
        }
    }
    let iterations = history.len();
    let pair = EigenPair::from_target(a, EigenKind::H, x, lambda)?;
    Ok(IterationReport { pair, evaluations, converged, iterations, history })
}

/// SS-HOPM: `x ← (A x^{m-1} + α x) / ‖A x^{m-1} + α x‖`, `λ = xᵀ A x^{m-1}`,
/// stopping once `‖A x^{m-1} - λ x‖ < tol`.
pub fn sshopm(a: &DenseTensor, alpha: f64, x_init: &[f64], tol: f64, max_eval: usize) -> Result<IterationReport> {
    if a.symmetry() != Symmetry::Symmetric {
        return Err(Error::InvalidInput("SS-HOPM needs a symmetric tensor".into()));
    }
    if x_init.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: x_init.len() });
    }
    let mut x = normalized(x_init).ok_or_else(|| Error::InvalidInput("zero start vector".into()))?;
    let mut evaluations = 0;
    let mut history = Vec::new();
    let mut lambda = 0.0;
    let mut converged = false;

    while evaluations < max_eval {
        let y = a.apply(&x)?;
        evaluations += 1;
        lambda = dot(&x, &y);
        history.push(lambda);
        let res: f64 = y.iter().zip(&x).map(|(yi, xi)| (yi - lambda * xi).powi(2)).sum::<f64>().sqrt();
        if res < tol {
            converged = true;
            break;
        }
        let shifted: Vec<f64> = y.iter().zip(&x).map(|(yi, xi)| yi + alpha * xi).collect();
        match normalized(&shifted) {
            Some(v) => x = v,
            None => break,
        }
    }
    let iterations = history.len();
    let pair = EigenPair::from_target(a, EigenKind::Z, x, lambda)?;
    Ok(IterationReport { pair, evaluations, converged, iterations, history })
}

/// Shift that guarantees monotone SS-HOPM on `D + w C` for the 4th-order
/// cyclic hypergraph Laplacian: `72 (1 + w)`.
pub fn shift_bound_gamma(w: f64) -> f64 {
    72.0 * (1.0 + w)
}
