//! Linear homotopies `A(t) = (1-t) x1∘...∘x1 + t A` for the Z- and
//! H-eigenvalue systems, with their exact Jacobians.
//!
//! State vectors are laid out as `u = (x, λ)` and `w = (x, λ, t)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{dot, norm, vec_power, DenseTensor, Rank1Symmetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EigenKind {
    Z,
    H,
}

/// One point `w = (x, λ, t)` on a homotopy solution curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub x: DVector<f64>,
    pub lambda: f64,
    pub t: f64,
    pub residual_norm: f64,
}

impl CurvePoint {
    /// Packs the point as `(x, λ, t)`.
    pub fn to_vector(&self) -> DVector<f64> {
        let n = self.x.len();
        DVector::from_fn(n + 2, |i, _| match i {
            i if i < n => self.x[i],
            i if i == n => self.lambda,
            _ => self.t,
        })
    }

    pub fn from_vector(w: &DVector<f64>, residual_norm: f64) -> Self {
        let n = w.len() - 2;
        Self { x: w.rows(0, n).into_owned(), lambda: w[n], t: w[n + 1], residual_norm }
    }
}

/// Residual and both Jacobian blocks at one point, from a single
/// contraction of the target tensor.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub residual: DVector<f64>,
    /// `D_{x,λ} H`, (n+1)×(n+1).
    pub jac_state: DMatrix<f64>,
    /// `D_t H`, length n+1 with a zero last entry.
    pub jac_t: DVector<f64>,
}

impl Evaluation {
    /// `[D_{x,λ} H | D_t H]`, (n+1)×(n+2).
    pub fn full_jacobian(&self) -> DMatrix<f64> {
        let k = self.jac_state.nrows();
        let mut j = DMatrix::zeros(k, k + 1);
        j.view_mut((0, 0), (k, k)).copy_from(&self.jac_state);
        j.set_column(k, &self.jac_t);
        j
    }
}

/// Homotopy from the symmetric rank-1 start tensor generated by `x1` to a
/// nonnegative target tensor.
#[derive(Debug, Clone)]
pub struct HomotopyProblem {
    target: DenseTensor,
    start: Rank1Symmetric,
    kind: EigenKind,
}

impl HomotopyProblem {
    /// Targets without trailing-index symmetry are replaced by their
    /// semi-symmetric equivalent, which has the same `A x^{m-1}`.
    pub fn new(target: &DenseTensor, generator: Vec<f64>, kind: EigenKind) -> Result<Self> {
        target.require_nonnegative()?;
        let start = Rank1Symmetric::new(generator)?;
        if start.dim() != target.dim() {
            return Err(Error::DimensionMismatch { expected: target.dim(), got: start.dim() });
        }
        Ok(Self { target: target.semi_symmetrize(), start, kind })
    }

    pub fn target(&self) -> &DenseTensor {
        &self.target
    }

    pub fn start(&self) -> &Rank1Symmetric {
        &self.start
    }

    pub fn kind(&self) -> EigenKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.target.order()
    }

    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    /// The unique positive eigenpair of the start tensor, at t = 0.
    pub fn start_eigenpair(&self) -> CurvePoint {
        let m = self.order() as i32;
        let x1 = self.start.generator();
        let (x0, lambda0) = match self.kind {
            EigenKind::Z => {
                let nrm = self.start.norm();
                (x1.iter().map(|v| v / nrm).collect::<Vec<_>>(), nrm.powi(m))
            }
            EigenKind::H => {
                let root = vec_power(x1, 1.0 / (m as f64 - 1.0)).expect("generator is positive");
                let lambda0 = dot(x1, &root).powi(m - 1);
                let nrm = norm(&root);
                (root.iter().map(|v| v / nrm).collect(), lambda0)
            }
        };
        let x = DVector::from_vec(x0);
        let residual_norm = self.residual_at(&x, lambda0, 0.0).norm();
        CurvePoint { x, lambda: lambda0, t: 0.0, residual_norm }
    }

    /// Residual, state Jacobian and t-Jacobian at `(x, λ, t)`.
    pub fn evaluate(&self, x: &DVector<f64>, lambda: f64, t: f64) -> Evaluation {
        let n = self.dim();
        let m = self.order();
        let xs = x.as_slice();
        let pre = self.target.precursor(xs).expect("dimension checked at construction");
        let ax = &pre * x;
        let x1 = DVector::from_column_slice(self.start.generator());
        let s = x1.dot(x);
        let a0x = &x1 * s.powi(m as i32 - 1);
        let blend = &a0x * (1.0 - t) + &ax * t;
        let mut deriv = pre * ((m as f64 - 1.0) * t);
        deriv.ger((1.0 - t) * (m as f64 - 1.0) * s.powi(m as i32 - 2), &x1, &x1, 1.0);

        let mut residual = DVector::zeros(n + 1);
        let mut jac_state = DMatrix::zeros(n + 1, n + 1);
        jac_state.view_mut((0, 0), (n, n)).copy_from(&deriv);
        match self.kind {
            EigenKind::Z => {
                for i in 0..n {
                    residual[i] = blend[i] - lambda * x[i];
                    jac_state[(i, i)] -= lambda;
                    jac_state[(i, n)] = -x[i];
                }
            }
            EigenKind::H => {
                let p = m as i32 - 1;
                for i in 0..n {
                    let xi = x[i];
                    residual[i] = blend[i] - lambda * xi.powi(p);
                    jac_state[(i, i)] -= (m as f64 - 1.0) * lambda * xi.powi(p - 1);
                    jac_state[(i, n)] = -xi.powi(p);
                }
            }
        }
        residual[n] = x.dot(x) - 1.0;
        for j in 0..n {
            jac_state[(n, j)] = 2.0 * x[j];
        }
        let mut jac_t = DVector::zeros(n + 1);
        jac_t.rows_mut(0, n).copy_from(&(ax - a0x));
        Evaluation { residual, jac_state, jac_t }
    }

    fn residual_at(&self, x: &DVector<f64>, lambda: f64, t: f64) -> DVector<f64> {
        self.evaluate(x, lambda, t).residual
    }

    pub fn residual(&self, w: &CurvePoint) -> DVector<f64> {
        self.residual_at(&w.x, w.lambda, w.t)
    }

    pub fn jacobian_wrt_state(&self, w: &CurvePoint) -> DMatrix<f64> {
        self.evaluate(&w.x, w.lambda, w.t).jac_state
    }

    pub fn jacobian_wrt_t(&self, w: &CurvePoint) -> DVector<f64> {
        self.evaluate(&w.x, w.lambda, w.t).jac_t
    }
}

/// `F(x, λ)` of the target tensor alone (the homotopy at t = 1), evaluated
/// directly rather than through the blend.
pub fn target_residual(a: &DenseTensor, kind: EigenKind, x: &[f64], lambda: f64) -> Result<DVector<f64>> {
    let n = a.dim();
    let ax = a.apply(x)?;
    let p = a.order() as i32 - 1;
    let mut r = DVector::zeros(n + 1);
    for i in 0..n {
        r[i] = match kind {
            EigenKind::Z => ax[i] - lambda * x[i],
            EigenKind::H => ax[i] - lambda * x[i].powi(p),
        };
    }
    r[n] = dot(x, x) - 1.0;
    Ok(r)
}

/// Bordered Jacobian `D_{x,λ} F` of the target system.
pub fn target_jacobian(a: &DenseTensor, kind: EigenKind, x: &[f64], lambda: f64) -> Result<DMatrix<f64>> {
    let n = a.dim();
    let m = a.order();
    let d = a.derivative(x)?;
    let mut j = DMatrix::zeros(n + 1, n + 1);
    j.view_mut((0, 0), (n, n)).copy_from(&d);
    for i in 0..n {
        match kind {
            EigenKind::Z => {
                j[(i, i)] -= lambda;
                j[(i, n)] = -x[i];
            }
            EigenKind::H => {
                j[(i, i)] -= (m as f64 - 1.0) * lambda * x[i].powi(m as i32 - 2);
                j[(i, n)] = -x[i].powi(m as i32 - 1);
            }
        }
        j[(n, i)] = 2.0 * x[i];
    }
    Ok(j)
}

/// Draws a generic positive generator: i.i.d. uniform components on (0, 1],
/// rescaled so that its norm is uniform on `norm_range`.
pub fn sample_generator<R: Rng + ?Sized>(rng: &mut R, n: usize, norm_range: (f64, f64)) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();
    let target = if norm_range.1 > norm_range.0 { rng.gen_range(norm_range.0..=norm_range.1) } else { norm_range.0 };
    let scale = target / norm(&raw);
    raw.into_iter().map(|v| v * scale).collect()
}
