//! Curve tracking from t = 0 to t = 1.
//!
//! Z-curves may fold back in t, so they are followed by pseudo-arclength
//! continuation: Euler prediction along the unit tangent, then Newton on
//! `H(w) = 0` restricted to the hyperplane normal to that tangent through
//! the predicted point. H-curves are monotone in t and use plain parameter
//! continuation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homotopy::{target_jacobian, target_residual, CurvePoint, EigenKind, Evaluation, HomotopyProblem};
use crate::linalg::{factor, SINGULAR_PIVOT};

/// Residual above which an endpoint is not accepted as an eigenpair.
pub const ACCEPT_RESIDUAL: f64 = 1e-10;

/// Endpoint polishing refuses starts with `‖F‖ > REFINE_BASIN (1 + |λ|)`.
pub const REFINE_BASIN: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct TrackerConfig {
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub step_grow: f64,
    pub step_shrink: f64,
    pub max_steps: usize,
    /// Bound on |λ| and ‖x‖ along the curve; `None` uses `10 z_bound(A) + 10`.
    pub escape_radius: Option<f64>,
    /// Steps whose new tangent makes a smaller cosine than this with the
    /// previous one are rejected and retried with a shorter step.
    pub min_tangent_cos: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-12,
            max_newton_iters: 10,
            initial_step: 0.05,
            min_step: 1e-8,
            max_step: 0.25,
            step_grow: 1.5,
            step_shrink: 0.5,
            max_steps: 5000,
            escape_radius: None,
            min_tangent_cos: 0.95,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.newton_tol > 0.0
            && self.min_step > 0.0
            && self.min_step <= self.initial_step
            && self.initial_step <= self.max_step
            && self.step_grow >= 1.0
            && self.step_shrink > 0.0
            && self.step_shrink < 1.0
            && self.max_newton_iters > 0
            && self.max_steps > 0
            && self.min_tangent_cos < 1.0
            && self.escape_radius.is_none_or(|r| r > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("inconsistent tracker configuration: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// A computed eigenpair of the target tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    pub x: Vec<f64>,
    /// `‖F(x, λ)‖` in the target system.
    pub residual: f64,
    /// Sign of `det D_{x,λ} F(x, λ)`, 0 when numerically singular.
    #[serde(rename = "detSign")]
    pub det_sign: i8,
    pub kind: EigenKind,
}

impl EigenPair {
    /// Evaluates residual and determinant sign of `(x, λ)` for the target.
    pub fn from_target(a: &crate::tensor::DenseTensor, kind: EigenKind, x: Vec<f64>, lambda: f64) -> Result<Self> {
        let residual = target_residual(a, kind, &x, lambda)?.norm();
        let det_sign = factor(target_jacobian(a, kind, &x, lambda)?).det_sign(SINGULAR_PIVOT);
        Ok(Self { lambda, x, residual, det_sign, kind })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    /// Index of the first accepted point after the sign change.
    pub index: usize,
    /// Interpolated t at which the tangent's t-component vanishes.
    pub t: f64,
}

/// Accepted points of one tracking run.
#[derive(Debug, Clone, Default)]
pub struct CurveTrace {
    pub points: Vec<CurvePoint>,
    /// Unit tangents in `(x, λ, t)` space, one per point.
    pub tangents: Vec<DVector<f64>>,
    pub turning_points: Vec<TurningPoint>,
    /// Number of `A x^{m-1}` evaluations.
    pub evaluations: usize,
    /// Accepted prediction-correction steps.
    pub steps: usize,
}

impl CurveTrace {
    fn push(&mut self, w: &DVector<f64>, residual: f64, tangent: DVector<f64>) {
        self.points.push(CurvePoint::from_vector(w, residual));
        self.tangents.push(tangent);
    }

    /// Number of sign changes of the tangent's t-component.
    pub fn t_sign_changes(&self) -> usize {
        self.tangents
            .windows(2)
            .filter(|p| {
                let a = p[0][p[0].len() - 1];
                let b = p[1][p[1].len() - 1];
                (a > 0.0) != (b > 0.0)
            })
            .count()
    }
}

struct Tracker<'a> {
    p: &'a HomotopyProblem,
    cfg: &'a TrackerConfig,
    evals: usize,
    escape: f64,
}

impl<'a> Tracker<'a> {
    fn new(p: &'a HomotopyProblem, cfg: &'a TrackerConfig) -> Result<Self> {
        cfg.validate()?;
        let escape = cfg.escape_radius.unwrap_or_else(|| 10.0 * p.target().z_bound() + 10.0);
        Ok(Self { p, cfg, evals: 0, escape })
    }

    fn n(&self) -> usize {
        self.p.dim()
    }

    fn eval_u(&mut self, u: &DVector<f64>, t: f64) -> Evaluation {
        self.evals += 1;
        let n = self.n();
        self.p.evaluate(&u.rows(0, n).into_owned(), u[n], t)
    }

    fn eval_w(&mut self, w: &DVector<f64>) -> Evaluation {
        let n = self.n();
        self.eval_u(&w.rows(0, n + 1).into_owned(), w[n + 1])
    }

    fn check_escape(&self, w: &DVector<f64>) -> Result<()> {
        let n = self.n();
        let xn = w.rows(0, n).norm();
        let lambda = w[n];
        if !(xn <= self.escape && lambda.abs() <= self.escape) {
            return Err(Error::Anomaly(format!(
                "curve left the ball of radius {:.3e} (‖x‖ = {xn:.3e}, λ = {lambda:.3e}) at t = {}",
                self.escape,
                w[n + 1]
            )));
        }
        Ok(())
    }

    /// Newton on `H(u, t) = 0` at fixed t.
    fn correct_fixed_t(&mut self, mut u: DVector<f64>, t: f64) -> Option<(DVector<f64>, Evaluation, usize)> {
        let mut last_step = f64::INFINITY;
        for iter in 0..=self.cfg.max_newton_iters {
            let ev = self.eval_u(&u, t);
            let r = ev.residual.norm();
            if !r.is_finite() {
                return None;
            }
            if r <= self.cfg.newton_tol {
                return Some((u, ev, iter));
            }
            if iter == self.cfg.max_newton_iters {
                break;
            }
            let delta = factor(ev.jac_state).solve(&(-ev.residual))?;
            let step = delta.norm();
            if iter > 0 && step > last_step && step > 1e3 * self.cfg.newton_tol {
                return None;
            }
            last_step = step;
            u += delta;
        }
        None
    }

    /// Newton on `[H(w); τᵀ(w - w_pred)] = 0`.
    fn correct_arclength(
        &mut self,
        pred: &DVector<f64>,
        tangent: &DVector<f64>,
    ) -> Option<(DVector<f64>, Evaluation, usize)> {
        let k = pred.len();
        let mut w = pred.clone();
        let mut last_step = f64::INFINITY;
        for iter in 0..=self.cfg.max_newton_iters {
            let ev = self.eval_w(&w);
            let r = ev.residual.norm();
            if !r.is_finite() {
                return None;
            }
            if r <= self.cfg.newton_tol {
                return Some((w, ev, iter));
            }
            if iter == self.cfg.max_newton_iters {
                break;
            }
            let mut jac = DMatrix::zeros(k, k);
            jac.view_mut((0, 0), (k - 1, k)).copy_from(&ev.full_jacobian());
            jac.set_row(k - 1, &tangent.transpose());
            let mut rhs = DVector::zeros(k);
            rhs.rows_mut(0, k - 1).copy_from(&(-&ev.residual));
            rhs[k - 1] = -tangent.dot(&(&w - pred));
            let delta = factor(jac).solve(&rhs)?;
            let step = delta.norm();
            if iter > 0 && step > last_step && step > 1e3 * self.cfg.newton_tol {
                return None;
            }
            last_step = step;
            w += delta;
        }
        None
    }
}

/// Unit null vector of `[D_{x,λ} H | D_t H]` (an (n+1)×(n+2) matrix).
///
/// With `prev` the result satisfies `prevᵀ ẇ > 0`; without it the t-component
/// is positive.
pub fn tangent_from_jacobian(full: &DMatrix<f64>, prev: Option<&DVector<f64>>) -> Result<DVector<f64>> {
    let rows = full.nrows();
    let k = full.ncols();
    let border = match prev {
        Some(p) => p.clone(),
        None => {
            let mut e = DVector::zeros(k);
            e[k - 1] = 1.0;
            e
        }
    };
    let mut bordered = DMatrix::zeros(k, k);
    bordered.view_mut((0, 0), (rows, k)).copy_from(full);
    bordered.set_row(k - 1, &border.transpose());
    let mut rhs = DVector::zeros(k);
    rhs[k - 1] = 1.0;
    let f = factor(bordered);
    if !f.is_singular(1e-13) {
        if let Some(v) = f.solve(&rhs) {
            return Ok(v.normalize());
        }
    }
    // Bordered system is singular: take the smallest right singular vector.
    let mut square = DMatrix::zeros(k, k);
    square.view_mut((0, 0), (rows, k)).copy_from(full);
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let smallest = order[0];
    let second = svd.singular_values[order[1]];
    let largest = svd.singular_values[order[k - 1]];
    if !(second > 1e-10 * largest.max(1e-300)) {
        return Err(Error::SingularCurve(format!(
            "Jacobian rank below {rows} (singular values {second:.3e} / {largest:.3e})"
        )));
    }
    let mut v = v_t.row(smallest).transpose().into_owned();
    let orient = border.dot(&v);
    if orient == 0.0 {
        return Err(Error::SingularCurve("tangent orthogonal to orientation vector".into()));
    }
    if orient < 0.0 {
        v = -v;
    }
    Ok(v.normalize())
}

/// Sign of `det [J; τᵀ]`. Constant along a regular curve traversed in one
/// direction, so a flip between accepted points means the corrector landed
/// on another branch.
fn orientation(full: &DMatrix<f64>, tangent: &DVector<f64>) -> i8 {
    let k = full.ncols();
    let mut m = DMatrix::zeros(k, k);
    m.view_mut((0, 0), (k - 1, k)).copy_from(full);
    m.set_row(k - 1, &tangent.transpose());
    factor(m).det_sign(SINGULAR_PIVOT)
}

/// Unit tangent of the Z-curve at `w`.
pub fn tangent_z(p: &HomotopyProblem, w: &CurvePoint, prev: Option<&DVector<f64>>) -> Result<DVector<f64>> {
    let ev = p.evaluate(&w.x, w.lambda, w.t);
    tangent_from_jacobian(&ev.full_jacobian(), prev)
}

/// Follows the Z-homotopy from `start` until the curve reaches t = 1.
///
/// Forward runs start at t = 0 with increasing t. Backward runs start at an
/// eigenpair of the target (t = 1), leave into t < 1 and come back to t = 1
/// on a different eigenpair.
pub fn track_z(
    p: &HomotopyProblem,
    start: &CurvePoint,
    direction: Direction,
    cfg: &TrackerConfig,
) -> Result<(EigenPair, CurveTrace)> {
    if p.kind() != EigenKind::Z {
        return Err(Error::InvalidInput("track_z needs a Z homotopy".into()));
    }
    if start.x.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: start.x.len() });
    }
    if direction == Direction::Backward && (start.t - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("backward tracks start at t = 1, got t = {}", start.t)));
    }
    let mut tr = Tracker::new(p, cfg)?;
    let n = p.dim();
    let mut trace = CurveTrace::default();

    let mut w = start.to_vector();
    let mut ev = tr.eval_w(&w);
    if ev.residual.norm() > cfg.newton_tol {
        let (u, polished, _) = tr
            .correct_fixed_t(w.rows(0, n + 1).into_owned(), start.t)
            .ok_or_else(|| Error::InvalidInput("start point is not on the solution curve".into()))?;
        w.rows_mut(0, n + 1).copy_from(&u);
        ev = polished;
    }
    let mut tangent = tangent_from_jacobian(&ev.full_jacobian(), None)?;
    if direction == Direction::Backward {
        tangent = -tangent;
    }
    trace.push(&w, ev.residual.norm(), tangent.clone());
    let mut orient = orientation(&ev.full_jacobian(), &tangent);
    let consistent = |o: i8, cur: i8| o == 0 || cur == 0 || o == cur;

    let mut h = cfg.initial_step;
    loop {
        if trace.steps >= cfg.max_steps {
            return Err(Error::Budget(format!("{} steps without reaching t = 1", cfg.max_steps)));
        }
        let t = w[n + 1];
        let tdot = tangent[n + 1];

        if tdot > 0.0 && t + h * tdot >= 1.0 {
            let h_land = (1.0 - t) / tdot;
            let mut pred = &w + &tangent * h_land;
            pred[n + 1] = 1.0;
            let landed = tr.correct_fixed_t(pred.rows(0, n + 1).into_owned(), 1.0).and_then(|(u, ev_end, _)| {
                let full = ev_end.full_jacobian();
                let tangent_end = tangent_from_jacobian(&full, Some(&tangent)).unwrap_or_else(|_| tangent.clone());
                consistent(orientation(&full, &tangent_end), orient).then_some((u, ev_end, tangent_end))
            });
            if let Some((u, ev_end, tangent_end)) = landed {
                let mut w_end = pred;
                w_end.rows_mut(0, n + 1).copy_from(&u);
                tr.check_escape(&w_end)?;
                record_turning(&mut trace, &w, &tangent, &w_end, &tangent_end);
                trace.steps += 1;
                trace.push(&w_end, ev_end.residual.norm(), tangent_end);
                trace.evaluations = tr.evals;
                let x = w_end.rows(0, n).iter().copied().collect();
                let pair = EigenPair::from_target(p.target(), EigenKind::Z, x, w_end[n])?;
                return Ok((pair, trace));
            }
            h = h_land * cfg.step_shrink;
            if h < cfg.min_step {
                return Err(Error::TrackingStalled(format!("cannot land on t = 1 from t = {t}")));
            }
            continue;
        }

        let pred = &w + &tangent * h;
        let accepted = tr.correct_arclength(&pred, &tangent).and_then(|(w_new, ev_new, iters)| {
            let full = ev_new.full_jacobian();
            let tan_new = tangent_from_jacobian(&full, Some(&tangent)).ok()?;
            let o = orientation(&full, &tan_new);
            (tan_new.dot(&tangent) >= cfg.min_tangent_cos && consistent(o, orient))
                .then_some((w_new, ev_new, tan_new, iters, o))
        });
        match accepted {
            Some((w_new, ev_new, tan_new, iters, o)) => {
                if orient == 0 {
                    orient = o;
                }
                tr.check_escape(&w_new)?;
                if w_new[n + 1] < -1e-8 {
                    return Err(Error::Anomaly(format!("curve crossed t = 0 (t = {})", w_new[n + 1])));
                }
                record_turning(&mut trace, &w, &tangent, &w_new, &tan_new);
                trace.steps += 1;
                trace.push(&w_new, ev_new.residual.norm(), tan_new.clone());
                w = w_new;
                tangent = tan_new;
                if iters <= 3 {
                    h = (h * cfg.step_grow).min(cfg.max_step);
                }
            }
            None => {
                h *= cfg.step_shrink;
                if h < cfg.min_step {
                    return Err(Error::TrackingStalled(format!(
                        "step fell below {:.1e} at t = {t}, λ = {}",
                        cfg.min_step, w[n]
                    )));
                }
            }
        }
    }
}

fn record_turning(
    trace: &mut CurveTrace,
    w0: &DVector<f64>,
    tan0: &DVector<f64>,
    w1: &DVector<f64>,
    tan1: &DVector<f64>,
) {
    let k = w0.len() - 1;
    let (a, b) = (tan0[k], tan1[k]);
    if (a > 0.0) == (b > 0.0) {
        return;
    }
    // Quadratic model of t(s) through the two tangents.
    let h = (w1 - w0).norm();
    let curvature = (b - a) / h;
    let s_star = if curvature != 0.0 { -a / curvature } else { 0.0 };
    let t = w0[k] + a * s_star + 0.5 * curvature * s_star * s_star;
    trace.turning_points.push(TurningPoint { index: trace.points.len(), t });
}

/// Parameter continuation of the H-homotopy from its start pair to t = 1.
pub fn track_h(p: &HomotopyProblem, cfg: &TrackerConfig) -> Result<(EigenPair, CurveTrace)> {
    if p.kind() != EigenKind::H {
        return Err(Error::InvalidInput("track_h needs an H homotopy".into()));
    }
    let mut tr = Tracker::new(p, cfg)?;
    let n = p.dim();
    let start = p.start_eigenpair();
    let mut u = start.to_vector().rows(0, n + 1).into_owned();
    let mut t = 0.0;
    let mut ev = tr.eval_u(&u, t);
    let mut trace = CurveTrace::default();
    let mut dt = cfg.initial_step;

    loop {
        let udot = match factor(ev.jac_state.clone()).solve(&(-&ev.jac_t)) {
            Some(v) => v,
            None if t >= 1.0 => break,
            None => {
                return Err(Error::Anomaly(format!(
                    "state Jacobian singular at t = {t} (min x = {:.3e}); the curve touched the boundary",
                    u.rows(0, n).min()
                )))
            }
        };
        let mut tangent = udot.clone().insert_row(n + 1, 1.0);
        tangent.normalize_mut();
        if trace.points.is_empty() {
            let w = u.clone().insert_row(n + 1, t);
            trace.push(&w, ev.residual.norm(), tangent.clone());
        } else if let Some(last) = trace.tangents.last_mut() {
            *last = tangent.clone();
        }
        if t >= 1.0 {
            break;
        }
        if trace.steps >= cfg.max_steps {
            return Err(Error::Budget(format!("{} steps without reaching t = 1", cfg.max_steps)));
        }
        let t_next = (t + dt).min(1.0);
        let pred = &u + &udot * (t_next - t);
        match tr.correct_fixed_t(pred, t_next) {
            Some((u_new, ev_new, iters)) if t_next > t => {
                let w = u_new.clone().insert_row(n + 1, t_next);
                tr.check_escape(&w)?;
                trace.steps += 1;
                trace.push(&w, ev_new.residual.norm(), tangent);
                u = u_new;
                t = t_next;
                ev = ev_new;
                if iters <= 3 {
                    dt = (dt * cfg.step_grow).min(cfg.max_step);
                }
            }
            _ => {
                dt *= cfg.step_shrink;
                if dt < cfg.min_step {
                    return Err(Error::TrackingStalled(format!("step fell below {:.1e} at t = {t}", cfg.min_step)));
                }
            }
        }
    }
    trace.evaluations = tr.evals;
    let x = u.rows(0, n).iter().copied().collect();
    let pair = EigenPair::from_target(p.target(), EigenKind::H, x, u[n])?;
    Ok((pair, trace))
}

/// Newton polish of `(x, λ)` on the target system at t = 1.
pub fn refine_at_target(p: &HomotopyProblem, x: &[f64], lambda: f64, cfg: &TrackerConfig) -> Result<EigenPair> {
    cfg.validate()?;
    let a = p.target();
    let kind = p.kind();
    let n = p.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let mut u = DVector::from_iterator(n + 1, x.iter().copied().chain([lambda]));
    let initial = target_residual(a, kind, x, lambda)?.norm();
    if !(initial <= REFINE_BASIN * (1.0 + lambda.abs())) {
        return Err(Error::RefinementFailed(format!("start residual {initial:.3e} is outside the Newton basin")));
    }
    for _ in 0..cfg.max_newton_iters {
        let xs: Vec<f64> = u.rows(0, n).iter().copied().collect();
        let r = target_residual(a, kind, &xs, u[n])?;
        if r.norm() <= cfg.newton_tol {
            break;
        }
        let j = target_jacobian(a, kind, &xs, u[n])?;
        let delta = factor(j)
            .solve(&(-r))
            .ok_or_else(|| Error::RefinementFailed("singular Jacobian during refinement".into()))?;
        u += delta;
    }
    let xs: Vec<f64> = u.rows(0, n).iter().copied().collect();
    let pair = EigenPair::from_target(a, kind, xs, u[n])?;
    if !(pair.residual <= ACCEPT_RESIDUAL) {
        return Err(Error::RefinementFailed(format!("residual {:.3e} after refinement", pair.residual)));
    }
    Ok(pair)
}
