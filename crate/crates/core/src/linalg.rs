//! Dense LU helpers: solves that refuse near-singular systems, and the
//! determinant sign read off the factorization.

use nalgebra::{DMatrix, DVector, Dyn, LU};

pub(crate) struct Factored {
    lu: LU<f64, Dyn, Dyn>,
    min_pivot: f64,
    scale: f64,
}

pub(crate) fn factor(m: DMatrix<f64>) -> Factored {
    let scale = m.amax();
    let lu = m.lu();
    let min_pivot = lu.u().diagonal().iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    Factored { lu, min_pivot, scale }
}

impl Factored {
    /// Smallest |U_ii| relative to the largest matrix entry.
    pub(crate) fn relative_pivot(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.min_pivot / self.scale
        }
    }

    pub(crate) fn is_singular(&self, rel_tol: f64) -> bool {
        !(self.relative_pivot() > rel_tol)
    }

    pub(crate) fn solve(&self, b: &DVector<f64>) -> Option<DVector<f64>> {
        if self.is_singular(1e-15) {
            return None;
        }
        self.lu.solve(b).filter(|x| x.iter().all(|v| v.is_finite()))
    }

    /// Sign of the determinant; 0 when the smallest pivot is below
    /// `rel_tol` times the largest entry.
    pub(crate) fn det_sign(&self, rel_tol: f64) -> i8 {
        if self.is_singular(rel_tol) {
            return 0;
        }
        let negatives = self.lu.u().diagonal().iter().filter(|v| **v < 0.0).count();
        let parity = self.lu.p().determinant::<f64>();
        let sign = if negatives % 2 == 0 { 1.0 } else { -1.0 } * parity;
        if sign > 0.0 {
            1
        } else {
            -1
        }
    }
}

/// Threshold for calling a Jacobian numerically singular when reading its
/// determinant sign.
pub(crate) const SINGULAR_PIVOT: f64 = 1e-12;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_sign_matches_determinant() {
        let cases = [
            (DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]), -1),
            (DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]), 1),
            (DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 0.0, -1.0, 4.0, 5.0, 6.0, 0.0]), 1),
            (DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]), 0),
        ];
        for (m, expect) in cases {
            let det = m.determinant();
            assert_eq!(factor(m).det_sign(SINGULAR_PIVOT), expect, "det={det}");
        }
    }

    #[test]
    fn singular_solve_is_refused() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(factor(m).solve(&DVector::from_vec(vec![1.0, 1.0])).is_none());
    }
}
