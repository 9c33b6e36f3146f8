#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use teneig::homotopy::HomotopyProblem;
use teneig::tensor::{DenseTensor, Symmetry};

/// Entries uniform in `[lo, 1)`; symmetric tensors share one draw per
/// sorted index multiset.
pub fn random_tensor<R: Rng>(rng: &mut R, m: usize, n: usize, symmetry: Symmetry, lo: f64) -> DenseTensor {
    let mut shared: HashMap<Vec<usize>, f64> = HashMap::new();
    DenseTensor::from_fn(m, n, symmetry, |idx| {
        if symmetry == Symmetry::Symmetric {
            let mut key = idx.to_vec();
            key.sort_unstable();
            *shared.entry(key).or_insert_with(|| rng.gen_range(lo..1.0))
        } else {
            rng.gen_range(lo..1.0)
        }
    })
    .unwrap()
}

pub fn random_positive<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.1..1.0)).collect()
}

/// Naive `A x^{m-1}` by summing over every index tuple.
pub fn apply_naive(a: &DenseTensor, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.dim()];
    for (lin, v) in a.data().iter().enumerate() {
        let idx = a.multi_index(lin);
        y[idx[0]] += v * idx[1..].iter().map(|&j| x[j]).product::<f64>();
    }
    y
}

/// Central-difference `[D_{x,λ} H | D_t H]` of the homotopy residual.
pub fn fd_jacobian(p: &HomotopyProblem, x: &DVector<f64>, lambda: f64, t: f64, h: f64) -> DMatrix<f64> {
    let n = x.len();
    let eval = |w: &DVector<f64>| p.evaluate(&w.rows(0, n).into_owned(), w[n], w[n + 1]).residual;
    let mut w = DVector::zeros(n + 2);
    w.rows_mut(0, n).copy_from(x);
    w[n] = lambda;
    w[n + 1] = t;
    let mut jac = DMatrix::zeros(n + 1, n + 2);
    for j in 0..n + 2 {
        let mut wp = w.clone();
        let mut wm = w.clone();
        wp[j] += h;
        wm[j] -= h;
        jac.set_column(j, &((eval(&wp) - eval(&wm)) / (2.0 * h)));
    }
    jac
}

/// Positive Z-eigenpairs of a 2-dimensional tensor, found by a Newton sweep
/// over `x = (cos θ, sin θ)`, `θ ∈ (0, π/2)`: roots of
/// `g(θ) = (A x^{m-1})_1 sin θ - (A x^{m-1})_2 cos θ`.
pub fn circle_oracle(a: &DenseTensor) -> Vec<(f64, Vec<f64>)> {
    assert_eq!(a.dim(), 2);
    let g = |th: f64| {
        let y = apply_naive(a, &[th.cos(), th.sin()]);
        y[0] * th.sin() - y[1] * th.cos()
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    let starts = 4000;
    let mut roots: Vec<f64> = Vec::new();
    for s in 0..starts {
        let mut th = half_pi * (s as f64 + 0.5) / starts as f64;
        let mut converged = false;
        for _ in 0..60 {
            let d = 1e-7;
            let slope = (g(th + d) - g(th - d)) / (2.0 * d);
            if slope == 0.0 {
                break;
            }
            let step = g(th) / slope;
            th -= step;
            if !(th > 0.0 && th < half_pi) {
                break;
            }
            if step.abs() < 1e-14 {
                converged = true;
                break;
            }
        }
        if (converged || g(th).abs() < 1e-14)
            && th > 0.0
            && th < half_pi
            && !roots.iter().any(|r| (r - th).abs() < 1e-9)
        {
            roots.push(th);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
        .into_iter()
        .map(|th| {
            let x = vec![th.cos(), th.sin()];
            let y = apply_naive(a, &x);
            (x[0] * y[0] + x[1] * y[1], x)
        })
        .collect()
}
