//! Dense m-th order, n-dimensional tensors and the multilinear kernels
//! used by the homotopies and the baseline iterations.
//!
//! Entries are stored row-major: the first index varies slowest, so the
//! slice `data[i * n^(m-1) .. (i + 1) * n^(m-1)]` is the i-th mode-1 slice.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Symmetry metadata carried alongside the entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symmetry {
    General,
    /// Invariant under permutations of indices 2..m.
    SemiSymmetric,
    /// Invariant under permutations of all indices.
    Symmetric,
}

impl Symmetry {
    /// True when the trailing m-1 indices may be permuted freely.
    pub fn is_semi_symmetric(self) -> bool {
        matches!(self, Symmetry::SemiSymmetric | Symmetry::Symmetric)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
    symmetry: Symmetry,
}

fn checked_len(order: usize, dim: usize) -> Result<usize> {
    let mut len: usize = 1;
    for _ in 0..order {
        len =
            len.checked_mul(dim).ok_or_else(|| Error::InvalidInput(format!("n^m overflows for m={order}, n={dim}")))?;
    }
    Ok(len)
}

impl DenseTensor {
    pub fn new(order: usize, dim: usize, data: Vec<f64>, symmetry: Symmetry) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidInput(format!("order must be >= 2, got {order}")));
        }
        if dim < 1 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        let len = checked_len(order, dim)?;
        if data.len() != len {
            return Err(Error::DimensionMismatch { expected: len, got: data.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite entry at linear index {pos}")));
        }
        Ok(Self { order, dim, data, symmetry })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = checked_len(order, dim)?;
        Self::new(order, dim, vec![0.0; len], Symmetry::Symmetric)
    }

    /// Builds a tensor by evaluating `f` at every multi-index (0-based).
    pub fn from_fn(order: usize, dim: usize, symmetry: Symmetry, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = checked_len(order, dim)?;
        let mut idx = vec![0usize; order];
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(f(&idx));
            increment(&mut idx, dim);
        }
        Self::new(order, dim, data, symmetry)
    }

    /// Materialized symmetric rank-1 tensor `x ∘ x ∘ ... ∘ x` of the given order.
    pub fn rank1(generator: &[f64], order: usize) -> Result<Self> {
        let n = generator.len();
        Self::from_fn(order, n, Symmetry::Symmetric, |idx| idx.iter().map(|&i| generator[i]).product())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    /// Replaces the symmetry flag without touching the entries.
    pub fn with_symmetry(mut self, symmetry: Symmetry) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn multi_index(&self, mut lin: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order];
        for slot in idx.iter_mut().rev() {
            *slot = lin % self.dim;
            lin /= self.dim;
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.linear_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let lin = self.linear_index(idx);
        self.data[lin] = value;
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&v| v >= 0.0)
    }

    pub fn require_nonnegative(&self) -> Result<()> {
        match self.data.iter().position(|&v| v < 0.0) {
            None => Ok(()),
            Some(pos) => Err(Error::InvalidInput(format!(
                "negative entry {} at index {:?}",
                self.data[pos],
                self.multi_index(pos).iter().map(|i| i + 1).collect::<Vec<_>>()
            ))),
        }
    }

    /// `self * c`, keeping the symmetry flag.
    pub fn scaled(&self, c: f64) -> Self {
        Self { data: self.data.iter().map(|v| v * c).collect(), ..self.clone() }
    }

    /// `a * self + b * other`; the result keeps the weaker symmetry of the two.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.order != other.order || self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.data.len(), got: other.data.len() });
        }
        let data = self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect();
        Self::new(self.order, self.dim, data, self.symmetry.min(other.symmetry))
    }

    fn check_vec(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// Contracts the last `count` modes with `x`, returning the remaining
    /// order-(m-count) block in row-major order.
    pub fn contract_trailing(&self, x: &[f64], count: usize) -> Vec<f64> {
        assert!(count < self.order, "cannot contract every mode");
        let n = self.dim;
        let mut cur = self.data.clone();
        for _ in 0..count {
            cur = cur.chunks_exact(n).map(|row| dot(row, x)).collect();
        }
        cur
    }

    /// `A x^{m-1}`: y_i = Σ A_{i,i2..im} x_{i2} ... x_{im}.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_vec(x)?;
        Ok(self.contract_trailing(x, self.order - 1))
    }

    /// `A x^{m-2}` as an n×n matrix (the tensor itself when m = 2).
    pub fn precursor(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_vec(x)?;
        let block = self.contract_trailing(x, self.order - 2);
        Ok(DMatrix::from_row_slice(self.dim, self.dim, &block))
    }

    /// Jacobian of `x ↦ A x^{m-1}`.
    ///
    /// Semi-symmetric tensors use `(m-1) A x^{m-2}`; anything else sums the
    /// m-1 mode products that leave one trailing index free.
    pub fn derivative(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        if self.symmetry.is_semi_symmetric() {
            Ok(self.precursor(x)? * (self.order as f64 - 1.0))
        } else {
            self.derivative_general(x)
        }
    }

    /// The mode-product sum, valid for any tensor regardless of symmetry.
    pub fn derivative_general(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_vec(x)?;
        let n = self.dim;
        let m = self.order;
        let mut out = DMatrix::zeros(n, n);
        // Mode k (0-based, 1..m) stays free; modes after k are contracted
        // first, modes 1..k are contracted against an outer power of x.
        let mut weights = vec![1.0];
        for k in 1..m {
            let block = self.contract_trailing(x, m - 1 - k);
            let mid = weights.len();
            for i in 0..n {
                for (p, w) in weights.iter().enumerate() {
                    let base = (i * mid + p) * n;
                    for j in 0..n {
                        out[(i, j)] += w * block[base + j];
                    }
                }
            }
            weights = weights.iter().flat_map(|w| x.iter().map(move |xi| w * xi)).collect();
        }
        Ok(out)
    }

    /// Averages every mode-1 slice over permutations of the trailing
    /// indices. The result has the same `A x^{m-1}` as `self`.
    pub fn semi_symmetrize(&self) -> Self {
        if self.symmetry.is_semi_symmetric() || self.order == 2 {
            let symmetry = self.symmetry.max(Symmetry::SemiSymmetric);
            return self.clone().with_symmetry(symmetry);
        }
        let n = self.dim;
        let tail_len = self.data.len() / n;
        let mut canon = Vec::with_capacity(tail_len);
        let mut counts: HashMap<usize, f64> = HashMap::new();
        let mut tail = vec![0usize; self.order - 1];
        let mut sorted = tail.clone();
        for _ in 0..tail_len {
            sorted.copy_from_slice(&tail);
            sorted.sort_unstable();
            let key = sorted.iter().fold(0, |acc, &i| acc * n + i);
            canon.push(key);
            *counts.entry(key).or_insert(0.0) += 1.0;
            increment(&mut tail, n);
        }
        let mut data = vec![0.0; self.data.len()];
        for i in 0..n {
            let slice = &self.data[i * tail_len..(i + 1) * tail_len];
            let mut sums: HashMap<usize, f64> = HashMap::with_capacity(counts.len());
            for (t, &v) in slice.iter().enumerate() {
                *sums.entry(canon[t]).or_insert(0.0) += v;
            }
            for (t, out) in data[i * tail_len..(i + 1) * tail_len].iter_mut().enumerate() {
                let key = canon[t];
                *out = sums[&key] / counts[&key];
            }
        }
        Self { order: self.order, dim: n, data, symmetry: Symmetry::SemiSymmetric }
    }

    /// `max_i √n Σ_{i2..im} |A_{i,i2..im}|`, an upper bound on |λ| over all
    /// Z-eigenvalues.
    pub fn z_bound(&self) -> f64 {
        let n = self.dim;
        let tail_len = self.data.len() / n;
        let max_row =
            self.data.chunks_exact(tail_len).map(|row| row.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
        (n as f64).sqrt() * max_row
    }

    /// Spot-checks the symmetry flag on `samples` random index tuples.
    pub fn verify_symmetry<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> bool {
        let first = match self.symmetry {
            Symmetry::General => return true,
            Symmetry::SemiSymmetric => 1,
            Symmetry::Symmetric => 0,
        };
        let mut idx = vec![0usize; self.order];
        for _ in 0..samples {
            idx.iter_mut().for_each(|i| *i = rng.gen_range(0..self.dim));
            let base = self.get(&idx);
            idx[first..].shuffle(rng);
            let permuted = self.get(&idx);
            if (base - permuted).abs() > 1e-12 * base.abs().max(permuted.abs()).max(1.0) {
                return false;
            }
        }
        true
    }
}

/// Odometer increment of a 0-based multi-index, last index fastest.
pub(crate) fn increment(idx: &mut [usize], dim: usize) {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < dim {
            return;
        }
        *slot = 0;
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Symmetric rank-1 start tensor `x1 ∘ ... ∘ x1`, kept implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank1Symmetric {
    generator: Vec<f64>,
}

impl Rank1Symmetric {
    pub fn new(generator: Vec<f64>) -> Result<Self> {
        if generator.is_empty() {
            return Err(Error::InvalidInput("empty generator".into()));
        }
        if let Some(v) = generator.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput(format!("generator must be strictly positive, found {v}")));
        }
        Ok(Self { generator })
    }

    pub fn generator(&self) -> &[f64] {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.generator)
    }

    pub fn materialize(&self, order: usize) -> Result<DenseTensor> {
        DenseTensor::rank1(&self.generator, order)
    }

    /// `(x1ᵀx)^{m-1} x1`.
    pub fn apply(&self, x: &[f64], order: usize) -> Vec<f64> {
        let s = dot(&self.generator, x).powi(order as i32 - 1);
        self.generator.iter().map(|g| s * g).collect()
    }
}

/// `A(t) x^{m-1}` for `A(t) = (1-t) x1∘...∘x1 + t A`, without forming A(t).
pub fn rank1_apply_fast(start: &Rank1Symmetric, a: &DenseTensor, x: &[f64], t: f64) -> Result<Vec<f64>> {
    if start.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: start.dim() });
    }
    let target = a.apply(x)?;
    let start_part = start.apply(x, a.order());
    Ok(start_part.iter().zip(&target).map(|(s, y)| (1.0 - t) * s + t * y).collect())
}

/// Componentwise power `x^{[ℓ]}`.
///
/// Integer exponents accept any sign; fractional exponents require
/// nonnegative components and map 0 to 0.
pub fn vec_power(x: &[f64], exponent: f64) -> Result<Vec<f64>> {
    if !(exponent > 0.0) || !exponent.is_finite() {
        return Err(Error::Domain(format!("exponent must be positive, got {exponent}")));
    }
    if exponent.fract() == 0.0 && exponent <= i32::MAX as f64 {
        let e = exponent as i32;
        return Ok(x.iter().map(|v| v.powi(e)).collect());
    }
    x.iter()
        .map(|&v| {
            if v < 0.0 {
                Err(Error::Domain(format!("negative component {v} with fractional exponent {exponent}")))
            } else if v == 0.0 {
                Ok(0.0)
            } else {
                Ok(v.powf(exponent))
            }
        })
        .collect()
}
