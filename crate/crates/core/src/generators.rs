//! Test tensors: signless Laplacians of cyclic uniform hypergraphs, the
//! 6-state multilinear PageRank tensor and a 4th-order 2-dimensional tensor
//! with exactly three positive Z-eigenpairs.

use crate::error::{Error, Result};
use crate::tensor::{increment, DenseTensor, Symmetry};

/// An m-uniform hypergraph on vertices 1..=n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypergraphSpec {
    m: usize,
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl HypergraphSpec {
    /// Edges use 1-based vertex labels.
    pub fn new(m: usize, n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if m < 2 || n < m {
            return Err(Error::InvalidInput(format!("need 2 <= m <= n, got m={m}, n={n}")));
        }
        for e in &edges {
            let mut sorted = e.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if e.len() != m || sorted.len() != m {
                return Err(Error::InvalidInput(format!("edge {e:?} must have {m} distinct vertices")));
            }
            if sorted[0] < 1 || sorted[m - 1] > n {
                return Err(Error::InvalidInput(format!("edge {e:?} has a vertex outside 1..={n}")));
            }
        }
        Ok(Self { m, n, edges })
    }

    /// Edges `{i-m+2, ..., i+1}` for `i = m-1..=n`, with vertex n+1 read as 1.
    pub fn cyclic(m: usize, n: usize) -> Result<Self> {
        if m < 2 || n < m {
            return Err(Error::InvalidInput(format!("need 2 <= m <= n, got m={m}, n={n}")));
        }
        let edges =
            (m - 1..=n).map(|i| (i + 2 - m..=i + 1).map(|v| if v == n + 1 { 1 } else { v }).collect()).collect();
        Self::new(m, n, edges)
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            for &v in e {
                deg[v - 1] += 1;
            }
        }
        deg
    }

    /// Diagonal tensor of vertex degrees.
    pub fn degree_tensor(&self) -> DenseTensor {
        let mut d = DenseTensor::zeros(self.m, self.n).expect("validated size");
        for (i, deg) in self.degrees().into_iter().enumerate() {
            d.set(&vec![i; self.m], deg as f64);
        }
        d
    }

    /// Adjacency tensor with `1/(m-1)!` on every ordering of every edge.
    pub fn adjacency_tensor(&self) -> DenseTensor {
        let m = self.m;
        let weight = 1.0 / (1..m).map(|k| k as f64).product::<f64>();
        let mut c = DenseTensor::zeros(m, self.n).expect("validated size");
        for e in &self.edges {
            let verts: Vec<usize> = e.iter().map(|v| v - 1).collect();
            for perm in permutations(&verts) {
                c.set(&perm, weight);
            }
        }
        c
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Signless Laplacian `D + C` of the cyclic m-uniform hypergraph on n vertices.
pub fn signless_laplacian(m: usize, n: usize) -> Result<DenseTensor> {
    scaled_laplacian(1.0, m, n)
}

/// `D + w C` for the cyclic hypergraph.
pub fn scaled_laplacian(w: f64, m: usize, n: usize) -> Result<DenseTensor> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::InvalidInput(format!("weight must be positive, got {w}")));
    }
    let g = HypergraphSpec::cyclic(m, n)?;
    let a = g.degree_tensor().linear_combination(1.0, &g.adjacency_tensor(), w)?;
    Ok(a.with_symmetry(Symmetry::Symmetric))
}

/// `A + eps * E` with E the all-ones tensor; makes any nonnegative tensor
/// positive, hence irreducible.
pub fn perturb_uniform(a: &DenseTensor, eps: f64) -> Result<DenseTensor> {
    let data = a.data().iter().map(|v| v + eps).collect();
    DenseTensor::new(a.order(), a.dim(), data, a.symmetry())
}

/// Column-unfolded transition data `[P(:,:,1) | ... | P(:,:,6)]`, row i is
/// the next state, column 6(k-1)+j holds P(i, j, k).
const PAGERANK_UNFOLDING: [[u8; 36]; 6] = [
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 1, 0],
    [1, 1, 1, 1, 1, 1, 1, 0, 0, 1, 1, 0, 1, 0, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0],
];

/// The transition tensor P: the 0-1 unfolding with each column `P(:, j, k)`
/// scaled to sum to 1.
pub fn pagerank_transition() -> Result<DenseTensor> {
    const N: usize = 6;
    let mut sums = [0u32; N * N];
    for (col, total) in sums.iter_mut().enumerate() {
        *total = PAGERANK_UNFOLDING.iter().map(|row| u32::from(row[col])).sum();
        if *total == 0 {
            return Err(Error::InvalidInput(format!("transition column {} is empty", col + 1)));
        }
    }
    DenseTensor::from_fn(3, N, Symmetry::General, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        f64::from(PAGERANK_UNFOLDING[i][N * k + j]) / f64::from(sums[N * k + j])
    })
}

/// `α P + (1-α) v∘e∘e` with `v = e/6`.
pub fn pagerank(alpha: f64) -> Result<DenseTensor> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let p = pagerank_transition()?;
    let data = p.data().iter().map(|v| alpha * v + (1.0 - alpha) / 6.0).collect();
    DenseTensor::new(3, 6, data, Symmetry::General)
}

/// Symmetric 4th-order, 2-dimensional tensor whose Z-system is
///
/// ```text
/// 4/√3 x1³ + 3 x1² x2 + x2³ - λ x1 = 0
/// 4/√3 x2³ + 3 x1 x2² + x1³ - λ x2 = 0
/// x1² + x2² - 1 = 0
/// ```
///
/// Entries with index multiset {1,1,1,2} or {1,2,2,2} are 1, the two
/// diagonal entries are 4/√3 and everything else is 0.
pub fn example_3eig() -> DenseTensor {
    let diag = 4.0 / 3f64.sqrt();
    DenseTensor::from_fn(4, 2, Symmetry::Symmetric, |idx| {
        let twos = idx.iter().filter(|&&i| i == 1).count();
        match twos {
            0 | 4 => diag,
            1 | 3 => 1.0,
            _ => 0.0,
        }
    })
    .expect("fixed size")
}

/// Coefficients of each component of `A x^{m-1}` for n = 2, keyed by the
/// exponent of x2. Used to check a tensor against a printed polynomial.
pub fn polynomial_coefficients_2d(a: &DenseTensor) -> Vec<Vec<f64>> {
    let m = a.order();
    assert_eq!(a.dim(), 2);
    let mut coeffs = vec![vec![0.0; m]; 2];
    let mut tail = vec![0usize; m - 1];
    for _ in 0..1usize << (m - 1) {
        let power2 = tail.iter().filter(|&&i| i == 1).count();
        for (i, row) in coeffs.iter_mut().enumerate() {
            let mut idx = vec![i];
            idx.extend_from_slice(&tail);
            row[power2] += a.get(&idx);
        }
        increment(&mut tail, 2);
    }
    coeffs
}
