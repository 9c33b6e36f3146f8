//! Search for an odd number of positive Z-eigenpairs of an irreducible
//! nonnegative tensor.
//!
//! Forward tracks from k generic rank-1 starts all end on eigenpairs whose
//! bordered Jacobian has determinant sign (-1)^(n-1). Starting homotopy i
//! backwards from the endpoint of a different homotopy j follows a curve
//! that returns to t = 1 on a new eigenpair of the opposite sign. Repeating
//! the pairing over newly found eigenpairs closes the set.

use std::collections::{HashSet, VecDeque};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homotopy::{sample_generator, target_jacobian, CurvePoint, EigenKind, HomotopyProblem};
use crate::linalg::{factor, SINGULAR_PIVOT};
use crate::tensor::DenseTensor;
use crate::tracker::{track_z, Direction, EigenPair, TrackerConfig, ACCEPT_RESIDUAL};

/// Where a stored eigenpair came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    /// Index of the rank-1 start whose homotopy produced the pair.
    pub start_index: usize,
    pub direction: Direction,
    /// For backward tracks, the stored pair the track was launched from.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from_pair: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SkippedBranch {
    pub start_index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from_pair: Option<usize>,
    pub reason: String,
}

/// Distinct Z-eigenpairs with their provenance.
#[derive(Debug, Clone)]
pub struct EigenSet {
    pairs: Vec<EigenPair>,
    provenance: Vec<Provenance>,
    dedupe_tol: f64,
    canonical_sign: bool,
    skipped: Vec<SkippedBranch>,
}

impl EigenSet {
    /// `canonical_sign` flips each eigenvector to a positive first nonzero
    /// component before comparison; only valid for even order, where
    /// `(λ, -x)` is an eigenpair whenever `(λ, x)` is.
    pub fn new(dedupe_tol: f64, canonical_sign: bool) -> Self {
        Self { pairs: Vec::new(), provenance: Vec::new(), dedupe_tol, canonical_sign, skipped: Vec::new() }
    }

    pub fn pairs(&self) -> &[EigenPair] {
        &self.pairs
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn skipped(&self) -> &[SkippedBranch] {
        &self.skipped
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.pairs.len() % 2 == 1
    }

    /// True when no branch was skipped, so the odd count is expected.
    pub fn complete(&self) -> bool {
        self.skipped.is_empty()
    }

    fn canonicalize(&self, mut pair: EigenPair) -> EigenPair {
        if self.canonical_sign {
            if let Some(first) = pair.x.iter().find(|v| **v != 0.0) {
                if *first < 0.0 {
                    pair.x.iter_mut().for_each(|v| *v = -*v);
                }
            }
        }
        pair
    }

    /// Index of a stored pair within `dedupe_tol` of `pair`.
    pub fn find(&self, pair: &EigenPair) -> Option<usize> {
        let pair = self.canonicalize(pair.clone());
        self.pairs.iter().position(|q| {
            let dx: f64 = q.x.iter().zip(&pair.x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            dx + (q.lambda - pair.lambda).abs() < self.dedupe_tol
        })
    }

    /// Inserts unless a stored pair lies within `dedupe_tol`; returns
    /// whether the pair was new.
    pub fn dedupe_insert(&mut self, pair: EigenPair, provenance: Provenance) -> bool {
        self.insert_or_find(pair, provenance).1
    }

    fn insert_or_find(&mut self, pair: EigenPair, provenance: Provenance) -> (usize, bool) {
        if let Some(i) = self.find(&pair) {
            return (i, false);
        }
        let pair = self.canonicalize(pair);
        self.pairs.push(pair);
        self.provenance.push(provenance);
        (self.pairs.len() - 1, true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct OddSearchConfig {
    pub tracker: TrackerConfig,
    pub dedupe_tol: f64,
    /// Rounds of backward pairing after the forward tracks.
    pub max_phases: usize,
    pub norm_range: (f64, f64),
    pub threads: usize,
}

impl Default for OddSearchConfig {
    fn default() -> Self {
        Self { tracker: TrackerConfig::default(), dedupe_tol: 1e-8, max_phases: 3, norm_range: (0.9, 1.1), threads: 1 }
    }
}

/// Sign of `det D_{x,λ} F_Z` at the pair; 0 when numerically singular.
pub fn det_sign(a: &DenseTensor, pair: &EigenPair) -> Result<i8> {
    let j = target_jacobian(a, EigenKind::Z, &pair.x, pair.lambda)?;
    Ok(factor(j).det_sign(SINGULAR_PIVOT))
}

/// Irreducibility: no nonempty proper index set S with `A_{i1..im} = 0`
/// whenever `i1 ∈ S` and every trailing index lies outside S.
///
/// Such an S exists iff some single vertex fails to generate everything
/// under the closure "add i once one of its support tails lies inside the
/// current set", because the complement of S is closed under that rule.
pub fn is_irreducible(a: &DenseTensor) -> bool {
    let n = a.dim();
    if n == 1 {
        return true;
    }
    let supports = support_tails(a);
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, (_, tail)) in supports.iter().enumerate() {
        for &j in tail {
            containing[j].push(k);
        }
    }
    (0..n).all(|v| {
        let mut inside = vec![false; n];
        let mut missing: Vec<usize> = supports.iter().map(|(_, t)| t.len()).collect();
        let mut queue = VecDeque::from([v]);
        inside[v] = true;
        let mut reached = 1;
        while let Some(j) = queue.pop_front() {
            for &k in &containing[j] {
                missing[k] -= 1;
                let head = supports[k].0;
                if missing[k] == 0 && !inside[head] {
                    inside[head] = true;
                    reached += 1;
                    queue.push_back(head);
                }
            }
        }
        reached == n
    })
}

/// Distinct `(i1, set{i2..im})` over the nonzero entries.
fn support_tails(a: &DenseTensor) -> Vec<(usize, Vec<usize>)> {
    let mut seen = HashSet::new();
    for (lin, v) in a.data().iter().enumerate() {
        if *v == 0.0 {
            continue;
        }
        let idx = a.multi_index(lin);
        let mut tail = idx[1..].to_vec();
        tail.sort_unstable();
        tail.dedup();
        seen.insert((idx[0], tail));
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    out
}

/// Weak irreducibility: the representation matrix, with an arc i → j
/// whenever some nonzero `A_{i, i2..im}` has j among its trailing indices,
/// is strongly connected.
pub fn is_weakly_irreducible(a: &DenseTensor) -> bool {
    let n = a.dim();
    let mut arcs = vec![vec![false; n]; n];
    for (lin, v) in a.data().iter().enumerate() {
        if *v != 0.0 {
            let idx = a.multi_index(lin);
            for &j in &idx[1..] {
                arcs[idx[0]][j] = true;
            }
        }
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let arc = if forward { arcs[i][j] } else { arcs[j][i] };
                if arc && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Forward-tracks k generic homotopies, then backward-tracks homotopy i from
/// every stored eigenpair other than its own endpoint, for up to
/// `max_phases` rounds or until a round finds nothing new.
pub fn find_odd_z(a: &DenseTensor, k: usize, seed: u64, cfg: &OddSearchConfig) -> Result<EigenSet> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    a.require_nonnegative()?;
    cfg.tracker.validate()?;
    if !is_irreducible(a) {
        return Err(Error::Reducible);
    }
    let n = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let problems = (0..k)
        .map(|_| HomotopyProblem::new(a, sample_generator(&mut rng, n, cfg.norm_range), EigenKind::Z))
        .collect::<Result<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;

    let mut set = EigenSet::new(cfg.dedupe_tol, a.order().is_multiple_of(2));
    let forward: Vec<_> = pool.install(|| {
        problems
            .par_iter()
            .map(|p| track_z(p, &p.start_eigenpair(), Direction::Forward, &cfg.tracker).map(|(pair, _)| pair))
            .collect()
    });
    let mut endpoint = vec![None; k];
    for (i, result) in forward.into_iter().enumerate() {
        let prov = Provenance { start_index: i, direction: Direction::Forward, from_pair: None };
        match accept(result) {
            Ok(pair) => endpoint[i] = Some(set.insert_or_find(pair, prov).0),
            Err(reason) => set.skipped.push(SkippedBranch { start_index: i, from_pair: None, reason }),
        }
    }

    let budget = k * (k - 1);
    let mut launched: HashSet<(usize, usize)> = HashSet::new();
    for _ in 0..cfg.max_phases {
        let mut jobs = Vec::new();
        for (i, own) in endpoint.iter().enumerate() {
            let Some(own) = *own else { continue };
            for q in 0..set.len() {
                if q != own && !launched.contains(&(i, q)) {
                    jobs.push((i, q));
                }
            }
        }
        jobs.truncate(budget);
        if jobs.is_empty() {
            break;
        }
        launched.extend(jobs.iter().copied());
        let results: Vec<_> = pool.install(|| {
            jobs.par_iter()
                .map(|&(i, q)| {
                    let from = &set.pairs[q];
                    let start = CurvePoint {
                        x: DVector::from_column_slice(&from.x),
                        lambda: from.lambda,
                        t: 1.0,
                        residual_norm: from.residual,
                    };
                    track_z(&problems[i], &start, Direction::Backward, &cfg.tracker).map(|(pair, _)| pair)
                })
                .collect()
        });
        let mut found = 0;
        for (&(i, q), result) in jobs.iter().zip(results) {
            let prov = Provenance { start_index: i, direction: Direction::Backward, from_pair: Some(q) };
            match accept(result) {
                Ok(pair) => found += usize::from(set.insert_or_find(pair, prov).1),
                Err(reason) => set.skipped.push(SkippedBranch { start_index: i, from_pair: Some(q), reason }),
            }
        }
        if found == 0 {
            break;
        }
    }
    Ok(set)
}

fn accept(result: Result<EigenPair>) -> std::result::Result<EigenPair, String> {
    match result {
        Ok(pair) if pair.residual <= ACCEPT_RESIDUAL => Ok(pair),
        Ok(pair) => Err(format!("endpoint residual {:.3e}", pair.residual)),
        Err(e) => Err(e.to_string()),
    }
}
