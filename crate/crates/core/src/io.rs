//! Tensor text files, eigenpair JSON reports and curve-trace CSV.
//!
//! Tensor files list the order and dimension on the first data line and one
//! nonzero per following line as 1-based indices plus a value:
//!
//! ```text
//! # symmetry: symmetric
//! 3 2
//! 1 1 1 2.0
//! 2 2 2 1.5
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multi_eigen::{EigenSet, Provenance};
use crate::tensor::{DenseTensor, Symmetry};
use crate::tracker::{CurveTrace, EigenPair};

/// Largest number of dense entries accepted from a file.
pub const MAX_ENTRIES: usize = 1 << 31;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_symmetry(value: &str, line: usize) -> Result<Symmetry> {
    match value.trim().to_ascii_lowercase().as_str() {
        "symmetric" => Ok(Symmetry::Symmetric),
        "semisymmetric" | "semi-symmetric" => Ok(Symmetry::SemiSymmetric),
        "general" => Ok(Symmetry::General),
        other => Err(parse_err(line, format!("unknown symmetry '{other}'"))),
    }
}

/// Parses the text format. Entries must be nonnegative; a declared symmetry
/// is spot-checked on 100 random index permutations.
pub fn parse_tensor(text: &str) -> Result<DenseTensor> {
    let mut symmetry = Symmetry::General;
    let mut header: Option<(usize, usize)> = None;
    let mut data = Vec::new();
    let mut seen = HashSet::new();

    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once(':') {
                if key.trim().eq_ignore_ascii_case("symmetry") {
                    symmetry = parse_symmetry(value, line_no)?;
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some((m, n)) = header else {
            if fields.len() != 2 {
                return Err(parse_err(line_no, "expected header 'm n'"));
            }
            let m: usize = fields[0].parse().map_err(|_| parse_err(line_no, "bad order"))?;
            let n: usize = fields[1].parse().map_err(|_| parse_err(line_no, "bad dimension"))?;
            if m < 2 || n < 1 {
                return Err(parse_err(line_no, format!("need m >= 2 and n >= 1, got {m} {n}")));
            }
            let len = (0..m).try_fold(1usize, |acc, _| acc.checked_mul(n).filter(|l| *l <= MAX_ENTRIES));
            let len = len.ok_or_else(|| parse_err(line_no, format!("n^m exceeds {MAX_ENTRIES} entries")))?;
            header = Some((m, n));
            data = vec![0.0; len];
            continue;
        };
        if fields.len() != m + 1 {
            return Err(parse_err(line_no, format!("expected {m} indices and a value")));
        }
        let mut lin = 0usize;
        for f in &fields[..m] {
            let i: usize = f.parse().map_err(|_| parse_err(line_no, format!("bad index '{f}'")))?;
            if i < 1 || i > n {
                return Err(parse_err(line_no, format!("index {i} outside 1..={n}")));
            }
            lin = lin * n + (i - 1);
        }
        let value: f64 = fields[m].parse().map_err(|_| parse_err(line_no, format!("bad value '{}'", fields[m])))?;
        if !value.is_finite() {
            return Err(parse_err(line_no, "non-finite value"));
        }
        if value < 0.0 {
            return Err(parse_err(line_no, format!("negative entry {value}")));
        }
        if !seen.insert(lin) {
            return Err(parse_err(line_no, "duplicate index tuple"));
        }
        data[lin] = value;
    }
    let (m, n) = header.ok_or_else(|| parse_err(0, "missing header"))?;
    let tensor = DenseTensor::new(m, n, data, symmetry)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    if !tensor.verify_symmetry(&mut rng, 100) {
        return Err(Error::InvalidInput(format!("entries are not {symmetry:?} as declared")));
    }
    Ok(tensor)
}

/// Canonical text: symmetry comment (unless general), header, nonzeros in
/// row-major order with shortest round-trip floats.
pub fn format_tensor(a: &DenseTensor) -> String {
    let mut out = String::new();
    match a.symmetry() {
        Symmetry::General => {}
        Symmetry::SemiSymmetric => out.push_str("# symmetry: semisymmetric\n"),
        Symmetry::Symmetric => out.push_str("# symmetry: symmetric\n"),
    }
    let _ = writeln!(out, "{} {}", a.order(), a.dim());
    for (lin, v) in a.data().iter().enumerate() {
        if *v != 0.0 {
            for i in a.multi_index(lin) {
                let _ = write!(out, "{} ", i + 1);
            }
            let _ = writeln!(out, "{v:?}");
        }
    }
    out
}

pub fn read_tensor(path: &Path) -> Result<DenseTensor> {
    parse_tensor(&std::fs::read_to_string(path)?)
}

pub fn write_tensor(path: &Path, a: &DenseTensor) -> Result<()> {
    std::fs::write(path, format_tensor(a))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct PairRecord {
    pub lambda: f64,
    pub x: Vec<f64>,
    pub residual: f64,
    #[serde(rename = "detSign")]
    pub det_sign: i8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl PairRecord {
    pub fn new(pair: &EigenPair, provenance: Option<Provenance>) -> Self {
        Self { lambda: pair.lambda, x: pair.x.clone(), residual: pair.residual, det_sign: pair.det_sign, provenance }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub count: usize,
    pub odd: bool,
    pub skipped_branches: usize,
}

/// Run statistics; fields that do not apply to a solver are omitted.
#[derive(Debug, Clone, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunStats {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub turning_points: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub kind: String,
    pub pairs: Vec<PairRecord>,
    pub summary: Summary,
    #[serde(flatten)]
    pub stats: RunStats,
}

impl Report {
    pub fn single(kind: &str, pair: &EigenPair, stats: RunStats) -> Self {
        Self {
            kind: kind.to_string(),
            pairs: vec![PairRecord::new(pair, None)],
            summary: Summary { count: 1, odd: true, skipped_branches: 0 },
            stats,
        }
    }

    pub fn from_set(set: &EigenSet) -> Self {
        let pairs = set.pairs().iter().zip(set.provenance()).map(|(p, prov)| PairRecord::new(p, Some(*prov))).collect();
        Self {
            kind: "Z".into(),
            pairs,
            summary: Summary { count: set.len(), odd: set.is_odd(), skipped_branches: set.skipped().len() },
            stats: RunStats::default(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes `step,t,lambda,x_1..x_n,tangent_t,residual,turning_point`.
pub fn write_trace_csv<W: Write>(trace: &CurveTrace, mut out: W) -> Result<()> {
    let n = trace.points.first().map_or(0, |p| p.x.len());
    let mut header = String::from("step,t,lambda");
    for i in 1..=n {
        let _ = write!(header, ",x_{i}");
    }
    header.push_str(",tangent_t,residual,turning_point");
    writeln!(out, "{header}")?;
    let turning: HashSet<usize> = trace.turning_points.iter().map(|tp| tp.index).collect();
    for (step, (p, tan)) in trace.points.iter().zip(&trace.tangents).enumerate() {
        let mut row = format!("{step},{:?},{:?}", p.t, p.lambda);
        for v in p.x.iter() {
            let _ = write!(row, ",{v:?}");
        }
        let tangent_t = tan[tan.len() - 1];
        let _ = write!(row, ",{tangent_t:?},{:?},{}", p.residual_norm, u8::from(turning.contains(&step)));
        writeln!(out, "{row}")?;
    }
    Ok(())
}
