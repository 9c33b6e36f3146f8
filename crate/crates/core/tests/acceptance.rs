//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::time::Instant;

use common::{circle_oracle, fd_jacobian, random_positive, random_tensor};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teneig::baselines::{nqz, sshopm, DEFAULT_MAX_EVAL};
use teneig::generators::{example_3eig, pagerank, perturb_uniform, scaled_laplacian, signless_laplacian};
use teneig::homotopy::{sample_generator, EigenKind, HomotopyProblem};
use teneig::multi_eigen::{find_odd_z, OddSearchConfig};
use teneig::tensor::{rank1_apply_fast, DenseTensor, Rank1Symmetric, Symmetry};
use teneig::tracker::{track_h, track_z, CurveTrace, Direction, EigenPair, TrackerConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn s3() -> f64 {
    3f64.sqrt()
}

fn forward_z(a: &DenseTensor, seed: u64) -> teneig::Result<(EigenPair, CurveTrace)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = HomotopyProblem::new(a, sample_generator(&mut rng, a.dim(), (0.9, 1.1)), EigenKind::Z)?;
    track_z(&p, &p.start_eigenpair(), Direction::Forward, &TrackerConfig::default())
}

/// The three positive Z-eigenpairs `(λ, x, det sign)` of the 2×2×2×2 example.
fn three_truth() -> [(f64, [f64; 2], i8); 3] {
    let h = 2f64.sqrt() / 2.0;
    [
        (2.0 + 2.0 / s3(), [h, h], 1),
        (11.0 / (2.0 * s3()), [s3() / 2.0, 0.5], -1),
        (11.0 / (2.0 * s3()), [0.5, s3() / 2.0], -1),
    ]
}

fn matches_truth(pairs: &[EigenPair]) -> Result<(), String> {
    if pairs.len() != 3 {
        return Err(format!("{} pairs", pairs.len()));
    }
    for (lam, x, sign) in three_truth() {
        let hit = pairs.iter().find(|p| (p.x[0] - x[0]).abs() + (p.x[1] - x[1]).abs() < 1e-6);
        let Some(p) = hit else { return Err(format!("missing pair at x = {x:?}")) };
        if (p.lambda - lam).abs() > 1e-8 || p.residual > 1e-10 || p.det_sign != sign {
            return Err(format!("pair {p:?} vs λ = {lam}, sign {sign}"));
        }
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let a = example_3eig();
    let start = Instant::now();
    let mut ok = 0;
    let mut first_failure = None;
    for seed in 0..100 {
        let set = find_odd_z(&a, 8, seed, &OddSearchConfig::default()).map_err(|e| e.to_string())?;
        match matches_truth(set.pairs()) {
            Ok(()) => ok += 1,
            Err(e) => {
                first_failure.get_or_insert(format!("seed {seed}: {e}"));
            }
        }
    }
    let msg = format!("{ok}/100 seeds found all 3 pairs in {:.2?}", start.elapsed());
    match first_failure {
        Some(f) if ok >= 95 => Ok(format!("{msg} (first miss {f})")),
        Some(f) => Err(format!("{msg}; {f}")),
        None => Ok(msg),
    }
}

fn criterion_2() -> Outcome {
    let set = find_odd_z(&example_3eig(), 8, 1, &OddSearchConfig::default()).map_err(|e| e.to_string())?;
    let sum: i32 = set.pairs().iter().map(|p| i32::from(p.det_sign)).sum();
    let n = 2;
    let want = if n % 2 == 0 { -1 } else { 1 };
    if set.len() == 3 && sum == want {
        Ok(format!("Σ detSign = {sum} over {} pairs", set.len()))
    } else {
        Err(format!("Σ detSign = {sum} over {} pairs, want {want}", set.len()))
    }
}

fn criterion_3() -> Outcome {
    let mut notes = Vec::new();
    for (alpha, want_tp) in [(0.9, 0), (0.99, 2), (0.999, 2)] {
        let a = pagerank(alpha).map_err(|e| e.to_string())?;
        let mut hits = 0;
        for seed in 0..10 {
            let start = Instant::now();
            let (pair, trace) = forward_z(&a, seed).map_err(|e| format!("α = {alpha}, seed {seed}: {e}"))?;
            if pair.residual > 1e-10 {
                return Err(format!("α = {alpha}, seed {seed}: residual {:.2e}", pair.residual));
            }
            if start.elapsed().as_secs_f64() >= 1.0 {
                return Err(format!("α = {alpha}, seed {seed}: took {:.2?}", start.elapsed()));
            }
            hits += usize::from(trace.turning_points.len() == want_tp);
        }
        if hits <= 5 {
            return Err(format!("α = {alpha}: {hits}/10 runs with {want_tp} turning points"));
        }
        notes.push(format!("α={alpha}: {hits}/10 with {want_tp} TP"));
    }
    Ok(notes.join(", "))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (m, n) in [(3, 20), (4, 20), (5, 20), (3, 50)] {
        let a = signless_laplacian(m, n).map_err(|e| e.to_string())?;
        let gen = vec![(n as f64).powf(-((m - 1) as f64) / m as f64); n];
        let p = HomotopyProblem::new(&a, gen, EigenKind::H).map_err(|e| e.to_string())?;
        let (pair, _) = track_h(&p, &TrackerConfig::default()).map_err(|e| format!("({m},{n}): {e}"))?;
        let base = nqz(&a, &vec![1.0; n], 1e-10, DEFAULT_MAX_EVAL).map_err(|e| e.to_string())?;
        if pair.residual > 1e-10 {
            return Err(format!("({m},{n}): residual {:.2e}", pair.residual));
        }
        if !base.converged {
            return Err(format!("({m},{n}): NQZ did not converge in {DEFAULT_MAX_EVAL} evaluations"));
        }
        let diff = (pair.lambda - base.pair.lambda).abs();
        if diff > 1e-8 {
            return Err(format!("({m},{n}): |λ - λ_NQZ| = {diff:.2e}"));
        }
        worst = worst.max(diff);
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 10.0 {
        return Err(format!("took {elapsed:.2?}"));
    }
    Ok(format!("max |λ - λ_NQZ| = {worst:.1e} in {elapsed:.2?}"))
}

fn criterion_5() -> Outcome {
    let a = scaled_laplacian(1.0, 4, 20).map_err(|e| e.to_string())?;
    let x0: Vec<f64> = (0..20).map(|i| 0.5 + 0.4 * ((i * 7 % 11) as f64 / 11.0)).collect();
    let ss = sshopm(&a, 1.0, &x0, 1e-10, DEFAULT_MAX_EVAL).map_err(|e| e.to_string())?;
    if !ss.converged || (ss.pair.lambda - 4.0).abs() > 1e-8 {
        return Err(format!("SS-HOPM λ = {} (converged: {})", ss.pair.lambda, ss.converged));
    }
    let (pair, trace) = forward_z(&a, 0).map_err(|e| e.to_string())?;
    if (pair.lambda - 4.0).abs() > 1e-6 || pair.residual > 1e-10 {
        return Err(format!("continuation λ = {}, residual {:.2e}", pair.lambda, pair.residual));
    }
    if trace.evaluations > 500 {
        return Err(format!("continuation used {} evaluations", trace.evaluations));
    }
    Ok(format!(
        "SS-HOPM λ = {:.12} ({} evals), continuation λ = {:.12} ({} evals)",
        ss.pair.lambda, ss.evaluations, pair.lambda, trace.evaluations
    ))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // Jacobians at 50 random points per kind.
    for kind in [EigenKind::Z, EigenKind::H] {
        for trial in 0..50 {
            let m = rng.gen_range(2..=5);
            let n = rng.gen_range(1..=4);
            let a = random_tensor(&mut rng, m, n, Symmetry::General, 0.0);
            let p = HomotopyProblem::new(&a, random_positive(&mut rng, n), kind).map_err(|e| e.to_string())?;
            let x = DVector::from_vec(random_positive(&mut rng, n));
            let (lambda, t) = (rng.gen_range(0.1..2.0), rng.gen_range(0.0..1.0));
            let analytic = p.evaluate(&x, lambda, t).full_jacobian();
            let fd = fd_jacobian(&p, &x, lambda, t, 1e-6);
            let rel = (&analytic - &fd).amax() / analytic.amax().max(1.0);
            if rel > 1e-5 {
                return Err(format!("{kind:?} Jacobian trial {trial}: relative error {rel:.2e}"));
            }
        }
    }
    // Euler identity, fast path, semi-symmetrization.
    for trial in 0..50 {
        let m = rng.gen_range(2..=5);
        let n = rng.gen_range(1..=4);
        let a = random_tensor(&mut rng, m, n, Symmetry::General, 0.0);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y = a.apply(&x).map_err(|e| e.to_string())?;
        let s = a.semi_symmetrize();
        let dx = s.derivative(&x).map_err(|e| e.to_string())? * DVector::from_column_slice(&x);
        let ys = s.apply(&x).map_err(|e| e.to_string())?;
        let start = Rank1Symmetric::new(random_positive(&mut rng, n)).map_err(|e| e.to_string())?;
        let t = rng.gen_range(0.0..1.0);
        let fast = rank1_apply_fast(&start, &a, &x, t).map_err(|e| e.to_string())?;
        let slow = start
            .materialize(m)
            .and_then(|a0| a0.linear_combination(1.0 - t, &a, t))
            .and_then(|at| at.apply(&x))
            .map_err(|e| e.to_string())?;
        for i in 0..n {
            if (dx[i] - (m as f64 - 1.0) * y[i]).abs() > 1e-12 {
                return Err(format!("Euler identity trial {trial}"));
            }
            if (fast[i] - slow[i]).abs() > 1e-12 {
                return Err(format!("fast path trial {trial}"));
            }
            if (ys[i] - y[i]).abs() > 1e-13 {
                return Err(format!("semi-symmetrization trial {trial}"));
            }
        }
    }
    // H tracking moves strictly forward in t.
    for trial in 0..10 {
        let (m, n) = (rng.gen_range(3..=4), rng.gen_range(2..=6));
        let a = random_tensor(&mut rng, m, n, Symmetry::General, 0.0);
        let p = HomotopyProblem::new(&a, sample_generator(&mut rng, n, (0.9, 1.1)), EigenKind::H)
            .map_err(|e| e.to_string())?;
        let (_, trace) = track_h(&p, &TrackerConfig::default()).map_err(|e| format!("H trial {trial}: {e}"))?;
        if !trace.points.windows(2).all(|w| w[1].t > w[0].t) {
            return Err(format!("H trial {trial}: t not strictly increasing"));
        }
    }
    // Endpoint degree signs: every forward run ends on sign (-1)^{n-1}; every
    // backward run ends on the opposite sign of the pair it left from, so
    // launches from forward endpoints land on (-1)^n.
    let tensors = [
        example_3eig(),
        signless_laplacian(3, 8).and_then(|l| perturb_uniform(&l, 1e-3)).map_err(|e| e.to_string())?,
        pagerank(0.99).map_err(|e| e.to_string())?,
        random_tensor(&mut rng, 3, 3, Symmetry::Symmetric, 0.05),
        random_tensor(&mut rng, 4, 3, Symmetry::General, 0.05),
        desk_tensor(&mut rng),
    ];
    let cfg = TrackerConfig::default();
    let (mut forward_runs, mut backward_runs, mut from_forward_sign) = (0, 0, 0);
    for (ti, a) in tensors.iter().enumerate() {
        let n = a.dim() as u32;
        let fwd_sign = (-1i8).pow(n - 1);
        let set = find_odd_z(a, 6, 60, &OddSearchConfig::default()).map_err(|e| e.to_string())?;
        for h in 0..4 {
            let gen = sample_generator(&mut rng, a.dim(), (0.9, 1.1));
            let p = HomotopyProblem::new(a, gen, EigenKind::Z).map_err(|e| e.to_string())?;
            let (end, _) = track_z(&p, &p.start_eigenpair(), Direction::Forward, &cfg)
                .map_err(|e| format!("tensor {ti}, forward {h}: {e}"))?;
            if end.det_sign != 0 && end.det_sign != fwd_sign {
                return Err(format!("tensor {ti}: forward endpoint λ = {} has sign {}", end.lambda, end.det_sign));
            }
            forward_runs += 1;
            for q in set.pairs() {
                let same =
                    (q.lambda - end.lambda).abs() + q.x.iter().zip(&end.x).map(|(u, v)| (u - v).abs()).sum::<f64>();
                if same < 1e-6 || q.det_sign == 0 {
                    continue;
                }
                let start = teneig::homotopy::CurvePoint {
                    x: DVector::from_column_slice(&q.x),
                    lambda: q.lambda,
                    t: 1.0,
                    residual_norm: q.residual,
                };
                let (back, _) = track_z(&p, &start, Direction::Backward, &cfg)
                    .map_err(|e| format!("tensor {ti}, backward from λ = {}: {e}", q.lambda))?;
                if back.det_sign == 0 {
                    continue;
                }
                if back.det_sign != -q.det_sign {
                    return Err(format!(
                        "tensor {ti}: backward run from sign {} (λ = {}) ended on sign {} (λ = {})",
                        q.det_sign, q.lambda, back.det_sign, back.lambda
                    ));
                }
                backward_runs += 1;
                from_forward_sign += usize::from(q.det_sign == fwd_sign);
            }
        }
    }
    Ok(format!(
        "Jacobians, Euler, fast path, semi-symmetrization, H monotonicity; endpoint signs on {forward_runs} forward \
         and {backward_runs} backward runs ({from_forward_sign} launched from (-1)^(n-1) pairs)"
    ))
}

/// Symmetric positive `[3,2]` tensor with heavier diagonal entries, so that
/// one, two or three positive Z-eigenpairs all occur.
fn desk_tensor(rng: &mut ChaCha8Rng) -> DenseTensor {
    let diag = [rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)];
    let off = [rng.gen_range(0.02..0.3), rng.gen_range(0.02..0.3)];
    DenseTensor::from_fn(3, 2, Symmetry::Symmetric, |idx| {
        let twos = idx.iter().filter(|&&i| i == 1).count();
        match twos {
            0 => diag[0],
            3 => diag[1],
            k => off[k - 1],
        }
    })
    .unwrap()
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sizes = Vec::new();
    for trial in 0..20 {
        let a = desk_tensor(&mut rng);
        let oracle = circle_oracle(&a);
        let set = find_odd_z(&a, 10, trial, &OddSearchConfig::default()).map_err(|e| e.to_string())?;
        if set.len().is_multiple_of(2) {
            return Err(format!("trial {trial}: {} pairs", set.len()));
        }
        if oracle.len().is_multiple_of(2) {
            return Err(format!("trial {trial}: oracle found {} roots", oracle.len()));
        }
        for p in set.pairs() {
            let hit = oracle.iter().any(|(lam, x)| {
                (p.lambda - lam).abs() <= 1e-7 && p.x.iter().zip(x).all(|(u, v)| (u - v).abs() <= 1e-7)
            });
            if !hit {
                return Err(format!("trial {trial}: λ = {} at {:?} matches no oracle root {oracle:?}", p.lambda, p.x));
            }
        }
        sizes.push(format!("{}/{}", set.len(), oracle.len()));
    }
    Ok(format!("found/oracle per tensor: {}", sizes.join(" ")))
}

fn criterion_8() -> Outcome {
    let a = signless_laplacian(3, 20).map_err(|e| e.to_string())?;
    let mut two = 0;
    let mut max_eval = 0;
    for seed in 0..10 {
        let (pair, trace) = forward_z(&a, seed).map_err(|e| format!("seed {seed}: {e}"))?;
        if pair.residual > 1e-10 {
            return Err(format!("seed {seed}: residual {:.2e}", pair.residual));
        }
        if trace.evaluations > 5 * 67 {
            return Err(format!("seed {seed}: {} evaluations", trace.evaluations));
        }
        max_eval = max_eval.max(trace.evaluations);
        two += usize::from(trace.turning_points.len() == 2);
    }
    if two <= 5 {
        return Err(format!("{two}/10 runs with 2 turning points"));
    }
    Ok(format!("{two}/10 runs with 2 turning points, max #(Eval) {max_eval}"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("three-eigenpair ground truth, 100 seeds", criterion_1),
        ("degree identity", criterion_2),
        ("multilinear PageRank", criterion_3),
        ("H-eigenpair vs NQZ", criterion_4),
        ("SS-HOPM cross-check", criterion_5),
        ("property suite", criterion_6),
        ("oracle equivalence on [3,2] tensors", criterion_7),
        ("Z-runs on the m=3, n=20 Laplacian", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
