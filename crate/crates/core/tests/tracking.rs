mod common;

use common::random_tensor;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use teneig::baselines::sshopm;
use teneig::generators::{example_3eig, pagerank, scaled_laplacian, signless_laplacian};
use teneig::homotopy::{sample_generator, EigenKind, HomotopyProblem};
use teneig::multi_eigen::{find_odd_z, OddSearchConfig};
use teneig::tensor::{DenseTensor, Symmetry};
use teneig::tracker::{track_h, track_z, CurveTrace, Direction, TrackerConfig};

fn z_runs(a: &DenseTensor, seeds: std::ops::Range<u64>) -> Vec<(f64, CurveTrace)> {
    seeds
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = HomotopyProblem::new(a, sample_generator(&mut rng, a.dim(), (0.9, 1.1)), EigenKind::Z).unwrap();
            let (pair, trace) =
                track_z(&p, &p.start_eigenpair(), Direction::Forward, &TrackerConfig::default()).unwrap();
            (pair.lambda, trace)
        })
        .collect()
}

#[test]
fn accepted_points_lie_on_the_curve_with_continuous_orientation() {
    let cfg = TrackerConfig::default();
    for a in [example_3eig(), pagerank(0.999).unwrap(), signless_laplacian(3, 12).unwrap()] {
        for (_, trace) in z_runs(&a, 0..4) {
            for pt in &trace.points {
                assert!(pt.residual_norm <= cfg.newton_tol);
                assert!((pt.x.norm() - 1.0).abs() <= 10.0 * cfg.newton_tol);
            }
            assert!(trace.tangents.windows(2).all(|w| w[0].dot(&w[1]) > 0.0));
            assert_eq!(trace.turning_points.len(), trace.t_sign_changes());
        }
    }
}

#[test]
fn z_bound_dominates_every_eigenvalue_found() {
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let tensors = [
        example_3eig(),
        pagerank(0.99).unwrap(),
        scaled_laplacian(5.0, 4, 10).unwrap(),
        random_tensor(&mut rng, 3, 4, Symmetry::General, 0.0),
    ];
    for a in &tensors {
        let bound = a.z_bound();
        for (lambda, _) in z_runs(a, 0..5) {
            assert!(lambda.abs() <= bound, "{lambda} > {bound}");
        }
    }
    let set = find_odd_z(&example_3eig(), 8, 3, &OddSearchConfig::default()).unwrap();
    assert!(set.pairs().iter().all(|p| p.lambda.abs() <= example_3eig().z_bound()));
}

#[test]
fn h_curves_keep_positive_eigenvalue_and_increasing_t() {
    for (m, n) in [(3, 10), (4, 8)] {
        let a = signless_laplacian(m, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(m as u64 * 100 + n as u64);
        let p = HomotopyProblem::new(&a, sample_generator(&mut rng, n, (0.9, 1.1)), EigenKind::H).unwrap();
        let (pair, trace) = track_h(&p, &TrackerConfig::default()).unwrap();
        assert!(pair.residual <= 1e-10);
        assert!(trace.points.iter().all(|pt| pt.lambda > 0.0));
        assert!(trace.points.windows(2).all(|w| w[1].t > w[0].t));
        assert!(trace.turning_points.is_empty());
    }
}

#[test]
fn sshopm_pair_belongs_to_the_odd_set() {
    let a = example_3eig();
    let set = find_odd_z(&a, 8, 5, &OddSearchConfig::default()).unwrap();
    for x0 in [[1.0, 0.2], [0.2, 1.0], [1.0, 1.0]] {
        let r = sshopm(&a, 1.0, &x0, 1e-12, 5000).unwrap();
        assert!(r.converged);
        assert!(set.find(&r.pair).is_some(), "{:?}", r.pair);
    }
}

#[test]
fn scaled_laplacian_table_values() {
    let (lambda, trace) = z_runs(&scaled_laplacian(5.0, 4, 20).unwrap(), 0..1).remove(0);
    assert!((lambda - 2.95).abs() <= 2e-2, "{lambda}");
    assert!(trace.evaluations <= 500);
}
