mod oracles;

use ndarray::{Array2, ArrayView2};
use ordfuzz::data::{hard_assignment, MembershipMatrix};
use ordfuzz::fcm::{fcm_memberships, fcm_objective, fcm_run, FcmConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((n, dim), || rng.random_range(-5.0..5.0))
}

fn squared_distances(points: ArrayView2<'_, f64>, centroids: ArrayView2<'_, f64>) -> Vec<Vec<f64>> {
    centroids
        .outer_iter()
        .map(|v| {
            points
                .outer_iter()
                .map(|x| x.iter().zip(v.iter()).map(|(a, b)| (a - b) * (a - b)).sum())
                .collect()
        })
        .collect()
}

#[test]
fn objective_never_increases() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..50 {
        let pts = random_points(&mut rng, 40, 2);
        let cfg = FcmConfig { clusters: 3, seed, ..Default::default() };
        let res = fcm_run(pts.view(), &cfg).unwrap();
        for w in res.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "seed {seed}: {} -> {}", w[0], w[1]);
        }
        for row in res.memberships.as_array().outer_iter() {
            assert!((row.sum() - 1.0).abs() <= 1e-9);
        }
    }
}

#[test]
fn closed_form_memberships_beat_random_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let pts = random_points(&mut rng, 12, 2);
        let cents = random_points(&mut rng, 3, 2);
        let d = squared_distances(pts.view(), cents.view());
        let w = fcm_memberships(pts.view(), cents.view(), 2.0);
        let q = fcm_objective(pts.view(), cents.view(), &w, 2.0);
        assert!((q - oracles::weighted_sum(&w.to_rows(), &d, 2.0)).abs() <= 1e-9);
        for _ in 0..1000 {
            let r = oracles::random_stochastic(&mut rng, 12, 3);
            assert!(q <= oracles::weighted_sum(&r, &d, 2.0) + 1e-12);
        }
    }
}

#[test]
fn translation_equivariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pts = random_points(&mut rng, 30, 2);
    let shift = ndarray::array![7.5, -3.25];
    let moved = &pts + &shift;
    let cfg = FcmConfig { clusters: 3, seed: 9, ..Default::default() };
    let a = fcm_run(pts.view(), &cfg).unwrap();
    let b = fcm_run(moved.view(), &cfg).unwrap();
    assert!(a.memberships.max_abs_diff(&b.memberships) <= 1e-9);
    let diff = &b.centroids - &(&a.centroids + &shift);
    assert!(diff.iter().all(|d| d.abs() <= 1e-9));
}

#[test]
fn blobs_match_exhaustive_partition() {
    let pts = [0.0, 0.1, 10.0, 10.1];
    let winners = oracles::best_sse_partitions(&pts);
    assert_eq!(winners, vec![vec![0, 0, 1, 1]]);
    let arr = Array2::from_shape_vec((4, 1), pts.to_vec()).unwrap();
    for seed in 0..20 {
        let res = fcm_run(arr.view(), &FcmConfig { seed, ..Default::default() }).unwrap();
        assert_eq!(oracles::canonical_two(&hard_assignment(&res.memberships)), winners[0]);
    }
}

#[test]
fn hand_examples() {
    let w = fcm_memberships(ndarray::array![[0.0]].view(), ndarray::array![[1.0], [3.0]].view(), 2.0);
    let r = &w.to_rows()[0];
    assert!((r[0] - 0.9).abs() <= 1e-9 && (r[1] - 0.1).abs() <= 1e-9);
    let w = MembershipMatrix::from_rows(&[vec![0.8, 0.2], vec![0.2, 0.8]]).unwrap();
    let v = ordfuzz::fcm::fcm_centroids(ndarray::array![[0.0], [1.0]].view(), &w, 2.0).unwrap();
    assert!((v[(0, 0)] - 0.04 / 0.68).abs() <= 1e-9);
}
