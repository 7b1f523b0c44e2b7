//! Independent oracles for the sphere maximum and the ranking permutation.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankcollide::conditions::sphere_max;
use rankcollide::model::rank_permutation;

/// Largest eigenvalue of `P D P` with `P = I - 11'/N`, an `N x N` dense
/// matrix. Its eigenvalue on the all-ones direction is 0 < min d.
fn dense_projected_max(d: &[f64]) -> f64 {
    let n = d.len();
    let p = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64);
    let m = &p * DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)) * &p;
    SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Points of the zero-sum unit sphere: uniform draws in the cube, kept when
/// inside the unit ball, then centred and normalized.
fn sample_sphere(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        if v.iter().map(|a| a * a).sum::<f64>() > 1.0 {
            continue;
        }
        let mean = v.iter().sum::<f64>() / n as f64;
        let c: Vec<f64> = v.iter().map(|a| a - mean).collect();
        let norm = c.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        return c.into_iter().map(|a| a / norm).collect();
    }
}

fn form(d: &[f64], x: &[f64]) -> f64 {
    d.iter().zip(x).map(|(a, b)| a * b * b).sum()
}

#[test]
fn closed_form_two_one_one_one() {
    // Maximize 1 + x_1^2 with x_1 = -3t, others t: 12 t^2 = 1 gives x_1^2 = 3/4.
    let d = [2.0, 1.0, 1.0, 1.0];
    let t = (1.0f64 / 12.0).sqrt();
    let x = [3.0 * t, -t, -t, -t];
    assert!((form(&d, &x) - 1.75).abs() < 1e-15);
    assert!((sphere_max(&d).unwrap() - 1.75).abs() < 1e-9);
    assert!((dense_projected_max(&d) - 1.75).abs() < 1e-9);
}

#[test]
fn agrees_with_dense_eigensolve() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let n = rng.random_range(2..=12);
        let d: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random_range(-1.0..1.0))).collect();
        let a = sphere_max(&d).unwrap();
        let b = dense_projected_max(&d);
        assert!((a - b).abs() < 1e-9, "{d:?}: {a} vs {b}");
    }
}

#[test]
fn no_sample_exceeds_the_maximum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..=6 {
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..5.0)).collect();
        let top = sphere_max(&d).unwrap();
        let best = (0..200_000).map(|_| form(&d, &sample_sphere(&mut rng, n))).fold(f64::NEG_INFINITY, f64::max);
        assert!(best <= top + 1e-9, "n={n}: sample {best} > {top}");
        assert!(top - best < 0.05, "n={n}: samples never approach {top} (best {best})");
    }
}

#[test]
fn ranking_matches_stable_sort_with_ties() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..2000 {
        let n = rng.random_range(1..=8);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..4) as f64 * 0.5).collect();
        let mut oracle: Vec<usize> = (0..n).collect();
        oracle.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
        assert_eq!(rank_permutation(&x).unwrap().names(), oracle.as_slice());
    }
}
