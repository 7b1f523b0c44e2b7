//! Maximum of a diagonal quadratic form over the unit sphere of the
//! zero-sum hyperplane.

use crate::error::{invalid, Result};

/// `max { sum_k d_k x_k^2 : sum_k x_k = 0, |x| = 1 }`.
///
/// The hyperplane basis comes from the Householder reflection that sends
/// `e_1` to `-1/sqrt(N)`; its remaining columns are orthonormal and
/// orthogonal to the all-ones vector. The projected `(N-1)x(N-1)` matrix is
/// then diagonalized by cyclic Jacobi rotations.
pub fn sphere_max(d: &[f64]) -> Result<f64> {
    let n = d.len();
    if n < 2 {
        return Err(invalid(format!("need at least 2 coefficients, got {n}")));
    }
    if let Some(k) = d.iter().position(|v| !v.is_finite()) {
        return Err(invalid(format!("coefficient {} is not finite", k + 1)));
    }
    let (lo, hi) = d.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let projected = projected_form(d);
    let top = jacobi_eigenvalues(projected, n - 1)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(top.clamp(lo, hi))
}

/// Orthonormal basis of `{x : sum x = 0}` as an `N x (N-1)` row-major matrix.
pub fn hyperplane_basis(n: usize) -> Vec<f64> {
    let root = (n as f64).sqrt();
    // v = 1 + sqrt(N) e_1, |v|^2 = 2N + 2 sqrt(N)
    let scale = 2.0 / (2.0 * n as f64 + 2.0 * root);
    let v = |i: usize| if i == 0 { 1.0 + root } else { 1.0 };
    let cols = n - 1;
    let mut b = vec![0.0; n * cols];
    for i in 0..n {
        for j in 1..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            b[i * cols + (j - 1)] = delta - scale * v(i) * v(j);
        }
    }
    b
}

fn projected_form(d: &[f64]) -> Vec<f64> {
    let n = d.len();
    let m = n - 1;
    let b = hyperplane_basis(n);
    let mut out = vec![0.0; m * m];
    for a in 0..m {
        for c in a..m {
            let s: f64 = (0..n).map(|i| b[i * m + a] * d[i] * b[i * m + c]).sum();
            out[a * m + c] = s;
            out[c * m + a] = s;
        }
    }
    out
}

/// Eigenvalues of a symmetric row-major `m x m` matrix.
pub(crate) fn jacobi_eigenvalues(mut a: Vec<f64>, m: usize) -> Vec<f64> {
    const TOL: f64 = 1e-12;
    const MAX_SWEEPS: usize = 100;
    let frob: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if frob == 0.0 {
        return vec![0.0; m];
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..m)
            .flat_map(|p| ((p + 1)..m).map(move |q| (p, q)))
            .map(|(p, q)| a[p * m + q] * a[p * m + q])
            .sum::<f64>()
            .sqrt();
        if off <= TOL * frob * 1e-4 {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| a[i * m + i]).collect()
}
