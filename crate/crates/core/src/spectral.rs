//! Largest singular values, dense and matrix-free.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeffalg::{c, C64};

/// Operators of at most this dimension go through a dense SVD.
pub const DENSE_LIMIT: usize = 256;

pub fn largest_singular_value_dense(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.singular_values().max()
}

/// `‖M‖` from Lanczos on `M†M` with full reorthogonalisation.
///
/// `normal` applies `M†M`. Ritz values never exceed the top eigenvalue, so the
/// result is a lower bound up to rounding. Iteration stops when the Ritz
/// residual is below `rel_tol·θ`, on breakdown, or after `n` steps.
pub fn largest_singular_value_lanczos(
    n: usize,
    normal: impl Fn(&[C64]) -> Vec<C64>,
    seed: u64,
    rel_tol: f64,
) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<C64> = (0..n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    normalize(&mut q);

    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut best = 0.0f64;

    for k in 0..n {
        let mut w = normal(&q);
        let a = dot(&q, &w).re;
        axpy(&mut w, -a, &q);
        if let (Some(prev), Some(&b)) = (basis.last(), betas.last()) {
            axpy(&mut w, -b, prev);
        }
        basis.push(q.clone());
        alphas.push(a);
        // two passes of classical Gram–Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let proj = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= proj * vi;
                }
            }
        }
        let b = norm(&w);
        let done_by_size = k + 1 == n;
        let breakdown = b <= 1e-14 * alphas.iter().fold(1e-300f64, |m, x| m.max(x.abs()));
        if (k + 1) % 8 == 0 || done_by_size || breakdown {
            let (theta, y_last) = top_ritz(&alphas, &betas);
            best = best.max(theta);
            if done_by_size || breakdown || b * y_last.abs() <= rel_tol * theta {
                break;
            }
        }
        betas.push(b);
        q = w.into_iter().map(|x| x / b).collect();
    }
    best.max(0.0).sqrt()
}

/// Top eigenvalue of the symmetric tridiagonal matrix and the last component
/// of its eigenvector.
fn top_ritz(alphas: &[f64], betas: &[f64]) -> (f64, f64) {
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (idx, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    (theta, eig.eigenvectors[(k - 1, idx)])
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(a: &mut [C64]) {
    let n = norm(a);
    for x in a.iter_mut() {
        *x /= n;
    }
}

fn axpy(y: &mut [C64], a: f64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += xi * a;
    }
}
