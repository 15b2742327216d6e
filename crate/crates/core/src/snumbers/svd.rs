//! One-sided Jacobi (Hestenes) singular value decomposition.
//!
//! Columns of the input are rotated pairwise until mutually orthogonal; the
//! surviving column norms are the singular values, the normalized columns the
//! left factor, and the accumulated rotations the right factor. The sweep
//! order is fixed, so the decomposition is deterministic for a given input.

use crate::num::{real, KahanSum, Real};

/// Dense SVD factors: `a = u · diag(sigma) · vᵀ` with `u` and `v` stored as
/// column lists and `sigma` sorted nonincreasing.
#[derive(Debug, Clone)]
pub(crate) struct Svd<T> {
    /// `min(m, n)` orthonormal columns of length `m` (zero where `sigma` is 0).
    pub(crate) u: Vec<Vec<T>>,
    /// Nonincreasing singular values, length `min(m, n)`.
    pub(crate) sigma: Vec<T>,
    /// `min(m, n)` orthonormal columns of length `n`.
    pub(crate) v: Vec<Vec<T>>,
}

fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    let mut acc = KahanSum::new();
    for (a, b) in x.iter().zip(y.iter()) {
        acc.add(*a * *b);
    }
    acc.value()
}

/// Jacobi SVD of a row-major `m x n` matrix (assumed finite).
pub(crate) fn jacobi_svd<T: Real>(rows: &[Vec<T>]) -> Svd<T> {
    let m = rows.len();
    let n = if m == 0 { 0 } else { rows[0].len() };
    if m == 0 || n == 0 {
        return Svd { u: Vec::new(), sigma: Vec::new(), v: Vec::new() };
    }
    if m < n {
        // Work on the transpose and swap the factors back.
        let t: Vec<Vec<T>> = (0..n).map(|j| (0..m).map(|i| rows[i][j]).collect()).collect();
        let svd = jacobi_svd(&t);
        return Svd { u: svd.v, sigma: svd.sigma, v: svd.u };
    }

    // Columns of A (length m) and of V (length n, starting at identity).
    let mut a: Vec<Vec<T>> = (0..n).map(|j| (0..m).map(|i| rows[i][j]).collect()).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();

    let eps = real::<T>(1e-15);
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let (aii, aij, ajj) = {
                    let (ci, cj) = (&a[i], &a[j]);
                    (dot(ci, ci), dot(ci, cj), dot(cj, cj))
                };
                if aii == T::zero() || ajj == T::zero() {
                    continue;
                }
                if aij * aij <= eps * eps * aii * ajj {
                    continue;
                }
                rotated = true;
                let tau = (ajj - aii) / (real::<T>(2.0) * aij);
                let t = {
                    let s = if tau >= T::zero() { T::one() } else { -T::one() };
                    s / (tau.abs() + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // Rotate columns i and j of A and V in place.
                for col_pair in [&mut a, &mut v] {
                    let (head, tail) = col_pair.split_at_mut(j);
                    let (ci, cj) = (&mut head[i], &mut tail[0]);
                    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                        let xi = *x;
                        let yj = *y;
                        *x = c * xi - s * yj;
                        *y = s * xi + c * yj;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; normalize to get U.
    let mut order: Vec<usize> = (0..n).collect();
    let sigmas: Vec<T> = a.iter().map(|col| dot(col, col).sqrt()).collect();
    order.sort_by(|&x, &y| sigmas[y].partial_cmp(&sigmas[x]).unwrap_or(std::cmp::Ordering::Equal));
    let mut u_cols = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut v_cols = Vec::with_capacity(n);
    for &idx in &order {
        let s = sigmas[idx];
        sigma.push(s);
        if s > T::zero() {
            u_cols.push(a[idx].iter().map(|&x| x / s).collect());
        } else {
            u_cols.push(vec![T::zero(); m]);
        }
        v_cols.push(v[idx].clone());
    }
    Svd { u: u_cols, sigma, v: v_cols }
}

/// `u · diag(sigma[..take]) · vᵀ` as a row-major matrix.
pub(crate) fn reconstruct<T: Real>(svd: &Svd<T>, take: usize, m: usize, n: usize) -> Vec<Vec<T>> {
    let take = take.min(svd.sigma.len());
    let mut out = vec![vec![T::zero(); n]; m];
    for t in 0..take {
        let s = svd.sigma[t];
        if s == T::zero() {
            continue;
        }
        for (i, row) in out.iter_mut().enumerate() {
            let us = svd.u[t][i] * s;
            for (j, cell) in row.iter_mut().enumerate() {
                *cell += us * svd.v[t][j];
            }
        }
    }
    out
}
