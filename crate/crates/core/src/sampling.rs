//! Deterministic random generation for the finite-sample harnesses.
//!
//! Every harness draws its `i`-th sample from a ChaCha8 generator seeded with
//! the user seed and stream `i + 1`. Streams decouple samples from each
//! other, so changing how many draws one sample consumes never perturbs the
//! others, and parallel evaluation (each sample owns its generator) produces
//! bit-identical results to the sequential order.
//!
//! All scalars are drawn in `f64` and then converted, so `f32` and `f64`
//! instantiations see the same underlying draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::num::{real, KahanSum, Real};
use crate::space::VectorSequence;

/// Generator for sample `stream` of a harness run with the given seed.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw in `[lo, hi)`.
pub fn uniform_in<T: Real>(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> T {
    real(rng.gen_range(lo..hi))
}

/// Strictly increasing support of the given size inside `1..=max_index`.
fn random_support(rng: &mut ChaCha8Rng, size: usize, max_index: usize) -> Vec<usize> {
    debug_assert!(size <= max_index);
    let mut picked = std::collections::BTreeSet::new();
    while picked.len() < size {
        picked.insert(rng.gen_range(1..=max_index));
    }
    picked.into_iter().collect()
}

/// Random vector sequence: support size in `1..=max_support`, indices within
/// `1..=max_index`, coordinates uniform in `[-amplitude, amplitude]`.
pub fn random_vector_sequence<T: Real>(
    rng: &mut ChaCha8Rng,
    dim: usize,
    max_support: usize,
    max_index: usize,
    amplitude: f64,
) -> VectorSequence<T> {
    let size = rng.gen_range(1..=max_support.min(max_index));
    let support = random_support(rng, size, max_index);
    let entries = support
        .into_iter()
        .map(|k| {
            let v = (0..dim)
                .map(|_| uniform_in(rng, -amplitude, amplitude))
                .collect::<Vec<T>>();
            (k, v)
        })
        .collect();
    VectorSequence::new(dim, entries).expect("sampled sequences are valid by construction")
}

/// Random scalar (`dim = 1`) sequence.
pub fn random_scalar_sequence<T: Real>(
    rng: &mut ChaCha8Rng,
    max_support: usize,
    max_index: usize,
    amplitude: f64,
) -> VectorSequence<T> {
    random_vector_sequence(rng, 1, max_support, max_index, amplitude)
}

/// Componentwise-nonnegative random sequence (for lattice chains).
pub fn random_nonneg_sequence<T: Real>(
    rng: &mut ChaCha8Rng,
    dim: usize,
    max_support: usize,
    max_index: usize,
    amplitude: f64,
) -> VectorSequence<T> {
    random_vector_sequence::<T>(rng, dim, max_support, max_index, amplitude).abs()
}

/// Dense `rows x cols` matrix with entries uniform in `[-amplitude, amplitude]`.
pub fn random_matrix<T: Real>(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    amplitude: f64,
) -> Vec<Vec<T>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| uniform_in(rng, -amplitude, amplitude)).collect())
        .collect()
}

/// Random orthogonal `n x n` matrix: Gaussian draws orthonormalized by
/// twice-iterated Gram-Schmidt (re-drawing on near-dependence).
pub fn random_orthogonal<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(n);
    while basis.len() < n {
        let mut v: Vec<T> =
            (0..n).map(|_| real(rng.sample::<f64, _>(StandardNormal))).collect();
        // Two passes keep the basis orthogonal to working precision.
        for _ in 0..2 {
            for b in &basis {
                let mut dot = KahanSum::new();
                for (x, y) in v.iter().zip(b.iter()) {
                    dot.add(*x * *y);
                }
                let d = dot.value();
                for (x, y) in v.iter_mut().zip(b.iter()) {
                    *x = *x - d * *y;
                }
            }
        }
        let mut sq = KahanSum::new();
        for x in &v {
            sq.add(*x * *x);
        }
        let norm = sq.value().sqrt();
        if norm > real(1e-6) {
            for x in v.iter_mut() {
                *x = *x / norm;
            }
            basis.push(v);
        }
    }
    basis
}
