//! Finitely supported vector sequences, the convex modular
//! `ϱ(x) = Σ_n φ_n(Σ_k |a_nk| ‖x_k‖)`, and its Luxemburg norm
//! `‖x‖ = inf { σ > 0 : ϱ(x/σ) ≤ 1 }`, all with certified truncation.
//!
//! Every series evaluation reports the number of rows actually summed, a
//! bound on the neglected tail, and whether that bound meets the policy's
//! tolerance. Certification never silently degrades: when no tail model
//! applies the result is flagged uncertified rather than rounded off.
//!
//! Summation order is fixed (ascending row index, compensated summation), so
//! results are bit-for-bit reproducible for identical inputs.

mod tail;

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::matrix::{MatrixKernel, RowDecay};
use crate::num::{real, widen, KahanSum, Real};
use crate::orlicz::{MusielakFamily, TailShape};
use tail::{analytic_tail, analytic_tail_from};

/// How series tails are estimated past the last explicitly summed row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailModel {
    /// No extrapolation: anything not summed is unknown (uncertified).
    None,
    /// Heuristic: after a run of consistently contracting terms, bound the
    /// tail by the geometric series of the worst observed ratio. Useful for
    /// super-geometric regimes (e.g. growing exponents) that admit no closed
    /// form; the resulting certificate is empirical, not rigorous.
    GeometricRatio,
    /// Rigorous closed-form tails for power-type families over kernels whose
    /// rows decay like `coeff/(n + shift)` (Euler-Maclaurin p-series bounds).
    IntegralComparison,
}

/// Row budget and tail tolerance for every series evaluation.
#[derive(Debug, Clone, Copy)]
pub struct TruncationPolicy<T: Real> {
    /// Hard cap on explicitly summed rows per evaluation.
    pub max_rows: usize,
    /// A tail bound at or below this value certifies the evaluation.
    pub tail_tol: T,
    /// Tail extrapolation model.
    pub tail_model: TailModel,
}

impl<T: Real> TruncationPolicy<T> {
    pub fn new(max_rows: usize, tail_tol: T, tail_model: TailModel) -> Result<Self> {
        if max_rows == 0 {
            return Err(Error::Validation("max_rows must be at least 1".into()));
        }
        if !(tail_tol > T::zero()) || !tail_tol.is_finite() {
            return Err(Error::Validation(format!(
                "tail tolerance must be positive and finite, got {}",
                widen(tail_tol)
            )));
        }
        Ok(TruncationPolicy { max_rows, tail_tol, tail_model })
    }
}

impl<T: Real> Default for TruncationPolicy<T> {
    fn default() -> Self {
        TruncationPolicy {
            max_rows: 100_000,
            tail_tol: real(1e-10),
            tail_model: TailModel::IntegralComparison,
        }
    }
}

/// A modular evaluation together with its truncation diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct ModularValue<T> {
    /// The (possibly tail-completed) series value.
    pub value: T,
    /// Rows summed explicitly.
    pub rows_used: usize,
    /// Bound on the residual tail error (infinite when nothing is known).
    pub tail_estimate: T,
    /// True when `tail_estimate ≤ tail_tol` under the requested model.
    pub certified: bool,
}

/// Coordinate norm on `R^dim`: an `ℓ_p` norm with `p ≥ 1`, or `ℓ_∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorNorm<T: Real> {
    dim: usize,
    kind: NormKind<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum NormKind<T> {
    P(T),
    Inf,
}

impl<T: Real> VectorNorm<T> {
    /// `ℓ_p` norm on `R^dim`, `p ≥ 1`.
    pub fn lp(dim: usize, p: T) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("coordinate dimension must be at least 1".into()));
        }
        if !p.is_finite() || p < T::one() {
            return Err(Error::Validation(format!(
                "lp coordinate norms need finite p >= 1, got {}",
                widen(p)
            )));
        }
        Ok(VectorNorm { dim, kind: NormKind::P(p) })
    }

    /// `ℓ_∞` norm on `R^dim`.
    pub fn linf(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("coordinate dimension must be at least 1".into()));
        }
        Ok(VectorNorm { dim, kind: NormKind::Inf })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The exponent for `ℓ_p` norms, `None` for `ℓ_∞`.
    pub fn p_exponent(&self) -> Option<T> {
        match self.kind {
            NormKind::P(p) => Some(p),
            NormKind::Inf => None,
        }
    }

    /// True for the `ℓ_1` coordinate norm (the additive-on-disjoint case).
    pub fn is_l1(&self) -> bool {
        matches!(self.kind, NormKind::P(p) if p == T::one())
    }

    /// Norm of `v`, validating length and finiteness.
    pub fn eval(&self, v: &[T]) -> Result<T> {
        if v.len() != self.dim {
            return Err(Error::Validation(format!(
                "vector has {} coordinates, norm expects {}",
                v.len(),
                self.dim
            )));
        }
        for (i, &c) in v.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::Domain(format!("coordinate {i} is not finite")));
            }
        }
        Ok(self.eval_unchecked(v))
    }

    /// Norm of `v` assuming length and finiteness were validated upstream.
    pub(crate) fn eval_unchecked(&self, v: &[T]) -> T {
        match self.kind {
            NormKind::Inf => {
                let mut m = T::zero();
                for &c in v {
                    m = m.max(c.abs());
                }
                m
            }
            NormKind::P(p) => {
                if p == T::one() {
                    let mut acc = KahanSum::new();
                    for &c in v {
                        acc.add(c.abs());
                    }
                    acc.value()
                } else if p == real(2.0) {
                    let mut acc = KahanSum::new();
                    for &c in v {
                        acc.add(c * c);
                    }
                    acc.value().sqrt()
                } else {
                    let mut acc = KahanSum::new();
                    for &c in v {
                        acc.add(c.abs().powf(p));
                    }
                    acc.value().powf(T::one() / p)
                }
            }
        }
    }
}

/// A finitely supported sequence of vectors in `R^dim`, stored as
/// `(index, vector)` pairs with strictly increasing one-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSequence<T: Real> {
    dim: usize,
    entries: Vec<(usize, Vec<T>)>,
}

impl<T: Real> VectorSequence<T> {
    /// Builds a sequence, validating index order, widths, and finiteness.
    pub fn new(dim: usize, entries: Vec<(usize, Vec<T>)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("coordinate dimension must be at least 1".into()));
        }
        let mut prev = 0usize;
        for (k, v) in &entries {
            if *k == 0 {
                return Err(Error::Validation("sequence indices are one-based".into()));
            }
            if *k <= prev {
                return Err(Error::Validation(format!(
                    "sequence indices must be strictly increasing ({k} after {prev})"
                )));
            }
            prev = *k;
            if v.len() != dim {
                return Err(Error::Validation(format!(
                    "entry at index {k} has {} coordinates, expected {dim}",
                    v.len()
                )));
            }
            for (i, &c) in v.iter().enumerate() {
                if !c.is_finite() {
                    return Err(Error::Validation(format!(
                        "coordinate {i} at index {k} is not finite"
                    )));
                }
            }
        }
        Ok(VectorSequence { dim, entries })
    }

    /// The zero sequence in `R^dim`.
    pub fn zero(dim: usize) -> Self {
        VectorSequence { dim: dim.max(1), entries: Vec::new() }
    }

    /// Scalar (`dim = 1`) sequence from `(index, value)` pairs.
    pub fn scalar(pairs: Vec<(usize, T)>) -> Result<Self> {
        let entries = pairs.into_iter().map(|(k, v)| (k, vec![v])).collect();
        VectorSequence::new(1, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The stored `(index, vector)` pairs, ascending in index.
    pub fn entries(&self) -> &[(usize, Vec<T>)] {
        &self.entries
    }

    /// Number of stored entries.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// The vector at one-based index `k`, if stored.
    pub fn get(&self, k: usize) -> Option<&[T]> {
        self.entries
            .binary_search_by_key(&k, |(i, _)| *i)
            .ok()
            .map(|pos| self.entries[pos].1.as_slice())
    }

    /// True when every stored coordinate is zero (or nothing is stored).
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, v)| v.iter().all(|&c| c == T::zero()))
    }

    /// `c · x`. The scale must be finite.
    pub fn scale(&self, c: T) -> Self {
        assert!(c.is_finite(), "scale factor must be finite");
        VectorSequence {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (*k, v.iter().map(|&x| c * x).collect()))
                .collect(),
        }
    }

    /// Componentwise absolute value `|x|`.
    pub fn abs(&self) -> Self {
        VectorSequence {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (*k, v.iter().map(|&x| x.abs()).collect()))
                .collect(),
        }
    }

    /// `x + y` (missing entries are zero).
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.merge(other, |a, b| a + b)
    }

    /// `x - y`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.merge(other, |a, b| a - b)
    }

    /// Componentwise maximum `x ∨ y` (missing entries are zero).
    pub fn sup(&self, other: &Self) -> Result<Self> {
        self.merge(other, |a, b| a.max(b))
    }

    /// True when `x_k[i] ≤ y_k[i]` for every index and coordinate, treating
    /// missing entries as zero.
    pub fn dominated_by(&self, other: &Self) -> Result<bool> {
        if self.dim != other.dim {
            return Err(Error::Validation("sequences have different coordinate dimensions".into()));
        }
        let diff = other.sub(self)?;
        Ok(diff.entries.iter().all(|(_, v)| v.iter().all(|&c| c >= T::zero())))
    }

    /// The head section: entries with index `≤ m`.
    pub fn section(&self, m: usize) -> Self {
        VectorSequence {
            dim: self.dim,
            entries: self.entries.iter().filter(|(k, _)| *k <= m).cloned().collect(),
        }
    }

    /// The tail section: entries with index `> m`. Together with
    /// [`section`](Self::section) this recombines exactly: for every `m`,
    /// `x.section(m) + x.tail_section(m) == x` bit for bit.
    pub fn tail_section(&self, m: usize) -> Self {
        VectorSequence {
            dim: self.dim,
            entries: self.entries.iter().filter(|(k, _)| *k > m).cloned().collect(),
        }
    }

    /// Largest coordinate norm over the support.
    pub fn max_norm(&self, vn: &VectorNorm<T>) -> Result<T> {
        Ok(self.profile(vn)?.max_norm)
    }

    /// Decreasing rearrangement of the coordinate norms: a scalar sequence
    /// holding the positive norms sorted descending (ties broken by original
    /// index) at indices `1, 2, …`.
    pub fn decreasing_rearrangement(&self, vn: &VectorNorm<T>) -> Result<VectorSequence<T>> {
        let profile = self.profile(vn)?;
        let mut pairs: Vec<(usize, T)> =
            profile.indices.iter().copied().zip(profile.norms.iter().copied()).collect();
        pairs.sort_by(|a, b| {
            b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0))
        });
        let entries = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (_, w))| (i + 1, vec![w]))
            .collect();
        Ok(VectorSequence { dim: 1, entries })
    }

    fn merge(&self, other: &Self, op: impl Fn(T, T) -> T) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Validation("sequences have different coordinate dimensions".into()));
        }
        let zero = vec![T::zero(); self.dim];
        let mut entries = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let ki = self.entries.get(i).map(|(k, _)| *k);
            let kj = other.entries.get(j).map(|(k, _)| *k);
            let (k, a, b) = match (ki, kj) {
                (Some(ki), Some(kj)) if ki == kj => {
                    let pair = (ki, &self.entries[i].1, &other.entries[j].1);
                    i += 1;
                    j += 1;
                    pair
                }
                (Some(ki), Some(kj)) if ki < kj => {
                    let pair = (ki, &self.entries[i].1, &zero);
                    i += 1;
                    pair
                }
                (Some(_), Some(kj)) => {
                    let pair = (kj, &zero, &other.entries[j].1);
                    j += 1;
                    pair
                }
                (Some(ki), None) => {
                    let pair = (ki, &self.entries[i].1, &zero);
                    i += 1;
                    pair
                }
                (None, Some(kj)) => {
                    let pair = (kj, &zero, &other.entries[j].1);
                    j += 1;
                    pair
                }
                (None, None) => unreachable!(),
            };
            entries.push((k, a.iter().zip(b.iter()).map(|(&x, &y)| op(x, y)).collect()));
        }
        Ok(VectorSequence { dim: self.dim, entries })
    }

    /// Coordinate norms over the support, with prefix sums for fast row
    /// images. Entries with zero norm are dropped.
    pub(crate) fn profile(&self, vn: &VectorNorm<T>) -> Result<SupportProfile<T>> {
        if self.dim != vn.dim() {
            return Err(Error::Validation(format!(
                "sequence dimension {} does not match norm dimension {}",
                self.dim,
                vn.dim()
            )));
        }
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut norms = Vec::with_capacity(self.entries.len());
        let mut prefix = Vec::with_capacity(self.entries.len() + 1);
        prefix.push(T::zero());
        let mut acc = KahanSum::new();
        let mut max_norm = T::zero();
        for (k, v) in &self.entries {
            let w = vn.eval_unchecked(v);
            if w > T::zero() {
                indices.push(*k);
                norms.push(w);
                acc.add(w);
                prefix.push(acc.value());
                max_norm = max_norm.max(w);
            }
        }
        Ok(SupportProfile { indices, norms, prefix, total: acc.value(), max_norm })
    }
}

/// Positive coordinate norms over a support, ascending in index.
#[derive(Debug, Clone)]
pub(crate) struct SupportProfile<T> {
    pub(crate) indices: Vec<usize>,
    pub(crate) norms: Vec<T>,
    /// `prefix[i]` = compensated sum of the first `i` norms.
    prefix: Vec<T>,
    pub(crate) total: T,
    pub(crate) max_norm: T,
}

impl<T: Real> SupportProfile<T> {
    /// Norm at index `n`, zero when `n` is off the support.
    fn norm_at(&self, n: usize) -> T {
        match self.indices.binary_search(&n) {
            Ok(pos) => self.norms[pos],
            Err(_) => T::zero(),
        }
    }

    /// Sum of the norms with index `≤ n`.
    fn prefix_total(&self, n: usize) -> T {
        let count = self.indices.partition_point(|&k| k <= n);
        self.prefix[count]
    }
}

/// `Σ_k |a_nk| ‖x_k‖` for one row, using kernel-specific fast paths.
pub(crate) fn row_image_closure<'a, T: Real>(
    kernel: &'a MatrixKernel<T>,
    profile: &'a SupportProfile<T>,
) -> Box<dyn Fn(usize) -> Result<T> + 'a> {
    match kernel {
        MatrixKernel::Identity => Box::new(move |n| Ok(profile.norm_at(n))),
        MatrixKernel::Cesaro1 => {
            Box::new(move |n| Ok(profile.prefix_total(n) / real(n as f64)))
        }
        MatrixKernel::LorentzDiag { .. } => Box::new(move |n| {
            let w = profile.norm_at(n);
            if w == T::zero() {
                return Ok(T::zero());
            }
            kernel.entry(n, n).map(|a| a * w)
        }),
        _ => Box::new(move |n| {
            let mut acc = KahanSum::new();
            for (i, &k) in profile.indices.iter().enumerate() {
                let a = kernel.entry(n, k)?;
                if a != T::zero() {
                    acc.add(a.abs() * profile.norms[i]);
                }
            }
            Ok(acc.value())
        }),
    }
}

/// The row image `Σ_k |a_nk| ‖x_k‖` at row `n` (one-based).
pub fn row_image<T: Real>(
    kernel: &MatrixKernel<T>,
    x: &VectorSequence<T>,
    vn: &VectorNorm<T>,
    n: usize,
) -> Result<T> {
    if n == 0 {
        return Err(Error::Range("row indices are one-based".into()));
    }
    let profile = x.profile(vn)?;
    let image = row_image_closure(kernel, &profile);
    image(n)
}

/// A nonnegative series `Σ_n φ_n(value(n) / σ)` ready for summation.
pub(crate) struct SeriesSpec<'a, T: Real> {
    pub(crate) family: &'a MusielakFamily<T>,
    pub(crate) row_value: &'a (dyn Fn(usize) -> Result<T> + 'a),
    pub(crate) decay: RowDecay<T>,
}

/// One series evaluation with truncation accounting.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesEval<T> {
    pub(crate) value: T,
    pub(crate) rows_used: usize,
    pub(crate) tail_estimate: T,
    pub(crate) certified: bool,
    /// True when the value is *certainly* above the requested threshold
    /// (partial sums are lower bounds; tail-completed values subtract their
    /// error bound before comparing).
    pub(crate) exceeded: bool,
}

enum ScanExit<T> {
    Done,
    Exceeded { value: T, rows: usize },
    Overflow { rows: usize },
}

/// Sums rows `from..=to` into `acc`, stopping early on threshold crossing or
/// floating-point overflow.
fn scan_rows<T: Real>(
    spec: &SeriesSpec<'_, T>,
    sigma: T,
    from: usize,
    to: usize,
    threshold: Option<T>,
    acc: &mut KahanSum<T>,
) -> Result<ScanExit<T>> {
    for n in from..=to {
        let v = (spec.row_value)(n)?;
        if !v.is_finite() || v < T::zero() {
            return Err(Error::Domain(format!(
                "row image at row {n} must be finite and nonnegative"
            )));
        }
        if v > T::zero() {
            let t = v / sigma;
            if !t.is_finite() {
                return Ok(ScanExit::Overflow { rows: n });
            }
            let term = spec.family.eval_unchecked(n, t);
            if term < T::zero() || term.is_nan() {
                return Err(Error::Domain(format!(
                    "orlicz function {n} returned an invalid value at t = {}",
                    widen(t)
                )));
            }
            if term == T::infinity() {
                return Ok(ScanExit::Overflow { rows: n });
            }
            acc.add(term);
            if let Some(th) = threshold {
                if acc.value() > th {
                    return Ok(ScanExit::Exceeded { value: acc.value(), rows: n });
                }
            }
        }
    }
    Ok(ScanExit::Done)
}

fn overflow_eval<T: Real>(rows: usize) -> SeriesEval<T> {
    SeriesEval {
        value: T::infinity(),
        rows_used: rows,
        tail_estimate: T::infinity(),
        certified: false,
        exceeded: true,
    }
}

fn exceeded_eval<T: Real>(value: T, rows: usize) -> SeriesEval<T> {
    SeriesEval { value, rows_used: rows, tail_estimate: T::infinity(), certified: false, exceeded: true }
}

/// Certified bracket for `Σ_{n > target} φ(v(n)/σ)` when
/// `v(n) = Σ_k w_k/(n + s_k)` exactly, with `total = Σ_k w_k` and `φ` convex
/// with `φ(0) = 0` (any shape accepted by `analytic_tail`).
///
/// Five closed-form bounds are combined and the tightest interval kept:
///
/// * upper, monotone: `v(n) ≤ total/n`;
/// * upper, Jensen: `φ(Σ_k λ_k u_k) ≤ Σ_k λ_k φ(u_k)` with `λ_k = w_k/total`
///   and `u_k = γ/(n + s_k)`, summed termwise in `n`;
/// * lower, monotone: `v(n) ≥ total/(n + s_max)`;
/// * lower, superadditive: convex `φ` with `φ(0) = 0` satisfies
///   `φ(Σ_k a_k) ≥ Σ_k φ(a_k)`, applied to the pieces `a_k = w_k/(σ(n + s_k))`;
/// * lower, mean shift: `s ↦ 1/(n+s)` is convex, so by Jensen
///   `v(n) ≥ total/(n + s̄)` with `s̄ = Σ_k λ_k s_k`, summable in closed form
///   over the fractionally shifted lattice.
///
/// The Jensen/superadditive pair collapses the interval width to the scale of
/// the closed-form error bounds whenever the weight concentrates on one
/// piece; the Jensen/mean-shift pair shrinks it to
/// `O(Var_λ(s) / target^{p+1})` for spread weights, where the monotone pair
/// alone would stay `O(s_max / target^p)` wide.
///
/// Returns the midpoint and half-width, or `None` when no closed form applies
/// at this `target`.
fn bracket_tail<T: Real>(
    shape: TailShape<T>,
    pieces: &[(usize, T)],
    total: T,
    sigma: T,
    target: usize,
) -> Option<(T, T)> {
    let gamma = total / sigma;
    let s_max = pieces.iter().map(|&(s, _)| s).max().unwrap_or(0);
    let (hv, he) = analytic_tail(shape, gamma, target)?;
    let (lv, le) = analytic_tail(shape, gamma, target + s_max)?;
    let mut upper = hv + he;
    let mut lower = lv - le;

    // The piecewise bounds reuse gamma (or smaller) at `target` (or later),
    // so whenever the monotone calls above have closed forms these do too.
    let mut jensen = Some(T::zero());
    let mut superadd = Some(T::zero());
    let mut mean_shift = T::zero();
    for &(s, w) in pieces {
        jensen = match (jensen, analytic_tail(shape, gamma, target + s)) {
            (Some(acc), Some((v, e))) => Some(acc + (w / total) * (v + e)),
            _ => None,
        };
        superadd = match (superadd, analytic_tail(shape, w / sigma, target + s)) {
            (Some(acc), Some((v, e))) => Some(acc + (v - e)),
            _ => None,
        };
        mean_shift = mean_shift + (w / total) * real::<T>(s as f64);
    }
    if let Some(j) = jensen {
        upper = upper.min(j);
    }
    if let Some(s) = superadd {
        lower = lower.max(s);
    }
    let first = real::<T>((target + 1) as f64) + mean_shift;
    if let Some((v, e)) = analytic_tail_from(shape, gamma, first) {
        lower = lower.max(v - e);
    }
    let lower = lower.max(T::zero()).min(upper);
    let half = real::<T>(0.5);
    Some(((upper + lower) * half, (upper - lower) * half))
}

/// Evaluates `Σ_n φ_n(value(n)/σ)` under the truncation policy.
///
/// With `threshold = Some(th)` the scan may stop as soon as the partial sum
/// certainly exceeds `th` (partial sums of nonnegative terms are lower
/// bounds), reporting `exceeded`.
pub(crate) fn sum_series<T: Real>(
    spec: &SeriesSpec<'_, T>,
    sigma: T,
    policy: &TruncationPolicy<T>,
    threshold: Option<T>,
) -> Result<SeriesEval<T>> {
    debug_assert!(sigma > T::zero() && sigma.is_finite());
    let max_rows = policy.max_rows;
    let mut acc = KahanSum::new();

    // Exactly representable sums: the rows either vanish past `last_row`
    // (identity-like kernels) or simply do not exist (stored finite
    // sections). Either way the partial sum *is* the value.
    if let RowDecay::ZeroBeyond { last_row } | RowDecay::DefinedUpTo { last_row } = &spec.decay {
        let last_row = *last_row;
        let stop = last_row.min(max_rows);
        match scan_rows(spec, sigma, 1, stop, threshold, &mut acc)? {
            ScanExit::Exceeded { value, rows } => return Ok(exceeded_eval(value, rows)),
            ScanExit::Overflow { rows } => return Ok(overflow_eval(rows)),
            ScanExit::Done => {}
        }
        let exact = last_row <= max_rows;
        return Ok(SeriesEval {
            value: acc.value(),
            rows_used: stop,
            tail_estimate: if exact { T::zero() } else { T::infinity() },
            certified: exact,
            exceeded: false,
        });
    }

    let mut scanned_to = 0usize;

    // Rigorous closed-form tails when both the family and the row decay
    // cooperate. The explicit-row target is refined geometrically until the
    // tail bound meets the tolerance or the row budget is exhausted.
    if policy.tail_model == TailModel::IntegralComparison {
        if let Some((family_from, shape)) = spec.family.tail_shape() {
            enum Plan<'p, T> {
                Exact { shift: usize },
                Pieces(&'p [(usize, T)]),
            }
            let plan = match &spec.decay {
                RowDecay::ExactInverse { coeff, shift, from_row } => {
                    Some((Plan::Exact { shift: *shift }, *coeff, *from_row))
                }
                RowDecay::InverseSum { pieces, from_row } => {
                    let mut total = T::zero();
                    for &(_, w) in pieces {
                        total = total + w;
                    }
                    Some((Plan::Pieces(pieces), total, *from_row))
                }
                _ => None,
            };
            if let Some((plan, coeff, from_row)) = plan {
                let gamma = coeff / sigma;
                let log_shift = match &plan {
                    Plan::Exact { shift } => *shift,
                    Plan::Pieces(_) => 0,
                };
                let mut target = from_row.max(family_from).max(32);
                if matches!(shape, TailShape::PowerLog { .. }) {
                    // The log-series tail needs gamma / (target + shift + 1) ≤ 1/2
                    // at the smallest shift any bound below evaluates.
                    let need = (real::<T>(2.0) * gamma).ceil();
                    let need = if need.is_finite() { widen(need) as usize } else { usize::MAX };
                    target = target.max(need.saturating_sub(log_shift));
                }
                if target <= max_rows && gamma.is_finite() && gamma > T::zero() {
                    loop {
                        match scan_rows(spec, sigma, scanned_to + 1, target, threshold, &mut acc)? {
                            ScanExit::Exceeded { value, rows } => {
                                return Ok(exceeded_eval(value, rows))
                            }
                            ScanExit::Overflow { rows } => return Ok(overflow_eval(rows)),
                            ScanExit::Done => {}
                        }
                        scanned_to = target;
                        let tail_pair = match &plan {
                            Plan::Exact { shift } => analytic_tail(shape, gamma, target + shift),
                            Plan::Pieces(pieces) => {
                                bracket_tail(shape, pieces, coeff, sigma, target)
                            }
                        };
                        let (tail_value, tail_err) = match tail_pair {
                            Some(pair) => pair,
                            None => break,
                        };
                        if tail_err <= policy.tail_tol || target >= max_rows {
                            acc.add(tail_value);
                            let value = acc.value();
                            let certified = tail_err.is_finite() && tail_err <= policy.tail_tol;
                            let exceeded =
                                threshold.map_or(false, |th| value - tail_err > th);
                            return Ok(SeriesEval {
                                value,
                                rows_used: scanned_to,
                                tail_estimate: tail_err,
                                certified,
                                exceeded,
                            });
                        }
                        target = (target * 2).min(max_rows);
                    }
                }
            }
        }
    }

    // Heuristic geometric-ratio certification: after eight consecutive
    // contracting ratios, bound the tail by the worst observed ratio.
    if policy.tail_model == TailModel::GeometricRatio {
        let ratio_cap = real::<T>(0.999);
        let mut prev_term: Option<T> = None;
        let mut run = 0usize;
        let mut worst = T::zero();
        for n in (scanned_to + 1)..=max_rows {
            let v = (spec.row_value)(n)?;
            if !v.is_finite() || v < T::zero() {
                return Err(Error::Domain(format!(
                    "row image at row {n} must be finite and nonnegative"
                )));
            }
            if v == T::zero() {
                prev_term = None;
                run = 0;
                continue;
            }
            let t = v / sigma;
            if !t.is_finite() {
                return Ok(overflow_eval(n));
            }
            let term = spec.family.eval_unchecked(n, t);
            if term < T::zero() || term.is_nan() {
                return Err(Error::Domain(format!(
                    "orlicz function {n} returned an invalid value at t = {}",
                    widen(t)
                )));
            }
            if term == T::infinity() {
                return Ok(overflow_eval(n));
            }
            acc.add(term);
            if let Some(th) = threshold {
                if acc.value() > th {
                    return Ok(exceeded_eval(acc.value(), n));
                }
            }
            if let Some(p) = prev_term {
                let r = term / p;
                if r < ratio_cap {
                    worst = if run == 0 { r } else { worst.max(r) };
                    run += 1;
                } else {
                    run = 0;
                }
            }
            prev_term = Some(term);
            if run >= 8 {
                let est = term * worst / (T::one() - worst);
                if est <= policy.tail_tol {
                    return Ok(SeriesEval {
                        value: acc.value(),
                        rows_used: n,
                        tail_estimate: est,
                        certified: true,
                        exceeded: false,
                    });
                }
            }
        }
        return Ok(SeriesEval {
            value: acc.value(),
            rows_used: max_rows,
            tail_estimate: T::infinity(),
            certified: false,
            exceeded: false,
        });
    }

    // No applicable model: sum the budget and report honestly.
    match scan_rows(spec, sigma, scanned_to + 1, max_rows, threshold, &mut acc)? {
        ScanExit::Exceeded { value, rows } => return Ok(exceeded_eval(value, rows)),
        ScanExit::Overflow { rows } => return Ok(overflow_eval(rows)),
        ScanExit::Done => {}
    }
    Ok(SeriesEval {
        value: acc.value(),
        rows_used: max_rows,
        tail_estimate: T::infinity(),
        certified: false,
        exceeded: false,
    })
}

/// Luxemburg norm result with its final bisection bracket and diagnostics.
#[derive(Debug, Clone)]
pub struct LuxemburgResult<T> {
    /// Upper endpoint of the final bracket (a feasible scale).
    pub norm: T,
    /// `(infeasible, feasible)` scales with `hi/lo - 1` at the solver
    /// tolerance (at most twice it when the lower endpoint had to be widened
    /// to a provably infeasible scale).
    pub sigma_bracket: (T, T),
    /// Rows summed by the final evaluation at `norm`.
    pub rows_used: usize,
    /// True only when the bracket is a rigorous two-sided enclosure: the
    /// modular at `norm` certifiably stays at or below 1 *and* the modular at
    /// the lower endpoint provably exceeds 1. When the lower endpoint could
    /// only be shown uncertifiable, the norm is a certified upper bound and
    /// this flag is false (with a warning).
    pub certified: bool,
    pub warnings: Vec<String>,
}

impl<T: Real> LuxemburgResult<T> {
    /// The norm of the zero sequence.
    pub fn zero() -> Self {
        LuxemburgResult {
            norm: T::zero(),
            sigma_bracket: (T::zero(), T::zero()),
            rows_used: 0,
            certified: true,
            warnings: Vec::new(),
        }
    }
}

/// Probe classification: `Yes` is a certificate that the modular is ≤ 1,
/// `No` a certificate that it exceeds 1, `Unknown` means the partial sum
/// stayed at or below 1 but the tail could not be certified.
#[derive(Clone, Copy)]
enum Feas {
    Yes,
    No,
    Unknown,
}

/// Solves `inf { σ : Σ_n φ_n(value(n)/σ) ≤ 1 }` by certified bracketing and
/// log-space bisection. `sigma0` is any positive starting scale.
pub(crate) fn lux_solve<T: Real>(
    spec: &SeriesSpec<'_, T>,
    sigma0: T,
    tol: T,
    policy: &TruncationPolicy<T>,
    mut warnings: Vec<String>,
) -> Result<LuxemburgResult<T>> {
    if !(tol > T::zero()) || !tol.is_finite() || tol >= real(0.5) {
        return Err(Error::Validation(format!(
            "norm tolerance must lie in (0, 0.5), got {}",
            widen(tol)
        )));
    }
    if !(sigma0 > T::zero()) || !sigma0.is_finite() {
        return Err(Error::Precondition("starting scale must be positive and finite".into()));
    }
    let one = T::one();
    let probe = |sigma: T| -> Result<(Feas, SeriesEval<T>)> {
        let e = sum_series(spec, sigma, policy, Some(one))?;
        let f = if e.exceeded {
            Feas::No
        } else if e.certified && e.value + e.tail_estimate <= one {
            Feas::Yes
        } else {
            Feas::Unknown
        };
        Ok((f, e))
    };

    let (f0, e0) = probe(sigma0)?;
    if e0.certified && e0.value == T::zero() {
        return Err(Error::Degeneracy(
            "the modular is certified zero at every scale: the kernel annihilates the \
             sequence, so no positive Luxemburg scale exists"
                .into(),
        ));
    }

    // Bracket the feasibility boundary by walking powers of two. `lo_refuted`
    // records whether the lower endpoint is a proven No (modular certainly
    // above 1) or merely an Unknown; only the former makes the bracket — and
    // hence the reported norm — a certified two-sided enclosure.
    let (mut lo, mut hi, mut lo_refuted) = match f0 {
        Feas::Yes => {
            let mut hi = sigma0;
            let mut lo = None;
            for _ in 0..200 {
                let cand = hi / real(2.0);
                if !(cand > T::zero()) {
                    break;
                }
                let (f, e) = probe(cand)?;
                match f {
                    Feas::Yes => {
                        if e.certified && e.value == T::zero() {
                            return Err(Error::Degeneracy(
                                "the modular is certified zero at every probed scale; the \
                                 sequence is invisible to the kernel"
                                    .into(),
                            ));
                        }
                        hi = cand;
                    }
                    _ => {
                        lo = Some((cand, matches!(f, Feas::No)));
                        break;
                    }
                }
            }
            match lo {
                Some((lo, refuted)) => (lo, hi, refuted),
                None => {
                    return Err(Error::Degeneracy(format!(
                        "the modular stays at or below 1 down to scale {:e}; the norm \
                         degenerates to zero for a nonzero input",
                        widen(hi)
                    )))
                }
            }
        }
        _ => {
            let mut lo = sigma0;
            let mut refuted = matches!(f0, Feas::No);
            let mut last = e0;
            let mut found = None;
            for _ in 0..200 {
                let cand = lo * real(2.0);
                if !cand.is_finite() {
                    break;
                }
                let (f, e) = probe(cand)?;
                match f {
                    Feas::Yes => {
                        found = Some((lo, cand, refuted));
                        break;
                    }
                    _ => {
                        lo = cand;
                        refuted = matches!(f, Feas::No);
                        last = e;
                    }
                }
            }
            match found {
                Some(triple) => triple,
                None => {
                    return if last.exceeded {
                        Err(Error::Divergence(format!(
                            "the modular certainly exceeds 1 at every probed scale up to \
                             {:e}; the sequence lies outside the space",
                            widen(lo)
                        )))
                    } else {
                        Err(Error::Truncation {
                            msg: format!(
                                "cannot certify the modular at or below 1 within {} rows at \
                                 scales up to {:e}; partial sum at the last probe is reported",
                                policy.max_rows,
                                widen(lo)
                            ),
                            partial: widen(last.value),
                        })
                    };
                }
            }
        }
    };

    // Log-space bisection on the bracket.
    let mut guard = 0usize;
    while hi / lo - one > tol {
        guard += 1;
        if guard > 400 {
            return Err(Error::Postcondition(
                "bisection failed to shrink the Luxemburg bracket".into(),
            ));
        }
        let mid = lo * (hi / lo).sqrt();
        if !(mid > lo && mid < hi) {
            break;
        }
        match probe(mid)? {
            (Feas::Yes, _) => hi = mid,
            (f, _) => {
                lo = mid;
                lo_refuted = matches!(f, Feas::No);
            }
        }
    }

    // Postconditions: the reported scale is feasible, and shrinking it past
    // the bracket provably re-crosses the boundary (up to tail slack).
    let final_eval = sum_series(spec, hi, policy, None)?;
    if final_eval.certified && final_eval.value - final_eval.tail_estimate > one + real(1e-9) {
        return Err(Error::Postcondition(format!(
            "modular at the reported norm certifies above 1 ({})",
            widen(final_eval.value)
        )));
    }
    let sigma_minus = hi * (one - real::<T>(2.0) * tol);
    if sigma_minus > T::zero() && sigma_minus < hi {
        let e = sum_series(spec, sigma_minus, policy, Some(one))?;
        let floor = one - (policy.tail_tol + real(1e-9));
        let refutable = e.certified && !e.exceeded && e.value + e.tail_estimate <= floor;
        if refutable {
            return Err(Error::Postcondition(format!(
                "modular is still {} at {:.3e} times the reported norm; the bracket is wrong",
                widen(e.value),
                widen(sigma_minus / hi)
            )));
        }
        if !lo_refuted && e.exceeded {
            // The bisection endgame ended on an uncertifiable lower endpoint,
            // but this slightly wider probe proves the modular exceeds 1 just
            // below the reported norm, restoring a two-sided bracket.
            lo = sigma_minus;
            lo_refuted = true;
        }
    }
    if policy.tail_model == TailModel::GeometricRatio && final_eval.certified {
        warnings.push(
            "tail certification used the geometric-ratio heuristic; the bound is \
             empirical, not rigorous"
                .into(),
        );
    }
    if final_eval.certified && !lo_refuted {
        warnings.push(format!(
            "the modular at the lower bracket endpoint {:e} could not be certified above 1 \
             within the row budget; the reported norm is only a certified upper bound",
            widen(lo)
        ));
    }

    Ok(LuxemburgResult {
        norm: hi,
        sigma_bracket: (lo, hi),
        rows_used: final_eval.rows_used,
        certified: final_eval.certified && lo_refuted,
        warnings,
    })
}

/// The convex modular `ϱ(x/σ) = Σ_n φ_n(Σ_k |a_nk| ‖x_k‖ / σ)`.
pub fn modular<T: Real>(
    family: &MusielakFamily<T>,
    kernel: &MatrixKernel<T>,
    x: &VectorSequence<T>,
    vn: &VectorNorm<T>,
    sigma: T,
    policy: &TruncationPolicy<T>,
) -> Result<ModularValue<T>> {
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::Domain(format!(
            "modular scale must be positive and finite, got {}",
            widen(sigma)
        )));
    }
    let profile = x.profile(vn)?;
    if profile.max_norm == T::zero() {
        return Ok(ModularValue {
            value: T::zero(),
            rows_used: 0,
            tail_estimate: T::zero(),
            certified: true,
        });
    }
    let decay = kernel.support_decay(&profile.indices, &profile.norms, profile.total);
    let rows = row_image_closure(kernel, &profile);
    let spec = SeriesSpec { family, row_value: &*rows, decay };
    let e = sum_series(&spec, sigma, policy, None)?;
    Ok(ModularValue {
        value: e.value,
        rows_used: e.rows_used,
        tail_estimate: e.tail_estimate,
        certified: e.certified,
    })
}

/// The Luxemburg norm `inf { σ > 0 : ϱ(x/σ) ≤ 1 }` with certified bracketing.
///
/// The returned `norm` is the feasible endpoint of a bracket of relative
/// width `tol`. Warnings flag kernel columns that never see the support and
/// kernels stored as finite sections.
pub fn luxemburg_norm<T: Real>(
    family: &MusielakFamily<T>,
    kernel: &MatrixKernel<T>,
    x: &VectorSequence<T>,
    vn: &VectorNorm<T>,
    tol: T,
    policy: &TruncationPolicy<T>,
) -> Result<LuxemburgResult<T>> {
    let profile = x.profile(vn)?;
    if profile.max_norm == T::zero() {
        return Ok(LuxemburgResult::zero());
    }
    let mut warnings = Vec::new();
    let last_index = *profile.indices.last().expect("nonempty support");
    let probe_limit = policy.max_rows.min(4 * last_index + 64).max(1);
    for &k in &profile.indices {
        if kernel.column_nonzero_row(k, probe_limit)?.is_none() {
            warnings.push(format!(
                "kernel column {k} has no nonzero entry in the first {probe_limit} rows; \
                 that coordinate cannot influence the norm"
            ));
        }
    }
    if let Some(extent) = kernel.stored_row_extent() {
        warnings.push(format!(
            "kernel rows are stored only up to row {extent}; results are exact for that \
             finite section"
        ));
    }
    let decay = kernel.support_decay(&profile.indices, &profile.norms, profile.total);
    let rows = row_image_closure(kernel, &profile);
    let spec = SeriesSpec { family, row_value: &*rows, decay };
    lux_solve(&spec, profile.max_norm, tol, policy, warnings)
}

/// Grid-based membership report for the space `l_Φ^A` and its subspace of
/// finite-modular-at-every-scale elements.
#[derive(Debug, Clone)]
pub struct MembershipReport<T> {
    /// `(σ, modular at σ)` for every grid point, ascending.
    pub per_sigma: Vec<(T, ModularValue<T>)>,
    /// Smallest grid scale with a certified finite modular, witnessing
    /// membership in the space.
    pub l_space_witness: Option<T>,
    /// True when the modular is certified finite at *every* grid scale
    /// (finite-sample evidence for the order-continuous part).
    pub h_space_on_grid: bool,
    pub warnings: Vec<String>,
}

/// Evaluates the modular on an ascending positive grid of scales.
pub fn membership_diagnostic<T: Real>(
    family: &MusielakFamily<T>,
    kernel: &MatrixKernel<T>,
    x: &VectorSequence<T>,
    vn: &VectorNorm<T>,
    sigma_grid: &[T],
    policy: &TruncationPolicy<T>,
) -> Result<MembershipReport<T>> {
    if sigma_grid.is_empty() {
        return Err(Error::Validation("the scale grid must be nonempty".into()));
    }
    let mut prev = T::zero();
    for &s in sigma_grid {
        if !(s > prev) || !s.is_finite() {
            return Err(Error::Validation(
                "the scale grid must be strictly increasing, positive, and finite".into(),
            ));
        }
        prev = s;
    }
    let mut per_sigma = Vec::with_capacity(sigma_grid.len());
    let mut warnings = Vec::new();
    let mut witness = None;
    let mut all_certified = true;
    for &s in sigma_grid {
        let mv = modular(family, kernel, x, vn, s, policy)?;
        let finite_certified = mv.certified && mv.value.is_finite();
        if finite_certified && witness.is_none() {
            witness = Some(s);
        }
        if !finite_certified {
            all_certified = false;
            warnings.push(format!(
                "modular at scale {:e} is not certified within {} rows",
                widen(s),
                mv.rows_used.max(policy.max_rows)
            ));
        }
        per_sigma.push((s, mv));
    }
    Ok(MembershipReport {
        per_sigma,
        l_space_witness: witness,
        h_space_on_grid: all_certified,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::{ExponentSeq, OrliczFunction};
    use proptest::prelude::*;

    fn power_family(p: f64) -> MusielakFamily<f64> {
        MusielakFamily::constant(OrliczFunction::power(p).unwrap())
    }

    fn scalar_seq(pairs: &[(usize, f64)]) -> VectorSequence<f64> {
        VectorSequence::scalar(pairs.to_vec()).unwrap()
    }

    fn l1_scalar() -> VectorNorm<f64> {
        VectorNorm::lp(1, 1.0).unwrap()
    }

    fn default_policy() -> TruncationPolicy<f64> {
        TruncationPolicy::default()
    }

    #[test]
    fn vector_norm_examples() {
        let v = [1.0f64, -2.0, 2.0];
        assert_eq!(VectorNorm::lp(3, 1.0).unwrap().eval(&v).unwrap(), 5.0);
        assert_eq!(VectorNorm::lp(3, 2.0).unwrap().eval(&v).unwrap(), 3.0);
        assert_eq!(VectorNorm::linf(3).unwrap().eval(&v).unwrap(), 2.0);
        let p3 = VectorNorm::lp(3, 3.0).unwrap().eval(&v).unwrap();
        assert!((p3 - 17f64.powf(1.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn vector_norm_validation() {
        assert!(VectorNorm::lp(0, 2.0f64).is_err());
        assert!(VectorNorm::lp(3, 0.5f64).is_err());
        let n = VectorNorm::lp(2, 2.0f64).unwrap();
        assert!(n.eval(&[1.0]).is_err());
        assert!(n.eval(&[1.0, f64::NAN]).is_err());
        assert!(l1_scalar().is_l1());
        assert!(!VectorNorm::lp(1, 2.0f64).unwrap().is_l1());
    }

    #[test]
    fn sequence_validation() {
        assert!(VectorSequence::scalar(vec![(0usize, 1.0f64)]).is_err());
        assert!(VectorSequence::scalar(vec![(2usize, 1.0f64), (2, 2.0)]).is_err());
        assert!(VectorSequence::scalar(vec![(3usize, 1.0f64), (2, 2.0)]).is_err());
        assert!(VectorSequence::new(2, vec![(1usize, vec![1.0f64])]).is_err());
        assert!(VectorSequence::scalar(vec![(1usize, f64::INFINITY)]).is_err());
        assert!(VectorSequence::new(0, Vec::<(usize, Vec<f64>)>::new()).is_err());
    }

    #[test]
    fn section_recombination_is_exact() {
        let x = scalar_seq(&[(1, 0.3), (4, -2.5), (7, 1.0), (9, 0.1)]);
        for m in 0..=10 {
            let recombined = x.section(m).add(&x.tail_section(m)).unwrap();
            assert_eq!(recombined, x, "section split at {m}");
        }
    }

    #[test]
    fn lattice_operations() {
        let x = scalar_seq(&[(1, -3.0), (2, 2.0)]);
        let y = scalar_seq(&[(2, 5.0), (3, -1.0)]);
        assert_eq!(x.abs(), scalar_seq(&[(1, 3.0), (2, 2.0)]));
        let s = x.sup(&y).unwrap();
        assert_eq!(s, scalar_seq(&[(1, 0.0), (2, 5.0), (3, 0.0)]));
        assert!(x.dominated_by(&s).is_ok());
        assert!(x.abs().dominated_by(&x.abs().scale(2.0)).unwrap());
        assert!(!x.abs().scale(2.0).dominated_by(&x.abs()).unwrap());
        assert!(x.dominated_by(&scalar_seq(&[(1, 0.0), (2, 2.0)])).unwrap());
    }

    #[test]
    fn rearrangement_sorts_norms_descending() {
        let x = scalar_seq(&[(1, 0.5), (2, -2.0), (5, 0.0), (9, 0.5)]);
        let r = x.decreasing_rearrangement(&l1_scalar()).unwrap();
        assert_eq!(r, scalar_seq(&[(1, 2.0), (2, 0.5), (3, 0.5)]));
    }

    #[test]
    fn row_image_closed_forms() {
        let vn = l1_scalar();
        let x = scalar_seq(&[(1, 3.0), (3, 1.0)]);
        // Identity: the norm at the row index.
        assert_eq!(row_image(&MatrixKernel::identity(), &x, &vn, 1).unwrap(), 3.0);
        assert_eq!(row_image(&MatrixKernel::identity(), &x, &vn, 2).unwrap(), 0.0);
        // Cesaro: prefix total / n.
        assert_eq!(row_image(&MatrixKernel::cesaro1(), &x, &vn, 2).unwrap(), 1.5);
        assert_eq!(row_image(&MatrixKernel::cesaro1(), &x, &vn, 4).unwrap(), 1.0);
        // Hilbert: Σ w_k/(n+k-1).
        let h = row_image(&MatrixKernel::hilbert(), &x, &vn, 2).unwrap();
        assert!((h - (3.0 / 2.0 + 1.0 / 4.0)).abs() < 1e-15);
        assert!(row_image(&MatrixKernel::identity(), &x, &vn, 0).is_err());
    }

    #[test]
    fn modular_identity_example() {
        let fam = power_family(2.0);
        let x = scalar_seq(&[(1, 3.0), (2, 4.0)]);
        let mv = modular(&fam, &MatrixKernel::identity(), &x, &l1_scalar(), 5.0, &default_policy())
            .unwrap();
        assert!((mv.value - 1.0).abs() < 1e-15);
        assert_eq!(mv.rows_used, 2);
        assert!(mv.certified);
        assert_eq!(mv.tail_estimate, 0.0);
    }

    #[test]
    fn modular_rejects_bad_scale() {
        let fam = power_family(2.0);
        let x = scalar_seq(&[(1, 1.0)]);
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            let r = modular(&fam, &MatrixKernel::identity(), &x, &l1_scalar(), bad, &default_policy());
            assert!(r.is_err(), "scale {bad}");
        }
    }

    #[test]
    fn modular_monotone_and_convex() {
        let fam = power_family(2.0);
        let k = MatrixKernel::cesaro1();
        let vn = l1_scalar();
        let x = scalar_seq(&[(1, 1.0), (2, 2.0)]);
        let pol = default_policy();
        let m1 = modular(&fam, &k, &x, &vn, 0.7, &pol).unwrap().value;
        let m2 = modular(&fam, &k, &x, &vn, 1.3, &pol).unwrap().value;
        assert!(m1 > m2, "modular must decrease in the scale");
        // Convexity in the sequence argument at fixed scale.
        let y = scalar_seq(&[(2, 3.0), (5, 1.0)]);
        let mid = x.scale(0.5).add(&y.scale(0.5)).unwrap();
        let mm = modular(&fam, &k, &mid, &vn, 1.0, &pol).unwrap().value;
        let mx = modular(&fam, &k, &x, &vn, 1.0, &pol).unwrap().value;
        let my = modular(&fam, &k, &y, &vn, 1.0, &pol).unwrap().value;
        assert!(mm <= 0.5 * mx + 0.5 * my + 1e-10);
    }

    #[test]
    fn luxemburg_identity_pythagorean_example() {
        let fam = power_family(2.0);
        let x = scalar_seq(&[(1, 3.0), (2, 4.0)]);
        let r =
            luxemburg_norm(&fam, &MatrixKernel::identity(), &x, &l1_scalar(), 1e-10, &default_policy())
                .unwrap();
        assert!((r.norm - 5.0).abs() < 5.0 * 3e-10, "norm {}", r.norm);
        assert!(r.certified);
        assert!(r.sigma_bracket.0 <= r.norm && r.norm == r.sigma_bracket.1);
    }

    #[test]
    fn luxemburg_d2_l2_coordinates_example() {
        // Coordinates in R^2 under the Euclidean norm, φ(t) = t (p = 1):
        // the norm is the plain sum of coordinate norms, 5 + 1 = 6.
        let fam = power_family(1.0);
        let x = VectorSequence::new(2, vec![(1, vec![3.0, 4.0]), (2, vec![0.0, 1.0])]).unwrap();
        let vn = VectorNorm::lp(2, 2.0).unwrap();
        let r = luxemburg_norm(&fam, &MatrixKernel::identity(), &x, &vn, 1e-10, &default_policy())
            .unwrap();
        assert!((r.norm - 6.0).abs() < 6.0 * 3e-10, "norm {}", r.norm);
    }

    #[test]
    fn luxemburg_zero_sequence() {
        let fam = power_family(2.0);
        let x = VectorSequence::zero(1);
        let r =
            luxemburg_norm(&fam, &MatrixKernel::cesaro1(), &x, &l1_scalar(), 1e-10, &default_policy())
                .unwrap();
        assert_eq!(r.norm, 0.0);
        assert!(r.certified);
    }

    // Frozen value: for x = e_1 the Cesaro row images are 1/n, so the p = 2
    // modular is ζ(2)/σ² and the norm is sqrt(ζ(2)) = π/sqrt(6).
    const PI_OVER_SQRT6: f64 = 1.2825498301618641;

    #[test]
    fn luxemburg_cesaro_power2_e1_is_pi_over_sqrt6() {
        let fam = power_family(2.0);
        let x = scalar_seq(&[(1, 1.0)]);
        let r =
            luxemburg_norm(&fam, &MatrixKernel::cesaro1(), &x, &l1_scalar(), 1e-10, &default_policy())
                .unwrap();
        assert!(
            (r.norm - PI_OVER_SQRT6).abs() < 1e-9,
            "norm {} expected {PI_OVER_SQRT6}",
            r.norm
        );
        assert!(r.certified);
        assert!(r.rows_used < 1000, "closed-form tails keep row counts small");
    }

    #[test]
    fn luxemburg_hilbert_single_support_matches_cesaro() {
        // Hilbert row images for e_1 are also exactly 1/n.
        let fam = power_family(2.0);
        let x = scalar_seq(&[(1, 1.0)]);
        let r =
            luxemburg_norm(&fam, &MatrixKernel::hilbert(), &x, &l1_scalar(), 1e-10, &default_policy())
                .unwrap();
        assert!((r.norm - PI_OVER_SQRT6).abs() < 1e-9, "norm {}", r.norm);
        assert!(r.certified);
    }

    #[test]
    fn luxemburg_hilbert_bracketed_tail_certifies() {
        // x = e_1 + e_2: rows are 1/n + 1/(n+1); telescoping gives
        // Σ (1/n + 1/(n+1))² = 2ζ(2) + 1, so the norm is sqrt(2ζ(2)+1).
        let oracle = (2.0 * std::f64::consts::PI.powi(2) / 6.0 + 1.0).sqrt();
        let fam = power_family(2.0);
        let x = scalar_seq(&[(1, 1.0), (2, 1.0)]);
        let policy = TruncationPolicy::new(200_000, 1e-8, TailModel::IntegralComparison).unwrap();
        let r =
            luxemburg_norm(&fam, &MatrixKernel::hilbert(), &x, &l1_scalar(), 1e-8, &policy).unwrap();
        assert!((r.norm - oracle).abs() < oracle * 3e-8, "norm {} oracle {oracle}", r.norm);
        assert!(r.certified);
    }

    #[test]
    fn homogeneity_within_solver_tolerance() {
        let fam = power_family(2.0);
        let x = scalar_seq(&[(1, 0.3), (3, 2.0)]);
        let vn = l1_scalar();
        let k = MatrixKernel::cesaro1();
        let pol = default_policy();
        let base = luxemburg_norm(&fam, &k, &x, &vn, 1e-10, &pol).unwrap().norm;
        let scaled = luxemburg_norm(&fam, &k, &x.scale(3.5), &vn, 1e-10, &pol).unwrap().norm;
        assert!((scaled - 3.5 * base).abs() <= 3.5 * base * 1e-9);
    }

    #[test]
    fn degenerate_kernel_is_an_error() {
        // Column 2 of this stored table is identically zero, so e_2 is
        // annihilated and no positive scale can make the modular reach 1.
        let k = MatrixKernel::custom_table(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let fam = power_family(2.0);
        let x = scalar_seq(&[(2, 1.0)]);
        let err = luxemburg_norm(&fam, &k, &x, &l1_scalar(), 1e-10, &default_policy()).unwrap_err();
        assert!(matches!(err, Error::Degeneracy(_)), "got {err:?}");
    }

    #[test]
    fn divergent_harmonic_series_reports_truncation() {
        // φ(t) = t over Cesaro rows 1/n: the modular is the harmonic series,
        // infinite at every scale, but partial sums cannot certify that.
        let fam = power_family(1.0);
        let x = scalar_seq(&[(1, 1.0)]);
        let policy = TruncationPolicy::new(5_000, 1e-10, TailModel::IntegralComparison).unwrap();
        let err =
            luxemburg_norm(&fam, &MatrixKernel::cesaro1(), &x, &l1_scalar(), 1e-6, &policy)
                .unwrap_err();
        match err {
            Error::Truncation { partial, .. } => assert!(partial > 0.0),
            other => panic!("expected truncation, got {other:?}"),
        }
    }

    #[test]
    fn norlund_finite_section_is_exact_with_warning() {
        // Constant weights make the Norlund kernel a Cesaro section; with 200
        // stored rows the modular is the exact partial sum Σ_{n≤200} (1/nσ)².
        let weights = vec![1.0f64; 200];
        let k = MatrixKernel::norlund(weights).unwrap();
        let fam = power_family(2.0);
        let x = scalar_seq(&[(1, 1.0)]);
        let r = luxemburg_norm(&fam, &k, &x, &l1_scalar(), 1e-10, &default_policy()).unwrap();
        let h2: f64 = (1..=200).map(|n| 1.0 / (n as f64 * n as f64)).sum();
        let oracle = h2.sqrt();
        assert!((r.norm - oracle).abs() < oracle * 1e-9, "norm {} oracle {oracle}", r.norm);
        assert!(r.certified);
        assert!(r.warnings.iter().any(|w| w.contains("finite section")));
    }

    #[test]
    fn geometric_ratio_certifies_growing_exponents() {
        // Exponents p_n = 1 + n/4 grow, so terms (1/n)^{p_n} decay faster
        // than geometrically; no closed form applies but the ratio heuristic
        // certifies quickly.
        let fam = MusielakFamily::power_seq(ExponentSeq::indexed(|n| 1.0 + n as f64 / 4.0))
            .unwrap();
        let x = scalar_seq(&[(1, 1.0)]);
        let vn = l1_scalar();
        let k = MatrixKernel::cesaro1();
        let geo = TruncationPolicy::new(100_000, 1e-10, TailModel::GeometricRatio).unwrap();
        let bare = TruncationPolicy::new(3_000, 1e-10, TailModel::None).unwrap();
        let mg = modular(&fam, &k, &x, &vn, 1.0, &geo).unwrap();
        let mb = modular(&fam, &k, &x, &vn, 1.0, &bare).unwrap();
        assert!(mg.certified);
        assert!(!mb.certified);
        assert!(mg.rows_used < 100, "rows {}", mg.rows_used);
        assert!((mg.value - mb.value).abs() <= mg.tail_estimate + 1e-12);
    }

    #[test]
    fn geometric_ratio_solver_warns_about_heuristic() {
        let fam = MusielakFamily::power_seq(ExponentSeq::indexed(|n| 1.0 + n as f64 / 4.0))
            .unwrap();
        let x = scalar_seq(&[(1, 1.0)]);
        let geo = TruncationPolicy::new(100_000, 1e-10, TailModel::GeometricRatio).unwrap();
        let r = luxemburg_norm(&fam, &MatrixKernel::cesaro1(), &x, &l1_scalar(), 1e-9, &geo)
            .unwrap();
        assert!(r.certified);
        assert!(r.warnings.iter().any(|w| w.contains("heuristic")));
    }

    #[test]
    fn membership_diagnostic_distinguishes_convergence() {
        let x = scalar_seq(&[(1, 1.0)]);
        let vn = l1_scalar();
        let k = MatrixKernel::cesaro1();
        let grid = [0.5, 1.0, 2.0];
        // p = 2: certified finite everywhere on the grid.
        let good =
            membership_diagnostic(&power_family(2.0), &k, &x, &vn, &grid, &default_policy())
                .unwrap();
        assert_eq!(good.l_space_witness, Some(0.5));
        assert!(good.h_space_on_grid);
        assert!(good.warnings.is_empty());
        // p = 1: harmonic divergence is never certified.
        let policy = TruncationPolicy::new(2_000, 1e-10, TailModel::IntegralComparison).unwrap();
        let bad = membership_diagnostic(&power_family(1.0), &k, &x, &vn, &grid, &policy).unwrap();
        assert_eq!(bad.l_space_witness, None);
        assert!(!bad.h_space_on_grid);
        assert_eq!(bad.warnings.len(), 3);
        // Grid validation.
        assert!(membership_diagnostic(&power_family(2.0), &k, &x, &vn, &[], &policy).is_err());
        assert!(
            membership_diagnostic(&power_family(2.0), &k, &x, &vn, &[1.0, 1.0], &policy).is_err()
        );
    }

    #[test]
    fn policy_validation() {
        assert!(TruncationPolicy::new(0, 1e-10f64, TailModel::None).is_err());
        assert!(TruncationPolicy::new(10, 0.0f64, TailModel::None).is_err());
        assert!(TruncationPolicy::new(10, -1.0f64, TailModel::None).is_err());
        let fam = power_family(2.0);
        let x = scalar_seq(&[(1, 1.0)]);
        for bad_tol in [0.0, -1.0, 0.5, 1.0] {
            let r = luxemburg_norm(
                &fam,
                &MatrixKernel::identity(),
                &x,
                &l1_scalar(),
                bad_tol,
                &default_policy(),
            );
            assert!(r.is_err(), "tol {bad_tol}");
        }
    }

    #[test]
    fn uncertified_budget_cap_reports_rows() {
        // ZeroBeyond support past the row budget: sums what it can, honestly
        // uncertified.
        let fam = power_family(2.0);
        let x = scalar_seq(&[(1, 1.0), (50, 1.0)]);
        let policy = TruncationPolicy::new(10, 1e-10, TailModel::None).unwrap();
        let mv = modular(&fam, &MatrixKernel::identity(), &x, &l1_scalar(), 1.0, &policy).unwrap();
        assert!(!mv.certified);
        assert_eq!(mv.rows_used, 10);
        assert_eq!(mv.value, 1.0);
        assert!(mv.tail_estimate.is_infinite());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn norm_axioms_on_identity_kernel(
            vals_x in proptest::collection::vec(-8.0f64..8.0, 3),
            vals_y in proptest::collection::vec(-8.0f64..8.0, 3),
            p in prop_oneof![Just(1.5f64), Just(2.0), Just(3.0)],
        ) {
            let fam = power_family(p);
            let vn = l1_scalar();
            let k = MatrixKernel::identity();
            let pol = default_policy();
            let tol = 1e-9;
            let x = scalar_seq(&[(1, vals_x[0]), (2, vals_x[1]), (5, vals_x[2])]);
            let y = scalar_seq(&[(1, vals_y[0]), (2, vals_y[1]), (5, vals_y[2])]);
            let nx = luxemburg_norm(&fam, &k, &x, &vn, tol, &pol).unwrap().norm;
            let ny = luxemburg_norm(&fam, &k, &y, &vn, tol, &pol).unwrap().norm;
            let nxy = luxemburg_norm(&fam, &k, &x.add(&y).unwrap(), &vn, tol, &pol).unwrap().norm;
            // Triangle inequality up to bracket slack.
            prop_assert!(nxy <= (nx + ny) * (1.0 + 4.0 * tol) + 1e-12);
            // Monotonicity: |x| ≤ |x| + |y| implies norm ordering.
            let dom = x.abs().add(&y.abs()).unwrap();
            let nd = luxemburg_norm(&fam, &k, &dom, &vn, tol, &pol).unwrap().norm;
            prop_assert!(nx <= nd * (1.0 + 4.0 * tol) + 1e-12);
        }
    }
}
