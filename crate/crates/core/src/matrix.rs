//! Infinite matrix kernels `A = (a_nk)` and window diagnostics.
//!
//! Kernels are defined entrywise for one-based `(n, k)`; the built-ins have
//! closed forms valid for every index, while Norlund weights and custom
//! tables are finite and answer a range error past their stored extent.

use crate::error::{Error, Result};
use crate::num::{real, KahanSum, Real};
use crate::orlicz::MusielakFamily;
use crate::space::{LuxemburgResult, SeriesSpec, TruncationPolicy};

/// An infinite nonnegative-indexed matrix kernel.
#[derive(Debug, Clone)]
pub enum MatrixKernel<T: Real> {
    /// `a_nk = [n = k]`.
    Identity,
    /// First-order Cesaro means: `a_nk = 1/n` for `k ≤ n`.
    Cesaro1,
    /// Norlund means `a_nk = w_{n+1-k} / W_n` for `k ≤ n`, where `W_n` is the
    /// partial sum of the stored weights. Defined for `n ≤ weights.len()`.
    Norlund { weights: Vec<T>, partial_sums: Vec<T> },
    /// `a_nk = 1/(n + k - 1)`.
    Hilbert,
    /// Diagonal `a_nn = n^{1/p - 1/q}`.
    LorentzDiag { p: T, q: T, alpha: T },
    /// Dense stored window; indices outside it are a range error.
    CustomTable { entries: Vec<Vec<T>>, cols: usize },
}

impl<T: Real> MatrixKernel<T> {
    pub fn identity() -> Self {
        MatrixKernel::Identity
    }

    pub fn cesaro1() -> Self {
        MatrixKernel::Cesaro1
    }

    /// Norlund kernel from nonnegative weights with `w_1 > 0` (which makes
    /// every partial sum positive).
    pub fn norlund(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Validation("norlund weights must be nonempty".into()));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < T::zero() {
                return Err(Error::Validation(format!(
                    "norlund weight {} must be finite and nonnegative",
                    i + 1
                )));
            }
        }
        if !(weights[0] > T::zero()) {
            return Err(Error::Validation("first norlund weight must be positive".into()));
        }
        let mut partial_sums = Vec::with_capacity(weights.len());
        let mut acc = KahanSum::new();
        for &w in &weights {
            acc.add(w);
            partial_sums.push(acc.value());
        }
        Ok(MatrixKernel::Norlund { weights, partial_sums })
    }

    pub fn hilbert() -> Self {
        MatrixKernel::Hilbert
    }

    /// Diagonal kernel `n^{1/p - 1/q}` with `1 ≤ p ≤ q`.
    pub fn lorentz_diag(p: T, q: T) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() || p < T::one() || q < p {
            return Err(Error::Validation(
                "lorentz_diag needs finite exponents with 1 <= p <= q".into(),
            ));
        }
        let alpha = T::one() / p - T::one() / q;
        Ok(MatrixKernel::LorentzDiag { p, q, alpha })
    }

    /// Dense stored window (rectangular, finite entries).
    pub fn custom_table(entries: Vec<Vec<T>>) -> Result<Self> {
        if entries.is_empty() || entries[0].is_empty() {
            return Err(Error::Validation("custom table must be nonempty".into()));
        }
        let cols = entries[0].len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Validation(format!(
                    "custom table row {} has {} entries, expected {cols}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Validation(format!(
                        "custom table entry ({}, {}) must be finite",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(MatrixKernel::CustomTable { entries, cols })
    }

    /// Entry `a_nk` for one-based indices.
    pub fn entry(&self, n: usize, k: usize) -> Result<T> {
        if n == 0 || k == 0 {
            return Err(Error::Range("matrix indices are one-based".into()));
        }
        match self {
            MatrixKernel::Identity => Ok(if n == k { T::one() } else { T::zero() }),
            MatrixKernel::Cesaro1 => Ok(if k <= n { T::one() / real(n as f64) } else { T::zero() }),
            MatrixKernel::Norlund { weights, partial_sums } => {
                if n > weights.len() {
                    return Err(Error::Range(format!(
                        "norlund kernel stores {} weights; row {n} is undefined",
                        weights.len()
                    )));
                }
                if k > n {
                    Ok(T::zero())
                } else {
                    Ok(weights[n - k] / partial_sums[n - 1])
                }
            }
            MatrixKernel::Hilbert => Ok(T::one() / real((n + k - 1) as f64)),
            MatrixKernel::LorentzDiag { alpha, .. } => {
                Ok(if n == k { real::<T>(n as f64).powf(*alpha) } else { T::zero() })
            }
            MatrixKernel::CustomTable { entries, cols } => {
                if n > entries.len() || k > *cols {
                    return Err(Error::Range(format!(
                        "custom table stores {}x{} entries; ({n}, {k}) is out of range",
                        entries.len(),
                        cols
                    )));
                }
                Ok(entries[n - 1][k - 1])
            }
        }
    }

    /// First row (within `1..=limit`) at which column `k` is nonzero, using
    /// closed forms for the built-in kernels.
    pub fn column_nonzero_row(&self, k: usize, limit: usize) -> Result<Option<usize>> {
        if k == 0 {
            return Err(Error::Range("matrix indices are one-based".into()));
        }
        match self {
            MatrixKernel::Identity | MatrixKernel::Cesaro1 | MatrixKernel::LorentzDiag { .. } => {
                Ok((k <= limit).then_some(k))
            }
            MatrixKernel::Hilbert => Ok((limit >= 1).then_some(1)),
            MatrixKernel::Norlund { weights, .. } => {
                let top = limit.min(weights.len());
                for n in k..=top {
                    if weights[n - k] > T::zero() {
                        return Ok(Some(n));
                    }
                }
                Ok(None)
            }
            MatrixKernel::CustomTable { entries, cols } => {
                if k > *cols {
                    return Ok(None);
                }
                for (i, row) in entries.iter().take(limit).enumerate() {
                    if row[k - 1] != T::zero() {
                        return Ok(Some(i + 1));
                    }
                }
                Ok(None)
            }
        }
    }

    /// True when the kernel window `1..=window` is lower triangular with a
    /// nonzero diagonal.
    pub fn is_triangle(&self, window: usize) -> Result<bool> {
        if window == 0 {
            return Err(Error::Validation("window must be at least 1".into()));
        }
        for n in 1..=window {
            if self.entry(n, n)? == T::zero() {
                return Ok(false);
            }
            for k in (n + 1)..=window {
                if self.entry(n, k)? != T::zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Class membership on a window: every column must show a nonzero entry.
    pub fn in_class_a(&self, window_rows: usize, window_cols: usize) -> Result<ClassAReport> {
        if window_rows == 0 || window_cols == 0 {
            return Err(Error::Validation("window must be at least 1x1".into()));
        }
        let mut first_nonzero_row_per_column = Vec::with_capacity(window_cols);
        for k in 1..=window_cols {
            let mut found = None;
            for n in 1..=window_rows {
                if self.entry(n, k)? != T::zero() {
                    found = Some(n);
                    break;
                }
            }
            first_nonzero_row_per_column.push(found);
        }
        let member_on_window = first_nonzero_row_per_column.iter().all(|c| c.is_some());
        Ok(ClassAReport { member_on_window, first_nonzero_row_per_column })
    }

    /// Windowed estimate of the column-halving constant: the smallest `M`
    /// with `|a_{n,2k-1}| + |a_{n,2k}| ≤ M |a_nk|` over the window, i.e. the
    /// max of the left side over `|a_nk|` on entries with `a_nk ≠ 0`.
    ///
    /// Entries with `a_nk = 0` but a positive left side make the inequality
    /// unsatisfiable for any `M` and are flagged as a hard violation.
    /// Reading the left side touches columns up to `2 * window_cols`, which
    /// must lie inside the stored extent for finite kernels.
    pub fn estimate_condition_m(
        &self,
        window_rows: usize,
        window_cols: usize,
    ) -> Result<ConditionMReport<T>> {
        if window_rows == 0 || window_cols == 0 {
            return Err(Error::Validation("window must be at least 1x1".into()));
        }
        let mut m_estimate = T::zero();
        let mut attained_at = None;
        let mut violated = false;
        let mut violating_entry = None;
        for n in 1..=window_rows {
            for k in 1..=window_cols {
                let base = self.entry(n, k)?.abs();
                let left = self.entry(n, 2 * k - 1)?.abs() + self.entry(n, 2 * k)?.abs();
                if base == T::zero() {
                    if left > T::zero() && violating_entry.is_none() {
                        violated = true;
                        violating_entry = Some((n, k));
                    }
                } else {
                    let ratio = left / base;
                    if ratio > m_estimate {
                        m_estimate = ratio;
                        attained_at = Some((n, k));
                    }
                }
            }
        }
        Ok(ConditionMReport {
            m_estimate,
            attained_at,
            violated,
            violating_entry,
            window_rows,
            window_cols,
        })
    }

    /// Luxemburg norm of the scalar column sequence `(|a_{n,col}|)_n` in the
    /// plain (identity-kernel) space of the family.
    pub fn column_lphi_norm(
        &self,
        family: &MusielakFamily<T>,
        col: usize,
        tol: T,
        policy: &TruncationPolicy<T>,
    ) -> Result<LuxemburgResult<T>> {
        if col == 0 {
            return Err(Error::Range("matrix indices are one-based".into()));
        }
        let decay = self.column_decay(col);
        // Probe for the column scale; an identically-zero stored column has
        // norm zero, anything undetectable is degenerate.
        let probe_limit = policy.max_rows.min(4 * col + 64).max(1);
        let first = self.column_nonzero_row(col, probe_limit)?;
        let sigma0 = match first {
            Some(n) => self.entry(n, col)?.abs(),
            None => {
                let zero_proved = match &decay {
                    RowDecay::ZeroBeyond { last_row } | RowDecay::DefinedUpTo { last_row } => {
                        *last_row <= probe_limit
                    }
                    _ => false,
                };
                if zero_proved {
                    return Ok(LuxemburgResult::zero());
                }
                return Err(Error::Degeneracy(format!(
                    "column {col} has no nonzero entry in the first {probe_limit} rows"
                )));
            }
        };
        let row_value = |n: usize| self.entry(n, col).map(|v| v.abs());
        let series = SeriesSpec { family, row_value: &row_value, decay };
        crate::space::lux_solve(&series, sigma0, tol, policy, Vec::new())
    }

    /// Tail behaviour of `n ↦ Σ_k |a_nk| w_k` over a fixed support, used by
    /// the truncation machinery. `indices` are the support columns ascending,
    /// `norms` the coordinate norms, `total` their sum.
    pub(crate) fn support_decay(&self, indices: &[usize], norms: &[T], total: T) -> RowDecay<T> {
        if indices.is_empty() {
            return RowDecay::ZeroBeyond { last_row: 0 };
        }
        let k_max = *indices.last().expect("nonempty support");
        match self {
            MatrixKernel::Identity | MatrixKernel::LorentzDiag { .. } => {
                RowDecay::ZeroBeyond { last_row: k_max }
            }
            MatrixKernel::Cesaro1 => {
                RowDecay::ExactInverse { coeff: total, shift: 0, from_row: k_max }
            }
            MatrixKernel::Hilbert => {
                if indices.len() == 1 {
                    RowDecay::ExactInverse { coeff: norms[0], shift: indices[0] - 1, from_row: 1 }
                } else {
                    let pieces =
                        indices.iter().zip(norms).map(|(&k, &w)| (k - 1, w)).collect();
                    RowDecay::InverseSum { pieces, from_row: 1 }
                }
            }
            MatrixKernel::Norlund { weights, .. } => {
                RowDecay::DefinedUpTo { last_row: weights.len() }
            }
            MatrixKernel::CustomTable { entries, .. } => {
                RowDecay::DefinedUpTo { last_row: entries.len() }
            }
        }
    }

    /// Tail behaviour of a single column `n ↦ |a_{n,col}|`.
    pub(crate) fn column_decay(&self, col: usize) -> RowDecay<T> {
        match self {
            MatrixKernel::Identity | MatrixKernel::LorentzDiag { .. } => {
                RowDecay::ZeroBeyond { last_row: col }
            }
            MatrixKernel::Cesaro1 => {
                RowDecay::ExactInverse { coeff: T::one(), shift: 0, from_row: col }
            }
            MatrixKernel::Hilbert => {
                RowDecay::ExactInverse { coeff: T::one(), shift: col - 1, from_row: 1 }
            }
            MatrixKernel::Norlund { weights, .. } => {
                RowDecay::DefinedUpTo { last_row: weights.len() }
            }
            MatrixKernel::CustomTable { entries, .. } => {
                RowDecay::DefinedUpTo { last_row: entries.len() }
            }
        }
    }

    /// Stored row extent for kernels backed by finite data, `None` for the
    /// built-ins with closed forms at every index.
    pub fn stored_row_extent(&self) -> Option<usize> {
        match self {
            MatrixKernel::Norlund { weights, .. } => Some(weights.len()),
            MatrixKernel::CustomTable { entries, .. } => Some(entries.len()),
            _ => None,
        }
    }
}

/// How row values behave past every explicitly summed row.
#[derive(Debug, Clone)]
pub(crate) enum RowDecay<T> {
    /// Rows past `last_row` are exactly zero.
    ZeroBeyond { last_row: usize },
    /// `value(n) = coeff / (n + shift)` exactly for `n ≥ from_row`.
    ExactInverse { coeff: T, shift: usize, from_row: usize },
    /// `value(n) = Σ_k w_k / (n + s_k)` exactly for `n ≥ from_row`, with
    /// `pieces = [(s_k, w_k)]`, shifts ascending, weights positive. No single
    /// closed form sums the tail, but it is bracketed between shifted
    /// p-series through monotonicity, convexity and superadditivity.
    InverseSum { pieces: Vec<(usize, T)>, from_row: usize },
    /// The kernel stores rows only up to `last_row`; later rows do not exist.
    /// Sums over such kernels are exact for the stored finite section.
    DefinedUpTo { last_row: usize },
}

/// Column occupancy report for a window.
#[derive(Debug, Clone)]
pub struct ClassAReport {
    pub member_on_window: bool,
    /// For each window column, the first row with a nonzero entry (if any).
    pub first_nonzero_row_per_column: Vec<Option<usize>>,
}

/// Windowed column-halving constant report.
#[derive(Debug, Clone)]
pub struct ConditionMReport<T> {
    /// Max of `(|a_{n,2k-1}| + |a_{n,2k}|) / |a_nk|` over nonzero entries.
    pub m_estimate: T,
    /// Entry attaining the estimate (first in row-major order).
    pub attained_at: Option<(usize, usize)>,
    /// True when some zero entry faces a positive left side.
    pub violated: bool,
    /// First violating entry in row-major order.
    pub violating_entry: Option<(usize, usize)>,
    pub window_rows: usize,
    pub window_cols: usize,
}
