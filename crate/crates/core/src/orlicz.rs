//! Orlicz functions, Musielak families, and checkers for the structural
//! conditions (doubling, superadditivity, convexity, uniform scaling) that the
//! sequence-space layer relies on.
//!
//! All checkers are *falsifiers on a grid*: a pass certifies the condition on
//! the sampled points only, while a violation is an exact counterexample
//! (up to the stated floating-point tolerance).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::num::{real, widen, KahanSum, Real};

/// Absolute comparison tolerance for checker inequalities on values `≤ 1`;
/// above 1 the same figure is applied relatively. Chosen a few orders above
/// f64 round-off so that exact algebraic identities (e.g. doubling of a pure
/// power with `K = 2^p`) pass with zero slack.
pub const CHECK_TOL: f64 = 1e-12;

/// Smallest scaling offset probed by [`check_star_condition`].
pub const STAR_MIN_DELTA: f64 = 1e-9;

#[inline]
fn slack_allowance<T: Real>(reference: T) -> T {
    let tol = real::<T>(CHECK_TOL);
    tol * T::one().max(reference.abs())
}

/// A single Orlicz function `φ: [0, ∞) → [0, ∞)`.
///
/// Required properties: `φ(0) = 0`, `φ(t) > 0` for `t > 0`, convex,
/// nondecreasing, divergent as `t → ∞`. The built-in kinds satisfy them by
/// construction (exponents are validated to be `≥ 1`); tables are checked at
/// build time; closures must be gated through
/// [`check_convexity_monotonicity`] before use elsewhere.
#[derive(Clone)]
pub enum OrliczFunction<T: Real> {
    /// `φ(t) = t^p`, `p ≥ 1`.
    Power { p: T },
    /// `φ(t) = t^p · (ln(1+t) + 1)`, `p ≥ 1`.
    PowerLog { p: T },
    /// Piecewise-linear interpolation of validated `(t, φ(t))` knots.
    Table(Arc<InterpTable<T>>),
    /// Arbitrary evaluator supplied by the caller (not pre-validated).
    Custom(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: Real> std::fmt::Debug for OrliczFunction<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrliczFunction::Power { p } => write!(f, "Power(p={p:?})"),
            OrliczFunction::PowerLog { p } => write!(f, "PowerLog(p={p:?})"),
            OrliczFunction::Table(t) => write!(f, "Table({} knots)", t.ts.len()),
            OrliczFunction::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

fn validate_exponent<T: Real>(p: T) -> Result<T> {
    if !p.is_finite() || p < T::one() {
        return Err(Error::Validation(format!(
            "orlicz exponent must be finite and >= 1, got {}",
            widen(p)
        )));
    }
    Ok(p)
}

impl<T: Real> OrliczFunction<T> {
    /// Pure power `t^p`.
    pub fn power(p: T) -> Result<Self> {
        Ok(OrliczFunction::Power { p: validate_exponent(p)? })
    }

    /// Power with logarithmic factor `t^p (ln(1+t) + 1)`.
    pub fn power_log(p: T) -> Result<Self> {
        Ok(OrliczFunction::PowerLog { p: validate_exponent(p)? })
    }

    /// Piecewise-linear function through `(t, φ(t))` pairs.
    ///
    /// The knots must start at `(0, 0)`, be strictly increasing in `t`, and
    /// describe a nondecreasing convex positive function; past the last knot
    /// the final slope is extended, so that slope must be positive for the
    /// function to diverge. Violations are reported as validation errors.
    pub fn from_table(pairs: &[(T, T)]) -> Result<Self> {
        let table = InterpTable::new(pairs)?;
        let f = OrliczFunction::Table(Arc::new(table));
        let knots: Vec<T> = match &f {
            OrliczFunction::Table(t) => t.ts.clone(),
            _ => unreachable!(),
        };
        let witness = check_convexity_monotonicity(&f, &knots)?;
        if let Some(point) = witness.violating_point {
            return Err(Error::Validation(format!(
                "table fails the Orlicz axioms near t = {} ({})",
                widen(point),
                witness.detail
            )));
        }
        Ok(f)
    }

    /// Wraps an arbitrary evaluator. The caller is responsible for gating it
    /// through [`check_convexity_monotonicity`] before using it in norms.
    pub fn custom(f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        OrliczFunction::Custom(Arc::new(f))
    }

    /// Evaluates `φ(t)`, rejecting negative or non-finite arguments.
    pub fn eval(&self, t: T) -> Result<T> {
        if !t.is_finite() || t < T::zero() {
            return Err(Error::Domain(format!(
                "orlicz functions are defined on [0, inf), got t = {}",
                widen(t)
            )));
        }
        Ok(self.eval_unchecked(t))
    }

    /// Evaluates `φ(t)` assuming `t ≥ 0` and finite (hot path).
    #[inline]
    pub fn eval_unchecked(&self, t: T) -> T {
        debug_assert!(t >= T::zero() && t.is_finite());
        match self {
            OrliczFunction::Power { p } => t.powf(*p),
            OrliczFunction::PowerLog { p } => t.powf(*p) * ((T::one() + t).ln() + T::one()),
            OrliczFunction::Table(table) => table.eval(t),
            OrliczFunction::Custom(f) => f(t),
        }
    }
}

/// Sorted knot table with linear interpolation and terminal-slope extension.
#[derive(Debug, Clone)]
pub struct InterpTable<T: Real> {
    ts: Vec<T>,
    vs: Vec<T>,
    last_slope: T,
}

impl<T: Real> InterpTable<T> {
    fn new(pairs: &[(T, T)]) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::Validation(
                "interpolation table needs at least 2 knots".into(),
            ));
        }
        for (i, &(t, v)) in pairs.iter().enumerate() {
            if !t.is_finite() || !v.is_finite() || t < T::zero() || v < T::zero() {
                return Err(Error::Validation(format!(
                    "knot {i} must be finite and nonnegative"
                )));
            }
            if i > 0 && t <= pairs[i - 1].0 {
                return Err(Error::Validation(format!(
                    "knot abscissae must be strictly increasing (knot {i})"
                )));
            }
        }
        if pairs[0].0 != T::zero() || pairs[0].1 != T::zero() {
            return Err(Error::Validation("first knot must be (0, 0)".into()));
        }
        let ts: Vec<T> = pairs.iter().map(|&(t, _)| t).collect();
        let vs: Vec<T> = pairs.iter().map(|&(_, v)| v).collect();
        let m = ts.len();
        let last_slope = (vs[m - 1] - vs[m - 2]) / (ts[m - 1] - ts[m - 2]);
        if !(last_slope > T::zero()) {
            return Err(Error::Validation(
                "terminal slope must be positive so the function diverges".into(),
            ));
        }
        Ok(InterpTable { ts, vs, last_slope })
    }

    fn eval(&self, t: T) -> T {
        let m = self.ts.len();
        if t >= self.ts[m - 1] {
            return self.vs[m - 1] + self.last_slope * (t - self.ts[m - 1]);
        }
        // Binary search for the bracketing interval.
        let mut lo = 0usize;
        let mut hi = m - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.ts[mid] <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let w = (t - self.ts[lo]) / (self.ts[hi] - self.ts[lo]);
        self.vs[lo] + w * (self.vs[hi] - self.vs[lo])
    }
}

/// Exponent sequence `(p_n)` for power-type families, indexed from `n = 1`.
#[derive(Clone)]
pub enum ExponentSeq<T: Real> {
    /// `p_n = p`.
    Const(T),
    /// `p_n = 1 + 1/n`.
    OnePlusInvN,
    /// Explicit prefix; indices past the end repeat the final value.
    Explicit(Vec<T>),
    /// Arbitrary index map (caller guarantees `p_n ≥ 1`).
    Indexed(Arc<dyn Fn(usize) -> T + Send + Sync>),
}

impl<T: Real> std::fmt::Debug for ExponentSeq<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExponentSeq::Const(p) => write!(f, "Const({p:?})"),
            ExponentSeq::OnePlusInvN => write!(f, "OnePlusInvN"),
            ExponentSeq::Explicit(v) => write!(f, "Explicit({} values)", v.len()),
            ExponentSeq::Indexed(_) => write!(f, "Indexed(..)"),
        }
    }
}

impl<T: Real> ExponentSeq<T> {
    /// Arbitrary exponent map `n ↦ p_n`; the caller guarantees `p_n ≥ 1`.
    pub fn indexed(f: impl Fn(usize) -> T + Send + Sync + 'static) -> Self {
        ExponentSeq::Indexed(Arc::new(f))
    }

    fn validate(&self) -> Result<()> {
        match self {
            ExponentSeq::Const(p) => validate_exponent(*p).map(|_| ()),
            ExponentSeq::OnePlusInvN => Ok(()),
            ExponentSeq::Explicit(values) => {
                if values.is_empty() {
                    return Err(Error::Validation("explicit exponent list is empty".into()));
                }
                for (i, &p) in values.iter().enumerate() {
                    validate_exponent(p).map_err(|_| {
                        Error::Validation(format!(
                            "exponent {i} must be finite and >= 1, got {}",
                            widen(p)
                        ))
                    })?;
                }
                Ok(())
            }
            ExponentSeq::Indexed(_) => Ok(()),
        }
    }

    /// `p_n` for one-based `n`.
    #[inline]
    pub fn at(&self, n: usize) -> T {
        debug_assert!(n >= 1);
        match self {
            ExponentSeq::Const(p) => *p,
            ExponentSeq::OnePlusInvN => T::one() + T::one() / real(n as f64),
            ExponentSeq::Explicit(values) => values[n.min(values.len()) - 1],
            ExponentSeq::Indexed(f) => f(n),
        }
    }

    /// If the sequence is eventually constant, returns `(n0, p)` with
    /// `p_n = p` for every `n ≥ n0`.
    pub(crate) fn eventually_constant(&self) -> Option<(usize, T)> {
        match self {
            ExponentSeq::Const(p) => Some((1, *p)),
            ExponentSeq::Explicit(values) => Some((values.len(), values[values.len() - 1])),
            _ => None,
        }
    }
}

/// Analytic description of the far tail of a family: every member with index
/// `n ≥ from` coincides with one fixed power-type function. Consumed by the
/// truncation machinery in the space module.
#[derive(Debug, Clone, Copy)]
pub(crate) enum TailShape<T> {
    Power { p: T },
    PowerLog { p: T },
}

/// A Musielak family `(φ_n)_{n ≥ 1}` of Orlicz functions.
#[derive(Clone)]
pub enum MusielakFamily<T: Real> {
    /// `φ_n = φ` for all `n`.
    Constant(OrliczFunction<T>),
    /// `φ_n(t) = t^{p_n}`.
    PowerSeq(ExponentSeq<T>),
    /// `φ_n(t) = t^{p_n} (ln(1+t) + 1)`.
    PowerLogSeq(ExponentSeq<T>),
    /// Arbitrary index map.
    Custom(Arc<dyn Fn(usize) -> OrliczFunction<T> + Send + Sync>),
}

impl<T: Real> std::fmt::Debug for MusielakFamily<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MusielakFamily::Constant(g) => write!(f, "Constant({g:?})"),
            MusielakFamily::PowerSeq(e) => write!(f, "PowerSeq({e:?})"),
            MusielakFamily::PowerLogSeq(e) => write!(f, "PowerLogSeq({e:?})"),
            MusielakFamily::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl<T: Real> MusielakFamily<T> {
    pub fn constant(f: OrliczFunction<T>) -> Self {
        MusielakFamily::Constant(f)
    }

    pub fn power_seq(exponents: ExponentSeq<T>) -> Result<Self> {
        exponents.validate()?;
        Ok(MusielakFamily::PowerSeq(exponents))
    }

    pub fn power_log_seq(exponents: ExponentSeq<T>) -> Result<Self> {
        exponents.validate()?;
        Ok(MusielakFamily::PowerLogSeq(exponents))
    }

    pub fn custom(f: impl Fn(usize) -> OrliczFunction<T> + Send + Sync + 'static) -> Self {
        MusielakFamily::Custom(Arc::new(f))
    }

    /// The `n`-th member (one-based).
    pub fn member(&self, n: usize) -> OrliczFunction<T> {
        debug_assert!(n >= 1);
        match self {
            MusielakFamily::Constant(f) => f.clone(),
            MusielakFamily::PowerSeq(e) => OrliczFunction::Power { p: e.at(n) },
            MusielakFamily::PowerLogSeq(e) => OrliczFunction::PowerLog { p: e.at(n) },
            MusielakFamily::Custom(f) => f(n),
        }
    }

    /// Evaluates `φ_n(t)` with domain validation.
    pub fn eval(&self, n: usize, t: T) -> Result<T> {
        if !t.is_finite() || t < T::zero() {
            return Err(Error::Domain(format!(
                "orlicz functions are defined on [0, inf), got t = {}",
                widen(t)
            )));
        }
        Ok(self.eval_unchecked(n, t))
    }

    /// Evaluates `φ_n(t)` assuming `t ≥ 0` and finite (hot path).
    #[inline]
    pub fn eval_unchecked(&self, n: usize, t: T) -> T {
        match self {
            MusielakFamily::Constant(f) => f.eval_unchecked(t),
            MusielakFamily::PowerSeq(e) => t.powf(e.at(n)),
            MusielakFamily::PowerLogSeq(e) => {
                t.powf(e.at(n)) * ((T::one() + t).ln() + T::one())
            }
            MusielakFamily::Custom(f) => f(n).eval_unchecked(t),
        }
    }

    /// Far-tail description when the family is eventually one fixed power-type
    /// function with exponent `> 1` (the regime in which series tails admit
    /// closed-form summation). Returns `(from_index, shape)`.
    pub(crate) fn tail_shape(&self) -> Option<(usize, TailShape<T>)> {
        let min_p = T::one() + real(1e-9);
        match self {
            MusielakFamily::Constant(OrliczFunction::Power { p }) if *p > min_p => {
                Some((1, TailShape::Power { p: *p }))
            }
            MusielakFamily::Constant(OrliczFunction::PowerLog { p }) if *p > min_p => {
                Some((1, TailShape::PowerLog { p: *p }))
            }
            MusielakFamily::PowerSeq(e) => e
                .eventually_constant()
                .filter(|&(_, p)| p > min_p)
                .map(|(n0, p)| (n0, TailShape::Power { p })),
            MusielakFamily::PowerLogSeq(e) => e
                .eventually_constant()
                .filter(|&(_, p)| p > min_p)
                .map(|(n0, p)| (n0, TailShape::PowerLog { p })),
            _ => None,
        }
    }
}

/// Result of a grid-based condition check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessStatus {
    /// The condition held at every sampled point.
    PassedOnGrid,
    /// A counterexample was found.
    Violated,
}

/// Parameters a check ran with, echoed back for reporting.
#[derive(Debug, Clone)]
pub struct WitnessParams<T> {
    pub k: Option<T>,
    pub delta: Option<T>,
    pub c_l1_bound: Option<T>,
    pub t0: Option<T>,
    pub epsilon: Option<T>,
}

impl<T> Default for WitnessParams<T> {
    fn default() -> Self {
        WitnessParams { k: None, delta: None, c_l1_bound: None, t0: None, epsilon: None }
    }
}

/// Outcome of a condition check: pass-on-grid or an explicit counterexample.
#[derive(Debug, Clone)]
pub struct ConditionWitness<T> {
    pub status: WitnessStatus,
    /// Family index `n` of the counterexample, when applicable.
    pub violating_index: Option<usize>,
    /// Argument at which the condition failed, when applicable.
    pub violating_point: Option<T>,
    /// Check-specific measured quantity (worst excess, slack sum, ...).
    pub observed: Option<T>,
    pub params: WitnessParams<T>,
    /// Human-readable account of what was checked or what failed.
    pub detail: String,
}

impl<T> ConditionWitness<T> {
    pub fn passed(&self) -> bool {
        self.status == WitnessStatus::PassedOnGrid
    }

    fn pass(params: WitnessParams<T>, detail: impl Into<String>) -> Self {
        ConditionWitness {
            status: WitnessStatus::PassedOnGrid,
            violating_index: None,
            violating_point: None,
            observed: None,
            params,
            detail: detail.into(),
        }
    }
}

/// Geometric grid `{0} ∪ {t_min · 2^j} ∪ {t_max}` ascending, with
/// `t_min = 1e-8`. The default sampling lattice for the condition checkers.
pub fn default_grid<T: Real>(t_max: T) -> Result<Vec<T>> {
    if !(t_max > T::zero()) || !t_max.is_finite() {
        return Err(Error::Validation("grid upper end must be positive and finite".into()));
    }
    let mut grid = vec![T::zero()];
    let mut t: T = real(1e-8);
    while t < t_max {
        grid.push(t);
        t = t + t;
    }
    grid.push(t_max);
    Ok(grid)
}

/// Evenly spaced grid with `count ≥ 2` points from `a` to `b` inclusive.
pub fn linear_grid<T: Real>(a: T, b: T, count: usize) -> Result<Vec<T>> {
    if count < 2 || !(b > a) {
        return Err(Error::Validation("linear grid needs count >= 2 and b > a".into()));
    }
    let step = (b - a) / real((count - 1) as f64);
    Ok((0..count).map(|i| a + step * real(i as f64)).collect())
}

fn validate_grid<T: Real>(grid: &[T], min_len: usize) -> Result<()> {
    if grid.len() < min_len {
        return Err(Error::Validation(format!(
            "grid needs at least {min_len} points, got {}",
            grid.len()
        )));
    }
    for (i, &t) in grid.iter().enumerate() {
        if !t.is_finite() || t < T::zero() {
            return Err(Error::Validation(format!(
                "grid point {i} must be finite and nonnegative"
            )));
        }
        if i > 0 && t <= grid[i - 1] {
            return Err(Error::Validation(format!(
                "grid must be strictly ascending (point {i})"
            )));
        }
    }
    Ok(())
}

/// Checks the Orlicz axioms on a grid: `φ(0) = 0`, positivity on `t > 0`,
/// monotonicity between neighbours, and midpoint convexity
/// `φ((s+t)/2) ≤ (φ(s) + φ(t))/2` for adjacent grid pairs as well as the
/// chord inequality at interior grid points.
pub fn check_convexity_monotonicity<T: Real>(
    f: &OrliczFunction<T>,
    grid: &[T],
) -> Result<ConditionWitness<T>> {
    validate_grid(grid, 3)?;
    let params = WitnessParams::default();
    let values: Vec<T> = grid.iter().map(|&t| f.eval(t)).collect::<Result<_>>()?;

    let mut worst: Option<(T, T, String)> = None; // (excess, point, what)
    let mut note = |excess: T, point: T, what: String| {
        let is_worse = worst.as_ref().map_or(true, |(e, _, _)| excess > *e);
        if is_worse {
            worst = Some((excess, point, what));
        }
    };

    for (i, (&t, &v)) in grid.iter().zip(values.iter()).enumerate() {
        if t == T::zero() {
            if v.abs() > slack_allowance(T::zero()) {
                note(v.abs(), t, format!("phi(0) = {} but must vanish", widen(v)));
            }
        } else if !(v > T::zero()) {
            note(T::one(), t, format!("phi({}) = {} not positive", widen(t), widen(v)));
        }
        if i > 0 {
            let drop = values[i - 1] - v;
            if drop > slack_allowance(values[i - 1]) {
                note(drop, t, format!("phi decreases from {} to {}", widen(values[i - 1]), widen(v)));
            }
        }
    }
    // Midpoint convexity across adjacent pairs.
    for i in 0..grid.len() - 1 {
        let (s, t) = (grid[i], grid[i + 1]);
        let mid = (s + t) / real(2.0);
        let lhs = f.eval(mid)?;
        let rhs = (values[i] + values[i + 1]) / real(2.0);
        let excess = lhs - rhs;
        if excess > slack_allowance(rhs) {
            note(excess, mid, format!("midpoint convexity fails: phi({}) = {} > {}", widen(mid), widen(lhs), widen(rhs)));
        }
    }
    // Chord inequality at interior grid points.
    for i in 1..grid.len() - 1 {
        let (a, b, c) = (grid[i - 1], grid[i], grid[i + 1]);
        let lambda = (c - b) / (c - a);
        let bound = lambda * values[i - 1] + (T::one() - lambda) * values[i + 1];
        let excess = values[i] - bound;
        if excess > slack_allowance(bound) {
            note(excess, b, format!("chord convexity fails at grid point {}", widen(b)));
        }
    }

    Ok(match worst {
        None => ConditionWitness::pass(params, "orlicz axioms hold on the grid"),
        Some((excess, point, what)) => ConditionWitness {
            status: WitnessStatus::Violated,
            violating_index: None,
            violating_point: Some(point),
            observed: Some(excess),
            params,
            detail: what,
        },
    })
}

/// Checks superadditivity `φ(u + v) ≥ φ(u) + φ(v)` on the given pairs.
///
/// For convex `φ` with `φ(0) = 0` this holds identically; a violation
/// certifies the input is not a genuine Orlicz function.
pub fn check_superadditive<T: Real>(
    f: &OrliczFunction<T>,
    pairs: &[(T, T)],
) -> Result<ConditionWitness<T>> {
    if pairs.is_empty() {
        return Err(Error::Validation("superadditivity check needs at least one pair".into()));
    }
    let params = WitnessParams::default();
    let mut worst: Option<(T, T)> = None;
    for &(u, v) in pairs {
        let lhs = f.eval(u)? + f.eval(v)?;
        let rhs = f.eval(u + v)?;
        let deficit = lhs - rhs;
        if deficit > slack_allowance(lhs) && worst.map_or(true, |(d, _)| deficit > d) {
            worst = Some((deficit, u + v));
        }
    }
    Ok(match worst {
        None => ConditionWitness::pass(params, "superadditive on all sampled pairs"),
        Some((deficit, point)) => ConditionWitness {
            status: WitnessStatus::Violated,
            violating_index: None,
            violating_point: Some(point),
            observed: Some(deficit),
            params,
            detail: format!("phi(u) + phi(v) exceeds phi(u+v) by {} at u+v = {}", widen(deficit), widen(point)),
        },
    })
}

/// Checks the doubling condition at zero: `φ(2t) ≤ K φ(t)` on a geometric
/// grid of `grid_size` points descending by halves from `t0`.
pub fn check_delta2_zero<T: Real>(
    f: &OrliczFunction<T>,
    k: T,
    t0: T,
    grid_size: usize,
) -> Result<ConditionWitness<T>> {
    if !(k > T::zero()) || !k.is_finite() {
        return Err(Error::Validation("doubling constant K must be positive".into()));
    }
    if !(t0 > T::zero()) || !t0.is_finite() {
        return Err(Error::Validation("t0 must be positive and finite".into()));
    }
    if grid_size == 0 {
        return Err(Error::Validation("grid_size must be at least 1".into()));
    }
    let params = WitnessParams { k: Some(k), t0: Some(t0), ..WitnessParams::default() };
    let mut worst: Option<(T, T)> = None;
    let mut t = t0;
    for _ in 0..grid_size {
        let lhs = f.eval(t + t)?;
        let rhs = k * f.eval(t)?;
        let excess = lhs - rhs;
        if excess > slack_allowance(rhs) && worst.map_or(true, |(e, _)| excess > e) {
            worst = Some((excess, t));
        }
        t = t / real(2.0);
    }
    Ok(match worst {
        None => ConditionWitness::pass(params, "doubling holds on the grid"),
        Some((excess, point)) => ConditionWitness {
            status: WitnessStatus::Violated,
            violating_index: None,
            violating_point: Some(point),
            observed: Some(excess),
            params,
            detail: format!("phi(2t) exceeds K*phi(t) by {} at t = {}", widen(excess), widen(point)),
        },
    })
}

/// Family-wide doubling with a general scale factor `beta > 1`:
/// for each `n ≤ n_max` the pointwise-minimal slack
/// `c_n = max over grid x with φ_n(x) ≤ delta of (φ_n(beta·x) - K φ_n(x))_+`
/// is accumulated, and the check passes when `Σ c_n ≤ c_l1_bound`.
pub fn check_scaling_family<T: Real>(
    family: &MusielakFamily<T>,
    beta: T,
    k: T,
    delta: T,
    c_l1_bound: T,
    n_max: usize,
    grid: &[T],
) -> Result<ConditionWitness<T>> {
    if !(beta > T::one()) || !beta.is_finite() {
        return Err(Error::Validation("scale factor beta must exceed 1".into()));
    }
    if !(k > T::zero()) || !k.is_finite() {
        return Err(Error::Validation("doubling constant K must be positive".into()));
    }
    if !(delta > T::zero()) || !delta.is_finite() {
        return Err(Error::Validation("delta must be positive".into()));
    }
    if !(c_l1_bound >= T::zero()) || !c_l1_bound.is_finite() {
        return Err(Error::Validation("c_l1_bound must be nonnegative".into()));
    }
    if n_max == 0 {
        return Err(Error::Validation("n_max must be at least 1".into()));
    }
    validate_grid(grid, 1)?;

    let params = WitnessParams {
        k: Some(k),
        delta: Some(delta),
        c_l1_bound: Some(c_l1_bound),
        ..WitnessParams::default()
    };
    let mut total = KahanSum::<T>::new();
    let mut worst: Option<(T, usize, T)> = None; // (excess, n, x)
    for n in 1..=n_max {
        let mut c_n = T::zero();
        for &x in grid {
            let base = family.eval(n, x)?;
            if base > delta {
                continue; // outside the constrained region
            }
            let lhs = family.eval(n, beta * x)?;
            let rhs = k * base;
            let excess = lhs - rhs;
            if excess > slack_allowance(rhs) {
                if excess > c_n {
                    c_n = excess;
                }
                if worst.map_or(true, |(e, _, _)| excess > e) {
                    worst = Some((excess, n, x));
                }
            }
        }
        total.add(c_n);
    }
    let slack_sum = total.value();
    if slack_sum <= c_l1_bound + slack_allowance(c_l1_bound) {
        let mut w = ConditionWitness::pass(params, "slack sum within the l1 budget");
        w.observed = Some(slack_sum);
        Ok(w)
    } else {
        let (excess, n, x) = worst.expect("positive slack sum implies a worst point");
        Ok(ConditionWitness {
            status: WitnessStatus::Violated,
            violating_index: Some(n),
            violating_point: Some(x),
            observed: Some(slack_sum),
            params,
            detail: format!(
                "slack sum {} exceeds budget {}; worst excess {} at (n, x) = ({n}, {})",
                widen(slack_sum),
                widen(c_l1_bound),
                widen(excess),
                widen(x)
            ),
        })
    }
}

/// Family doubling condition (`beta = 2`): `φ_n(2x) ≤ K φ_n(x) + c_n`
/// whenever `φ_n(x) ≤ delta`, with `Σ c_n ≤ c_l1_bound`.
pub fn check_delta2_family<T: Real>(
    family: &MusielakFamily<T>,
    k: T,
    delta: T,
    c_l1_bound: T,
    n_max: usize,
    grid: &[T],
) -> Result<ConditionWitness<T>> {
    check_scaling_family(family, real(2.0), k, delta, c_l1_bound, n_max, grid)
}

/// Uniform outward-scaling condition: estimates the largest `delta ∈ (0, 1]`
/// such that `φ_n(u) < 1 - epsilon` implies `φ_n((1 + delta) u) ≤ 1` for all
/// `n ≤ n_max` and all grid points `u`.
///
/// Returns the estimate together with a witness; a violation (no
/// `delta ≥ 1e-9` works) reports the offending `(n, u)` and estimate `0`.
pub fn check_star_condition<T: Real>(
    family: &MusielakFamily<T>,
    epsilon: T,
    n_max: usize,
    grid: &[T],
) -> Result<(T, ConditionWitness<T>)> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::Validation("epsilon must lie in (0, 1)".into()));
    }
    if n_max == 0 {
        return Err(Error::Validation("n_max must be at least 1".into()));
    }
    validate_grid(grid, 1)?;

    let one = T::one();
    let threshold = one - epsilon;
    // Pre-filter the constrained points once; φ is monotone so the predicate
    // below is antitone in delta, making bisection valid.
    let mut constrained: Vec<(usize, T)> = Vec::new();
    for n in 1..=n_max {
        for &u in grid {
            if u > T::zero() && family.eval(n, u)? < threshold {
                constrained.push((n, u));
            }
        }
    }
    let params = WitnessParams { epsilon: Some(epsilon), ..WitnessParams::default() };
    if constrained.is_empty() {
        let mut w = ConditionWitness::pass(params, "no grid point falls in the constrained region");
        w.params.delta = Some(one);
        return Ok((one, w));
    }

    let admissible = |delta: T| -> Result<Option<(usize, T)>> {
        for &(n, u) in &constrained {
            let v = family.eval(n, (one + delta) * u)?;
            if v > one + slack_allowance(one) {
                return Ok(Some((n, u)));
            }
        }
        Ok(None)
    };

    if admissible(one)?.is_none() {
        let mut w = ConditionWitness::pass(params, "delta = 1 is admissible");
        w.params.delta = Some(one);
        return Ok((one, w));
    }
    let min_delta: T = real(STAR_MIN_DELTA);
    if let Some((n, u)) = admissible(min_delta)? {
        let w = ConditionWitness {
            status: WitnessStatus::Violated,
            violating_index: Some(n),
            violating_point: Some(u),
            observed: None,
            params,
            detail: format!(
                "even delta = {STAR_MIN_DELTA:e} pushes phi_{n}({}) past 1",
                widen(u)
            ),
        };
        return Ok((T::zero(), w));
    }
    let mut lo = min_delta; // admissible
    let mut hi = one; // not admissible
    for _ in 0..200 {
        if hi - lo <= real(1e-12) {
            break;
        }
        let mid = (lo + hi) / real(2.0);
        if admissible(mid)?.is_none() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut w = ConditionWitness::pass(params, "largest admissible delta found by bisection");
    w.params.delta = Some(lo);
    Ok((lo, w))
}
