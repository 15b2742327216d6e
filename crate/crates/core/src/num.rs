//! Scalar abstraction and low-level numeric helpers.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the library is generic over: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + core::ops::AddAssign
    + core::ops::SubAssign
    + core::ops::MulAssign
    + core::ops::DivAssign
    + core::iter::Sum<Self>
    + core::fmt::Debug
    + core::fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + core::ops::AddAssign
        + core::ops::SubAssign
        + core::ops::MulAssign
        + core::ops::DivAssign
        + core::iter::Sum<Self>
        + core::fmt::Debug
        + core::fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` constant into the working scalar.
///
/// Panics only if the conversion is impossible, which cannot happen for the
/// finite literals used throughout the crate.
#[inline]
pub fn real<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("finite f64 constant must convert")
}

/// Widens a scalar to `f64` for error payloads and reports.
#[inline]
pub fn widen<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Compensated (Kahan-Babuska/Neumaier) accumulator.
///
/// Summation order is chosen by the caller and must be deterministic; the
/// compensation only removes the rounding error of that fixed order.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<T: Real> {
    sum: T,
    comp: T,
}

impl<T: Real> KahanSum<T> {
    pub fn new() -> Self {
        KahanSum { sum: T::zero(), comp: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Real> Default for KahanSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Compensated sum of a slice in its given order.
pub fn kahan_sum<T: Real>(values: &[T]) -> T {
    let mut acc = KahanSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

/// Tail of the p-series: `Σ_{n > last} n^{-p}` for `p > 1`, together with a
/// rigorous bound on the approximation error.
///
/// Euler-Maclaurin at `a = last + 1`:
///
/// `Σ_{n ≥ a} n^{-p} = a^{1-p}/(p-1) + a^{-p}/2 + p a^{-p-1}/12
///                     - p(p+1)(p+2) a^{-p-3}/720 + R`,
///
/// and since `t^{-p}` is completely monotone the remainder `R` is bounded in
/// magnitude by the first omitted correction term.
///
/// Returns `None` when `p ≤ 1 + 1e-9` (the series is divergent or too close
/// to divergence for the expansion to be meaningful).
pub fn p_series_tail<T: Real>(p: T, last: usize) -> Option<(T, T)> {
    if last == 0 {
        return None;
    }
    p_series_tail_from(p, real::<T>(last as f64) + T::one())
}

/// `Σ_{j ≥ 0} (a + j)^{-p}` for a real start `a ≥ 1` (the Hurwitz zeta value
/// `ζ(p, a)`), with the same Euler-Maclaurin error bound as [`p_series_tail`].
/// `None` when `p ≤ 1` (divergent) or `a < 1`.
pub fn p_series_tail_from<T: Real>(p: T, a: T) -> Option<(T, T)> {
    let one = T::one();
    if !(p > one + real(1e-9)) || !(a >= one) || !a.is_finite() {
        return None;
    }
    let a_pow = a.powf(-p); // a^{-p}
    let integral = a_pow * a / (p - one); // a^{1-p}/(p-1)
    let half = a_pow / real(2.0);
    let b2 = p * a_pow / a / real(12.0);
    let p3 = p * (p + one) * (p + real(2.0));
    let b4 = p3 * a_pow / (a * a * a) / real(720.0);
    let value = integral + half + b2 - b4;
    let p5 = p3 * (p + real(3.0)) * (p + real(4.0));
    let err = p5 * a_pow / a.powi(5) / real(30240.0);
    Some((value, err))
}
