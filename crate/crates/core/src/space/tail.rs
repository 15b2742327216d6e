//! Closed-form summation of series tails `Σ_{n > N} φ(γ / n)` for power-type
//! Orlicz functions, with rigorous error bounds.
//!
//! These are the workhorses behind certified truncation: when row images
//! decay exactly like `coeff/(n + shift)` the remaining tail of the modular
//! series is evaluated analytically instead of row by row, so certification
//! at tight tolerances costs a few hundred explicit rows rather than millions.

use crate::num::{p_series_tail_from, real, Real};
use crate::orlicz::TailShape;

/// `Σ_{n > last} φ(γ/n)` and an error bound, for `φ` of the given shape.
///
/// * `Power { p }`: exactly `γ^p ζ(p, last)` via the Euler-Maclaurin p-series
///   tail; requires `p > 1`.
/// * `PowerLog { p }`: expands `ln(1 + u) = Σ (-1)^{j+1} u^j / j`, valid and
///   rapidly convergent when `γ/(last+1) ≤ 1/2`; otherwise `None`.
///
/// Returns `None` when no convergent closed form applies.
pub(crate) fn analytic_tail<T: Real>(
    shape: TailShape<T>,
    gamma: T,
    last: usize,
) -> Option<(T, T)> {
    if last == 0 {
        return None;
    }
    analytic_tail_from(shape, gamma, real::<T>(last as f64) + T::one())
}

/// `Σ_{j ≥ 0} φ(γ/(first + j))` for a real start `first ≥ 1` — the same
/// closed forms as [`analytic_tail`] but over a shifted lattice, which lets
/// callers sum `φ(γ/(n + s))` past an integer cutoff for fractional `s`.
pub(crate) fn analytic_tail_from<T: Real>(
    shape: TailShape<T>,
    gamma: T,
    first: T,
) -> Option<(T, T)> {
    if gamma < T::zero() || !gamma.is_finite() || !(first >= T::one()) || !first.is_finite() {
        return None;
    }
    if gamma == T::zero() {
        return Some((T::zero(), T::zero()));
    }
    match shape {
        TailShape::Power { p } => {
            let (z, zerr) = p_series_tail_from(p, first)?;
            let scale = gamma.powf(p);
            Some((scale * z, scale * zerr))
        }
        TailShape::PowerLog { p } => {
            let u0 = gamma / first;
            if u0 > real(0.5) {
                return None;
            }
            // Base power part: Σ u_n^p.
            let (z0, z0err) = p_series_tail_from(p, first)?;
            let base = gamma.powf(p);
            let mut value = base * z0;
            let mut err = base * z0err;
            // Log part: Σ u_n^p ln(1 + u_n) = Σ_j (-1)^{j+1}/j γ^{p+j} ζ(p+j, first).
            let mut gamma_pow = base;
            let mut truncation = T::zero();
            for j in 1..=40usize {
                gamma_pow = gamma_pow * gamma;
                let (zj, zjerr) = p_series_tail_from(p + real(j as f64), first)?;
                let coef = T::one() / real(j as f64);
                let term = coef * gamma_pow * zj;
                if j % 2 == 1 {
                    value += term;
                } else {
                    value -= term;
                }
                err += coef * gamma_pow * zjerr;
                // Alternating remainder bound: next term magnitude.
                let (znext, _) = p_series_tail_from(p + real((j + 1) as f64), first)?;
                truncation = gamma_pow * gamma * znext / real((j + 1) as f64);
                if truncation <= real::<T>(1e-17) * value.max(T::one()) {
                    break;
                }
            }
            err += truncation;
            Some((value, err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::KahanSum;

    fn brute_tail(p: f64, log_factor: bool, gamma: f64, last: usize, terms: usize) -> f64 {
        let mut acc = KahanSum::new();
        for n in (last + 1)..=(last + terms) {
            let u = gamma / n as f64;
            let mut t = u.powf(p);
            if log_factor {
                t *= (1.0 + u).ln() + 1.0;
            }
            acc.add(t);
        }
        acc.value()
    }

    #[test]
    fn power_tail_matches_brute_force() {
        let gamma = 3.7f64;
        let last = 50usize;
        let (value, err) = analytic_tail(TailShape::Power { p: 2.0 }, gamma, last).unwrap();
        // Brute force 1e7 terms; its own remainder is below gamma^2/1e7.
        let brute = brute_tail(2.0, false, gamma, last, 10_000_000);
        let brute_rem = gamma * gamma / 1e7;
        assert!((value - brute).abs() <= err + brute_rem + 1e-12);
        assert!(err < 1e-9);
    }

    #[test]
    fn power_log_tail_matches_brute_force() {
        // PowerLog part includes the (ln(1+u)+1) factor; note the base power
        // series is already part of the closed form.
        let gamma = 2.0f64;
        let last = 40usize;
        let (value, err) = analytic_tail(TailShape::PowerLog { p: 2.0 }, gamma, last).unwrap();
        let brute = brute_tail(2.0, true, gamma, last, 10_000_000);
        let brute_rem = 2.0 * gamma * gamma / 1e7; // log factor < 2 in range
        assert!(
            (value - brute).abs() <= err + brute_rem + 1e-12,
            "analytic {value:e} vs brute {brute:e}"
        );
    }

    #[test]
    fn power_log_tail_requires_small_argument() {
        // gamma/(last+1) > 1/2: expansion refused.
        assert!(analytic_tail(TailShape::PowerLog { p: 2.0f64 }, 100.0, 40).is_none());
        // Power shape has no such constraint.
        assert!(analytic_tail(TailShape::Power { p: 2.0f64 }, 100.0, 40).is_some());
    }

    #[test]
    fn divergent_exponent_refused() {
        assert!(analytic_tail(TailShape::Power { p: 1.0f64 }, 1.0, 10).is_none());
    }

    #[test]
    fn zero_gamma_is_zero_tail() {
        let (v, e) = analytic_tail(TailShape::Power { p: 2.0f64 }, 0.0, 10).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(e, 0.0);
    }
}
