//! Gaver-Stehfest inversion of real-valued Laplace transforms.
//!
//! `f(t) ≈ (ln 2 / t) Σ_{k=1}^{N} V_k F(k ln 2 / t)` with the Stehfest
//! weights `V_k`. The weights alternate and grow like `e^{N}`, so in double
//! precision `N` beyond about 18 loses more to cancellation than it gains.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// Default number of terms.
pub const STEHFEST_TERMS: usize = 14;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    (1..=n)
        .map(|k| {
            let lo = k.div_ceil(2);
            let hi = k.min(half);
            let s: f64 = (lo..=hi)
                .map(|j| {
                    (j as f64).powi(half as i32) * factorial(2 * j)
                        / (factorial(half - j) * factorial(j) * factorial(j - 1) * factorial(k - j) * factorial(2 * j - k))
                })
                .sum();
            if (k + half).is_multiple_of(2) {
                s
            } else {
                -s
            }
        })
        .collect()
}

/// `f(t)` from its Laplace transform with `n` Stehfest terms (`n` even,
/// `2 ≤ n ≤ 20`).
pub fn gaver_stehfest<F>(transform: F, t: f64, n: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if n < 2 || !n.is_multiple_of(2) || n > 20 {
        return Err(Error::Inversion(format!("Stehfest term count must be even in [2, 20], got {n}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Inversion(format!("Stehfest inversion needs t > 0, got {t}")));
    }
    let a = LN_2 / t;
    let mut acc = 0.0;
    for (k, v) in weights(n).into_iter().enumerate() {
        acc += v * transform((k + 1) as f64 * a)?;
    }
    let out = a * acc;
    if !out.is_finite() {
        return Err(Error::Inversion(format!("non-finite Stehfest sum at t = {t}")));
    }
    Ok(out)
}

/// Inversion at the default term count, checked against neighbouring term
/// counts. Returns the value and the spread of the checks.
pub(crate) fn checked_inversion<F>(transform: F, t: f64, tolerance: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let base = gaver_stehfest(&transform, t, STEHFEST_TERMS)?;
    let spread = [12, 16]
        .iter()
        .map(|&n| gaver_stehfest(&transform, t, n).map(|v| (v - base).abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if spread > tolerance.max(tolerance * base.abs()) {
        return Err(Error::Inversion(format!(
            "Stehfest terms 12/14/16 disagree by {spread:e} at t = {t} (tolerance {tolerance:e})"
        )));
    }
    Ok((base, spread))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_zero() {
        for n in [8, 12, 14, 16] {
            let s: f64 = weights(n).iter().sum();
            assert!(s.abs() < 1e-6, "n={n}: {s}");
        }
    }

    #[test]
    fn inverts_elementary_transforms() {
        // 1/(q+1) ↔ e^{-t}; 1/q² ↔ t
        for &t in &[0.3, 1.0, 4.0] {
            let e = gaver_stehfest(|q| Ok(1.0 / (q + 1.0)), t, 14).unwrap();
            assert!((e - (-t).exp()).abs() < 5e-5, "t={t}: {e}");
            let r = gaver_stehfest(|q| Ok(1.0 / (q * q)), t, 14).unwrap();
            assert!((r - t).abs() < 1e-6 * t, "t={t}: {r}");
        }
        assert!(gaver_stehfest(|q| Ok(1.0 / q), 1.0, 13).is_err());
    }
}
