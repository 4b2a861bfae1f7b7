//! Rodrigues-type co-eigenfunctions of the Gauss-Laguerre semigroup.
//!
//! Functions of the form `Σ c_i x^{a_i} e^{-x^{1/α}} / N` are closed under
//! differentiation:
//!
//! ```text
//! d/dx [x^a e^{-x^{1/α}}] = a x^{a-1} e^{-x^{1/α}} - (1/α) x^{a+1/α-1} e^{-x^{1/α}}
//! ```
//!
//! so `(x^n 𝐞_{α,b}(x))^{(n)}` can be built exactly in this term algebra.
//! Equal powers are merged after every step, so after `n` derivatives of a
//! single term there are at most `n + 1` terms (powers `a - n + j/α`).

use crate::error::{invalid, Error, Result};
use crate::stats::{ln_gamma, CompensatedSum};

/// Default degree limit for the Rodrigues construction. The coefficients
/// alternate in sign and grow like binomials times Gamma ratios, so the
/// cancellation error of the evaluated sum grows with `n`.
pub const RODRIGUES_N_MAX: usize = 12;

/// `f(x) = Σ c_i x^{a_i} e^{-x^{1/α}} / normalizer`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTermSum {
    alpha_inv: f64,
    terms: Vec<(f64, f64)>,
    normalizer: f64,
}

impl ExpTermSum {
    /// A sum with the given `(coefficient, power)` terms.
    pub fn new(alpha_inv: f64, terms: Vec<(f64, f64)>, normalizer: f64) -> Result<Self> {
        if !(alpha_inv > 0.0 && alpha_inv.is_finite()) {
            return Err(invalid(format!("exponent 1/alpha must be positive, got {alpha_inv}")));
        }
        if !(normalizer > 0.0 && normalizer.is_finite()) {
            return Err(invalid(format!("normalizer must be positive, got {normalizer}")));
        }
        let mut out = Self { alpha_inv, terms, normalizer };
        out.merge();
        Ok(out)
    }

    pub fn alpha_inv(&self) -> f64 {
        self.alpha_inv
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Exact symbolic derivative.
    pub fn derivative(&self) -> Self {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for &(c, a) in &self.terms {
            if a != 0.0 {
                terms.push((a * c, a - 1.0));
            }
            terms.push((-c * self.alpha_inv, a + self.alpha_inv - 1.0));
        }
        let mut out = Self { alpha_inv: self.alpha_inv, terms, normalizer: self.normalizer };
        out.merge();
        out
    }

    /// Multiplies every coefficient by `k`.
    pub fn scale(&mut self, k: f64) {
        for t in &mut self.terms {
            t.0 *= k;
        }
    }

    fn merge(&mut self) {
        self.terms.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(self.terms.len());
        for &(c, a) in &self.terms {
            match merged.last_mut() {
                Some(last) if (last.1 - a).abs() <= 1e-12 * a.abs().max(1.0) => last.0 += c,
                _ => merged.push((c, a)),
            }
        }
        merged.retain(|t| t.0 != 0.0);
        self.terms = merged;
    }

    /// `f(x)` for `x > 0`.
    pub fn eval(&self, x: f64) -> f64 {
        let e = (-x.powf(self.alpha_inv)).exp() / self.normalizer;
        self.eval_ratio(x, 0.0) * e
    }

    /// `Σ c_i x^{a_i - p}`: the sum with the exponential factor and the
    /// normalizer removed and the power `p` divided out.
    pub fn eval_ratio(&self, x: f64, p: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for &(c, a) in &self.terms {
            acc.add(c * x.powf(a - p));
        }
        acc.value()
    }
}

fn check_params(alpha: f64, b: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("Gauss-Laguerre index must lie in (0, 1), got {alpha}")));
    }
    if !(b >= 1.0 - 1.0 / alpha) {
        return Err(invalid(format!("Gauss-Laguerre b must be >= 1 - 1/alpha, got {b}")));
    }
    Ok(())
}

/// Exponent of `x` in the density `𝐞_{α,b}`.
pub(crate) fn density_power(alpha: f64, b: f64) -> f64 {
    b + 1.0 / alpha - 1.0
}

/// `(x^n 𝐞_{α,b}(x))^{(n)} / n!` as a term sum, without any sign convention.
pub(crate) fn rodrigues_numerator(alpha: f64, b: f64, n: usize) -> ExpTermSum {
    let a0 = density_power(alpha, b);
    let mut f = ExpTermSum {
        alpha_inv: 1.0 / alpha,
        terms: vec![(1.0, n as f64 + a0)],
        normalizer: ln_gamma(alpha * b + 1.0).exp(),
    };
    for _ in 0..n {
        f = f.derivative();
    }
    f.scale((-ln_gamma(n as f64 + 1.0)).exp());
    f
}

/// `𝒱_n^{(α,b)}(x) = (-1)^n (x^n 𝐞_{α,b}(x))^{(n)} / (n! 𝐞_{α,b}(x))`, for
/// `n ≤` [`RODRIGUES_N_MAX`].
pub fn gauss_laguerre_coeigen_v(alpha: f64, b: f64, n: usize, x: f64) -> Result<f64> {
    gauss_laguerre_coeigen_v_with_limit(alpha, b, n, x, RODRIGUES_N_MAX)
}

/// As [`gauss_laguerre_coeigen_v`] with a caller-chosen degree limit.
pub fn gauss_laguerre_coeigen_v_with_limit(alpha: f64, b: f64, n: usize, x: f64, n_max: usize) -> Result<f64> {
    check_params(alpha, b)?;
    if n > n_max {
        return Err(Error::IndexOutOfRange { index: n, limit: n_max });
    }
    if !(x > 0.0) {
        return Err(Error::Domain(format!("co-eigenfunction needs x > 0, got {x}")));
    }
    let f = rodrigues_numerator(alpha, b, n);
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * f.eval_ratio(x, density_power(alpha, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn degree_zero_is_one() {
        for &x in &[0.2, 1.0, 3.0] {
            assert!((gauss_laguerre_coeigen_v(0.6, 1.0, 0, x).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn degree_one_by_hand() {
        // (x 𝐞)'/𝐞 = (b + 1/α) - (1/α) x^{1/α}, which is 1 at α = 0.5, b = 1, x = 1
        let v = gauss_laguerre_coeigen_v(0.5, 1.0, 1, 1.0).unwrap();
        assert!((v + 1.0).abs() < 1e-14, "{v}");
        let (alpha, b, x): (f64, f64, f64) = (0.6, 2.0, 1.7);
        let expected = -((b + 1.0 / alpha) - x.powf(1.0 / alpha) / alpha);
        assert!((gauss_laguerre_coeigen_v(alpha, b, 1, x).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn degree_one_matches_finite_differences() {
        let (alpha, b) = (0.5, 1.0);
        let dens = |x: f64| x.powf(b + 1.0 / alpha - 1.0) * (-x.powf(1.0 / alpha)).exp();
        let h = 1e-5;
        for &x in &[0.4, 1.0, 2.5] {
            let fd = ((x + h) * dens(x + h) - (x - h) * dens(x - h)) / (2.0 * h);
            let expected = -fd / dens(x);
            let got = gauss_laguerre_coeigen_v(alpha, b, 1, x).unwrap();
            assert!((got - expected).abs() < 1e-7 * expected.abs().max(1.0), "x={x}: {got} vs {expected}");
        }
    }

    #[test]
    fn term_count_is_linear_in_degree() {
        for n in 0..=RODRIGUES_N_MAX {
            let f = rodrigues_numerator(0.6, 1.0, n);
            assert!(f.terms().len() <= n + 1, "n={n}: {}", f.terms().len());
        }
    }

    #[test]
    fn rejects_invalid_input() {
        assert!(matches!(gauss_laguerre_coeigen_v(0.6, 1.0, 2, 0.0), Err(Error::Domain(_))));
        assert!(matches!(
            gauss_laguerre_coeigen_v(0.6, 1.0, 13, 1.0),
            Err(Error::IndexOutOfRange { index: 13, limit: 12 })
        ));
        assert!(gauss_laguerre_coeigen_v_with_limit(0.6, 1.0, 13, 1.0, 20).is_ok());
        assert!(gauss_laguerre_coeigen_v(1.0, 1.0, 1, 1.0).is_err());
        assert!(gauss_laguerre_coeigen_v(0.5, -1.5, 1, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn derivative_matches_central_differences(
            alpha in 0.3f64..0.95,
            c0 in -2.0f64..2.0,
            c1 in -2.0f64..2.0,
            a0 in 0.0f64..3.0,
            a1 in 0.5f64..4.0,
            x in 0.1f64..10.0,
        ) {
            let f = ExpTermSum::new(1.0 / alpha, vec![(c0, a0), (c1, a1)], 1.3).unwrap();
            let df = f.derivative();
            let h = 1e-6 * x;
            let fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
            let exact = df.eval(x);
            // compare against the size of the individual terms to tolerate cancellation
            let scale = df.terms().iter().map(|&(c, a)| (c * x.powf(a)).abs()).sum::<f64>()
                * (-x.powf(1.0 / alpha)).exp() / 1.3;
            prop_assert!((fd - exact).abs() <= 1e-6 * scale.max(1e-300) + 1e-300,
                "fd={} exact={} scale={}", fd, exact, scale);
        }
    }
}
