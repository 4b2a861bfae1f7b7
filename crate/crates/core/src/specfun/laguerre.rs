use crate::error::{invalid, Error, Result};
use crate::stats::ln_gamma;

/// Degree and order of an associated Laguerre polynomial `L_n^{(β)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreParams {
    n: usize,
    beta: f64,
}

impl LaguerreParams {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if !(beta > -1.0) {
            return Err(invalid(format!("Laguerre order must exceed -1, got {beta}")));
        }
        Ok(Self { n, beta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("Laguerre argument must be >= 0, got {x}")));
    }
    Ok(())
}

/// Three-term recurrence for `L_n^{(β)}(x)`; no argument checks.
pub(crate) fn laguerre_unchecked(n: usize, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + beta - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + beta - x) * cur - (kf + beta) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Associated Laguerre polynomial `L_n^{(β)}(x)` by the three-term recurrence.
pub fn laguerre(params: LaguerreParams, x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(laguerre_unchecked(params.n, params.beta, x))
}

/// `ln 𝔠_n(β)` with `𝔠_n(β) = Γ(n+1)Γ(β+1)/Γ(n+β+1)`.
///
/// Uses the product `∏_{k≤n} k/(k+β)` for moderate `n`, which avoids the
/// cancellation between large log-Gamma values.
pub fn ln_laguerre_norm_const(n: usize, beta: f64) -> f64 {
    if n <= 256 {
        return (1..=n).map(|k| (-beta / (k as f64 + beta)).ln_1p()).sum();
    }
    let nf = n as f64;
    ln_gamma(nf + 1.0) + ln_gamma(beta + 1.0) - ln_gamma(nf + beta + 1.0)
}

/// `𝔠_n(β)`, the squared inverse norm of `L_n^{(β)}` under the Gamma(β+1) law.
pub fn laguerre_norm_const(n: usize, beta: f64) -> f64 {
    ln_laguerre_norm_const(n, beta).exp()
}

/// Orthonormal Laguerre function `√𝔠_n(β) L_n^{(β)}(x)`.
pub fn laguerre_normalized(params: LaguerreParams, x: f64) -> Result<f64> {
    check_x(x)?;
    let scale = (0.5 * ln_laguerre_norm_const(params.n, params.beta)).exp();
    Ok(scale * laguerre_unchecked(params.n, params.beta, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::compensated_sum;
    use proptest::prelude::*;

    /// Explicit sum Σ (-1)^k C(n+β, n-k) x^k / k!.
    fn explicit_sum(n: usize, beta: f64, x: f64) -> f64 {
        let nf = n as f64;
        compensated_sum((0..=n).map(|k| {
            let kf = k as f64;
            let ln_binom = ln_gamma(nf + beta + 1.0) - ln_gamma(nf - kf + 1.0) - ln_gamma(beta + kf + 1.0);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            if x == 0.0 {
                if k == 0 {
                    ln_binom.exp()
                } else {
                    0.0
                }
            } else {
                sign * (ln_binom + kf * x.ln() - ln_gamma(kf + 1.0)).exp()
            }
        }))
    }

    #[test]
    fn spot_values() {
        let p = LaguerreParams::new(0, 2.5).unwrap();
        assert_eq!(laguerre(p, 7.3).unwrap(), 1.0);
        let p = LaguerreParams::new(1, 2.0).unwrap();
        assert_eq!(laguerre(p, 1.0).unwrap(), 2.0);
        let p = LaguerreParams::new(5, 0.0).unwrap();
        assert!((laguerre(p, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((explicit_sum(5, 0.0, 0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_spot_values() {
        let p = LaguerreParams::new(0, 1.0).unwrap();
        assert_eq!(laguerre_normalized(p, 0.4).unwrap(), 1.0);
        let p = LaguerreParams::new(2, 0.0).unwrap();
        assert!((laguerre_normalized(p, 0.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(LaguerreParams::new(3, -1.0).is_err());
        assert!(LaguerreParams::new(3, -2.5).is_err());
        let p = LaguerreParams::new(3, 0.5).unwrap();
        assert!(matches!(laguerre(p, -0.1), Err(Error::Domain(_))));
        assert!(laguerre_normalized(p, f64::NAN).is_err());
    }

    #[test]
    fn recurrence_matches_explicit_sum() {
        for n in 0..=30 {
            for &beta in &[-0.5, 0.0, 1.0, 2.5, 7.0] {
                for &x in &[0.0, 0.3, 1.0, 4.0, 9.5] {
                    let rec = laguerre_unchecked(n, beta, x);
                    let exp = explicit_sum(n, beta, x);
                    let scale = exp.abs().max(1.0);
                    // the explicit sum itself cancels at large x; compare relative to its largest term
                    assert!(
                        (rec - exp).abs() <= 1e-12 * scale.max(largest_term(n, beta, x)),
                        "n={n} beta={beta} x={x}: {rec} vs {exp}"
                    );
                }
            }
        }
    }

    fn largest_term(n: usize, beta: f64, x: f64) -> f64 {
        let nf = n as f64;
        (0..=n)
            .map(|k| {
                let kf = k as f64;
                let lb = ln_gamma(nf + beta + 1.0) - ln_gamma(nf - kf + 1.0) - ln_gamma(beta + kf + 1.0);
                if x == 0.0 {
                    if k == 0 { lb.exp() } else { 0.0 }
                } else {
                    (lb + kf * x.ln() - ln_gamma(kf + 1.0)).exp()
                }
            })
            .fold(0.0, f64::max)
    }

    proptest! {
        #[test]
        fn value_at_zero_is_binomial(n in 0usize..25, beta in -0.9f64..6.0) {
            // L_n^{(β)}(0) = C(n+β, n)
            let expected = (ln_gamma(n as f64 + beta + 1.0) - ln_gamma(n as f64 + 1.0) - ln_gamma(beta + 1.0)).exp();
            let got = laguerre_unchecked(n, beta, 0.0);
            prop_assert!((got - expected).abs() <= 1e-12 * expected.max(1.0));
        }
    }
}
