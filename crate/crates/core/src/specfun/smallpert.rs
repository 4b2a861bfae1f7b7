//! Eigenfunctions and co-eigenfunctions of the small perturbation of the
//! Laguerre semigroup (Lévy tail `e^{-by}`, `b ≥ 1`), written through
//! associated Laguerre polynomials.

use super::laguerre::{laguerre_unchecked, ln_laguerre_norm_const};
use crate::error::{invalid, Error, Result};

fn check(b: f64, x: f64) -> Result<()> {
    if !(b >= 1.0) {
        return Err(invalid(format!("small-perturbation parameter b must be >= 1, got {b}")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("argument must be >= 0, got {x}")));
    }
    Ok(())
}

/// `𝒫_n^{(b)}(x) = 𝔠_n(b+1) L_n^{(b+1)}(x) − (𝔠_n(b+1)/b) x L_{n−1}^{(b+2)}(x)`,
/// with `L_{−1} ≡ 0`.
pub fn smallpert_eigen_p(b: f64, n: usize, x: f64) -> Result<f64> {
    check(b, x)?;
    Ok(smallpert_eigen_p_unchecked(b, n, x))
}

pub(crate) fn smallpert_eigen_p_unchecked(b: f64, n: usize, x: f64) -> f64 {
    let c = ln_laguerre_norm_const(n, b + 1.0).exp();
    let head = c * laguerre_unchecked(n, b + 1.0, x);
    if n == 0 {
        return head;
    }
    head - c / b * x * laguerre_unchecked(n - 1, b + 2.0, x)
}

/// `𝒱_n^{(b)}(x) = (L_n^{(b−1)}(x) + x L_n^{(b)}(x)) / (x + 1)`.
pub fn smallpert_coeigen_v(b: f64, n: usize, x: f64) -> Result<f64> {
    check(b, x)?;
    Ok(smallpert_coeigen_v_unchecked(b, n, x))
}

pub(crate) fn smallpert_coeigen_v_unchecked(b: f64, n: usize, x: f64) -> f64 {
    (laguerre_unchecked(n, b - 1.0, x) + x * laguerre_unchecked(n, b, x)) / (x + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        assert_eq!(smallpert_eigen_p(1.5, 0, 3.0).unwrap(), 1.0);
        assert!((smallpert_eigen_p(2.0, 1, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((smallpert_coeigen_v(2.0, 0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((smallpert_coeigen_v(2.0, 1, 0.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn degree_one_expansion() {
        // 𝒫_1 = (1/(b+2))(b+2-x) - x/(b(b+2)) = 1 - x(b+1)/(b(b+2))
        let b = 3.0;
        for &x in &[0.0, 0.5, 2.0, 7.0] {
            let expected = 1.0 - x * (b + 1.0) / (b * (b + 2.0));
            assert!((smallpert_eigen_p(b, 1, x).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_small_b_and_negative_x() {
        assert!(smallpert_eigen_p(0.9, 1, 1.0).is_err());
        assert!(smallpert_coeigen_v(2.0, 1, -1.0).is_err());
    }
}
