//! Eigenfunctions `𝒫_n(x) = Σ_k (-1)^k C(n,k) x^k / W_φ(k+1)` of a
//! generalized Laguerre semigroup, where `W_φ(1) = 1` and
//! `W_φ(k+1) = φ(1)⋯φ(k)`.
//!
//! The sum alternates and its terms grow quickly in `x`. Term magnitudes are
//! tracked through `ln φ(k)` (switching to pure log space before overflow),
//! built from consecutive ratios rather than from differences of large
//! log-Gamma values, and accumulated with compensated summation. Even so the
//! absolute error is governed by the largest term, so relative accuracy
//! degrades past `n ≈ 30` (and far in the tail of the measure) in double
//! precision; the default table length reflects that.

use crate::error::{invalid, Error, Result};
use crate::stats::{ln_gamma, CompensatedSum};

/// Default number of tabulated degrees for polynomial families.
pub const POLY_N_MAX: usize = 30;

/// Which Bernstein function generated a coefficient table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GlFamily {
    /// `φ(k) = k + β`: the classical Laguerre case, `𝒫_n = 𝔠_n(β) L_n^{(β)}`.
    Classical { beta: f64 },
    /// `W_φ(k+1) = Γ(αk + αb + 1) / Γ(αb + 1)`.
    GaussLaguerre { alpha: f64, b: f64 },
    /// Table supplied directly from values `φ(1), φ(2), …`.
    Custom,
}

/// Tabulated `ln W_φ(k+1)` for `k = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct GLCoefficients {
    /// `ln φ(k)` for `k = 1..=n_max`, kept separately so that consecutive
    /// term ratios never difference two large log-Gamma values.
    ln_phi: Vec<f64>,
    phi: Vec<f64>,
    wphi_log: Vec<f64>,
    family: GlFamily,
}

impl GLCoefficients {
    /// Classical Laguerre table, `φ(k) = k + β`.
    pub fn classical(beta: f64, n_max: usize) -> Result<Self> {
        if !(beta > -1.0) {
            return Err(invalid(format!("Laguerre order must exceed -1, got {beta}")));
        }
        let ln_phi = (1..=n_max).map(|k| (k as f64 + beta).ln()).collect();
        Ok(Self::from_ln_phi(ln_phi, GlFamily::Classical { beta }))
    }

    /// Gauss-Laguerre table for `0 < α < 1`, `b ≥ 1 - 1/α`.
    pub fn gauss_laguerre(alpha: f64, b: f64, n_max: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("Gauss-Laguerre index must lie in (0, 1), got {alpha}")));
        }
        if !(b >= 1.0 - 1.0 / alpha) {
            return Err(invalid(format!("Gauss-Laguerre b must be >= 1 - 1/alpha, got {b}")));
        }
        let ln_phi = (1..=n_max)
            .map(|k| {
                let z = alpha * (k - 1) as f64 + alpha * b + 1.0;
                ln_gamma(z + alpha) - ln_gamma(z)
            })
            .collect();
        Ok(Self::from_ln_phi(ln_phi, GlFamily::GaussLaguerre { alpha, b }))
    }

    /// Table from the values `φ(1), …, φ(n_max)`, all of which must be positive.
    pub fn from_phi_values(phi: &[f64]) -> Result<Self> {
        for (k, &p) in phi.iter().enumerate() {
            if !(p > 0.0 && p.is_finite()) {
                return Err(invalid(format!("phi({}) must be positive and finite, got {p}", k + 1)));
            }
        }
        Ok(Self::from_ln_phi(phi.iter().map(|p| p.ln()).collect(), GlFamily::Custom))
    }

    fn from_ln_phi(ln_phi: Vec<f64>, family: GlFamily) -> Self {
        let mut wphi_log = Vec::with_capacity(ln_phi.len() + 1);
        let mut acc = 0.0;
        wphi_log.push(0.0);
        for &l in &ln_phi {
            acc += l;
            wphi_log.push(acc);
        }
        let phi = ln_phi.iter().map(|l| l.exp()).collect();
        Self { ln_phi, phi, wphi_log, family }
    }

    pub fn family(&self) -> GlFamily {
        self.family
    }

    /// Largest degree the table supports.
    pub fn n_max(&self) -> usize {
        self.wphi_log.len() - 1
    }

    /// `ln W_φ(k+1)` for `k = 0..=n_max`.
    pub fn wphi_log(&self) -> &[f64] {
        &self.wphi_log
    }
}

/// `𝒫_n(x)` from a coefficient table.
pub fn gl_eigen_p(coeffs: &GLCoefficients, n: usize, x: f64) -> Result<f64> {
    if n > coeffs.n_max() {
        return Err(Error::IndexOutOfRange { index: n, limit: coeffs.n_max() });
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("eigenfunction argument must be >= 0, got {x}")));
    }
    Ok(gl_eigen_p_unchecked(coeffs, n, x))
}

pub(crate) fn gl_eigen_p_unchecked(coeffs: &GLCoefficients, n: usize, x: f64) -> f64 {
    if n == 0 || x == 0.0 {
        return 1.0;
    }
    let lx = x.ln();
    let mut acc = CompensatedSum::new();
    acc.add(1.0);
    // |term k| from the ratio of consecutive terms; the running logarithm
    // takes over only if the linear product would overflow
    let mut mag = 1.0f64;
    let mut log_mag = 0.0;
    for k in 1..=n {
        let log_ratio = (((n - k + 1) as f64) / k as f64).ln() + lx - coeffs.ln_phi[k - 1];
        log_mag += log_ratio;
        mag = if log_mag < 700.0 {
            mag * ((n - k + 1) as f64 / k as f64) * x / coeffs.phi[k - 1]
        } else {
            log_mag.exp()
        };
        acc.add(if k % 2 == 0 { mag } else { -mag });
    }
    acc.value()
}
