//! Closed-form spectral projections correlation functions.
//!
//! For an eigen system `{λ_n, 𝒫_n, 𝒱_n, ν}` and `t ≥ s`:
//!
//! | regime    | `ρ(𝒫_m(X_t), 𝒫_n(X_s))`                                  |
//! |-----------|-----------------------------------------------------------|
//! | Markov    | `e^{-λ_m(t-s)} c_ν(n,m)`                                  |
//! | Bochner   | `e^{-φ(λ_m)(t-s)} c_ν(n,m)`                               |
//! | inverse   | `c_ν(n,m) (λ_m ∫_0^s η_{t-r}(λ_m) U(dr) + η_t(λ_m))`      |
//!
//! The biorthogonal pairing `ρ(𝒫_m(X_t), 𝒱_n(X_s))` replaces `c_ν(n,m)` by
//! `κ_ν^{-1}(m) δ_{mn}`.
//!
//! For `t < s` the eigen–eigen pairing uses the symmetric form
//! `e^{-λ_m(t-s)^+ - λ_n(s-t)^+}` (and, in the inverse regime, swaps
//! `(t, m)` with `(s, n)`). The eigen–co-eigen pairing has no closed form for
//! `t < s` unless the system is self-adjoint, in which case it coincides with
//! the eigen–eigen pairing.
//!
//! `𝒫_0 = 1` is constant, so any correlation involving index 0 is 0 by the
//! zero-variance convention.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::measures::{condition_number, cosine_angle};
use crate::subordinate::{
    is_long_tailed, laplace_exponent, mean_inverse, renewal_integral, EtaTransform, RenewalMeasure, SubordinatorSpec,
};
use crate::stats::gamma;
use crate::system::EigenSystem;

/// Which functions are correlated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pairing {
    /// `ρ(𝒫_m(X_t), 𝒫_n(X_s))`.
    PP,
    /// `ρ(𝒫_m(X_t), 𝒱_n(X_s))`.
    PV,
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pairing::PP => "PP",
            Pairing::PV => "PV",
        })
    }
}

impl FromStr for Pairing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PP" => Ok(Pairing::PP),
            "PV" => Ok(Pairing::PV),
            _ => Err(invalid(format!("pairing must be PP or PV, got `{s}`"))),
        }
    }
}

/// The clock the process runs on.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "regime", content = "subordinator", rename_all = "snake_case")]
pub enum Regime {
    Markov,
    Bochner(SubordinatorSpec),
    Inverse(SubordinatorSpec),
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Markov => "markov",
            Regime::Bochner(_) => "bochner",
            Regime::Inverse(_) => "inverse",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Markov => f.write_str("markov"),
            Regime::Bochner(s) => write!(f, "bochner({s})"),
            Regime::Inverse(s) => write!(f, "inverse({s})"),
        }
    }
}

/// One correlation value to evaluate.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationQuery {
    pub m: usize,
    pub n: usize,
    pub t: f64,
    pub s: f64,
    pub pairing: Pairing,
    pub regime: Regime,
}

impl CorrelationQuery {
    pub fn new(m: usize, n: usize, t: f64, s: f64, pairing: Pairing, regime: Regime) -> Result<Self> {
        for (name, v) in [("t", t), ("s", s)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { m, n, t, s, pairing, regime })
    }

    /// The query with the two observation times and indices exchanged.
    fn swapped(&self) -> Self {
        Self { m: self.n, n: self.m, t: self.s, s: self.t, ..self.clone() }
    }
}

/// `c_ν(n, m)` for `PP`, `κ_ν^{-1}(m) δ_{mn}` for `PV`, and 0 when either
/// index is 0.
pub fn pairing_factor(sys: &EigenSystem, m: usize, n: usize, pairing: Pairing) -> Result<f64> {
    sys.check_index(m)?;
    sys.check_index(n)?;
    if m == 0 || n == 0 {
        return Ok(0.0);
    }
    match pairing {
        Pairing::PP => cosine_angle(sys, n, m),
        Pairing::PV => {
            if m == n {
                Ok(1.0 / condition_number(sys, m)?)
            } else {
                Ok(0.0)
            }
        }
    }
}

fn backward_pv(sys: &EigenSystem, q: &CorrelationQuery) -> Result<()> {
    if q.t < q.s && q.pairing == Pairing::PV && !sys.is_self_adjoint() {
        return Err(Error::Unsupported(format!(
            "the eigen/co-eigen correlation for t < s (t = {}, s = {}) has no closed form for the non-self-adjoint {} system",
            q.t,
            q.s,
            sys.family()
        )));
    }
    Ok(())
}

/// Shared body of the Markov and Bochner kernels, with `rate(λ)` the decay
/// rate of mode `λ`.
fn exponential_kernel<F>(sys: &EigenSystem, q: &CorrelationQuery, rate: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    backward_pv(sys, q)?;
    let factor = pairing_factor(sys, q.m, q.n, q.pairing)?;
    if factor == 0.0 {
        return Ok(0.0);
    }
    let exponent = if q.t >= q.s {
        rate(sys.eigenvalue(q.m)?)? * (q.t - q.s)
    } else {
        rate(sys.eigenvalue(q.n)?)? * (q.s - q.t)
    };
    Ok((-exponent).exp() * factor)
}

/// Correlation of the Markov process itself.
pub fn markov_corr(sys: &EigenSystem, q: &CorrelationQuery) -> Result<f64> {
    exponential_kernel(sys, q, Ok)
}

/// Correlation of the Bochner-subordinated process `X_{𝒯_t}`.
pub fn bochner_corr(sys: &EigenSystem, spec: &SubordinatorSpec, q: &CorrelationQuery) -> Result<f64> {
    exponential_kernel(sys, q, |lam| laplace_exponent(spec, lam))
}

/// `λ ∫_0^s η_{t-r}(λ) U(dr) + η_t(λ)` for `t ≥ s > 0`.
pub fn inverse_tc_bracket(spec: &SubordinatorSpec, lam: f64, t: f64, s: f64) -> Result<f64> {
    if !(t >= s && s > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("the inverse-regime bracket needs t >= s > 0, got t = {t}, s = {s}")));
    }
    let eta = EtaTransform::new(spec.clone());
    if lam == 0.0 {
        return Ok(1.0);
    }
    let u = RenewalMeasure::new(spec.clone());
    let integral = renewal_integral(&u, s, |r| eta.eval((t - r).max(0.0), lam))?;
    Ok(lam * integral + eta.eval(t, lam)?)
}

/// Orders the query so that `t ≥ s`, swapping indices with times.
fn forward(sys: &EigenSystem, q: &CorrelationQuery) -> Result<CorrelationQuery> {
    backward_pv(sys, q)?;
    Ok(if q.t >= q.s { q.clone() } else { q.swapped() })
}

/// Correlation of the inverse-subordinator time change `X_{L_t}`.
pub fn inverse_tc_corr(sys: &EigenSystem, spec: &SubordinatorSpec, q: &CorrelationQuery) -> Result<f64> {
    let f = forward(sys, q)?;
    let factor = pairing_factor(sys, f.m, f.n, f.pairing)?;
    if factor == 0.0 {
        return Ok(0.0);
    }
    Ok(factor * inverse_tc_bracket(spec, sys.eigenvalue(f.m)?, f.t, f.s)?)
}

/// The sandwich `η_t(λ_m)(λ_m𝔼[L_s] + 1) ≤ bracket ≤ η_{t-s}(λ_m)(λ_m𝔼[L_s] + 1)`,
/// multiplied by the pairing factor and returned as `(lower, upper)`.
pub fn inverse_tc_bounds(sys: &EigenSystem, spec: &SubordinatorSpec, q: &CorrelationQuery) -> Result<(f64, f64)> {
    let f = forward(sys, q)?;
    if !(f.s > 0.0) {
        return Err(Error::Domain("inverse-regime bounds need s > 0".into()));
    }
    let factor = pairing_factor(sys, f.m, f.n, f.pairing)?;
    let lam = sys.eigenvalue(f.m)?;
    let eta = EtaTransform::new(spec.clone());
    let scale = lam * mean_inverse(&RenewalMeasure::new(spec.clone()), f.s)? + 1.0;
    let lo = factor * eta.eval(f.t, lam)? * scale;
    let hi = factor * eta.eval(f.t - f.s, lam)? * scale;
    Ok((lo.min(hi), lo.max(hi)))
}

/// Large-`t` approximant `factor · η_t(λ_m)(λ_m𝔼[L_s] + 1)`; for stable
/// subordinators the explicit form
/// `factor / (Γ(1-α) t^α) · (1/λ_m + s^α/Γ(1+α))`.
pub fn inverse_tc_asymptotic(sys: &EigenSystem, spec: &SubordinatorSpec, q: &CorrelationQuery) -> Result<f64> {
    let diag = is_long_tailed(spec);
    if !diag.long_tailed {
        return Err(Error::NotLongTailed(format!(
            "{spec}: fitted index {:.4} of φ at 0 is outside (0, 1) or unstable",
            diag.index
        )));
    }
    let f = forward(sys, q)?;
    if !(f.s > 0.0) {
        return Err(Error::Domain("the inverse-regime asymptotic needs s > 0".into()));
    }
    let factor = pairing_factor(sys, f.m, f.n, f.pairing)?;
    if factor == 0.0 {
        return Ok(0.0);
    }
    let lam = sys.eigenvalue(f.m)?;
    match spec {
        SubordinatorSpec::Stable { alpha } => Ok(factor / (gamma(1.0 - alpha) * f.t.powf(*alpha))
            * (1.0 / lam + f.s.powf(*alpha) / gamma(1.0 + alpha))),
        _ => {
            let eta = EtaTransform::new(spec.clone());
            let mean = mean_inverse(&RenewalMeasure::new(spec.clone()), f.s)?;
            Ok(factor * eta.eval(f.t, lam)? * (lam * mean + 1.0))
        }
    }
}

/// Zero-lag correlation: `c_ν(n, m)` or `κ_ν^{-1}(m) δ_{mn}`, whatever the clock.
pub fn same_time_corr(sys: &EigenSystem, q: &CorrelationQuery) -> Result<f64> {
    if q.t != q.s {
        return Err(Error::Domain(format!("same-time correlation needs t = s, got t = {}, s = {}", q.t, q.s)));
    }
    pairing_factor(sys, q.m, q.n, q.pairing)
}

/// Dispatches on the query's regime.
pub fn correlation(sys: &EigenSystem, q: &CorrelationQuery) -> Result<f64> {
    match &q.regime {
        Regime::Markov => markov_corr(sys, q),
        Regime::Bochner(spec) => bochner_corr(sys, spec, q),
        Regime::Inverse(spec) => inverse_tc_corr(sys, spec, q),
    }
}
