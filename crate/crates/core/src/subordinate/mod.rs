//! Subordinators, their inverses and the transforms the correlation kernels
//! need.
//!
//! A subordinator `𝒯` is described by its Laplace exponent
//! `φ(λ) = ϱλ + ∫(1 - e^{-λy}) ϑ(dy)`. Three kinds are supported:
//!
//! - `stable:α` — `φ(λ) = λ^α`, `0 < α < 1`;
//! - `poisson:θ` — unit jumps at rate `θ`, `φ(λ) = θ(1 - e^{-λ})`;
//! - generic — drift `ϱ ≥ 0` plus a Lévy tail `Π̄(y) = ϑ(y, ∞)`, either none
//!   (`drift:ϱ`), compound Poisson with exponential jumps
//!   (`cpexp:rate,decay[,ϱ]`) or a user closure.
//!
//! From `φ` the module derives the Laplace transform `η_t(λ) = 𝔼[e^{-λL_t}]`
//! of the inverse subordinator `L_t = inf{s > 0; 𝒯_s > t}` ([`EtaTransform`]),
//! the renewal measure `U(dr) = ∫_0^∞ ℙ(𝒯_t ∈ dr) dt` ([`RenewalMeasure`]),
//! a long-tail diagnostic, and path samplers.

mod eta;
mod renewal;
mod sample;
mod stehfest;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quad::{exp_sinh, tanh_sinh};
use crate::stats::{fit_line, gamma};

pub use eta::{eta, eta_grid, EtaStrategy, EtaTransform};
pub use renewal::{mean_inverse, renewal_integral, RenewalMeasure, RenewalRepresentation};
pub use sample::{
    sample_increment, sample_inverse_at, sample_path, stable_variate, PassageSampler, SubordinatorPath,
    TRUNCATION_EPS,
};
pub use stehfest::{gaver_stehfest, STEHFEST_TERMS};

type TailFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A user-supplied Lévy tail `y ↦ Π̄(y) = ϑ((y, ∞))`.
#[derive(Clone)]
pub struct CustomTail {
    name: String,
    tail: Arc<TailFn>,
}

impl CustomTail {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// `Π̄(y)`.
    pub fn eval(&self, y: f64) -> f64 {
        (self.tail)(y)
    }
}

impl fmt::Debug for CustomTail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomTail").field("name", &self.name).finish()
    }
}

/// The jump part of a generic subordinator.
#[derive(Debug, Clone)]
pub enum LevyTail {
    /// No jumps: a pure drift.
    None,
    /// Jumps at rate `rate` with `Exp(decay)` sizes, `Π̄(y) = rate·e^{-decay·y}`.
    CompoundExp { rate: f64, decay: f64 },
    Custom(CustomTail),
}

impl LevyTail {
    /// `Π̄(y)` for `y > 0`.
    pub fn eval(&self, y: f64) -> f64 {
        match self {
            LevyTail::None => 0.0,
            LevyTail::CompoundExp { rate, decay } => rate * (-decay * y).exp(),
            LevyTail::Custom(c) => c.eval(y),
        }
    }

    /// Total mass `Π̄(0+)`, infinite for infinite-activity tails.
    pub fn total_mass(&self) -> f64 {
        match self {
            LevyTail::None => 0.0,
            LevyTail::CompoundExp { rate, .. } => *rate,
            LevyTail::Custom(c) => {
                let v = c.eval(0.0);
                if v.is_nan() {
                    f64::INFINITY
                } else {
                    v
                }
            }
        }
    }
}

/// A driftless stable, a Poisson, or a generic subordinator.
#[derive(Debug, Clone)]
pub enum SubordinatorSpec {
    Stable { alpha: f64 },
    Poisson { theta: f64 },
    Generic { drift: f64, tail: LevyTail },
}

/// Grid on which custom tails are checked: `y = 10^k`, `k = -6, -5.75, …, 6`.
fn tail_check_grid() -> impl Iterator<Item = f64> {
    (0..=48).map(|i| 10f64.powf(-6.0 + 0.25 * i as f64))
}

impl SubordinatorSpec {
    pub fn stable(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("stable index must lie in (0, 1), got {alpha}")));
        }
        Ok(SubordinatorSpec::Stable { alpha })
    }

    pub fn poisson(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(invalid(format!("Poisson rate must be positive, got {theta}")));
        }
        Ok(SubordinatorSpec::Poisson { theta })
    }

    /// Pure drift `φ(λ) = ϱλ`, i.e. the deterministic clock `𝒯_t = ϱt`.
    pub fn drift(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(invalid(format!("pure drift must be positive, got {rho}")));
        }
        Ok(SubordinatorSpec::Generic { drift: rho, tail: LevyTail::None })
    }

    /// Compound Poisson with `Exp(decay)` jumps at rate `rate`, plus drift.
    pub fn compound_exp(rate: f64, decay: f64, drift: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(invalid(format!("jump rate must be positive, got {rate}")));
        }
        if !(decay > 0.0 && decay.is_finite()) {
            return Err(invalid(format!("jump-size decay must be positive, got {decay}")));
        }
        if !(drift >= 0.0 && drift.is_finite()) {
            return Err(invalid(format!("drift must be nonnegative, got {drift}")));
        }
        Ok(SubordinatorSpec::Generic { drift, tail: LevyTail::CompoundExp { rate, decay } })
    }

    /// Generic subordinator from a drift and a Lévy tail closure.
    ///
    /// The tail must be nonnegative and nonincreasing, and satisfy
    /// `∫(1∧y)ϑ(dy) = ∫_0^1 Π̄(y) dy < ∞`; both are checked on the grid
    /// `y = 10^k`, `k ∈ {-6, -5.75, …, 6}`, and the integral by quadrature.
    pub fn custom<F>(name: impl Into<String>, drift: f64, tail: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let name = name.into();
        if !(drift >= 0.0 && drift.is_finite()) {
            return Err(invalid(format!("drift must be nonnegative, got {drift}")));
        }
        let mut prev = f64::INFINITY;
        for y in tail_check_grid() {
            let v = tail(y);
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(format!("Lévy tail `{name}` is {v} at y = {y}")));
            }
            if v > prev * (1.0 + 1e-12) {
                return Err(invalid(format!("Lévy tail `{name}` increases at y = {y}")));
            }
            prev = v;
        }
        let small = tanh_sinh(&tail, 0.0, 1.0, 1e-10, 1e-8)
            .map_err(|e| invalid(format!("Lévy tail `{name}`: ∫_0^1 Π̄ does not converge ({e})")))?;
        if !small.value.is_finite() {
            return Err(invalid(format!("Lévy tail `{name}` violates ∫(1∧y)ϑ(dy) < ∞")));
        }
        if drift == 0.0 && tail(1e-6) == 0.0 {
            return Err(invalid(format!("subordinator `{name}` is identically zero")));
        }
        Ok(SubordinatorSpec::Generic { drift, tail: LevyTail::Custom(CustomTail { name, tail: Arc::new(tail) }) })
    }

    /// Drift `ϱ` (zero for the stable and Poisson kinds).
    pub fn drift_coefficient(&self) -> f64 {
        match self {
            SubordinatorSpec::Generic { drift, .. } => *drift,
            _ => 0.0,
        }
    }

    /// Whether `φ(λ) = ϱλ` exactly.
    pub fn is_pure_drift(&self) -> bool {
        matches!(self, SubordinatorSpec::Generic { tail: LevyTail::None, .. })
    }

    /// Laplace exponent `φ(λ)`.
    pub fn phi(&self, lam: f64) -> Result<f64> {
        laplace_exponent(self, lam)
    }
}

impl fmt::Display for SubordinatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubordinatorSpec::Stable { alpha } => write!(f, "stable:{alpha}"),
            SubordinatorSpec::Poisson { theta } => write!(f, "poisson:{theta}"),
            SubordinatorSpec::Generic { drift, tail: LevyTail::None } => write!(f, "drift:{drift}"),
            SubordinatorSpec::Generic { drift, tail: LevyTail::CompoundExp { rate, decay } } => {
                if *drift == 0.0 {
                    write!(f, "cpexp:{rate},{decay}")
                } else {
                    write!(f, "cpexp:{rate},{decay},{drift}")
                }
            }
            SubordinatorSpec::Generic { tail: LevyTail::Custom(c), .. } => write!(f, "custom:{}", c.name),
        }
    }
}

impl Serialize for SubordinatorSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for SubordinatorSpec {
    type Err = Error;

    /// Parses `stable:α`, `poisson:θ`, `drift:ϱ` and `cpexp:rate,decay[,ϱ]`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, params) = s
            .split_once(':')
            .ok_or_else(|| invalid(format!("subordinator `{s}` should look like kind:param[,param]")))?;
        let values = params
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| invalid(format!("bad number `{p}` in subordinator `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        let arity = |n: &[usize]| {
            if n.contains(&values.len()) {
                Ok(())
            } else {
                Err(invalid(format!("subordinator `{s}`: expected {n:?} parameters, got {}", values.len())))
            }
        };
        match kind.trim() {
            "stable" => {
                arity(&[1])?;
                Self::stable(values[0])
            }
            "poisson" => {
                arity(&[1])?;
                Self::poisson(values[0])
            }
            "drift" => {
                arity(&[1])?;
                Self::drift(values[0])
            }
            "cpexp" => {
                arity(&[2, 3])?;
                Self::compound_exp(values[0], values[1], values.get(2).copied().unwrap_or(0.0))
            }
            other => Err(invalid(format!(
                "unknown subordinator kind `{other}` (expected stable, poisson, drift or cpexp)"
            ))),
        }
    }
}

/// `φ(λ)`: `λ^α`, `θ(1 - e^{-λ})`, or `ϱλ + ∫_0^∞ e^{-u} Π̄(u/λ) du`.
pub fn laplace_exponent(spec: &SubordinatorSpec, lam: f64) -> Result<f64> {
    if !(lam >= 0.0) {
        return Err(Error::Domain(format!("Laplace exponent needs lambda >= 0, got {lam}")));
    }
    if lam == 0.0 {
        return Ok(0.0);
    }
    Ok(match spec {
        SubordinatorSpec::Stable { alpha } => lam.powf(*alpha),
        SubordinatorSpec::Poisson { theta } => -theta * (-lam).exp_m1(),
        SubordinatorSpec::Generic { drift, tail } => {
            let jumps = match tail {
                LevyTail::None => 0.0,
                LevyTail::CompoundExp { rate, decay } => rate * lam / (lam + decay),
                LevyTail::Custom(c) => {
                    // ∫(1 - e^{-λy})ϑ(dy) = λ∫e^{-λy}Π̄(y)dy = ∫e^{-u}Π̄(u/λ)du
                    exp_sinh(|u| (-u).exp() * c.eval(u / lam), 0.0, 1.0, 1e-14, 1e-12)?.value
                }
            };
            drift * lam + jumps
        }
    })
}

/// Outcome of the long-tail diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongTailDiagnostics {
    pub long_tailed: bool,
    /// Fitted index of regular variation of `φ` at 0.
    pub index: f64,
    /// Residual sum of squares of the log-log fit.
    pub residual: f64,
    /// Spread of local slopes across the fit window.
    pub slope_spread: f64,
}

/// Whether `t ↦ η_t(λ)` is long-tailed, judged from the regular variation of
/// `φ` at zero: `ln φ(q)` is regressed on `ln q` for `q ∈ [1e-6, 1e-3]`; the
/// fit is stable when its residual and the spread of local slopes are small,
/// and the spec is declared long-tailed when the index lies in `(0, 0.99)`.
pub fn is_long_tailed(spec: &SubordinatorSpec) -> LongTailDiagnostics {
    let qs: Vec<f64> = (0..=12).map(|i| 10f64.powf(-6.0 + 0.25 * i as f64)).collect();
    let logs: Option<Vec<f64>> = qs
        .iter()
        .map(|&q| laplace_exponent(spec, q).ok().filter(|v| *v > 0.0).map(f64::ln))
        .collect();
    let failed = LongTailDiagnostics { long_tailed: false, index: f64::NAN, residual: f64::NAN, slope_spread: f64::NAN };
    let Some(ys) = logs else { return failed };
    let xs: Vec<f64> = qs.iter().map(|q| q.ln()).collect();
    let Some(fit) = fit_line(&xs, &ys) else { return failed };
    let local: Vec<f64> = xs.windows(2).zip(ys.windows(2)).map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0])).collect();
    let spread = local.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - local.iter().cloned().fold(f64::INFINITY, f64::min);
    let stable = fit.rss < 1e-4 && spread < 0.05;
    LongTailDiagnostics {
        long_tailed: stable && fit.slope > 0.0 && fit.slope < 0.99,
        index: fit.slope,
        residual: fit.rss,
        slope_spread: spread,
    }
}

/// `𝔼[L_s]`-free helper used by the stable closed forms: `s^α / Γ(1+α)`.
pub(crate) fn stable_mean_inverse(alpha: f64, s: f64) -> f64 {
    s.powf(alpha) / gamma(1.0 + alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_exponents() {
        let st = SubordinatorSpec::stable(0.5).unwrap();
        assert_eq!(laplace_exponent(&st, 4.0).unwrap(), 2.0);
        let po = SubordinatorSpec::poisson(3.0).unwrap();
        assert!((laplace_exponent(&po, 50.0).unwrap() - 3.0).abs() < 1e-15);
        for spec in [st, po, SubordinatorSpec::drift(1.0).unwrap(), SubordinatorSpec::compound_exp(2.0, 1.0, 0.5).unwrap()] {
            assert_eq!(laplace_exponent(&spec, 0.0).unwrap(), 0.0);
        }
        assert!(laplace_exponent(&SubordinatorSpec::stable(0.5).unwrap(), -1.0).is_err());
    }

    #[test]
    fn custom_tail_matches_closed_forms() {
        // Π̄(y) = 2e^{-y} with drift 0.5 is cpexp:2,1,0.5
        let custom = SubordinatorSpec::custom("exp", 0.5, |y: f64| 2.0 * (-y).exp()).unwrap();
        let closed = SubordinatorSpec::compound_exp(2.0, 1.0, 0.5).unwrap();
        // stable tail y^{-α}/Γ(1-α)
        let a = 0.6;
        let stable_tail = SubordinatorSpec::custom("stable", 0.0, move |y: f64| y.powf(-a) / gamma(1.0 - a)).unwrap();
        for &q in &[0.01, 0.5, 1.0, 7.0] {
            let (x, y) = (laplace_exponent(&custom, q).unwrap(), laplace_exponent(&closed, q).unwrap());
            assert!((x - y).abs() < 1e-12 * y, "q={q}: {x} vs {y}");
            let z = laplace_exponent(&stable_tail, q).unwrap();
            assert!((z - q.powf(a)).abs() < 1e-10 * q.powf(a), "q={q}: {z}");
        }
    }

    #[test]
    fn custom_tail_validation() {
        assert!(SubordinatorSpec::custom("neg", 0.0, |_| -1.0).is_err());
        assert!(SubordinatorSpec::custom("up", 0.0, |y: f64| y).is_err());
        // ∫_0^1 y^{-1.2} dy diverges
        assert!(SubordinatorSpec::custom("heavy", 0.0, |y: f64| y.powf(-1.2)).is_err());
        assert!(SubordinatorSpec::custom("zero", 0.0, |_| 0.0).is_err());
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["stable:0.5", "poisson:2", "drift:1", "cpexp:2,1", "cpexp:2,1,0.5"] {
            let spec: SubordinatorSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("stable:1.5".parse::<SubordinatorSpec>().is_err());
        assert!("gamma:1".parse::<SubordinatorSpec>().is_err());
        assert!("poisson".parse::<SubordinatorSpec>().is_err());
        assert!("cpexp:1".parse::<SubordinatorSpec>().is_err());
    }

    #[test]
    fn long_tail_diagnostic() {
        let d = is_long_tailed(&SubordinatorSpec::stable(0.7).unwrap());
        assert!(d.long_tailed);
        assert!((d.index - 0.7).abs() < 1e-9);
        let p = is_long_tailed(&SubordinatorSpec::poisson(2.0).unwrap());
        assert!(!p.long_tailed);
        assert!((p.index - 1.0).abs() < 1e-3);
        assert!(!is_long_tailed(&SubordinatorSpec::drift(1.0).unwrap()).long_tailed);
        assert!(!is_long_tailed(&SubordinatorSpec::compound_exp(1.0, 2.0, 0.0).unwrap()).long_tailed);
    }
}
