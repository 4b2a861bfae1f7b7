//! `η_t(λ) = 𝔼[e^{-λL_t}]`, the Laplace transform of the inverse
//! subordinator at time `t`.
//!
//! Closed forms are used wherever they exist:
//!
//! | spec        | `η_t(λ)`                                                    |
//! |-------------|-------------------------------------------------------------|
//! | `stable:α`  | `E_α(-λt^α)`                                                |
//! | `poisson:θ` | `(1 + λ/θ)^{-⌊t+1⌋}` (`L_t ~ Gamma(⌊t⌋+1, θ)`)              |
//! | `drift:ϱ`   | `e^{-λt/ϱ}`                                                 |
//! | `cpexp`     | a sum of at most two exponentials from partial fractions of |
//! |             | `φ(q) / (q(λ + φ(q)))`                                      |
//!
//! Custom Lévy tails go through Gaver-Stehfest inversion of
//! `t ↦ η_t(λ)`'s transform `φ(q) / (q(λ + φ(q)))`.
//!
//! Finite-activity subordinators without drift do not start moving at once,
//! so for them `η_0(λ) = φ(∞)/(λ + φ(∞)) < 1`.

use serde::Serialize;

use super::stehfest::checked_inversion;
use super::{laplace_exponent, LevyTail, SubordinatorSpec};
use crate::error::{Error, Result};
use crate::specfun::mittag_leffler;

/// How [`EtaTransform`] evaluates `η_t(λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaStrategy {
    ClosedForm,
    LaplaceInversion,
}

/// Agreement required between Stehfest term counts.
const INVERSION_TOLERANCE: f64 = 1e-4;

/// `t ↦ η_t(λ)` for a subordinator.
#[derive(Debug, Clone)]
pub struct EtaTransform {
    spec: SubordinatorSpec,
    strategy: EtaStrategy,
}

impl EtaTransform {
    pub fn new(spec: SubordinatorSpec) -> Self {
        let strategy = match &spec {
            SubordinatorSpec::Generic { tail: LevyTail::Custom(_), .. } => EtaStrategy::LaplaceInversion,
            _ => EtaStrategy::ClosedForm,
        };
        Self { spec, strategy }
    }

    pub fn spec(&self) -> &SubordinatorSpec {
        &self.spec
    }

    pub fn strategy(&self) -> EtaStrategy {
        self.strategy
    }

    /// `∫_0^∞ e^{-qt} η_t(λ) dt = φ(q) / (q(λ + φ(q)))`.
    pub fn laplace(&self, q: f64, lam: f64) -> Result<f64> {
        let p = laplace_exponent(&self.spec, q)?;
        Ok(p / (q * (lam + p)))
    }

    /// `η_t(λ)` for `t ≥ 0`, `λ ≥ 0`.
    pub fn eval(&self, t: f64, lam: f64) -> Result<f64> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("eta needs finite t >= 0, got {t}")));
        }
        if !(lam >= 0.0 && lam.is_finite()) {
            return Err(Error::Domain(format!("eta needs finite lambda >= 0, got {lam}")));
        }
        if lam == 0.0 {
            return Ok(1.0);
        }
        match &self.spec {
            SubordinatorSpec::Stable { alpha } => mittag_leffler(*alpha, -lam * t.powf(*alpha)),
            SubordinatorSpec::Poisson { theta } => {
                let k = t.floor() + 1.0;
                Ok((-k * (lam / theta).ln_1p()).exp())
            }
            SubordinatorSpec::Generic { drift, tail: LevyTail::None } => Ok((-lam * t / drift).exp()),
            SubordinatorSpec::Generic { drift, tail: LevyTail::CompoundExp { rate, decay } } => {
                Ok(compound_exp_eta(*drift, *rate, *decay, t, lam))
            }
            SubordinatorSpec::Generic { drift, tail: LevyTail::Custom(c) } => {
                if t == 0.0 {
                    let total = if *drift > 0.0 { f64::INFINITY } else { LevyTail::Custom(c.clone()).total_mass() };
                    return Ok(if total.is_infinite() { 1.0 } else { total / (lam + total) });
                }
                let (v, _) = checked_inversion(|q| self.laplace(q, lam), t, INVERSION_TOLERANCE)?;
                Ok(v.clamp(f64::MIN_POSITIVE, 1.0))
            }
        }
    }
}

/// Partial-fraction inversion of `(ϱ(q+d) + a) / (ϱq² + (ϱd + λ + a)q + λd)`.
fn compound_exp_eta(rho: f64, a: f64, d: f64, t: f64, lam: f64) -> f64 {
    if rho == 0.0 {
        return a / (lam + a) * (-lam * d * t / (lam + a)).exp();
    }
    let b = rho * d + lam + a;
    let c = lam * d;
    let disc = (b * b - 4.0 * rho * c).max(0.0).sqrt();
    let r1 = -(b + disc) / (2.0 * rho);
    let r2 = -2.0 * c / (b + disc);
    let num = |r: f64| rho * r + rho * d + a;
    let c1 = num(r1) / (rho * (r1 - r2));
    let c2 = num(r2) / (rho * (r2 - r1));
    c1 * (r1 * t).exp() + c2 * (r2 * t).exp()
}

/// `η_t(λ)`.
pub fn eta(transform: &EtaTransform, t: f64, lam: f64) -> Result<f64> {
    transform.eval(t, lam)
}

/// `η_t(λ)` on a nondecreasing grid of times. Values from numerical
/// inversion are projected onto nonincreasing sequences (pool adjacent
/// violators), which moves them by no more than the inversion error.
pub fn eta_grid(transform: &EtaTransform, ts: &[f64], lam: f64) -> Result<Vec<f64>> {
    if ts.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Domain("eta_grid needs a nondecreasing time grid".into()));
    }
    let values = ts.iter().map(|&t| transform.eval(t, lam)).collect::<Result<Vec<_>>>()?;
    Ok(match transform.strategy {
        EtaStrategy::ClosedForm => values,
        EtaStrategy::LaplaceInversion => nonincreasing_projection(&values),
    })
}

/// Least-squares projection onto nonincreasing sequences.
pub(crate) fn nonincreasing_projection(values: &[f64]) -> Vec<f64> {
    // blocks of (mean, count)
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() >= 2 {
            let (m2, n2) = blocks[blocks.len() - 1];
            let (m1, n1) = blocks[blocks.len() - 2];
            if m1 >= m2 {
                break;
            }
            blocks.truncate(blocks.len() - 2);
            blocks.push(((m1 * n1 as f64 + m2 * n2 as f64) / (n1 + n2) as f64, n1 + n2));
        }
    }
    blocks.into_iter().flat_map(|(m, n)| std::iter::repeat_n(m, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::exp_sinh;
    use crate::stats::gamma;

    fn erfcx_half(x: f64) -> f64 {
        // E_{1/2}(-x) = e^{x²} erfc(x)
        statrs::function::erf::erfc(x) * (x * x).exp()
    }

    #[test]
    fn closed_forms() {
        let st = EtaTransform::new(SubordinatorSpec::stable(0.5).unwrap());
        assert_eq!(st.eval(0.0, 3.0).unwrap(), 1.0);
        let v = st.eval(4.0, 1.0).unwrap();
        assert!((v - erfcx_half(2.0)).abs() < 1e-10, "{v}");
        assert!((v - 0.2553956763105057).abs() < 1e-12);
        let po = EtaTransform::new(SubordinatorSpec::poisson(2.0).unwrap());
        assert!((po.eval(1.5, 2.0).unwrap() - 0.25).abs() < 1e-15);
        let dr = EtaTransform::new(SubordinatorSpec::drift(2.0).unwrap());
        assert!((dr.eval(3.0, 1.0).unwrap() - (-1.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn stehfest_recovers_stable_closed_form() {
        let spec = SubordinatorSpec::stable(0.5).unwrap();
        let tr = EtaTransform::new(spec);
        let v = crate::subordinate::gaver_stehfest(|q| tr.laplace(q, 1.0), 4.0, 14).unwrap();
        assert!((v - tr.eval(4.0, 1.0).unwrap()).abs() < 1e-4, "{v}");
    }

    #[test]
    fn compound_exp_matches_inversion() {
        for (rate, decay, drift) in [(2.0, 1.0, 0.5), (1.0, 3.0, 0.0), (0.5, 0.5, 2.0)] {
            let closed = EtaTransform::new(SubordinatorSpec::compound_exp(rate, decay, drift).unwrap());
            let custom = EtaTransform::new(
                SubordinatorSpec::custom("exp", drift, move |y: f64| rate * (-decay * y).exp()).unwrap(),
            );
            assert_eq!(custom.strategy(), EtaStrategy::LaplaceInversion);
            for &t in &[0.0, 0.5, 1.0, 3.0] {
                for &lam in &[0.5, 2.0] {
                    let (x, y) = (closed.eval(t, lam).unwrap(), custom.eval(t, lam).unwrap());
                    // double-precision Stehfest is good to a few 1e-5
                    assert!((x - y).abs() < 5e-5, "({rate},{decay},{drift}) t={t} lam={lam}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn laplace_consistency() {
        // ∫e^{-qt}η_t dt reproduces φ(q)/(q(λ+φ(q)))
        let specs = [
            SubordinatorSpec::stable(0.5).unwrap(),
            SubordinatorSpec::poisson(2.0).unwrap(),
            SubordinatorSpec::compound_exp(2.0, 1.0, 0.5).unwrap(),
        ];
        for spec in specs {
            let tr = EtaTransform::new(spec.clone());
            for &q in &[0.1, 1.0, 10.0] {
                let lam = 1.0;
                let numeric = match spec {
                    // piecewise constant: sum the integer cells exactly
                    SubordinatorSpec::Poisson { .. } => (0..2000)
                        .map(|k| tr.eval(k as f64, lam).unwrap() * (-q * k as f64).exp() * (-(-q).exp_m1()) / q)
                        .sum::<f64>(),
                    _ => exp_sinh(|t| (-q * t).exp() * tr.eval(t, lam).unwrap(), 0.0, 1.0 / q, 1e-12, 1e-10)
                        .unwrap()
                        .value,
                };
                let exact = tr.laplace(q, lam).unwrap();
                assert!((numeric - exact).abs() < 1e-5 * exact.max(1.0), "{spec} q={q}: {numeric} vs {exact}");
            }
        }
    }

    #[test]
    fn monotone_in_t_and_lambda() {
        let specs = [
            SubordinatorSpec::stable(0.3).unwrap(),
            SubordinatorSpec::stable(0.8).unwrap(),
            SubordinatorSpec::compound_exp(2.0, 1.0, 0.5).unwrap(),
            SubordinatorSpec::drift(1.0).unwrap(),
        ];
        for spec in specs {
            let tr = EtaTransform::new(spec.clone());
            let ts: Vec<f64> = (0..40).map(|i| 0.25 * i as f64).collect();
            for &lam in &[0.5, 1.0, 5.0] {
                let v = eta_grid(&tr, &ts, lam).unwrap();
                assert!(v.windows(2).all(|w| w[1] < w[0]), "{spec} lam={lam}");
                assert!(v.iter().all(|x| *x > 0.0 && *x <= 1.0));
                let w = eta_grid(&tr, &ts, 2.0 * lam).unwrap();
                assert!(v.iter().zip(&w).skip(1).all(|(a, b)| b < a));
            }
        }
    }

    #[test]
    fn stable_large_time_asymptotic() {
        for &alpha in &[0.5, 0.7] {
            let tr = EtaTransform::new(SubordinatorSpec::stable(alpha).unwrap());
            let t: f64 = 1e4;
            let r = tr.eval(t, 1.0).unwrap() * gamma(1.0 - alpha) * t.powf(alpha);
            assert!((r - 1.0).abs() < 0.02, "alpha={alpha}: {r}");
        }
    }

    #[test]
    fn projection_is_nonincreasing() {
        let p = nonincreasing_projection(&[1.0, 0.8, 0.81, 0.5, 0.52, 0.53]);
        assert!(p.windows(2).all(|w| w[1] <= w[0]));
        assert!((p[1] - 0.805).abs() < 1e-15);
        assert_eq!(p.len(), 6);
    }
}
