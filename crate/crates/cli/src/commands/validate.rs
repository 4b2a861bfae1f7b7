//! `spcorr validate`: the identity suite with measured residuals.
//!
//! Checks, each against a residual threshold (all replaced by `--tolerance`
//! when given):
//!
//! - biorthogonality `max |⟨𝒫_n, 𝒱_m⟩ - δ_{nm}|` of the eigen systems;
//! - `λ ∫_0^t η_{t-r}(λ) U(dr) + η_t(λ) = 1` for the subordinators;
//! - `∫_0^∞ e^{-qt} η_t(λ) dt = φ(q) / (q(λ + φ(q)))`;
//! - the large-`t` ratio of the inverse-stable correlation to its approximant;
//! - Bochner subordination by a unit drift and the inverse of a unit drift
//!   reproduce the Markov correlation;
//! - Mittag-Leffler closed forms `E_{1/2}(-x) = e^{x²} erfc(x)`, `E_1(-x) = e^{-x}`.

use rayon::prelude::*;
use serde::Serialize;
use spectral_corr::corrkernel::{correlation, inverse_tc_asymptotic, CorrelationQuery, Pairing, Regime};
use spectral_corr::measures::biorthogonality_check;
use spectral_corr::quad::exp_sinh;
use spectral_corr::specfun::mittag_leffler;
use spectral_corr::subordinate::{renewal_integral, EtaTransform, RenewalMeasure};
use spectral_corr::{EigenSystem, SubordinatorSpec};
use statrs::function::erf::erfc;

use crate::error::{CliError, Result};
use crate::output::write_json;
use crate::params::Params;
use crate::systems::family_from_params;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

struct Check {
    name: String,
    threshold: f64,
    run: Box<dyn Fn() -> spectral_corr::Result<f64> + Send + Sync>,
}

fn check<F>(name: impl Into<String>, threshold: f64, run: F) -> Check
where
    F: Fn() -> spectral_corr::Result<f64> + Send + Sync + 'static,
{
    Check { name: name.into(), threshold, run: Box::new(run) }
}

fn biorthogonality(sys: EigenSystem, n_max: usize, threshold: f64) -> Check {
    check(format!("biorthogonality {} n,m<={n_max}", sys.family()), threshold, move || {
        Ok(biorthogonality_check(&sys, n_max)?.iter().flatten().fold(0.0, |a: f64, &b| a.max(b)))
    })
}

fn remark_one(spec: SubordinatorSpec) -> Check {
    check(format!("renewal identity {spec}"), 1e-6, move || {
        let eta = EtaTransform::new(spec.clone());
        let u = RenewalMeasure::new(spec.clone());
        let mut worst: f64 = 0.0;
        for lam in [0.5, 1.0, 5.0] {
            for t in [0.5, 1.0, 10.0] {
                let integral = renewal_integral(&u, t, |r| eta.eval(t - r, lam))?;
                worst = worst.max((lam * integral + eta.eval(t, lam)? - 1.0).abs());
            }
        }
        Ok(worst)
    })
}

fn laplace_consistency(spec: SubordinatorSpec) -> Check {
    check(format!("eta Laplace transform {spec}"), 1e-5, move || {
        let eta = EtaTransform::new(spec.clone());
        let mut worst: f64 = 0.0;
        for q in [0.5, 1.0, 2.0] {
            let lam = 1.0;
            let numeric = match spec {
                // piecewise constant between integers: exact cell sums
                SubordinatorSpec::Poisson { .. } => {
                    let mut acc = 0.0;
                    for k in 0..2000 {
                        acc += eta.eval(k as f64, lam)? * (-q * k as f64).exp() * (-(-q).exp_m1()) / q;
                    }
                    acc
                }
                _ => exp_sinh(|t| (-q * t).exp() * eta.eval(t, lam).unwrap_or(f64::NAN), 0.0, 1.0 / q, 1e-12, 1e-10)?.value,
            };
            let exact = eta.laplace(q, lam)?;
            worst = worst.max((numeric - exact).abs() / exact.max(1.0));
        }
        Ok(worst)
    })
}

fn stable_asymptotics(alpha: f64) -> Check {
    check(format!("inverse-stable asymptotic ratio alpha={alpha} t=1e4"), 0.02, move || {
        let spec = SubordinatorSpec::stable(alpha)?;
        let sys = EigenSystem::classical(1.0)?;
        let mut worst: f64 = 0.0;
        for m in [1, 2] {
            let q = CorrelationQuery::new(m, m, 1e4, 1.0, Pairing::PP, Regime::Inverse(spec.clone()))?;
            worst = worst.max((correlation(&sys, &q)? / inverse_tc_asymptotic(&sys, &spec, &q)? - 1.0).abs());
        }
        Ok(worst)
    })
}

fn degeneration(sys: EigenSystem, regime: Regime, threshold: f64) -> Check {
    check(format!("{} matches markov for {}", regime, sys.family()), threshold, move || {
        let mut worst: f64 = 0.0;
        for m in 1..=3 {
            for (t, s) in [(1.0, 0.5), (2.0, 1.0), (5.0, 0.25), (3.0, 3.0)] {
                let markov = correlation(&sys, &CorrelationQuery::new(m, m, t, s, Pairing::PP, Regime::Markov)?)?;
                let other = correlation(&sys, &CorrelationQuery::new(m, m, t, s, Pairing::PP, regime.clone())?)?;
                worst = worst.max((markov - other).abs());
            }
        }
        Ok(worst)
    })
}

fn mittag_leffler_closed_forms() -> Check {
    check("Mittag-Leffler closed forms", 1e-10, || {
        let mut worst: f64 = 0.0;
        for i in 1..=50 {
            let x = 0.1 * i as f64;
            worst = worst.max((mittag_leffler(0.5, -x)? - (x * x).exp() * erfc(x)).abs());
            worst = worst.max((mittag_leffler(1.0, -x)? - (-x).exp()).abs());
        }
        Ok(worst)
    })
}

fn suite(p: &Params) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let family_filter = p.opt_str("family");
    let sub_filter = p.opt_str("sub");
    match family_filter {
        Some(_) => {
            // the tolerance is a pass/fail threshold here, not a quadrature setting
            let sys = family_from_params(p)?;
            let (n_max, threshold) = match sys.family() {
                spectral_corr::system::Family::Classical { .. } => (20, 1e-8),
                spectral_corr::system::Family::SmallPerturbation { .. } => (10, 1e-6),
                _ => (6, 1e-5),
            };
            checks.push(degeneration(sys.clone(), Regime::Bochner(SubordinatorSpec::drift(1.0)?), 1e-14));
            checks.push(biorthogonality(sys, n_max, threshold));
        }
        None => {
            checks.push(biorthogonality(EigenSystem::classical(1.0)?, 20, 1e-8));
            for b in [1.5, 2.0, 4.0] {
                checks.push(biorthogonality(EigenSystem::small_perturbation(b)?, 10, 1e-6));
            }
            for (alpha, b) in [(0.6, 1.0), (0.4, 2.0)] {
                checks.push(biorthogonality(EigenSystem::gauss_laguerre(alpha, b)?, 6, 1e-5));
            }
            for sys in [EigenSystem::classical(1.0)?, EigenSystem::small_perturbation(2.0)?] {
                checks.push(degeneration(sys.clone(), Regime::Bochner(SubordinatorSpec::drift(1.0)?), 1e-14));
                checks.push(degeneration(sys, Regime::Inverse(SubordinatorSpec::drift(1.0)?), 1e-10));
            }
        }
    }
    let specs: Vec<SubordinatorSpec> = match sub_filter {
        Some(s) => vec![s.parse()?],
        None => vec![
            SubordinatorSpec::stable(0.3)?,
            SubordinatorSpec::stable(0.5)?,
            SubordinatorSpec::stable(0.8)?,
            SubordinatorSpec::poisson(1.0)?,
            SubordinatorSpec::poisson(3.0)?,
            SubordinatorSpec::compound_exp(2.0, 1.0, 0.5)?,
        ],
    };
    for spec in specs {
        if let SubordinatorSpec::Stable { alpha } = spec {
            if alpha >= 0.45 {
                checks.push(stable_asymptotics(alpha));
            }
        }
        checks.push(remark_one(spec.clone()));
        checks.push(laplace_consistency(spec));
    }
    checks.push(mittag_leffler_closed_forms());
    Ok(checks)
}

pub fn validate(p: &Params) -> Result<ValidationReport> {
    let tolerance: Option<f64> = p.opt("tolerance")?;
    if let Some(t) = tolerance {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(CliError::param("tolerance", format!("must be finite and >= 0, got {t}")));
        }
    }
    let checks = suite(p)?;
    let results: Vec<CheckResult> = checks
        .par_iter()
        .map(|c| {
            let threshold = tolerance.unwrap_or(c.threshold);
            match (c.run)() {
                Ok(r) => CheckResult { name: c.name.clone(), residual: Some(r), threshold, passed: r <= threshold, error: None },
                Err(e) => CheckResult { name: c.name.clone(), residual: None, threshold, passed: false, error: Some(e.to_string()) },
            }
        })
        .collect();
    Ok(ValidationReport { passed: results.iter().all(|r| r.passed), checks: results })
}

pub fn run(p: &Params) -> Result<bool> {
    let report = validate(p)?;
    for r in &report.checks {
        eprintln!(
            "{} {:<60} residual {:>12} threshold {:e}{}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.residual.map_or("-".to_string(), |v| format!("{v:.3e}")),
            r.threshold,
            r.error.as_ref().map_or(String::new(), |e| format!(" ({e})"))
        );
    }
    if let Some(out) = p.opt_str("output") {
        write_json(&out, &report)?;
    }
    Ok(report.passed)
}
