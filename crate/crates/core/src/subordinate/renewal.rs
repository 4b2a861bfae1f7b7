//! The renewal measure `U(dr) = ∫_0^∞ ℙ(𝒯_t ∈ dr) dt`, with Laplace
//! transform `1/φ(q)` and `U[0, s] = 𝔼[L_s]`.
//!
//! | spec              | `U(dr)`                                                          |
//! |-------------------|------------------------------------------------------------------|
//! | `stable:α`        | `r^{α-1}/Γ(α) dr`                                                |
//! | `poisson:θ`       | atoms `1/θ` at `r = 0, 1, 2, …`                                   |
//! | `drift:ϱ`         | `dr/ϱ`                                                           |
//! | `cpexp`, `ϱ > 0`  | `(1/ϱ)(d/c + (1 - d/c)e^{-cr}) dr`, `c = d + rate/ϱ`             |
//! | `cpexp`, `ϱ = 0`  | atom `1/rate` at 0 plus `(d/rate) dr`                             |
//! | custom tail       | distribution function from Stehfest inversion of `1/(qφ(q))`     |
//!
//! For the stable density the substitution `r = s·u^{1/α}` turns
//! `∫_0^s g(r) r^{α-1}/Γ(α) dr` into `s^α/Γ(1+α) ∫_0^1 g(s u^{1/α}) du`,
//! removing the endpoint singularity.

use std::cell::RefCell;

use serde::Serialize;

use super::stehfest::{checked_inversion, gaver_stehfest, STEHFEST_TERMS};
use super::{laplace_exponent, stable_mean_inverse, LevyTail, SubordinatorSpec};
use crate::error::{Error, Result};
use crate::quad::tanh_sinh;
use crate::stats::CompensatedSum;

/// How the renewal measure is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RenewalRepresentation {
    /// Absolutely continuous with a closed-form density.
    Density,
    /// Atoms on the lattice `0, 1, 2, …`.
    Lattice,
    /// An atom at the origin plus a closed-form density.
    AtomAndDensity,
    /// Distribution function known only through numerical inversion.
    Numeric,
}

const ABS_TOL: f64 = 1e-13;
const REL_TOL: f64 = 1e-12;
/// Relative change between grid halvings accepted for the numeric measure.
const NUMERIC_TOL: f64 = 1e-6;
const NUMERIC_MAX_CELLS: usize = 4096;

/// Renewal measure of a subordinator.
#[derive(Debug, Clone)]
pub struct RenewalMeasure {
    spec: SubordinatorSpec,
    representation: RenewalRepresentation,
}

impl RenewalMeasure {
    pub fn new(spec: SubordinatorSpec) -> Self {
        let representation = match &spec {
            SubordinatorSpec::Stable { .. } => RenewalRepresentation::Density,
            SubordinatorSpec::Poisson { .. } => RenewalRepresentation::Lattice,
            SubordinatorSpec::Generic { tail: LevyTail::None, .. } => RenewalRepresentation::Density,
            SubordinatorSpec::Generic { drift, tail: LevyTail::CompoundExp { .. } } => {
                if *drift > 0.0 {
                    RenewalRepresentation::Density
                } else {
                    RenewalRepresentation::AtomAndDensity
                }
            }
            SubordinatorSpec::Generic { tail: LevyTail::Custom(_), .. } => RenewalRepresentation::Numeric,
        };
        Self { spec, representation }
    }

    pub fn spec(&self) -> &SubordinatorSpec {
        &self.spec
    }

    pub fn representation(&self) -> RenewalRepresentation {
        self.representation
    }

    /// `U[0, r]` for the numeric representation.
    fn numeric_cdf(&self, r: f64) -> Result<f64> {
        gaver_stehfest(|q| Ok(1.0 / (q * laplace_exponent(&self.spec, q)?)), r, STEHFEST_TERMS)
    }

    /// Mass of the atom at the origin, `1/φ(∞)`.
    fn origin_atom(&self) -> f64 {
        match &self.spec {
            SubordinatorSpec::Generic { drift, tail } if *drift == 0.0 => {
                let total = tail.total_mass();
                if total.is_finite() && total > 0.0 {
                    1.0 / total
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }
}

/// Runs a quadrature over a fallible integrand, surfacing the first error.
fn fallible_quad<G>(g: G, a: f64, b: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let est = tanh_sinh(
        |x| match g(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        a,
        b,
        ABS_TOL,
        REL_TOL,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(est?.value)
}

/// `∫_{[0, s]} g(r) U(dr)` for `s > 0`.
pub fn renewal_integral<G>(measure: &RenewalMeasure, s: f64, g: G) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("renewal integral needs s > 0, got {s}")));
    }
    match &measure.spec {
        SubordinatorSpec::Stable { alpha } => {
            let inv = 1.0 / alpha;
            let inner = fallible_quad(|u| g(s * u.powf(inv)), 0.0, 1.0)?;
            Ok(stable_mean_inverse(*alpha, s) * inner)
        }
        SubordinatorSpec::Poisson { theta } => {
            let mut acc = CompensatedSum::new();
            for k in 0..=(s.floor() as u64) {
                acc.add(g(k as f64)?);
            }
            Ok(acc.value() / theta)
        }
        SubordinatorSpec::Generic { drift, tail: LevyTail::None } => Ok(fallible_quad(&g, 0.0, s)? / drift),
        SubordinatorSpec::Generic { drift, tail: LevyTail::CompoundExp { rate, decay } } => {
            if *drift > 0.0 {
                let c = decay + rate / drift;
                let p = decay / c;
                fallible_quad(|r| Ok(g(r)? * (p + (1.0 - p) * (-c * r).exp()) / drift), 0.0, s)
            } else {
                Ok(g(0.0)? / rate + decay / rate * fallible_quad(&g, 0.0, s)?)
            }
        }
        SubordinatorSpec::Generic { tail: LevyTail::Custom(_), .. } => numeric_integral(measure, s, &g),
    }
}

/// Midpoint Stieltjes sums against the inverted distribution function,
/// halving the cell width until the Richardson correction is negligible.
fn numeric_integral<G>(measure: &RenewalMeasure, s: f64, g: &G) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let atom = measure.origin_atom();
    // validates the inversion at the right end before walking the grid
    checked_inversion(|q| Ok(1.0 / (q * laplace_exponent(&measure.spec, q)?)), s, 1e-4)?;
    let sum = |cells: usize| -> Result<f64> {
        let h = s / cells as f64;
        let mut acc = CompensatedSum::new();
        acc.add(atom * g(0.0)?);
        let mut prev = atom;
        for i in 1..=cells {
            let cur = measure.numeric_cdf(i as f64 * h)?;
            acc.add(g((i as f64 - 0.5) * h)? * (cur - prev));
            prev = cur;
        }
        Ok(acc.value())
    };
    let mut cells = 32;
    let mut prev = sum(cells)?;
    while cells < NUMERIC_MAX_CELLS {
        cells *= 2;
        let cur = sum(cells)?;
        // the midpoint sums converge at second order: extrapolate
        let correction = (cur - prev) / 3.0;
        if correction.abs() <= NUMERIC_TOL * cur.abs().max(1e-12) {
            return Ok(cur + correction);
        }
        prev = cur;
    }
    Err(Error::Inversion(format!("renewal Stieltjes sums did not settle by {NUMERIC_MAX_CELLS} cells at s = {s}")))
}

/// `𝔼[L_s] = U[0, s]`.
pub fn mean_inverse(measure: &RenewalMeasure, s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("mean of the inverse needs s > 0, got {s}")));
    }
    match &measure.spec {
        SubordinatorSpec::Stable { alpha } => Ok(stable_mean_inverse(*alpha, s)),
        SubordinatorSpec::Poisson { theta } => Ok((s.floor() + 1.0) / theta),
        SubordinatorSpec::Generic { tail: LevyTail::Custom(_), .. } => measure.numeric_cdf(s),
        _ => renewal_integral(measure, s, |_| Ok(1.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::gamma;
    use crate::subordinate::EtaTransform;

    fn remark_one(spec: &SubordinatorSpec, lam: f64, t: f64) -> f64 {
        let eta = EtaTransform::new(spec.clone());
        let u = RenewalMeasure::new(spec.clone());
        lam * renewal_integral(&u, t, |r| eta.eval(t - r, lam)).unwrap() + eta.eval(t, lam).unwrap()
    }

    #[test]
    fn unit_integrand_gives_mean_inverse() {
        let st = RenewalMeasure::new(SubordinatorSpec::stable(0.5).unwrap());
        let v = renewal_integral(&st, 2.0, |_| Ok(1.0)).unwrap();
        assert!((v - 2f64.sqrt() / gamma(1.5)).abs() < 1e-13);
        let po = RenewalMeasure::new(SubordinatorSpec::poisson(2.0).unwrap());
        assert_eq!(renewal_integral(&po, 2.5, |_| Ok(1.0)).unwrap(), 1.5);
        assert_eq!(mean_inverse(&po, 1.0).unwrap(), 1.0);
        let dr = RenewalMeasure::new(SubordinatorSpec::drift(2.0).unwrap());
        assert!((mean_inverse(&dr, 3.0).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn compound_exp_mean_matches_inversion() {
        for (rate, decay, drift) in [(2.0, 1.0, 0.5), (1.0, 3.0, 0.0)] {
            let closed = RenewalMeasure::new(SubordinatorSpec::compound_exp(rate, decay, drift).unwrap());
            let numeric = RenewalMeasure::new(
                SubordinatorSpec::custom("exp", drift, move |y: f64| rate * (-decay * y).exp()).unwrap(),
            );
            assert_eq!(numeric.representation(), RenewalRepresentation::Numeric);
            for &s in &[0.5, 2.0] {
                let (a, b) = (mean_inverse(&closed, s).unwrap(), mean_inverse(&numeric, s).unwrap());
                assert!((a - b).abs() < 5e-5 * a, "s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn remark_one_identity_closed_forms() {
        let specs = [
            SubordinatorSpec::stable(0.3).unwrap(),
            SubordinatorSpec::stable(0.5).unwrap(),
            SubordinatorSpec::stable(0.8).unwrap(),
            SubordinatorSpec::poisson(1.0).unwrap(),
            SubordinatorSpec::poisson(3.0).unwrap(),
            SubordinatorSpec::drift(1.5).unwrap(),
            SubordinatorSpec::compound_exp(2.0, 1.0, 0.5).unwrap(),
            SubordinatorSpec::compound_exp(1.0, 3.0, 0.0).unwrap(),
        ];
        for spec in &specs {
            for &lam in &[0.5, 1.0, 5.0] {
                for &t in &[0.5, 1.0, 10.0] {
                    let v = remark_one(spec, lam, t);
                    assert!((v - 1.0).abs() < 1e-9, "{spec} lam={lam} t={t}: {v}");
                }
            }
        }
    }

    #[test]
    fn remark_one_identity_numeric_tail() {
        let spec = SubordinatorSpec::custom("exp", 0.5, |y: f64| 2.0 * (-y).exp()).unwrap();
        for &lam in &[0.5, 1.0, 5.0] {
            for &t in &[0.5, 1.0] {
                let v = remark_one(&spec, lam, t);
                assert!((v - 1.0).abs() < 1e-4, "lam={lam} t={t}: {v}");
            }
        }
    }

    #[test]
    fn rejects_nonpositive_horizon() {
        let st = RenewalMeasure::new(SubordinatorSpec::stable(0.5).unwrap());
        assert!(renewal_integral(&st, 0.0, |_| Ok(1.0)).is_err());
        assert!(mean_inverse(&st, -1.0).is_err());
    }
}
