//! Eigen systems `{λ_n, 𝒫_n, 𝒱_n, ν}`: eigenvalues, eigenfunctions,
//! co-eigenfunctions and the stationary measure they are biorthogonal in.
//!
//! The three generalized Laguerre families all have `λ_n = n`:
//!
//! - classical Laguerre (self-adjoint): `𝒫_n = 𝒱_n = √𝔠_n(β) L_n^{(β)}` in `γ_β`;
//! - small perturbation: `𝒫_n^{(b)}`, `𝒱_n^{(b)}` in `ν_b`;
//! - Gauss-Laguerre: `𝒫_n^{(α,b)}` from the `W_φ` sum and
//!   `𝒱_n = (x^n 𝐞_{α,b})^{(n)} / (n! 𝐞_{α,b})` in `𝐞_{α,b}`.
//!
//! For the Gauss-Laguerre family the co-eigenfunction is taken *without* the
//! alternating factor `(-1)^n` that accompanies the Rodrigues formula in its
//! standalone form ([`crate::specfun::gauss_laguerre_coeigen_v`]): with that
//! factor `⟨𝒫_n, 𝒱_n⟩ = (-1)^n`, so only the unsigned version is biorthogonal
//! to `𝒫_n`. It agrees with the generic Rodrigues expression for generalized
//! Laguerre semigroups.
//!
//! Condition numbers and angle cosines are cached per system. The caches are
//! write-once per key: concurrent callers may compute the same entry twice,
//! the last write wins and both writes hold the same value.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::measures::{gram_matrix, DensityMeasure, QuadTolerance, Side};
use crate::specfun::gl::gl_eigen_p_unchecked;
use crate::specfun::laguerre::laguerre_unchecked;
use crate::specfun::rodrigues::{density_power, rodrigues_numerator};
use crate::specfun::smallpert::{smallpert_coeigen_v_unchecked, smallpert_eigen_p_unchecked};
use crate::specfun::{ln_laguerre_norm_const, ExpTermSum, GLCoefficients, POLY_N_MAX};

/// Default index range for the Gauss-Laguerre system. Larger than the
/// standalone Rodrigues limit so that condition-number growth can be fitted
/// over `m ∈ [5, 20]`; beyond 20 the squared co-eigenfunction norms exceed
/// 1e12 and the quadrature refinement can no longer certify 1e-10 relative
/// accuracy.
pub const GAUSS_LAGUERRE_N_MAX: usize = 20;

/// A user-defined biorthogonal system.
pub trait EigenBasis: Send + Sync {
    fn name(&self) -> String;
    /// Largest supported index.
    fn n_max(&self) -> usize;
    fn eigenvalue(&self, n: usize) -> f64;
    fn eigen_p(&self, n: usize, x: f64) -> f64;
    fn coeigen_v(&self, n: usize, x: f64) -> f64;
    fn measure(&self) -> DensityMeasure;
    /// Whether `𝒫_n = 𝒱_n` for every `n`.
    fn self_adjoint(&self) -> bool {
        false
    }
}

/// Family tag of an [`EigenSystem`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Classical { beta: f64 },
    SmallPerturbation { b: f64 },
    GaussLaguerre { alpha: f64, b: f64 },
    Custom { name: String },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Classical { beta } => write!(f, "classical(beta={beta})"),
            Family::SmallPerturbation { b } => write!(f, "smallpert(b={b})"),
            Family::GaussLaguerre { alpha, b } => write!(f, "gausslag(alpha={alpha}, b={b})"),
            Family::Custom { name } => write!(f, "custom({name})"),
        }
    }
}

#[derive(Clone)]
enum Kind {
    Classical { beta: f64, scale: Vec<f64> },
    SmallPerturbation { b: f64 },
    GaussLaguerre { coeffs: GLCoefficients, numerators: Vec<ExpTermSum>, power: f64 },
    Custom(Arc<dyn EigenBasis>),
}

type CacheKey = (usize, usize, u64, u64);

/// A biorthogonal eigen system with its stationary measure.
pub struct EigenSystem {
    family: Family,
    kind: Kind,
    measure: DensityMeasure,
    n_max: usize,
    /// Per-index factors `a_n` dividing `𝒱_n`, set by [`EigenSystem::renormalized`].
    renorm: Option<Vec<f64>>,
    /// Accuracy used by [`crate::measures::condition_number`] and
    /// [`crate::measures::cosine_angle`].
    tolerance: QuadTolerance,
    kappa_cache: RwLock<HashMap<CacheKey, f64>>,
    cosine_cache: RwLock<HashMap<CacheKey, f64>>,
}

impl Clone for EigenSystem {
    fn clone(&self) -> Self {
        Self {
            family: self.family.clone(),
            kind: self.kind.clone(),
            measure: self.measure.clone(),
            n_max: self.n_max,
            renorm: self.renorm.clone(),
            tolerance: self.tolerance,
            kappa_cache: RwLock::new(self.kappa_cache.read().unwrap().clone()),
            cosine_cache: RwLock::new(self.cosine_cache.read().unwrap().clone()),
        }
    }
}

impl fmt::Debug for EigenSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EigenSystem")
            .field("family", &self.family)
            .field("n_max", &self.n_max)
            .field("renormalized", &self.renorm.is_some())
            .finish()
    }
}

impl EigenSystem {
    fn build(family: Family, kind: Kind, measure: DensityMeasure, n_max: usize) -> Self {
        Self {
            family,
            kind,
            measure,
            n_max,
            renorm: None,
            tolerance: QuadTolerance::default(),
            kappa_cache: RwLock::new(HashMap::new()),
            cosine_cache: RwLock::new(HashMap::new()),
        }
    }

    /// Classical Laguerre (CIR) system in `γ_β`, `β > -1`.
    pub fn classical(beta: f64) -> Result<Self> {
        let measure = DensityMeasure::gamma_beta(beta)?;
        let scale = (0..=POLY_N_MAX).map(|n| (0.5 * ln_laguerre_norm_const(n, beta)).exp()).collect();
        Ok(Self::build(Family::Classical { beta }, Kind::Classical { beta, scale }, measure, POLY_N_MAX))
    }

    /// Small perturbation of the Laguerre semigroup, `b ≥ 1`.
    pub fn small_perturbation(b: f64) -> Result<Self> {
        if !(b >= 1.0) {
            return Err(invalid(format!("small-perturbation parameter b must be >= 1, got {b}")));
        }
        let measure = DensityMeasure::nu_b(b)?;
        Ok(Self::build(Family::SmallPerturbation { b }, Kind::SmallPerturbation { b }, measure, POLY_N_MAX))
    }

    /// Gauss-Laguerre system with the default index range.
    pub fn gauss_laguerre(alpha: f64, b: f64) -> Result<Self> {
        Self::gauss_laguerre_with_limit(alpha, b, GAUSS_LAGUERRE_N_MAX)
    }

    /// Gauss-Laguerre system for `0 < α < 1`, `b ≥ 1 − 1/α`, indices `≤ n_max`.
    pub fn gauss_laguerre_with_limit(alpha: f64, b: f64, n_max: usize) -> Result<Self> {
        let coeffs = GLCoefficients::gauss_laguerre(alpha, b, n_max)?;
        let measure = DensityMeasure::e_alpha_b(alpha, b)?;
        let numerators = (0..=n_max).map(|n| rodrigues_numerator(alpha, b, n)).collect();
        let kind = Kind::GaussLaguerre { coeffs, numerators, power: density_power(alpha, b) };
        Ok(Self::build(Family::GaussLaguerre { alpha, b }, kind, measure, n_max))
    }

    /// A user-defined system. Rejects `λ_0 ≠ 0`, negative or repeated
    /// eigenvalues.
    pub fn custom(basis: Arc<dyn EigenBasis>) -> Result<Self> {
        let n_max = basis.n_max();
        let lambdas: Vec<f64> = (0..=n_max).map(|n| basis.eigenvalue(n)).collect();
        if lambdas[0] != 0.0 {
            return Err(invalid(format!("lambda_0 must be 0, got {}", lambdas[0])));
        }
        if let Some(l) = lambdas.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
            return Err(invalid(format!("eigenvalues must be finite and nonnegative, got {l}")));
        }
        for i in 0..lambdas.len() {
            for j in 0..i {
                if lambdas[i] == lambdas[j] {
                    return Err(invalid(format!(
                        "eigenvalues must be simple: lambda_{j} = lambda_{i} = {}",
                        lambdas[i]
                    )));
                }
            }
        }
        let measure = basis.measure();
        let family = Family::Custom { name: basis.name() };
        Ok(Self::build(family, Kind::Custom(basis), measure, n_max))
    }

    /// Checks `⟨𝒫_n, 𝒱_n⟩_ν = 1` and, where an entry is off by more than
    /// `tol`, divides `𝒱_n` by the computed `a_n = ⟨𝒫_n, 𝒱_n⟩_ν`.
    pub fn renormalized(mut self, tol: f64) -> Result<Self> {
        let gram = gram_matrix(&self, self.n_max, Side::P, Side::V, &QuadTolerance::default())?;
        let a: Vec<f64> = (0..=self.n_max).map(|n| gram[n][n].value).collect();
        if a.iter().any(|v| (v - 1.0).abs() > tol) {
            if let Some((n, v)) = a.iter().enumerate().find(|(_, v)| v.abs() < 1e-12) {
                return Err(Error::DegenerateVariance(format!("<P_{n}, V_{n}> = {v} cannot be renormalized")));
            }
            self.renorm = Some(a);
            self.kappa_cache.write().unwrap().clear();
        }
        Ok(self)
    }

    /// Replaces the quadrature accuracy used for `κ` and `c`.
    pub fn with_tolerance(mut self, tolerance: QuadTolerance) -> Result<Self> {
        if !(tolerance.abs >= 0.0 && tolerance.rel >= 0.0 && tolerance.abs + tolerance.rel > 0.0) {
            return Err(invalid(format!(
                "quadrature tolerance needs abs, rel >= 0 and not both zero, got {tolerance:?}"
            )));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn tolerance(&self) -> &QuadTolerance {
        &self.tolerance
    }

    /// Renormalization factors, if any were applied.
    pub fn renormalization(&self) -> Option<&[f64]> {
        self.renorm.as_deref()
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn measure(&self) -> &DensityMeasure {
        &self.measure
    }

    /// Largest supported index.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn is_self_adjoint(&self) -> bool {
        match &self.kind {
            Kind::Classical { .. } => true,
            Kind::Custom(b) => b.self_adjoint(),
            _ => false,
        }
    }

    pub fn check_index(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::IndexOutOfRange { index: n, limit: self.n_max });
        }
        Ok(())
    }

    pub fn eigenvalue(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        Ok(match &self.kind {
            Kind::Custom(b) => b.eigenvalue(n),
            _ => n as f64,
        })
    }

    pub fn eigen_p(&self, n: usize, x: f64) -> Result<f64> {
        self.check_index(n)?;
        check_x(x)?;
        Ok(self.eigen_p_unchecked(n, x))
    }

    pub fn coeigen_v(&self, n: usize, x: f64) -> Result<f64> {
        self.check_index(n)?;
        check_x(x)?;
        Ok(self.coeigen_v_unchecked(n, x))
    }

    pub(crate) fn eigen_p_unchecked(&self, n: usize, x: f64) -> f64 {
        match &self.kind {
            Kind::Classical { beta, scale } => scale[n] * laguerre_unchecked(n, *beta, x),
            Kind::SmallPerturbation { b } => smallpert_eigen_p_unchecked(*b, n, x),
            Kind::GaussLaguerre { coeffs, .. } => gl_eigen_p_unchecked(coeffs, n, x),
            Kind::Custom(b) => b.eigen_p(n, x),
        }
    }

    pub(crate) fn coeigen_v_unchecked(&self, n: usize, x: f64) -> f64 {
        let v = match &self.kind {
            Kind::Classical { beta, scale } => scale[n] * laguerre_unchecked(n, *beta, x),
            Kind::SmallPerturbation { b } => smallpert_coeigen_v_unchecked(*b, n, x),
            Kind::GaussLaguerre { numerators, power, .. } => numerators[n].eval_ratio(x, *power),
            Kind::Custom(b) => b.coeigen_v(n, x),
        };
        match &self.renorm {
            Some(a) => v / a[n],
            None => v,
        }
    }

    pub(crate) fn cached_kappa(&self, m: usize, tol: &QuadTolerance) -> Option<f64> {
        let (a, r) = tol.cache_key();
        self.kappa_cache.read().unwrap().get(&(m, m, a, r)).copied()
    }

    pub(crate) fn store_kappa(&self, m: usize, tol: &QuadTolerance, value: f64) {
        let (a, r) = tol.cache_key();
        self.kappa_cache.write().unwrap().insert((m, m, a, r), value);
    }

    pub(crate) fn cached_cosine(&self, n: usize, m: usize, tol: &QuadTolerance) -> Option<f64> {
        let (a, r) = tol.cache_key();
        self.cosine_cache.read().unwrap().get(&(n, m, a, r)).copied()
    }

    pub(crate) fn store_cosine(&self, n: usize, m: usize, tol: &QuadTolerance, value: f64) {
        let (a, r) = tol.cache_key();
        self.cosine_cache.write().unwrap().insert((n, m, a, r), value);
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("state must be >= 0, got {x}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_are_indices() {
        let s = EigenSystem::small_perturbation(2.0).unwrap();
        assert_eq!(s.eigenvalue(0).unwrap(), 0.0);
        assert_eq!(s.eigenvalue(7).unwrap(), 7.0);
        assert!(matches!(s.eigenvalue(31), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn gauss_laguerre_coeigen_drops_the_sign() {
        let s = EigenSystem::gauss_laguerre(0.5, 1.0).unwrap();
        for n in 0..6 {
            let signed = crate::specfun::gauss_laguerre_coeigen_v(0.5, 1.0, n, 1.3).unwrap();
            let unsigned = s.coeigen_v(n, 1.3).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((signed - sign * unsigned).abs() < 1e-12 * unsigned.abs().max(1.0));
        }
    }

    struct Dup;
    impl EigenBasis for Dup {
        fn name(&self) -> String {
            "dup".into()
        }
        fn n_max(&self) -> usize {
            2
        }
        fn eigenvalue(&self, n: usize) -> f64 {
            [0.0, 1.0, 1.0][n]
        }
        fn eigen_p(&self, _: usize, _: f64) -> f64 {
            1.0
        }
        fn coeigen_v(&self, _: usize, _: f64) -> f64 {
            1.0
        }
        fn measure(&self) -> DensityMeasure {
            DensityMeasure::gamma_beta(0.0).unwrap()
        }
    }

    #[test]
    fn custom_rejects_repeated_eigenvalues() {
        assert!(EigenSystem::custom(Arc::new(Dup)).is_err());
    }

    #[test]
    fn rejects_negative_state() {
        let s = EigenSystem::classical(1.0).unwrap();
        assert!(matches!(s.eigen_p(1, -0.5), Err(Error::Domain(_))));
    }
}
