//! Stationary measures, weighted inner products, condition numbers and angle
//! cosines.
//!
//! Every density used by the eigen systems reduces to a Gamma weight after a
//! power substitution, so each measure exposes a ladder of quadrature rules
//! whose weights already include the density:
//!
//! | family      | rule                                                        |
//! |-------------|-------------------------------------------------------------|
//! | `γ_β`       | Gauss-Laguerre for `x^β e^{-x}` with 200, 400, 800, 1600 nodes |
//! | `ν_b`       | the `γ_{b-1}` rule with weights multiplied by `(1+x)/(b+1)`  |
//! | `𝐞_{α,b}`   | exp-sinh rule in `y = x^{1/α} ~ Gamma(αb+1)`, step 1/16 … 1/128|
//! | custom      | exp-sinh rule in `x` against the supplied density           |
//!
//! The `𝐞_{α,b}` functions are polynomials in `y` and in `y^α`; the
//! fractional powers make Gauss rules converge slowly, whereas the
//! double-exponential rule is insensitive to them.
//!
//! The density `x^{b+1/α-1} e^{-x^{1/α}}` integrates to `α Γ(αb+1)`; it is
//! normalized to a probability measure here.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{invalid, Error, Result};
use crate::quad::{exp_sinh_gamma_rule, gauss_laguerre, Estimate, QuadratureRule, RuleKind};
use crate::stats::{ln_gamma, CompensatedSum};
use crate::system::EigenSystem;

/// Number of rule levels (each doubling the resolution of the previous one).
pub const RULE_LEVELS: usize = 4;
/// Gauss-Laguerre node count at the coarsest level.
pub const BASE_NODES: usize = 200;

const BASE_STEP: f64 = 0.0625;
const MASS_TOLERANCE: f64 = 1e-9;

/// Accuracy requested from an inner product: the refinement difference must
/// be at most `max(abs, rel·|value|)`, or the round-off floor of the sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for QuadTolerance {
    fn default() -> Self {
        Self { abs: 1e-9, rel: 1e-10 }
    }
}

impl QuadTolerance {
    pub(crate) fn cache_key(&self) -> (u64, u64) {
        (self.abs.to_bits(), self.rel.to_bits())
    }
}

type DensityFn = dyn Fn(f64) -> f64 + Send + Sync;
type SamplerFn = dyn Fn(&mut ChaCha8Rng) -> f64 + Send + Sync;

/// A user-supplied probability density on `(0, ∞)`.
#[derive(Clone)]
pub struct CustomDensity {
    name: String,
    density: Arc<DensityFn>,
    scale: f64,
    sampler: Option<Arc<SamplerFn>>,
}

impl CustomDensity {
    /// `scale` is the length scale used to place exp-sinh abscissae.
    pub fn new<F>(name: impl Into<String>, density: F, scale: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid(format!("custom density scale must be positive, got {scale}")));
        }
        let out = Self { name: name.into(), density: Arc::new(density), scale, sampler: None };
        let rule = out.rule(RULE_LEVELS - 1);
        if rule.weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(invalid(format!("custom density `{}` is negative or NaN somewhere", out.name)));
        }
        let mass: f64 = rule.weights.iter().copied().collect::<CompensatedSum>().value();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(invalid(format!("custom density `{}` has total mass {mass}, expected 1", out.name)));
        }
        Ok(out)
    }

    /// Attaches an exact sampler used by [`sample_stationary`].
    pub fn with_sampler<S>(mut self, sampler: S) -> Self
    where
        S: Fn(&mut ChaCha8Rng) -> f64 + Send + Sync + 'static,
    {
        self.sampler = Some(Arc::new(sampler));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn rule(&self, level: usize) -> QuadratureRule {
        let h = BASE_STEP / (1u32 << level) as f64;
        let k_max = (6.0 / h).ceil() as i64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for k in -k_max..=k_max {
            let t = k as f64 * h;
            let u = std::f64::consts::FRAC_PI_2 * t.sinh();
            let x = self.scale * u.exp();
            if !(x > 0.0 && x.is_finite()) {
                continue;
            }
            let w = h * std::f64::consts::FRAC_PI_2 * t.cosh() * x * (self.density)(x);
            if w != 0.0 && w.is_finite() {
                nodes.push(x);
                weights.push(w);
            }
        }
        QuadratureRule { nodes, weights, kind: RuleKind::ExpSinh, order: (1.0 / h).round() as usize }
    }
}

impl fmt::Debug for CustomDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("name", &self.name)
            .field("scale", &self.scale)
            .field("has_sampler", &self.sampler.is_some())
            .finish()
    }
}

/// A stationary probability measure on `(0, ∞)` with a density.
#[derive(Debug, Clone)]
pub enum DensityMeasure {
    /// `γ_β(dx) = x^β e^{-x} / Γ(β+1) dx`, the Gamma(β+1, 1) law.
    GammaBeta { beta: f64 },
    /// `ν_b(dx) = (1+x)/(b+1) γ_{b-1}(dx)`.
    NuB { b: f64 },
    /// `𝐞_{α,b}(dx) ∝ x^{b+1/α-1} e^{-x^{1/α}} dx`.
    EAlphaB { alpha: f64, b: f64 },
    Custom(CustomDensity),
}

impl DensityMeasure {
    pub fn gamma_beta(beta: f64) -> Result<Self> {
        if !(beta > -1.0) {
            return Err(invalid(format!("gamma_beta needs beta > -1, got {beta}")));
        }
        Ok(Self::GammaBeta { beta })
    }

    pub fn nu_b(b: f64) -> Result<Self> {
        if !(b > 0.0) {
            return Err(invalid(format!("nu_b needs b > 0, got {b}")));
        }
        Ok(Self::NuB { b })
    }

    pub fn e_alpha_b(alpha: f64, b: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("e_alpha_b needs alpha in (0, 1), got {alpha}")));
        }
        if !(alpha * b + 1.0 > 0.0) {
            return Err(invalid(format!("e_alpha_b needs alpha*b + 1 > 0, got b = {b}")));
        }
        Ok(Self::EAlphaB { alpha, b })
    }

    /// Short family tag.
    pub fn tag(&self) -> &str {
        match self {
            Self::GammaBeta { .. } => "gamma_beta",
            Self::NuB { .. } => "nu_b",
            Self::EAlphaB { .. } => "e_alpha_b",
            Self::Custom(c) => c.name(),
        }
    }

    /// Density at `x > 0` (zero elsewhere).
    pub fn density(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        match self {
            Self::GammaBeta { beta } => (beta * x.ln() - x - ln_gamma(beta + 1.0)).exp(),
            Self::NuB { b } => (1.0 + x) / (b + 1.0) * ((b - 1.0) * x.ln() - x - ln_gamma(*b)).exp(),
            Self::EAlphaB { alpha, b } => {
                let p = b + 1.0 / alpha - 1.0;
                (p * x.ln() - x.powf(1.0 / alpha) - ln_gamma(alpha * b + 1.0) - alpha.ln()).exp()
            }
            Self::Custom(c) => (c.density)(x),
        }
    }

    /// Mean of the measure, where known in closed form.
    pub fn mean(&self) -> Option<f64> {
        match self {
            Self::GammaBeta { beta } => Some(beta + 1.0),
            // mixture of Gamma(b) and Gamma(b+1) with weights 1/(b+1), b/(b+1)
            Self::NuB { b } => Some((b + b * (b + 1.0)) / (b + 1.0)),
            Self::EAlphaB { alpha, b } => Some((ln_gamma(alpha * b + 1.0 + alpha) - ln_gamma(alpha * b + 1.0)).exp()),
            Self::Custom(_) => None,
        }
    }

    /// Quadrature rule at refinement `level` (`0..RULE_LEVELS`), with the
    /// density folded into the weights.
    pub fn rule(&self, level: usize) -> Result<Arc<QuadratureRule>> {
        if level >= RULE_LEVELS {
            return Err(Error::IndexOutOfRange { index: level, limit: RULE_LEVELS - 1 });
        }
        let nodes = BASE_NODES << level;
        match self {
            Self::GammaBeta { beta } => gauss_laguerre(nodes, *beta),
            Self::NuB { b } => {
                let base = gauss_laguerre(nodes, b - 1.0)?;
                let weights = base
                    .nodes
                    .iter()
                    .zip(&base.weights)
                    .map(|(x, w)| w * (1.0 + x) / (b + 1.0))
                    .collect();
                Ok(Arc::new(QuadratureRule { nodes: base.nodes.clone(), weights, kind: base.kind, order: base.order }))
            }
            Self::EAlphaB { alpha, b } => {
                let h = BASE_STEP / (1u32 << level) as f64;
                let mut rule = exp_sinh_gamma_rule(alpha * b, h)?;
                for y in &mut rule.nodes {
                    *y = y.powf(*alpha);
                }
                Ok(Arc::new(rule))
            }
            Self::Custom(c) => Ok(Arc::new(c.rule(level))),
        }
    }
}

/// Integrates `f` against `mu`, refining the rule until two consecutive
/// levels agree to `tol`.
pub fn integrate<F>(f: F, mu: &DensityMeasure, tol: &QuadTolerance) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    let mut prev: Option<f64> = None;
    let mut last = (f64::NAN, f64::INFINITY);
    for level in 0..RULE_LEVELS {
        let rule = mu.rule(level)?;
        let mut acc = CompensatedSum::new();
        let mut magnitude = 0.0;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            if w == 0.0 {
                continue;
            }
            let v = w * f(x);
            magnitude += v.abs();
            acc.add(v);
        }
        let value = acc.value();
        if !value.is_finite() {
            return Err(Error::QuadratureNonConvergent { estimate: value, error: f64::INFINITY, tolerance: tol.abs });
        }
        if let Some(p) = prev {
            let diff = (value - p).abs();
            let floor = 64.0 * f64::EPSILON * magnitude;
            let allowed = tol.abs.max(tol.rel * value.abs()).max(floor);
            if diff <= allowed {
                return Ok(Estimate { value, error: diff.max(floor) });
            }
            last = (value, diff);
        }
        prev = Some(value);
    }
    Err(Error::QuadratureNonConvergent {
        estimate: last.0,
        error: last.1,
        tolerance: tol.abs.max(tol.rel * last.0.abs()),
    })
}

/// `⟨f, g⟩_μ = ∫ f g dμ` with a refinement error estimate.
pub fn inner_product<F, G>(f: F, g: G, mu: &DensityMeasure) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    integrate(|x| f(x) * g(x), mu, &QuadTolerance::default())
}

/// As [`inner_product`] with an explicit tolerance.
pub fn inner_product_with<F, G>(f: F, g: G, mu: &DensityMeasure, tol: &QuadTolerance) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    integrate(|x| f(x) * g(x), mu, tol)
}

/// Which member of the biorthogonal pair to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    P,
    V,
}

fn eval_side(sys: &EigenSystem, side: Side, n: usize, x: f64) -> f64 {
    match side {
        Side::P => sys.eigen_p_unchecked(n, x),
        Side::V => sys.coeigen_v_unchecked(n, x),
    }
}

/// Squared norm `‖𝒫_n‖²` or `‖𝒱_n‖²`.
pub(crate) fn squared_norm(sys: &EigenSystem, side: Side, n: usize, tol: &QuadTolerance) -> Result<Estimate> {
    integrate(
        |x| {
            let v = eval_side(sys, side, n, x);
            v * v
        },
        sys.measure(),
        tol,
    )
}

/// `κ_ν(m) = ‖𝒫_m‖_ν ‖𝒱_m‖_ν`, which is at least one by Cauchy-Schwarz.
///
/// Uses the system's tolerance; values are cached per system, index and
/// tolerance.
pub fn condition_number(sys: &EigenSystem, m: usize) -> Result<f64> {
    condition_number_with(sys, m, sys.tolerance())
}

pub fn condition_number_with(sys: &EigenSystem, m: usize, tol: &QuadTolerance) -> Result<f64> {
    sys.check_index(m)?;
    if let Some(k) = sys.cached_kappa(m, tol) {
        return Ok(k);
    }
    let k = if sys.is_self_adjoint() {
        // 𝒫_m = 𝒱_m, so κ = ‖𝒫_m‖² = ⟨𝒫_m, 𝒱_m⟩ = 1 up to quadrature error
        squared_norm(sys, Side::P, m, tol)?.value
    } else {
        let p = squared_norm(sys, Side::P, m, tol)?.value;
        let v = squared_norm(sys, Side::V, m, tol)?.value;
        (p * v).sqrt()
    };
    if k < 1.0 - 1e-6 {
        return Err(Error::ConditionBelowOne(k));
    }
    sys.store_kappa(m, tol, k);
    Ok(k)
}

/// `c_ν(n, m) = ⟨𝒫_n, 𝒫_m⟩_ν / (‖𝒫_n‖_ν ‖𝒫_m‖_ν)`, exactly 1 on the diagonal.
pub fn cosine_angle(sys: &EigenSystem, n: usize, m: usize) -> Result<f64> {
    cosine_angle_with(sys, n, m, sys.tolerance())
}

pub fn cosine_angle_with(sys: &EigenSystem, n: usize, m: usize, tol: &QuadTolerance) -> Result<f64> {
    sys.check_index(n)?;
    sys.check_index(m)?;
    if n == m {
        return Ok(1.0);
    }
    let (lo, hi) = if n < m { (n, m) } else { (m, n) };
    if let Some(c) = sys.cached_cosine(lo, hi, tol) {
        return Ok(c);
    }
    let c = if sys.is_self_adjoint() {
        // orthogonal eigenfunctions; the quadrature value is round-off
        integrate(|x| sys.eigen_p_unchecked(lo, x) * sys.eigen_p_unchecked(hi, x), sys.measure(), tol)?;
        0.0
    } else {
        let cross = integrate(|x| sys.eigen_p_unchecked(lo, x) * sys.eigen_p_unchecked(hi, x), sys.measure(), tol)?.value;
        let a = squared_norm(sys, Side::P, lo, tol)?.value;
        let b = squared_norm(sys, Side::P, hi, tol)?.value;
        (cross / (a * b).sqrt()).clamp(-1.0, 1.0)
    };
    sys.store_cosine(lo, hi, tol, c);
    Ok(c)
}

/// Matrix of `|⟨𝒫_n, 𝒱_m⟩_ν − δ_{nm}|` for `n, m ≤ n_max`.
pub fn biorthogonality_check(sys: &EigenSystem, n_max: usize) -> Result<Vec<Vec<f64>>> {
    sys.check_index(n_max)?;
    let gram = gram_matrix(sys, n_max, Side::P, Side::V, sys.tolerance())?;
    Ok(gram
        .iter()
        .enumerate()
        .map(|(n, row)| row.iter().enumerate().map(|(m, e)| (e.value - if n == m { 1.0 } else { 0.0 }).abs()).collect())
        .collect())
}

/// All inner products `⟨left_n, right_m⟩` for `n, m ≤ n_max`, refined
/// together until every entry meets the tolerance.
pub(crate) fn gram_matrix(
    sys: &EigenSystem,
    n_max: usize,
    left: Side,
    right: Side,
    tol: &QuadTolerance,
) -> Result<Vec<Vec<Estimate>>> {
    let size = n_max + 1;
    let mut prev: Option<Vec<Vec<f64>>> = None;
    let mut worst = (f64::NAN, f64::INFINITY);
    for level in 0..RULE_LEVELS {
        let rule = sys.measure().rule(level)?;
        let mut acc = vec![vec![CompensatedSum::new(); size]; size];
        let mut mag = vec![vec![0.0f64; size]; size];
        let mut lv = vec![0.0; size];
        let mut rv = vec![0.0; size];
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            if w == 0.0 {
                continue;
            }
            for k in 0..size {
                lv[k] = eval_side(sys, left, k, x);
                rv[k] = eval_side(sys, right, k, x);
            }
            for n in 0..size {
                for m in 0..size {
                    let v = w * lv[n] * rv[m];
                    acc[n][m].add(v);
                    mag[n][m] += v.abs();
                }
            }
        }
        let values: Vec<Vec<f64>> = acc.iter().map(|row| row.iter().map(|a| a.value()).collect()).collect();
        if let Some(p) = &prev {
            let mut ok = true;
            let mut out = Vec::with_capacity(size);
            for n in 0..size {
                let mut row = Vec::with_capacity(size);
                for m in 0..size {
                    let value = values[n][m];
                    if !value.is_finite() {
                        return Err(Error::QuadratureNonConvergent { estimate: value, error: f64::INFINITY, tolerance: tol.abs });
                    }
                    let diff = (value - p[n][m]).abs();
                    let floor = 64.0 * f64::EPSILON * mag[n][m];
                    if diff > tol.abs.max(tol.rel * value.abs()).max(floor) {
                        ok = false;
                        worst = (value, diff);
                    }
                    row.push(Estimate { value, error: diff.max(floor) });
                }
                out.push(row);
            }
            if ok {
                return Ok(out);
            }
        }
        prev = Some(values);
    }
    Err(Error::QuadratureNonConvergent {
        estimate: worst.0,
        error: worst.1,
        tolerance: tol.abs.max(tol.rel * worst.0.abs()),
    })
}

/// `count` i.i.d. draws from `mu`, reproducible from `seed`.
pub fn sample_stationary(mu: &DensityMeasure, count: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(mu, count, &mut rng)
}

pub(crate) fn sample_with(mu: &DensityMeasure, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let gamma = |shape: f64| Gamma::new(shape, 1.0).map_err(|e| invalid(format!("Gamma({shape}, 1): {e}")));
    match mu {
        DensityMeasure::GammaBeta { beta } => {
            let g = gamma(beta + 1.0)?;
            Ok((0..count).map(|_| g.sample(rng)).collect())
        }
        DensityMeasure::NuB { b } => {
            // (1+x)/(b+1) γ_{b-1} = 1/(b+1) Gamma(b) + b/(b+1) Gamma(b+1)
            let g0 = gamma(*b)?;
            let g1 = gamma(b + 1.0)?;
            let p0 = 1.0 / (b + 1.0);
            Ok((0..count)
                .map(|_| {
                    let u: f64 = rand::Rng::random(rng);
                    if u < p0 {
                        g0.sample(rng)
                    } else {
                        g1.sample(rng)
                    }
                })
                .collect())
        }
        DensityMeasure::EAlphaB { alpha, b } => {
            // X^{1/α} ~ Gamma(αb + 1)
            let g = gamma(alpha * b + 1.0)?;
            Ok((0..count).map(|_| g.sample(rng).powf(*alpha)).collect())
        }
        DensityMeasure::Custom(c) => match &c.sampler {
            Some(s) => Ok((0..count).map(|_| s(rng)).collect()),
            None => Err(Error::Unsupported(format!("custom density `{}` has no sampler", c.name))),
        },
    }
}
