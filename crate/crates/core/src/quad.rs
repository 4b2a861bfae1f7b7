//! Quadrature primitives.
//!
//! Double-exponential rules (tanh-sinh on finite intervals, exp-sinh on
//! half-lines) handle the algebraic endpoint singularities that show up in
//! renewal integrals and Mittag-Leffler kernels. Generalized Gauss-Laguerre
//! rules are built with the Golub-Welsch eigenvalue method.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::stats::{ln_gamma, CompensatedSum};

/// An integral estimate with its refinement error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const MAX_LEVEL: usize = 10;

fn converged(diff: f64, value: f64, abs_tol: f64, rel_tol: f64) -> bool {
    diff <= abs_tol.max(rel_tol * value.abs())
}

/// Tanh-sinh quadrature of `f` over `[a, b]`.
///
/// The integrand is never evaluated at the endpoints, so integrable
/// endpoint singularities are allowed.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("tanh_sinh needs a finite interval, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);

    // Contribution of the abscissa at parameter t (symmetric pair included).
    let pair = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        // distance from the nearer endpoint, in units of `half`
        let delta = 2.0 * e / (1.0 + e);
        let cosh_u = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        if !w.is_finite() || w == 0.0 {
            return 0.0;
        }
        if t == 0.0 {
            return w * f(mid);
        }
        let d = half * delta;
        let mut s = 0.0;
        let xr = hi - d;
        if xr > lo && xr < hi {
            s += f(xr);
        }
        let xl = lo + d;
        if xl > lo && xl < hi {
            s += f(xl);
        }
        w * s
    };

    // far enough that the abscissae reach ~1e-300 of the half-width, which
    // is what algebraic singularities at the left endpoint need
    let t_max = 6.1;
    let mut h = 0.5;
    let mut acc = CompensatedSum::new();
    acc.add(pair(0.0));
    let mut k = 1;
    while k as f64 * h <= t_max {
        acc.add(pair(k as f64 * h));
        k += 1;
    }
    let mut sum = acc.value();
    let mut prev = sum * h;
    for _ in 0..MAX_LEVEL {
        h *= 0.5;
        let mut acc = CompensatedSum::new();
        let mut k = 1;
        while k as f64 * h <= t_max {
            acc.add(pair(k as f64 * h));
            k += 2;
        }
        sum += acc.value();
        let cur = sum * h;
        let diff = (cur - prev).abs();
        if !cur.is_finite() {
            return Err(Error::QuadratureNonConvergent {
                estimate: cur,
                error: f64::INFINITY,
                tolerance: abs_tol,
            });
        }
        if converged(diff, cur, abs_tol, rel_tol) {
            return Ok(Estimate { value: sign * cur, error: diff });
        }
        prev = cur;
    }
    Err(Error::QuadratureNonConvergent {
        estimate: sign * prev,
        error: f64::NAN,
        tolerance: abs_tol.max(rel_tol * prev.abs()),
    })
}

/// Exp-sinh quadrature of `f` over `[a, ∞)` with abscissae
/// `a + scale * exp(π/2 sinh t)`.
///
/// `scale` should match the length scale on which `f` decays.
pub fn exp_sinh<F>(f: F, a: f64, scale: f64, abs_tol: f64, rel_tol: f64) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    if !(scale > 0.0) {
        return Err(Error::Domain(format!("exp_sinh scale must be positive, got {scale}")));
    }
    let term = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let r = scale * u.exp();
        let x = a + r;
        if !x.is_finite() || r == 0.0 || x == a {
            return 0.0;
        }
        let w = FRAC_PI_2 * t.cosh() * r;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            w * v
        }
    };
    // Sum over t = (k + offset) h walking outwards until terms vanish.
    let walk = |h: f64, odd_only: bool| -> f64 {
        let mut acc = CompensatedSum::new();
        let step = if odd_only { 2 } else { 1 };
        let start = if odd_only { 1 } else { 0 };
        if !odd_only {
            acc.add(term(0.0));
        }
        for dir in [1.0, -1.0] {
            let mut k = if odd_only { start } else { 1 };
            let mut small = 0;
            loop {
                let t = dir * k as f64 * h;
                if t.abs() > 6.5 {
                    break;
                }
                let v = term(t);
                acc.add(v);
                if v.abs() <= 1e-300 || v.abs() < 1e-18 * acc.value().abs() {
                    small += 1;
                    if small >= 3 {
                        break;
                    }
                } else {
                    small = 0;
                }
                k += step;
            }
        }
        acc.value()
    };
    let mut h = 0.5;
    let mut sum = walk(h, false);
    let mut prev = sum * h;
    for _ in 0..MAX_LEVEL {
        h *= 0.5;
        sum += walk(h, true);
        let cur = sum * h;
        let diff = (cur - prev).abs();
        if !cur.is_finite() {
            return Err(Error::QuadratureNonConvergent {
                estimate: cur,
                error: f64::INFINITY,
                tolerance: abs_tol,
            });
        }
        if converged(diff, cur, abs_tol, rel_tol) {
            return Ok(Estimate { value: cur, error: diff });
        }
        prev = cur;
    }
    Err(Error::QuadratureNonConvergent {
        estimate: prev,
        error: f64::NAN,
        tolerance: abs_tol.max(rel_tol * prev.abs()),
    })
}

/// A fixed quadrature rule `∫ f dμ ≈ Σ w_i f(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: RuleKind,
    /// Node count for Gauss rules, inverse step for double-exponential rules.
    pub order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    GaussLaguerre,
    ExpSinh,
}

impl QuadratureRule {
    /// Applies the rule, skipping zero weights so that `0 · ∞` never occurs.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = CompensatedSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            if w != 0.0 {
                acc.add(w * f(x));
            }
        }
        acc.value()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

type RuleCache = Mutex<HashMap<(usize, u64), Arc<QuadratureRule>>>;

/// Generalized Gauss-Laguerre rule for the probability measure
/// `x^β e^{-x} / Γ(β+1) dx` on `(0, ∞)`, with weights summing to one.
///
/// Rules are cached by `(n, β)`.
pub fn gauss_laguerre(n: usize, beta: f64) -> Result<Arc<QuadratureRule>> {
    if n == 0 {
        return Err(Error::InvalidParameter("Gauss-Laguerre rule needs n >= 1".into()));
    }
    if !(beta > -1.0) {
        return Err(Error::InvalidParameter(format!("Gauss-Laguerre order must exceed -1, got {beta}")));
    }
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, beta.to_bits());
    if let Some(rule) = cache.lock().unwrap().get(&key) {
        return Ok(rule.clone());
    }
    // Built outside the lock; a concurrent duplicate build yields the same rule.
    let rule = Arc::new(golub_welsch_laguerre(n, beta)?);
    cache.lock().unwrap().entry(key).or_insert_with(|| rule.clone());
    Ok(rule)
}

fn golub_welsch_laguerre(n: usize, beta: f64) -> Result<QuadratureRule> {
    let mut d: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + beta + 1.0).collect();
    // e[i] couples rows i and i+1
    let mut e: Vec<f64> = (1..n)
        .map(|k| (k as f64 * (k as f64 + beta)).sqrt())
        .chain(std::iter::once(0.0))
        .collect();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    tridiagonal_ql(&mut d, &mut e, &mut z)?;
    let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z.into_iter().map(|v| v * v)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let (nodes, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::GaussLaguerre,
        order: n,
    })
}

/// Implicit QL on a symmetric tridiagonal matrix, tracking only the first
/// component of each eigenvector (stored in `z`).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::QuadratureNonConvergent {
                    estimate: d[l],
                    error: e[l].abs(),
                    tolerance: f64::EPSILON,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Exp-sinh rule for the probability measure `y^c e^{-y} / Γ(c+1) dy` on
/// `(0, ∞)` with step `h`. Nodes with vanishing weight are dropped.
pub fn exp_sinh_gamma_rule(c: f64, h: f64) -> Result<QuadratureRule> {
    if !(c > -1.0) {
        return Err(Error::InvalidParameter(format!("Gamma weight exponent must exceed -1, got {c}")));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let lg = ln_gamma(c + 1.0);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let k_max = (6.0 / h).ceil() as i64;
    for k in -k_max..=k_max {
        let t = k as f64 * h;
        let u = FRAC_PI_2 * t.sinh();
        let y = u.exp();
        if !(y > 0.0) || !y.is_finite() {
            continue;
        }
        // log of h * dy/dt * y^c e^{-y} / Γ(c+1)
        let lw = h.ln() + (FRAC_PI_2 * t.cosh()).ln() + u + c * u - y - lg;
        if lw < -745.0 {
            continue;
        }
        nodes.push(y);
        weights.push(lw.exp());
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::ExpSinh,
        order: (1.0 / h).round() as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let est = tanh_sinh(|x| x.powf(-0.5), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((est.value - 2.0).abs() < 1e-10, "{est:?}");
        // ∫_0^1 ln x dx = -1
        let est = tanh_sinh(|x| x.ln(), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((est.value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn tanh_sinh_reversed_interval() {
        let est = tanh_sinh(|x| x * x, 2.0, 0.0, 1e-13, 1e-13).unwrap();
        assert!((est.value + 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn exp_sinh_gamma_integral() {
        // ∫_0^∞ x^{0.3} e^{-x} dx = Γ(1.3)
        let est = exp_sinh(|x| x.powf(0.3) * (-x).exp(), 0.0, 1.0, 1e-13, 1e-13).unwrap();
        assert!((est.value - crate::stats::gamma(1.3)).abs() < 1e-11);
        // algebraic tail: ∫_1^∞ x^{-3/2} dx = 2
        let est = exp_sinh(|x| x.powf(-1.5), 1.0, 1.0, 1e-11, 1e-11).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9, "{est:?}");
    }

    #[test]
    fn gauss_laguerre_moments_are_exact() {
        let beta = 1.5;
        let rule = gauss_laguerre(20, beta).unwrap();
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        // E[X^k] = Γ(β+1+k)/Γ(β+1) for X ~ Gamma(β+1)
        for k in 0..30 {
            let exact = (ln_gamma(beta + 1.0 + k as f64) - ln_gamma(beta + 1.0)).exp();
            let got = rule.integrate(|x| x.powi(k));
            assert!(((got - exact) / exact).abs() < 1e-11, "k={k}: {got} vs {exact}");
        }
    }

    #[test]
    fn gauss_laguerre_large_rule_builds() {
        let rule = gauss_laguerre(400, 0.0).unwrap();
        assert_eq!(rule.len(), 400);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mean = rule.integrate(|x| x);
        assert!((mean - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exp_sinh_rule_gamma_moments() {
        let c = 0.6;
        let rule = exp_sinh_gamma_rule(c, 1.0 / 32.0).unwrap();
        for k in [0.0, 0.6, 1.0, 2.4, 5.0] {
            let exact = (ln_gamma(c + 1.0 + k) - ln_gamma(c + 1.0)).exp();
            let got = rule.integrate(|y| y.powf(k));
            assert!(((got - exact) / exact).abs() < 1e-12, "k={k}");
        }
    }
}
