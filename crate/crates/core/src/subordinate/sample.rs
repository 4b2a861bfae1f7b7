//! Path sampling for subordinators and their inverses.
//!
//! Increments over a fixed step are drawn exactly where the law is known:
//! `dt^{1/α}·S` with `S` a standard positive stable variate (Kanter's
//! representation) for `stable:α`, a Poisson count for `poisson:θ`, and a
//! Poisson number of Gamma-summed exponential jumps for `cpexp`. Custom
//! tails are approximated by the compound Poisson process of jumps larger
//! than [`TRUNCATION_EPS`], with the mean of the smaller jumps added to the
//! drift: `ϱ + ∫_0^ε y ϑ(dy) = ϱ + ∫_0^ε Π̄(y) dy - εΠ̄(ε)`.
//!
//! First passages (`L_t = inf{s; 𝒯_s > t}`) are found by [`PassageSampler`],
//! which walks the subordinator event by event — drift segments between
//! jumps — so the passage time is exact for the simulated path. Stable
//! subordinators use the same ε-truncation there (Pareto jumps above ε at rate
//! `ε^{-α}/Γ(1-α)`, drift `α ε^{1-α} / ((1-α)Γ(1-α))` for the small ones).

use rand::distr::{Distribution, Open01};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, Exp1, Gamma, Poisson};

use super::{CustomTail, LevyTail, SubordinatorSpec};
use crate::error::{invalid, Error, Result};
use crate::quad::tanh_sinh;
use crate::stats::gamma;

/// Jumps smaller than this are replaced by their mean in event-based
/// sampling of infinite-activity subordinators.
pub const TRUNCATION_EPS: f64 = 1e-4;

/// `ln S` for a standard positive `α`-stable variate, `𝔼[e^{-λS}] = e^{-λ^α}`.
pub(crate) fn ln_stable_variate<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u: f64 = std::f64::consts::PI * rng.sample::<f64, _>(Open01);
    let e: f64 = rng.sample(Exp1);
    (alpha * u).sin().ln() - u.sin().ln() / alpha + (1.0 - alpha) / alpha * (((1.0 - alpha) * u).sin().ln() - e.ln())
}

/// A standard positive `α`-stable variate (Kanter's representation).
pub fn stable_variate<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    ln_stable_variate(alpha, rng).exp()
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    let p = Poisson::new(mean).map_err(|e| invalid(format!("Poisson({mean}): {e}")))?;
    Ok(p.sample(rng) as u64)
}

/// Law of the jumps retained by the event-based sampler.
#[derive(Debug, Clone)]
enum JumpLaw {
    None,
    Unit,
    /// `ε U^{-1/α}`: stable jumps conditioned to exceed ε.
    Pareto { alpha: f64, eps: f64 },
    Exp { decay: f64 },
    /// Inverse of `Π̄` restricted to `(ε, ∞)`.
    Tail { tail: CustomTail, eps: f64, top: f64 },
}

impl JumpLaw {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            JumpLaw::None => 0.0,
            JumpLaw::Unit => 1.0,
            JumpLaw::Pareto { alpha, eps } => eps * rng.sample::<f64, _>(Open01).powf(-1.0 / alpha),
            JumpLaw::Exp { decay } => rng.sample::<f64, _>(Exp1) / decay,
            JumpLaw::Tail { tail, eps, top } => {
                let v = rng.sample::<f64, _>(Open01) * top;
                invert_tail(tail, *eps, v)
            }
        }
    }
}

/// Smallest `y ≥ ε` with `Π̄(y) ≤ v`, by bisection in `ln y`.
fn invert_tail(tail: &CustomTail, eps: f64, v: f64) -> f64 {
    let mut lo = eps.ln();
    let mut hi = lo;
    while tail.eval(hi.exp()) > v && hi < 60.0 {
        lo = hi;
        hi += 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if tail.eval(mid.exp()) > v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Compound-Poisson-plus-drift description used for event-based sampling.
#[derive(Debug, Clone)]
struct EventModel {
    rate: f64,
    drift: f64,
    jumps: JumpLaw,
}

impl EventModel {
    fn new(spec: &SubordinatorSpec) -> Result<Self> {
        Ok(match spec {
            SubordinatorSpec::Stable { alpha } => {
                let eps = TRUNCATION_EPS;
                let g = gamma(1.0 - alpha);
                Self {
                    rate: eps.powf(-alpha) / g,
                    drift: alpha * eps.powf(1.0 - alpha) / ((1.0 - alpha) * g),
                    jumps: JumpLaw::Pareto { alpha: *alpha, eps },
                }
            }
            SubordinatorSpec::Poisson { theta } => Self { rate: *theta, drift: 0.0, jumps: JumpLaw::Unit },
            SubordinatorSpec::Generic { drift, tail: LevyTail::None } => {
                Self { rate: 0.0, drift: *drift, jumps: JumpLaw::None }
            }
            SubordinatorSpec::Generic { drift, tail: LevyTail::CompoundExp { rate, decay } } => {
                Self { rate: *rate, drift: *drift, jumps: JumpLaw::Exp { decay: *decay } }
            }
            SubordinatorSpec::Generic { drift, tail: LevyTail::Custom(c) } => {
                let eps = TRUNCATION_EPS;
                let top = c.eval(eps);
                let small = tanh_sinh(|y| c.eval(y), 0.0, eps, 1e-14, 1e-10)?.value - eps * top;
                Self {
                    rate: top,
                    drift: drift + small.max(0.0),
                    jumps: JumpLaw::Tail { tail: c.clone(), eps, top },
                }
            }
        })
    }
}

/// Increment `𝒯_{s+dt} - 𝒯_s`.
pub fn sample_increment<R: Rng + ?Sized>(spec: &SubordinatorSpec, dt: f64, rng: &mut R) -> Result<f64> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(invalid(format!("increment step must be finite and >= 0, got {dt}")));
    }
    if dt == 0.0 {
        return Ok(0.0);
    }
    Ok(match spec {
        SubordinatorSpec::Stable { alpha } => (ln_stable_variate(*alpha, rng) + dt.ln() / alpha).exp(),
        SubordinatorSpec::Poisson { theta } => poisson_count(theta * dt, rng)? as f64,
        SubordinatorSpec::Generic { drift, tail: LevyTail::None } => drift * dt,
        SubordinatorSpec::Generic { drift, tail: LevyTail::CompoundExp { rate, decay } } => {
            let n = poisson_count(rate * dt, rng)?;
            let jumps = if n == 0 {
                0.0
            } else {
                Gamma::new(n as f64, 1.0 / decay).map_err(|e| invalid(e.to_string()))?.sample(rng)
            };
            drift * dt + jumps
        }
        SubordinatorSpec::Generic { tail: LevyTail::Custom(_), .. } => {
            let model = EventModel::new(spec)?;
            let n = poisson_count(model.rate * dt, rng)?;
            model.drift * dt + (0..n).map(|_| model.jumps.sample(rng)).sum::<f64>()
        }
    })
}

/// A subordinator trajectory on a regular grid of operational times.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatorPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// `𝒯` on `0, dt, 2dt, …` up to `horizon`, reproducible from `seed`.
pub fn sample_path(spec: &SubordinatorSpec, horizon: f64, dt: f64, seed: u64) -> Result<SubordinatorPath> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("path step must be positive, got {dt}")));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(invalid(format!("path horizon must be finite and >= 0, got {horizon}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = (horizon / dt).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    times.push(0.0);
    values.push(0.0);
    let mut level = 0.0;
    for i in 1..=steps {
        level += sample_increment(spec, dt, &mut rng)?;
        times.push(i as f64 * dt);
        values.push(level);
    }
    Ok(SubordinatorPath { times, values })
}

/// Event-by-event walker returning first-passage times `L_t` for a
/// nondecreasing sequence of levels `t` along one subordinator path.
///
/// When a passage happens during a drift segment, the walker restarts from
/// the passage point; the waiting time to the next jump is memoryless, so
/// the path law is unchanged.
#[derive(Debug, Clone)]
pub struct PassageSampler {
    model: EventModel,
    op_time: f64,
    level: f64,
    last_query: f64,
}

impl PassageSampler {
    pub fn new(spec: &SubordinatorSpec) -> Result<Self> {
        let model = EventModel::new(spec)?;
        if model.rate == 0.0 && model.drift == 0.0 {
            return Err(invalid("subordinator never moves"));
        }
        Ok(Self { model, op_time: 0.0, level: 0.0, last_query: 0.0 })
    }

    /// Restarts the path at `𝒯_0 = 0`.
    pub fn reset(&mut self) {
        self.op_time = 0.0;
        self.level = 0.0;
        self.last_query = 0.0;
    }

    /// `L_t` on the current path. Levels must be queried in nondecreasing order.
    pub fn passage<R: Rng + ?Sized>(&mut self, t: f64, rng: &mut R) -> Result<f64> {
        if !(t >= self.last_query && t.is_finite()) {
            return Err(Error::Domain(format!(
                "passage levels must be finite and nondecreasing, got {t} after {}",
                self.last_query
            )));
        }
        self.last_query = t;
        let m = &self.model;
        let wait = if m.rate > 0.0 { Some(Exp::new(m.rate).map_err(|e| invalid(e.to_string()))?) } else { None };
        while self.level <= t {
            let w = match &wait {
                Some(d) => d.sample(rng),
                None => f64::INFINITY,
            };
            if m.drift > 0.0 && self.level + m.drift * w > t {
                // passage inside the drift segment
                self.op_time += (t - self.level) / m.drift;
                self.level = t;
                return Ok(self.op_time);
            }
            self.op_time += w;
            self.level += m.drift * w + m.jumps.sample(rng);
        }
        Ok(self.op_time)
    }
}

/// One draw of `L_t`. Stable subordinators use the exact scaling identity
/// `L_t = (t/𝒯_1)^α`; other kinds walk a fresh path.
pub fn sample_inverse_at(spec: &SubordinatorSpec, t: f64, seed: u64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("inverse subordinator needs t > 0, got {t}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec {
        SubordinatorSpec::Stable { alpha } => Ok((alpha * (t.ln() - ln_stable_variate(*alpha, &mut rng))).exp()),
        _ => PassageSampler::new(spec)?.passage(t, &mut rng),
    }
}
