//! Monte-Carlo ensembles of the CIR diffusion under the three clocks.
//!
//! The CIR process `dX = (β + σ² - X)dt + √(2σ²X) dW` has generator
//! `σ²x f'' + (β + σ² - x) f'` and stationary law `Gamma((β+σ²)/σ², σ²)`,
//! which is `γ_β` for `σ² = 1`. Its transition over an operational time
//! `τ` is sampled exactly through the Poisson–Gamma mixture form of the
//! noncentral chi-squared law:
//!
//! ```text
//! c = σ²(1 - e^{-τ})/2,   N ~ Poisson(X e^{-τ} / (2c)),   X' = 2c · Gamma((β+σ²)/σ² + N, 1)
//! ```
//!
//! Every path starts from the stationary law at calendar time 0 and is
//! chained forward through the operational times of the grid: `t_i` itself
//! (Markov), `𝒯_{t_i}` (Bochner), or `L_{t_i}` (inverse subordinator). Both
//! clocks are nondecreasing, so one CIR trajectory per path serves all grid
//! times.
//!
//! Path `p` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `p`, so the
//! ensemble depends only on the master seed and never on the worker count.

use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, Normal, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::corrkernel::Regime;
use crate::error::{invalid, Result};
use crate::inference::{empirical_corr, EstimationResult};
use crate::subordinate::{sample_increment, PassageSampler, SubordinatorSpec};
use crate::system::EigenSystem;

/// Poisson means above this use the normal approximation (the skewness
/// `mean^{-1/2}` is then below 1e-6, and `rand_distr` rejects means near
/// `u64::MAX`).
const POISSON_NORMAL_CUTOFF: f64 = 1e12;

/// Simulation parameters.
#[derive(Debug, Clone, Serialize)]
pub struct SimConfig {
    pub paths: usize,
    pub seed: u64,
    /// Sorted, nonnegative calendar times.
    pub grid: Vec<f64>,
    pub regime: Regime,
    pub beta: f64,
    pub sigma2: f64,
}

impl SimConfig {
    /// Markov ensemble with `σ² = 1`.
    pub fn new(paths: usize, seed: u64, grid: Vec<f64>, beta: f64) -> Result<Self> {
        let config = Self { paths, seed, grid, regime: Regime::Markov, beta, sigma2: 1.0 };
        config.validate()?;
        Ok(config)
    }

    pub fn with_regime(mut self, regime: Regime) -> Self {
        self.regime = regime;
        self
    }

    pub fn with_sigma2(mut self, sigma2: f64) -> Result<Self> {
        self.sigma2 = sigma2;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(invalid("at least one path is required"));
        }
        if self.grid.is_empty() {
            return Err(invalid("the time grid is empty"));
        }
        if self.grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(invalid("grid times must be finite and >= 0"));
        }
        if self.grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("the time grid must be sorted"));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(invalid(format!("CIR simulation needs beta > 0, got {}", self.beta)));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(invalid(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        Ok(())
    }

    fn shape(&self) -> f64 {
        (self.beta + self.sigma2) / self.sigma2
    }
}

/// A simulated ensemble: `values[p][i]` is path `p` at `grid[i]`, observed
/// at the operational time `clock[p][i]`.
#[derive(Debug, Clone, Serialize)]
pub struct SamplePathSet {
    pub values: Vec<Vec<f64>>,
    pub clock: Vec<Vec<f64>>,
    pub grid: Vec<f64>,
    pub config: SimConfig,
    /// RNG stream of each path.
    pub substreams: Vec<u64>,
}

impl SamplePathSet {
    /// Values at grid index `i` across paths.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[i]).collect()
    }
}

/// Exact CIR transition over operational time `tau`.
#[derive(Debug, Clone, Copy)]
struct CirTransition {
    shape: f64,
    sigma2: f64,
}

impl CirTransition {
    fn step<R: rand::Rng + ?Sized>(&self, x: f64, tau: f64, rng: &mut R) -> Result<f64> {
        if tau <= 0.0 {
            return Ok(x);
        }
        let c = 0.5 * self.sigma2 * (-tau).exp_m1().abs();
        let mean = x * (-tau).exp() / (2.0 * c);
        let n = if mean <= 0.0 {
            0.0
        } else if mean > POISSON_NORMAL_CUTOFF {
            let z: f64 = Normal::new(mean, mean.sqrt()).map_err(|e| invalid(e.to_string()))?.sample(rng);
            z.round().max(0.0)
        } else {
            Poisson::new(mean).map_err(|e| invalid(format!("Poisson({mean}): {e}")))?.sample(rng)
        };
        let g = Gamma::new(self.shape + n, 1.0).map_err(|e| invalid(e.to_string()))?.sample(rng);
        Ok(2.0 * c * g)
    }

    fn stationary<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        Ok(self.sigma2 * Gamma::new(self.shape, 1.0).map_err(|e| invalid(e.to_string()))?.sample(rng))
    }
}

fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// Runs one CIR chain per path through operational times produced by
/// `clock(path_rng, grid)`.
fn run<C>(config: SimConfig, clock: C) -> Result<SamplePathSet>
where
    C: Fn(&mut ChaCha8Rng, &[f64]) -> Result<Vec<f64>> + Sync,
{
    config.validate()?;
    let cir = CirTransition { shape: config.shape(), sigma2: config.sigma2 };
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..config.paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = path_rng(config.seed, p);
            let ops = clock(&mut rng, &config.grid)?;
            let mut x = cir.stationary(&mut rng)?;
            let mut prev = 0.0;
            let mut values = Vec::with_capacity(ops.len());
            for &op in &ops {
                x = cir.step(x, op - prev, &mut rng)?;
                prev = op;
                values.push(x);
            }
            Ok((values, ops))
        })
        .collect::<Result<_>>()?;
    let (values, clock): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    Ok(SamplePathSet {
        values,
        clock,
        grid: config.grid.clone(),
        substreams: (0..config.paths as u64).collect(),
        config,
    })
}

/// Stationary CIR ensemble on the calendar clock.
pub fn simulate_cir_stationary(config: &SimConfig) -> Result<SamplePathSet> {
    let config = config.clone().with_regime(Regime::Markov);
    run(config, |_, grid| Ok(grid.to_vec()))
}

/// `X_{𝒯_t}` with `𝒯` an independent subordinator; increments of `𝒯`
/// between grid times are drawn exactly.
pub fn simulate_bochner(config: &SimConfig, spec: &SubordinatorSpec) -> Result<SamplePathSet> {
    let config = config.clone().with_regime(Regime::Bochner(spec.clone()));
    run(config, |rng, grid| {
        let mut level = 0.0;
        let mut prev = 0.0;
        grid.iter()
            .map(|&t| {
                level += sample_increment(spec, t - prev, rng)?;
                prev = t;
                Ok(level)
            })
            .collect()
    })
}

/// `X_{L_t}` with `L` the inverse of an independent subordinator; `L` at the
/// grid times comes from one event-by-event walk of `𝒯` per path.
pub fn simulate_inverse_tc(config: &SimConfig, spec: &SubordinatorSpec) -> Result<SamplePathSet> {
    let config = config.clone().with_regime(Regime::Inverse(spec.clone()));
    let template = PassageSampler::new(spec)?;
    run(config, |rng, grid| {
        let mut walker = template.clone();
        grid.iter().map(|&t| walker.passage(t, rng)).collect()
    })
}

/// Dispatches on `config.regime`.
pub fn simulate(config: &SimConfig) -> Result<SamplePathSet> {
    match &config.regime {
        Regime::Markov => simulate_cir_stationary(config),
        Regime::Bochner(spec) => simulate_bochner(config, spec),
        Regime::Inverse(spec) => simulate_inverse_tc(config, spec),
    }
}

/// Empirical `ρ(𝒫_m(X_t), 𝒫_m(X_s))` across paths.
#[derive(Debug, Clone, Serialize)]
pub struct LagCorrelation {
    pub s: f64,
    pub t: f64,
    pub m: usize,
    pub estimate: EstimationResult,
}

/// Ensemble correlation of `𝒫_m` between the first grid time and every
/// later grid time, with block-jackknife standard errors.
pub fn lag_correlations(set: &SamplePathSet, sys: &EigenSystem, m: usize) -> Result<Vec<LagCorrelation>> {
    let transformed: Vec<Vec<f64>> = (0..set.grid.len())
        .map(|i| set.values.iter().map(|row| sys.eigen_p(m, row[i])).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let s = set.grid[0];
    (1..set.grid.len())
        .map(|i| {
            Ok(LagCorrelation { s, t: set.grid[i], m, estimate: empirical_corr(&transformed[i], &transformed[0])? })
        })
        .collect()
}
