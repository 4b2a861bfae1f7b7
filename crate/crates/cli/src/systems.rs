//! Eigen systems and clocks from command parameters.

use spectral_corr::corrkernel::Regime;
use spectral_corr::measures::QuadTolerance;
use spectral_corr::{EigenSystem, SubordinatorSpec};

use crate::error::{CliError, Result};
use crate::params::Params;

/// `classical:β`, `smallpert:b` or `gausslag:α,b`.
pub fn parse_family(spec: &str) -> Result<EigenSystem> {
    let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
    let nums: Vec<f64> = args
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("cannot parse the parameters of family `{spec}`")))?;
    let sys = match (kind.trim(), nums.as_slice()) {
        ("classical", [beta]) => EigenSystem::classical(*beta)?,
        ("smallpert", [b]) => EigenSystem::small_perturbation(*b)?,
        ("gausslag", [alpha, b]) => EigenSystem::gauss_laguerre(*alpha, *b)?,
        _ => {
            return Err(CliError::Usage(format!(
                "unknown family `{spec}`; expected classical:BETA, smallpert:B or gausslag:ALPHA,B"
            )))
        }
    };
    Ok(sys)
}

/// The system named by `--family` and its parameter flags.
pub fn family_from_params(p: &Params) -> Result<EigenSystem> {
    let family = p.str_or("family", "classical");
    let spec = match family.as_str() {
        "classical" => format!("classical:{}", p.str_or("beta", "1")),
        "smallpert" => format!("smallpert:{}", p.str_or("b", "2")),
        "gausslag" => format!("gausslag:{},{}", p.str_or("alpha", "0.6"), p.str_or("b", "1")),
        other => {
            return Err(CliError::param(
                "family",
                format!("unknown family `{other}`; expected classical, smallpert or gausslag"),
            ))
        }
    };
    parse_family(&spec)
}

/// The quadrature tolerance from `--tolerance`, applied as both the
/// relative and the absolute accuracy of condition numbers and cosines.
pub fn with_tolerance(sys: EigenSystem, p: &Params) -> Result<EigenSystem> {
    match p.opt::<f64>("tolerance")? {
        Some(tol) if tol > 0.0 && tol.is_finite() => Ok(sys.with_tolerance(QuadTolerance { abs: tol, rel: tol })?),
        Some(tol) => Err(CliError::param("tolerance", format!("must be positive and finite, got {tol}"))),
        None => Ok(sys),
    }
}

/// `--regime` with `--sub` where the regime needs one.
pub fn regime_from_params(p: &Params) -> Result<Regime> {
    let regime = p.str_or("regime", "markov");
    let sub = p.opt_str("sub");
    let spec = |name: &str| -> Result<SubordinatorSpec> {
        let s = sub.as_deref().ok_or_else(|| {
            CliError::param("sub", format!("regime `{name}` needs --sub KIND:PARAM, e.g. stable:0.5 or poisson:2"))
        })?;
        Ok(s.parse()?)
    };
    match regime.as_str() {
        "markov" => {
            if sub.is_some() {
                return Err(CliError::param("sub", "the markov regime has no subordinator; drop --sub"));
            }
            Ok(Regime::Markov)
        }
        "bochner" => Ok(Regime::Bochner(spec("bochner")?)),
        "inverse" => Ok(Regime::Inverse(spec("inverse")?)),
        other => Err(CliError::param("regime", format!("unknown regime `{other}`; expected markov, bochner or inverse"))),
    }
}
