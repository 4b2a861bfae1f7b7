//! `spcorr corr`: closed-form correlations on a grid of `(t, s)`.

use rayon::prelude::*;
use spectral_corr::corrkernel::{
    correlation, inverse_tc_asymptotic, inverse_tc_bounds, CorrelationQuery, Pairing, Regime,
};
use spectral_corr::subordinate::is_long_tailed;

use crate::error::Result;
use crate::output::{csv_writer, num, opt_num};
use crate::params::Params;
use crate::systems::{family_from_params, regime_from_params, with_tolerance};

pub const HEADER: [&str; 10] = ["m", "n", "t", "s", "pairing", "regime", "value", "lower", "upper", "asymptotic"];

/// One output row.
#[derive(Debug, Clone)]
pub struct CorrRow {
    pub query: CorrelationQuery,
    pub value: f64,
    pub bounds: Option<(f64, f64)>,
    pub asymptotic: Option<f64>,
}

pub fn evaluate(p: &Params) -> Result<Vec<CorrRow>> {
    let sys = with_tolerance(family_from_params(p)?, p)?;
    let regime = regime_from_params(p)?;
    let pairing: Pairing = p.str_or("pairing", "PP").parse()?;
    let m: usize = p.required("m")?;
    let n: usize = p.required("n")?;
    let ts: Vec<f64> = p.required_list("t")?;
    let ss: Vec<f64> = p.required_list("s")?;
    let long_tailed = match &regime {
        Regime::Inverse(spec) => is_long_tailed(spec).long_tailed,
        _ => false,
    };
    let queries: Vec<CorrelationQuery> = ts
        .iter()
        .flat_map(|&t| ss.iter().map(move |&s| (t, s)))
        .map(|(t, s)| CorrelationQuery::new(m, n, t, s, pairing, regime.clone()))
        .collect::<spectral_corr::Result<_>>()?;
    let rows = queries
        .into_par_iter()
        .map(|q| {
            let value = correlation(&sys, &q)?;
            let (bounds, asymptotic) = match &q.regime {
                Regime::Inverse(spec) if q.t.min(q.s) > 0.0 => (
                    inverse_tc_bounds(&sys, spec, &q).ok(),
                    if long_tailed { inverse_tc_asymptotic(&sys, spec, &q).ok() } else { None },
                ),
                _ => (None, None),
            };
            Ok(CorrRow { query: q, value, bounds, asymptotic })
        })
        .collect::<spectral_corr::Result<Vec<_>>>()?;
    Ok(rows)
}

pub fn run(p: &Params) -> Result<bool> {
    let rows = evaluate(p)?;
    let output = p.str_or("output", "-");
    let mut w = csv_writer(&output)?;
    w.write_record(HEADER)?;
    for r in &rows {
        let q = &r.query;
        w.write_record([
            q.m.to_string(),
            q.n.to_string(),
            num(q.t),
            num(q.s),
            q.pairing.to_string(),
            q.regime.to_string(),
            num(r.value),
            opt_num(r.bounds.map(|b| b.0)),
            opt_num(r.bounds.map(|b| b.1)),
            opt_num(r.asymptotic),
        ])?;
    }
    w.flush().map_err(|e| crate::error::CliError::io(&output, e))?;
    Ok(true)
}
