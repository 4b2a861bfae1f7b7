//! `spcorr estimate`: empirical condition numbers and the three verdicts on
//! a sample file.
//!
//! The input is a `path_id,t,value` CSV (as written by `simulate`) holding
//! the same time grid for every path. `κ̂` uses the values at the first time
//! across paths (or the whole record when there is a single path). The
//! jump-activity classifier runs on the `κ̂` table of the first accepted
//! candidate, or of the first candidate when none is accepted; the
//! range-dependence classifier runs on `g_{λ_m}` from that system, or on a
//! `k,g` sequence given with `--g-input`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use spectral_corr::inference::{
    g_lambda, jump_activity_classifier, kappa_hat, range_dependence_classifier, symmetry_test, ClassifierVerdict,
    EstimationResult,
};
use spectral_corr::measures::condition_number;
use spectral_corr::EigenSystem;

use crate::error::{CliError, Result};
use crate::output::write_json;
use crate::params::Params;
use crate::systems::{parse_family, with_tolerance};

/// A sample: `values[path][time]` on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    pub grid: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

fn field<'a>(rec: &'a csv::StringRecord, i: usize, name: &str, path: &Path) -> Result<&'a str> {
    rec.get(i).ok_or_else(|| CliError::MalformedCsv {
        path: path.into(),
        line: rec.position().map_or(0, |p| p.line()),
        column: name.into(),
        message: "missing field".into(),
    })
}

fn parse_f64(raw: &str, rec: &csv::StringRecord, name: &str, path: &Path) -> Result<f64> {
    raw.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| CliError::MalformedCsv {
        path: path.into(),
        line: rec.position().map_or(0, |p| p.line()),
        column: name.into(),
        message: format!("`{raw}` is not a finite number"),
    })
}

fn column_index(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers.iter().position(|h| h.trim() == name).ok_or_else(|| CliError::MalformedCsv {
        path: path.into(),
        line: 1,
        column: name.into(),
        message: format!("header must contain `{name}`"),
    })
}

/// Reads a `path_id,t,value` file.
pub fn read_sample(path: &Path) -> Result<SampleMatrix> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Usage(format!("{}: {other:?}", path.display())),
    })?;
    let headers = rdr.headers()?.clone();
    let (ip, it, iv) =
        (column_index(&headers, "path_id", path)?, column_index(&headers, "t", path)?, column_index(&headers, "value", path)?);
    let mut rows: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let raw_id = field(&rec, ip, "path_id", path)?;
        let id: u64 = raw_id.trim().parse().map_err(|_| CliError::MalformedCsv {
            path: path.into(),
            line: rec.position().map_or(0, |p| p.line()),
            column: "path_id".into(),
            message: format!("`{raw_id}` is not a nonnegative integer"),
        })?;
        let t = parse_f64(field(&rec, it, "t", path)?, &rec, "t", path)?;
        let v = parse_f64(field(&rec, iv, "value", path)?, &rec, "value", path)?;
        rows.entry(id).or_default().push((t, v));
    }
    let mut grid: Option<Vec<f64>> = None;
    let mut values = Vec::with_capacity(rows.len());
    for (id, mut row) in rows {
        row.sort_by(|a, b| a.0.total_cmp(&b.0));
        let times: Vec<f64> = row.iter().map(|r| r.0).collect();
        match &grid {
            None => grid = Some(times),
            Some(g) if *g != times => {
                return Err(CliError::Usage(format!(
                    "{}: path {id} is observed on a different time grid than the first path",
                    path.display()
                )))
            }
            Some(_) => {}
        }
        values.push(row.into_iter().map(|r| r.1).collect());
    }
    let grid = grid.ok_or_else(|| CliError::Usage(format!("{}: no data rows", path.display())))?;
    Ok(SampleMatrix { grid, values })
}

/// Reads a `k,g` sequence.
pub fn read_g_sequence(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let headers = rdr.headers()?.clone();
    let (ik, ig) = (column_index(&headers, "k", path)?, column_index(&headers, "g", path)?);
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            Ok((parse_f64(field(&rec, ik, "k", path)?, &rec, "k", path)?, parse_f64(field(&rec, ig, "g", path)?, &rec, "g", path)?))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaEntry {
    pub family: String,
    pub m: usize,
    pub kappa: Option<f64>,
    pub kappa_hat: Option<EstimationResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// A verdict or the reason it could not be produced.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Verdict(ClassifierVerdict),
    Skipped { skipped: String },
}

impl Outcome {
    pub fn label(&self) -> Option<&str> {
        match self {
            Outcome::Verdict(v) => Some(&v.label),
            Outcome::Skipped { .. } => None,
        }
    }
}

impl From<spectral_corr::Result<ClassifierVerdict>> for Outcome {
    fn from(r: spectral_corr::Result<ClassifierVerdict>) -> Self {
        match r {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Skipped { skipped: e.to_string() },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub paths: usize,
    pub times: usize,
    pub index: usize,
    pub kappa_table: Vec<KappaEntry>,
    pub symmetry: ClassifierVerdict,
    pub system_used: String,
    pub range_dependence: Outcome,
    pub jump_activity: Outcome,
}

pub fn estimate(p: &Params) -> Result<EstimateReport> {
    let input = p.required_str("input")?;
    let sample = read_sample(Path::new(&input))?;
    let candidates: Vec<EigenSystem> = split_families(&p.str_or("candidates", "classical:1,smallpert:2"))
        .into_iter()
        .map(|s| parse_family(&s).and_then(|sys| with_tolerance(sys, p)))
        .collect::<Result<_>>()?;
    if candidates.is_empty() {
        return Err(CliError::param("candidates", "no candidate families given"));
    }
    let indices: Vec<usize> = p.list_or("m", "1,2,3,4,5,6")?;
    let index = indices[0];
    let j: usize = p.or("j", "0")?;
    let eps: Option<f64> = p.opt("eps")?;

    let stationary: Vec<f64> = if sample.values.len() == 1 {
        sample.values[0].clone()
    } else {
        sample.values.iter().map(|row| row[0]).collect()
    };
    let symmetry = symmetry_test(&candidates, &stationary, index, eps)?;
    let chosen = candidates
        .iter()
        .find(|c| symmetry.accepted.contains(&c.family().to_string()))
        .unwrap_or(&candidates[0]);

    let mut kappa_table = Vec::new();
    for sys in &candidates {
        for &m in &indices {
            let (kappa, hat) = (condition_number(sys, m), kappa_hat(sys, &stationary, m));
            let error = [kappa.as_ref().err(), hat.as_ref().err()].into_iter().flatten().next().map(|e| e.to_string());
            kappa_table.push(KappaEntry {
                family: sys.family().to_string(),
                m,
                kappa: kappa.ok(),
                kappa_hat: hat.ok(),
                error,
            });
        }
    }
    let chosen_name = chosen.family().to_string();
    let jump_points: Vec<(f64, f64, f64)> = kappa_table
        .iter()
        .filter(|e| e.family == chosen_name)
        .filter_map(|e| e.kappa_hat.as_ref().map(|h| (e.m as f64, h.estimate, h.standard_error)))
        .collect();
    let jump_activity = jump_activity_classifier(&jump_points).into();

    let range_dependence = match p.opt_str("g-input") {
        Some(path) => range_dependence_classifier(&read_g_sequence(Path::new(&path))?).into(),
        None => match g_lambda(chosen, &sample.values, index, j) {
            Ok(lags) => {
                let points: Vec<(f64, f64)> = lags
                    .iter()
                    .filter_map(|l| l.estimate.as_ref().map(|e| (sample.grid[l.k] - sample.grid[j], e.estimate)))
                    .collect();
                range_dependence_classifier(&points).into()
            }
            Err(e) => Outcome::Skipped { skipped: e.to_string() },
        },
    };

    Ok(EstimateReport {
        paths: sample.values.len(),
        times: sample.grid.len(),
        index,
        kappa_table,
        symmetry,
        system_used: chosen_name,
        range_dependence,
        jump_activity,
    })
}

/// Splits `classical:1,smallpert:2,gausslag:0.6,1` at commas that start a
/// new family name.
fn split_families(list: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for piece in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match out.last_mut() {
            Some(last) if piece.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '.') => {
                last.push(',');
                last.push_str(piece);
            }
            _ => out.push(piece.to_string()),
        }
    }
    out
}

pub fn run(p: &Params) -> Result<bool> {
    let report = estimate(p)?;
    write_json(&p.str_or("output", "-"), &report)?;
    Ok(true)
}
