//! Resolved command parameters.
//!
//! Every command reads its settings from a string map built as
//! flags > config file > defaults. Each getter records the value it ends up
//! using, defaults included, so the resolved map is a complete echo of the
//! run and can be replayed from a manifest.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, Result};

#[derive(Debug, Default)]
pub struct Params {
    given: BTreeMap<String, String>,
    resolved: RefCell<BTreeMap<String, String>>,
}

impl Params {
    pub fn new(given: BTreeMap<String, String>) -> Self {
        Self { given, resolved: RefCell::new(BTreeMap::new()) }
    }

    pub fn given(&self) -> &BTreeMap<String, String> {
        &self.given
    }

    /// Every parameter read so far with the value used.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        self.resolved.borrow().clone()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.given.insert(key.to_string(), value.into());
    }

    fn record(&self, key: &str, value: &str) {
        self.resolved.borrow_mut().insert(key.to_string(), value.to_string());
    }

    pub fn opt_str(&self, key: &str) -> Option<String> {
        let v = self.given.get(key).cloned();
        if let Some(v) = &v {
            self.record(key, v);
        }
        v
    }

    pub fn str_or(&self, key: &str, default: &str) -> String {
        let v = self.given.get(key).map_or(default, String::as_str).to_string();
        self.record(key, &v);
        v
    }

    pub fn required_str(&self, key: &str) -> Result<String> {
        self.opt_str(key).ok_or_else(|| CliError::param(key, "is required"))
    }

    pub fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.opt_str(key).map(|v| parse_value(key, &v)).transpose()
    }

    pub fn or<T: FromStr>(&self, key: &str, default: &str) -> Result<T> {
        parse_value(key, &self.str_or(key, default))
    }

    pub fn required<T: FromStr>(&self, key: &str) -> Result<T> {
        parse_value(key, &self.required_str(key)?)
    }

    /// Comma-separated list.
    pub fn list_or<T: FromStr>(&self, key: &str, default: &str) -> Result<Vec<T>> {
        parse_list(key, &self.str_or(key, default))
    }

    pub fn required_list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        parse_list(key, &self.required_str(key)?)
    }
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::param(key, format!("cannot parse `{raw}` as {}", std::any::type_name::<T>())))
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
    let items: Vec<T> = raw
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_value(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(CliError::param(key, "the list is empty"));
    }
    Ok(items)
}

/// Reads a `key = value` file; `#` starts a comment.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text).map_err(|(line, message)| CliError::Config { path: path.into(), line, message })
}

pub fn parse_config(text: &str) -> std::result::Result<BTreeMap<String, String>, (usize, String)> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or((i + 1, format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err((i + 1, "empty key".into()));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}
