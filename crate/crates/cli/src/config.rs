//! Resolution of command settings: flags override the optional `--config` file, which
//! overrides built-in defaults.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::UsageError;

/// Overlays `file` (a JSON object) and then `flags` onto the serialized `defaults`.
///
/// Unknown keys in the file are rejected so that typos do not silently fall back to defaults.
pub fn resolve<C>(defaults: C, file: Option<&Path>, flags: Value) -> anyhow::Result<C>
where
    C: Serialize + DeserializeOwned,
{
    let Value::Object(mut merged) = serde_json::to_value(defaults)? else {
        unreachable!("configs serialize to objects");
    };
    if let Some(path) = file {
        let text = fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| UsageError(format!("config {} is not valid JSON: {e}", path.display())))?;
        let Value::Object(obj) = value else {
            return Err(UsageError(format!("config {} must be a JSON object", path.display())).into());
        };
        overlay(&mut merged, obj, Some(path))?;
    }
    if let Value::Object(obj) = flags {
        overlay(&mut merged, obj, None)?;
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| UsageError(format!("invalid settings: {e}")).into())
}

fn overlay(base: &mut Map<String, Value>, top: Map<String, Value>, origin: Option<&Path>) -> anyhow::Result<()> {
    for (k, v) in top {
        if !base.contains_key(&k) {
            let at = origin.map(|p| format!(" in {}", p.display())).unwrap_or_default();
            return Err(UsageError(format!("unknown setting '{k}'{at}")).into());
        }
        base.insert(k, v);
    }
    Ok(())
}

/// A grid size written `RxS` (or a single `R` for a square grid).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSize {
    pub rows: usize,
    pub cols: usize,
}

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| format!("invalid grid size '{s}' (expected e.g. 32x32)"))
        };
        match s.split_once(['x', 'X']) {
            Some((r, c)) => Ok(Self {
                rows: parse(r)?,
                cols: parse(c)?,
            }),
            None => {
                let n = parse(s)?;
                Ok(Self { rows: n, cols: n })
            }
        }
    }
}

impl fmt::Display for GridSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

impl Serialize for GridSize {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GridSize {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `a,b` as an alpha pair.
pub fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("invalid pair '{s}': {e}"))?;
    match v.as_slice() {
        [a] => Ok([*a, *a]),
        [a, b] => Ok([*a, *b]),
        _ => Err(format!("expected one or two numbers, got '{s}'")),
    }
}
