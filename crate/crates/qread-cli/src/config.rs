//! Config-file merging and grid-expression parsing.
//!
//! A JSON config file (`--config run.json`) holds a flat object keyed by
//! long flag names (`{"eta-b": 0.9, "grid": "0:1:101"}`); flags given on the
//! command line win over config values, which win over built-in defaults.
//! Each command takes the keys it understands out of the bag and whatever is
//! left over is rejected, so a typoed key fails loudly instead of silently
//! running with defaults.

use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::error::CliError;

/// The parsed config file, consumed key by key.
#[derive(Debug, Default)]
pub struct ConfigBag {
    map: serde_json::Map<String, Value>,
}

impl ConfigBag {
    /// Loads a config file, or an empty bag when no path is given.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigBag::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|err| CliError::usage(format!("cannot read config {}: {err}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|err| CliError::usage(format!("config {}: {err}", path.display())))?;
        match value {
            Value::Object(map) => Ok(ConfigBag { map }),
            _ => Err(CliError::usage(format!(
                "config {}: expected a JSON object mapping flag names to values",
                path.display()
            ))),
        }
    }

    /// Parses config text directly; `load` goes through here.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: Value =
            serde_json::from_str(text).map_err(|err| CliError::usage(format!("config: {err}")))?;
        match value {
            Value::Object(map) => Ok(ConfigBag { map }),
            _ => Err(CliError::usage(
                "config: expected a JSON object mapping flag names to values",
            )),
        }
    }

    /// Takes a real-valued key.
    pub fn take_f64(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(Value::Number(n)) => match n.as_f64() {
                Some(v) => Ok(Some(v)),
                None => Err(bad_value(key, "a finite number", &Value::Number(n))),
            },
            Some(other) => Err(bad_value(key, "a number", &other)),
        }
    }

    /// Takes a non-negative integer key.
    pub fn take_u64(&mut self, key: &str) -> Result<Option<u64>, CliError> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(Value::Number(n)) => match n.as_u64() {
                Some(v) => Ok(Some(v)),
                None => Err(bad_value(key, "a non-negative integer", &Value::Number(n))),
            },
            Some(other) => Err(bad_value(key, "a non-negative integer", &other)),
        }
    }

    /// Takes a string key (grids, enums, and paths all arrive as strings).
    pub fn take_string(&mut self, key: &str) -> Result<Option<String>, CliError> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(bad_value(key, "a string", &other)),
        }
    }

    /// Rejects any keys no command consumed.
    pub fn finish(self) -> Result<(), CliError> {
        if self.map.is_empty() {
            return Ok(());
        }
        let keys: Vec<&str> = self.map.keys().map(String::as_str).collect();
        Err(CliError::usage(format!(
            "unknown config key(s): {}",
            keys.join(", ")
        )))
    }
}

fn bad_value(key: &str, expected: &str, got: &Value) -> CliError {
    CliError::usage(format!("config key `{key}`: expected {expected}, got {got}"))
}

/// Expands a grid expression into its points.
///
/// The expression is a comma-separated list of pieces, each either a single
/// number or an inclusive linear span `start:stop:count` with `count >= 2`:
/// `"0:0.2:11"` is 0, 0.02, ..., 0.20 and `"10,20,0:1:3"` is 10, 20, 0, 0.5,
/// 1. Points come out in the order written; callers that need ordering sort
/// afterwards.
pub fn parse_grid(expression: &str) -> Result<Vec<f64>, CliError> {
    let mut points = Vec::new();
    for piece in expression.split(',') {
        let piece = piece.trim();
        if piece.contains(':') {
            let parts: Vec<&str> = piece.split(':').collect();
            if parts.len() != 3 {
                return Err(CliError::usage(format!(
                    "grid element `{piece}`: expected start:stop:count"
                )));
            }
            let start = parse_number(parts[0], piece)?;
            let stop = parse_number(parts[1], piece)?;
            let count: usize = parts[2].trim().parse().map_err(|_| {
                CliError::usage(format!("grid element `{piece}`: count must be an integer"))
            })?;
            if count < 2 {
                return Err(CliError::usage(format!(
                    "grid element `{piece}`: a span needs at least two points"
                )));
            }
            for i in 0..count {
                if i == count - 1 {
                    points.push(stop);
                } else {
                    points.push(start + (stop - start) * i as f64 / (count - 1) as f64);
                }
            }
        } else {
            points.push(parse_number(piece, piece)?);
        }
    }
    Ok(points)
}

fn parse_number(text: &str, piece: &str) -> Result<f64, CliError> {
    let value: f64 = text.trim().parse().map_err(|_| {
        CliError::usage(format!("grid element `{piece}`: `{text}` is not a number"))
    })?;
    if !value.is_finite() {
        return Err(CliError::usage(format!(
            "grid element `{piece}`: `{text}` is not finite"
        )));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_hit_both_endpoints_exactly() {
        let grid = parse_grid("0:0.2:11").unwrap();
        assert_eq!(grid.len(), 11);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[10], 0.2);
        assert!((grid[3] - 0.06).abs() < 1e-15);
    }

    #[test]
    fn lists_and_spans_mix() {
        let grid = parse_grid("10, 20 ,0:1:3").unwrap();
        assert_eq!(grid, vec![10.0, 20.0, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn malformed_expressions_are_usage_errors() {
        for bad in ["", "1:2", "1:2:3:4", "a", "0:1:1", "0:1:x", "1e999"] {
            let err = parse_grid(bad).unwrap_err();
            assert_eq!(err.exit_code(), 2, "`{bad}` should be a usage error");
        }
    }

    #[test]
    fn config_bag_types_are_checked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        fs::write(&path, r#"{"eta-b": 0.5, "probes": 3, "grid": "0:1:5", "bogus": 1}"#).unwrap();
        let mut bag = ConfigBag::load(Some(&path)).unwrap();
        assert_eq!(bag.take_f64("eta-b").unwrap(), Some(0.5));
        assert_eq!(bag.take_u64("probes").unwrap(), Some(3));
        assert_eq!(bag.take_string("grid").unwrap().as_deref(), Some("0:1:5"));
        assert_eq!(bag.take_f64("missing").unwrap(), None);
        let err = bag.finish().unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn config_bag_rejects_wrong_types_and_shapes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        fs::write(&path, r#"{"probes": -1}"#).unwrap();
        let mut bag = ConfigBag::load(Some(&path)).unwrap();
        assert_eq!(bag.take_u64("probes").unwrap_err().exit_code(), 2);

        fs::write(&path, "[1, 2]").unwrap();
        assert_eq!(ConfigBag::load(Some(&path)).unwrap_err().exit_code(), 2);

        fs::write(&path, "not json").unwrap();
        assert_eq!(ConfigBag::load(Some(&path)).unwrap_err().exit_code(), 2);
    }
}
