//! Flat `key = value` text configuration.
//!
//! ```text
//! # mode frequencies and pump
//! omega_a = 1.0
//! omega_b = 1.0
//! g = 1.0
//! omega = 4.449489742783178
//! ```
//!
//! Blank lines and `#` comments are ignored. Keys are unique.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                reason: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    reason: "empty key".into(),
                });
            }
            if entries
                .insert(key.to_string(), (line_no, value.trim().to_string()))
                .is_some()
            {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn insert(&mut self, key: &str, value: impl ToString) {
        let line = self.entries.len() + 1;
        self.entries.insert(key.to_string(), (line, value.to_string()));
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    /// Parsed value of `key`, `None` when absent.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|e: T::Err| Error::Parse {
                line: *line,
                reason: format!("`{key}`: {e}"),
            }),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)?.ok_or_else(|| Error::Parse {
            line: 0,
            reason: format!("missing key `{key}`"),
        })
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| k.as_str())
    }

    /// Serialized form, keys in sorted order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, (_, v)) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

/// Reads `omega_a`, `omega_b`, `g`, `omega`.
pub fn params_from_kv(kv: &KeyValues) -> Result<ModelParams> {
    ModelParams::new(
        kv.require("omega_a")?,
        kv.require("omega_b")?,
        kv.require("g")?,
        kv.require("omega")?,
    )
}

pub fn params_to_kv(p: &ModelParams) -> KeyValues {
    let mut kv = KeyValues::default();
    kv.insert("omega_a", p.omega_a());
    kv.insert("omega_b", p.omega_b());
    kv.insert("g", p.g());
    kv.insert("omega", p.pump_frequency());
    kv
}

pub fn parse_params(text: &str) -> Result<ModelParams> {
    params_from_kv(&KeyValues::parse(text)?)
}

pub fn params_to_text(p: &ModelParams) -> String {
    params_to_kv(p).to_text()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_with_comments() {
        let p = parse_params("# pump\nomega_a = 1.5\nomega_b=0.5 # idler\n\ng = 2\nomega = 3.0\n").unwrap();
        assert_eq!(p.omega_a(), 1.5);
        assert_eq!(p.g(), 2.0);
        assert_eq!(p.detuning(), 1.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match KeyValues::parse("a = 1\nbroken\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(KeyValues::parse("a = 1\na = 2").is_err());
        assert!(parse_params("omega_a = 1\nomega_b = 1\ng = x\nomega = 2").is_err());
        assert!(parse_params("omega_a = 1\nomega_b = 1\ng = 1").is_err());
        assert!(parse_params("omega_a = 1\nomega_b = 1\ng = -1\nomega = 2").is_err());
    }

    proptest! {
        #[test]
        fn round_trip(wa in 0.01f64..10.0, wb in 0.01f64..10.0, g in 0.01f64..5.0, w in -20.0f64..20.0) {
            let p = ModelParams::new(wa, wb, g, w).unwrap();
            let q = parse_params(&params_to_text(&p)).unwrap();
            prop_assert_eq!(p.omega_a(), q.omega_a());
            prop_assert_eq!(p.omega_b(), q.omega_b());
            prop_assert_eq!(p.g(), q.g());
            prop_assert_eq!(p.pump_frequency(), q.pump_frequency());
        }
    }
}
