//! Run configuration: a JSON file overridden by command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;

use crate::CliError;

/// Seed used when neither a flag nor a config file sets one.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub ns: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub restarts: Option<usize>,
    /// Multiplies computed nuclear norms before checking. Used only to
    /// confirm that the checks detect a wrong value.
    pub tamper_nuclear: Option<f64>,
}

impl Config {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Values from `self` take precedence over `base`.
    pub fn over(self, base: Config) -> Config {
        Config {
            n: self.n.or(base.n),
            p: self.p.or(base.p),
            ns: self.ns.or(base.ns),
            seed: self.seed.or(base.seed),
            samples: self.samples.or(base.samples),
            restarts: self.restarts.or(base.restarts),
            tamper_nuclear: self.tamper_nuclear.or(base.tamper_nuclear),
        }
    }

    pub fn from_file(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Config::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Config, CliError> {
        let obj = v.as_object().ok_or_else(|| CliError::Config("config must be a JSON object".into()))?;
        let mut c = Config::default();
        for (k, val) in obj {
            let bad = || CliError::Config(format!("bad value for `{k}`: {val}"));
            match k.as_str() {
                "n" => c.n = Some(val.as_u64().ok_or_else(bad)? as usize),
                "p" => c.p = Some(val.as_f64().ok_or_else(bad)?),
                "ns" => {
                    let arr = val.as_array().ok_or_else(bad)?;
                    c.ns = Some(arr.iter().map(|x| x.as_u64().map(|u| u as usize).ok_or_else(bad)).collect::<Result<_, _>>()?);
                }
                "seed" => c.seed = Some(val.as_u64().ok_or_else(bad)?),
                "samples" => c.samples = Some(val.as_u64().ok_or_else(bad)? as usize),
                "restarts" => c.restarts = Some(val.as_u64().ok_or_else(bad)? as usize),
                _ => return Err(CliError::Config(format!("unknown config key `{k}`"))),
            }
        }
        Ok(c)
    }

    /// Effective values as strings, for echoing into reports.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("seed".to_string(), self.seed().to_string());
        if let Some(n) = self.n {
            m.insert("n".into(), n.to_string());
        }
        if let Some(p) = self.p {
            m.insert("p".into(), format!("{p:.16e}"));
        }
        if let Some(ns) = &self.ns {
            m.insert("ns".into(), ns.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
        }
        if let Some(s) = self.samples {
            m.insert("samples".into(), s.to_string());
        }
        if let Some(r) = self.restarts {
            m.insert("restarts".into(), r.to_string());
        }
        if let Some(t) = self.tamper_nuclear {
            m.insert("tamper_nuclear".into(), format!("{t:.16e}"));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = Config::from_json(&serde_json::json!({"n": 3, "seed": 9, "ns": [4, 8]})).unwrap();
        let flags = Config { seed: Some(2), ..Config::default() };
        let c = flags.over(file);
        assert_eq!(c.seed(), 2);
        assert_eq!(c.n, Some(3));
        assert_eq!(c.ns, Some(vec![4, 8]));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(Config::from_json(&serde_json::json!({"bogus": 1})).is_err());
        assert!(Config::from_json(&serde_json::json!({"n": "x"})).is_err());
        assert!(Config::from_json(&serde_json::json!([1])).is_err());
    }

    #[test]
    fn default_seed_is_fixed() {
        assert_eq!(Config::default().seed(), DEFAULT_SEED);
    }
}
