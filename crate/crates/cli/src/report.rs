//! Experiment reports and their JSON and CSV forms.
//!
//! JSON numbers are written as decimal strings with 17 significant digits
//! so they round-trip exactly. The timestamp and wall time are the only
//! nondeterministic fields and live in the separate `metadata` block.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

use crate::CliError;

pub const REPORT_SCHEMA_VERSION: &str = "1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn parse_num(s: &str) -> Result<f64, CliError> {
    match s {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| CliError::Schema(format!("not a number: {s}"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub stderr: Option<f64>,
}

impl Quantity {
    pub fn bracket(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Quantity { name: name.into(), lower, upper, stderr: None }
    }

    pub fn value(name: impl Into<String>, v: f64) -> Self {
        Quantity { name: name.into(), lower: v, upper: v, stderr: None }
    }

    pub fn estimate(name: impl Into<String>, mean: f64, stderr: f64) -> Self {
        Quantity { name: name.into(), lower: mean, upper: mean, stderr: Some(stderr) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// |value − target| ≤ tolerance · max(1, |target|).
    Near,
    /// value ≤ target + tolerance.
    AtMost,
    /// value ≥ target − tolerance.
    AtLeast,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Near => "~=",
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "~=" => Ok(Relation::Near),
            "<=" => Ok(Relation::AtMost),
            ">=" => Ok(Relation::AtLeast),
            _ => Err(CliError::Schema(format!("unknown relation {s}"))),
        }
    }
}

/// One asserted comparison. `margin` is the slack in units of the allowed
/// error; it is ≥ 0 exactly when the check passes.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, target: f64, tolerance: f64) -> Self {
        let pass = match relation {
            Relation::Near => (value - target).abs() <= tolerance * target.abs().max(1.0),
            Relation::AtMost => value <= target + tolerance,
            Relation::AtLeast => value >= target - tolerance,
        };
        Check { name: name.into(), value, relation, target, tolerance, pass }
    }

    pub fn near(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Check::new(name, value, Relation::Near, target, tol)
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        Check::new(name, value, Relation::AtMost, bound, tol)
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        Check::new(name, value, Relation::AtLeast, bound, tol)
    }

    /// A structural condition, reported as 1 (holds) or 0 against target 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check::new(name, if ok { 1.0 } else { 0.0 }, Relation::Near, 1.0, 0.0)
    }

    pub fn margin(&self) -> f64 {
        let allowed = match self.relation {
            Relation::Near => self.tolerance * self.target.abs().max(1.0),
            _ => self.tolerance,
        };
        let slack = match self.relation {
            Relation::Near => allowed - (self.value - self.target).abs(),
            Relation::AtMost => self.target + self.tolerance - self.value,
            Relation::AtLeast => self.value - self.target + self.tolerance,
        };
        if allowed > 0.0 {
            slack / allowed
        } else if self.pass {
            0.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {:.10} {} {:.10} (tol {:.1e})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.relation.symbol(),
            self.target,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub claim: String,
    pub config: BTreeMap<String, String>,
    pub quantities: Vec<Quantity>,
    pub checks: Vec<Check>,
    pub details: Value,
    pub timestamp_unix: u64,
    pub wall_time_seconds: f64,
}

impl ExperimentReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// The failing check with the least slack, or else the tightest check.
    pub fn headline(&self) -> Option<&Check> {
        self.checks.iter().min_by(|a, b| a.margin().partial_cmp(&b.margin()).unwrap_or(std::cmp::Ordering::Equal))
    }

    /// All fields except `metadata`.
    pub fn body_json(&self) -> Value {
        let quantities: Vec<Value> = self
            .quantities
            .iter()
            .map(|q| {
                json!({
                    "name": q.name,
                    "lower": num(q.lower),
                    "upper": num(q.upper),
                    "stderr": q.stderr.map(num),
                })
            })
            .collect();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "value": num(c.value),
                    "relation": c.relation.symbol(),
                    "target": num(c.target),
                    "tolerance": num(c.tolerance),
                    "pass": c.pass,
                })
            })
            .collect();
        json!({
            "report_schema_version": REPORT_SCHEMA_VERSION,
            "tool_version": TOOL_VERSION,
            "sampler_version": tensor_gauge::seeds::SAMPLER_VERSION,
            "experiment": self.experiment,
            "claim": self.claim,
            "config": self.config,
            "quantities": quantities,
            "checks": checks,
            "pass": self.pass(),
            "details": self.details,
        })
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.body_json();
        v.as_object_mut().unwrap().insert(
            "metadata".into(),
            json!({
                "timestamp_unix": self.timestamp_unix.to_string(),
                "wall_time_seconds": num(self.wall_time_seconds),
            }),
        );
        v
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).unwrap() + "\n"
    }

    pub fn from_json(v: &Value) -> Result<Self, CliError> {
        let bad = |what: &str| CliError::Schema(format!("missing or malformed `{what}`"));
        let obj = v.as_object().ok_or_else(|| bad("report"))?;
        if obj.get("report_schema_version").and_then(Value::as_str) != Some(REPORT_SCHEMA_VERSION) {
            return Err(bad("report_schema_version"));
        }
        let s = |o: &Map<String, Value>, k: &str| o.get(k).and_then(Value::as_str).map(str::to_string).ok_or_else(|| bad(k));
        let n = |o: &Map<String, Value>, k: &str| s(o, k).and_then(|x| parse_num(&x));
        let mut config = BTreeMap::new();
        for (k, val) in obj.get("config").and_then(Value::as_object).ok_or_else(|| bad("config"))? {
            config.insert(k.clone(), val.as_str().ok_or_else(|| bad("config"))?.to_string());
        }
        let mut quantities = Vec::new();
        for q in obj.get("quantities").and_then(Value::as_array).ok_or_else(|| bad("quantities"))? {
            let q = q.as_object().ok_or_else(|| bad("quantities"))?;
            let stderr = match q.get("stderr") {
                Some(Value::String(x)) => Some(parse_num(x)?),
                _ => None,
            };
            quantities.push(Quantity { name: s(q, "name")?, lower: n(q, "lower")?, upper: n(q, "upper")?, stderr });
        }
        let mut checks = Vec::new();
        for c in obj.get("checks").and_then(Value::as_array).ok_or_else(|| bad("checks"))? {
            let c = c.as_object().ok_or_else(|| bad("checks"))?;
            checks.push(Check {
                name: s(c, "name")?,
                value: n(c, "value")?,
                relation: Relation::parse(&s(c, "relation")?)?,
                target: n(c, "target")?,
                tolerance: n(c, "tolerance")?,
                pass: c.get("pass").and_then(Value::as_bool).ok_or_else(|| bad("pass"))?,
            });
        }
        let meta = obj.get("metadata").and_then(Value::as_object).ok_or_else(|| bad("metadata"))?;
        Ok(ExperimentReport {
            experiment: s(obj, "experiment")?,
            claim: s(obj, "claim")?,
            config,
            quantities,
            checks,
            details: obj.get("details").cloned().unwrap_or(Value::Null),
            timestamp_unix: s(meta, "timestamp_unix")?.parse().map_err(|_| bad("timestamp_unix"))?,
            wall_time_seconds: n(meta, "wall_time_seconds")?,
        })
    }

    /// Rows (experiment, quantity, lower, upper, stderr, verdict): one per
    /// reported quantity, then one per check.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(["experiment", "quantity", "lower", "upper", "stderr", "verdict"]).map_err(io)?;
        for q in &self.quantities {
            let se = q.stderr.map(num).unwrap_or_default();
            w.write_record([self.experiment.as_str(), &q.name, &num(q.lower), &num(q.upper), &se, "reported"]).map_err(io)?;
        }
        for c in &self.checks {
            let verdict = if c.pass { "pass" } else { "fail" };
            w.write_record([self.experiment.as_str(), &format!("check:{}", c.name), &num(c.value), &num(c.value), "", verdict])
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        ExperimentReport {
            experiment: "demo".into(),
            claim: "x = 1".into(),
            config: [("seed".to_string(), "1".to_string())].into_iter().collect(),
            quantities: vec![Quantity::bracket("x", 0.1 + 0.2, 1.0 / 3.0), Quantity::estimate("m", 2.5, 0.01)],
            checks: vec![Check::near("x", 1.0, 1.0, 1e-8), Check::at_most("y", 2.0, 1.0, 0.0)],
            details: json!({"k": "v"}),
            timestamp_unix: 5,
            wall_time_seconds: 0.25,
        }
    }

    #[test]
    fn json_round_trips_exactly() {
        let r = sample();
        let text = r.to_json_string();
        let back = ExperimentReport::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn check_margins() {
        let c = Check::near("a", 1.0 + 5e-9, 1.0, 1e-8);
        assert!(c.pass && c.margin() > 0.0);
        let c = Check::at_least("b", 0.5, 1.0, 0.0);
        assert!(!c.pass && c.margin() < 0.0);
        assert!(!Check::holds("c", false).pass);
        assert_eq!(sample().headline().unwrap().name, "y");
    }

    #[test]
    fn csv_has_row_per_quantity_and_check() {
        let text = sample().to_csv().unwrap();
        assert_eq!(text.lines().count(), 1 + 2 + 2);
        assert!(text.lines().nth(1).unwrap().starts_with("demo,x,"));
    }
}
