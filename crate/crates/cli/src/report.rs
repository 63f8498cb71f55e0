//! The JSON run report. Every field is always present; absent values are
//! `null`.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use entrofunc::equations::{ResidualReport, Verdict};
use entrofunc::families::SolutionFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Error,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Error => 2,
        }
    }
}

impl From<Verdict> for Outcome {
    fn from(v: Verdict) -> Self {
        if v.passed() {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub verdict: Outcome,
    pub exit_code: u8,
    pub max_abs_residual: Option<f64>,
    pub witness: Option<Vec<Value>>,
    pub parameters: Option<BTreeMap<String, f64>>,
    pub residual_norm: Option<f64>,
    pub notes: Vec<String>,
    pub inputs: Value,
    pub details: Value,
}

impl RunReport {
    pub fn new(command: &str, inputs: Value) -> Self {
        RunReport {
            command: command.to_string(),
            verdict: Outcome::Pass,
            exit_code: 0,
            max_abs_residual: None,
            witness: None,
            parameters: None,
            residual_norm: None,
            notes: Vec::new(),
            inputs,
            details: Value::Null,
        }
    }

    /// The exit code is derived from the verdict only.
    pub fn with_outcome(mut self, outcome: Outcome) -> Self {
        self.verdict = outcome;
        self.exit_code = outcome.exit_code();
        self
    }

    pub fn error(command: &str, inputs: Value, message: String) -> Self {
        let mut r = RunReport::new(command, inputs).with_outcome(Outcome::Error);
        r.notes.push(message);
        r
    }
}

pub fn family_parameters(f: &SolutionFamily) -> Option<BTreeMap<String, f64>> {
    let params = f.parameters();
    if params.is_empty() {
        return None;
    }
    Some(
        params
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
    )
}

pub fn witness_values(w: &[f64]) -> Vec<Value> {
    w.iter().map(|&v| Value::from(v)).collect()
}

/// JSON view of one residual scan.
pub fn residual_json(r: &ResidualReport) -> Value {
    serde_json::json!({
        "verdict": r.verdict.to_string(),
        "max_abs_residual": r.max_abs_residual,
        "mean_abs_residual": r.mean_abs_residual,
        "witness": r.witness,
        "residual_at_witness": r.residual_at_witness,
        "tolerance": r.tolerance,
        "points": r.points,
    })
}
