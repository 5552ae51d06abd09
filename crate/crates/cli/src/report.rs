//! JSON reports. Floating-point fields are written with 17 significant digits.

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

pub const TOOL_VERSION: &str = concat!("entmeter ", env!("CARGO_PKG_VERSION"));

fn sig17_str(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

pub fn sig17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    RawValue::from_string(sig17_str(*x))
        .map_err(serde::ser::Error::custom)?
        .serialize(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerInfo {
    pub restarts: usize,
    pub converged: bool,
    pub restarts_agreeing: usize,
    pub sweeps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleInfo {
    pub samples: usize,
    pub seed: u64,
    #[serde(serialize_with = "sig17")]
    pub value: f64,
    #[serde(serialize_with = "sig17")]
    pub abs_diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(serialize_with = "sig17")]
    pub epsilon: f64,
    #[serde(serialize_with = "sig17")]
    pub log_base: f64,
    pub mode: String,
    #[serde(rename = "norm_D_A", serialize_with = "sig17")]
    pub norm_d_a: f64,
    #[serde(rename = "norm_D_Aotimes", serialize_with = "sig17")]
    pub norm_d_aotimes: f64,
    pub optimizer: OptimizerInfo,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleInfo>,
    pub warnings: Vec<String>,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderIndexReport {
    #[serde(serialize_with = "sig17")]
    pub omega: f64,
    #[serde(serialize_with = "sig17")]
    pub norm: f64,
    #[serde(serialize_with = "sig17")]
    pub trace_abs: f64,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproduceRow {
    pub name: String,
    #[serde(serialize_with = "sig17")]
    pub epsilon_computed: f64,
    #[serde(rename = "epsilon_paper_formula", serialize_with = "sig17")]
    pub epsilon_closed_form: f64,
    #[serde(serialize_with = "sig17")]
    pub abs_diff: f64,
    pub mode_used: String,
    /// Rows with a flag are reported but never fail the run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

impl ReproduceRow {
    pub fn failed(&self, tol: f64) -> bool {
        self.flag.is_none() && (self.abs_diff.is_nan() || self.abs_diff > tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureInfo {
    pub seed: u64,
    #[serde(serialize_with = "sig17")]
    pub deviation: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertySummary {
    pub property: String,
    pub passed: usize,
    pub failed: usize,
    #[serde(serialize_with = "sig17")]
    pub worst_deviation: f64,
    #[serde(serialize_with = "sig17")]
    pub tolerance: f64,
    pub failures: Vec<FailureInfo>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub seeds: Vec<u64>,
    pub properties: Vec<PropertySummary>,
    pub all_passed: bool,
    pub tool_version: String,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}
