use serde::Serialize;
use serde_json::Value;

use crate::schema::FORMAT;

/// One checked statement with the values it was decided on.
#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub criterion: String,
    pub name: String,
    pub passed: bool,
    pub measured: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub format_version: String,
    pub command: Vec<String>,
    pub profile_hash: String,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl Report {
    pub fn new(command: Vec<String>, profile_hash: String, suites: Vec<SuiteResult>) -> Self {
        let passed = suites.iter().all(|s| s.passed);
        Report { format_version: FORMAT.into(), command, profile_hash, passed, suites, wall_time_ms: None }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
