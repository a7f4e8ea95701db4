//! Run manifests: everything needed to reproduce a report.

use serde::Serialize;
use serde_json::Value;

use crate::inputs::InputDigest;

#[derive(Debug, Serialize)]
pub struct RunManifest<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub inputs: Vec<InputDigest>,
    /// Every effective setting, defaults included.
    pub settings: Value,
    pub wall_clock_seconds: f64,
    pub result: T,
}

impl<T: Serialize> RunManifest<T> {
    pub fn new(command: &'static str, inputs: Vec<InputDigest>, settings: Value, wall_clock_seconds: f64, result: T) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs,
            settings,
            wall_clock_seconds,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }
}
