//! Loading of system and space documents, with content digests for the
//! run manifest.

use std::path::Path;

use admiss_core::{InputSpace, SystemConfig};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub role: &'static str,
    /// File path, or `inline` for JSON given on the command line.
    pub source: String,
    pub sha256: String,
}

fn digest(role: &'static str, source: String, bytes: &[u8]) -> InputDigest {
    InputDigest {
        role,
        source,
        sha256: hex::encode(Sha256::digest(bytes)),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn load_system(path: &Path, modes: Option<usize>) -> Result<(SystemConfig, InputDigest), CliError> {
    let text = read(path)?;
    let mut cfg = SystemConfig::from_json_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    if let Some(k) = modes {
        if k == 0 {
            return Err(CliError::usage("--modes must be at least 1"));
        }
        cfg = if cfg.system.generator().is_some() {
            cfg.with_modes(k).map_err(CliError::from)?
        } else if k <= cfg.system.truncation() {
            SystemConfig {
                system: cfg.system.prefix(k),
                g: cfg.g.map(|g| g[..k].to_vec()),
                beta: cfg.beta,
            }
        } else {
            return Err(CliError::usage(format!(
                "--modes {k} exceeds the {} modes listed in {}",
                cfg.system.truncation(),
                path.display()
            )));
        };
    }
    Ok((cfg, digest("system", path.display().to_string(), text.as_bytes())))
}

/// The space argument as a JSON document: inline when it starts with `{`,
/// otherwise a path.
pub fn space_document(arg: &str) -> Result<(Value, InputDigest), CliError> {
    let (text, source) = if arg.trim_start().starts_with('{') {
        (arg.to_string(), "inline".to_string())
    } else {
        (read(Path::new(arg))?, arg.to_string())
    };
    let value: Value = serde_json::from_str(&text).map_err(|e| {
        CliError::usage(format!("{source}: config error at `$ (line {}, column {})`: {e}", e.line(), e.column()))
    })?;
    Ok((value, digest("space", source, text.as_bytes())))
}

pub fn parse_space(doc: &Value, source: &str) -> Result<InputSpace, CliError> {
    InputSpace::from_value(doc, "$").map_err(|e| CliError::usage(format!("{source}: {e}")))
}
