//! Path-aware helpers for reading the JSON configuration documents.

use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub(crate) fn parse_document(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        Error::config(
            format!("$ (line {}, column {})", e.line(), e.column()),
            e.to_string(),
        )
    })
}

pub(crate) fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::config(path, "expected an object"))
}

pub(crate) fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::config(path, "expected a finite number"))
}

pub(crate) fn required<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::config(format!("{path}.{key}"), "missing field"))
}

pub(crate) fn required_number(obj: &Map<String, Value>, key: &str, path: &str) -> Result<f64> {
    number(required(obj, key, path)?, &format!("{path}.{key}"))
}

pub(crate) fn optional_number(obj: &Map<String, Value>, key: &str, path: &str) -> Result<Option<f64>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => number(v, &format!("{path}.{key}")).map(Some),
    }
}

/// `[[re, im], ...]`; a bare number is accepted as a real entry.
pub(crate) fn complex_list(v: &Value, path: &str) -> Result<Vec<Complex64>> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::config(path, "expected an array of [re, im] pairs"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let p = format!("{path}[{i}]");
            match item {
                Value::Number(_) => Ok(Complex64::new(number(item, &p)?, 0.0)),
                Value::Array(pair) if pair.len() == 2 => Ok(Complex64::new(
                    number(&pair[0], &format!("{p}[0]"))?,
                    number(&pair[1], &format!("{p}[1]"))?,
                )),
                _ => Err(Error::config(p, "expected [re, im]")),
            }
        })
        .collect()
}

pub(crate) fn pair_list(v: &Value, path: &str) -> Result<Vec<(f64, f64)>> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::config(path, "expected an array of pairs"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let p = format!("{path}[{i}]");
            match item.as_array() {
                Some(pair) if pair.len() == 2 => Ok((
                    number(&pair[0], &format!("{p}[0]"))?,
                    number(&pair[1], &format!("{p}[1]"))?,
                )),
                _ => Err(Error::config(p, "expected a two-element array")),
            }
        })
        .collect()
}
