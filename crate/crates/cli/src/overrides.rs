//! `key=value` overrides on the raw configuration document.
//!
//! Keys are dotted paths; numeric segments index arrays. The value is read
//! as JSON and falls back to a plain string, so `cell.beta=2.5`,
//! `scenario=pv-sweep` and `cell.inter=[[0.1]]` all work.

use serde_json::Value;

use crate::error::CliError;

pub fn apply_override(root: &mut Value, entry: &str) -> Result<(), CliError> {
    let (key, raw) = entry
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{entry}' is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::Config(format!("override '{entry}' has an empty key")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let segments: Vec<&str> = key.split('.').collect();
    let mut node = root;
    for (depth, seg) in segments.iter().enumerate() {
        let last = depth + 1 == segments.len();
        let here = segments[..=depth].join(".");
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(seg.to_string(), value);
                    return Ok(());
                }
                map.entry(seg.to_string())
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let index: usize = seg.parse().map_err(|_| {
                    CliError::Config(format!("{here}: array index expected, got '{seg}'"))
                })?;
                let len = items.len();
                let slot = items.get_mut(index).ok_or_else(|| {
                    CliError::Config(format!("{here}: index {index} out of range (length {len})"))
                })?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(CliError::Config(format!(
                    "{}: cannot descend into a scalar",
                    segments[..depth].join(".")
                )))
            }
        };
    }
    unreachable!("the loop returns at the last segment")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn nested_and_indexed() {
        let mut v = json!({"a": {"b": [1, 2, 3]}, "s": "x"});
        apply_override(&mut v, "a.b.1=5.5").unwrap();
        apply_override(&mut v, "s=pv-sweep").unwrap();
        apply_override(&mut v, "c.d=[1,2]").unwrap();
        assert_eq!(v, json!({"a": {"b": [1, 5.5, 3]}, "s": "pv-sweep", "c": {"d": [1, 2]}}));
    }

    #[test]
    fn malformed() {
        let mut v = json!({"a": 1});
        assert!(apply_override(&mut v, "novalue").is_err());
        assert!(apply_override(&mut v, "a.b=1").is_err());
        let mut w = json!({"a": [1]});
        assert!(apply_override(&mut w, "a.4=1").is_err());
    }
}
