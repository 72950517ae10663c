//! JSON config files: any flag may come from the file, flags on the command
//! line win.

use std::path::Path;

use graph_energy::Error;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

pub fn load(path: &Path) -> Result<Value, Error> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))?;
    if !value.is_object() {
        return Err(Error::Parse(format!("config {}: expected a JSON object", path.display())));
    }
    Ok(value)
}

/// Overlays the flags that were actually given (non-null) onto the file's
/// values and deserializes the result.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Option<&Value>) -> Result<T, Error> {
    let mut merged = file.cloned().unwrap_or_else(|| Value::Object(Default::default()));
    let Value::Object(given) = serde_json::to_value(flags)? else {
        unreachable!("argument structs serialize to objects")
    };
    let target = merged.as_object_mut().expect("checked in load");
    for (key, value) in given {
        if !value.is_null() {
            target.insert(key, value);
        }
    }
    serde_json::from_value(merged).map_err(|e| Error::Parse(format!("config: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Default, Serialize, Deserialize, PartialEq)]
    #[serde(deny_unknown_fields)]
    struct Args {
        n: Option<usize>,
        k: Option<f64>,
    }

    #[test]
    fn flags_override_file() {
        let file = serde_json::json!({"n": 10, "k": 2.0});
        let flags = Args { n: Some(20), k: None };
        assert_eq!(merge(&flags, Some(&file)).unwrap(), Args { n: Some(20), k: Some(2.0) });
        assert_eq!(merge(&flags, None).unwrap(), flags);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let file = serde_json::json!({"nn": 10});
        assert!(merge(&Args::default(), Some(&file)).is_err());
    }
}
