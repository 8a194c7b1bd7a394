//! JSON config files whose keys mirror the long flag names; a flag given
//! on the command line always wins.

use std::path::Path;

use serde_json::Value;

use crate::CliError;

#[derive(Default)]
pub struct ConfigFile {
    values: Option<serde_json::Map<String, Value>>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<ConfigFile, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read config {path:?}: {e}")))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("bad JSON in {path:?}: {e}")))?;
        match value {
            Value::Object(map) => Ok(ConfigFile { values: Some(map) }),
            _ => Err(CliError::validation(format!(
                "config {path:?} must be a JSON object"
            ))),
        }
    }

    /// CLI flag value if present, otherwise the config entry under `key`.
    pub fn resolve<T: FromConfig>(&self, key: &str, flag: Option<T>) -> Option<T> {
        if flag.is_some() {
            return flag;
        }
        self.values.as_ref()?.get(key).and_then(T::from_value)
    }
}

pub trait FromConfig: Sized {
    fn from_value(v: &Value) -> Option<Self>;
}

impl FromConfig for f64 {
    fn from_value(v: &Value) -> Option<f64> {
        v.as_f64()
    }
}

impl FromConfig for usize {
    fn from_value(v: &Value) -> Option<usize> {
        v.as_u64().map(|n| n as usize)
    }
}

impl FromConfig for u64 {
    fn from_value(v: &Value) -> Option<u64> {
        v.as_u64()
    }
}

impl FromConfig for i8 {
    fn from_value(v: &Value) -> Option<i8> {
        v.as_i64().and_then(|n| i8::try_from(n).ok())
    }
}

impl FromConfig for String {
    fn from_value(v: &Value) -> Option<String> {
        v.as_str().map(str::to_owned)
    }
}

impl FromConfig for std::path::PathBuf {
    fn from_value(v: &Value) -> Option<std::path::PathBuf> {
        v.as_str().map(std::path::PathBuf::from)
    }
}
