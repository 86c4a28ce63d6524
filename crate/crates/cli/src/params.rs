//! Experiment parameters: schemas, defaults, overrides and typed access.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Float,
    Int,
    Bool,
    Str,
    FloatList,
    IntList,
}

impl Kind {
    fn accepts(self, v: &Value) -> bool {
        match self {
            Kind::Float => v.is_number(),
            Kind::Int => v.is_u64(),
            Kind::Bool => v.is_boolean(),
            Kind::Str => v.is_string(),
            Kind::FloatList => v.as_array().is_some_and(|a| a.iter().all(Value::is_number)),
            Kind::IntList => v.as_array().is_some_and(|a| a.iter().all(Value::is_u64)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    #[serde(rename = "type")]
    pub kind: Kind,
    pub default: Value,
    pub help: &'static str,
}

pub fn spec(name: &'static str, kind: Kind, default: Value, help: &'static str) -> ParamSpec {
    ParamSpec { name, kind, default, help }
}

/// Validated parameter values, defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params(BTreeMap<String, Value>);

impl Params {
    /// Merges `given` over the schema defaults; unknown keys and type
    /// mismatches are errors.
    pub fn resolve(schema: &[ParamSpec], given: &BTreeMap<String, Value>) -> Result<Self, CliError> {
        let mut out = BTreeMap::new();
        for s in schema {
            out.insert(s.name.to_string(), s.default.clone());
        }
        for (k, v) in given {
            let s = schema
                .iter()
                .find(|s| s.name == k)
                .ok_or_else(|| CliError::Config(format!("unknown parameter `{k}`")))?;
            // a single number is accepted where a list is expected
            let v = match (s.kind, v) {
                (Kind::FloatList | Kind::IntList, Value::Number(_)) => Value::Array(vec![v.clone()]),
                (Kind::Float, Value::Number(n)) => Value::from(n.as_f64().unwrap_or(f64::NAN)),
                _ => v.clone(),
            };
            if !s.kind.accepts(&v) {
                return Err(CliError::Config(format!("parameter `{k}` expects {:?}, got {v}", s.kind)));
            }
            out.insert(k.clone(), v);
        }
        Ok(Self(out))
    }

    pub fn f64(&self, k: &str) -> f64 {
        self.0[k].as_f64().expect("validated float")
    }

    pub fn usize(&self, k: &str) -> usize {
        self.0[k].as_u64().expect("validated int") as usize
    }

    pub fn bool(&self, k: &str) -> bool {
        self.0[k].as_bool().expect("validated bool")
    }

    pub fn str(&self, k: &str) -> &str {
        self.0[k].as_str().expect("validated string")
    }

    pub fn f64_list(&self, k: &str) -> Vec<f64> {
        self.0[k].as_array().expect("validated list").iter().map(|v| v.as_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn usize_list(&self, k: &str) -> Vec<usize> {
        self.0[k].as_array().expect("validated list").iter().map(|v| v.as_u64().unwrap_or(0) as usize).collect()
    }

    pub fn set(&mut self, k: &str, v: Value) {
        self.0.insert(k.to_string(), v);
    }

    pub fn has(&self, k: &str) -> bool {
        self.0.contains_key(k)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(&self.0).expect("plain json")
    }
}

/// `key=value`, the value read as JSON when it parses, else as a string.
pub fn parse_override(s: &str) -> Result<(String, Value), CliError> {
    let (k, v) = s.split_once('=').ok_or_else(|| CliError::Config(format!("`{s}` is not key=value")))?;
    if k.is_empty() {
        return Err(CliError::Config(format!("empty key in `{s}`")));
    }
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.to_string(), value))
}
