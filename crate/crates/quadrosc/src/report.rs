//! Machine-readable run summary. Serialized as JSON with sorted keys
//! (serde_json's map is a BTreeMap), so byte output is deterministic for a
//! given run. Metric keys carry units as suffixes, matching the config
//! convention (`_s`, `_deg`, `_mm`, `_a`).

use serde_json::{json, Map, Value};

#[derive(Debug, Clone)]
pub struct SummaryReport {
    pub mode: String,
    pub config_echo: String,
    pub rng_seed: u64,
    metrics: Map<String, Value>,
    notes: Vec<String>,
    warnings: Vec<String>,
}

impl SummaryReport {
    pub fn new(mode: &str, config_echo: String, rng_seed: u64) -> Self {
        Self {
            mode: mode.to_string(),
            config_echo,
            rng_seed,
            metrics: Map::new(),
            notes: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn metric(&mut self, key: &str, value: f64) -> &mut Self {
        self.metrics.insert(key.to_string(), json!(value));
        self
    }

    pub fn metric_int(&mut self, key: &str, value: u64) -> &mut Self {
        self.metrics.insert(key.to_string(), json!(value));
        self
    }

    pub fn metric_bool(&mut self, key: &str, value: bool) -> &mut Self {
        self.metrics.insert(key.to_string(), json!(value));
        self
    }

    pub fn metric_value(&mut self, key: &str, value: Value) -> &mut Self {
        self.metrics.insert(key.to_string(), value);
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn warn(&mut self, text: impl Into<String>) -> &mut Self {
        self.warnings.push(text.into());
        self
    }

    pub fn get_metric(&self, key: &str) -> Option<&Value> {
        self.metrics.get(key)
    }

    pub fn to_value(&self) -> Value {
        json!({
            "mode": self.mode,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "rng_seed": self.rng_seed,
            "config": self.config_echo,
            "metrics": Value::Object(self.metrics.clone()),
            "notes": self.notes,
            "warnings": self.warnings,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("valid json tree");
        s.push('\n');
        s
    }
}

/// Error block printed on failed runs; same shape regardless of the error
/// source so callers can parse it.
pub fn error_block(mode: &str, kind: &str, message: &str) -> String {
    let v = json!({
        "error": {
            "mode": mode,
            "kind": kind,
            "message": message,
        }
    });
    let mut s = serde_json::to_string_pretty(&v).expect("valid json tree");
    s.push('\n');
    s
}
