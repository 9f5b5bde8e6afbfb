//! Deterministic JSON reports and their text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use haarcalc_core::{GroupExpr, PositiveReal, PrimeExponentVector};
use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Stated in every report that touches a real line.
pub const LEBESGUE_NOTE: &str = "real lines carry Lebesgue measure normalized by vol([0,1)) = 1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
}

/// Field order is fixed by the struct and every map is a `BTreeMap`, so the
/// serialization depends only on the contents.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub verb: String,
    pub inputs: BTreeMap<String, Value>,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub version: &'static str,
}

impl Report {
    pub fn new(verb: &str) -> Self {
        Self {
            verb: verb.to_string(),
            inputs: BTreeMap::new(),
            results: json!({}),
            verdicts: vec![],
            notes: vec![],
            version: VERSION,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn verdict(&mut self, name: &str, pass: bool) -> &mut Self {
        self.verdicts.push(Verdict {
            name: name.to_string(),
            pass,
        });
        self
    }

    pub fn note_groups<'a>(&mut self, groups: impl IntoIterator<Item = &'a GroupExpr>) {
        if groups.into_iter().any(|g| !g.is_vector_free())
            && !self.notes.iter().any(|n| n == LEBESGUE_NOTE)
        {
            self.notes.push(LEBESGUE_NOTE.to_string());
        }
    }

    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} (haarcalc {})", self.verb, self.version);
        for (k, v) in &self.inputs {
            let _ = writeln!(out, "  input {k}: {}", inline(v));
        }
        render(&mut out, "result", &self.results, 1);
        for v in &self.verdicts {
            let _ = writeln!(
                out,
                "  [{}] {}",
                if v.pass { "pass" } else { "FAIL" },
                v.name
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        out
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map)
            if !map.is_empty() && map.values().any(|x| x.is_object() || x.is_array()) =>
        {
            let _ = writeln!(out, "{pad}{key}:");
            for (k, x) in map {
                render(out, k, x, depth + 1);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (i, x) in items.iter().enumerate() {
                render(out, &format!("[{i}]"), x, depth + 1);
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{key}: {}", inline(other));
        }
    }
}

/// `{"7": -1}`.
pub fn exponents(v: &PrimeExponentVector) -> Value {
    Value::Object(v.iter().map(|(p, e)| (p.to_string(), json!(e))).collect())
}

/// `{"value": "3/2*c", "rational": {"2": -1, "3": 1}, "symbols": {"c": 1}}`.
pub fn positive_real(x: &PositiveReal) -> Value {
    json!({
        "value": x.to_string(),
        "rational": exponents(x.rational_part()),
        "symbols": Value::Object(x.symbolic_part().iter().map(|(k, e)| (k.clone(), json!(e))).collect()),
    })
}
