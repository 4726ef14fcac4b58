//! JSON reports and their text rendering.

use std::collections::BTreeMap;
use std::fmt::Write;

use anyhow::Result;
use pbw_core::catalog::Catalog;
use pbw_core::groebner::DimTable;
use pbw_core::rewriting::Caps;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub arguments: Vec<String>,
    pub caps: Option<Caps>,
    pub seed: u64,
    /// sha256 of every catalog file, by file name.
    pub catalog: BTreeMap<String, String>,
    /// `None` when timing is omitted for reproducible output.
    pub wall_clock_ms: Option<u64>,
    pub passed: bool,
    pub result: Value,
}

pub fn catalog_hashes(cat: &Catalog) -> Result<BTreeMap<String, String>> {
    Ok(cat
        .files()?
        .into_iter()
        .map(|(name, text)| (name, hex::encode(Sha256::digest(text.as_bytes()))))
        .collect())
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }
}

/// Text form of a report, rendered from its JSON.
pub fn render(json: &Value) -> String {
    let mut out = String::new();
    let command = json["command"].as_str().unwrap_or("");
    let _ = writeln!(out, "{} {}", command, if json["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" });
    render_value(&json["result"], 0, &mut out);
    out
}

fn as_table(v: &Value) -> Option<DimTable> {
    let o = v.as_object()?;
    if o.len() == 3 && o.contains_key("rows") && o.contains_key("max_arity") {
        serde_json::from_value(v.clone()).ok()
    } else {
        None
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) if !s.contains('\n') => Some(s.clone()),
        Value::Array(a) if a.is_empty() => Some("none".into()),
        Value::Array(a) if a.iter().all(|x| x.is_number()) => {
            Some(a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
        }
        _ => None,
    }
}

fn render_value(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    if let Some(t) = as_table(v) {
        for line in t.to_text().lines() {
            let _ = writeln!(out, "{pad}{line}");
        }
        return;
    }
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                match scalar(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render_value(x, indent + 2, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match scalar(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}-");
                        render_value(x, indent + 2, out);
                    }
                }
            }
        }
        Value::String(s) => {
            for line in s.lines() {
                let _ = writeln!(out, "{pad}{line}");
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}
