//! Result tables and their CSV/JSON encodings.
//!
//! CSV layout: `# key=value` metadata lines, one header row, then data
//! rows printed with 17 significant digits so every f64 round-trips
//! exactly; re-reading and re-emitting a file is byte-identical. The JSON
//! encoding follows schema/output.schema.json.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// A rectangular numeric result table with ordered string metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// One of: edges, cdf, samples, ecdf, compare, histogram.
    pub kind: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(kind: &str, columns: &[&str]) -> Self {
        Table {
            kind: kind.to_string(),
            meta: Vec::new(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# kind={}\n", self.kind));
        for (k, v) in &self.meta {
            s.push_str(&format!("# {k}={v}\n"));
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Table> {
        let mut kind = String::new();
        let mut meta = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ").or_else(|| line.strip_prefix("#")) {
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| Error::BadInput(format!("bad metadata line: {line}")))?;
                if k == "kind" && kind.is_empty() {
                    kind = v.to_string();
                } else {
                    meta.push((k.to_string(), v.to_string()));
                }
            } else if columns.is_none() {
                columns = Some(line.split(',').map(|s| s.to_string()).collect());
            } else {
                let row = line
                    .split(',')
                    .map(|c| {
                        c.parse::<f64>()
                            .map_err(|_| Error::BadInput(format!("bad number: {c}")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                rows.push(row);
            }
        }
        let columns = columns.ok_or_else(|| Error::BadInput("missing header row".into()))?;
        if kind.is_empty() {
            return Err(Error::BadInput("missing '# kind=' metadata".into()));
        }
        Ok(Table { kind, meta, columns, rows })
    }

    pub fn to_json(&self) -> String {
        let meta: BTreeMap<&str, &str> =
            self.meta.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        let obj = serde_json::json!({
            "kind": self.kind,
            "meta": meta,
            "columns": self.columns,
            "rows": self.rows,
        });
        serde_json::to_string_pretty(&obj).expect("table serialization cannot fail")
    }

    pub fn render(&self, format: &str) -> Result<String> {
        match format {
            "csv" => Ok(self.to_csv()),
            "json" => Ok(self.to_json()),
            other => Err(Error::BadInput(format!("unknown format '{other}'"))),
        }
    }
}
