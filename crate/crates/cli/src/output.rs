//! Rendering of tables and reports in the three output formats.

use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: Vec<&'static str>) -> Self {
        Table { headers, rows: Vec::new() }
    }

    pub fn render(&self, f: Format) -> String {
        match f {
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Object(self.headers.iter().zip(r).map(|(h, v)| (h.to_string(), json!(v))).collect()))
                    .collect();
                serde_json::to_string_pretty(&json!({ "columns": self.headers, "rows": rows })).expect("serializable")
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let records = std::iter::once(self.headers.iter().map(|h| h.to_string()).collect()).chain(self.rows.iter().cloned());
                for r in records {
                    w.write_record(&r).expect("in-memory write");
                }
                let bytes = w.into_inner().expect("in-memory flush");
                String::from_utf8(bytes).expect("utf-8 input").trim_end().to_string()
            }
            Format::Text => {
                let mut w: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
                for r in &self.rows {
                    for (i, x) in r.iter().enumerate() {
                        w[i] = w[i].max(x.chars().count());
                    }
                }
                let line = |cells: Vec<&str>| {
                    cells.iter().enumerate().map(|(i, c)| format!("{c:<w$}", w = w[i])).collect::<Vec<_>>().join("  ")
                };
                let mut out = line(self.headers.clone());
                for r in &self.rows {
                    out.push('\n');
                    out.push_str(line(r.iter().map(String::as_str).collect()).trim_end());
                }
                out
            }
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        x => out.push((prefix.to_string(), x.to_string())),
    }
}

/// A JSON report; csv and text flatten it to dotted key/value pairs.
pub fn render_report(v: &Value, f: Format) -> String {
    match f {
        Format::Json => serde_json::to_string_pretty(v).expect("serializable"),
        _ => {
            let mut pairs = Vec::new();
            flatten("", v, &mut pairs);
            let mut t = Table::new(vec!["field", "value"]);
            t.rows = pairs.into_iter().map(|(k, v)| vec![k, v]).collect();
            if f == Format::Text {
                t.rows.iter().map(|r| format!("{}: {}", r[0], r[1])).collect::<Vec<_>>().join("\n")
            } else {
                t.render(f)
            }
        }
    }
}
