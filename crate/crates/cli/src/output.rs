//! JSON and CSV rendering of report documents.
//!
//! Both formats carry the same numbers in the same shortest round-trip
//! decimal form. CSV starts with `#` comment lines holding the timestamp, the
//! run configuration and the summary. Sweep tables become one CSV row per
//! table row. Every other payload is written in long form, one
//! `path,value` row per leaf of the JSON payload, where `path` is a JSON
//! pointer into the `payload` object.

use serde_json::Value;

use crate::{Document, Format, Payload};

pub fn render(doc: &Document, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("report types serialize");
            s.push('\n');
            s
        }
        Format::Csv => csv(doc),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn escape(segment: &str) -> String {
    segment.replace('~', "~0").replace('/', "~1")
}

/// Every non-container leaf of `v` with its JSON pointer.
pub fn leaves(v: &Value) -> Vec<(String, String)> {
    fn walk(v: &Value, path: &mut String, out: &mut Vec<(String, String)>) {
        let len = path.len();
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    path.push('/');
                    path.push_str(&escape(k));
                    walk(x, path, out);
                    path.truncate(len);
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    path.push('/');
                    path.push_str(&i.to_string());
                    walk(x, path, out);
                    path.truncate(len);
                }
            }
            leaf => out.push((path.clone(), scalar(leaf))),
        }
    }
    let mut out = Vec::new();
    walk(v, &mut String::new(), &mut out);
    out
}

fn csv(doc: &Document) -> String {
    let config = serde_json::to_string(&doc.config).expect("config serializes");
    let s = doc.summary;
    let mut out = format!(
        "# tool: {} {}\n# timestamp: {}\n# config: {config}\n# summary: pass={} fail={} diagnostic={}\n",
        doc.tool, doc.version, doc.timestamp, s.pass, s.fail, s.diagnostic
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    match &doc.payload {
        Payload::Sweep(t) => {
            w.write_record(&t.columns).expect("in-memory write");
            for row in &t.rows {
                let json = serde_json::to_value(row).expect("numbers serialize");
                let cells: Vec<String> = json.as_array().expect("row is an array").iter().map(scalar).collect();
                w.write_record(&cells).expect("in-memory write");
            }
        }
        other => {
            w.write_record(["path", "value"]).expect("in-memory write");
            let json = serde_json::to_value(other).expect("payload serializes");
            for (p, v) in leaves(&json) {
                w.write_record([p, v]).expect("in-memory write");
            }
        }
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn leaves_use_json_pointers() {
        let v = json!({"a": [1.5, {"b/c": true}], "d": null});
        assert_eq!(
            leaves(&v),
            vec![
                ("/a/0".to_string(), "1.5".to_string()),
                ("/a/1/b~1c".to_string(), "true".to_string()),
                ("/d".to_string(), String::new()),
            ]
        );
    }
}
