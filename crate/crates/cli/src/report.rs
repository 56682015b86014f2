use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::Format;

/// One pass/fail comparison of a computed quantity against its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: String,
    pub threshold: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: impl ToString, threshold: impl ToString, pass: bool) -> Self {
        Check {
            name: name.into(),
            value: value.to_string(),
            threshold: threshold.to_string(),
            pass,
        }
    }

    pub fn status(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "value": self.value,
            "threshold": self.threshold,
            "status": self.status(),
        })
    }
}

/// A table plus checks. Every cell is already a decimal string.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub checks: Vec<Check>,
    /// Structured payload emitted only in JSON output.
    pub extra: Option<(String, Value)>,
}

impl Report {
    pub fn with_columns(meta: Vec<(String, String)>, columns: &[&str]) -> Self {
        Report {
            meta,
            columns: columns.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> Value {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                    .collect();
                Value::Object(m)
            })
            .collect();
        let mut top = Map::new();
        top.insert("meta".into(), Value::Object(meta));
        top.insert("rows".into(), Value::Array(rows));
        top.insert("checks".into(), Value::Array(self.checks.iter().map(Check::to_json).collect()));
        if let Some((k, v)) = &self.extra {
            top.insert(k.clone(), v.clone());
        }
        Value::Object(top)
    }

    /// `# key=value` metadata lines, a header whose first column is
    /// `section`, `row` records, then `check,name,value,threshold,status`
    /// records.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut out = out;
        for (k, v) in &self.meta {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::WriterBuilder::new().flexible(true).terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let mut header = vec!["section".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        for r in &self.rows {
            w.write_record(std::iter::once("row").chain(r.iter().map(String::as_str)))?;
        }
        for c in &self.checks {
            w.write_record(["check", &c.name, &c.value, &c.threshold, c.status()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: Format, mut out: W) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json())?;
                writeln!(out)
            }
            Format::Csv => self.write_csv(out),
        }
    }

    /// Machine-readable summary of the failed checks.
    pub fn failure_report(&self, command: &str) -> Value {
        json!({
            "status": "numeric_failure",
            "command": command,
            "failed_checks": self.failures().into_iter().map(Check::to_json).collect::<Vec<_>>(),
        })
    }
}
