//! Line-oriented `key = value` run reports.
//!
//! Keys form a stable, command-specific set; numeric keys carry their unit
//! as a suffix; floats are printed in scientific notation with
//! shortest-round-trip precision, so a report quotes every number bit for
//! bit.

use std::fmt::Display;

pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut report = Report { lines: Vec::new() };
        report.push_str("tool", "vacdisp");
        report.push_str("tool_version", env!("CARGO_PKG_VERSION"));
        report.push_str("command", command);
        report
    }

    pub fn push_str(&mut self, key: &str, value: impl Display) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn push_float(&mut self, key: &str, value: f64) {
        self.lines.push((key.to_string(), format!("{value:e}")));
    }

    pub fn push_int(&mut self, key: &str, value: impl Into<u128>) {
        self.lines.push((key.to_string(), value.into().to_string()));
    }

    /// Absent values are written out as `absent`, never as zero.
    pub fn push_optional_float(&mut self, key: &str, value: Option<f64>) {
        match value {
            Some(v) => self.push_float(key, v),
            None => self.push_str(key, "absent"),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.lines {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(value);
            out.push('\n');
        }
        out
    }
}
