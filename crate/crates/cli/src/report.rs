//! CSV output with a `#` header: tool version, the resolved config, free-form
//! notes, and the column names with units. The data rows never depend on the
//! time of day or the thread count.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

pub struct Report {
    command: &'static str,
    config: String,
    notes: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new<C: Serialize>(command: &'static str, config: &C, columns: &[&str]) -> Self {
        Report {
            command,
            config: serde_json::to_string(config).expect("configs serialize"),
            notes: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells.into_iter().map(quote).collect());
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# rotating-euler {} {}", env!("CARGO_PKG_VERSION"), self.command);
        let _ = writeln!(s, "# config: {}", self.config);
        for n in &self.notes {
            let _ = writeln!(s, "# {n}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }

    /// To `path`, or stdout when there is none.
    pub fn write(&self, path: Option<&Path>) -> std::io::Result<()> {
        let text = self.render();
        match path {
            Some(p) => std::fs::write(p, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}

fn quote(cell: String) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell
    }
}

/// Full precision, round-trippable.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_with_commas_are_quoted() {
        let mut r = Report::new("x", &serde_json::json!({}), &["a", "b"]);
        r.row(vec!["1,2".into(), "say \"hi\"".into()]);
        assert!(r.render().ends_with("a,b\n\"1,2\",\"say \"\"hi\"\"\"\n"));
    }
}
