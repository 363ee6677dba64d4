//! Table model with CSV and Markdown renderers.

use std::fmt::Write as _;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(usize),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn num(x: f64) -> Self {
        Cell::Num(x)
    }

    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            _ => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(x) if x.is_finite() => format!("{x:.6}"),
            Cell::Num(_) => "NaN".into(),
            Cell::Int(n) => n.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn markdown(&self) -> String {
        match self {
            Cell::Text(s) => s.replace('|', "\\|"),
            Cell::Num(x) if x.is_finite() => {
                let s = format!("{x:.2}");
                if s == "-0.00" { "0.00".into() } else { s }
            }
            Cell::Num(_) => "NaN".into(),
            Cell::Int(n) => n.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub name: String,
    /// Key-value notes specific to this section.
    pub meta: Vec<(String, String)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), meta: Vec::new(), rows: Vec::new() }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub id: String,
    pub title: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub sections: Vec<Section>,
}

impl Table {
    pub fn new(id: &str, title: &str, columns: &[&str]) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            sections: Vec::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric cell in `column` of the first row of `section` whose leading text cells equal `keys`.
    pub fn lookup(&self, section: &str, keys: &[&str], column: &str) -> Option<f64> {
        let col = self.column(column)?;
        let sec = self.sections.iter().find(|s| s.name == section)?;
        sec.rows
            .iter()
            .find(|row| {
                keys.iter().enumerate().all(|(i, k)| match row.get(i) {
                    Some(Cell::Text(s)) => s == k,
                    Some(Cell::Int(n)) => n.to_string() == *k,
                    _ => false,
                })
            })
            .and_then(|row| row.get(col))
            .and_then(Cell::as_f64)
    }

    pub fn row_count(&self) -> usize {
        self.sections.iter().map(|s| s.rows.len()).sum()
    }

    pub fn to_csv(&self, echo: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# table {}: {}", self.id, self.title);
        let _ = writeln!(out, "# config: {echo}");
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        for s in &self.sections {
            for (k, v) in &s.meta {
                let _ = writeln!(out, "# [{}] {k}: {v}", s.name);
            }
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let mut header = vec!["section".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).expect("in-memory write");
        for s in &self.sections {
            for row in &s.rows {
                let mut rec = vec![s.name.clone()];
                rec.extend(row.iter().map(Cell::csv));
                w.write_record(&rec).expect("in-memory write");
            }
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells"));
        out
    }

    pub fn to_markdown(&self, echo: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "<!-- config: {echo} -->\n");
        let _ = writeln!(out, "# Table {}: {}\n", self.id, self.title);
        for (k, v) in &self.meta {
            let _ = writeln!(out, "- {k}: {v}");
        }
        for s in &self.sections {
            let _ = writeln!(out, "\n## {}\n", s.name);
            for (k, v) in &s.meta {
                let _ = writeln!(out, "- {k}: {v}");
            }
            if !s.meta.is_empty() {
                out.push('\n');
            }
            let _ = writeln!(out, "| {} |", self.columns.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(self.columns.len()));
            for row in &s.rows {
                let cells: Vec<String> = row.iter().map(Cell::markdown).collect();
                let _ = writeln!(out, "| {} |", cells.join(" | "));
            }
        }
        out
    }
}
