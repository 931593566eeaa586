use std::io::Write;

use num_complex::Complex64 as C64;
use serde_json::{Map, Value};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// CSV text: floats with 17 significant digits.
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            // non-finite floats have no JSON form and become null
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

/// One output row as an ordered list of named cells. Complex values are
/// split into `<name>_re` and `<name>_im`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportRow {
    cells: Vec<(String, Cell)>,
}

impl ReportRow {
    pub fn new(id: String) -> Self {
        ReportRow {
            cells: vec![("id".into(), Cell::Text(id))],
        }
    }

    pub fn int(mut self, name: &str, v: impl TryInto<i64>) -> Self {
        let v = v.try_into().unwrap_or(i64::MAX);
        self.cells.push((name.into(), Cell::Int(v)));
        self
    }

    pub fn float(mut self, name: &str, v: f64) -> Self {
        self.cells.push((name.into(), Cell::Float(v)));
        self
    }

    pub fn complex(self, name: &str, v: C64) -> Self {
        self.float(&format!("{name}_re"), v.re)
            .float(&format!("{name}_im"), v.im)
    }

    pub fn flag(mut self, name: &str, v: bool) -> Self {
        self.cells.push((name.into(), Cell::Bool(v)));
        self
    }

    pub fn text(mut self, name: &str, v: &str) -> Self {
        self.cells.push((name.into(), Cell::Text(v.into())));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Cell> {
        self.cells.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    /// The `converged` cell; rows without one count as converged.
    pub fn converged(&self) -> bool {
        !matches!(self.get("converged"), Some(Cell::Bool(false)))
    }

    fn names(&self) -> impl Iterator<Item = &str> {
        self.cells.iter().map(|(n, _)| n.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn new(command: &str, rows: Vec<ReportRow>) -> Result<Self> {
        if let Some(first) = rows.first() {
            if rows.iter().any(|r| !r.names().eq(first.names())) {
                return Err(invalid("report rows have differing columns"));
            }
        }
        Ok(Report {
            command: command.into(),
            rows,
        })
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(ReportRow::converged)
    }

    pub fn columns(&self) -> Vec<&str> {
        self.rows.first().map_or_else(Vec::new, |r| r.names().collect())
    }

    /// Header row then one line per row.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", self.columns().join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.cells.iter().map(|(_, c)| c.csv()).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// `{"command": ..., "rows": [{column: value, ...}, ...]}`.
    pub fn write_json(&self, out: &mut impl Write) -> std::io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> =
                    r.cells.iter().map(|(n, c)| (n.clone(), c.json())).collect();
                Value::Object(m)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("command".into(), Value::String(self.command.clone()));
        doc.insert("rows".into(), Value::Array(rows));
        serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
        writeln!(out)
    }
}
