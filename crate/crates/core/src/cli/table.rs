//! Tabular output in CSV or JSON.

use serde_json::{json, Map, Value};

use super::config::OutputFormat;
use crate::dispersion::fmt_num;
use crate::quantities::{Dimension, Quantity, UnitSystem};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json_number(*x),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

/// `x` rounded through the CSV text form, so both formats agree. 12 significant digits, or null when not finite.
pub fn json_number(x: f64) -> Value {
    fmt_num(x)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or(Value::Null, Value::Number)
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Table::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            for line in c.lines() {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "comments": self.comments,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }
}

/// Column suffix for a dimension in the given system.
pub fn unit_suffix(dim: Dimension, system: UnitSystem) -> &'static str {
    let si = system == UnitSystem::Si;
    match dim {
        d if d == Dimension::LENGTH => {
            if si {
                "m"
            } else {
                "cm"
            }
        }
        d if d == Dimension::MASS => {
            if si {
                "kg"
            } else {
                "g"
            }
        }
        d if d == Dimension::AREA_DENSITY => {
            if si {
                "m2"
            } else {
                "cm2"
            }
        }
        d if d == Dimension::VOLUME_DENSITY => {
            if si {
                "m3"
            } else {
                "cm3"
            }
        }
        d if d == Dimension::WAVENUMBER => {
            if si {
                "m1"
            } else {
                "cm1"
            }
        }
        d if d == Dimension::FREQUENCY => "s1",
        d if d == Dimension::TIME => "s",
        d if d == Dimension::TEMPERATURE => "K",
        _ => "",
    }
}

pub fn column(base: &str, dim: Dimension, system: UnitSystem) -> String {
    match unit_suffix(dim, system) {
        "" => base.to_string(),
        s => format!("{base}_{s}"),
    }
}

pub fn value_in(q: Quantity, system: UnitSystem) -> f64 {
    q.convert(system).value()
}
