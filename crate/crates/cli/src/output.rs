use clap::ValueEnum;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// What a command produced: the JSON document plus the same content as flat
/// rows for csv and text.
pub struct Report {
    pub json: Value,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Extra lines shown after the table in text mode.
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &str, mut json: Value) -> Self {
        if let Value::Object(map) = &mut json {
            let mut ordered = serde_json::Map::new();
            ordered.insert("schema".into(), Value::String(format!("hypercube-codes/{command}/v{SCHEMA_VERSION}")));
            ordered.append(map);
            json = Value::Object(ordered);
        }
        Report { json, headers: Vec::new(), rows: Vec::new(), notes: Vec::new() }
    }

    pub fn table(mut self, headers: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.headers = headers.iter().map(|h| h.to_string()).collect();
        self.rows = rows;
        self
    }

    pub fn note(mut self, line: impl Into<String>) -> Self {
        self.notes.push(line.into());
        self
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.json)? + "\n"),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.headers)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                Ok(String::from_utf8(w.into_inner()?)?)
            }
            Format::Text => Ok(self.text()),
        }
    }

    fn text(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:>w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = String::new();
        if !self.headers.is_empty() {
            out += &line(&self.headers);
            for row in &self.rows {
                out += &line(row);
            }
        }
        for note in &self.notes {
            out += note;
            out.push('\n');
        }
        out
    }
}

pub fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".into(), |v| v.to_string())
}
