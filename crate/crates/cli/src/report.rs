//! Tabular reports rendered as CSV (with `#` header lines) or markdown.

use std::fmt::Write as _;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Markdown,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: &str, columns: &[&str]) -> Table {
        Table {
            title: title.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// A command's output: reproducibility header, tables, then key results.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub config: Vec<(String, String)>,
    pub tables: Vec<Table>,
    pub summary: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str, config: Vec<(String, String)>) -> Report {
        Report {
            command: command.to_string(),
            config,
            tables: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Markdown => self.render_markdown(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# mdreduce {} {}", env!("CARGO_PKG_VERSION"), self.command);
        for (k, v) in &self.config {
            let _ = writeln!(out, "# {k}: {v}");
        }
        for table in &self.tables {
            let _ = writeln!(out, "# table: {}", table.title);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.columns).expect("in-memory write");
            for row in &table.rows {
                w.write_record(row).expect("in-memory write");
            }
            out.push_str(&String::from_utf8(w.into_inner().expect("in-memory write")).expect("UTF-8"));
        }
        for (k, v) in &self.summary {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out
    }

    fn render_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# mdreduce {} {}\n", env!("CARGO_PKG_VERSION"), self.command);
        for (k, v) in &self.config {
            let _ = writeln!(out, "- {k}: `{v}`");
        }
        for table in &self.tables {
            let _ = writeln!(out, "\n## {}\n", table.title);
            let _ = writeln!(out, "| {} |", table.columns.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(table.columns.len()));
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(|c| c.replace('|', "\\|")).collect();
                let _ = writeln!(out, "| {} |", cells.join(" | "));
            }
        }
        if !self.summary.is_empty() {
            out.push_str("\n## Results\n\n");
            for (k, v) in &self.summary {
                let _ = writeln!(out, "- {k}: {v}");
            }
        }
        out
    }
}
