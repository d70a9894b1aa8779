//! Tabular output shared by all subcommands.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Text,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Text(String),
    Int(u64),
    Real(f64),
    Empty,
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl Cell {
    fn render(&self, format: Format) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => match format {
                Format::Csv => significant(*v, 15),
                Format::Text => format!("{v:.1}"),
            },
            Cell::Empty => String::new(),
        }
    }
}

/// `x` with `digits` significant digits, trailing zeros removed.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone)]
pub struct Section {
    pub title: String,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Render a single row as `key value` lines in text mode.
    pub vertical: bool,
}

impl Section {
    pub fn new(title: impl Into<String>, headers: Vec<&'static str>) -> Self {
        Self {
            title: title.into(),
            headers,
            rows: Vec::new(),
            vertical: false,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub sections: Vec<Section>,
    /// Replaces the tabular text rendering.
    pub text: Option<String>,
}

impl Report {
    pub fn single(section: Section) -> Self {
        Self {
            sections: vec![section],
            text: None,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Text => match &self.text {
                Some(t) => t.clone(),
                None => self.render_text(),
            },
        }
    }

    /// One CSV document; several sections share the first section's header
    /// and gain a leading `section` column.
    fn render_csv(&self) -> String {
        let tagged = self.sections.len() > 1;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut header: Vec<&str> = Vec::new();
        if tagged {
            header.push("section");
        }
        header.extend(self.sections[0].headers.iter().copied());
        w.write_record(&header).expect("in-memory write");
        for section in &self.sections {
            debug_assert_eq!(section.headers, self.sections[0].headers);
            for row in &section.rows {
                let mut record: Vec<String> = Vec::with_capacity(row.len() + 1);
                if tagged {
                    record.push(section.title.clone());
                }
                record.extend(row.iter().map(|c| c.render(Format::Csv)));
                w.write_record(&record).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("flush to Vec")).expect("UTF-8 input")
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        for (k, section) in self.sections.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            if !section.title.is_empty() {
                writeln!(out, "{}", section.title).unwrap();
            }
            if section.vertical {
                let width = section.headers.iter().map(|h| h.len()).max().unwrap_or(0);
                for row in &section.rows {
                    for (h, c) in section.headers.iter().zip(row) {
                        writeln!(out, "{h:<width$}  {}", c.render(Format::Text)).unwrap();
                    }
                }
                continue;
            }
            let cells: Vec<Vec<String>> = section
                .rows
                .iter()
                .map(|r| r.iter().map(|c| c.render(Format::Text)).collect())
                .collect();
            let widths: Vec<usize> = section
                .headers
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    cells
                        .iter()
                        .map(|r| r[i].len())
                        .chain([h.len()])
                        .max()
                        .unwrap()
                })
                .collect();
            let line = |items: Vec<&str>| {
                items
                    .iter()
                    .zip(&widths)
                    .map(|(s, w)| format!("{s:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            writeln!(out, "{}", line(section.headers.clone())).unwrap();
            for r in &cells {
                writeln!(out, "{}", line(r.iter().map(String::as_str).collect())).unwrap();
            }
        }
        out
    }
}
