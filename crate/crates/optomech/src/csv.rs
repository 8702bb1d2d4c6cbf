//! CSV output with C-style `%.12e` numbers and `#` comment headers, and the
//! two-column reader for tabulated occupation spectra.

use std::io::{self, Write};
use std::path::Path;

use optomech_core::bath_spectrum::OccupationSpectrum;

use crate::error::{Error, Result};

/// Formats `x` like C's `printf("%.12e", x)`: `-1.234567890123e+07`,
/// `nan`, `inf`, `-inf`.
pub fn fmt_e(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.unsigned_abs())
}

/// A CSV document: comment lines, a header row and data rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvDoc {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn new(header: &[&str]) -> Self {
        Self { comments: Vec::new(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    /// Adds a `# key: value` line.
    pub fn comment(&mut self, key: &str, value: impl AsRef<str>) {
        self.comments.push(format!("{key}: {}", value.as_ref()));
    }

    pub fn push_numbers(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|&v| fmt_e(v)).collect());
    }

    pub fn push_row(&mut self, fields: Vec<String>) {
        self.rows.push(fields);
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        for c in &self.comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{}", self.header.join(","))?;
        for r in &self.rows {
            writeln!(w, "{}", r.join(","))?;
        }
        w.flush()
    }

    pub fn to_string_lossy(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ASCII output")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }
}

/// Parses a two-column table `ν (rad/s), N`; commas or whitespace separate
/// the columns, `#` starts a comment and a non-numeric first row is taken as
/// a header.
pub fn parse_occupation_table(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut grid = Vec::new();
    let mut values = Vec::new();
    let mut seen_row = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
        let parsed: Vec<Option<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        if !seen_row && parsed.iter().any(Option::is_none) {
            seen_row = true;
            continue;
        }
        seen_row = true;
        match parsed.as_slice() {
            [Some(nu), Some(n)] => {
                grid.push(*nu);
                values.push(*n);
            }
            _ => return Err(Error::config(format!("line {}: expected two numbers", idx + 1))),
        }
    }
    Ok((grid, values))
}

/// Reads a tabulated occupation spectrum from a file.
pub fn read_occupation_table(path: &Path) -> Result<OccupationSpectrum> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (grid, values) = parse_occupation_table(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
    OccupationSpectrum::tabulated(grid, values).map_err(|e| Error::config(format!("{}: {e}", path.display())))
}
