//! Output assembly: significant-digit formatting, CSV construction with
//! `#` comment lines, and destination handling.
//!
//! Everything funnels through a single in-memory string so identical inputs
//! produce byte-identical files, LF line endings throughout.

use std::fs;
use std::io::Write;
use std::path::Path;

/// Formats with 12 significant digits and a `.` decimal separator.
pub fn sig(x: f64) -> String {
    sig_n(x, 12)
}

pub fn sig_n(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// CSV accumulator: comment lines are prefixed `#`, rows joined with `,`.
#[derive(Debug, Default)]
pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(&mut self, text: &str) {
        self.lines.push(format!("# {text}"));
    }

    pub fn header(&mut self, columns: &[&str]) {
        self.lines.push(columns.join(","));
    }

    pub fn row(&mut self, fields: &[String]) {
        self.lines.push(fields.join(","));
    }

    pub fn finish(self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

/// Writes to the path, or to stdout when no path was given.
pub fn emit(output: Option<&Path>, content: &str) -> std::io::Result<()> {
    match output {
        Some(path) => fs::write(path, content),
        None => std::io::stdout().write_all(content.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(1.5), "1.50000000000");
        assert_eq!(sig(1.618033988749895), "1.61803398875");
        assert_eq!(sig_n(0.25, 3), "0.250");
        // small magnitudes keep 12 significant digits, not 12 decimals
        assert_eq!(sig(1.234567890123e-5), "0.0000123456789012");
        assert_eq!(sig(123456.789), "123456.789000");
    }

    #[test]
    fn csv_layout() {
        let mut csv = Csv::new();
        csv.comment("meta");
        csv.header(&["a", "b"]);
        csv.row(&["1".into(), "2".into()]);
        assert_eq!(csv.finish(), "# meta\na,b\n1,2\n");
    }
}
