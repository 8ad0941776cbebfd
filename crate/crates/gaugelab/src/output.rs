//! Bit-stable CSV and JSON emission.
//!
//! Every float is rounded to 12 significant digits before it is written, JSON
//! objects have sorted keys, and nothing time- or host-dependent ends up in a
//! file, so identical inputs give identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gaugelab_core::InvarianceReport;
use serde_json::{json, Map, Value};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Round to [`SIGNIFICANT_DIGITS`] significant digits. Non-finite values pass through.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        // Normalises -0.0 as well.
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Rounded JSON number; NaN and infinities become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
}

/// Rounded number as CSV text, using the same shortest representation as JSON.
pub fn csv_num(x: f64) -> String {
    match serde_json::Number::from_f64(round_sig(x)) {
        Some(n) => n.to_string(),
        None if x.is_nan() => "NaN".to_string(),
        None if x > 0.0 => "inf".to_string(),
        None => "-inf".to_string(),
    }
}

pub fn vec_json(v: gaugelab_core::Vec3) -> Value {
    Value::Array(v.to_array().iter().map(|&c| num(c)).collect())
}

#[derive(Clone, Debug)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

#[derive(Clone, Debug)]
pub struct CsvTable {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(header: &[&'static str]) -> Self {
        CsvTable {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "csv row width");
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| Cell::Num(x)).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(x) => out.push_str(&csv_num(*x)),
                    Cell::Int(k) => write!(out, "{k}").unwrap(),
                    Cell::Text(s) => out.push_str(s),
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn render_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialise");
    s.push('\n');
    s
}

pub fn report_json(report: &InvarianceReport) -> Value {
    let list = |devs: &[gaugelab_core::Deviation]| {
        Value::Array(
            devs.iter()
                .map(|d| json!({ "name": d.name, "max_dev": num(d.max_dev) }))
                .collect(),
        )
    };
    json!({
        "matched": list(&report.matched),
        "differed": list(&report.differed),
        "tolerance": num(report.tolerance),
        "pass": report.pass,
    })
}

/// Serialize an invariance report; a report with no entries at all is refused.
pub fn emit_report(report: &InvarianceReport) -> Result<String> {
    if report.matched.is_empty() && report.differed.is_empty() {
        bail!("refusing to emit an invariance report with no matched and no differed quantities");
    }
    Ok(render_json(&report_json(report)))
}

/// Which file kinds a run writes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Formats { csv: true, json: true }
    }
}

impl Formats {
    pub fn parse(list: &str) -> Result<Self> {
        let mut f = Formats {
            csv: false,
            json: false,
        };
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "csv" => f.csv = true,
                "json" => f.json = true,
                other => bail!("--format: unknown format `{other}` (expected csv, json)"),
            }
        }
        if !f.csv && !f.json {
            bail!("--format: at least one of csv, json is required");
        }
        Ok(f)
    }
}

/// Output directory plus the list of files written so far.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    formats: Formats,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path, formats: Formats) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("--out: cannot create {}", root.display()))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            formats,
            written: Vec::new(),
        })
    }

    pub fn formats(&self) -> Formats {
        self.formats
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.root.join(name);
        fs::write(&path, contents).with_context(|| format!("--out: cannot write {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, table: &CsvTable) -> Result<()> {
        if self.formats.csv {
            self.write(name, &table.render())?;
        }
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &Value) -> Result<()> {
        if self.formats.json {
            self.write(name, &render_json(value))?;
        }
        Ok(())
    }

    pub fn report(&mut self, name: &str, report: &InvarianceReport) -> Result<()> {
        let text = emit_report(report)?;
        if self.formats.json {
            self.write(name, &text)?;
        }
        Ok(())
    }
}

/// Sorted-key object from pairs.
pub fn object<I: IntoIterator<Item = (&'static str, Value)>>(pairs: I) -> Value {
    Value::Object(
        pairs
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect::<Map<_, _>>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use gaugelab_core::Deviation;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(1.234_567_890_123_456), 1.234_567_890_12);
        assert_eq!(round_sig(-0.0), 0.0);
        assert_eq!(csv_num(0.1 + 0.2), "0.3");
        assert_eq!(csv_num(1e-20), "1e-20");
        assert_eq!(csv_num(f64::NAN), "NaN");
        assert_eq!(num(f64::INFINITY), Value::Null);
    }

    #[test]
    fn report_is_sorted_and_stable() {
        let r = InvarianceReport::new(
            vec![Deviation::new("r", 1e-12), Deviation::new("T", 2e-13)],
            vec![Deviation::new("U", 50.000_000_000_000_2)],
            1e-8,
        )
        .unwrap();
        let a = emit_report(&r).unwrap();
        assert_eq!(a, emit_report(&r).unwrap());
        let keys: Vec<_> = ["\"differed\"", "\"matched\"", "\"pass\"", "\"tolerance\""]
            .iter()
            .map(|k| a.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(a.contains("\"max_dev\": 50.0"));
        assert!(a.contains("\"pass\": true"));
    }

    #[test]
    fn degenerate_report_is_refused() {
        let r = InvarianceReport {
            matched: vec![],
            differed: vec![],
            tolerance: 1e-8,
            pass: true,
        };
        assert!(emit_report(&r).is_err());
    }

    #[test]
    fn formats_parse() {
        assert_eq!(Formats::parse("csv").unwrap(), Formats { csv: true, json: false });
        assert_eq!(Formats::parse("json, csv").unwrap(), Formats::default());
        assert!(Formats::parse("xml").is_err());
        assert!(Formats::parse("").is_err());
    }

    #[test]
    fn csv_rows() {
        let mut t = CsvTable::new(&["a", "b", "c"]);
        t.push(vec![Cell::Num(0.5), Cell::Int(3), Cell::Text("x".into())]);
        assert_eq!(t.render(), "a,b,c\n0.5,3,x\n");
    }
}
