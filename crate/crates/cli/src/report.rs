//! Report model and its human, CSV and structured renderings.

use std::fmt::Write as _;

use serde::Serialize;

/// Failure classes and the exit codes they map to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureClass {
    Numeric,
    Convergence,
}

impl FailureClass {
    pub fn exit_code(self) -> i32 {
        match self {
            FailureClass::Numeric => 3,
            FailureClass::Convergence => 4,
        }
    }

    pub fn of(err: &lw6::Error) -> Self {
        if err.is_convergence_failure() {
            FailureClass::Convergence
        } else {
            FailureClass::Numeric
        }
    }
}

pub const EXIT_CONFIG: i32 = 2;

/// One table cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Flag(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i32> for Cell {
    fn from(x: i32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Flag(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// Negative zero prints as zero; everything else in shortest round-trip form.
fn full(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:e}")
    }
}

fn short(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.6e}")
    }
}

impl Cell {
    fn render(&self, precise: bool) -> String {
        match self {
            Cell::Num(x) if precise => full(*x),
            Cell::Num(x) => short(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => if *b { "pass" } else { "FAIL" }.into(),
        }
    }
}

/// Labeled table. Every numeric table ends with `tolerance` and `pass`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }
}

/// Pass/fail verdict of one check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub class: FailureClass,
    /// `None` when the computation behind the check failed.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn numeric(name: &str, residual: f64, tolerance: f64) -> Self {
        Self::with_class(name, FailureClass::Numeric, residual, tolerance)
    }

    pub fn convergence(name: &str, residual: f64, tolerance: f64) -> Self {
        Self::with_class(name, FailureClass::Convergence, residual, tolerance)
    }

    fn with_class(name: &str, class: FailureClass, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            class,
            residual: Some(residual),
            tolerance,
            pass: residual <= tolerance,
            detail: None,
        }
    }

    pub fn failed(name: &str, err: &lw6::Error) -> Self {
        Check {
            name: name.into(),
            class: FailureClass::of(err),
            residual: None,
            tolerance: 0.0,
            pass: false,
            detail: Some(err.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub task: String,
    pub quick: bool,
    /// Effective configuration as sorted `section.key = value` pairs.
    pub scenario: Vec<(String, String)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub timings: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub metadata: Metadata,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Human,
    Csv,
    Structured,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// 0 when every check passes, otherwise the code of the most severe
    /// failing class (convergence over numeric).
    pub fn exit_code(&self) -> i32 {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.class).max().map_or(0, FailureClass::exit_code)
    }

    fn summary_table(&self) -> Table {
        let mut t = Table::new("checks", &["check", "class", "residual", "tolerance", "pass"]);
        for c in &self.checks {
            let class = match c.class {
                FailureClass::Numeric => "numeric",
                FailureClass::Convergence => "convergence",
            };
            let residual = match (&c.residual, &c.detail) {
                (Some(r), _) => Cell::Num(*r),
                (None, Some(d)) => Cell::Text(format!("error: {d}")),
                (None, None) => Cell::Text("error".into()),
            };
            t.push(vec![c.name.as_str().into(), class.into(), residual, c.tolerance.into(), c.pass.into()]);
        }
        t
    }

    pub fn emit(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Human => self.human().into_bytes(),
            Format::Csv => self.csv(),
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s.into_bytes()
            }
        }
    }

    fn human(&self) -> String {
        let m = &self.metadata;
        let mut out = String::new();
        let _ = writeln!(out, "{} {} : {}{}", m.tool, m.version, m.task, if m.quick { " (quick)" } else { "" });
        out.push_str("\n[scenario]\n");
        for (k, v) in &m.scenario {
            let _ = writeln!(out, "  {k} = {v}");
        }
        if !m.timings.is_empty() {
            out.push_str("\n[timings]\n");
            for (k, v) in &m.timings {
                let _ = writeln!(out, "  {k} = {v:.3} s");
            }
        }
        for t in self.tables.iter().chain(std::iter::once(&self.summary_table())) {
            let _ = writeln!(out, "\n[{}]", t.name);
            let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(|c| c.render(false)).collect()).collect();
            let widths: Vec<usize> = (0..t.columns.len())
                .map(|j| cells.iter().map(|r| r[j].chars().count()).chain([t.columns[j].chars().count()]).max().unwrap_or(0))
                .collect();
            let line = |items: &[String]| {
                items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect::<Vec<_>>().join("  ")
            };
            let _ = writeln!(out, "{}", line(&t.columns).trim_end());
            for r in &cells {
                let _ = writeln!(out, "{}", line(r).trim_end());
            }
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        let _ = writeln!(
            out,
            "\nsummary: {} of {} checks passed, exit {}",
            self.checks.len() - failed,
            self.checks.len(),
            self.exit_code()
        );
        out
    }

    /// One block per table, each with a header row whose first column is
    /// `table`, blocks separated by an empty line. The last block is the
    /// check summary.
    fn csv(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let tables: Vec<Table> = self.tables.iter().cloned().chain([self.summary_table()]).collect();
        for (i, t) in tables.iter().enumerate() {
            if i > 0 {
                out.push(b'\n');
            }
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            let header = std::iter::once("table").chain(t.columns.iter().map(String::as_str));
            w.write_record(header).expect("write to memory");
            for r in &t.rows {
                let row = std::iter::once(t.name.clone()).chain(r.iter().map(|c| c.render(true)));
                w.write_record(row).expect("write to memory");
            }
            out.extend(w.into_inner().expect("flush to memory"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut t = Table::new("demo", &["x", "y", "tolerance", "pass"]);
        t.push(vec![1.5.into(), (-0.0).into(), 1e-8.into(), true.into()]);
        Report {
            metadata: Metadata {
                tool: "lw6".into(),
                version: "0".into(),
                task: "verify".into(),
                quick: false,
                scenario: vec![("charge.e".into(), "1".into())],
                timings: vec![],
            },
            tables: vec![t],
            checks: vec![Check::numeric("a", 1e-9, 1e-8), Check::convergence("b", 0.5, 0.3)],
        }
    }

    #[test]
    fn exit_code_prefers_convergence() {
        let mut r = sample();
        assert_eq!(r.exit_code(), 4);
        r.checks[1].pass = true;
        assert_eq!(r.exit_code(), 0);
        r.checks[0].pass = false;
        assert_eq!(r.exit_code(), 3);
    }

    #[test]
    fn csv_has_headers_and_lf() {
        let text = String::from_utf8(sample().emit(Format::Csv)).unwrap();
        assert!(!text.contains('\r'));
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("table,x,y,tolerance,pass"));
        assert_eq!(lines.next(), Some("demo,1.5e0,0,1e-8,pass"));
        assert_eq!(lines.next(), Some(""));
        assert_eq!(lines.next(), Some("table,check,class,residual,tolerance,pass"));
    }

    #[test]
    fn structured_output_is_json() {
        let v: serde_json::Value = serde_json::from_slice(&sample().emit(Format::Structured)).unwrap();
        assert_eq!(v["checks"][1]["pass"], false);
        assert_eq!(v["tables"][0]["rows"][0][0], 1.5);
    }
}
