//! Check reports, rendered as text or JSON.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Recorded for context; never affects the outcome.
    Info,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actual: Option<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub checks: Vec<Check>,
}

impl Section {
    /// Records `actual` against `expected`; passes iff they are equal.
    pub fn expect(&mut self, name: impl Into<String>, expected: impl ToString, actual: impl ToString) -> bool {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        let ok = expected == actual;
        self.checks.push(Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            expected: Some(expected),
            actual: Some(actual),
            detail: String::new(),
        });
        ok
    }

    pub fn assert(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            expected: None,
            actual: None,
            detail: detail.into(),
        });
        ok
    }

    pub fn info(&mut self, name: impl Into<String>, actual: impl ToString, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: Status::Info,
            expected: None,
            actual: Some(actual.to_string()),
            detail: detail.into(),
        });
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            sections: Vec::new(),
        }
    }

    pub fn section(&mut self, name: impl Into<String>) -> &mut Section {
        self.sections.push(Section {
            name: name.into(),
            checks: Vec::new(),
        });
        self.sections.last_mut().expect("just pushed")
    }

    fn count(&self, status: Status) -> usize {
        self.sections.iter().flat_map(|s| &s.checks).filter(|c| c.status == status).count()
    }

    pub fn failures(&self) -> usize {
        self.count(Status::Fail)
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Renders a report. Output depends only on the report's contents.
pub fn emit_report(r: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => render_text(r),
    }
}

fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "== {} ==", r.title);
    for s in &r.sections {
        let _ = writeln!(out, "[{}]", s.name);
        for c in &s.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Info => "INFO",
            };
            let _ = write!(out, "  {tag} {}", c.name);
            match (&c.expected, &c.actual) {
                (Some(e), Some(a)) if c.status == Status::Fail => {
                    let _ = write!(out, ": expected {e}, got {a}");
                }
                (_, Some(a)) => {
                    let _ = write!(out, ": {a}");
                }
                _ => {}
            }
            if !c.detail.is_empty() {
                let _ = write!(out, " ({})", c.detail);
            }
            out.push('\n');
        }
    }
    let checked = r.count(Status::Pass) + r.count(Status::Fail);
    let plural = |n: usize| if n == 1 { "check" } else { "checks" };
    if r.passed() {
        let _ = writeln!(out, "all checks passed ({checked} {})", plural(checked));
    } else {
        let _ = writeln!(out, "{} of {checked} {} failed", r.failures(), plural(checked));
    }
    out
}
