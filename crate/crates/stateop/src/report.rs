//! Report structures and their JSON and Markdown renderings.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;
use stateop_core::jc::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceReport {
    pub eps_eq: f64,
    pub eps_psd: f64,
}

impl From<&Tolerances> for ToleranceReport {
    fn from(tol: &Tolerances) -> Self {
        Self {
            eps_eq: tol.eps_eq,
            eps_psd: tol.eps_psd,
        }
    }
}

/// Output of a single command.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub seed: u64,
    pub tolerances: ToleranceReport,
    pub result: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremResult {
    pub name: String,
    pub status: Status,
    /// Number of instances examined.
    pub checked: u64,
    pub witnesses: Vec<Value>,
    pub details: Value,
    /// Wall-clock time; reported in Markdown only so JSON stays reproducible.
    #[serde(skip)]
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub command: String,
    pub status: Status,
    pub seed: u64,
    pub tolerances: ToleranceReport,
    pub theorems: Vec<TheoremResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Markdown,
}

pub enum Output {
    Single(Report),
    Suite(SuiteReport),
}

impl Output {
    pub fn status(&self) -> Status {
        match self {
            Output::Single(r) => r.status,
            Output::Suite(s) => s.status,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Output::Single(r), Format::Json) => json(r),
            (Output::Suite(s), Format::Json) => json(s),
            (Output::Single(r), Format::Markdown) => single_markdown(r),
            (Output::Suite(s), Format::Markdown) => suite_markdown(s),
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn scalar(value: &Value) -> Option<String> {
    match value {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) => items
            .iter()
            .map(scalar)
            .collect::<Option<Vec<_>>>()
            .map(|parts| format!("[{}]", parts.join(", "))),
        Value::Object(_) => None,
    }
}

fn bullets(out: &mut String, value: &Value, depth: usize) {
    let indent = "  ".repeat(depth);
    match value {
        Value::Object(map) => {
            for (key, v) in map {
                match scalar(v) {
                    Some(s) => {
                        let _ = writeln!(out, "{indent}- **{key}**: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{indent}- **{key}**:");
                        bullets(out, v, depth + 1);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                match scalar(v) {
                    Some(s) => {
                        let _ = writeln!(out, "{indent}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{indent}- #{i}");
                        bullets(out, v, depth + 1);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{indent}- {}", scalar(other).unwrap_or_default());
        }
    }
}

fn single_markdown(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}\n", r.command);
    let _ = writeln!(out, "- status: **{}**", r.status.as_str());
    let _ = writeln!(out, "- seed: {}", r.seed);
    let _ = writeln!(out, "- tolerances: eps_eq = {:e}, eps_psd = {:e}\n", r.tolerances.eps_eq, r.tolerances.eps_psd);
    let _ = writeln!(out, "## Result\n");
    bullets(&mut out, &r.result, 0);
    out
}

fn suite_markdown(s: &SuiteReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# suite\n");
    let _ = writeln!(out, "- status: **{}**", s.status.as_str());
    let _ = writeln!(out, "- seed: {}", s.seed);
    let _ = writeln!(out, "- tolerances: eps_eq = {:e}, eps_psd = {:e}\n", s.tolerances.eps_eq, s.tolerances.eps_psd);
    let _ = writeln!(out, "| check | status | instances | time (ms) |");
    let _ = writeln!(out, "|---|---|---:|---:|");
    for t in &s.theorems {
        let _ = writeln!(out, "| {} | {} | {} | {} |", t.name, t.status.as_str(), t.checked, t.elapsed_ms);
    }
    for t in &s.theorems {
        let _ = writeln!(out, "\n## {}\n", t.name);
        bullets(&mut out, &t.details, 0);
        if !t.witnesses.is_empty() {
            let _ = writeln!(out, "\nWitnesses:\n");
            bullets(&mut out, &Value::Array(t.witnesses.clone()), 0);
        }
    }
    out
}
