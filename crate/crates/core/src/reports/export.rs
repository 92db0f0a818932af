//! Report documents: XML with one `<row>` per record, or one JSON object per line.

use std::fmt::Write as _;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::{Map, Value};

use super::{MoodTimeline, OutletProfile, StyleDistance, TopicAggregate};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Xml,
    Ndjson,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "xml" => Ok(ExportFormat::Xml),
            "ndjson" | "jsonl" => Ok(ExportFormat::Ndjson),
            other => Err(format!("unknown export format `{other}` (expected xml or ndjson)")),
        }
    }
}

/// A report ready for export: a type name, a timestamp, and flat rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub kind: String,
    pub generated_at: DateTime<Utc>,
    pub rows: Vec<Map<String, Value>>,
}

fn row_of(v: impl Serialize) -> Map<String, Value> {
    match serde_json::to_value(v).expect("report rows serialize") {
        Value::Object(m) => m,
        _ => unreachable!("rows are structs"),
    }
}

impl Report {
    pub fn new<T: Serialize>(kind: &str, generated_at: DateTime<Utc>, rows: &[T]) -> Self {
        Report {
            kind: kind.to_string(),
            generated_at,
            rows: rows.iter().map(row_of).collect(),
        }
    }

    pub fn topics(rows: &[TopicAggregate], at: DateTime<Utc>) -> Self {
        Self::new("topics", at, rows)
    }

    pub fn outlets(rows: &[OutletProfile], at: DateTime<Utc>) -> Self {
        Self::new("outlets", at, rows)
    }

    pub fn style_distances(rows: &[StyleDistance], at: DateTime<Utc>) -> Self {
        Self::new("style_distances", at, rows)
    }

    /// One row per (mood, day).
    pub fn moods(timelines: &[MoodTimeline], at: DateTime<Utc>) -> Self {
        let mut rows = Vec::new();
        for tl in timelines {
            for p in &tl.points {
                let mut row = Map::new();
                row.insert("mood".into(), Value::from(tl.mood.as_str()));
                row.extend(row_of(p));
                rows.push(row);
            }
        }
        Report {
            kind: "moods".into(),
            generated_at: at,
            rows,
        }
    }

    /// The rows as a JSON array, for storing on a blackboard item.
    pub fn rows_value(&self) -> Value {
        Value::Array(self.rows.iter().cloned().map(Value::Object).collect())
    }

    pub fn from_rows(kind: &str, generated_at: DateTime<Utc>, rows: &Value) -> Self {
        let rows = rows
            .as_array()
            .map(|a| a.iter().filter_map(|r| r.as_object().cloned()).collect())
            .unwrap_or_default();
        Report {
            kind: kind.to_string(),
            generated_at,
            rows,
        }
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\t' => out.push_str("&#9;"),
            _ => out.push(c),
        }
    }
    out
}

fn attr_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => None,
        Value::String(s) => Some(s.clone()),
        other => Some(other.to_string()),
    }
}

/// Serialize a report. The output depends only on the report's contents.
pub fn export(report: &Report, format: ExportFormat) -> String {
    let mut out = String::new();
    match format {
        ExportFormat::Xml => {
            out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
            writeln!(
                out,
                "<report type=\"{}\" generated_at=\"{}\">",
                escape(&report.kind),
                report.generated_at.to_rfc3339_opts(SecondsFormat::Secs, true)
            )
            .unwrap();
            for row in &report.rows {
                out.push_str("  <row");
                for (k, v) in row {
                    // absent values (a mean over nothing) are omitted
                    if let Some(text) = attr_text(v) {
                        write!(out, " {}=\"{}\"", k, escape(&text)).unwrap();
                    }
                }
                out.push_str("/>\n");
            }
            out.push_str("</report>\n");
        }
        ExportFormat::Ndjson => {
            for row in &report.rows {
                out.push_str(&serde_json::to_string(row).expect("rows serialize"));
                out.push('\n');
            }
        }
    }
    out
}
