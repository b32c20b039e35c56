//! Report plumbing: one JSON object under `--json`, readable lines otherwise.

use serde_json::Value;

use crate::Global;

pub struct Report {
    pub json: Value,
    /// Human-readable lines printed without `--json`.
    pub lines: Vec<String>,
    pub exit_code: u8,
}

impl Report {
    pub fn ok(json: Value, lines: Vec<String>) -> Self {
        Report { json, lines, exit_code: 0 }
    }
}

pub fn emit(report: &Report, global: Global) {
    if global.json {
        println!("{}", report.json);
    } else {
        for line in &report.lines {
            println!("{line}");
        }
    }
}

/// Progress note, silenced by `--quiet`.
pub fn note(global: Global, msg: impl AsRef<str>) {
    if !global.quiet {
        eprintln!("{}", msg.as_ref());
    }
}
