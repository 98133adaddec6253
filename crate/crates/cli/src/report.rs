//! Reports: metadata plus a flat check list, and the exit code they imply.

use std::collections::BTreeMap;

use ncgarside::report::{Check, Status};
use serde::Serialize;
use serde_json::Value;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub command: String,
    pub metadata: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub timings_ms: BTreeMap<String, u128>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl Serialize) {
        self.metadata.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn extend(&mut self, prefix: &str, checks: impl IntoIterator<Item = Check>) {
        for mut c in checks {
            if !prefix.is_empty() {
                c.name = format!("{prefix}.{}", c.name);
            }
            self.checks.push(c);
        }
    }

    pub fn exit_code(&self, strict: bool) -> i32 {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            EXIT_FAIL
        } else if strict && self.checks.iter().any(|c| c.status == Status::Unknown) {
            EXIT_UNKNOWN
        } else {
            EXIT_OK
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.command);
        for (k, v) in &self.metadata {
            s.push_str(&format!("  {k}: {v}\n"));
        }
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Unknown => "unknown",
            };
            match &c.witness {
                Some(w) => s.push_str(&format!("  [{tag}] {} ({w})\n", c.name)),
                None => s.push_str(&format!("  [{tag}] {}\n", c.name)),
            }
        }
        for (k, v) in &self.timings_ms {
            s.push_str(&format!("  time {k}: {v} ms\n"));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let mut r = Report::new("x");
        r.checks.push(Check::pass("a"));
        assert_eq!(r.exit_code(true), EXIT_OK);
        r.checks.push(Check::unknown("b", "bounded"));
        assert_eq!(r.exit_code(false), EXIT_OK);
        assert_eq!(r.exit_code(true), EXIT_UNKNOWN);
        r.checks.push(Check::fail("c", "w"));
        assert_eq!(r.exit_code(true), EXIT_FAIL);
    }
}
