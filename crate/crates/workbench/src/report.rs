//! Deterministic reports.

use std::fmt::Write as _;

use formalpatch_core::patch::{Check, Verdict};
use formalpatch_core::tower::LawCheck;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub name: String,
    pub level: u32,
    pub verdict: &'static str,
    pub witness: Vec<String>,
    #[serde(skip)]
    kind: Verdict,
}

impl Record {
    pub fn new(
        name: impl Into<String>,
        level: u32,
        verdict: Verdict,
        witness: Vec<String>,
    ) -> Record {
        Record {
            name: name.into(),
            level,
            verdict: verdict.label(),
            witness,
            kind: verdict,
        }
    }

    pub fn pass(name: impl Into<String>, level: u32, witness: Vec<String>) -> Record {
        Record::new(name, level, Verdict::Pass, witness)
    }

    /// PASS when `ok`, FAIL otherwise.
    pub fn check(name: impl Into<String>, level: u32, ok: bool, witness: Vec<String>) -> Record {
        Record::new(
            name,
            level,
            if ok { Verdict::Pass } else { Verdict::Fail },
            witness,
        )
    }

    pub fn verdict(&self) -> Verdict {
        self.kind
    }
}

impl From<Check> for Record {
    fn from(c: Check) -> Record {
        Record::new(c.name, c.level, c.verdict, c.witness)
    }
}

impl From<LawCheck> for Record {
    fn from(c: LawCheck) -> Record {
        Record::check(c.law, c.level, c.pass, c.witness.into_iter().collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub instance: String,
    pub status: &'static str,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(command: &str, instance: &str, mut records: Vec<Record>) -> Report {
        records.sort_by(|a, b| (&a.name, a.level).cmp(&(&b.name, b.level)));
        let status = if records.iter().any(|r| r.kind.is_failure()) {
            "FAIL"
        } else if records.iter().any(|r| r.kind == Verdict::Demonstration) {
            "DEMONSTRATION"
        } else {
            "OK"
        };
        Report {
            command: command.to_string(),
            instance: instance.to_string(),
            status,
            records,
        }
    }

    pub fn failed(&self) -> bool {
        self.status == "FAIL"
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed())
    }

    pub fn find(&self, name: &str, level: u32) -> Option<&Record> {
        self.records
            .iter()
            .find(|r| r.name == name && r.level == level)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "instance: {}", self.instance);
        let width = self
            .records
            .iter()
            .map(|r| r.name.chars().count())
            .max()
            .unwrap_or(0);
        for r in &self.records {
            let _ = writeln!(
                out,
                "{:<18} {:<width$}  level {}",
                r.verdict, r.name, r.level
            );
            for w in &r.witness {
                let _ = writeln!(out, "    {w}");
            }
        }
        let _ = writeln!(out, "status: {}", self.status);
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            self.render_json()
        } else {
            self.render_text()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_are_sorted_and_status_follows_failures() {
        let r = Report::new(
            "demo",
            "x",
            vec![
                Record::pass("b", 2, vec![]),
                Record::pass("b", 1, vec![]),
                Record::new("a", 1, Verdict::CertifiedAtDepth, vec![]),
            ],
        );
        let order: Vec<(&str, u32)> = r
            .records
            .iter()
            .map(|x| (x.name.as_str(), x.level))
            .collect();
        assert_eq!(order, vec![("a", 1), ("b", 1), ("b", 2)]);
        assert_eq!(r.exit_code(), 0);
        let demo = Report::new(
            "demo",
            "x",
            vec![Record::new("d", 0, Verdict::Demonstration, vec![])],
        );
        assert_eq!((demo.status, demo.exit_code()), ("DEMONSTRATION", 0));
        let bad = Report::new(
            "demo",
            "x",
            vec![Record::new("u", 1, Verdict::Unstabilized, vec![])],
        );
        assert_eq!(bad.exit_code(), 1);
        assert!(bad.render_json().contains("\"verdict\": \"UNSTABILIZED\""));
    }
}
