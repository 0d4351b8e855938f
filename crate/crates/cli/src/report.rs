use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use topmon::net::Outcome;
use topmon::{BoundedVerdict, Verdict};

pub const SCHEMA: &str = "topmon-report/1";

/// The verdict a check is expected to produce. Counterexample checks
/// expect `FAIL`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Expect {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    #[serde(rename = "ref")]
    pub statement: String,
    pub verdict: &'static str,
    pub expected: Expect,
    pub params: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip)]
    outcome: Outcome,
}

impl Check {
    pub fn new(id: &str, statement: &str, outcome: Outcome) -> Self {
        Check {
            id: id.to_string(),
            statement: statement.to_string(),
            verdict: verdict_name(outcome),
            expected: Expect::Pass,
            params: BTreeMap::new(),
            witness: None,
            outcome,
        }
    }

    pub fn from_bool(id: &str, statement: &str, ok: bool) -> Self {
        Check::new(id, statement, if ok { Outcome::Pass } else { Outcome::Fail })
    }

    pub fn expect_fail(mut self) -> Self {
        self.expected = Expect::Fail;
        self
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn witness(mut self, text: impl Into<String>) -> Self {
        self.witness = Some(text.into());
        self
    }

    /// A `FAIL` where `PASS` was expected, or the reverse.
    pub fn is_unexpected(&self) -> bool {
        matches!(
            (self.expected, self.outcome),
            (Expect::Pass, Outcome::Fail) | (Expect::Fail, Outcome::Pass)
        )
    }
}

fn verdict_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "PASS",
        Outcome::Fail => "FAIL",
        Outcome::Inconclusive => "INCONCLUSIVE",
    }
}

pub fn outcome_of<E>(v: &BoundedVerdict<E>) -> Outcome {
    match v.status {
        Verdict::Yes => Outcome::Pass,
        Verdict::No => Outcome::Fail,
        Verdict::Unknown => Outcome::Inconclusive,
    }
}

pub fn list<T: std::fmt::Display>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub command: String,
    pub instance: String,
    pub settings: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub exit_code: i32,
}

impl SuiteReport {
    pub fn new(command: &str, instance: &str, settings: BTreeMap<String, String>) -> Self {
        SuiteReport {
            schema: SCHEMA,
            command: command.to_string(),
            instance: instance.to_string(),
            settings,
            checks: Vec::new(),
            exit_code: 0,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Sorts checks by id and fixes the exit code.
    pub fn finish(mut self) -> Self {
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
        self.exit_code = i32::from(self.checks.iter().any(Check::is_unexpected));
        self
    }

    pub fn count(&self, o: Outcome) -> usize {
        self.checks.iter().filter(|c| c.outcome == o).count()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let settings: Vec<String> = self.settings.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "SUITE {} instance={} {}", self.command, self.instance, settings.join(" "));
        for c in &self.checks {
            let _ = write!(out, "CHECK {} {} ref={:?}", c.id, c.verdict, c.statement);
            for (k, v) in &c.params {
                let _ = write!(out, " {k}={}", quote(v));
            }
            if c.expected == Expect::Fail {
                out.push_str(" expect=FAIL");
            }
            if let Some(w) = &c.witness {
                let _ = write!(out, " witness={w:?}");
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "SUMMARY pass={} fail={} inconclusive={} unexpected={} exit={}",
            self.count(Outcome::Pass),
            self.count(Outcome::Fail),
            self.count(Outcome::Inconclusive),
            self.checks.iter().filter(|c| c.is_unexpected()).count(),
            self.exit_code
        );
        out
    }

    pub fn render_structured(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Leaves simple tokens bare and quotes anything with spaces or quotes.
fn quote(v: &str) -> String {
    if !v.is_empty() && v.chars().all(|c| !c.is_whitespace() && c != '"' && c != '=') {
        v.to_string()
    } else {
        format!("{v:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverted_expectations_drive_the_exit_code() {
        let mut r = SuiteReport::new("demo", "x", BTreeMap::new());
        r.push(Check::new("b", "s", Outcome::Fail).expect_fail());
        r.push(Check::new("a", "s", Outcome::Pass));
        r.push(Check::new("c", "s", Outcome::Inconclusive));
        let r = r.finish();
        assert_eq!(r.exit_code, 0);
        assert_eq!(r.checks[0].id, "a");

        let mut r = SuiteReport::new("demo", "x", BTreeMap::new());
        r.push(Check::new("a", "s", Outcome::Pass).expect_fail());
        assert_eq!(r.finish().exit_code, 1);
    }

    #[test]
    fn text_lines_follow_the_check_format() {
        let mut r = SuiteReport::new("demo", "x", BTreeMap::new());
        r.push(Check::new("a.b", "a statement", Outcome::Pass).param("k", 3).param("note", "two words"));
        let text = r.finish().render_text();
        assert!(text.contains("CHECK a.b PASS ref=\"a statement\" k=3 note=\"two words\"\n"), "{text}");
    }
}
