//! Structured check results.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// Every instance of the clause needed structure missing from the window.
    Unstateable,
    /// Stateable, but there was nothing to quantify over.
    Vacuous,
    /// Reported for information; never fails a run.
    Info,
    Fail,
    /// Malformed data (dangling ids, wrong typing), distinct from a law violation.
    Structural,
}

impl Status {
    pub fn is_failure(self) -> bool {
        matches!(self, Status::Fail | Status::Structural)
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Unstateable => "unstateable",
            Status::Vacuous => "vacuous",
            Status::Info => "info",
            Status::Fail => "FAIL",
            Status::Structural => "STRUCTURAL",
        }
    }
}

/// How many instances a clause was evaluated on, and how many could not be stated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub checked: u64,
    pub unstateable: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Line {
    /// Stable check identifier, e.g. `elementary.diagonal-adjunction`.
    pub check: String,
    pub status: Status,
    pub coverage: Coverage,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Line {
    pub fn is_failure(&self) -> bool {
        self.status.is_failure()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub subject: String,
    pub lines: Vec<Line>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Report {
            subject: subject.into(),
            lines: Vec::new(),
        }
    }

    pub fn push(&mut self, line: Line) {
        self.lines.push(line);
    }

    /// Append another report's lines, prefixing their check ids.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut l in other.lines {
            if !prefix.is_empty() {
                l.check = format!("{prefix}/{}", l.check);
            }
            self.lines.push(l);
        }
    }

    pub fn passed(&self) -> bool {
        !self.lines.iter().any(Line::is_failure)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Line> {
        self.lines.iter().filter(|l| l.is_failure())
    }

    pub fn line(&self, check: &str) -> Option<&Line> {
        self.lines.iter().find(|l| l.check == check)
    }

    pub fn has_structural(&self) -> bool {
        self.lines.iter().any(|l| l.status == Status::Structural)
    }

    pub fn count(&self, status: Status) -> usize {
        self.lines.iter().filter(|l| l.status == status).count()
    }

    pub fn totals(&self) -> Coverage {
        let mut c = Coverage::default();
        for l in &self.lines {
            c.checked += l.coverage.checked;
            c.unstateable += l.coverage.unstateable;
        }
        c
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "report: {}", self.subject)?;
        for l in &self.lines {
            write!(
                f,
                "  [{:>11}] {} ({} checked, {} unstateable) {}",
                l.status.label(),
                l.check,
                l.coverage.checked,
                l.coverage.unstateable,
                l.detail
            )?;
            if let Some(w) = &l.witness {
                write!(f, " | witness: {w}")?;
            }
            writeln!(f)?;
        }
        let t = self.totals();
        writeln!(
            f,
            "  totals: {} lines, {} pass, {} fail, {} structural, {} unstateable, {} vacuous, {} info; {} instances checked, {} unstateable",
            self.lines.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Structural),
            self.count(Status::Unstateable),
            self.count(Status::Vacuous),
            self.count(Status::Info),
            t.checked,
            t.unstateable
        )
    }
}

/// Accumulates one clause: instances checked, unstateable instances, first witness.
#[derive(Debug)]
pub struct Tally {
    check: String,
    detail: String,
    coverage: Coverage,
    witness: Option<String>,
    structural: bool,
}

impl Tally {
    pub fn new(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Tally {
            check: check.into(),
            detail: detail.into(),
            coverage: Coverage::default(),
            witness: None,
            structural: false,
        }
    }

    pub fn ok(&mut self) {
        self.coverage.checked += 1;
    }

    pub fn ok_n(&mut self, n: u64) {
        self.coverage.checked += n;
    }

    pub fn skip(&mut self) {
        self.coverage.unstateable += 1;
    }

    pub fn fail(&mut self, witness: impl FnOnce() -> String) {
        self.coverage.checked += 1;
        if self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    pub fn structural(&mut self, witness: impl FnOnce() -> String) {
        self.structural = true;
        self.fail(witness);
    }

    /// Record the outcome of one instance.
    pub fn check(&mut self, holds: bool, witness: impl FnOnce() -> String) {
        if holds {
            self.ok();
        } else {
            self.fail(witness);
        }
    }

    pub fn merge(&mut self, other: Tally) {
        self.coverage.checked += other.coverage.checked;
        self.coverage.unstateable += other.coverage.unstateable;
        self.structural |= other.structural;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
    }

    pub fn failed(&self) -> bool {
        self.witness.is_some()
    }

    pub fn finish(self) -> Line {
        let status = if self.structural {
            Status::Structural
        } else if self.witness.is_some() {
            Status::Fail
        } else if self.coverage.checked > 0 {
            Status::Pass
        } else if self.coverage.unstateable > 0 {
            Status::Unstateable
        } else {
            Status::Vacuous
        };
        Line {
            check: self.check,
            status,
            coverage: self.coverage,
            detail: self.detail,
            witness: self.witness,
        }
    }

    /// Finish as an informational line: a failing instance is reported, not counted.
    pub fn finish_info(self) -> Line {
        let mut l = self.finish();
        if l.status == Status::Fail || l.status == Status::Pass {
            if l.status == Status::Fail {
                l.detail = format!("{} (does not hold)", l.detail);
            }
            l.status = Status::Info;
        }
        l
    }
}
