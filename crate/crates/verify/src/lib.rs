//! Pass/fail reporting for the acceptance run.

use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

/// What a criterion found, before its runtime budget is applied.
#[derive(Debug, Default)]
pub struct Findings {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Findings {
    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    pub fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug)]
pub struct Verdict {
    pub id: u32,
    pub pass: bool,
    pub line: String,
    pub notes: Vec<String>,
}

#[derive(Debug, Default)]
pub struct Report {
    verdicts: Vec<Verdict>,
}

impl Report {
    /// Runs one criterion, prints its verdict line and any notes.
    pub fn run(
        &mut self,
        id: u32,
        title: &str,
        budget: Duration,
        body: impl FnOnce(&mut Findings),
    ) -> &Verdict {
        let mut findings = Findings::default();
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| body(&mut findings)));
        let elapsed = start.elapsed();
        if let Err(panic) = outcome {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            findings.failures.push(format!("panicked: {msg}"));
        }
        if elapsed > budget {
            findings
                .failures
                .push(format!("took {:.2?}, budget {:.0?}", elapsed, budget));
        }
        let pass = findings.passed();
        let mut line = format!(
            "{} criterion {id}: {title} ({:.2?} of {:.0?})",
            if pass { "PASS" } else { "FAIL" },
            elapsed,
            budget
        );
        if !pass {
            write!(line, ": {}", findings.failures.join("; ")).unwrap();
        }
        println!("{line}");
        for n in &findings.notes {
            println!("    {n}");
        }
        self.verdicts.push(Verdict {
            id,
            pass,
            line,
            notes: findings.notes,
        });
        self.verdicts.last().unwrap()
    }

    pub fn verdicts(&self) -> &[Verdict] {
        &self.verdicts
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn summary(&self) -> String {
        let passed = self.verdicts.iter().filter(|v| v.pass).count();
        let failed: Vec<String> = self
            .verdicts
            .iter()
            .filter(|v| !v.pass)
            .map(|v| v.id.to_string())
            .collect();
        if failed.is_empty() {
            format!(
                "acceptance: {passed}/{} criteria passed",
                self.verdicts.len()
            )
        } else {
            format!(
                "acceptance: {passed}/{} criteria passed; failed: {}",
                self.verdicts.len(),
                failed.join(", ")
            )
        }
    }
}
