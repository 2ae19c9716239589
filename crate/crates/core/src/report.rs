//! Deterministic verification reports.
//!
//! A report is a flat list of named checks. Rendering sorts the checks by
//! name and never embeds timing data, so a run with a fixed scenario and seed
//! produces byte-identical report files. Wall-clock timing belongs on stderr,
//! not in the document.

use std::fmt::Write as _;

/// One verified identity: name, the law it instantiates, outcome, and a
/// witness element when (and only when) it failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub law: String,
    pub passed: bool,
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>, law: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            law: law.into(),
            passed: true,
            witness: None,
        }
    }

    pub fn fail(
        name: impl Into<String>,
        law: impl Into<String>,
        witness: impl Into<String>,
    ) -> Self {
        Check {
            name: name.into(),
            law: law.into(),
            passed: false,
            witness: Some(witness.into()),
        }
    }

    /// Builds from an optional failure witness.
    pub fn from_witness(
        name: impl Into<String>,
        law: impl Into<String>,
        witness: Option<String>,
    ) -> Self {
        match witness {
            None => Check::pass(name, law),
            Some(w) => Check::fail(name, law, w),
        }
    }
}

/// A full verification report for one scenario run.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub scenario: String,
    pub kind: String,
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    /// machine-readable key/value facts (dimensions, catalogue sizes, ...)
    pub info: Vec<(String, String)>,
}

impl Report {
    pub fn new(scenario: impl Into<String>, kind: impl Into<String>) -> Self {
        Report {
            scenario: scenario.into(),
            kind: kind.into(),
            seed: None,
            checks: Vec::new(),
            info: Vec::new(),
        }
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.info.push((key.into(), value.into()));
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    /// Prefixes every contained check name, to namespace sub-suites.
    pub fn extend_prefixed(&mut self, prefix: &str, checks: impl IntoIterator<Item = Check>) {
        for mut c in checks {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn totals(&self) -> (usize, usize) {
        let pass = self.checks.iter().filter(|c| c.passed).count();
        (pass, self.checks.len() - pass)
    }

    /// Renders the canonical report document: checks sorted by name, no
    /// timing, stable quoting.
    pub fn render(&self) -> String {
        let mut checks = self.checks.clone();
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let (pass, fail) = self.totals();
        let mut out = String::new();
        let _ = writeln!(out, "report {{");
        let _ = writeln!(out, "  scenario = {:?}", self.scenario);
        let _ = writeln!(out, "  kind = {:?}", self.kind);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "  seed = {seed}");
        }
        if !self.info.is_empty() {
            let mut info = self.info.clone();
            info.sort();
            let _ = writeln!(out, "  info {{");
            for (k, v) in &info {
                let _ = writeln!(out, "    {k} = {v:?}");
            }
            let _ = writeln!(out, "  }}");
        }
        let _ = writeln!(out, "  checks {{");
        for c in &checks {
            let status = if c.passed { "pass" } else { "fail" };
            match &c.witness {
                None => {
                    let _ = writeln!(
                        out,
                        "    check {{ name = {:?} law = {:?} status = {:?} }}",
                        c.name, c.law, status
                    );
                }
                Some(w) => {
                    let _ = writeln!(
                        out,
                        "    check {{ name = {:?} law = {:?} status = {:?} witness = {:?} }}",
                        c.name, c.law, status, w
                    );
                }
            }
        }
        let _ = writeln!(out, "  }}");
        let _ = writeln!(out, "  totals {{ pass = {pass} fail = {fail} }}");
        let _ = writeln!(out, "}}");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_sorted_and_stable() {
        let mut r = Report::new("x.scn", "test");
        r.push(Check::fail("b-check", "law2", "w"));
        r.push(Check::pass("a-check", "law1"));
        let doc = r.render();
        let a = doc.find("a-check").unwrap();
        let b = doc.find("b-check").unwrap();
        assert!(a < b);
        assert_eq!(doc, r.render());
        assert!(!r.all_passed());
        assert_eq!(r.totals(), (1, 1));
    }
}
