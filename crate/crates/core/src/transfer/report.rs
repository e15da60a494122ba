use std::fmt;

use rayon::prelude::*;

use crate::abelian::{FgAbelianGroup, GroupElem};
use crate::error::Error;

/// Valuation window used when enumerating groups with free part.
pub const ENUM_WINDOW: i64 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLine {
    pub label: String,
    pub passed: bool,
    pub count: usize,
    pub witness: Option<String>,
}

impl CheckLine {
    pub fn pass(label: impl Into<String>, count: usize) -> Self {
        CheckLine { label: label.into(), passed: true, count, witness: None }
    }

    pub fn fail(label: impl Into<String>, count: usize, witness: impl Into<String>) -> Self {
        CheckLine { label: label.into(), passed: false, count, witness: Some(witness.into()) }
    }

    pub fn from_error(label: impl Into<String>, err: &Error) -> Self {
        Self::fail(label, 0, format!("error: {err}"))
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({} checked)", self.label, self.count)?;
        if let Some(w) = &self.witness {
            write!(f, " witness: {w}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub lines: Vec<CheckLine>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), ..Default::default() }
    }

    pub fn push(&mut self, line: CheckLine) {
        self.lines.push(line);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn extend(&mut self, other: Report) {
        self.lines.extend(other.lines);
        self.notes.extend(other.notes);
    }

    pub fn passed(&self) -> bool {
        !self.lines.is_empty() && self.lines.iter().all(|l| l.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckLine> {
        self.lines.iter().find(|l| !l.passed)
    }

    pub fn checked(&self) -> usize {
        self.lines.iter().map(|l| l.count).sum()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for l in &self.lines {
            writeln!(f, "  {l}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

/// Runs `f` on every item in parallel; `f` returns a witness on failure.
pub fn check_all<T, F>(label: impl Into<String>, items: &[T], f: F) -> CheckLine
where
    T: Sync,
    F: Fn(&T) -> Option<String> + Sync,
{
    let failure = items.par_iter().find_map_first(&f);
    CheckLine { label: label.into(), passed: failure.is_none(), count: items.len(), witness: failure }
}

/// All elements in the window when there are at most `cap`, else the generators.
pub fn sample(g: &FgAbelianGroup, cap: usize) -> (Vec<GroupElem>, bool) {
    match g.elements(ENUM_WINDOW, cap) {
        Ok(v) => (v, true),
        Err(_) => {
            let mut v = vec![g.zero()];
            v.extend((0..g.ngens()).map(|i| g.generator(i)));
            (v, false)
        }
    }
}

pub fn sample_label(label: &str, exhaustive: bool) -> String {
    if exhaustive {
        label.to_string()
    } else {
        format!("{label} [generators only]")
    }
}
