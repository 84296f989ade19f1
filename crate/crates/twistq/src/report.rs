//! Machine-readable check reports shared by the verification suites and the
//! command-line front end.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    /// Stable identifier of the check, e.g. "detf/A3^2/k=2".
    pub id: String,
    /// What the check verifies, in plain words.
    pub description: String,
    pub status: Status,
    /// Number of objects exercised (basis vectors, terms, k-values ...).
    pub checked: usize,
    /// First failure witness, when failing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
    /// Free-form notes (stabilization points, counted multiplicities ...).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn pass(id: impl Into<String>, description: impl Into<String>, checked: usize) -> CheckReport {
        CheckReport {
            id: id.into(),
            description: description.into(),
            status: Status::Pass,
            checked,
            first_failure: None,
            notes: Vec::new(),
        }
    }

    pub fn fail(
        id: impl Into<String>,
        description: impl Into<String>,
        checked: usize,
        witness: impl Into<String>,
    ) -> CheckReport {
        CheckReport {
            id: id.into(),
            description: description.into(),
            status: Status::Fail,
            checked,
            first_failure: Some(witness.into()),
            notes: Vec::new(),
        }
    }

    pub fn from_eq<T: PartialEq + std::fmt::Debug>(
        id: impl Into<String>,
        description: impl Into<String>,
        checked: usize,
        got: &T,
        want: &T,
    ) -> CheckReport {
        if got == want {
            CheckReport::pass(id, description, checked)
        } else {
            CheckReport::fail(id, description, checked, format!("got {got:?}, want {want:?}"))
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> CheckReport {
        self.notes.push(note.into());
        self
    }

    pub fn ok(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct ReportBundle {
    pub checks: Vec<CheckReport>,
}

impl ReportBundle {
    pub fn push(&mut self, r: CheckReport) {
        self.checks.push(r);
    }

    pub fn extend(&mut self, rs: Vec<CheckReport>) {
        self.checks.extend(rs);
    }

    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok())
    }

    pub fn render_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.ok() { "PASS" } else { "FAIL" };
            out.push_str(&format!("[{mark}] {} — {} ({} checked)", c.id, c.description, c.checked));
            if let Some(w) = &c.first_failure {
                out.push_str(&format!(" :: {w}"));
            }
            for n in &c.notes {
                out.push_str(&format!(" :: {n}"));
            }
            out.push('\n');
        }
        out
    }
}
