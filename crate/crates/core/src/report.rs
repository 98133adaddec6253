//! Named pass/fail/unknown results shared by all verification routines.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Pass, witness: None }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Fail, witness: Some(witness.into()) }
    }

    pub fn unknown(name: impl Into<String>, note: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Unknown, witness: Some(note.into()) }
    }

    pub fn from_result(name: impl Into<String>, r: Result<(), String>) -> Self {
        match r {
            Ok(()) => Check::pass(name),
            Err(w) => Check::fail(name, w),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(Check::passed)
}

pub fn find<'a>(checks: &'a [Check], name: &str) -> Option<&'a Check> {
    checks.iter().find(|c| c.name == name)
}
