//! JSON rendering of correction reports.

use serde::Serialize;
use unimod_core::cipher::Verification;
use unimod_core::correction::{AttemptOutcome, CorrectionFailure, CorrectionReport};
use unimod_core::Mat2;

/// Outcome of `correct` for scripting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Clean,
    Repaired,
    Ambiguous,
    Uncorrectable,
}

impl Status {
    pub fn of(r: &CorrectionReport) -> Status {
        if r.verification.is_clean() {
            Status::Clean
        } else if r.repaired.is_some() {
            Status::Repaired
        } else if r.is_ambiguous() {
            Status::Ambiguous
        } else {
            Status::Uncorrectable
        }
    }

    /// Exit code of the `correct` subcommand.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Clean | Status::Repaired => 0,
            Status::Uncorrectable => 2,
            Status::Ambiguous => 3,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AttemptJson {
    pub class: String,
    pub estimates: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det_at_estimate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<String>,
    pub examined: u64,
    pub outcome: String,
}

#[derive(Debug, Serialize)]
pub struct ReportJson {
    pub block_index: u64,
    pub status: Status,
    pub verification: String,
    pub assumed_class: String,
    pub candidates_examined: u64,
    pub repaired: Option<[String; 4]>,
    pub residual_failure: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reasons: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub alternatives: Vec<(String, [String; 4])>,
    pub attempts: Vec<AttemptJson>,
}

fn entries(m: &Mat2) -> [String; 4] {
    m.entries().map(|e| e.to_string())
}

pub fn verification_name(v: Verification) -> String {
    let rows = |r: unimod_core::cipher::RowFlags| match (r.top, r.bottom) {
        (true, true) => "top,bottom",
        (true, false) => "top",
        _ => "bottom",
    };
    match v {
        Verification::Clean => "clean".into(),
        Verification::DeterminantMismatch => "determinant".into(),
        Verification::RowIntervalViolation(r) => format!("row-interval({})", rows(r)),
        Verification::Both(r) => format!("determinant+row-interval({})", rows(r)),
    }
}

impl ReportJson {
    pub fn new(block_index: u64, r: &CorrectionReport) -> Self {
        let (reasons, alternatives) = match &r.residual_failure {
            Some(CorrectionFailure::Uncorrectable(rs)) => {
                (rs.iter().map(|(c, f)| format!("{c}: {f}")).collect(), vec![])
            }
            Some(CorrectionFailure::Ambiguous(alts)) => {
                (vec![], alts.iter().map(|(c, m)| (c.to_string(), entries(m))).collect())
            }
            _ => (vec![], vec![]),
        };
        ReportJson {
            block_index,
            status: Status::of(r),
            verification: verification_name(r.verification),
            assumed_class: r.assumed_class.to_string(),
            candidates_examined: r.candidates_examined,
            repaired: r.repaired.as_ref().map(entries),
            residual_failure: r.residual_failure.as_ref().map(|f| f.to_string()),
            reasons,
            alternatives,
            attempts: r
                .attempts
                .iter()
                .map(|a| AttemptJson {
                    class: a.class.to_string(),
                    estimates: a.estimates.clone(),
                    det_at_estimate: a.det_at_estimate.as_ref().map(|d| d.to_string()),
                    solution: a.solution.as_ref().map(|d| d.to_string()),
                    examined: a.examined,
                    outcome: match &a.outcome {
                        AttemptOutcome::Accepted(ms) => format!("accepted({})", ms.len()),
                        AttemptOutcome::Rejected(r) => format!("rejected: {r}"),
                        AttemptOutcome::Failed(f) => format!("failed: {f}"),
                    },
                })
                .collect(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}
