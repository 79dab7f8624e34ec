//! Each in-scope inequality as a checkable experiment: hypothesis evidence
//! from the weights module, both sides from the operators and norms, and an
//! [`InequalityReport`] with the empirical constant.

mod chain;
mod experiment;
mod hypothesis;
mod reduction;
mod theorems;

pub use chain::{
    proof_chain_check, verify_lemma_pointwise, ChainOutcome, LemmaOutcome, LEMMA_SLACK,
};
pub use experiment::{run_instance, Experiment, Instance, RunSettings, DEFAULT_MOEN_EXPONENTS};
pub use hypothesis::{
    hypothesis_check, ConditionEvidence, HypothesisEvidence, HypothesisMode, WeightSet,
};
pub use reduction::{verify_alpha0_direct, verify_linear_p1, ReductionOutcome};
pub use theorems::{
    verify_extrapolation, verify_moen, verify_sawyer, verify_theorem_imax, verify_theorem_max,
    verify_vector_valued, MAX_FAMILY_SIZE,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lattice::CubeFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    Sawyer11,
    LemmaPointwise,
    ThmMax,
    ThmIMax,
    ThmExtrap,
    MoenA1,
    VectorValued42,
    Thm23Char,
}

impl TheoremId {
    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Sawyer11 => "Sawyer11",
            TheoremId::LemmaPointwise => "LemmaPointwise",
            TheoremId::ThmMax => "ThmMax",
            TheoremId::ThmIMax => "ThmIMax",
            TheoremId::ThmExtrap => "ThmExtrap",
            TheoremId::MoenA1 => "MoenA1",
            TheoremId::VectorValued42 => "VectorValued42",
            TheoremId::Thm23Char => "Thm23Char",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "OK")]
    Ok,
    HypothesisUnstable,
    Degenerate,
    Violation,
}

/// Instance parameters recorded in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub m: usize,
    pub n: usize,
    pub alpha: f64,
    /// Always `n / (mn - α)`.
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    pub cells: usize,
    pub half_width: f64,
    pub family: CubeFamily,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem_id: TheoremId,
    pub params: Params,
    pub hypothesis_evidence: HypothesisEvidence,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; absent when `rhs = 0`.
    pub empirical_constant: Option<f64>,
    /// `(threshold, value)` pairs behind `lhs`.
    pub sweep: Vec<[f64; 2]>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_violation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub containment_failures: Option<usize>,
}

impl InequalityReport {
    /// Set `empirical_constant` and `status` from `lhs`, `rhs` and the evidence.
    pub(crate) fn finish(mut self) -> Self {
        let (constant, status) = if self.rhs > 0.0 {
            (Some(self.lhs / self.rhs), Status::Ok)
        } else if self.lhs == 0.0 {
            (None, Status::Degenerate)
        } else {
            (None, Status::Violation)
        };
        self.empirical_constant = constant;
        self.status = if status == Status::Ok && self.hypothesis_evidence.diverging() {
            Status::HypothesisUnstable
        } else {
            status
        };
        self
    }

    /// A pointwise-Lemma breach or a failed set containment.
    pub fn is_violation(&self) -> bool {
        (self.theorem_id == TheoremId::LemmaPointwise && self.status == Status::Violation)
            || self.containment_failures.is_some_and(|c| c > 0)
    }
}
