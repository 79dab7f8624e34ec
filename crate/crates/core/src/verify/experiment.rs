use serde::{Deserialize, Serialize};

use super::chain::lemma_report;
use super::hypothesis::{HypothesisEvidence, HypothesisMode, WeightSet};
use super::theorems::{
    verify_extrapolation, verify_moen, verify_sawyer, verify_theorem_imax, verify_theorem_max,
    verify_vector_valued,
};
use super::{InequalityReport, Status, TheoremId};
use crate::error::{Error, Result};
use crate::lattice::{CubeFamily, Grid};
use crate::operators::IntegralGuard;
use crate::weights::{
    FunctionSpec, RefinementSweep, SampleOptions, SampledFunction, StabilityThresholds, Verdict,
    WeightFamily,
};

/// Exponents `s` used when an integral-comparison instance leaves `s` unset.
pub const DEFAULT_MOEN_EXPONENTS: [f64; 3] = [0.5, 1.0, 2.0];

/// One theorem instance, described by parametric families so that it can be
/// realized on every grid of a refinement ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub theorem: TheoremId,
    #[serde(default)]
    pub alpha: f64,
    /// `f_1..f_m`.
    #[serde(default)]
    pub functions: Vec<FunctionSpec>,
    /// Per-slot families for the vector-valued check (replaces `functions`).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<Vec<FunctionSpec>>,
    /// `u_1..u_m`; empty means all ones.
    #[serde(default)]
    pub u: Vec<WeightFamily>,
    /// `v`; also the weight `w` of the integral comparison.
    #[serde(default = "WeightFamily::one")]
    pub v: WeightFamily,
    #[serde(default)]
    pub mode: HypothesisMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
}

impl Instance {
    pub fn new(theorem: TheoremId, alpha: f64, functions: Vec<FunctionSpec>) -> Self {
        Self {
            id: None,
            theorem,
            alpha,
            functions,
            families: Vec::new(),
            u: Vec::new(),
            v: WeightFamily::one(),
            mode: HypothesisMode::A,
            r: None,
            s: None,
        }
    }

    pub fn m(&self) -> usize {
        if self.families.is_empty() {
            self.functions.len()
        } else {
            self.families.len()
        }
    }

    pub fn label(&self) -> String {
        self.id.clone().unwrap_or_else(|| self.theorem.to_string())
    }

    /// An integral comparison without `s` becomes one instance per default exponent.
    pub fn expand(&self) -> Vec<Instance> {
        if self.theorem != TheoremId::MoenA1 || self.s.is_some() {
            return vec![self.clone()];
        }
        DEFAULT_MOEN_EXPONENTS
            .iter()
            .map(|&s| Instance {
                id: Some(format!("{}_s{s}", self.label())),
                s: Some(s),
                ..self.clone()
            })
            .collect()
    }

    fn weights(&self) -> Vec<WeightFamily> {
        if self.u.is_empty() {
            vec![WeightFamily::one(); self.m()]
        } else {
            self.u.clone()
        }
    }

    fn sample_functions(
        specs: &[FunctionSpec],
        grid: &Grid,
        seed: u64,
    ) -> Result<Vec<SampledFunction>> {
        specs
            .iter()
            .enumerate()
            .map(|(slot, f)| f.sample(grid, seed.wrapping_add(slot as u64)))
            .collect()
    }

    /// Evaluate on a single grid.
    pub fn evaluate(&self, grid: &Grid, settings: &RunSettings) -> Result<InequalityReport> {
        let m = self.m();
        if m == 0 {
            return Err(Error::Config(format!(
                "instance {} has no functions",
                self.label()
            )));
        }
        let us = self.weights();
        if us.len() != m {
            return Err(Error::Config(format!(
                "instance {}: {} weights for {m} functions",
                self.label(),
                us.len()
            )));
        }
        let family = settings.family;
        let guard = settings.guard;
        let ws = WeightSet::sample(&us, &self.v, grid, settings.sample)?;
        let fs = || Self::sample_functions(&self.functions, grid, settings.seed);
        match self.theorem {
            TheoremId::ThmMax => verify_theorem_max(&fs()?, &ws, self.alpha, self.mode, family),
            TheoremId::ThmIMax => {
                verify_theorem_imax(&fs()?, &ws, self.alpha, self.mode, family, guard)
            }
            TheoremId::ThmExtrap => verify_extrapolation(&fs()?, &ws, self.alpha, family, guard),
            TheoremId::MoenA1 => {
                let s = self.s.unwrap_or(1.0);
                verify_moen(
                    &fs()?,
                    &ws.v,
                    &ws.v_at_targets,
                    self.alpha,
                    s,
                    family,
                    guard,
                )
            }
            TheoremId::Sawyer11 => {
                if m != 1 {
                    return Err(Error::Config("Sawyer11 takes exactly one function".into()));
                }
                verify_sawyer(&fs()?[0], &ws.us[0], &ws.v, family)
            }
            TheoremId::LemmaPointwise => lemma_report(&fs()?, &ws.us, self.alpha, family),
            TheoremId::VectorValued42 => {
                let families = self
                    .families
                    .iter()
                    .map(|fam| Self::sample_functions(fam, grid, settings.seed))
                    .collect::<Result<Vec<_>>>()?;
                let families = if families.is_empty() {
                    fs()?.into_iter().map(|f| vec![f]).collect()
                } else {
                    families
                };
                let r = self.r.unwrap_or(2.0);
                verify_vector_valued(&families, &ws, self.alpha, r, self.mode, family, guard)
            }
            TheoremId::Thm23Char => Err(Error::Config(
                "Thm23Char is evaluated by the constants command".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSettings {
    pub family: CubeFamily,
    pub seed: u64,
    pub guard: IntegralGuard,
    pub thresholds: StabilityThresholds,
    pub sample: SampleOptions,
}

impl RunSettings {
    pub fn new(family: CubeFamily) -> Self {
        Self {
            family,
            seed: 0,
            guard: IntegralGuard::default(),
            thresholds: StabilityThresholds::default(),
            sample: SampleOptions::default(),
        }
    }
}

/// An instance evaluated along a refinement ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub id: String,
    pub theorem: TheoremId,
    /// One report per grid, coarsest first; each carries the merged evidence.
    pub reports: Vec<InequalityReport>,
    /// Empirical constants across the ladder (grids without a constant omitted).
    pub constants: RefinementSweep,
    pub hypothesis_stable: bool,
}

impl Experiment {
    pub fn violations(&self) -> usize {
        self.reports.iter().filter(|r| r.is_violation()).count()
    }
}

/// Evaluate `instance` on every grid and judge hypotheses and constants
/// for refinement stability.
pub fn run_instance(
    instance: &Instance,
    grids: &[Grid],
    settings: &RunSettings,
) -> Result<Experiment> {
    let mut reports = grids
        .iter()
        .map(|g| instance.evaluate(g, settings))
        .collect::<Result<Vec<_>>>()?;
    let levels: Vec<HypothesisEvidence> = reports
        .iter()
        .map(|r| r.hypothesis_evidence.clone())
        .collect();
    let evidence = HypothesisEvidence::merge(&levels, settings.thresholds)?;
    for r in &mut reports {
        r.hypothesis_evidence = evidence.clone();
        r.status = match r.status {
            Status::Ok | Status::HypothesisUnstable if evidence.diverging() => {
                Status::HypothesisUnstable
            }
            Status::HypothesisUnstable => Status::Ok,
            other => other,
        };
    }
    let (cells, values): (Vec<usize>, Vec<f64>) = reports
        .iter()
        .filter_map(|r| r.empirical_constant.map(|c| (r.params.cells, c)))
        .unzip();
    let complete = values.len() == reports.len();
    let mut constants = RefinementSweep::new(cells, values, settings.thresholds);
    if !complete {
        constants.verdict = Verdict::Inconclusive;
    }
    Ok(Experiment {
        id: instance.label(),
        theorem: instance.theorem,
        hypothesis_stable: evidence.stable,
        reports,
        constants,
    })
}
