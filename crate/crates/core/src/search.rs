//! Parameter sweeps and coordinate hill climbing over power-weight exponents
//! and indicator parameters, maximizing the empirical constant of a theorem
//! instance among hypothesis-stable weight tuples.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Grid;
use crate::operators::target_exponent;
use crate::par;
use crate::verify::{run_instance, Instance, RunSettings, Status};
use crate::weights::{FunctionSpec, Verdict, WeightFamily};

/// Distance kept from the integrability threshold of a power exponent.
pub const INTEGRABILITY_MARGIN: f64 = 1e-6;

/// A searchable parameter. Slots are zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "param", rename_all = "snake_case")]
pub enum ParamKey {
    /// `u_slot = |x|^a`.
    UExponent {
        slot: usize,
    },
    /// `v = |x|^b`.
    VExponent,
    /// Center, width and height of the indicator `f_slot`.
    Center {
        slot: usize,
    },
    Width {
        slot: usize,
    },
    Height {
        slot: usize,
    },
}

impl fmt::Display for ParamKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamKey::UExponent { slot } => write!(f, "u{}_exponent", slot + 1),
            ParamKey::VExponent => f.write_str("v_exponent"),
            ParamKey::Center { slot } => write!(f, "f{}_center", slot + 1),
            ParamKey::Width { slot } => write!(f, "f{}_width", slot + 1),
            ParamKey::Height { slot } => write!(f, "f{}_height", slot + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamAxis {
    #[serde(flatten)]
    pub key: ParamKey,
    pub lo: f64,
    pub hi: f64,
    /// Lattice points used by a sweep.
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_steps() -> usize {
    3
}

impl ParamAxis {
    pub fn new(key: ParamKey, lo: f64, hi: f64, steps: usize) -> Self {
        Self { key, lo, hi, steps }
    }

    fn value(&self, k: usize) -> f64 {
        if self.steps < 2 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * k as f64 / (self.steps - 1) as f64
        }
    }
}

/// A template instance and the axes that overwrite parts of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpace {
    pub template: Instance,
    pub axes: Vec<ParamAxis>,
}

impl SearchSpace {
    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    /// `mq` with `q = n/(mn - α)`: power exponents must stay above `-n/(mq)`.
    fn integrability_factor(&self, dim: usize) -> f64 {
        let m = self.template.m().max(1);
        m as f64 * target_exponent(m, dim, self.template.alpha)
    }

    fn lower_bound(&self, axis: &ParamAxis, dim: usize) -> f64 {
        match axis.key {
            ParamKey::UExponent { .. } | ParamKey::VExponent => axis
                .lo
                .max(-(dim as f64) / self.integrability_factor(dim) + INTEGRABILITY_MARGIN),
            ParamKey::Width { .. } | ParamKey::Height { .. } => axis.lo.max(f64::MIN_POSITIVE),
            ParamKey::Center { .. } => axis.lo,
        }
    }

    fn check(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::param("search space has no axes"));
        }
        let m = self.template.m();
        for axis in &self.axes {
            if !(axis.lo.is_finite() && axis.hi.is_finite() && axis.lo <= axis.hi) {
                return Err(Error::param(format!(
                    "axis {} has bounds [{}, {}]",
                    axis.key, axis.lo, axis.hi
                )));
            }
            let slot = match axis.key {
                ParamKey::UExponent { slot }
                | ParamKey::Center { slot }
                | ParamKey::Width { slot }
                | ParamKey::Height { slot } => Some(slot),
                ParamKey::VExponent => None,
            };
            if slot.is_some_and(|s| s >= m) {
                return Err(Error::param(format!(
                    "axis {} refers to a missing slot",
                    axis.key
                )));
            }
        }
        Ok(())
    }

    /// Instance with the parameters written into the template.
    pub fn instantiate(&self, params: &[f64]) -> Result<Instance> {
        if params.len() != self.dims() {
            return Err(Error::param(format!(
                "expected {} parameters, got {}",
                self.dims(),
                params.len()
            )));
        }
        let mut inst = self.template.clone();
        let m = inst.m();
        if inst.u.is_empty() {
            inst.u = vec![WeightFamily::one(); m];
        }
        let mut boxes: Vec<Option<(f64, f64, f64)>> = inst
            .functions
            .iter()
            .map(|f| match f {
                FunctionSpec::Indicator { lo, hi, height } => {
                    Some((0.5 * (lo[0] + hi[0]), hi[0] - lo[0], *height))
                }
                _ => None,
            })
            .collect();
        for (axis, &x) in self.axes.iter().zip(params) {
            match axis.key {
                ParamKey::UExponent { slot } => inst.u[slot] = WeightFamily::power(x),
                ParamKey::VExponent => inst.v = WeightFamily::power(x),
                ParamKey::Center { slot } => boxes[slot].get_or_insert((0.0, 1.0, 1.0)).0 = x,
                ParamKey::Width { slot } => boxes[slot].get_or_insert((0.0, 1.0, 1.0)).1 = x,
                ParamKey::Height { slot } => boxes[slot].get_or_insert((0.0, 1.0, 1.0)).2 = x,
            }
        }
        let touched: Vec<usize> = self
            .axes
            .iter()
            .filter_map(|a| match a.key {
                ParamKey::Center { slot }
                | ParamKey::Width { slot }
                | ParamKey::Height { slot } => Some(slot),
                _ => None,
            })
            .collect();
        for slot in touched {
            if let Some((c, w, h)) = boxes[slot] {
                inst.functions[slot] = FunctionSpec::Indicator {
                    lo: vec![c - 0.5 * w; 2],
                    hi: vec![c + 0.5 * w; 2],
                    height: h,
                };
            }
        }
        Ok(inst)
    }
}

/// Clamp to the bounds and to the integrability constraints. Idempotent.
pub fn project(params: &[f64], space: &SearchSpace, dim: usize) -> Result<Vec<f64>> {
    if params.len() != space.dims() {
        return Err(Error::param(format!(
            "expected {} parameters, got {}",
            space.dims(),
            params.len()
        )));
    }
    space
        .axes
        .iter()
        .zip(params)
        .map(|(axis, &x)| {
            let lo = space.lower_bound(axis, dim);
            if lo > axis.hi {
                Err(Error::param(format!(
                    "axis {} has an empty feasible set",
                    axis.key
                )))
            } else if x.is_nan() {
                Err(Error::param(format!("axis {} got NaN", axis.key)))
            } else {
                Ok(x.clamp(lo, axis.hi))
            }
        })
        .collect()
}

/// One objective evaluation with its hypothesis verdicts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub params: Vec<f64>,
    /// Empirical constant on the finest grid.
    pub empirical_constant: Option<f64>,
    pub status: Status,
    pub hypothesis_stable: bool,
    pub verdicts: Vec<(String, Verdict)>,
    pub constant_verdict: Verdict,
}

impl Evaluation {
    /// The search objective: defined only for hypothesis-stable instances.
    pub fn objective(&self) -> Option<f64> {
        if self.hypothesis_stable {
            self.empirical_constant
        } else {
            None
        }
    }
}

pub fn evaluate(
    space: &SearchSpace,
    params: &[f64],
    grids: &[Grid],
    settings: &RunSettings,
) -> Result<Evaluation> {
    let inst = space.instantiate(params)?;
    let e = run_instance(&inst, grids, settings)?;
    let last = e
        .reports
        .last()
        .ok_or_else(|| Error::param("no grids to evaluate on"))?;
    Ok(Evaluation {
        params: params.to_vec(),
        empirical_constant: last.empirical_constant,
        status: last.status,
        hypothesis_stable: e.hypothesis_stable,
        verdicts: last
            .hypothesis_evidence
            .conditions
            .iter()
            .map(|c| (c.name.clone(), c.sweep.verdict))
            .collect(),
        constant_verdict: e.constants.verdict,
    })
}

/// Number of rows of a full-factorial sweep.
pub fn sweep_size(space: &SearchSpace) -> Result<usize> {
    space.axes.iter().try_fold(1usize, |acc, a| {
        if a.steps < 2 {
            return Err(Error::param(format!(
                "axis {} needs at least 2 steps",
                a.key
            )));
        }
        Ok(acc.saturating_mul(a.steps))
    })
}

/// Full-factorial sweep, first axis varying slowest. Lattice points are
/// projected onto the feasible set; unstable rows are kept.
pub fn sweep(
    space: &SearchSpace,
    grids: &[Grid],
    settings: &RunSettings,
    budget: usize,
) -> Result<Vec<Evaluation>> {
    space.check()?;
    let required = sweep_size(space)?;
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    let dim = grids.first().map_or(1, Grid::dim);
    let points = (0..required)
        .map(|row| {
            let mut rest = row;
            let mut p = vec![0.0; space.dims()];
            for (k, axis) in space.axes.iter().enumerate().rev() {
                p[k] = axis.value(rest % axis.steps);
                rest /= axis.steps;
            }
            project(&p, space, dim)
        })
        .collect::<Result<Vec<_>>>()?;
    par::map_slice(&points, |p| evaluate(space, p, grids, settings))
        .into_iter()
        .collect()
}

/// Row with the largest objective; ties keep the earliest.
pub fn best_row(rows: &[Evaluation]) -> Option<&Evaluation> {
    let mut best: Option<&Evaluation> = None;
    for r in rows {
        if let Some(v) = r.objective() {
            if best.and_then(Evaluation::objective).is_none_or(|b| v > b) {
                best = Some(r);
            }
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub step: usize,
    pub evaluation: Evaluation,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchState {
    pub params: Vec<f64>,
    pub objective: Option<f64>,
    pub history: Vec<HistoryEntry>,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClimbOptions {
    pub max_steps: usize,
    /// Initial step as a fraction of each axis range.
    #[serde(default = "default_step_scale")]
    pub step_scale: f64,
    /// Step multiplier after a rejected proposal.
    #[serde(default = "default_decay")]
    pub decay: f64,
}

fn default_step_scale() -> f64 {
    0.25
}

fn default_decay() -> f64 {
    0.5
}

fn better(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x > y,
        (Some(_), None) => true,
        _ => false,
    }
}

/// Coordinate-wise hill climb: axis `step % dims` moves by `±step` (sign
/// drawn from the seeded generator); improvements are accepted, rejections
/// shrink that axis's step.
pub fn hill_climb(
    space: &SearchSpace,
    initial: &[f64],
    options: ClimbOptions,
    seed: u64,
    grids: &[Grid],
    settings: &RunSettings,
) -> Result<SearchState> {
    space.check()?;
    let dim = grids.first().map_or(1, Grid::dim);
    if project(initial, space, dim)? != initial {
        return Err(Error::param(
            "initial parameters violate bounds or integrability",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps: Vec<f64> = space
        .axes
        .iter()
        .map(|a| options.step_scale * (a.hi - a.lo))
        .collect();
    let first = evaluate(space, initial, grids, settings)?;
    let mut current = initial.to_vec();
    let mut objective = first.objective();
    let mut history = vec![HistoryEntry {
        step: 0,
        evaluation: first,
        accepted: true,
    }];
    for step in 1..=options.max_steps {
        let k = (step - 1) % space.dims();
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let mut proposal = current.clone();
        proposal[k] += sign * steps[k];
        let proposal = project(&proposal, space, dim)?;
        let eval = evaluate(space, &proposal, grids, settings)?;
        let accepted = better(eval.objective(), objective);
        if accepted {
            objective = eval.objective();
            current = proposal;
        } else {
            steps[k] *= options.decay;
        }
        history.push(HistoryEntry {
            step,
            evaluation: eval,
            accepted,
        });
    }
    Ok(SearchState {
        params: current,
        objective,
        history,
        seed,
    })
}
