use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CubeFamily, Grid};
use crate::operators::target_exponent;
use crate::weights::{
    a1_constant, ainf_proxy, multilinear_ap_constant, same_grid, MuckenhouptReport,
    RefinementSweep, SampleOptions, StabilityThresholds, Verdict, Weight, WeightFamily,
    DEFAULT_AINF_LADDER,
};

/// The two alternative hypotheses of the mixed weak-type theorems:
/// `A`: `u⃗^{mq} ∈ A_{(1,…,1)}` and `ν v^q ∈ A_∞`;
/// `B`: every `u_i^{mq} ∈ A_1` and `v^{mq} ∈ A_∞`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum HypothesisMode {
    #[default]
    A,
    B,
}

/// Weights `u_1..u_m` and `v` sampled on one grid, at cell centers and at the
/// shifted targets of the fractional integral.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSet {
    pub us: Vec<Weight>,
    pub v: Weight,
    pub us_at_targets: Vec<Weight>,
    pub v_at_targets: Weight,
}

impl WeightSet {
    /// Cellwise-constant weights: the target values equal the center values.
    pub fn new(us: Vec<Weight>, v: Weight) -> Result<Self> {
        if us.is_empty() {
            return Err(Error::param("need at least one weight u_i"));
        }
        for u in &us {
            same_grid(v.grid(), u.grid())?;
        }
        Ok(Self {
            us_at_targets: us.clone(),
            v_at_targets: v.clone(),
            us,
            v,
        })
    }

    pub fn ones(grid: Grid, m: usize) -> Self {
        let one = Weight::ones(grid);
        Self::new(vec![one.clone(); m.max(1)], one).expect("same grid")
    }

    pub fn sample(
        us: &[WeightFamily],
        v: &WeightFamily,
        grid: &Grid,
        opts: SampleOptions,
    ) -> Result<Self> {
        if us.is_empty() {
            return Err(Error::param("need at least one weight u_i"));
        }
        Ok(Self {
            us: us
                .iter()
                .map(|u| u.sample_with(grid, opts))
                .collect::<Result<_>>()?,
            v: v.sample_with(grid, opts)?,
            us_at_targets: us
                .iter()
                .map(|u| u.sample_at_targets(grid, opts))
                .collect::<Result<_>>()?,
            v_at_targets: v.sample_at_targets(grid, opts)?,
        })
    }

    pub fn m(&self) -> usize {
        self.us.len()
    }

    pub fn grid(&self) -> &Grid {
        self.v.grid()
    }

    /// Density `ν v^q = Π u_i^q v^q` of the measure on the left-hand side.
    pub fn nu_vq(&self, q: f64, at_targets: bool) -> Result<Weight> {
        let (us, v) = if at_targets {
            (&self.us_at_targets, &self.v_at_targets)
        } else {
            (&self.us, &self.v)
        };
        let mut factors: Vec<(&Weight, f64)> = us.iter().map(|u| (u, q)).collect();
        factors.push((v, q));
        Weight::product_of_powers(&factors)
    }
}

/// One hypothesis with its class constant and refinement behaviour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionEvidence {
    pub name: String,
    /// Informational conditions are reported but never decide stability.
    pub required: bool,
    /// Constant on the finest grid seen so far.
    pub report: MuckenhouptReport,
    pub sweep: RefinementSweep,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisEvidence {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<HypothesisMode>,
    pub conditions: Vec<ConditionEvidence>,
    /// Every required condition has a `Stable` verdict.
    pub stable: bool,
}

impl HypothesisEvidence {
    pub fn none() -> Self {
        Self {
            mode: None,
            conditions: Vec::new(),
            stable: true,
        }
    }

    pub(crate) fn single(
        mode: Option<HypothesisMode>,
        cells: usize,
        items: Vec<(String, bool, MuckenhouptReport)>,
    ) -> Self {
        let th = StabilityThresholds::default();
        let conditions = items
            .into_iter()
            .map(|(name, required, report)| ConditionEvidence {
                sweep: RefinementSweep::new(vec![cells], vec![report.constant], th),
                name,
                required,
                report,
            })
            .collect();
        Self::with_conditions(mode, conditions)
    }

    fn with_conditions(mode: Option<HypothesisMode>, conditions: Vec<ConditionEvidence>) -> Self {
        let stable = conditions
            .iter()
            .filter(|c| c.required)
            .all(|c| c.sweep.verdict == Verdict::Stable);
        Self {
            mode,
            conditions,
            stable,
        }
    }

    /// Some required condition is refinement-divergent.
    pub fn diverging(&self) -> bool {
        self.conditions
            .iter()
            .any(|c| c.required && c.sweep.verdict == Verdict::Divergent)
    }

    /// Join single-grid evidence from successively refined grids.
    pub fn merge(levels: &[HypothesisEvidence], th: StabilityThresholds) -> Result<Self> {
        let Some(last) = levels.last() else {
            return Ok(Self::none());
        };
        let mut conditions = Vec::with_capacity(last.conditions.len());
        for (k, cond) in last.conditions.iter().enumerate() {
            let mut cells = Vec::new();
            let mut values = Vec::new();
            for level in levels {
                let c = level
                    .conditions
                    .get(k)
                    .filter(|c| c.name == cond.name)
                    .ok_or_else(|| Error::param("hypothesis evidence differs between grids"))?;
                cells.extend_from_slice(&c.sweep.cells);
                values.extend_from_slice(&c.sweep.values);
            }
            conditions.push(ConditionEvidence {
                name: cond.name.clone(),
                required: cond.required,
                report: cond.report.clone(),
                sweep: RefinementSweep::new(cells, values, th),
            });
        }
        Ok(Self::with_conditions(last.mode, conditions))
    }
}

fn ainf(w: &Weight, family: CubeFamily) -> Result<MuckenhouptReport> {
    ainf_proxy(w, family, &DEFAULT_AINF_LADDER)
}

fn u_mq(ws: &WeightSet, mq: f64) -> Result<Vec<Weight>> {
    ws.us.iter().map(|u| u.powf(mq)).collect()
}

/// Single-grid hypothesis constants of the mixed weak-type theorems for `M_α`
/// and `I_α` in the given mode.
pub fn hypothesis_check(
    ws: &WeightSet,
    alpha: f64,
    mode: HypothesisMode,
    family: CubeFamily,
) -> Result<HypothesisEvidence> {
    let grid = *ws.grid();
    let m = ws.m();
    let q = target_exponent(m, grid.dim(), alpha);
    let mq = m as f64 * q;
    let umq = u_mq(ws, mq)?;
    let mut items = Vec::new();
    match mode {
        HypothesisMode::A => {
            items.push((
                "u^mq in A_(1..1)".to_string(),
                true,
                multilinear_ap_constant(&umq, &vec![1.0; m], family)?,
            ));
            items.push((
                "nu v^q in A_inf".to_string(),
                true,
                ainf(&ws.nu_vq(q, false)?, family)?,
            ));
        }
        HypothesisMode::B => {
            for (i, w) in umq.iter().enumerate() {
                items.push((
                    format!("u_{}^mq in A_1", i + 1),
                    true,
                    a1_constant(w, family)?,
                ));
            }
            items.push((
                "v^mq in A_inf".to_string(),
                true,
                ainf(&ws.v.powf(mq)?, family)?,
            ));
        }
    }
    Ok(HypothesisEvidence::single(
        Some(mode),
        grid.cells_per_axis(),
        items,
    ))
}

/// The extrapolation statement is checked under its first mode
/// (`u⃗^{mq} ∈ A_{(1,…,1)}`, `v^q ∈ A_∞`); the two `A_∞` conditions of the
/// mixed weak-type theorems are reported next to it.
pub(crate) fn extrapolation_check(
    ws: &WeightSet,
    alpha: f64,
    family: CubeFamily,
) -> Result<HypothesisEvidence> {
    let grid = *ws.grid();
    let m = ws.m();
    let q = target_exponent(m, grid.dim(), alpha);
    let mq = m as f64 * q;
    let umq = u_mq(ws, mq)?;
    let items = vec![
        (
            "u^mq in A_(1..1)".to_string(),
            true,
            multilinear_ap_constant(&umq, &vec![1.0; m], family)?,
        ),
        (
            "v^q in A_inf".to_string(),
            true,
            ainf(&ws.v.powf(q)?, family)?,
        ),
        (
            "nu v^q in A_inf".to_string(),
            false,
            ainf(&ws.nu_vq(q, false)?, family)?,
        ),
        (
            "v^mq in A_inf".to_string(),
            false,
            ainf(&ws.v.powf(mq)?, family)?,
        ),
    ];
    Ok(HypothesisEvidence::single(
        Some(HypothesisMode::A),
        grid.cells_per_axis(),
        items,
    ))
}

pub(crate) fn sawyer_check(
    u: &Weight,
    v: &Weight,
    family: CubeFamily,
) -> Result<HypothesisEvidence> {
    let items = vec![
        ("u in A_1".to_string(), true, a1_constant(u, family)?),
        ("v in A_1".to_string(), true, a1_constant(v, family)?),
    ];
    Ok(HypothesisEvidence::single(
        None,
        u.grid().cells_per_axis(),
        items,
    ))
}

pub(crate) fn ainf_check(w: &Weight, family: CubeFamily) -> Result<HypothesisEvidence> {
    let items = vec![("w in A_inf".to_string(), true, ainf(w, family)?)];
    Ok(HypothesisEvidence::single(
        None,
        w.grid().cells_per_axis(),
        items,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_weights_pass_both_modes() {
        let g = Grid::new(1, 1.0, 32).unwrap();
        for mode in [HypothesisMode::A, HypothesisMode::B] {
            let e =
                hypothesis_check(&WeightSet::ones(g, 2), 1.0, mode, CubeFamily::AllCubes).unwrap();
            assert!(e
                .conditions
                .iter()
                .all(|c| (c.report.constant - 1.0).abs() < 1e-12));
            assert!(!e.diverging());
        }
    }

    #[test]
    fn merge_builds_sweeps() {
        let th = StabilityThresholds::default();
        let levels: Vec<HypothesisEvidence> = [64, 128, 256]
            .iter()
            .map(|&n| {
                let g = Grid::new(1, 1.0, n).unwrap();
                let u = WeightFamily::power(1.0);
                let ws =
                    WeightSet::sample(&[u], &WeightFamily::one(), &g, SampleOptions::default())
                        .unwrap();
                hypothesis_check(&ws, 0.5, HypothesisMode::B, CubeFamily::AllCubes).unwrap()
            })
            .collect();
        let e = HypothesisEvidence::merge(&levels, th).unwrap();
        assert_eq!(e.conditions[0].sweep.cells, vec![64, 128, 256]);
        // u = |x| and mq = 2: u^2 is far from A_1
        assert_eq!(e.conditions[0].sweep.verdict, Verdict::Divergent);
        assert!(e.diverging() && !e.stable);
        assert_eq!(e.conditions[1].sweep.verdict, Verdict::Stable);
    }
}
