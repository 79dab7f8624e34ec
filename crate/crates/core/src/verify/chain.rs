use serde::{Deserialize, Serialize};

use super::hypothesis::{HypothesisEvidence, WeightSet};
use super::theorems::params;
use super::{InequalityReport, Status, TheoremId};
use crate::error::{Error, Result};
use crate::lattice::CubeFamily;
use crate::norms::{relative_gap, weighted_l1};
use crate::operators::{check_inputs, maximal, OperatorSpec};
use crate::weights::{same_grid, SampledFunction, Weight};

/// Cellwise slack of the pointwise Lemma: `LHS - RHS <= LEMMA_SLACK (1 + RHS)`.
pub const LEMMA_SLACK: f64 = 1e-9;

/// Relative slack used when testing set containment at a level.
const CONTAINMENT_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaOutcome {
    /// `max_x (LHS(x) - RHS(x))`, signed.
    pub max_violation: f64,
    /// Cells breaching the slack.
    pub breaches: usize,
    /// `max_x |LHS(x) - RHS(x)|`.
    pub max_gap: f64,
    /// Largest `LHS / RHS` over cells with `RHS > 0`, and where it occurs.
    pub worst_ratio: f64,
    pub worst_cell: usize,
    /// Some `∫ f_i u_i = 0` with `α > 0`.
    pub degenerate: bool,
}

struct LemmaSides {
    lhs: SampledFunction,
    /// `M(f_1 u_1^{1-mq}, …)`
    inner: SampledFunction,
    /// `Π (∫ f_i u_i)^{α/(mn)}`
    factor: f64,
    mq: f64,
}

impl LemmaSides {
    fn rhs(&self, cell: usize) -> f64 {
        self.inner.values()[cell].powf(1.0 / self.mq) * self.factor
    }
}

fn lemma_sides(
    fs: &[SampledFunction],
    us: &[Weight],
    alpha: f64,
    family: CubeFamily,
) -> Result<LemmaSides> {
    check_inputs(fs, us.len())?;
    for (f, u) in fs.iter().zip(us) {
        same_grid(f.grid(), u.grid())?;
    }
    let grid = *fs[0].grid();
    let m = fs.len();
    let spec = OperatorSpec::new(m, alpha, family);
    spec.validate(grid.dim(), false)?;
    let mq = m as f64 * spec.q(grid.dim());
    let lhs = maximal(fs, &spec)?;
    let gs = fs
        .iter()
        .zip(us)
        .map(|(f, u)| f.mul(u.powf(1.0 - mq)?.as_function()))
        .collect::<Result<Vec<_>>>()?;
    let inner = maximal(&gs, &OperatorSpec::new(m, 0.0, family))?;
    let exponent = alpha / (m * grid.dim()) as f64;
    let mut factor = 1.0;
    for (f, u) in fs.iter().zip(us) {
        factor *= weighted_l1(f, u)?.powf(exponent);
    }
    Ok(LemmaSides {
        lhs,
        inner,
        factor,
        mq,
    })
}

/// Both sides of the pointwise estimate
/// `M_α(f⃗)(x) <= M(f_1 u_1^{1-mq}, …)(x)^{1/(mq)} Π (∫ f_i u_i)^{α/(mn)}`
/// on every cell, with the same cube family for both maximal operators.
pub fn verify_lemma_pointwise(
    fs: &[SampledFunction],
    us: &[Weight],
    alpha: f64,
    family: CubeFamily,
) -> Result<LemmaOutcome> {
    let sides = lemma_sides(fs, us, alpha, family)?;
    let mut out = LemmaOutcome {
        max_violation: f64::NEG_INFINITY,
        breaches: 0,
        max_gap: 0.0,
        worst_ratio: 0.0,
        worst_cell: 0,
        degenerate: alpha > 0.0 && sides.factor == 0.0,
    };
    for (cell, &l) in sides.lhs.values().iter().enumerate() {
        let r = sides.rhs(cell);
        let d = l - r;
        out.max_violation = out.max_violation.max(d);
        out.max_gap = out.max_gap.max(d.abs());
        if d > LEMMA_SLACK * (1.0 + r) {
            out.breaches += 1;
        }
        if r > 0.0 && l / r > out.worst_ratio {
            out.worst_ratio = l / r;
            out.worst_cell = cell;
        }
    }
    Ok(out)
}

/// Pointwise Lemma as a report: `lhs`/`rhs` at the cell with the largest ratio.
pub(crate) fn lemma_report(
    fs: &[SampledFunction],
    us: &[Weight],
    alpha: f64,
    family: CubeFamily,
) -> Result<InequalityReport> {
    let outcome = verify_lemma_pointwise(fs, us, alpha, family)?;
    let sides = lemma_sides(fs, us, alpha, family)?;
    let cell = outcome.worst_cell;
    let (lhs, rhs) = (sides.lhs.values()[cell], sides.rhs(cell));
    let status = if outcome.breaches > 0 {
        Status::Violation
    } else if rhs == 0.0 {
        Status::Degenerate
    } else {
        Status::Ok
    };
    Ok(InequalityReport {
        theorem_id: TheoremId::LemmaPointwise,
        params: params(fs.len(), fs[0].grid(), alpha, family),
        hypothesis_evidence: HypothesisEvidence::none(),
        lhs,
        rhs,
        empirical_constant: (rhs > 0.0).then(|| lhs / rhs),
        sweep: Vec::new(),
        status,
        max_violation: Some(outcome.max_violation),
        containment_failures: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainOutcome {
    /// Distinct positive levels of `M_α(f⃗)/v` examined.
    pub levels: usize,
    /// `(level, cell)` pairs in `{M_α/v >= λ}` missing from the transformed set.
    pub containment_failures: usize,
    /// `(level, cell)` pairs in the transformed set but not in `{M_α/v >= λ}`.
    pub extra_cells: usize,
    /// Largest relative gap between `ν v^q` and `Π (u_i^{mq})^{1/m} (v^{mq})^{1/m}`.
    pub density_discrepancy: f64,
}

/// Re-derives the level sets of the maximal theorem through the substitution
/// `g_i = f_i u_i^{1-mq}`: for every level `λ` of `M_α(f⃗)/v`, checks
/// `{M_α(f⃗)/v >= λ} ⊆ {M(g⃗)/v^{mq} >= (λ / Π(∫ f_i u_i)^{α/(mn)})^{mq}}`
/// cell by cell, and the factorization of the measure density.
pub fn proof_chain_check(
    fs: &[SampledFunction],
    ws: &WeightSet,
    alpha: f64,
    family: CubeFamily,
) -> Result<ChainOutcome> {
    let sides = lemma_sides(fs, &ws.us, alpha, family)?;
    same_grid(fs[0].grid(), ws.grid())?;
    let m = ws.m() as f64;
    let mq = sides.mq;
    let q = mq / m;
    let v = ws.v.values();
    let vmq = ws.v.powf(mq)?;

    let first: Vec<f64> = sides
        .lhs
        .values()
        .iter()
        .zip(v)
        .map(|(a, b)| a / b)
        .collect();
    let second: Vec<f64> = sides
        .inner
        .values()
        .iter()
        .zip(vmq.values())
        .map(|(a, b)| a / b)
        .collect();

    let mut levels: Vec<f64> = first.iter().copied().filter(|&x| x > 0.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    if !levels.is_empty() && sides.factor == 0.0 {
        return Err(Error::param(
            "nonzero maximal function with vanishing L1 factor",
        ));
    }

    let mut failures = 0;
    let mut extra = 0;
    for &lambda in &levels {
        let t = (lambda / sides.factor).powf(mq);
        for (a, b) in first.iter().zip(&second) {
            let in_first = *a >= lambda;
            if in_first && *b < t * (1.0 - CONTAINMENT_SLACK) {
                failures += 1;
            }
            if !in_first && *b >= t {
                extra += 1;
            }
        }
    }

    let nu_vq = ws.nu_vq(q, false)?;
    let mut factored = vmq.powf(1.0 / m)?;
    for u in &ws.us {
        factored = factored.mul(&u.powf(mq)?.powf(1.0 / m)?)?;
    }
    let density_discrepancy = nu_vq
        .values()
        .iter()
        .zip(factored.values())
        .map(|(a, b)| relative_gap(*a, *b))
        .fold(0.0, f64::max);

    Ok(ChainOutcome {
        levels: levels.len(),
        containment_failures: failures,
        extra_cells: extra,
        density_discrepancy,
    })
}
