use super::chain::proof_chain_check;
use super::hypothesis::{
    ainf_check, extrapolation_check, hypothesis_check, sawyer_check, HypothesisEvidence,
    HypothesisMode, WeightSet,
};
use super::{InequalityReport, Params, Status, TheoremId};
use crate::error::{Error, Result};
use crate::lattice::{CubeFamily, Grid};
use crate::norms::{
    level_profile, weak_ladder, weak_norm_from_ladder, weighted_l1, WeightedMeasure,
};
use crate::operators::{
    check_inputs, fractional_integral, maximal, target_exponent, IntegralGuard, OperatorSpec,
};
use crate::weights::{same_grid, SampledFunction, Weight};

/// Largest family size per slot in the vector-valued check.
pub const MAX_FAMILY_SIZE: usize = 8;

pub(crate) fn params(m: usize, grid: &Grid, alpha: f64, family: CubeFamily) -> Params {
    Params {
        m,
        n: grid.dim(),
        alpha,
        q: target_exponent(m, grid.dim(), alpha),
        r: None,
        s: None,
        cells: grid.cells_per_axis(),
        half_width: grid.half_width(),
        family,
    }
}

/// Weak `L^{q,∞}(μ)` norm of `g` and the ladder behind it.
pub(crate) fn weak_side(
    g: &SampledFunction,
    mu: &WeightedMeasure,
    q: f64,
) -> Result<(f64, Vec<[f64; 2]>)> {
    let ladder = weak_ladder(&level_profile(g, mu)?, q);
    Ok((weak_norm_from_ladder(&ladder, q).value, ladder))
}

pub(crate) fn product_l1(fs: &[SampledFunction], us: &[Weight]) -> Result<f64> {
    let mut rhs = 1.0;
    for (f, u) in fs.iter().zip(us) {
        rhs *= weighted_l1(f, u)?;
    }
    Ok(rhs)
}

fn report(
    theorem_id: TheoremId,
    params: Params,
    hypothesis_evidence: HypothesisEvidence,
    lhs: f64,
    rhs: f64,
    sweep: Vec<[f64; 2]>,
) -> InequalityReport {
    InequalityReport {
        theorem_id,
        params,
        hypothesis_evidence,
        lhs,
        rhs,
        empirical_constant: None,
        sweep,
        status: Status::Ok,
        max_violation: None,
        containment_failures: None,
    }
    .finish()
}

fn check_weights(fs: &[SampledFunction], ws: &WeightSet) -> Result<()> {
    check_inputs(fs, ws.m())?;
    same_grid(fs[0].grid(), ws.grid())
}

/// `‖M_α(f⃗)/v‖_{L^{q,∞}(ν v^q)}` against `Π ‖f_i‖_{L^1(u_i)}`, with the
/// proof's set containment checked at every level.
pub fn verify_theorem_max(
    fs: &[SampledFunction],
    ws: &WeightSet,
    alpha: f64,
    mode: HypothesisMode,
    family: CubeFamily,
) -> Result<InequalityReport> {
    check_weights(fs, ws)?;
    let grid = *ws.grid();
    let spec = OperatorSpec::new(ws.m(), alpha, family);
    spec.validate(grid.dim(), false)?;
    let q = spec.q(grid.dim());
    let evidence = hypothesis_check(ws, alpha, mode, family)?;
    let quotient = maximal(fs, &spec)?.div(&ws.v)?;
    let mu = WeightedMeasure::new(ws.nu_vq(q, false)?);
    let (lhs, sweep) = weak_side(&quotient, &mu, q)?;
    let rhs = product_l1(fs, &ws.us)?;
    let chain = proof_chain_check(fs, ws, alpha, family)?;
    let mut r = report(
        TheoremId::ThmMax,
        params(ws.m(), &grid, alpha, family),
        evidence,
        lhs,
        rhs,
        sweep,
    );
    r.containment_failures = Some(chain.containment_failures);
    Ok(r)
}

/// As [`verify_theorem_max`] with `I_α` at the shifted targets; `v` and the
/// measure are taken at the targets too.
pub fn verify_theorem_imax(
    fs: &[SampledFunction],
    ws: &WeightSet,
    alpha: f64,
    mode: HypothesisMode,
    family: CubeFamily,
    guard: IntegralGuard,
) -> Result<InequalityReport> {
    check_weights(fs, ws)?;
    let grid = *ws.grid();
    let q = target_exponent(ws.m(), grid.dim(), alpha);
    let integral = fractional_integral(fs, alpha, guard)?;
    let evidence = hypothesis_check(ws, alpha, mode, family)?;
    let quotient = integral.div(&ws.v_at_targets)?;
    let mu = WeightedMeasure::new(ws.nu_vq(q, true)?);
    let (lhs, sweep) = weak_side(&quotient, &mu, q)?;
    let rhs = product_l1(fs, &ws.us)?;
    Ok(report(
        TheoremId::ThmIMax,
        params(ws.m(), &grid, alpha, family),
        evidence,
        lhs,
        rhs,
        sweep,
    ))
}

/// `‖I_α(f⃗)/v‖` against `‖M_α(f⃗)/v‖`, both in `L^{q,∞}(ν v^q)` at the targets.
pub fn verify_extrapolation(
    fs: &[SampledFunction],
    ws: &WeightSet,
    alpha: f64,
    family: CubeFamily,
    guard: IntegralGuard,
) -> Result<InequalityReport> {
    check_weights(fs, ws)?;
    let grid = *ws.grid();
    let spec = OperatorSpec::new(ws.m(), alpha, family);
    spec.validate(grid.dim(), true)?;
    let q = spec.q(grid.dim());
    let integral = fractional_integral(fs, alpha, guard)?;
    // M_α is constant on cells, so its value at a target is the cell value
    let max = maximal(fs, &spec)?;
    let evidence = extrapolation_check(ws, alpha, family)?;
    let mu = WeightedMeasure::new(ws.nu_vq(q, true)?);
    let (lhs, sweep) = weak_side(&integral.div(&ws.v_at_targets)?, &mu, q)?;
    let (rhs, _) = weak_side(&max.div(&ws.v_at_targets)?, &mu, q)?;
    Ok(report(
        TheoremId::ThmExtrap,
        params(ws.m(), &grid, alpha, family),
        evidence,
        lhs,
        rhs,
        sweep,
    ))
}

/// `∫ (I_α f⃗)^s w` against `∫ (M_α f⃗)^s w`, with `w` taken at the targets.
pub fn verify_moen(
    fs: &[SampledFunction],
    w: &Weight,
    w_at_targets: &Weight,
    alpha: f64,
    s: f64,
    family: CubeFamily,
    guard: IntegralGuard,
) -> Result<InequalityReport> {
    if fs.is_empty() {
        return Err(Error::param("need at least one function"));
    }
    check_inputs(fs, fs.len())?;
    same_grid(fs[0].grid(), w.grid())?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::param(format!(
            "exponent s must be positive, got {s}"
        )));
    }
    let grid = *w.grid();
    let m = fs.len();
    let spec = OperatorSpec::new(m, alpha, family);
    spec.validate(grid.dim(), true)?;
    let integral = fractional_integral(fs, alpha, guard)?;
    let max = maximal(fs, &spec)?;
    let lhs = weighted_l1(&integral.powf(s)?, w_at_targets)?;
    let rhs = weighted_l1(&max.powf(s)?, w_at_targets)?;
    let evidence = ainf_check(w, family)?;
    let mut p = params(m, &grid, alpha, family);
    p.s = Some(s);
    Ok(report(
        TheoremId::MoenA1,
        p,
        evidence,
        lhs,
        rhs,
        vec![[s, lhs]],
    ))
}

/// One-dimensional mixed weak (1,1) bound for `M`:
/// `sup_t t·(uv){M(fv)/v > t}` against `∫ f u v`.
pub fn verify_sawyer(
    f: &SampledFunction,
    u: &Weight,
    v: &Weight,
    family: CubeFamily,
) -> Result<InequalityReport> {
    let grid = *f.grid();
    if grid.dim() != 1 {
        return Err(Error::param(
            "the mixed weak (1,1) check is one-dimensional",
        ));
    }
    same_grid(&grid, u.grid())?;
    same_grid(&grid, v.grid())?;
    let fv = f.mul(v.as_function())?;
    let quotient = maximal(&[fv], &OperatorSpec::new(1, 0.0, family))?.div(v)?;
    let uv = u.mul(v)?;
    let (lhs, sweep) = weak_side(&quotient, &WeightedMeasure::new(uv.clone()), 1.0)?;
    let rhs = weighted_l1(f, &uv)?;
    let evidence = sawyer_check(u, v, family)?;
    Ok(report(
        TheoremId::Sawyer11,
        params(1, &grid, 0.0, family),
        evidence,
        lhs,
        rhs,
        sweep,
    ))
}

fn check_r(r: f64, q: f64) -> Result<()> {
    if r == 2.0 || (r > q.max(1.0) && r < 2.0) {
        Ok(())
    } else {
        Err(Error::param(format!(
            "r must equal 2 or lie strictly between max(q, 1) = {} and 2, got {r}",
            q.max(1.0)
        )))
    }
}

fn lr_aggregate(parts: &[SampledFunction], r: f64) -> Result<SampledFunction> {
    let grid = *parts[0].grid();
    let mut acc = vec![0.0; grid.cell_count()];
    for p in parts {
        for (a, v) in acc.iter_mut().zip(p.values()) {
            *a += v.powf(r);
        }
    }
    SampledFunction::new(grid, acc.into_iter().map(|a| a.powf(1.0 / r)).collect())
}

/// `ℓ^r`-valued extension: every tuple `(f^1_{k_1},…,f^m_{k_m})` goes through
/// `I_α(·)/v`, aggregated in `ℓ^r`, against the `L^1(u_i)` norms of the
/// per-slot `ℓ^r` aggregates.
pub fn verify_vector_valued(
    families: &[Vec<SampledFunction>],
    ws: &WeightSet,
    alpha: f64,
    r: f64,
    mode: HypothesisMode,
    family: CubeFamily,
    guard: IntegralGuard,
) -> Result<InequalityReport> {
    let m = ws.m();
    if families.len() != m {
        return Err(Error::param(format!(
            "expected {m} families, got {}",
            families.len()
        )));
    }
    for fam in families {
        if fam.is_empty() || fam.len() > MAX_FAMILY_SIZE {
            return Err(Error::param(format!(
                "family sizes must be between 1 and {MAX_FAMILY_SIZE}, got {}",
                fam.len()
            )));
        }
        check_inputs(fam, fam.len())?;
        same_grid(fam[0].grid(), ws.grid())?;
    }
    let grid = *ws.grid();
    let q = target_exponent(m, grid.dim(), alpha);
    check_r(r, q)?;
    let tuples: usize = families.iter().map(Vec::len).product();
    let mut parts = Vec::with_capacity(tuples);
    for t in 0..tuples {
        let mut rest = t;
        let fs: Vec<SampledFunction> = families
            .iter()
            .map(|fam| {
                let k = rest % fam.len();
                rest /= fam.len();
                fam[k].clone()
            })
            .collect();
        parts.push(fractional_integral(&fs, alpha, guard)?);
    }
    let aggregate = lr_aggregate(&parts, r)?;
    let evidence = hypothesis_check(ws, alpha, mode, family)?;
    let mu = WeightedMeasure::new(ws.nu_vq(q, true)?);
    let (lhs, sweep) = weak_side(&aggregate.div(&ws.v_at_targets)?, &mu, q)?;
    let slots = families
        .iter()
        .map(|fam| lr_aggregate(fam, r))
        .collect::<Result<Vec<_>>>()?;
    let rhs = product_l1(&slots, &ws.us)?;
    let mut p = params(m, &grid, alpha, family);
    p.r = Some(r);
    Ok(report(
        TheoremId::VectorValued42,
        p,
        evidence,
        lhs,
        rhs,
        sweep,
    ))
}
