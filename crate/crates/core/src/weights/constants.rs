use serde::{Deserialize, Serialize};

use super::{same_grid, Weight};
use crate::error::{Error, Result};
use crate::lattice::{Cube, CubeFamily, Grid, PrefixTable};
use crate::par;

pub const DEFAULT_AINF_LADDER: [f64; 4] = [2.0, 4.0, 8.0, 16.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum WeightClass {
    A1,
    Ap {
        p: f64,
    },
    /// Smallest `A_p` constant over a ladder of exponents; `p` is the
    /// attaining exponent.
    AinfProxy {
        p: f64,
    },
    AvecP {
        exponents: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuckenhouptReport {
    #[serde(flatten)]
    pub class: WeightClass,
    pub constant: f64,
    pub attaining_cube: Cube,
    pub family: CubeFamily,
}

/// Max of `value(cube)` over the family, first maximal cube on ties.
fn sup_over_family<F>(grid: &Grid, family: CubeFamily, value: F) -> Result<(f64, Cube)>
where
    F: Fn(&Cube) -> f64 + Sync + Send,
{
    let cubes = grid.cubes(family)?;
    let values = par::map_slice(&cubes, &value);
    let best = par::argmax(&values).ok_or_else(|| Error::param("no finite cube value"))?;
    Ok((values[best], cubes[best]))
}

/// `sup_Q avg_Q(w) / min_Q(w)`.
pub fn a1_constant(w: &Weight, family: CubeFamily) -> Result<MuckenhouptReport> {
    let grid = *w.grid();
    let table = PrefixTable::build(&grid, w.values())?;
    let (constant, cube) = sup_over_family(&grid, family, |q| {
        table.average_unchecked(q) / table.min_unchecked(q)
    })?;
    Ok(MuckenhouptReport {
        class: WeightClass::A1,
        constant,
        attaining_cube: cube,
        family,
    })
}

/// `sup_Q avg_Q(w) · avg_Q(w^{1-p'})^{p-1}` for `p > 1`.
pub fn ap_constant(w: &Weight, p: f64, family: CubeFamily) -> Result<MuckenhouptReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::param(format!(
            "A_p needs a finite p > 1 (use a1_constant for p = 1), got {p}"
        )));
    }
    let grid = *w.grid();
    let dual_exp = 1.0 - p / (p - 1.0);
    let table = PrefixTable::build(&grid, w.values())?;
    let dual = PrefixTable::build(&grid, w.powf(dual_exp)?.values())?;
    let (constant, cube) = sup_over_family(&grid, family, |q| {
        table.average_unchecked(q) * dual.average_unchecked(q).powf(p - 1.0)
    })?;
    Ok(MuckenhouptReport {
        class: WeightClass::Ap { p },
        constant,
        attaining_cube: cube,
        family,
    })
}

/// Operational stand-in for `A_∞ = ∪ A_p`: the smallest `A_p` constant over
/// the ladder. Membership is judged by refinement stability of this value.
pub fn ainf_proxy(w: &Weight, family: CubeFamily, ladder: &[f64]) -> Result<MuckenhouptReport> {
    if ladder.is_empty() {
        return Err(Error::param("A_inf ladder is empty"));
    }
    if ladder.windows(2).any(|p| p[0] > p[1]) {
        return Err(Error::param("A_inf ladder must be sorted"));
    }
    let mut best: Option<MuckenhouptReport> = None;
    for &p in ladder {
        let r = ap_constant(w, p, family)?;
        if best.as_ref().is_none_or(|b| r.constant < b.constant) {
            best = Some(r);
        }
    }
    let best = best.expect("non-empty ladder");
    let p = match best.class {
        WeightClass::Ap { p } => p,
        _ => unreachable!(),
    };
    Ok(MuckenhouptReport {
        class: WeightClass::AinfProxy { p },
        ..best
    })
}

fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

fn check_exponents(ws: &[Weight], exponents: &[f64]) -> Result<f64> {
    if ws.is_empty() || ws.len() != exponents.len() {
        return Err(Error::param(
            "need one exponent per weight and at least one weight",
        ));
    }
    if let Some(p) = exponents.iter().find(|p| !(**p >= 1.0 && p.is_finite())) {
        return Err(Error::param(format!(
            "multilinear exponents must be >= 1, got {p}"
        )));
    }
    for w in &ws[1..] {
        same_grid(ws[0].grid(), w.grid())?;
    }
    Ok(1.0 / exponents.iter().map(|p| 1.0 / p).sum::<f64>())
}

/// `ν_w = Π w_i^{p/p_i}` cellwise.
fn nu_weight(ws: &[Weight], exponents: &[f64], p: f64) -> Result<Weight> {
    let factors: Vec<(&Weight, f64)> = ws
        .iter()
        .zip(exponents)
        .map(|(w, pi)| (w, p / pi))
        .collect();
    Weight::product_of_powers(&factors)
}

/// Multilinear `A_P` constant:
/// `sup_Q avg_Q(ν_w)^{1/p} Π_i avg_Q(w_i^{1-p_i'})^{1/p_i'}`, where a slot
/// with `p_i = 1` contributes `(min_Q w_i)^{-1}` instead.
pub fn multilinear_ap_constant(
    ws: &[Weight],
    exponents: &[f64],
    family: CubeFamily,
) -> Result<MuckenhouptReport> {
    let p = check_exponents(ws, exponents)?;
    let grid = *ws[0].grid();
    let nu = PrefixTable::build(&grid, nu_weight(ws, exponents, p)?.values())?;
    let slots = ws
        .iter()
        .zip(exponents)
        .map(|(w, &pi)| {
            if pi == 1.0 {
                Ok((PrefixTable::build(&grid, w.values())?, None))
            } else {
                let pc = conjugate(pi);
                let dual = w.powf(1.0 - pc)?;
                Ok((PrefixTable::build(&grid, dual.values())?, Some(pc)))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let (constant, cube) = sup_over_family(&grid, family, |q| {
        let mut v = nu.average_unchecked(q).powf(1.0 / p);
        for (table, pc) in &slots {
            v *= match pc {
                None => 1.0 / table.min_unchecked(q),
                Some(pc) => table.average_unchecked(q).powf(1.0 / pc),
            };
        }
        v
    })?;
    Ok(MuckenhouptReport {
        class: WeightClass::AvecP {
            exponents: exponents.to_vec(),
        },
        constant,
        attaining_cube: cube,
        family,
    })
}

/// Both sides of the characterization of `A_P` through linear classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationReport {
    pub avecp: MuckenhouptReport,
    /// `ν_w ∈ A_{mp}` (`A_1` when `mp = 1`).
    pub nu: MuckenhouptReport,
    /// Per slot: `w_i^{1-p_i'} ∈ A_{m p_i'}`, or `w_i^{1/m} ∈ A_1` when `p_i = 1`.
    pub components: Vec<MuckenhouptReport>,
}

fn a_class(w: &Weight, p: f64, family: CubeFamily) -> Result<MuckenhouptReport> {
    if (p - 1.0).abs() <= 1e-12 {
        a1_constant(w, family)
    } else {
        ap_constant(w, p, family)
    }
}

pub fn check_theorem23(
    ws: &[Weight],
    exponents: &[f64],
    family: CubeFamily,
) -> Result<CharacterizationReport> {
    let p = check_exponents(ws, exponents)?;
    let m = ws.len() as f64;
    let avecp = multilinear_ap_constant(ws, exponents, family)?;
    let nu = a_class(&nu_weight(ws, exponents, p)?, m * p, family)?;
    let components = ws
        .iter()
        .zip(exponents)
        .map(|(w, &pi)| {
            if pi == 1.0 {
                a1_constant(&w.powf(1.0 / m)?, family)
            } else {
                let pc = conjugate(pi);
                a_class(&w.powf(1.0 - pc)?, m * pc, family)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacterizationReport {
        avecp,
        nu,
        components,
    })
}
