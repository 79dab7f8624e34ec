//! Independently coded special cases used to cross-check the general
//! verifiers: the linear (`m = 1`) fractional case written in the classical
//! single-weight form, and the `α = 0` multilinear case.

use serde::{Deserialize, Serialize};

use super::hypothesis::WeightSet;
use crate::error::{Error, Result};
use crate::lattice::CubeFamily;
use crate::operators::{fractional_maximal, multilinear_maximal, target_exponent};
use crate::weights::{same_grid, SampledFunction, Weight};
use crate::CompensatedSum;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub empirical_constant: Option<f64>,
}

impl ReductionOutcome {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            empirical_constant: (rhs > 0.0).then(|| lhs / rhs),
        }
    }
}

/// `max_t t·μ{g > t}^{1/q}` from an ascending sort and suffix masses.
fn weak_scan(g: &[f64], density: &[f64], cell: f64, q: f64) -> f64 {
    let mut order: Vec<usize> = (0..g.len()).filter(|&c| g[c] > 0.0).collect();
    order.sort_by(|&a, &b| g[a].total_cmp(&g[b]).then(b.cmp(&a)));
    let mut mass = CompensatedSum::default();
    let mut best: f64 = 0.0;
    let mut k = order.len();
    while k > 0 {
        let level = g[order[k - 1]];
        while k > 0 && g[order[k - 1]] == level {
            mass.add(density[order[k - 1]] * cell);
            k -= 1;
        }
        best = best.max(level * mass.value().powf(1.0 / q));
    }
    best
}

fn l1(values: impl Iterator<Item = f64>, cell: f64) -> f64 {
    let mut s = CompensatedSum::default();
    values.for_each(|x| s.add(x));
    s.value() * cell
}

/// Single-weight-pair form of the linear fractional mixed weak-type bound at
/// `p = 1`: `‖M_α(h v)/v‖_{L^{q,∞}(w v^q)}` against `∫ |h| w^{1/q} v`.
/// Called with `h = f/v`, `w = u^q` it reproduces the `m = 1` maximal check.
pub fn verify_linear_p1(
    f: &SampledFunction,
    u: &Weight,
    v: &Weight,
    alpha: f64,
    family: CubeFamily,
) -> Result<ReductionOutcome> {
    same_grid(f.grid(), u.grid())?;
    same_grid(f.grid(), v.grid())?;
    let grid = *f.grid();
    let q = target_exponent(1, grid.dim(), alpha);
    let h = f.div(v)?;
    let w = u.powf(q)?;
    let hv = h.mul(v.as_function())?;
    let mh = fractional_maximal(&hv, alpha, family)?;
    let quotient: Vec<f64> = mh
        .values()
        .iter()
        .zip(v.values())
        .map(|(a, b)| a / b)
        .collect();
    let density: Vec<f64> = w
        .values()
        .iter()
        .zip(v.values())
        .map(|(a, b)| a * b.powf(q))
        .collect();
    let cell = grid.cell_measure();
    let lhs = weak_scan(&quotient, &density, cell, q);
    let rhs = l1(
        (0..grid.cell_count()).map(|c| h.values()[c] * w.values()[c].powf(1.0 / q) * v.values()[c]),
        cell,
    );
    Ok(ReductionOutcome::new(lhs, rhs))
}

/// The multilinear maximal check at `α = 0` (`q = 1/m`) written directly
/// against `M`.
pub fn verify_alpha0_direct(
    fs: &[SampledFunction],
    ws: &WeightSet,
    family: CubeFamily,
) -> Result<ReductionOutcome> {
    if fs.len() != ws.m() {
        return Err(Error::param("one weight per function is required"));
    }
    let grid = *ws.grid();
    let m = fs.len();
    let q = 1.0 / m as f64;
    let mf = multilinear_maximal(fs, family)?;
    let quotient: Vec<f64> = mf
        .values()
        .iter()
        .zip(ws.v.values())
        .map(|(a, b)| a / b)
        .collect();
    let density: Vec<f64> = (0..grid.cell_count())
        .map(|c| {
            ws.us.iter().map(|u| u.values()[c].powf(q)).product::<f64>() * ws.v.values()[c].powf(q)
        })
        .collect();
    let cell = grid.cell_measure();
    let lhs = weak_scan(&quotient, &density, cell, q);
    let rhs = fs
        .iter()
        .zip(&ws.us)
        .map(|(f, u)| l1(f.values().iter().zip(u.values()).map(|(a, b)| a * b), cell))
        .product();
    Ok(ReductionOutcome::new(lhs, rhs))
}
