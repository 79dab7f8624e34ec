//! Distribution functions, weak `L^{q,∞}(μ)` quasi-norms and weighted `L^1`
//! norms of sampled functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Grid;
use crate::weights::{same_grid, SampledFunction, Weight};
use crate::{compensated_sum, CompensatedSum};

/// Measure with a strictly positive density per cell:
/// `μ(cell) = density(cell) · |cell|`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedMeasure {
    density: Weight,
}

impl WeightedMeasure {
    pub fn lebesgue(grid: Grid) -> Self {
        Self {
            density: Weight::ones(grid),
        }
    }

    pub fn new(density: Weight) -> Self {
        Self { density }
    }

    pub fn grid(&self) -> &Grid {
        self.density.grid()
    }

    pub fn density(&self) -> &Weight {
        &self.density
    }

    #[inline]
    pub fn cell_mass(&self, cell: usize) -> f64 {
        self.density.values()[cell] * self.grid().cell_measure()
    }

    pub fn total(&self) -> f64 {
        compensated_sum((0..self.grid().cell_count()).map(|c| self.cell_mass(c)))
    }
}

/// `μ{f > t}` (strict inequality).
pub fn distribution(f: &SampledFunction, mu: &WeightedMeasure, t: f64) -> Result<f64> {
    same_grid(f.grid(), mu.grid())?;
    if t.is_nan() || t < 0.0 {
        return Err(Error::param(format!(
            "threshold must be nonnegative, got {t}"
        )));
    }
    Ok(compensated_sum(
        f.values()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > t)
            .map(|(c, _)| mu.cell_mass(c)),
    ))
}

/// One step of the level ladder: `mass = μ{f ≥ level}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub level: f64,
    pub mass: f64,
}

/// Distinct positive values of `f` in decreasing order, each with the
/// cumulative measure of `{f ≥ value}`. Equal values are merged.
pub fn level_profile(f: &SampledFunction, mu: &WeightedMeasure) -> Result<Vec<Level>> {
    same_grid(f.grid(), mu.grid())?;
    let mut cells: Vec<(f64, usize)> = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(c, &v)| (v, c))
        .collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<Level> = Vec::new();
    let mut acc = CompensatedSum::default();
    for (v, c) in cells {
        acc.add(mu.cell_mass(c));
        match out.last_mut() {
            Some(last) if last.level == v => last.mass = acc.value(),
            _ => out.push(Level {
                level: v,
                mass: acc.value(),
            }),
        }
    }
    Ok(out)
}

/// Weak quasi-norm `sup_{t>0} t μ{f > t}^{1/q}` together with the level at
/// which the supremum is approached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakNormResult {
    pub q: f64,
    pub value: f64,
    pub attaining_level: f64,
}

/// `(level, level · μ{f ≥ level}^{1/q})` for every rung of the profile.
pub fn weak_ladder(profile: &[Level], q: f64) -> Vec<[f64; 2]> {
    profile
        .iter()
        .map(|l| [l.level, l.level * l.mass.powf(1.0 / q)])
        .collect()
}

pub(crate) fn weak_norm_from_ladder(ladder: &[[f64; 2]], q: f64) -> WeakNormResult {
    let mut best = WeakNormResult {
        q,
        value: 0.0,
        attaining_level: 0.0,
    };
    for &[level, value] in ladder {
        if value > best.value {
            best.value = value;
            best.attaining_level = level;
        }
    }
    best
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!(
            "weak-norm exponent must be positive, got {q}"
        )))
    }
}

/// The sup over `t` of `t μ{f > t}^{1/q}` equals the max over distinct
/// values `v` of `v μ{f ≥ v}^{1/q}`, approached as `t ↑ v`.
pub fn weak_norm(f: &SampledFunction, mu: &WeightedMeasure, q: f64) -> Result<WeakNormResult> {
    check_q(q)?;
    let profile = level_profile(f, mu)?;
    Ok(weak_norm_from_ladder(&weak_ladder(&profile, q), q))
}

/// Relative discrepancy between `‖f‖_{L^{q,∞}(μ)}^q` and `‖f^q‖_{L^{1,∞}(μ)}`.
pub fn power_identity_check(f: &SampledFunction, mu: &WeightedMeasure, q: f64) -> Result<f64> {
    check_q(q)?;
    let lhs = weak_norm(f, mu, q)?.value.powf(q);
    let rhs = weak_norm(&f.powf(q)?, mu, 1.0)?.value;
    Ok(relative_gap(lhs, rhs))
}

pub(crate) fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// `Σ f u |cell|`.
pub fn weighted_l1(f: &SampledFunction, u: &Weight) -> Result<f64> {
    same_grid(f.grid(), u.grid())?;
    let h = f.grid().cell_measure();
    Ok(compensated_sum(f.values().iter().zip(u.values()).map(|(a, b)| a * b)) * h)
}
