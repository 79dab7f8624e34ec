//! Sampled functions, strictly positive weights, parametric families and
//! Muckenhoupt-class constants.

mod constants;
mod family;
mod stability;

pub use constants::{
    a1_constant, ainf_proxy, ap_constant, check_theorem23, multilinear_ap_constant,
    CharacterizationReport, MuckenhouptReport, WeightClass, DEFAULT_AINF_LADDER,
};
pub use family::{FunctionSpec, Region, SampleOptions, WeightFamily};
pub use stability::{classify, RefinementSweep, StabilityThresholds, Verdict};

use crate::error::{Error, Result};
use crate::lattice::Grid;

/// Nonnegative finite value per grid cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::GridMismatch);
        }
        for (cell, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { cell });
            }
            if v < 0.0 {
                return Err(Error::Negative { cell, value: v });
            }
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            values: vec![0.0; grid.cell_count()],
            grid,
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.cell_count()])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Cellwise map; the result is validated again.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| v * c)
    }

    pub fn powf(&self, p: f64) -> Result<Self> {
        self.map(|v| v.powf(p))
    }

    /// Cellwise product with `other` (same grid required).
    pub fn mul(&self, other: &SampledFunction) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Self::new(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        )
    }

    /// Cellwise quotient by a weight.
    pub fn div(&self, w: &Weight) -> Result<Self> {
        same_grid(&self.grid, w.grid())?;
        Self::new(
            self.grid,
            self.values
                .iter()
                .zip(w.values())
                .map(|(a, b)| a / b)
                .collect(),
        )
    }
}

/// Strictly positive finite value per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight(SampledFunction);

impl Weight {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if let Some((cell, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| v.is_nan() || **v <= 0.0)
        {
            if value.is_nan() {
                return Err(Error::NonFinite { cell });
            }
            return Err(Error::NonPositiveWeight { cell, value });
        }
        SampledFunction::new(grid, values).map(Weight)
    }

    pub fn ones(grid: Grid) -> Self {
        Weight(SampledFunction {
            values: vec![1.0; grid.cell_count()],
            grid,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.0.grid()
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    pub fn as_function(&self) -> &SampledFunction {
        &self.0
    }

    pub fn powf(&self, p: f64) -> Result<Self> {
        Weight::new(
            *self.grid(),
            self.values().iter().map(|v| v.powf(p)).collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Weight::new(*self.grid(), self.values().iter().map(|v| v * c).collect())
    }

    pub fn mul(&self, other: &Weight) -> Result<Self> {
        same_grid(self.grid(), other.grid())?;
        Weight::new(
            *self.grid(),
            self.values()
                .iter()
                .zip(other.values())
                .map(|(a, b)| a * b)
                .collect(),
        )
    }

    /// Cellwise product of `w_i^{p_i}`.
    pub fn product_of_powers(factors: &[(&Weight, f64)]) -> Result<Self> {
        let (first, _) = factors
            .first()
            .ok_or_else(|| Error::param("empty product of weights"))?;
        let grid = *first.grid();
        for (w, _) in factors {
            same_grid(&grid, w.grid())?;
        }
        let values = (0..grid.cell_count())
            .map(|c| {
                factors
                    .iter()
                    .map(|(w, p)| w.values()[c].powf(*p))
                    .product()
            })
            .collect();
        Weight::new(grid, values)
    }
}

pub(crate) fn same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}
