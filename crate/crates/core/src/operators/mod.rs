//! The multilinear fractional maximal operator `M_α` (with `M = M_0`) and
//! the multilinear fractional integral `I_α`.

mod integral;
mod maximal;

pub use integral::{fractional_integral, kernel, IntegralGuard, DEFAULT_INTEGRAL_BUDGET};
pub use maximal::{fractional_maximal, maximal, maximal_oracle, multilinear_maximal};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::CubeFamily;
use crate::weights::{same_grid, SampledFunction};

/// Arity, fractional order and cube family of an operator instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub m: usize,
    pub alpha: f64,
    pub family: CubeFamily,
}

impl OperatorSpec {
    pub fn new(m: usize, alpha: f64, family: CubeFamily) -> Self {
        Self { m, alpha, family }
    }

    /// Checks `0 <= α < mn` (and `α > 0` when `strict`).
    pub fn validate(&self, dim: usize, strict: bool) -> Result<()> {
        check_alpha(self.m, dim, self.alpha, strict)
    }

    /// `q = n / (mn - α)`.
    pub fn q(&self, dim: usize) -> f64 {
        target_exponent(self.m, dim, self.alpha)
    }
}

pub(crate) fn check_alpha(m: usize, dim: usize, alpha: f64, strict: bool) -> Result<()> {
    if m == 0 {
        return Err(Error::param("operator arity m must be at least 1"));
    }
    let top = (m * dim) as f64;
    let ok = alpha.is_finite() && alpha < top && if strict { alpha > 0.0 } else { alpha >= 0.0 };
    if ok {
        Ok(())
    } else if strict {
        Err(Error::param(format!(
            "need 0 < alpha < mn = {top}, got {alpha}"
        )))
    } else {
        Err(Error::param(format!(
            "need 0 <= alpha < mn = {top}, got {alpha}"
        )))
    }
}

/// `q = n / (mn - α)`.
pub fn target_exponent(m: usize, dim: usize, alpha: f64) -> f64 {
    dim as f64 / ((m * dim) as f64 - alpha)
}

pub(crate) fn check_inputs(fs: &[SampledFunction], m: usize) -> Result<()> {
    if fs.len() != m {
        return Err(Error::param(format!(
            "expected {m} functions, got {}",
            fs.len()
        )));
    }
    for f in &fs[1..] {
        same_grid(fs[0].grid(), f.grid())?;
    }
    Ok(())
}
