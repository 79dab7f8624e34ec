//! Numerical laboratory for multilinear fractional operators and mixed
//! weak-type inequalities on discretized cubes of `R^n` (`n` = 1 or 2).
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: staggered grids, cube families, summed-area and range-min tables.
//! * [`weights`]: sampled functions, weights, Muckenhoupt-class constants.
//! * [`operators`]: the multilinear fractional maximal operator and fractional integral.
//! * [`norms`]: distribution functions and weak Lorentz quasi-norms.
//! * [`verify`]: theorem instances with hypothesis evidence and empirical constants.
//! * [`search`]: parameter sweeps and hill climbing over weight/function families.
//! * [`cli`]: configuration, orchestration and report serialization.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled (the default) and plain iterators otherwise.

pub mod cli;
pub mod error;
pub mod lattice;
pub mod norms;
pub mod operators;
pub mod par;
pub mod search;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use lattice::{Cube, CubeFamily, Grid, PrefixTable};
pub use norms::{WeakNormResult, WeightedMeasure};
pub use operators::OperatorSpec;
pub use weights::{FunctionSpec, SampledFunction, Weight, WeightFamily};

/// Neumaier-compensated running sum. Summation order is the caller's, so
/// results are reproducible for a fixed iteration order.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = CompensatedSum::default();
    for x in iter {
        acc.add(x);
    }
    acc.value()
}
