use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{SampledFunction, Weight};
use crate::error::{Error, Result};
use crate::lattice::{Grid, Point};

/// Half-open axis-aligned box `[lo, hi)`; only the first `dim` entries of
/// each bound are read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Self {
            lo: vec![lo],
            hi: vec![hi],
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        if self.lo.len() < dim || self.hi.len() < dim {
            return Err(Error::param(format!(
                "region needs {dim} coordinates per bound"
            )));
        }
        if (0..dim).any(|a| self.lo[a].is_nan() || self.hi[a].is_nan() || self.lo[a] > self.hi[a]) {
            return Err(Error::param("region bounds must satisfy lo <= hi"));
        }
        Ok(())
    }

    pub fn contains(&self, p: &Point, dim: usize) -> bool {
        (0..dim).all(|a| p[a] >= self.lo[a] && p[a] < self.hi[a])
    }

    fn touches_origin(&self, dim: usize) -> bool {
        (0..dim).all(|a| self.lo[a] <= 0.0 && self.hi[a] >= 0.0)
    }
}

/// Sampling switches. Only the counterexample study needs
/// `allow_non_integrable`; the flag is echoed into reports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleOptions {
    pub allow_non_integrable: bool,
}

/// Parametric weight families evaluated at cell centers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightFamily {
    Constant {
        value: f64,
    },
    /// `|x|^exponent` with the Euclidean norm.
    Power {
        exponent: f64,
    },
    Product {
        factors: Vec<WeightFamily>,
    },
    /// First matching region wins; every sampled point must be covered.
    Piecewise {
        pieces: Vec<(Region, WeightFamily)>,
    },
}

impl WeightFamily {
    pub fn constant(value: f64) -> Self {
        WeightFamily::Constant { value }
    }

    pub fn power(exponent: f64) -> Self {
        WeightFamily::Power { exponent }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// Exponent of the leading singularity at the origin.
    fn origin_exponent(&self, dim: usize) -> f64 {
        match self {
            WeightFamily::Constant { .. } => 0.0,
            WeightFamily::Power { exponent } => *exponent,
            WeightFamily::Product { factors } => {
                factors.iter().map(|f| f.origin_exponent(dim)).sum()
            }
            WeightFamily::Piecewise { pieces } => pieces
                .iter()
                .filter(|(r, _)| r.touches_origin(dim))
                .map(|(_, f)| f.origin_exponent(dim))
                .fold(0.0, f64::min),
        }
    }

    pub fn validate(&self, dim: usize, opts: SampleOptions) -> Result<()> {
        self.validate_parts(dim)?;
        let a = self.origin_exponent(dim);
        if a <= -(dim as f64) && !opts.allow_non_integrable {
            return Err(Error::NonIntegrable { exponent: a, dim });
        }
        Ok(())
    }

    fn validate_parts(&self, dim: usize) -> Result<()> {
        match self {
            WeightFamily::Constant { value } => {
                if !(value.is_finite() && *value > 0.0) {
                    return Err(Error::param(format!(
                        "constant weight must be positive and finite, got {value}"
                    )));
                }
            }
            WeightFamily::Power { exponent } => {
                if !exponent.is_finite() {
                    return Err(Error::param("power exponent must be finite"));
                }
            }
            WeightFamily::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::param("product family needs at least one factor"));
                }
                for f in factors {
                    f.validate_parts(dim)?;
                }
            }
            WeightFamily::Piecewise { pieces } => {
                if pieces.is_empty() {
                    return Err(Error::param("piecewise family needs at least one piece"));
                }
                for (r, f) in pieces {
                    r.check(dim)?;
                    f.validate_parts(dim)?;
                }
            }
        }
        Ok(())
    }

    /// Value at `p`; `None` when a piecewise family leaves `p` uncovered.
    pub fn eval(&self, p: &Point, grid: &Grid) -> Option<f64> {
        match self {
            WeightFamily::Constant { value } => Some(*value),
            WeightFamily::Power { exponent } => Some(grid.norm(p).powf(*exponent)),
            WeightFamily::Product { factors } => factors.iter().map(|f| f.eval(p, grid)).product(),
            WeightFamily::Piecewise { pieces } => pieces
                .iter()
                .find(|(r, _)| r.contains(p, grid.dim()))
                .and_then(|(_, f)| f.eval(p, grid)),
        }
    }

    fn sample_points(&self, grid: &Grid, points: &[Point], opts: SampleOptions) -> Result<Weight> {
        self.validate(grid.dim(), opts)?;
        let values = points
            .iter()
            .enumerate()
            .map(|(cell, p)| {
                self.eval(p, grid).ok_or_else(|| {
                    Error::param(format!("piecewise family does not cover cell {cell}"))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        Weight::new(*grid, values)
    }

    /// Sample at cell centers with default options.
    pub fn sample(&self, grid: &Grid) -> Result<Weight> {
        self.sample_with(grid, SampleOptions::default())
    }

    pub fn sample_with(&self, grid: &Grid, opts: SampleOptions) -> Result<Weight> {
        self.sample_points(grid, &grid.centers(), opts)
    }

    /// Sample at the quarter-cell-shifted targets used by the fractional integral.
    pub fn sample_at_targets(&self, grid: &Grid, opts: SampleOptions) -> Result<Weight> {
        self.sample_points(grid, &grid.targets(), opts)
    }
}

/// Nonnegative test functions `f_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Zero,
    Constant {
        value: f64,
    },
    /// `height` on the half-open box `[lo, hi)`, zero elsewhere.
    Indicator {
        lo: Vec<f64>,
        hi: Vec<f64>,
        #[serde(default = "one")]
        height: f64,
    },
    Power {
        exponent: f64,
    },
    /// Independent uniform values in `[0, scale)`; `seed` defaults to the run seed.
    Random {
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Any weight family used as a function.
    Weight {
        family: WeightFamily,
    },
}

fn one() -> f64 {
    1.0
}

impl FunctionSpec {
    pub fn indicator(lo: f64, hi: f64) -> Self {
        FunctionSpec::Indicator {
            lo: vec![lo, lo],
            hi: vec![hi, hi],
            height: 1.0,
        }
    }

    pub fn sample(&self, grid: &Grid, run_seed: u64) -> Result<SampledFunction> {
        let dim = grid.dim();
        let values = match self {
            FunctionSpec::Zero => vec![0.0; grid.cell_count()],
            FunctionSpec::Constant { value } => vec![*value; grid.cell_count()],
            FunctionSpec::Indicator { lo, hi, height } => {
                let region = Region {
                    lo: lo.clone(),
                    hi: hi.clone(),
                };
                region.check(dim)?;
                grid.centers()
                    .iter()
                    .map(|p| {
                        if region.contains(p, dim) {
                            *height
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
            FunctionSpec::Power { exponent } => {
                if *exponent <= -(dim as f64) {
                    return Err(Error::NonIntegrable {
                        exponent: *exponent,
                        dim,
                    });
                }
                grid.centers()
                    .iter()
                    .map(|p| grid.norm(p).powf(*exponent))
                    .collect()
            }
            FunctionSpec::Random { seed, scale } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(run_seed));
                (0..grid.cell_count())
                    .map(|_| scale * rng.gen::<f64>())
                    .collect()
            }
            FunctionSpec::Weight { family } => {
                return family.sample(grid).map(|w| w.as_function().clone())
            }
        };
        SampledFunction::new(*grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_one_samples_to_ones() {
        let g = Grid::new(2, 1.0, 8).unwrap();
        let w = WeightFamily::one().sample(&g).unwrap();
        assert!(w.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn inverse_distance_at_first_center() {
        let g = Grid::new(1, 1.0, 8).unwrap();
        let w = WeightFamily::power(-1.0)
            .sample_with(
                &g,
                SampleOptions {
                    allow_non_integrable: true,
                },
            )
            .unwrap();
        // center 0.125 is cell 4
        assert_eq!(w.values()[4], 8.0);
        assert_eq!(w.values()[3], 8.0);
    }

    #[test]
    fn integrability_guard() {
        let g = Grid::new(1, 1.0, 8).unwrap();
        assert!(matches!(
            WeightFamily::power(-1.5).sample(&g),
            Err(Error::NonIntegrable { .. })
        ));
        assert!(WeightFamily::power(-1.0).sample(&g).is_err());
        assert!(WeightFamily::power(-0.99).sample(&g).is_ok());
        let g2 = Grid::new(2, 1.0, 8).unwrap();
        assert!(WeightFamily::power(-1.0).sample(&g2).is_ok());
        let prod = WeightFamily::Product {
            factors: vec![WeightFamily::power(-0.6), WeightFamily::power(-0.6)],
        };
        assert!(prod.sample(&g).is_err());
    }

    #[test]
    fn nonpositive_constant_rejected() {
        let g = Grid::new(1, 1.0, 8).unwrap();
        assert!(WeightFamily::constant(0.0).sample(&g).is_err());
        assert!(WeightFamily::constant(-2.0).sample(&g).is_err());
    }

    #[test]
    fn piecewise_and_product() {
        let g = Grid::new(1, 1.0, 8).unwrap();
        let fam = WeightFamily::Piecewise {
            pieces: vec![
                (Region::interval(-1.0, 0.0), WeightFamily::constant(2.0)),
                (
                    Region::interval(0.0, 1.0),
                    WeightFamily::Product {
                        factors: vec![WeightFamily::constant(3.0), WeightFamily::power(1.0)],
                    },
                ),
            ],
        };
        let w = fam.sample(&g).unwrap();
        assert_eq!(w.values()[0], 2.0);
        assert_eq!(w.values()[7], 3.0 * 0.875);
        let gap = WeightFamily::Piecewise {
            pieces: vec![(Region::interval(-1.0, 0.0), WeightFamily::one())],
        };
        assert!(gap.sample(&g).is_err());
    }

    #[test]
    fn indicator_and_random() {
        let g = Grid::new(1, 1.0, 8).unwrap();
        let f = FunctionSpec::indicator(0.0, 0.5).sample(&g, 0).unwrap();
        assert_eq!(f.values(), &[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        let a = FunctionSpec::Random {
            seed: None,
            scale: 2.0,
        }
        .sample(&g, 5)
        .unwrap();
        let b = FunctionSpec::Random {
            seed: None,
            scale: 2.0,
        }
        .sample(&g, 5)
        .unwrap();
        assert_eq!(a, b);
        assert!(a.values().iter().all(|&v| (0.0..2.0).contains(&v)));
    }

    #[test]
    fn family_json_shape() {
        let fam: WeightFamily =
            serde_json::from_str(r#"{"kind":"power","exponent":-0.5}"#).unwrap();
        assert_eq!(fam, WeightFamily::power(-0.5));
        let f: FunctionSpec =
            serde_json::from_str(r#"{"kind":"indicator","lo":[0.0],"hi":[1.0]}"#).unwrap();
        assert!(matches!(f, FunctionSpec::Indicator { height, .. } if height == 1.0));
    }
}
