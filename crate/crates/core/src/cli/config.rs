use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::{CubeFamily, Grid, GridSpec};
use crate::operators::{IntegralGuard, DEFAULT_INTEGRAL_BUDGET};
use crate::search::{ClimbOptions, SearchSpace};
use crate::verify::{Instance, RunSettings, TheoremId};
use crate::weights::{SampleOptions, StabilityThresholds, WeightFamily};

/// A class constant requested for a named weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", deny_unknown_fields)]
pub enum ClassRequest {
    A1,
    Ap {
        p: f64,
    },
    AinfProxy {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ladder: Option<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightRequest {
    pub name: String,
    pub family: WeightFamily,
    pub classes: Vec<ClassRequest>,
}

/// Both sides of the multilinear-class characterization for a weight tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterizationRequest {
    pub name: String,
    pub weights: Vec<WeightFamily>,
    pub exponents: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub space: SearchSpace,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

fn default_budget() -> usize {
    256
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub space: SearchSpace,
    /// Starting point; defaults to the projected midpoint of every axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
    /// Start from the best stable row of a sweep over the same lattice,
    /// with this evaluation budget. The climb then dominates that sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_from_sweep: Option<usize>,
    pub climb: ClimbOptions,
}

/// One fast-versus-oracle comparison size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCase {
    pub m: usize,
    pub dim: usize,
    pub cells: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_oracle_cases")]
    pub cases: Vec<OracleCase>,
    #[serde(default = "default_oracle_seeds")]
    pub seeds: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Corrupt one summed-area table before the lattice comparison.
    #[serde(default)]
    pub inject_fault: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            cases: default_oracle_cases(),
            seeds: default_oracle_seeds(),
            tolerance: default_tolerance(),
            inject_fault: false,
        }
    }
}

fn default_oracle_cases() -> Vec<OracleCase> {
    [(1, 1, 256), (2, 1, 128), (3, 1, 64), (2, 2, 16)]
        .iter()
        .map(|&(m, dim, cells)| OracleCase { m, dim, cells })
        .collect()
}

fn default_oracle_seeds() -> u64 {
    3
}

fn default_tolerance() -> f64 {
    1e-10
}

/// Everything a run needs; read from a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    /// Defaults to all intervals in one dimension, shifted dyadic cubes in two.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<CubeFamily>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub stability: StabilityThresholds,
    #[serde(default = "default_integral_budget")]
    pub integral_budget: u128,
    /// Permit power weights that are not locally integrable (e.g. `1/|x|` on the line).
    #[serde(default)]
    pub allow_non_integrable: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<WeightRequest>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub characterizations: Vec<CharacterizationRequest>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub instances: Vec<Instance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    /// Output directory; `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn default_integral_budget() -> u128 {
    DEFAULT_INTEGRAL_BUDGET
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("{e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn family(&self) -> CubeFamily {
        self.family
            .unwrap_or_else(|| CubeFamily::default_for(self.grid.dim))
    }

    pub fn grids(&self) -> Result<Vec<Grid>> {
        let mut cells = self.grid.cells.clone();
        cells.sort_unstable();
        if cells.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("grid cell counts must be distinct".into()));
        }
        GridSpec {
            cells,
            ..self.grid.clone()
        }
        .grids()
        .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn settings(&self, override_guards: bool) -> RunSettings {
        RunSettings {
            family: self.family(),
            seed: self.seed,
            guard: IntegralGuard {
                budget: self.integral_budget,
                disabled: override_guards,
            },
            thresholds: self.stability,
            sample: SampleOptions {
                allow_non_integrable: self.allow_non_integrable,
            },
        }
    }

    /// SHA-256 of the canonical (compact) serialization.
    pub fn hash(&self) -> Result<String> {
        let text = serde_json::to_string(self)?;
        Ok(hex::encode(Sha256::digest(text.as_bytes())))
    }

    /// Static checks run before any computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.grids()?;
        let dim = self.grid.dim;
        self.family()
            .check(dim)
            .map_err(|e| Error::Config(e.to_string()))?;
        if !(self.stability.stable >= 1.0 && self.stability.divergent > self.stability.stable) {
            return bad("stability thresholds need 1 <= stable < divergent".into());
        }
        let opts = SampleOptions {
            allow_non_integrable: self.allow_non_integrable,
        };
        let fam = |f: &WeightFamily, what: &str| {
            f.validate(dim, opts)
                .map_err(|e| Error::Config(format!("{what}: {e}")))
        };
        for w in &self.weights {
            fam(&w.family, &w.name)?;
            for c in &w.classes {
                match c {
                    ClassRequest::Ap { p } if p.is_nan() || *p <= 1.0 => {
                        return bad(format!("{}: A_p needs p > 1, got {p}", w.name))
                    }
                    ClassRequest::AinfProxy { ladder: Some(l) }
                        if l.is_empty() || l.iter().any(|p| p.is_nan() || *p <= 1.0) =>
                    {
                        return bad(format!("{}: A_inf ladder needs exponents > 1", w.name))
                    }
                    _ => {}
                }
            }
        }
        for c in &self.characterizations {
            if c.weights.is_empty() || c.weights.len() != c.exponents.len() {
                return bad(format!("{}: one exponent per weight is required", c.name));
            }
            if c.exponents.iter().any(|p| p.is_nan() || *p < 1.0) {
                return bad(format!("{}: exponents must be >= 1", c.name));
            }
            for w in &c.weights {
                fam(w, &c.name)?;
            }
        }
        for inst in &self.instances {
            self.validate_instance(inst, opts)?;
        }
        for space in [
            self.sweep.as_ref().map(|s| &s.space),
            self.search.as_ref().map(|s| &s.space),
        ]
        .into_iter()
        .flatten()
        {
            self.validate_instance(&space.template, opts)?;
        }
        if let Some(o) = &self.oracle {
            for c in &o.cases {
                if c.m == 0 || !(c.dim == 1 || c.dim == 2) {
                    return bad(format!("oracle case {c:?} is invalid"));
                }
            }
        }
        Ok(())
    }

    fn validate_instance(&self, inst: &Instance, opts: SampleOptions) -> Result<()> {
        let dim = self.grid.dim;
        let name = inst.label();
        let m = inst.m();
        if m == 0 {
            return Err(Error::Config(format!("{name}: no functions given")));
        }
        let strict = matches!(
            inst.theorem,
            TheoremId::ThmIMax
                | TheoremId::ThmExtrap
                | TheoremId::MoenA1
                | TheoremId::VectorValued42
        );
        crate::operators::check_alpha(m, dim, inst.alpha, strict)
            .map_err(|e| Error::Config(format!("{name}: {e}")))?;
        if !inst.u.is_empty() && inst.u.len() != m {
            return Err(Error::Config(format!(
                "{name}: {} weights for {m} functions",
                inst.u.len()
            )));
        }
        for w in inst.u.iter().chain(std::iter::once(&inst.v)) {
            w.validate(dim, opts)
                .map_err(|e| Error::Config(format!("{name}: {e}")))?;
        }
        match inst.theorem {
            TheoremId::Sawyer11 if dim != 1 || m != 1 || inst.alpha != 0.0 => Err(Error::Config(
                format!("{name}: Sawyer11 needs n = 1, one function and alpha = 0"),
            )),
            TheoremId::Thm23Char => Err(Error::Config(format!(
                "{name}: list Thm23Char tuples under \"characterizations\""
            ))),
            _ => Ok(()),
        }
    }
}
