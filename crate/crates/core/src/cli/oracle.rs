//! Fast-versus-oracle equivalence suite: summed-area and range-min tables
//! against direct loops, the maximal operator against its direct oracle,
//! and weak norms against a threshold scan.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{OracleCase, OracleConfig};
use crate::error::Result;
use crate::lattice::{CubeFamily, Grid, PrefixTable};
use crate::norms::{distribution, power_identity_check, weak_norm, WeightedMeasure};
use crate::operators::{maximal, maximal_oracle, OperatorSpec};
use crate::weights::{SampledFunction, Weight};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub check: String,
    pub case: String,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            // occasional spikes and zeros exercise the dynamic range
            match rng.gen_range(0..10) {
                0 => 0.0,
                1 => rng.gen_range(10.0..1000.0),
                _ => rng.gen::<f64>(),
            }
        })
        .collect()
}

struct Tally {
    check: &'static str,
    max: f64,
}

impl Tally {
    fn new(check: &'static str) -> Self {
        Self { check, max: 0.0 }
    }

    fn see(&mut self, d: f64) {
        if d > self.max || d.is_nan() {
            self.max = if d.is_nan() { f64::INFINITY } else { d };
        }
    }

    fn finish(self, case: &str, tolerance: f64) -> OracleResult {
        OracleResult {
            check: self.check.into(),
            case: case.into(),
            max_discrepancy: self.max,
            tolerance,
            passed: self.max <= tolerance,
        }
    }
}

fn run_case(case: &OracleCase, cfg: &OracleConfig, seed: u64) -> Result<Vec<OracleResult>> {
    let grid = Grid::new(case.dim, 1.0, case.cells)?;
    let family = CubeFamily::default_for(case.dim);
    let label = format!("m={} n={} N={}", case.m, case.dim, case.cells);
    let cubes = grid.cubes(family)?;
    let mut sums = Tally::new("cube_sum");
    let mut mins = Tally::new("cube_min");
    let mut ops = Tally::new("maximal");
    let mut weak = Tally::new("weak_norm");
    let mut power = Tally::new("power_identity");
    let top = (case.m * case.dim) as f64;
    for s in 0..cfg.seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s));
        let fs = (0..case.m)
            .map(|_| SampledFunction::new(grid, random_values(&mut rng, grid.cell_count())))
            .collect::<Result<Vec<_>>>()?;

        let values = fs[0].values();
        let mut table = PrefixTable::build(&grid, values)?;
        if cfg.inject_fault {
            table.corrupt_for_testing();
        }
        for q in &cubes {
            let cells = q.cells(&grid);
            let direct: f64 = cells.iter().map(|&c| values[c]).sum();
            sums.see(rel(table.cube_sum(q)?, direct));
            let direct_min = cells
                .iter()
                .map(|&c| values[c])
                .fold(f64::INFINITY, f64::min);
            mins.see((table.cube_min(q)? - direct_min).abs());
        }

        for alpha in [0.0, 0.25 * top, 0.5 * top, 0.75 * top] {
            let spec = OperatorSpec::new(case.m, alpha, family);
            let fast = maximal(&fs, &spec)?;
            let slow = maximal_oracle(&fs, &spec)?;
            for (a, b) in fast.values().iter().zip(slow.values()) {
                ops.see(rel(*a, *b));
            }
        }

        let density = Weight::new(
            grid,
            (0..grid.cell_count())
                .map(|_| rng.gen_range(0.1..10.0))
                .collect(),
        )?;
        let mu = WeightedMeasure::new(density);
        let f = &fs[0];
        let mut levels: Vec<f64> = f.values().iter().copied().filter(|&v| v > 0.0).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        for q in [1.0 / 3.0, 0.5, 1.0, 2.0] {
            let fast = weak_norm(f, &mu, q)?.value;
            // sup over t of t·μ{f > t}^{1/q}, approached just below each level
            let mut scan: f64 = 0.0;
            for &v in &levels {
                let t = v * (1.0 - 1e-13);
                scan = scan.max(t * distribution(f, &mu, t)?.powf(1.0 / q));
            }
            weak.see(rel(fast, scan));
            power.see(power_identity_check(f, &mu, q)?);
        }
    }
    Ok(vec![
        sums.finish(&label, cfg.tolerance),
        mins.finish(&label, 0.0),
        ops.finish(&label, cfg.tolerance),
        weak.finish(&label, cfg.tolerance),
        power.finish(&label, 1e-12),
    ])
}

pub fn run_oracle(cfg: &OracleConfig, seed: u64) -> Result<Vec<OracleResult>> {
    let mut out = Vec::new();
    for (k, case) in cfg.cases.iter().enumerate() {
        out.extend(run_case(case, cfg, seed.wrapping_add(1000 * k as u64))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> OracleConfig {
        OracleConfig {
            cases: vec![
                OracleCase {
                    m: 2,
                    dim: 1,
                    cells: 32,
                },
                OracleCase {
                    m: 2,
                    dim: 2,
                    cells: 8,
                },
            ],
            seeds: 2,
            ..OracleConfig::default()
        }
    }

    #[test]
    fn clean_tables_pass() {
        let r = run_oracle(&small(), 1).unwrap();
        assert!(r.iter().all(|x| x.passed), "{r:?}");
    }

    #[test]
    fn injected_fault_is_caught() {
        let cfg = OracleConfig {
            inject_fault: true,
            ..small()
        };
        let r = run_oracle(&cfg, 1).unwrap();
        assert!(r.iter().any(|x| x.check == "cube_sum" && !x.passed));
    }
}
