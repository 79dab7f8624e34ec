use super::{check_alpha, check_inputs, OperatorSpec};
use crate::error::{Error, Result};
use crate::lattice::{Cube, CubeFamily, Grid, PrefixTable};
use crate::par;
use crate::weights::SampledFunction;

/// `M_α(f⃗)(x) = sup_{Q ∋ x} |Q|^{α/n} Π_i avg_Q f_i` over the cubes of
/// `spec.family`, evaluated at every cell (cubes are unions of cells, so the
/// value is constant on each cell).
pub fn maximal(fs: &[SampledFunction], spec: &OperatorSpec) -> Result<SampledFunction> {
    check_inputs(fs, spec.m)?;
    let grid = *fs[0].grid();
    spec.validate(grid.dim(), false)?;
    spec.family.check(grid.dim())?;
    let tables = fs
        .iter()
        .map(|f| PrefixTable::build(&grid, f.values()))
        .collect::<Result<Vec<_>>>()?;
    let power = spec.alpha / grid.dim() as f64;
    let value = |q: &Cube| {
        let prod: f64 = tables.iter().map(|t| t.average_unchecked(q)).product();
        q.measure(&grid).powf(power) * prod
    };
    sup_over_containing(&grid, spec.family, value)
}

/// For every cell, the max of `value(Q)` over family cubes `Q` containing it.
fn sup_over_containing<F>(grid: &Grid, family: CubeFamily, value: F) -> Result<SampledFunction>
where
    F: Fn(&Cube) -> f64 + Sync + Send,
{
    let n = grid.cells_per_axis();
    let out = match family {
        CubeFamily::AllCubes => {
            // Row a: suffix maxima over b of V([a, b)) give, for each cell
            // c >= a, the best interval starting at a and containing c.
            par::fold_max(n, n, |a, acc| {
                let mut best = 0.0f64;
                for b in (a + 1..=n).rev() {
                    let v = value(&Cube {
                        origin: [a, 0],
                        side: b - a,
                    });
                    if v > best {
                        best = v;
                    }
                    let c = b - 1;
                    if best > acc[c] {
                        acc[c] = best;
                    }
                }
            })
        }
        CubeFamily::ShiftedDyadic => {
            let count = grid.cell_count();
            par::map_range(count, |cell| {
                grid.cubes_containing(family, cell)
                    .map(|cubes| cubes.iter().map(&value).fold(0.0, f64::max))
                    .unwrap_or(f64::NAN)
            })
        }
    };
    SampledFunction::new(*grid, out)
}

/// Largest grid accepted by [`maximal_oracle`] for a given dimension.
pub fn oracle_limit(dim: usize) -> usize {
    if dim == 1 {
        256
    } else {
        32
    }
}

/// Ground-truth path: every cube average is summed cell by cell, no prefix
/// tables, then scattered to the cells of the cube.
pub fn maximal_oracle(fs: &[SampledFunction], spec: &OperatorSpec) -> Result<SampledFunction> {
    check_inputs(fs, spec.m)?;
    let grid = *fs[0].grid();
    spec.validate(grid.dim(), false)?;
    let n = grid.cells_per_axis();
    if n > oracle_limit(grid.dim()) {
        return Err(Error::Guard {
            what: "maximal_oracle".into(),
            required: n as u128,
            budget: oracle_limit(grid.dim()) as u128,
        });
    }
    let mut out = vec![0.0f64; grid.cell_count()];
    for q in grid.cubes(spec.family)? {
        let cells = q.cells(&grid);
        let mut value = q.measure(&grid).powf(spec.alpha / grid.dim() as f64);
        for f in fs {
            let sum: f64 = cells.iter().map(|&c| f.values()[c]).sum();
            value *= sum / cells.len() as f64;
        }
        for &c in &cells {
            if value > out[c] {
                out[c] = value;
            }
        }
    }
    SampledFunction::new(grid, out)
}

/// Multi(sub)linear maximal function `M(f⃗) = sup_{Q ∋ x} Π_i avg_Q f_i`,
/// written without any measure factor.
pub fn multilinear_maximal(fs: &[SampledFunction], family: CubeFamily) -> Result<SampledFunction> {
    if fs.is_empty() {
        return Err(Error::param("need at least one function"));
    }
    check_inputs(fs, fs.len())?;
    let grid = *fs[0].grid();
    family.check(grid.dim())?;
    let tables = fs
        .iter()
        .map(|f| PrefixTable::build(&grid, f.values()))
        .collect::<Result<Vec<_>>>()?;
    sup_over_containing(&grid, family, |q| {
        tables.iter().map(|t| t.average_unchecked(q)).product()
    })
}

/// Linear fractional maximal function `M_α f = sup_{Q ∋ x} |Q|^{α/n} avg_Q f`.
pub fn fractional_maximal(
    f: &SampledFunction,
    alpha: f64,
    family: CubeFamily,
) -> Result<SampledFunction> {
    let grid = *f.grid();
    check_alpha(1, grid.dim(), alpha, false)?;
    family.check(grid.dim())?;
    let table = PrefixTable::build(&grid, f.values())?;
    let power = alpha / grid.dim() as f64;
    sup_over_containing(&grid, family, |q| {
        q.measure(&grid).powf(power) * table.average_unchecked(q)
    })
}
