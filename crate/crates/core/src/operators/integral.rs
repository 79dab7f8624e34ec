use super::{check_alpha, check_inputs};
use crate::error::{Error, Result};
use crate::lattice::{Grid, Point};
use crate::par;
use crate::weights::SampledFunction;
use crate::CompensatedSum;

/// `2^24` kernel evaluations: N ≤ 256 for m ≤ 2 and N ≤ 64 for m = 3 in one
/// dimension, N ≤ 16 for m = 2 in two dimensions.
pub const DEFAULT_INTEGRAL_BUDGET: u128 = 1 << 24;

/// Work guard for the `O(N^{n(m+1)})` quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntegralGuard {
    pub budget: u128,
    pub disabled: bool,
}

impl Default for IntegralGuard {
    fn default() -> Self {
        Self {
            budget: DEFAULT_INTEGRAL_BUDGET,
            disabled: false,
        }
    }
}

impl IntegralGuard {
    pub fn unlimited() -> Self {
        Self {
            disabled: true,
            ..Self::default()
        }
    }

    /// Nominal cost `N^{n(m+1)}` (targets times source tuples).
    pub fn cost(grid: &Grid, m: usize) -> u128 {
        (grid.cell_count() as u128).saturating_pow(m as u32 + 1)
    }

    pub fn check(&self, grid: &Grid, m: usize) -> Result<()> {
        let required = Self::cost(grid, m);
        if self.disabled || required <= self.budget {
            Ok(())
        } else {
            Err(Error::Guard {
                what: format!(
                    "fractional integral (m={m}, n={}, N={})",
                    grid.dim(),
                    grid.cells_per_axis()
                ),
                required,
                budget: self.budget,
            })
        }
    }
}

#[inline]
fn distance(grid: &Grid, x: &Point, y: &Point) -> f64 {
    if grid.dim() == 1 {
        (x[0] - y[0]).abs()
    } else {
        (x[0] - y[0]).hypot(x[1] - y[1])
    }
}

/// `(Σ_i |x - y_i|)^{α - mn}` with Euclidean distances; `ys.len()` is `m`.
pub fn kernel(x: &[f64], ys: &[&[f64]], alpha: f64, dim: usize) -> Result<f64> {
    if x.len() < dim || ys.iter().any(|y| y.len() < dim) {
        return Err(Error::param(format!("points need {dim} coordinates")));
    }
    let m = ys.len();
    check_alpha(m, dim, alpha, true)?;
    let total: f64 = ys
        .iter()
        .map(|y| (0..dim).map(|a| (x[a] - y[a]).powi(2)).sum::<f64>().sqrt())
        .sum();
    if total == 0.0 {
        return Err(Error::SingularKernel);
    }
    Ok(total.powf(alpha - (m * dim) as f64))
}

/// Midpoint-rule approximation of
/// `I_α(f⃗)(x) = ∫ f_1(y_1)…f_m(y_m) (Σ|x - y_i|)^{α - mn} dy⃗`
/// at every target point (cell center shifted by a quarter cell).
///
/// Sources are the cell centers carrying nonzero mass; the returned function
/// holds the value at the target of each cell.
pub fn fractional_integral(
    fs: &[SampledFunction],
    alpha: f64,
    guard: IntegralGuard,
) -> Result<SampledFunction> {
    if fs.is_empty() {
        return Err(Error::param("need at least one function"));
    }
    let m = fs.len();
    check_inputs(fs, m)?;
    let grid = *fs[0].grid();
    let dim = grid.dim();
    check_alpha(m, dim, alpha, true)?;
    guard.check(&grid, m)?;

    // per slot: (center, value) for cells with nonzero mass
    let sources: Vec<Vec<(Point, f64)>> = fs
        .iter()
        .map(|f| {
            f.values()
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(c, &v)| (grid.center(c), v))
                .collect()
        })
        .collect();
    if sources.iter().any(|s| s.is_empty()) {
        return Ok(SampledFunction::zeros(grid));
    }
    let exponent = alpha - (m * dim) as f64;
    let volume = grid.cell_measure().powi(m as i32);

    let values = par::map_range(grid.cell_count(), |cell| {
        let x = grid.target(cell);
        // distances from x to each slot's sources, paired with the values
        let slots: Vec<Vec<(f64, f64)>> = sources
            .iter()
            .map(|s| {
                s.iter()
                    .map(|(y, v)| (distance(&grid, &x, y), *v))
                    .collect()
            })
            .collect();
        let mut acc = CompensatedSum::default();
        match m {
            1 => {
                for &(d, v) in &slots[0] {
                    acc.add(v * d.powf(exponent));
                }
            }
            2 => {
                for &(d1, v1) in &slots[0] {
                    for &(d2, v2) in &slots[1] {
                        acc.add(v1 * v2 * (d1 + d2).powf(exponent));
                    }
                }
            }
            _ => accumulate(&slots, 0, 0.0, 1.0, exponent, &mut acc),
        }
        acc.value() * volume
    });
    SampledFunction::new(grid, values)
}

fn accumulate(
    slots: &[Vec<(f64, f64)>],
    depth: usize,
    dist: f64,
    prod: f64,
    exponent: f64,
    acc: &mut CompensatedSum,
) {
    if depth + 1 == slots.len() {
        for &(d, v) in &slots[depth] {
            acc.add(prod * v * (dist + d).powf(exponent));
        }
        return;
    }
    for &(d, v) in &slots[depth] {
        accumulate(slots, depth + 1, dist + d, prod * v, exponent, acc);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::FunctionSpec;

    #[test]
    fn kernel_values() {
        assert_eq!(kernel(&[0.0], &[&[4.0]], 0.5, 1).unwrap(), 0.5);
        assert_eq!(kernel(&[0.0], &[&[1.0], &[1.0]], 1.0, 1).unwrap(), 0.5);
        assert!(matches!(
            kernel(&[1.0], &[&[1.0]], 0.5, 1),
            Err(Error::SingularKernel)
        ));
        assert!(kernel(&[0.0], &[&[1.0]], 1.0, 1).is_err());
        assert!(kernel(&[0.0], &[&[1.0]], 0.0, 1).is_err());
        let a = kernel(&[0.3, -0.2], &[&[1.0, 1.0], &[-2.0, 0.5]], 1.5, 2).unwrap();
        let b = kernel(&[1.3, 0.8], &[&[2.0, 2.0], &[-1.0, 1.5]], 1.5, 2).unwrap();
        assert!((a - b).abs() < 1e-14 * a);
    }

    #[test]
    fn zero_input_gives_zero() {
        let g = Grid::new(1, 1.0, 32).unwrap();
        let z = SampledFunction::zeros(g);
        let out =
            fractional_integral(std::slice::from_ref(&z), 0.5, IntegralGuard::default()).unwrap();
        assert!(out.is_zero());
        let one = SampledFunction::constant(g, 1.0).unwrap();
        let out = fractional_integral(&[one, z], 1.0, IntegralGuard::default()).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn matches_direct_kernel_sum() {
        let g = Grid::new(1, 1.0, 16).unwrap();
        let f1 = FunctionSpec::indicator(-0.5, 0.25).sample(&g, 0).unwrap();
        let f2 = FunctionSpec::Random {
            seed: Some(3),
            scale: 1.0,
        }
        .sample(&g, 0)
        .unwrap();
        let f3 = FunctionSpec::indicator(0.0, 1.0).sample(&g, 0).unwrap();
        let fs = [f1, f2, f3];
        let alpha = 1.2;
        let out = fractional_integral(&fs, alpha, IntegralGuard::default()).unwrap();
        let h = g.cell_side();
        for cell in [0, 5, 15] {
            let x = g.target(cell);
            let mut s = 0.0;
            for a in 0..16 {
                for b in 0..16 {
                    for c in 0..16 {
                        let w = fs[0].values()[a] * fs[1].values()[b] * fs[2].values()[c];
                        if w == 0.0 {
                            continue;
                        }
                        let ys = [g.center(a), g.center(b), g.center(c)];
                        let ys: Vec<&[f64]> = ys.iter().map(|p| &p[..1]).collect();
                        s += w * kernel(&x[..1], &ys, alpha, 1).unwrap();
                    }
                }
            }
            s *= h.powi(3);
            assert!((out.values()[cell] - s).abs() <= 1e-12 * s);
        }
    }

    #[test]
    fn guard_arithmetic() {
        let g = Grid::new(1, 1.0, 256).unwrap();
        assert!(IntegralGuard::default().check(&g, 2).is_ok());
        assert!(IntegralGuard::default().check(&g, 3).is_err());
        let g = Grid::new(1, 1.0, 64).unwrap();
        assert!(IntegralGuard::default().check(&g, 3).is_ok());
        let g = Grid::new(2, 1.0, 16).unwrap();
        assert!(IntegralGuard::default().check(&g, 2).is_ok());
        let g = Grid::new(2, 1.0, 32).unwrap();
        match IntegralGuard::default().check(&g, 2) {
            Err(Error::Guard { required, .. }) => assert_eq!(required, 1u128 << 30),
            other => panic!("{other:?}"),
        }
        assert!(IntegralGuard::unlimited().check(&g, 2).is_ok());
    }

    #[test]
    fn positive_where_mass_exists() {
        let g = Grid::new(2, 1.0, 8).unwrap();
        let f = FunctionSpec::indicator(0.0, 0.5).sample(&g, 0).unwrap();
        let out = fractional_integral(&[f.clone(), f], 2.0, IntegralGuard::default()).unwrap();
        assert!(out.values().iter().all(|&v| v > 0.0));
    }
}
