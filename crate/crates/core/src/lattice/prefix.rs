use crate::error::{Error, Result};
use crate::lattice::{Cube, Grid};

/// Double-double accumulator: `hi + lo` carries roughly 106 bits, so cube
/// sums obtained by differencing prefix sums keep full double precision even
/// when the prefix totals dwarf the queried block.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

impl Dd {
    #[inline]
    fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let e = e + t;
        let (s, e) = two_sum(s, e);
        let e = e + f;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Range-minimum structure over square blocks. Level `k` stores the minimum
/// of every `2^k`-sided block, so any cube is covered by (at most) four
/// overlapping power-of-two blocks.
#[derive(Clone, Debug)]
struct MinTable {
    dim: usize,
    n: usize,
    levels: Vec<Vec<f64>>,
}

impl MinTable {
    fn build(grid: &Grid, values: &[f64]) -> Self {
        let n = grid.cells_per_axis();
        let dim = grid.dim();
        let mut levels = vec![values.to_vec()];
        let mut k = 1;
        while (1usize << k) <= n {
            let prev = &levels[k - 1];
            let half = 1usize << (k - 1);
            let span = n - (1usize << k) + 1;
            let next = if dim == 1 {
                (0..span).map(|i| prev[i].min(prev[i + half])).collect()
            } else {
                let mut lvl = vec![0.0; n * n];
                for i in 0..span {
                    for j in 0..span {
                        let a = prev[i * n + j].min(prev[i * n + j + half]);
                        let b = prev[(i + half) * n + j].min(prev[(i + half) * n + j + half]);
                        lvl[i * n + j] = a.min(b);
                    }
                }
                lvl
            };
            levels.push(next);
            k += 1;
        }
        Self { dim, n, levels }
    }

    #[inline]
    fn query(&self, q: &Cube) -> f64 {
        let k = q.side.ilog2() as usize;
        let d = q.side - (1usize << k);
        let lvl = &self.levels[k];
        let [i, j] = q.origin;
        if self.dim == 1 {
            lvl[i].min(lvl[i + d])
        } else {
            let n = self.n;
            let a = lvl[i * n + j].min(lvl[i * n + j + d]);
            let b = lvl[(i + d) * n + j].min(lvl[(i + d) * n + j + d]);
            a.min(b)
        }
    }
}

/// Summed-area table plus square range-minimum table for one sampled
/// function. Immutable after construction; all queries are `&self`.
#[derive(Clone, Debug)]
pub struct PrefixTable {
    grid: Grid,
    // (N+1)^n entries; entry (i, j) holds the sum over cells [0, i) x [0, j).
    sums: Vec<Dd>,
    mins: MinTable,
}

impl PrefixTable {
    pub fn build(grid: &Grid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::GridMismatch);
        }
        if let Some(cell) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { cell });
        }
        let n = grid.cells_per_axis();
        let sums = if grid.dim() == 1 {
            let mut s = Vec::with_capacity(n + 1);
            s.push(Dd::default());
            for (i, &v) in values.iter().enumerate() {
                s.push(s[i].add(Dd::from(v)));
            }
            s
        } else {
            let w = n + 1;
            let mut s = vec![Dd::default(); w * w];
            for i in 0..n {
                for j in 0..n {
                    let v = Dd::from(values[i * n + j]);
                    s[(i + 1) * w + j + 1] = v
                        .add(s[i * w + j + 1])
                        .add(s[(i + 1) * w + j])
                        .add(s[i * w + j].neg());
                }
            }
            s
        };
        Ok(Self {
            grid: *grid,
            sums,
            mins: MinTable::build(grid, values),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Plain sum of the cell values inside `q` (no cell-measure factor).
    pub fn cube_sum(&self, q: &Cube) -> Result<f64> {
        q.check(&self.grid)?;
        Ok(self.sum_unchecked(q))
    }

    /// `∫_Q f`, i.e. the cell-value sum times the cell measure.
    pub fn cube_integral(&self, q: &Cube) -> Result<f64> {
        Ok(self.cube_sum(q)? * self.grid.cell_measure())
    }

    /// `(1/|Q|) ∫_Q f`, which equals the plain mean of the cell values.
    pub fn cube_average(&self, q: &Cube) -> Result<f64> {
        q.check(&self.grid)?;
        Ok(self.average_unchecked(q))
    }

    /// Minimum cell value in `q` (the essential infimum of the
    /// piecewise-constant function).
    pub fn cube_min(&self, q: &Cube) -> Result<f64> {
        q.check(&self.grid)?;
        Ok(self.mins.query(q))
    }

    #[inline]
    pub(crate) fn sum_unchecked(&self, q: &Cube) -> f64 {
        let [i, j] = q.origin;
        let s = q.side;
        if self.grid.dim() == 1 {
            self.sums[i + s].add(self.sums[i].neg()).value()
        } else {
            let w = self.grid.cells_per_axis() + 1;
            let at = |a: usize, b: usize| self.sums[a * w + b];
            at(i + s, j + s)
                .add(at(i, j + s).neg())
                .add(at(i + s, j).neg())
                .add(at(i, j))
                .value()
        }
    }

    #[inline]
    pub(crate) fn average_unchecked(&self, q: &Cube) -> f64 {
        self.sum_unchecked(q) / q.cell_count(&self.grid) as f64
    }

    #[inline]
    pub(crate) fn min_unchecked(&self, q: &Cube) -> f64 {
        self.mins.query(q)
    }

    /// Fault-injection hook for the oracle self-check: perturbs one stored
    /// prefix entry so that cube sums touching it become wrong.
    #[doc(hidden)]
    pub fn corrupt_for_testing(&mut self) {
        let mid = self.sums.len() / 2;
        self.sums[mid].hi += 1.0;
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::lattice::CubeFamily;

    fn naive_sum(grid: &Grid, values: &[f64], q: &Cube) -> f64 {
        q.cells(grid).iter().map(|&c| values[c]).sum()
    }

    fn naive_min(grid: &Grid, values: &[f64], q: &Cube) -> f64 {
        q.cells(grid)
            .iter()
            .map(|&c| values[c])
            .fold(f64::INFINITY, f64::min)
    }

    fn random_values(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen::<f64>()).collect()
    }

    #[test]
    fn constant_one_sums() {
        let g = Grid::new(1, 1.0, 8).unwrap();
        let t = PrefixTable::build(&g, &[1.0; 8]).unwrap();
        for q in g.cubes(CubeFamily::AllCubes).unwrap() {
            assert_eq!(t.cube_sum(&q).unwrap(), q.side as f64);
            assert_eq!(t.cube_integral(&q).unwrap(), q.side as f64 * 0.25);
            assert_eq!(t.cube_average(&q).unwrap(), 1.0);
        }
    }

    #[test]
    fn ramp_whole_domain_average_is_zero() {
        let g = Grid::new(1, 1.0, 16).unwrap();
        let vals: Vec<f64> = g.centers().iter().map(|p| p[0]).collect();
        let t = PrefixTable::build(&g, &vals).unwrap();
        let q = g.cube([0, 0], 16).unwrap();
        assert!(t.cube_average(&q).unwrap().abs() < 1e-15);
    }

    #[test]
    fn sums_match_naive_on_all_intervals() {
        let g = Grid::new(1, 1.0, 64).unwrap();
        let vals = random_values(64, 7);
        let t = PrefixTable::build(&g, &vals).unwrap();
        let cubes = g.cubes(CubeFamily::AllCubes).unwrap();
        assert_eq!(cubes.len(), 2080);
        for q in cubes {
            let a = t.cube_sum(&q).unwrap();
            let b = naive_sum(&g, &vals, &q);
            assert!((a - b).abs() <= 1e-12 * b.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn mins_match_naive_on_dyadic_2d() {
        let g = Grid::new(2, 1.0, 16).unwrap();
        let vals = random_values(256, 11);
        let t = PrefixTable::build(&g, &vals).unwrap();
        for q in g.cubes(CubeFamily::ShiftedDyadic).unwrap() {
            assert_eq!(t.cube_min(&q).unwrap(), naive_min(&g, &vals, &q));
        }
    }

    #[test]
    fn random_queries_2d() {
        let g = Grid::new(2, 1.0, 32).unwrap();
        let vals = random_values(1024, 3);
        let t = PrefixTable::build(&g, &vals).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let side = rng.gen_range(1..=32);
            let i = rng.gen_range(0..=32 - side);
            let j = rng.gen_range(0..=32 - side);
            let q = g.cube([i, j], side).unwrap();
            assert_eq!(t.cube_min(&q).unwrap(), naive_min(&g, &vals, &q));
            let b = naive_sum(&g, &vals, &q);
            assert!((t.cube_sum(&q).unwrap() - b).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn out_of_bounds_and_bad_values() {
        let g = Grid::new(1, 1.0, 8).unwrap();
        let t = PrefixTable::build(&g, &[1.0; 8]).unwrap();
        assert!(t
            .cube_average(&Cube {
                origin: [5, 0],
                side: 4
            })
            .is_err());
        assert!(t
            .cube_average(&Cube {
                origin: [0, 0],
                side: 0
            })
            .is_err());
        let mut vals = vec![1.0; 8];
        vals[3] = f64::NAN;
        assert!(matches!(
            PrefixTable::build(&g, &vals),
            Err(Error::NonFinite { cell: 3 })
        ));
    }

    #[test]
    fn sums_survive_large_dynamic_range() {
        // tiny block next to a huge one
        let g = Grid::new(1, 1.0, 16).unwrap();
        let mut vals = vec![1e-3; 16];
        vals[0] = 1e12;
        let t = PrefixTable::build(&g, &vals).unwrap();
        let q = g.cube([5, 0], 2).unwrap();
        assert!((t.cube_sum(&q).unwrap() - 2e-3).abs() <= 1e-12 * 2e-3);
    }
}
