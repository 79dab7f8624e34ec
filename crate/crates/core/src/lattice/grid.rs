use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `R^n`; only the first `dim` coordinates are meaningful.
pub type Point = [f64; 2];

/// Uniform grid of `N^n` cells covering `[-R, R)^n`.
///
/// Cell centers sit at `-R + (k + 1/2) h` with `h = 2R/N`. Since `N` is even,
/// no center coordinate is ever zero: the two centers closest to the origin
/// are at `±h/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    dim: usize,
    half_width: f64,
    cells_per_axis: usize,
    cell_side: f64,
}

/// Serializable grid description (one grid per entry of `cells`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub half_width: f64,
    pub cells: Vec<usize>,
}

impl GridSpec {
    pub fn grids(&self) -> Result<Vec<Grid>> {
        if self.cells.is_empty() {
            return Err(Error::InvalidGrid("empty list of cell counts".into()));
        }
        self.cells
            .iter()
            .map(|&n| Grid::new(self.dim, self.half_width, n))
            .collect()
    }
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, cells_per_axis: usize) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }
        if cells_per_axis < 4 || !cells_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "cells per axis must be a power of two >= 4, got {cells_per_axis}"
            )));
        }
        Ok(Self {
            dim,
            half_width,
            cells_per_axis,
            cell_side: 2.0 * half_width / cells_per_axis as f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    pub fn cell_side(&self) -> f64 {
        self.cell_side
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_axis.pow(self.dim as u32)
    }

    /// Lebesgue measure of one cell, `h^n`.
    pub fn cell_measure(&self) -> f64 {
        self.cell_side.powi(self.dim as i32)
    }

    /// Center coordinate of cell index `k` along one axis.
    #[inline]
    pub fn axis_center(&self, k: usize) -> f64 {
        -self.half_width + (k as f64 + 0.5) * self.cell_side
    }

    /// Per-axis indices of a flat cell index (row-major, axis 0 slowest).
    #[inline]
    pub fn cell_coords(&self, cell: usize) -> [usize; 2] {
        if self.dim == 1 {
            [cell, 0]
        } else {
            [cell / self.cells_per_axis, cell % self.cells_per_axis]
        }
    }

    #[inline]
    pub fn cell_index(&self, coords: [usize; 2]) -> usize {
        if self.dim == 1 {
            coords[0]
        } else {
            coords[0] * self.cells_per_axis + coords[1]
        }
    }

    pub fn center(&self, cell: usize) -> Point {
        let c = self.cell_coords(cell);
        let mut p = [0.0; 2];
        for (axis, slot) in p.iter_mut().enumerate().take(self.dim) {
            *slot = self.axis_center(c[axis]);
        }
        p
    }

    /// Evaluation point for the fractional integral: the cell center moved by
    /// a quarter cell along every axis. It stays inside its own cell and never
    /// coincides with a source center.
    pub fn target(&self, cell: usize) -> Point {
        let mut p = self.center(cell);
        for x in p.iter_mut().take(self.dim) {
            *x += 0.25 * self.cell_side;
        }
        p
    }

    pub fn centers(&self) -> Vec<Point> {
        (0..self.cell_count()).map(|c| self.center(c)).collect()
    }

    pub fn targets(&self) -> Vec<Point> {
        (0..self.cell_count()).map(|c| self.target(c)).collect()
    }

    /// Euclidean norm of the first `dim` coordinates.
    #[inline]
    pub fn norm(&self, p: &Point) -> f64 {
        if self.dim == 1 {
            p[0].abs()
        } else {
            p[0].hypot(p[1])
        }
    }

    pub(crate) fn check_cell(&self, cell: usize) -> Result<()> {
        if cell < self.cell_count() {
            Ok(())
        } else {
            Err(Error::CellOutOfBounds {
                cell,
                count: self.cell_count(),
            })
        }
    }

    pub fn cube(&self, origin: [usize; 2], side: usize) -> Result<Cube> {
        let cube = Cube { origin, side };
        cube.check(self)?;
        Ok(cube)
    }

    /// Every cube of `family`, in a deterministic order.
    pub fn cubes(&self, family: CubeFamily) -> Result<Vec<Cube>> {
        family.check(self.dim)?;
        let n = self.cells_per_axis;
        match family {
            CubeFamily::AllCubes => {
                let mut out = Vec::with_capacity(n * (n + 1) / 2);
                for a in 0..n {
                    for b in a + 1..=n {
                        out.push(Cube {
                            origin: [a, 0],
                            side: b - a,
                        });
                    }
                }
                Ok(out)
            }
            CubeFamily::ShiftedDyadic => {
                let mut set = BTreeSet::new();
                for (side, offset) in dyadic_systems(n) {
                    let starts: Vec<usize> = (0..)
                        .map(|j| offset + j * side)
                        .take_while(|&s| s + side <= n)
                        .collect();
                    if self.dim == 1 {
                        for &s in &starts {
                            set.insert((side, [s, 0]));
                        }
                    } else {
                        for &s0 in &starts {
                            for &s1 in &starts {
                                set.insert((side, [s0, s1]));
                            }
                        }
                    }
                }
                Ok(set
                    .into_iter()
                    .map(|(side, origin)| Cube { origin, side })
                    .collect())
            }
        }
    }

    /// Cubes of `family` that contain `cell`. For [`CubeFamily::AllCubes`]
    /// the list is every cell-aligned interval `[a, b)` with `a <= cell < b`,
    /// ordered by `a` and then `b`.
    pub fn cubes_containing(&self, family: CubeFamily, cell: usize) -> Result<Vec<Cube>> {
        family.check(self.dim)?;
        self.check_cell(cell)?;
        let n = self.cells_per_axis;
        let c = self.cell_coords(cell);
        match family {
            CubeFamily::AllCubes => {
                let mut out = Vec::with_capacity((c[0] + 1) * (n - c[0]));
                for a in 0..=c[0] {
                    for b in c[0] + 1..=n {
                        out.push(Cube {
                            origin: [a, 0],
                            side: b - a,
                        });
                    }
                }
                Ok(out)
            }
            CubeFamily::ShiftedDyadic => {
                let mut out: Vec<Cube> = Vec::new();
                for (side, offset) in dyadic_systems(n) {
                    let mut origin = [0usize; 2];
                    let mut ok = true;
                    for axis in 0..self.dim {
                        if c[axis] < offset {
                            ok = false;
                            break;
                        }
                        let start = offset + (c[axis] - offset) / side * side;
                        if start + side > n {
                            ok = false;
                            break;
                        }
                        origin[axis] = start;
                    }
                    if ok {
                        out.push(Cube { origin, side });
                    }
                }
                out.sort_by_key(|q| (q.side, q.origin));
                out.dedup();
                Ok(out)
            }
        }
    }
}

/// `(side, offset)` pairs of the three shifted dyadic systems: at side `s`
/// the offsets are `0`, `round(s/3)` and `round(2s/3)` cells along the
/// diagonal. Coinciding offsets are listed once.
fn dyadic_systems(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut side = 1;
    while side <= n {
        let mut offsets = vec![0, (side + 1) / 3, (2 * side + 1) / 3];
        offsets.retain(|&o| o < side || o == 0);
        offsets.sort_unstable();
        offsets.dedup();
        for o in offsets {
            out.push((side, o));
        }
        side *= 2;
    }
    out
}

/// Axis-aligned cube made of whole cells: `side` cells along every axis
/// starting at `origin`. In one dimension `origin[1]` is always 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cube {
    pub origin: [usize; 2],
    pub side: usize,
}

impl Cube {
    pub(crate) fn check(&self, grid: &Grid) -> Result<()> {
        let n = grid.cells_per_axis();
        let fits = self.side > 0
            && (0..grid.dim()).all(|a| self.origin[a] + self.side <= n)
            && (grid.dim() == 2 || self.origin[1] == 0);
        if fits {
            Ok(())
        } else {
            Err(Error::CubeOutOfBounds {
                origin: self.origin,
                side: self.side,
                cells: n,
            })
        }
    }

    /// Geometric measure `(s h)^n`.
    pub fn measure(&self, grid: &Grid) -> f64 {
        (self.side as f64 * grid.cell_side()).powi(grid.dim() as i32)
    }

    /// Number of cells, `s^n`.
    pub fn cell_count(&self, grid: &Grid) -> usize {
        self.side.pow(grid.dim() as u32)
    }

    pub fn contains(&self, grid: &Grid, cell: usize) -> bool {
        let c = grid.cell_coords(cell);
        (0..grid.dim()).all(|a| c[a] >= self.origin[a] && c[a] < self.origin[a] + self.side)
    }

    /// Flat indices of the cells in the cube, row-major.
    pub fn cells(&self, grid: &Grid) -> Vec<usize> {
        let (o, s) = (self.origin, self.side);
        if grid.dim() == 1 {
            (o[0]..o[0] + s).collect()
        } else {
            let mut out = Vec::with_capacity(s * s);
            for i in o[0]..o[0] + s {
                for j in o[1]..o[1] + s {
                    out.push(grid.cell_index([i, j]));
                }
            }
            out
        }
    }
}

/// Finite family of cubes standing in for the supremum over all cubes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CubeFamily {
    /// Every cell-aligned interval (one dimension only).
    AllCubes,
    /// Dyadic cubes of the grid plus the two diagonally shifted copies used in
    /// the one-third trick, restricted to cubes lying inside the domain.
    ShiftedDyadic,
}

impl CubeFamily {
    pub fn default_for(dim: usize) -> Self {
        if dim == 1 {
            CubeFamily::AllCubes
        } else {
            CubeFamily::ShiftedDyadic
        }
    }

    pub(crate) fn check(self, dim: usize) -> Result<()> {
        match (self, dim) {
            (CubeFamily::AllCubes, 1) | (CubeFamily::ShiftedDyadic, 1 | 2) => Ok(()),
            _ => Err(Error::UnsupportedFamily { family: self, dim }),
        }
    }
}
