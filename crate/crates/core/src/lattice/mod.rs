//! Staggered uniform grids on `[-R, R)^n`, axis-aligned cubes made of whole
//! cells, finite cube families and O(1) cube queries.

mod grid;
mod prefix;

pub use grid::{Cube, CubeFamily, Grid, GridSpec, Point};
pub use prefix::PrefixTable;
