//! Exact dyadic abscissae and piecewise-linear functions on dyadic grids.
//!
//! Breakpoints are integer pairs `(numerator, level)` meaning
//! `numerator / 2^level`; only ordinates are floating point. Every point
//! used by the frame construction lives on some grid `J_m = {k / 2^m}`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};

/// Deepest grid level supported by grids, functions and frame systems.
pub const MAX_LEVEL: u32 = 24;

/// Deepest level a single dyadic point may carry. Beyond 52 the value is no
/// longer exactly representable as an `f64`.
pub const MAX_POINT_LEVEL: u32 = 52;

pub(crate) fn check_grid_level(level: u32) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(FrameError::Capacity(format!(
            "grid level {level} exceeds the supported maximum {MAX_LEVEL}"
        )));
    }
    Ok(())
}

/// The number `numerator / 2^level` in `[0, 1]`, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(u64, u32)", into = "(u64, u32)")]
pub struct DyadicRational {
    numerator: u64,
    level: u32,
}

impl DyadicRational {
    pub const ZERO: Self = Self {
        numerator: 0,
        level: 0,
    };
    pub const ONE: Self = Self {
        numerator: 1,
        level: 0,
    };
    pub const HALF: Self = Self {
        numerator: 1,
        level: 1,
    };

    /// Builds `numerator / 2^level`, reducing to canonical form.
    pub fn new(numerator: u64, level: u32) -> Result<Self> {
        if level > MAX_POINT_LEVEL {
            return Err(FrameError::InvalidArgument(format!(
                "dyadic level {level} exceeds {MAX_POINT_LEVEL}"
            )));
        }
        if numerator > 1u64 << level {
            return Err(FrameError::Domain(
                numerator as f64 / (1u64 << level) as f64,
            ));
        }
        Ok(Self::reduced(numerator, level))
    }

    fn reduced(numerator: u64, level: u32) -> Self {
        if numerator == 0 {
            return Self::ZERO;
        }
        let shift = numerator.trailing_zeros().min(level);
        Self {
            numerator: numerator >> shift,
            level: level - shift,
        }
    }

    /// Recovers the canonical pair from a float that is exactly `k / 2^level`
    /// for some integer `k`; `None` otherwise.
    pub fn from_f64(x: f64, level: u32) -> Option<Self> {
        if !(0.0..=1.0).contains(&x) || level > MAX_POINT_LEVEL {
            return None;
        }
        let scaled = x * (1u64 << level) as f64;
        if scaled.fract() != 0.0 {
            return None;
        }
        Some(Self::reduced(scaled as u64, level))
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    /// Level in lowest terms: the smallest `m` with this point in `J_m`.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / (1u64 << self.level) as f64
    }

    /// Numerator over the common denominator `2^level`. Requires
    /// `level >= self.level()`.
    pub fn numerator_at(&self, level: u32) -> u64 {
        debug_assert!(level >= self.level);
        self.numerator << (level - self.level)
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let level = self.level.max(other.level);
        self.numerator_at(level).cmp(&other.numerator_at(level))
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, 1u64 << self.level)
        }
    }
}

impl TryFrom<(u64, u32)> for DyadicRational {
    type Error = FrameError;

    fn try_from((numerator, level): (u64, u32)) -> Result<Self> {
        Self::new(numerator, level)
    }
}

impl From<DyadicRational> for (u64, u32) {
    fn from(value: DyadicRational) -> Self {
        (value.numerator, value.level)
    }
}

/// Where a real abscissa falls on a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridLocation {
    /// Exactly on grid point `index`.
    Exact { index: usize, point: DyadicRational },
    /// Strictly inside the cell `[left, left + 1]` (grid indices).
    Inside { left: usize, t: f64 },
}

/// The grid `J_m`, i.e. the `2^m + 1` points `k / 2^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DyadicGrid {
    level: u32,
}

impl DyadicGrid {
    pub fn new(level: u32) -> Result<Self> {
        check_grid_level(level)?;
        Ok(Self { level })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of cells, `2^m`.
    pub fn cells(&self) -> usize {
        1usize << self.level
    }

    pub fn len(&self) -> usize {
        self.cells() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, index: usize) -> DyadicRational {
        assert!(index <= self.cells(), "grid index {index} out of range");
        DyadicRational::reduced(index as u64, self.level)
    }

    pub fn points(&self) -> impl Iterator<Item = DyadicRational> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Abscissa of grid point `index` as a float (exact).
    pub fn abscissa(&self, index: usize) -> f64 {
        index as f64 / self.cells() as f64
    }

    pub fn index_of(&self, point: &DyadicRational) -> Option<usize> {
        (point.level() <= self.level).then(|| point.numerator_at(self.level) as usize)
    }

    pub fn contains(&self, point: &DyadicRational) -> bool {
        point.level() <= self.level
    }

    /// Brackets `x` between two neighbouring grid points.
    pub fn locate(&self, x: f64) -> Result<GridLocation> {
        if !(0.0..=1.0).contains(&x) {
            return Err(FrameError::Domain(x));
        }
        let scaled = x * self.cells() as f64;
        let left = (scaled.floor() as usize).min(self.cells());
        let t = scaled - left as f64;
        if t == 0.0 {
            Ok(GridLocation::Exact {
                index: left,
                point: self.point(left),
            })
        } else {
            Ok(GridLocation::Inside { left, t })
        }
    }
}

/// The dyadic cell `I_{m,k} = [k / 2^m, (k + 1) / 2^m]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    level: u32,
    index: u64,
}

impl DyadicInterval {
    pub fn new(level: u32, index: u64) -> Result<Self> {
        check_grid_level(level)?;
        if index >= 1u64 << level {
            return Err(FrameError::Index(format!(
                "cell index {index} out of range for level {level}"
            )));
        }
        Ok(Self { level, index })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn left(&self) -> DyadicRational {
        DyadicRational::reduced(self.index, self.level)
    }

    pub fn right(&self) -> DyadicRational {
        DyadicRational::reduced(self.index + 1, self.level)
    }

    pub fn midpoint(&self) -> DyadicRational {
        DyadicRational::reduced(2 * self.index + 1, self.level + 1)
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.left().to_f64()..=self.right().to_f64()).contains(&x)
    }
}

/// A continuous function that is linear on every cell of `J_m`, stored by
/// its ordinates at the `2^m + 1` grid points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinearFn {
    grid_level: u32,
    values: Vec<f64>,
}

impl PiecewiseLinearFn {
    pub fn new(grid_level: u32, values: Vec<f64>) -> Result<Self> {
        let grid = DyadicGrid::new(grid_level)?;
        if values.len() != grid.len() {
            return Err(FrameError::InvalidArgument(format!(
                "level {grid_level} needs {} ordinates, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(FrameError::NonFinite {
                x: grid.abscissa(i),
                value: v,
            });
        }
        Ok(Self { grid_level, values })
    }

    pub fn zero(grid_level: u32) -> Result<Self> {
        Self::new(grid_level, vec![0.0; DyadicGrid::new(grid_level)?.len()])
    }

    /// The interpolant of `f` on `J_m`.
    pub fn interpolate<F: Fn(f64) -> f64>(grid_level: u32, f: F) -> Result<Self> {
        let grid = DyadicGrid::new(grid_level)?;
        Self::new(
            grid_level,
            (0..grid.len()).map(|i| f(grid.abscissa(i))).collect(),
        )
    }

    pub fn grid_level(&self) -> u32 {
        self.grid_level
    }

    pub fn grid(&self) -> DyadicGrid {
        DyadicGrid {
            level: self.grid_level,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    fn lerp(&self, left: usize, t: f64) -> f64 {
        (1.0 - t) * self.values[left] + t * self.values[left + 1]
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(match self.grid().locate(x)? {
            GridLocation::Exact { index, .. } => self.values[index],
            GridLocation::Inside { left, t } => self.lerp(left, t),
        })
    }

    /// Evaluates at a dyadic point; exact whenever the point lies on the grid.
    pub fn eval_dyadic(&self, point: &DyadicRational) -> f64 {
        match self.grid().index_of(point) {
            Some(index) => self.values[index],
            None => self
                .eval(point.to_f64())
                .expect("dyadic points lie in [0, 1]"),
        }
    }

    /// The same function expressed on the finer grid `J_target`.
    pub fn refine(&self, target_level: u32) -> Result<Self> {
        if target_level < self.grid_level {
            return Err(FrameError::RefineBelowLevel {
                level: self.grid_level,
                target: target_level,
            });
        }
        check_grid_level(target_level)?;
        let factor = 1usize << (target_level - self.grid_level);
        if factor == 1 {
            return Ok(self.clone());
        }
        let mut values = Vec::with_capacity((self.values.len() - 1) * factor + 1);
        for left in 0..self.values.len() - 1 {
            values.push(self.values[left]);
            for j in 1..factor {
                values.push(self.lerp(left, j as f64 / factor as f64));
            }
        }
        values.push(*self.values.last().expect("grids are non-empty"));
        Ok(Self {
            grid_level: target_level,
            values,
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Exact `‖f − g‖_∞`: both are refined to the finer grid, where the maximum
/// of a piecewise-linear difference is attained at a breakpoint.
pub fn sup_norm_diff(f: &PiecewiseLinearFn, g: &PiecewiseLinearFn) -> f64 {
    let level = f.grid_level.max(g.grid_level);
    let f = f.refine(level).expect("level is valid for both operands");
    let g = g.refine(level).expect("level is valid for both operands");
    f.values
        .iter()
        .zip(&g.values)
        .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
}
