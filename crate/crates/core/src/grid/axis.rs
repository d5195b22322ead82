use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};

/// Relative tolerance used when deciding whether two axes describe the same grid.
const AXIS_TOL: f64 = 1e-9;

/// A uniform one-dimensional grid: `min + k * step` for `k in 0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub min: f64,
    pub step: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, step: f64, count: usize) -> Result<Self> {
        if !min.is_finite() || !step.is_finite() {
            return Err(invalid!("axis parameters must be finite (min={min}, step={step})"));
        }
        if step <= 0.0 {
            return Err(invalid!("axis step must be positive, got {step}"));
        }
        if count < 2 {
            return Err(invalid!("axis needs at least 2 samples, got {count}"));
        }
        Ok(Self { min, step, count })
    }

    /// Half-open symmetric grid of `count` points with the given step.
    pub fn symmetric(step: f64, count: usize) -> Result<Self> {
        Self::new(-(count as f64) * step / 2.0, step, count)
    }

    #[inline]
    pub fn coord(&self, k: usize) -> f64 {
        self.min + k as f64 * self.step
    }

    /// Last sample coordinate.
    pub fn max(&self) -> f64 {
        self.coord(self.count - 1)
    }

    pub fn coords(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |k| self.coord(k))
    }

    /// Half of the covered period `count * step`.
    pub fn extent(&self) -> f64 {
        self.count as f64 * self.step / 2.0
    }

    /// True when `min == -count * step / 2`, the convention of [`make_axis`].
    pub fn is_symmetric(&self) -> bool {
        (self.min + self.extent()).abs() <= AXIS_TOL * self.extent()
    }

    /// The DFT-dual grid: same count, `step' = 2π / (count * step)`, symmetric.
    pub fn conjugate(&self) -> Self {
        let step = 2.0 * PI / (self.count as f64 * self.step);
        Self {
            min: -(self.count as f64) * step / 2.0,
            step,
            count: self.count,
        }
    }

    /// Fractional sample index of coordinate `x`.
    #[inline]
    pub fn fractional_index(&self, x: f64) -> f64 {
        (x - self.min) / self.step
    }

    /// Index of an exact node, if `x` lies on one.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let u = self.fractional_index(x);
        let r = u.round();
        if (u - r).abs() < 1e-9 && r >= 0.0 && (r as usize) < self.count {
            Some(r as usize)
        } else {
            None
        }
    }

    pub fn approx_eq(&self, other: &Axis) -> bool {
        self.count == other.count
            && (self.step - other.step).abs() <= AXIS_TOL * self.step
            && (self.min - other.min).abs() <= AXIS_TOL * self.extent().max(self.step)
    }
}

/// Symmetric, DFT-compatible axis covering `[-extent, extent - step]` with
/// `step = 2 * extent / count`.
pub fn make_axis(extent: f64, count: usize) -> Result<Axis> {
    if !extent.is_finite() || extent <= 0.0 {
        return Err(invalid!("extent must be positive and finite, got {extent}"));
    }
    if count < 2 {
        return Err(invalid!("count must be at least 2, got {count}"));
    }
    Axis::new(-extent, 2.0 * extent / count as f64, count)
}
