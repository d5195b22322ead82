//! Continuous Fourier transforms realized with the DFT.
//!
//! Forward: `F[ψ](x) = (2π)^{-k} ∫ e^{-i x·y} ψ(y) d^k y`.
//! Inverse: `ψ(y) = ∫ e^{+i x·y} F(x) d^k x`.
//!
//! Each transformed axis maps to its conjugate grid (same count,
//! `step' = 2π / (count * step)`). Origin offsets on both sides are folded
//! into pre- and post-multiplied phases, so the discrete pair is an exact
//! inverse and approximates the continuous integral to quadrature accuracy.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::{Axis, SampledField};
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Kernel `e^{-i x y}` with prefactor `1/(2π)` per dimension.
    Forward,
    /// Kernel `e^{+i x y}` with prefactor 1.
    Inverse,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }

    pub fn prefactor(self) -> f64 {
        match self {
            Direction::Forward => 1.0 / (2.0 * PI),
            Direction::Inverse => 1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        }
    }
}

/// Reusable transform of equal-length lanes with arbitrary grid origins.
#[derive(Clone)]
pub struct LaneFt {
    fft: Arc<dyn Fft<f64>>,
    len: usize,
    dir: Direction,
}

impl LaneFt {
    pub fn new(len: usize, dir: Direction) -> Self {
        let mut planner = FftPlanner::new();
        let fft = match dir {
            Direction::Forward => planner.plan_fft_forward(len),
            Direction::Inverse => planner.plan_fft_inverse(len),
        };
        Self { fft, len, dir }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Transforms `buf` (samples at `in_min + j*in_step`) in place onto the
    /// grid `out_min + k * 2π/(len*in_step)`.
    pub fn apply(&self, buf: &mut [Complex64], in_min: f64, in_step: f64, out_min: f64) {
        debug_assert_eq!(buf.len(), self.len);
        let s = self.dir.sign();
        let out_step = 2.0 * PI / (self.len as f64 * in_step);
        for (j, z) in buf.iter_mut().enumerate() {
            *z *= Complex64::from_polar(1.0, s * out_min * j as f64 * in_step);
        }
        self.fft.process(buf);
        let scale = self.dir.prefactor() * in_step;
        for (k, z) in buf.iter_mut().enumerate() {
            let theta = s * in_min * (out_min + k as f64 * out_step);
            *z *= Complex64::from_polar(scale, theta);
        }
    }
}

/// One-dimensional continuous transform of `samples` living on `input`,
/// evaluated on the conjugate-step grid starting at `out_min`.
pub fn ft_1d(samples: &[Complex64], input: &Axis, out_min: f64, dir: Direction) -> Vec<Complex64> {
    assert_eq!(samples.len(), input.count);
    let plan = LaneFt::new(input.count, dir);
    let mut buf = samples.to_vec();
    plan.apply(&mut buf, input.min, input.step, out_min);
    buf
}

pub(crate) fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

/// Applies the transform along `dim`; `out_min` defaults to the symmetric
/// conjugate grid.
fn transform_along(
    axes: &[Axis],
    data: Vec<Complex64>,
    dim: usize,
    dir: Direction,
) -> (Axis, Vec<Complex64>) {
    let axis = axes[dim];
    let out = axis.conjugate();
    let plan = LaneFt::new(axis.count, dir);
    let run_rows = |mut d: Vec<Complex64>| {
        d.par_chunks_mut(axis.count)
            .for_each(|lane| plan.apply(lane, axis.min, axis.step, out.min));
        d
    };
    let data = if dim + 1 == axes.len() {
        run_rows(data)
    } else {
        // 2-D, leading axis: operate on the transpose.
        let (rows, cols) = (axes[0].count, axes[1].count);
        let t = run_rows(transpose(&data, rows, cols));
        transpose(&t, cols, rows)
    };
    (out, data)
}

fn check_dims(field: &SampledField, dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(invalid!("no dimensions selected for the transform"));
    }
    for (i, &d) in dims.iter().enumerate() {
        if d >= field.ndim() {
            return Err(invalid!("dimension {d} out of range for a {}-D field", field.ndim()));
        }
        if dims[..i].contains(&d) {
            return Err(invalid!("dimension {d} listed twice"));
        }
    }
    Ok(())
}

/// Continuous Fourier transform over `dims`; each transformed axis is
/// replaced by its conjugate grid.
pub fn continuous_ft(field: &SampledField, dims: &[usize], dir: Direction) -> Result<SampledField> {
    check_dims(field, dims)?;
    let mut axes = field.axes().to_vec();
    let mut data = field.data().to_vec();
    for &d in dims {
        let (out, next) = transform_along(&axes, data, d, dir);
        axes[d] = out;
        data = next;
    }
    SampledField::new(axes, data)
}

/// Transform over a strict, non-empty subset of the dimensions; the others
/// pass through untouched.
pub fn partial_ft(field: &SampledField, dims: &[usize], dir: Direction) -> Result<SampledField> {
    check_dims(field, dims)?;
    if dims.len() == field.ndim() {
        return Err(invalid!(
            "partial transform over every dimension; use continuous_ft instead"
        ));
    }
    continuous_ft(field, dims, dir)
}
