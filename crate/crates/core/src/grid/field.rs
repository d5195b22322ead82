use num_complex::Complex64;

use super::Axis;
use crate::error::{invalid, Result};

/// Relative tolerance for the metadata flags of a [`SampledField`].
pub const FLAG_TOL: f64 = 1e-10;

/// Complex samples over one or two uniform axes, stored row-major
/// (the last axis varies fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    axes: Vec<Axis>,
    data: Vec<Complex64>,
    real_valued: bool,
    hermitian_kernel: bool,
}

impl SampledField {
    pub fn new(axes: Vec<Axis>, data: Vec<Complex64>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(invalid!("fields have 1 or 2 axes, got {}", axes.len()));
        }
        let expected: usize = axes.iter().map(|a| a.count).product();
        if data.len() != expected {
            return Err(invalid!(
                "data length {} does not match axis counts (expected {expected})",
                data.len()
            ));
        }
        let real_valued = check_real(&data);
        let hermitian_kernel = axes.len() == 2
            && axes[0].approx_eq(&axes[1])
            && hermitian_defect(&data, axes[0].count) <= FLAG_TOL * max_abs(&data).max(1.0);
        Ok(Self {
            axes,
            data,
            real_valued,
            hermitian_kernel,
        })
    }

    pub fn zeros(axes: Vec<Axis>) -> Result<Self> {
        let n = axes.iter().map(|a| a.count).product();
        Self::new(axes, vec![Complex64::new(0.0, 0.0); n])
    }

    /// Samples `f` at every grid point; `f` receives the point's coordinates.
    pub fn from_fn(axes: Vec<Axis>, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self> {
        let n: usize = axes.iter().map(|a| a.count).product();
        let mut data = Vec::with_capacity(n);
        let mut point = vec![0.0; axes.len()];
        for flat in 0..n {
            unravel(&axes, flat, &mut point);
            data.push(f(&point));
        }
        Self::new(axes, data)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn ndim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Imaginary parts vanish to within [`FLAG_TOL`] of the largest magnitude.
    pub fn is_real_valued(&self) -> bool {
        self.real_valued
    }

    /// Square 2-D field with `f(a, b) = conj f(b, a)` to within [`FLAG_TOL`].
    pub fn is_hermitian_kernel(&self) -> bool {
        self.hermitian_kernel
    }

    /// Volume element of the grid: product of the steps.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.step).product()
    }

    /// Coordinates of the sample stored at `flat`.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.axes.len()];
        unravel(&self.axes, flat, &mut p);
        p
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let data = self.data.iter().map(|&z| f(z)).collect();
        Self::new(self.axes.clone(), data).expect("shape preserved")
    }

    pub fn l2_norm(&self) -> f64 {
        (self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_volume()).sqrt()
    }
}

fn unravel(axes: &[Axis], mut flat: usize, out: &mut [f64]) {
    for (d, axis) in axes.iter().enumerate().rev() {
        out[d] = axis.coord(flat % axis.count);
        flat /= axis.count;
    }
}

pub(crate) fn max_abs(data: &[Complex64]) -> f64 {
    data.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_real(data: &[Complex64]) -> bool {
    let scale = max_abs(data).max(f64::MIN_POSITIVE);
    data.iter().all(|z| z.im.abs() <= FLAG_TOL * scale)
}

/// `max |a[i][j] - conj a[j][i]|` for an `n x n` row-major matrix.
pub(crate) fn hermitian_defect(data: &[Complex64], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let d = (data[i * n + j] - data[j * n + i].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Riemann sum `sum(data) * prod(step)`, accumulated in storage order.
pub fn integrate(field: &SampledField) -> Complex64 {
    let sum: Complex64 = field.data().iter().sum();
    sum * field.cell_volume()
}

/// Relative L2 distance `||a - b|| / ||b||` between equally shaped sample sets.
pub fn relative_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "relative_l2 needs equal lengths");
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}
