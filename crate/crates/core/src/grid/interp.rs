//! Polynomial interpolation on uniform grids.
//!
//! Points outside the hull `[min, max]` of any axis evaluate to exactly zero.
//! Inside the hull an `n`-point Lagrange stencil is used, shifted inwards at
//! the edges so polynomials of degree `n - 1` are reproduced exactly.

use num_complex::Complex64;

use super::{Axis, SampledField};

/// Largest supported stencil.
pub const MAX_STENCIL: usize = 16;

/// Offsets closer than this (in units of the step) snap onto the node.
const NODE_SNAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    /// Two-point stencil per axis (bilinear in 2-D).
    Linear,
    /// `n`-point Lagrange stencil per axis, `2 <= n <= MAX_STENCIL`.
    Lagrange(usize),
}

impl Interpolation {
    /// Eight-point stencil used where interpolation error must stay far below
    /// the transforms' own quadrature error.
    pub const HIGH_ORDER: Interpolation = Interpolation::Lagrange(8);

    pub fn points(self) -> usize {
        match self {
            Interpolation::Linear => 2,
            Interpolation::Lagrange(n) => n.clamp(2, MAX_STENCIL),
        }
    }
}

/// Interpolation stencil along one axis.
#[derive(Clone, Copy, Debug)]
pub struct Stencil {
    pub start: usize,
    pub len: usize,
    pub weights: [f64; MAX_STENCIL],
}

impl Stencil {
    /// Stencil for coordinate `x`, or `None` outside the hull.
    pub fn new(axis: &Axis, x: f64, points: usize) -> Option<Stencil> {
        let u = axis.fractional_index(x);
        let last = (axis.count - 1) as f64;
        if !(u >= -NODE_SNAP && u <= last + NODE_SNAP) {
            return None;
        }
        let mut weights = [0.0; MAX_STENCIL];
        let r = u.round();
        if (u - r).abs() < NODE_SNAP {
            weights[0] = 1.0;
            return Some(Stencil {
                start: (r as usize).min(axis.count - 1),
                len: 1,
                weights,
            });
        }
        let len = points.min(axis.count);
        let base = u.floor() as isize - (len as isize / 2 - 1);
        let start = base.clamp(0, (axis.count - len) as isize) as usize;
        for (i, w) in weights.iter_mut().enumerate().take(len) {
            let ni = (start + i) as f64;
            let mut acc = 1.0;
            for j in 0..len {
                if j != i {
                    let nj = (start + j) as f64;
                    acc *= (u - nj) / (ni - nj);
                }
            }
            *w = acc;
        }
        Some(Stencil { start, len, weights })
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.len).map(move |i| (self.start + i, self.weights[i]))
    }
}

/// Evaluates a 1-D sample set at `x`.
pub fn interp_1d(axis: &Axis, data: &[Complex64], x: f64, method: Interpolation) -> Complex64 {
    match Stencil::new(axis, x, method.points()) {
        Some(s) => s.iter().map(|(i, w)| data[i] * w).sum(),
        None => Complex64::new(0.0, 0.0),
    }
}

/// Evaluates a row-major 2-D sample set at `(x, y)`.
pub fn interp_2d(
    axes: (&Axis, &Axis),
    data: &[Complex64],
    x: f64,
    y: f64,
    method: Interpolation,
) -> Complex64 {
    let (Some(sx), Some(sy)) = (
        Stencil::new(axes.0, x, method.points()),
        Stencil::new(axes.1, y, method.points()),
    ) else {
        return Complex64::new(0.0, 0.0);
    };
    let cols = axes.1.count;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, wx) in sx.iter() {
        let row = &data[i * cols..(i + 1) * cols];
        let mut inner = Complex64::new(0.0, 0.0);
        for (j, wy) in sy.iter() {
            inner += row[j] * wy;
        }
        acc += inner * wx;
    }
    acc
}

/// Samples `field` at arbitrary points with bilinear (multilinear) weights.
pub fn resample<P: AsRef<[f64]>>(field: &SampledField, points: &[P]) -> Vec<Complex64> {
    resample_with(field, points, Interpolation::Linear)
}

/// [`resample`] with a chosen interpolation order.
pub fn resample_with<P: AsRef<[f64]>>(
    field: &SampledField,
    points: &[P],
    method: Interpolation,
) -> Vec<Complex64> {
    let axes = field.axes();
    points
        .iter()
        .map(|p| {
            let p = p.as_ref();
            assert_eq!(p.len(), axes.len(), "point dimension must match the field");
            match axes {
                [a] => interp_1d(a, field.data(), p[0], method),
                [a, b] => interp_2d((a, b), field.data(), p[0], p[1], method),
                _ => unreachable!("fields have 1 or 2 axes"),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_axis;

    fn linear_field() -> SampledField {
        let a = make_axis(4.0, 16).unwrap();
        let b = make_axis(3.0, 12).unwrap();
        SampledField::from_fn(vec![a, b], |p| Complex64::new(2.0 * p[0] - p[1] + 0.5, p[1])).unwrap()
    }

    #[test]
    fn nodes_are_reproduced_exactly() {
        let f = linear_field();
        let pts: Vec<Vec<f64>> = (0..f.len()).step_by(7).map(|i| f.point(i)).collect();
        let vals = resample(&f, &pts);
        for (k, i) in (0..f.len()).step_by(7).enumerate() {
            assert_eq!(vals[k], f.data()[i]);
        }
    }

    #[test]
    fn midpoint_of_linear_field_is_exact() {
        let f = linear_field();
        let (x, y) = (0.25, -0.375);
        let v = resample(&f, &[[x, y]])[0];
        let expect = Complex64::new(2.0 * x - y + 0.5, y);
        assert!((v - expect).norm() < 1e-13);
    }

    #[test]
    fn outside_hull_is_zero() {
        let f = linear_field();
        let v = resample(&f, &[[4.5, 0.0], [0.0, -3.01], [100.0, 100.0]]);
        assert!(v.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn lagrange_reproduces_polynomials() {
        let a = make_axis(3.0, 40).unwrap();
        let poly = |x: f64| 1.0 - x + 0.3 * x.powi(3) - 0.01 * x.powi(7);
        let data: Vec<Complex64> = a.coords().map(|x| Complex64::new(poly(x), 0.0)).collect();
        for &x in &[-2.97, -1.0 / 3.0, 0.01, 2.5, 2.8] {
            let v = interp_1d(&a, &data, x, Interpolation::HIGH_ORDER);
            assert!((v.re - poly(x)).abs() < 1e-11, "x={x}");
        }
    }

    #[test]
    fn high_order_beats_linear_on_smooth_data() {
        let a = make_axis(8.0, 128).unwrap();
        let data: Vec<Complex64> = a.coords().map(|x| Complex64::new((-x * x / 4.0).exp(), 0.0)).collect();
        let x = 0.731;
        let exact = (-x * x / 4.0f64).exp();
        let lin = (interp_1d(&a, &data, x, Interpolation::Linear).re - exact).abs();
        let hi = (interp_1d(&a, &data, x, Interpolation::HIGH_ORDER).re - exact).abs();
        assert!(lin > 1e-4 && hi < 1e-10, "linear {lin}, high-order {hi}");
    }
}
