//! Kernel ↔ characteristic function ↔ Wigner function.
//!
//! Layout: for a kernel on a symmetric position axis with `N` nodes and step
//! `h`, both phase-space grids have `PAD * N` nodes per side.
//!
//! * characteristic function `f(x, y)`: `y` has step `h`, `x` is its conjugate;
//! * Wigner function `W(q, p)`: `q = conj(x)` (step `h`), `p = conj(y)`.
//!
//! The displacement `y = q - q′` and centre `t = (q + q′)/2` of every kernel
//! node fall on these lattices exactly, so no interpolation is involved.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, mismatch, Result};
use crate::grid::{continuous_ft, integrate, transpose, Axis, Direction, LaneFt, SampledField};
use crate::states::DensityKernel;

/// Oversampling of each phase-space side relative to the position grid.
pub const PAD: usize = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `(x_axis, y_axis)` of the characteristic function for a position grid.
pub fn phase_space_axes(position: &Axis) -> Result<(Axis, Axis)> {
    if !position.is_symmetric() {
        return Err(invalid!("phase-space maps need a symmetric position axis"));
    }
    if !position.count.is_multiple_of(2) {
        return Err(invalid!("phase-space maps need an even node count, got {}", position.count));
    }
    let y = Axis::symmetric(position.step, PAD * position.count)?;
    Ok((y.conjugate(), y))
}

fn position_from_fine(fine: &Axis) -> Axis {
    Axis::symmetric(fine.step, fine.count / PAD).expect("validated layout")
}

fn check_layout(a: &Axis, b: &Axis, what: &str) -> Result<()> {
    if a.count != b.count || !a.count.is_multiple_of(2 * PAD) {
        return Err(mismatch!("{what}: node counts must agree and be a multiple of {}", 2 * PAD));
    }
    if !b.is_symmetric() || !a.approx_eq(&b.conjugate()) {
        return Err(mismatch!("{what}: axes are not a conjugate pair"));
    }
    Ok(())
}

/// `f(x, y)` stored row-major with `x` as the slow index.
#[derive(Clone, Debug, PartialEq)]
pub struct CharFunction {
    field: SampledField,
}

impl CharFunction {
    pub fn new(x_axis: Axis, y_axis: Axis, values: Vec<Complex64>) -> Result<Self> {
        check_layout(&x_axis, &y_axis, "characteristic function")?;
        Ok(Self {
            field: SampledField::new(vec![x_axis, y_axis], values)?,
        })
    }

    pub fn from_field(field: SampledField) -> Result<Self> {
        match field.axes() {
            [x, y] => check_layout(x, y, "characteristic function")?,
            _ => return Err(invalid!("a characteristic function is a 2-D field")),
        }
        Ok(Self { field })
    }

    pub fn x_axis(&self) -> &Axis {
        &self.field.axes()[0]
    }

    pub fn y_axis(&self) -> &Axis {
        &self.field.axes()[1]
    }

    pub fn values(&self) -> &[Complex64] {
        self.field.data()
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.field.data()[i * self.y_axis().count + j]
    }

    /// `f(0, 0)`, the trace of the source kernel.
    pub fn at_origin(&self) -> Complex64 {
        let c = self.x_axis().count / 2;
        self.at(c, c)
    }

    /// The position grid this layout was built from.
    pub fn position_axis(&self) -> Axis {
        position_from_fine(self.y_axis())
    }

    /// `max |f(-x, -y) - conj f(x, y)|` over nodes with mirrored partners.
    pub fn reflection_defect(&self) -> f64 {
        let m = self.x_axis().count;
        let mut worst: f64 = 0.0;
        for i in 1..m {
            for j in 1..m {
                worst = worst.max((self.at(m - i, m - j) - self.at(i, j).conj()).norm());
            }
        }
        worst
    }

    pub fn field(&self) -> &SampledField {
        &self.field
    }

    pub fn into_field(self) -> SampledField {
        self.field
    }
}

/// `W(q, p)` stored row-major with `q` as the slow index.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerFunction {
    field: SampledField,
}

impl WignerFunction {
    pub fn new(q_axis: Axis, p_axis: Axis, values: Vec<Complex64>) -> Result<Self> {
        check_layout(&p_axis, &q_axis, "Wigner function")?;
        Ok(Self {
            field: SampledField::new(vec![q_axis, p_axis], values)?,
        })
    }

    pub fn from_field(field: SampledField) -> Result<Self> {
        match field.axes() {
            [q, p] => check_layout(p, q, "Wigner function")?,
            _ => return Err(invalid!("a Wigner function is a 2-D field")),
        }
        Ok(Self { field })
    }

    pub fn q_axis(&self) -> &Axis {
        &self.field.axes()[0]
    }

    pub fn p_axis(&self) -> &Axis {
        &self.field.axes()[1]
    }

    pub fn values(&self) -> &[Complex64] {
        self.field.data()
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.field.data()[i * self.p_axis().count + j]
    }

    pub fn position_axis(&self) -> Axis {
        position_from_fine(self.q_axis())
    }

    pub fn max_imag(&self) -> f64 {
        self.values().iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// `∫∫ W dq dp`, equal to `2π` times the source trace.
    pub fn integral(&self) -> Complex64 {
        integrate(&self.field)
    }

    pub fn field(&self) -> &SampledField {
        &self.field
    }

    pub fn into_field(self) -> SampledField {
        self.field
    }
}

/// Start of the zero-padded `t` window for displacement index `d`.
fn window_origin(position: &Axis, d: isize) -> f64 {
    let off = (PAD - 1) * position.count / 2;
    position.min + d as f64 * position.step / 2.0 - off as f64 * position.step
}

/// `f(x, y) = ∫ e^{ixt} ρ(t + y/2, t - y/2) dt`.
pub fn char_from_kernel(kernel: &DensityKernel) -> Result<CharFunction> {
    let pos = *kernel.axis();
    let (x_axis, y_axis) = phase_space_axes(&pos)?;
    let n = pos.count as isize;
    let m = y_axis.count;
    let off = ((PAD - 1) * pos.count / 2) as isize;
    let plan = LaneFt::new(m, Direction::Inverse);
    // Rows indexed by y, lanes over t.
    let mut rows = vec![ZERO; m * m];
    rows.par_chunks_mut(m).enumerate().for_each(|(l, lane)| {
        let d = l as isize - (m / 2) as isize;
        if d.abs() >= n {
            return;
        }
        for (i, z) in lane.iter_mut().enumerate() {
            let b = i as isize - off;
            let a = b + d;
            if (0..n).contains(&a) && (0..n).contains(&b) {
                *z = kernel.at(a as usize, b as usize);
            }
        }
        plan.apply(lane, window_origin(&pos, d), pos.step, x_axis.min);
    });
    CharFunction::new(x_axis, y_axis, transpose(&rows, m, m))
}

/// `ρ(q, q′) = (1/2π) ∫ e^{-ixt} f(x, y) dx` at `t = (q + q′)/2`, `y = q - q′`.
pub fn kernel_from_char(cf: &CharFunction) -> Result<DensityKernel> {
    let pos = cf.position_axis();
    let (x_axis, m) = (*cf.x_axis(), cf.x_axis().count);
    let n = pos.count as isize;
    let off = ((PAD - 1) * pos.count / 2) as isize;
    let plan = LaneFt::new(m, Direction::Forward);
    let mut rows = transpose(cf.values(), m, m);
    rows.par_chunks_mut(m).enumerate().for_each(|(l, lane)| {
        let d = l as isize - (m / 2) as isize;
        if d.abs() < n {
            plan.apply(lane, x_axis.min, x_axis.step, window_origin(&pos, d));
        }
    });
    let mut rho = vec![ZERO; pos.count * pos.count];
    for (l, lane) in rows.chunks(m).enumerate() {
        let d = l as isize - (m / 2) as isize;
        if d.abs() >= n {
            continue;
        }
        for (i, z) in lane.iter().enumerate() {
            let b = i as isize - off;
            let a = b + d;
            if (0..n).contains(&a) && (0..n).contains(&b) {
                rho[a as usize * pos.count + b as usize] = *z;
            }
        }
    }
    DensityKernel::from_samples(pos, rho)
}

/// `W(q, p) = (1/2π) ∫∫ e^{-i(qx + py)} f(x, y) dx dy`.
///
/// The exponent sign makes `W` the phase-space density whose line integrals
/// reproduce the tomogram obtained from radial slices of `f`.
pub fn wigner_from_char(cf: &CharFunction) -> Result<WignerFunction> {
    let ft = continuous_ft(cf.field(), &[0, 1], Direction::Forward)?;
    let axes = ft.axes().to_vec();
    let data = ft.into_data().into_iter().map(|z| z * (2.0 * PI)).collect();
    WignerFunction::new(axes[0], axes[1], data)
}

/// Exact inverse of [`wigner_from_char`].
pub fn char_from_wigner(w: &WignerFunction) -> Result<CharFunction> {
    let ft = continuous_ft(w.field(), &[0, 1], Direction::Inverse)?;
    let axes = ft.axes().to_vec();
    let data = ft.into_data().into_iter().map(|z| z / (2.0 * PI)).collect();
    CharFunction::new(axes[0], axes[1], data)
}

/// Defined as `wigner_from_char(char_from_kernel(kernel))`.
pub fn wigner_from_kernel(kernel: &DensityKernel) -> Result<WignerFunction> {
    wigner_from_char(&char_from_kernel(kernel)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_axis, relative_l2};
    use crate::states::{coherent_state, fock_state, mix, pure_kernel};

    fn rig() -> Axis {
        make_axis(8.0, 256).unwrap()
    }

    fn small() -> Axis {
        make_axis(8.0, 128).unwrap()
    }

    #[test]
    fn vacuum_characteristic_function() {
        let cf = char_from_kernel(&pure_kernel(&fock_state(0, rig()).unwrap())).unwrap();
        let mut worst: f64 = 0.0;
        for (i, x) in cf.x_axis().coords().enumerate() {
            for (j, y) in cf.y_axis().coords().enumerate() {
                let expect = (-(x * x + y * y) / 4.0).exp();
                worst = worst.max((cf.at(i, j) - expect).norm());
            }
        }
        assert!(worst < 1e-6, "sup error {worst}");
        assert!((cf.at_origin() - 1.0).norm() < 1e-8);
    }

    #[test]
    fn zero_kernel_gives_zero_field() {
        let axis = small();
        let k = DensityKernel::from_samples(axis, vec![ZERO; axis.count * axis.count]).unwrap();
        let cf = char_from_kernel(&k).unwrap();
        assert!(cf.values().iter().all(|z| *z == ZERO));
        let back = kernel_from_char(&cf).unwrap();
        assert!(back.rho().iter().all(|z| *z == ZERO));
    }

    #[test]
    fn baker_roundtrip() {
        for m in [0, 3] {
            let k = pure_kernel(&fock_state(m, rig()).unwrap());
            let back = kernel_from_char(&char_from_kernel(&k).unwrap()).unwrap();
            assert!(back.axis().approx_eq(k.axis()));
            assert!(relative_l2(back.rho(), k.rho()) < 1e-12);
        }
    }

    #[test]
    fn hermitian_kernels_have_reflection_symmetric_char() {
        let k = pure_kernel(&coherent_state(Complex64::new(0.6, -0.3), small()).unwrap());
        let cf = char_from_kernel(&k).unwrap();
        assert!(cf.reflection_defect() < 1e-9);
        assert!((cf.at_origin() - k.trace()).norm() < 1e-8);
    }

    #[test]
    fn vacuum_wigner_function() {
        let w = wigner_from_kernel(&pure_kernel(&fock_state(0, rig()).unwrap())).unwrap();
        let mut worst: f64 = 0.0;
        for (i, q) in w.q_axis().coords().enumerate() {
            for (j, p) in w.p_axis().coords().enumerate() {
                let expect = 2.0 * (-(q * q + p * p)).exp();
                worst = worst.max((w.at(i, j) - expect).norm());
            }
        }
        assert!(worst < 1e-6, "sup error {worst}");
        assert!((w.integral() - 2.0 * PI).norm() < 1e-6);
        assert!(w.max_imag() < 1e-9);
    }

    #[test]
    fn fock_one_wigner_is_negative_at_origin() {
        let w = wigner_from_kernel(&pure_kernel(&fock_state(1, rig()).unwrap())).unwrap();
        let c = w.q_axis().count / 2;
        assert!((w.at(c, c).re + 2.0).abs() < 1e-4);
        assert!((w.integral() - 2.0 * PI).norm() < 1e-6);
    }

    #[test]
    fn wigner_is_centred_on_the_classical_point() {
        // A coherent state peaks at (q, p) = √2 (Re α, Im α).
        let alpha = Complex64::new(1.0, 0.5);
        let w = wigner_from_kernel(&pure_kernel(&coherent_state(alpha, rig()).unwrap())).unwrap();
        let (mut mq, mut mp) = (0.0, 0.0);
        for (i, q) in w.q_axis().coords().enumerate() {
            for (j, p) in w.p_axis().coords().enumerate() {
                mq += q * w.at(i, j).re;
                mp += p * w.at(i, j).re;
            }
        }
        let cell = w.q_axis().step * w.p_axis().step / (2.0 * PI);
        assert!((mq * cell - 2f64.sqrt()).abs() < 1e-8);
        assert!((mp * cell - 2f64.sqrt() * 0.5).abs() < 1e-8);
    }

    #[test]
    fn wigner_char_roundtrip() {
        let k0 = pure_kernel(&fock_state(0, small()).unwrap());
        let k1 = pure_kernel(&fock_state(1, small()).unwrap());
        let cf = char_from_kernel(&mix(&[(0.4, &k0), (0.6, &k1)]).unwrap()).unwrap();
        let back = char_from_wigner(&wigner_from_char(&cf).unwrap()).unwrap();
        assert!(relative_l2(back.values(), cf.values()) < 1e-12);
        let zero = CharFunction::new(*cf.x_axis(), *cf.y_axis(), vec![ZERO; cf.values().len()]).unwrap();
        let w0 = wigner_from_char(&zero).unwrap();
        assert!(w0.values().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn composition_is_bit_identical() {
        let k = pure_kernel(&fock_state(2, small()).unwrap());
        let a = wigner_from_kernel(&k).unwrap();
        let b = wigner_from_char(&char_from_kernel(&k).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn layout_is_validated() {
        let odd = Axis::symmetric(0.1, 9).unwrap();
        assert!(phase_space_axes(&odd).is_err());
        let shifted = Axis::new(0.0, 0.1, 8).unwrap();
        assert!(phase_space_axes(&shifted).is_err());
        let a = make_axis(4.0, 64).unwrap();
        assert!(CharFunction::new(a, a, vec![ZERO; 64 * 64]).is_err());
    }
}
