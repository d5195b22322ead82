//! Optical tomograms `ω(x, α)` by three independent routes, and inversion.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{contract, invalid, mismatch, Result};
use crate::grid::{ft_1d, interp_1d, interp_2d, Axis, Direction, Interpolation};
use crate::states::DensityKernel;
use crate::transforms::{kernel_from_char, phase_space_axes, rotate_kernel, CharFunction, WignerFunction, PAD};

/// Angle count used when the caller does not choose one.
pub const DEFAULT_ANGLES: usize = 64;

/// Largest imaginary residue tolerated before casting a tomogram to real.
pub const IMAG_TOL: f64 = 1e-8;

/// Minimum angle count for polar-to-Cartesian assembly.
pub const MIN_RECONSTRUCTION_ANGLES: usize = 4;

/// Fraction of `max |W|` below which Wigner samples are treated as support-free.
const SUPPORT_FLOOR: f64 = 1e-13;

const ANGLE_TOL: f64 = 1e-12;

/// `count` uniform angles `kπ/count` covering `[0, π)`.
pub fn default_angles(count: usize) -> Vec<f64> {
    (0..count).map(|k| k as f64 * PI / count as f64).collect()
}

/// `ω(x, α)` on a position axis and a sorted angle list in `[0, 2π]`,
/// stored angle-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Tomogram {
    x_axis: Axis,
    angles: Vec<f64>,
    omega: Vec<f64>,
}

fn check_angles(angles: &[f64]) -> Result<()> {
    if angles.is_empty() {
        return Err(invalid!("empty angle list"));
    }
    if let Some(a) = angles.iter().find(|a| !(**a >= -ANGLE_TOL && **a <= TAU + ANGLE_TOL)) {
        return Err(invalid!("angle {a} outside [0, 2π]"));
    }
    if angles.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid!("angles must be strictly increasing"));
    }
    Ok(())
}

impl Tomogram {
    pub fn new(x_axis: Axis, angles: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        check_angles(&angles)?;
        if omega.len() != angles.len() * x_axis.count {
            return Err(invalid!(
                "tomogram needs {} samples, got {}",
                angles.len() * x_axis.count,
                omega.len()
            ));
        }
        Ok(Self { x_axis, angles, omega })
    }

    pub fn x_axis(&self) -> &Axis {
        &self.x_axis
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.x_axis.count;
        &self.omega[i * n..(i + 1) * n]
    }

    pub fn angle_index(&self, alpha: f64) -> Option<usize> {
        self.angles.iter().position(|a| (a - alpha).abs() <= ANGLE_TOL * alpha.abs().max(1.0))
    }

    /// `∫ ω(x, α_i) dx`.
    pub fn normalization(&self, i: usize) -> f64 {
        self.row(i).iter().sum::<f64>() * self.x_axis.step
    }

    pub fn min_value(&self) -> f64 {
        self.omega.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest pointwise difference to another tomogram on the same grid.
    pub fn max_abs_diff(&self, other: &Tomogram) -> Result<f64> {
        if !self.x_axis.approx_eq(&other.x_axis) || self.angles != other.angles {
            return Err(mismatch!("tomograms on different grids"));
        }
        Ok(self
            .omega
            .iter()
            .zip(&other.omega)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

/// `F_α(t) = f(t cos α, t sin α)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialSlice {
    pub angle: f64,
    pub t_axis: Axis,
    pub values: Vec<Complex64>,
}

impl RadialSlice {
    /// Value at an arbitrary signed radius; zero beyond the sampled range.
    pub fn eval(&self, t: f64) -> Complex64 {
        interp_1d(&self.t_axis, &self.values, t, Interpolation::HIGH_ORDER)
    }
}

fn real_cast(values: Vec<Complex64>, what: &str) -> Result<Vec<f64>> {
    let scale = values.iter().fold(1.0f64, |m, z| m.max(z.re.abs()));
    let residue = values.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    if residue > IMAG_TOL * scale {
        return Err(contract!("{what}: imaginary residue {residue:.3e} exceeds {IMAG_TOL:.0e}"));
    }
    Ok(values.into_iter().map(|z| z.re).collect())
}

/// Samples `f` along the line through the origin at angle `alpha`. The radius
/// grid is the conjugate of the position grid; nodes outside the sampled
/// plane read zero.
pub fn slice_char(cf: &CharFunction, alpha: f64) -> RadialSlice {
    let t_axis = cf.position_axis().conjugate();
    let (s, c) = alpha.sin_cos();
    let axes = (cf.x_axis(), cf.y_axis());
    let values = t_axis
        .coords()
        .map(|t| interp_2d(axes, cf.values(), t * c, t * s, Interpolation::HIGH_ORDER))
        .collect();
    RadialSlice {
        angle: alpha,
        t_axis,
        values,
    }
}

/// `ω(x, α) = (1/2π) ∫ e^{-ixt} F_α(t) dt`.
pub fn tomogram_from_char(cf: &CharFunction, angles: &[f64]) -> Result<Tomogram> {
    check_angles(angles)?;
    let pos = cf.position_axis();
    let rows = angles
        .par_iter()
        .map(|&alpha| {
            let slice = slice_char(cf, alpha);
            let omega = ft_1d(&slice.values, &slice.t_axis, pos.min, Direction::Forward);
            real_cast(omega, "tomogram from characteristic function")
        })
        .collect::<Result<Vec<_>>>()?;
    Tomogram::new(pos, angles.to_vec(), rows.concat())
}

/// Index range `[lo, hi]` of samples whose magnitude exceeds `floor`.
fn support_range(count: usize, mut hit: impl FnMut(usize) -> bool) -> Option<(usize, usize)> {
    let lo = (0..count).find(|&i| hit(i))?;
    let hi = (0..count).rev().find(|&i| hit(i))?;
    Some((lo, hi))
}

/// `s`-interval where `a + s·b` stays inside `[lo, hi]`, intersected with `range`.
fn slab(range: (f64, f64), a: f64, b: f64, lo: f64, hi: f64) -> (f64, f64) {
    if b.abs() < 1e-15 {
        return if a >= lo && a <= hi { range } else { (1.0, 0.0) };
    }
    let (s1, s2) = ((lo - a) / b, (hi - a) / b);
    (range.0.max(s1.min(s2)), range.1.min(s1.max(s2)))
}

/// Radon transform `ω(x, α) = (1/2π) ∫∫ W(q, p) δ(x - q cos α - p sin α) dq dp`,
/// evaluated by integrating resampled `W` along each line.
pub fn tomogram_from_wigner(w: &WignerFunction, angles: &[f64]) -> Result<Tomogram> {
    check_angles(angles)?;
    let pos = w.position_axis();
    let (qa, pa) = (w.q_axis(), w.p_axis());
    let peak = w.values().iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let floor = SUPPORT_FLOOR * peak;
    let cols = pa.count;
    let rows_hit = support_range(qa.count, |i| w.values()[i * cols..(i + 1) * cols].iter().any(|z| z.norm() > floor));
    let cols_hit = support_range(cols, |j| (0..qa.count).any(|i| w.at(i, j).norm() > floor));
    let ds = pos.step;
    let rows = angles
        .par_iter()
        .map(|&alpha| {
            let (sn, c) = alpha.sin_cos();
            let omega: Vec<Complex64> = pos
                .coords()
                .map(|x| {
                    let (Some((i0, i1)), Some((j0, j1))) = (rows_hit, cols_hit) else {
                        return Complex64::new(0.0, 0.0);
                    };
                    // Line: q = x cos α - s sin α, p = x sin α + s cos α.
                    let span = (f64::NEG_INFINITY, f64::INFINITY);
                    let span = slab(span, x * c, -sn, qa.coord(i0), qa.coord(i1));
                    let (s_lo, s_hi) = slab(span, x * sn, c, pa.coord(j0), pa.coord(j1));
                    if s_lo > s_hi {
                        return Complex64::new(0.0, 0.0);
                    }
                    let (k0, k1) = ((s_lo / ds).floor() as i64, (s_hi / ds).ceil() as i64);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in k0..=k1 {
                        let s = k as f64 * ds;
                        acc += interp_2d(
                            (qa, pa),
                            w.values(),
                            x * c - s * sn,
                            x * sn + s * c,
                            Interpolation::HIGH_ORDER,
                        );
                    }
                    acc * ds / (2.0 * PI)
                })
                .collect();
            real_cast(omega, "tomogram from Wigner function")
        })
        .collect::<Result<Vec<_>>>()?;
    Tomogram::new(pos, angles.to_vec(), rows.concat())
}

/// `ω(x, α) = ρ_α(x, x)` for the rotated kernel.
pub fn tomogram_from_rotated_kernel(kernel: &DensityKernel, angles: &[f64]) -> Result<Tomogram> {
    check_angles(angles)?;
    let rows = angles
        .par_iter()
        .map(|&alpha| real_cast(rotate_kernel(kernel, alpha)?.diagonal(), "tomogram from rotated kernel"))
        .collect::<Result<Vec<_>>>()?;
    Tomogram::new(*kernel.axis(), angles.to_vec(), rows.concat())
}

/// `f(λ cos α, λ sin α) = ∫ e^{ixλ} ω(x, α) dx` on the conjugate of `x_axis`.
pub fn char_slice_from_tomogram(tom: &Tomogram, alpha: f64) -> Result<RadialSlice> {
    let i = tom
        .angle_index(alpha)
        .ok_or_else(|| invalid!("angle {alpha} is not sampled by the tomogram"))?;
    let x = tom.x_axis;
    let t_axis = x.conjugate();
    let row: Vec<Complex64> = tom.row(i).iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(RadialSlice {
        angle: tom.angles[i],
        t_axis,
        values: ft_1d(&row, &x, t_axis.min, Direction::Inverse),
    })
}

/// Slice of row `i` on the `PAD`-times finer radius grid obtained by zero
/// padding `ω` in `x`.
pub(crate) fn padded_slice(tom: &Tomogram, i: usize) -> RadialSlice {
    let x = tom.x_axis;
    let wide = Axis::symmetric(x.step, PAD * x.count).expect("valid axis");
    let off = (PAD - 1) * x.count / 2;
    let mut row = vec![Complex64::new(0.0, 0.0); wide.count];
    for (k, &v) in tom.row(i).iter().enumerate() {
        row[off + k] = Complex64::new(v, 0.0);
    }
    let t_axis = wide.conjugate();
    RadialSlice {
        angle: tom.angles[i],
        t_axis,
        values: ft_1d(&row, &wide, t_axis.min, Direction::Inverse),
    }
}

/// Slices folded onto `[0, π)`: `(angle, slice, reflected)`, where a
/// reflected slice is read at `-λ`.
fn folded_slices(tom: &Tomogram) -> Vec<(f64, RadialSlice, bool)> {
    let mut out: Vec<(f64, RadialSlice, bool)> = (0..tom.angles.len())
        .into_par_iter()
        .map(|i| {
            let turns = (tom.angles[i] / PI + ANGLE_TOL).floor();
            let folded = (tom.angles[i] - turns * PI).max(0.0);
            (folded, padded_slice(tom, i), turns as i64 % 2 == 1)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.dedup_by(|b, a| (b.0 - a.0).abs() <= ANGLE_TOL);
    out
}

/// Assembles Cartesian `f(x, y)` from polar slices: signed radius
/// `λ = sgn(y)·√(x² + y²)`, angle in `[0, π)`, linear in angle between the two
/// nearest slices, high-order in `λ`.
pub fn char_from_tomogram(tom: &Tomogram) -> Result<CharFunction> {
    if tom.angles.len() < MIN_RECONSTRUCTION_ANGLES {
        return Err(invalid!(
            "reconstruction needs at least {MIN_RECONSTRUCTION_ANGLES} angles, got {}",
            tom.angles.len()
        ));
    }
    let slices = folded_slices(tom);
    if slices.len() < MIN_RECONSTRUCTION_ANGLES {
        return Err(invalid!("fewer than {MIN_RECONSTRUCTION_ANGLES} distinct angles modulo π"));
    }
    let (x_axis, y_axis) = phase_space_axes(&tom.x_axis)?;
    let read = |k: usize, lambda: f64, wrapped: bool| {
        let (_, s, reflected) = &slices[k];
        let flip = *reflected ^ wrapped;
        s.eval(if flip { -lambda } else { lambda })
    };
    let angles: Vec<f64> = slices.iter().map(|s| s.0).collect();
    let m = y_axis.count;
    let mut data = vec![Complex64::new(0.0, 0.0); m * m];
    data.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
        let x = x_axis.coord(i);
        for (j, z) in row.iter_mut().enumerate() {
            let y = y_axis.coord(j);
            let (alpha, lambda) = if y > 0.0 {
                (y.atan2(x), x.hypot(y))
            } else if y < 0.0 {
                ((-y).atan2(-x), -x.hypot(y))
            } else {
                (0.0, x)
            };
            let alpha = if alpha >= PI { 0.0 } else { alpha };
            let k = angles.partition_point(|&a| a <= alpha);
            *z = if k == 0 || k == angles.len() {
                // Between the last slice and the first one turned by π.
                let (lo, hi) = (angles.len() - 1, 0);
                let a_lo = angles[lo] - if k == 0 { PI } else { 0.0 };
                let a_hi = angles[hi] + if k == 0 { 0.0 } else { PI };
                let u = (alpha - a_lo) / (a_hi - a_lo);
                read(lo, lambda, k == 0) * (1.0 - u) + read(hi, lambda, k != 0) * u
            } else {
                let u = (alpha - angles[k - 1]) / (angles[k] - angles[k - 1]);
                read(k - 1, lambda, false) * (1.0 - u) + read(k, lambda, false) * u
            };
        }
    });
    CharFunction::new(x_axis, y_axis, data)
}

/// `kernel_from_char(char_from_tomogram(tom))`.
pub fn kernel_from_tomogram(tom: &Tomogram) -> Result<DensityKernel> {
    kernel_from_char(&char_from_tomogram(tom)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_axis, relative_l2};
    use crate::states::{coherent_state, fock_state, mix, pure_kernel};
    use crate::transforms::{char_from_kernel, wigner_from_kernel};

    fn rig() -> Axis {
        make_axis(8.0, 256).unwrap()
    }

    fn small() -> Axis {
        make_axis(8.0, 128).unwrap()
    }

    fn gaussian(x: f64) -> f64 {
        (-x * x).exp() / PI.sqrt()
    }

    fn sup_vs(tom: &Tomogram, f: impl Fn(f64) -> f64) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..tom.angles().len() {
            for (k, x) in tom.x_axis().coords().enumerate() {
                worst = worst.max((tom.row(i)[k] - f(x)).abs());
            }
        }
        worst
    }

    #[test]
    fn vacuum_slices_are_gaussian() {
        let cf = char_from_kernel(&pure_kernel(&fock_state(0, rig()).unwrap())).unwrap();
        for alpha in [0.0, 0.37, 1.0, PI / 2.0, 2.8] {
            let s = slice_char(&cf, alpha);
            for (k, t) in s.t_axis.coords().enumerate() {
                assert!((s.values[k] - (-t * t / 4.0).exp()).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn axis_aligned_slice_reads_nodes() {
        let cf = char_from_kernel(&pure_kernel(&fock_state(2, small()).unwrap())).unwrap();
        let s = slice_char(&cf, 0.0);
        let j0 = cf.y_axis().node_index(0.0).unwrap();
        for (k, t) in s.t_axis.coords().enumerate() {
            let i = cf.x_axis().node_index(t).unwrap();
            assert_eq!(s.values[k], cf.at(i, j0));
        }
    }

    #[test]
    fn vacuum_tomogram_by_every_route() {
        let k = pure_kernel(&fock_state(0, rig()).unwrap());
        let angles = [0.0, 0.5, 1.3, 2.2, 3.0];
        let from_char = tomogram_from_char(&char_from_kernel(&k).unwrap(), &angles).unwrap();
        assert!(sup_vs(&from_char, gaussian) < 1e-6);
        let from_wigner = tomogram_from_wigner(&wigner_from_kernel(&k).unwrap(), &angles).unwrap();
        assert!(sup_vs(&from_wigner, gaussian) < 1e-4);
        let rotated = tomogram_from_rotated_kernel(&k, &angles).unwrap();
        assert!(sup_vs(&rotated, gaussian) < 1e-6);
        for i in 0..angles.len() {
            assert!((from_char.normalization(i) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_angle_is_the_position_density() {
        let s = fock_state(1, rig()).unwrap();
        let k = pure_kernel(&s);
        let tom = tomogram_from_char(&char_from_kernel(&k).unwrap(), &[0.0]).unwrap();
        assert!(sup_vs(&tom, |x| 2.0 * x * x * (-x * x).exp() / PI.sqrt()) < 1e-5);
        let rot = tomogram_from_rotated_kernel(&k, &[0.0]).unwrap();
        for (a, d) in rot.row(0).iter().zip(k.diagonal()) {
            assert_eq!(*a, d.re);
        }
    }

    #[test]
    fn zero_angle_radon_is_the_momentum_marginal() {
        let k = pure_kernel(&coherent_state(Complex64::new(0.5, 0.8), small()).unwrap());
        let w = wigner_from_kernel(&k).unwrap();
        let tom = tomogram_from_wigner(&w, &[0.0]).unwrap();
        let (qa, pa) = (w.q_axis(), w.p_axis());
        for (k, x) in tom.x_axis().coords().enumerate() {
            let i = qa.node_index(x).unwrap();
            let marginal: f64 = (0..pa.count).map(|j| w.at(i, j).re).sum::<f64>() * pa.step / (2.0 * PI);
            assert!((tom.row(0)[k] - marginal).abs() < 1e-6);
        }
    }

    #[test]
    fn routes_agree_on_fock_states() {
        let angles = default_angles(8);
        for m in 0..=5 {
            let k = pure_kernel(&fock_state(m, rig()).unwrap());
            let a = tomogram_from_char(&char_from_kernel(&k).unwrap(), &angles).unwrap();
            let b = tomogram_from_wigner(&wigner_from_kernel(&k).unwrap(), &angles).unwrap();
            let c = tomogram_from_rotated_kernel(&k, &angles).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() < 1e-3, "m={m}");
            assert!(a.max_abs_diff(&c).unwrap() < 1e-5, "m={m}");
        }
    }

    #[test]
    fn half_turn_reflects_position() {
        let k = pure_kernel(&coherent_state(Complex64::new(1.0, 0.4), rig()).unwrap());
        let cf = char_from_kernel(&k).unwrap();
        let alpha = 0.8;
        let tom = tomogram_from_char(&cf, &[alpha, alpha + PI]).unwrap();
        let n = tom.x_axis().count;
        for kx in 1..n {
            assert!((tom.row(1)[kx] - tom.row(0)[n - kx]).abs() < 1e-6);
        }
    }

    #[test]
    fn fourier_slice_coherence() {
        let k = pure_kernel(&fock_state(3, rig()).unwrap());
        let cf = char_from_kernel(&k).unwrap();
        let angles = default_angles(6);
        let tom = tomogram_from_char(&cf, &angles).unwrap();
        for &alpha in &angles {
            let direct = slice_char(&cf, alpha);
            let back = char_slice_from_tomogram(&tom, alpha).unwrap();
            assert!(back.t_axis.approx_eq(&direct.t_axis));
            let worst = back
                .values
                .iter()
                .zip(&direct.values)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
            assert!(worst < 1e-6, "α={alpha}: {worst}");
            let c = back.t_axis.node_index(0.0).unwrap();
            assert!((back.values[c] - 1.0).norm() < 1e-6);
        }
        assert!(char_slice_from_tomogram(&tom, 0.123).is_err());
    }

    #[test]
    fn positivity_for_mixtures() {
        let k0 = pure_kernel(&fock_state(0, rig()).unwrap());
        let k3 = pure_kernel(&fock_state(3, rig()).unwrap());
        let mixed = mix(&[(0.3, &k0), (0.7, &k3)]).unwrap();
        let tom = tomogram_from_char(&char_from_kernel(&mixed).unwrap(), &default_angles(16)).unwrap();
        assert!(tom.min_value() >= -1e-5);
    }

    #[test]
    fn curvature_is_stable_under_refinement() {
        let curvature = |count: usize| {
            let k = pure_kernel(&fock_state(2, make_axis(8.0, count).unwrap()).unwrap());
            let tom = tomogram_from_char(&char_from_kernel(&k).unwrap(), &[0.6]).unwrap();
            let (r, h) = (tom.row(0), tom.x_axis().step);
            r.windows(3).fold(0.0f64, |m, w| m.max((w[0] - 2.0 * w[1] + w[2]).abs())) / (h * h)
        };
        let (coarse, fine) = (curvature(128), curvature(256));
        assert!((fine / coarse - 1.0).abs() < 0.1);
    }

    #[test]
    fn reconstruction_roundtrip() {
        let k = pure_kernel(&fock_state(0, rig()).unwrap());
        let tom = tomogram_from_char(&char_from_kernel(&k).unwrap(), &default_angles(64)).unwrap();
        let cf = char_from_tomogram(&tom).unwrap();
        let mut worst: f64 = 0.0;
        for (i, x) in cf.x_axis().coords().enumerate() {
            for (j, y) in cf.y_axis().coords().enumerate() {
                worst = worst.max((cf.at(i, j) - (-(x * x + y * y) / 4.0).exp()).norm());
            }
        }
        assert!(worst < 1e-3, "sup error {worst}");
        assert!((cf.at_origin() - 1.0).norm() < 1e-6);
        let back = kernel_from_char(&cf).unwrap();
        assert!(relative_l2(back.rho(), k.rho()) < 1e-2);
        assert!((back.trace() - 1.0).norm() < 1e-3);
    }

    #[test]
    fn reconstruction_of_an_anisotropic_state() {
        let k = pure_kernel(&coherent_state(Complex64::new(0.8, -0.6), rig()).unwrap());
        let cf = char_from_kernel(&k).unwrap();
        let tom = tomogram_from_char(&cf, &default_angles(64)).unwrap();
        let back = kernel_from_tomogram(&tom).unwrap();
        assert!(relative_l2(back.rho(), k.rho()) < 1e-2);
    }

    #[test]
    fn full_circle_angles_fold_consistently() {
        let k = pure_kernel(&coherent_state(Complex64::new(0.5, 0.5), small()).unwrap());
        let cf = char_from_kernel(&k).unwrap();
        let half = char_from_tomogram(&tomogram_from_char(&cf, &default_angles(32)).unwrap()).unwrap();
        let full_angles: Vec<f64> = (0..64).map(|i| i as f64 * PI / 32.0).collect();
        let full = char_from_tomogram(&tomogram_from_char(&cf, &full_angles).unwrap()).unwrap();
        assert!(relative_l2(half.values(), full.values()) < 1e-9);
    }

    #[test]
    fn angle_lists_are_validated() {
        let cf = char_from_kernel(&pure_kernel(&fock_state(0, small()).unwrap())).unwrap();
        assert!(tomogram_from_char(&cf, &[]).is_err());
        assert!(tomogram_from_char(&cf, &[1.0, 0.5]).is_err());
        assert!(tomogram_from_char(&cf, &[7.0]).is_err());
        let tom = tomogram_from_char(&cf, &default_angles(3)).unwrap();
        assert!(char_from_tomogram(&tom).is_err());
    }
}
