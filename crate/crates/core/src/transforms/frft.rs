//! Fractional Fourier transform on a uniform position grid.
//!
//! `F_α[φ](x) = e^{i x² cot α / 2} / √(2π|sin α|) ∫ e^{i q² cot α / 2 - i x q / sin α} φ(q) dq`,
//! which agrees with `exp(-iαĤ)` up to a global phase. Input and output share
//! one axis. The sum is evaluated as a chirp convolution (Bluestein), exact
//! for any `N`.
//!
//! The chirp `e^{i q² cot α / 2}` aliases on a fixed grid once `|cot α|` is
//! large, so angles with `|sin α| < 1/√2` are split as `F_{π/2} ∘ F_{α-π/2}`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};
use crate::grid::{transpose, Axis};
use crate::states::{DensityKernel, PureState};

/// `|sin α|` below which an angle snaps to identity or parity.
pub const SINGULAR_SNAP: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone)]
struct Chirp {
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
    kernel_hat: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Chirp {
    /// Direct evaluation; requires `|sin α|` bounded away from 0.
    fn new(axis: &Axis, alpha: f64) -> Self {
        let (n, h, x0) = (axis.count, axis.step, axis.min);
        let (s, c) = alpha.sin_cos();
        let cot = c / s;
        let beta = h * h / s;
        let len = (2 * n - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);

        let pre = (0..n)
            .map(|j| {
                let (jf, q) = (j as f64, axis.coord(j));
                Complex64::from_polar(h, q * q * cot / 2.0 - x0 * jf * h / s - beta * jf * jf / 2.0)
            })
            .collect();
        let amp = 1.0 / (2.0 * PI * s.abs()).sqrt();
        let post = (0..n)
            .map(|k| {
                let (kf, x) = (k as f64, axis.coord(k));
                let theta = x * x * cot / 2.0 - (x0 * x0 + x0 * kf * h) / s - beta * kf * kf / 2.0;
                Complex64::from_polar(amp, theta)
            })
            .collect();
        let mut kernel_hat = vec![ZERO; len];
        for m in 0..n {
            let v = Complex64::from_polar(1.0, beta * (m * m) as f64 / 2.0);
            kernel_hat[m] = v;
            if m > 0 {
                kernel_hat[len - m] = v;
            }
        }
        fwd.process(&mut kernel_hat);
        let norm = 1.0 / len as f64;
        kernel_hat.iter_mut().for_each(|z| *z *= norm);
        Self {
            pre,
            post,
            kernel_hat,
            fwd,
            inv,
        }
    }

    fn apply(&self, lane: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = lane.len();
        scratch.fill(ZERO);
        for ((s, z), p) in scratch.iter_mut().zip(lane.iter()).zip(&self.pre) {
            *s = z * p;
        }
        self.fwd.process(scratch);
        for (s, k) in scratch.iter_mut().zip(&self.kernel_hat) {
            *s *= k;
        }
        self.inv.process(scratch);
        for ((z, s), p) in lane.iter_mut().zip(&scratch[..n]).zip(&self.post) {
            *z = s * p;
        }
    }
}

#[derive(Clone)]
enum Kind {
    Identity,
    Parity,
    Direct(Chirp),
    Split(Chirp, Chirp),
}

/// Precomputed transform for one `(axis, α)` pair, reusable across lanes.
#[derive(Clone)]
pub struct FrftPlan {
    axis: Axis,
    alpha: f64,
    kind: Kind,
}

impl FrftPlan {
    pub fn new(axis: &Axis, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(invalid!("rotation angle must be finite, got {alpha}"));
        }
        let s = alpha.sin();
        let kind = if s.abs() < SINGULAR_SNAP {
            if alpha.cos() > 0.0 {
                Kind::Identity
            } else {
                if !axis.is_symmetric() {
                    return Err(invalid!("parity needs a symmetric axis"));
                }
                Kind::Parity
            }
        } else if s.abs() >= FRAC_1_SQRT_2 {
            Kind::Direct(Chirp::new(axis, alpha))
        } else {
            Kind::Split(Chirp::new(axis, alpha - FRAC_PI_2), Chirp::new(axis, FRAC_PI_2))
        };
        Ok(Self {
            axis: *axis,
            alpha,
            kind,
        })
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn scratch_len(&self) -> usize {
        (2 * self.axis.count - 1).next_power_of_two()
    }

    /// Transforms one lane in place, without renormalization.
    pub fn apply(&self, lane: &mut [Complex64]) {
        let mut scratch = vec![ZERO; self.scratch_len()];
        self.apply_with(lane, &mut scratch);
    }

    fn apply_with(&self, lane: &mut [Complex64], scratch: &mut [Complex64]) {
        assert_eq!(lane.len(), self.axis.count);
        match &self.kind {
            Kind::Identity => {}
            Kind::Parity => {
                // x_k ↦ x_{N-k}; the node at -extent has no mirror on the grid.
                lane[1..].reverse();
                lane[0] = ZERO;
            }
            Kind::Direct(c) => c.apply(lane, scratch),
            Kind::Split(a, b) => {
                a.apply(lane, scratch);
                b.apply(lane, scratch);
            }
        }
    }

    /// Applies the plan to consecutive lanes of `data` in parallel.
    pub fn apply_lanes(&self, data: &mut [Complex64]) {
        let len = self.scratch_len();
        data.par_chunks_mut(self.axis.count).for_each_init(
            || vec![ZERO; len],
            |scratch, lane| self.apply_with(lane, scratch),
        );
    }
}

/// `F_α[ψ]`, renormalized on the grid.
pub fn frft(psi: &PureState, alpha: f64) -> Result<PureState> {
    let plan = FrftPlan::new(psi.axis(), alpha)?;
    let mut out = psi.psi().to_vec();
    plan.apply(&mut out);
    PureState::from_samples(*psi.axis(), out)
}

/// `ρ_α = F_α ρ F_α†`: `F_α` over the first argument, `F_{-α}` over the second.
pub fn rotate_kernel(kernel: &DensityKernel, alpha: f64) -> Result<DensityKernel> {
    let axis = *kernel.axis();
    let n = axis.count;
    let plan = FrftPlan::new(&axis, alpha)?;
    // Columns: lanes over q for each fixed q′.
    let mut cols = transpose(kernel.rho(), n, n);
    plan.apply_lanes(&mut cols);
    let mut rows = transpose(&cols, n, n);
    // Rows: F_{-α} is the complex conjugate of F_α.
    rows.iter_mut().for_each(|z| *z = z.conj());
    plan.apply_lanes(&mut rows);
    rows.iter_mut().for_each(|z| *z = z.conj());
    DensityKernel::from_samples(axis, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_axis, relative_l2};
    use crate::states::{fock_state, pure_kernel};

    fn rig() -> Axis {
        make_axis(8.0, 256).unwrap()
    }

    fn magnitudes(s: &PureState) -> Vec<f64> {
        s.psi().iter().map(|z| z.norm()).collect()
    }

    fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn quarter_turn_fixes_the_vacuum() {
        let v = fock_state(0, rig()).unwrap();
        let out = frft(&v, FRAC_PI_2).unwrap();
        assert!(sup_diff(&magnitudes(&out), &magnitudes(&v)) < 1e-8);
    }

    #[test]
    fn fock_states_are_eigenfunctions() {
        for m in 0..5 {
            let s = fock_state(m, rig()).unwrap();
            for alpha in [0.3, 1.2, 2.5, -0.8] {
                let out = frft(&s, alpha).unwrap();
                let ip = s.inner(&out).unwrap();
                assert!((ip.norm() - 1.0).abs() < 1e-9, "m={m} α={alpha}: {ip}");
            }
        }
    }

    #[test]
    fn zero_angle_is_identity() {
        let s = fock_state(3, rig()).unwrap();
        assert_eq!(frft(&s, 0.0).unwrap().psi(), s.psi());
        assert_eq!(frft(&s, 2.0 * PI).unwrap().psi(), s.psi());
        assert_eq!(frft(&s, 1e-8).unwrap().psi(), s.psi());
    }

    #[test]
    fn half_turn_is_parity() {
        let s = fock_state(3, rig()).unwrap();
        let out = frft(&s, PI).unwrap();
        for k in 1..rig().count {
            assert!((out.psi()[k] + s.psi()[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn angles_compose_additively() {
        let s = fock_state(2, rig()).unwrap();
        let two_step = frft(&frft(&s, 0.4).unwrap(), 0.9).unwrap();
        let direct = frft(&s, 1.3).unwrap();
        assert!(sup_diff(&magnitudes(&two_step), &magnitudes(&direct)) < 1e-7);
    }

    #[test]
    fn raw_output_is_unitary() {
        let s = fock_state(4, rig()).unwrap();
        for alpha in [0.05, 0.4, 1.0, FRAC_PI_2, 2.0, 3.0, -1.7] {
            let plan = FrftPlan::new(s.axis(), alpha).unwrap();
            let mut out = s.psi().to_vec();
            plan.apply(&mut out);
            let raw = PureState::from_samples(*s.axis(), out.clone()).unwrap();
            let norm = (out.iter().map(|z| z.norm_sqr()).sum::<f64>() * rig().step).sqrt();
            assert!((norm - 1.0).abs() < 1e-9, "α={alpha}: norm {norm}");
            assert!((raw.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quarter_turn_is_the_unitary_fourier_transform() {
        // F_{π/2} of a displaced Gaussian has modulus π^{-1/4} e^{-x²/2}
        // and phase e^{-i x a}.
        let axis = rig();
        let a = 1.5;
        let psi = axis
            .coords()
            .map(|q| Complex64::new(PI.powf(-0.25) * (-(q - a).powi(2) / 2.0).exp(), 0.0))
            .collect();
        let s = PureState::from_samples(axis, psi).unwrap();
        let out = frft(&s, FRAC_PI_2).unwrap();
        for (k, x) in axis.coords().enumerate() {
            let expect = Complex64::from_polar(PI.powf(-0.25) * (-x * x / 2.0).exp(), -x * a);
            assert!((out.psi()[k] - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn rotation_fixes_the_vacuum_kernel() {
        let k = pure_kernel(&fock_state(0, rig()).unwrap());
        for alpha in [0.3, 1.1, 2.9] {
            let r = rotate_kernel(&k, alpha).unwrap();
            assert!(relative_l2(r.rho(), k.rho()) < 1e-7);
        }
        assert_eq!(rotate_kernel(&k, 0.0).unwrap(), k);
    }

    #[test]
    fn rotation_preserves_trace_and_hermiticity() {
        let k = pure_kernel(&fock_state(2, rig()).unwrap());
        let r = rotate_kernel(&k, 1.1).unwrap();
        assert!(r.is_hermitian());
        assert!((r.trace() - 1.0).norm() < 1e-6);
    }

    #[test]
    fn rotated_pure_kernel_matches_rotated_state() {
        let s = fock_state(1, rig()).unwrap();
        let alpha = 0.7;
        let r = rotate_kernel(&pure_kernel(&s), alpha).unwrap();
        let expect = pure_kernel(&frft(&s, alpha).unwrap());
        assert!(relative_l2(r.rho(), expect.rho()) < 1e-9);
    }
}
