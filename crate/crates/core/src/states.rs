//! Analytic test states and density kernels (ħ = m = ω = 1).

use std::f64::consts::{PI, SQRT_2};

use log::warn;
use num_complex::Complex64;

use crate::error::{invalid, mismatch, Result};
use crate::grid::{hermitian_defect, max_abs, Axis, SampledField};

/// Highest Fock index the Hermite-function recurrence is trusted for.
pub const MAX_FOCK: usize = 60;

/// Hermiticity tolerance for [`DensityKernel::is_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Normalized wavefunction samples on a position axis.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    axis: Axis,
    psi: Vec<Complex64>,
}

impl PureState {
    /// Wraps samples and renormalizes them on the grid.
    pub fn from_samples(axis: Axis, mut psi: Vec<Complex64>) -> Result<Self> {
        if psi.len() != axis.count {
            return Err(invalid!("{} samples for an axis of {}", psi.len(), axis.count));
        }
        let norm = (psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * axis.step).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(invalid!("state has zero or non-finite norm"));
        }
        psi.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { axis, psi })
    }

    pub fn from_field(field: &SampledField) -> Result<Self> {
        match field.axes() {
            [axis] => Self::from_samples(*axis, field.data().to_vec()),
            _ => Err(invalid!("a pure state is a 1-D field, got {} axes", field.ndim())),
        }
    }

    pub fn to_field(&self) -> SampledField {
        SampledField::new(vec![self.axis], self.psi.clone()).expect("consistent shape")
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn norm(&self) -> f64 {
        (self.psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.axis.step).sqrt()
    }

    /// `⟨self|other⟩` by quadrature.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if !self.axis.approx_eq(&other.axis) {
            return Err(mismatch!("inner product of states on different axes"));
        }
        let s: Complex64 = self.psi.iter().zip(&other.psi).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.axis.step)
    }

    /// `∫ q |ψ(q)|² dq`.
    pub fn mean_position(&self) -> f64 {
        self.axis
            .coords()
            .zip(&self.psi)
            .map(|(q, z)| q * z.norm_sqr())
            .sum::<f64>()
            * self.axis.step
    }
}

/// Kernel `ρ(q, q′)` of a density operator on equal position axes, stored
/// row-major with `q` as the slow index. Positivity is not enforced.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityKernel {
    axis: Axis,
    rho: Vec<Complex64>,
    trace_hint: Complex64,
    hermitian: bool,
}

impl DensityKernel {
    pub fn from_samples(axis: Axis, rho: Vec<Complex64>) -> Result<Self> {
        let n = axis.count;
        if rho.len() != n * n {
            return Err(invalid!("kernel needs {} samples, got {}", n * n, rho.len()));
        }
        let trace_hint = (0..n).map(|i| rho[i * n + i]).sum::<Complex64>() * axis.step;
        let hermitian = hermitian_defect(&rho, n) < HERMITIAN_TOL * max_abs(&rho).max(1.0);
        Ok(Self {
            axis,
            rho,
            trace_hint,
            hermitian,
        })
    }

    pub fn from_field(field: &SampledField) -> Result<Self> {
        match field.axes() {
            [q, qp] if q.approx_eq(qp) => Self::from_samples(*q, field.data().to_vec()),
            [_, _] => Err(mismatch!("kernel axes q and q′ differ")),
            _ => Err(invalid!("a density kernel is a 2-D field, got {} axes", field.ndim())),
        }
    }

    pub fn to_field(&self) -> SampledField {
        SampledField::new(vec![self.axis, self.axis], self.rho.clone()).expect("consistent shape")
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn rho(&self) -> &[Complex64] {
        &self.rho
    }

    #[inline]
    pub fn at(&self, a: usize, b: usize) -> Complex64 {
        self.rho[a * self.axis.count + b]
    }

    /// `∫ ρ(q, q) dq` on the grid.
    pub fn trace(&self) -> Complex64 {
        self.trace_hint
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.axis.count).map(|i| self.at(i, i)).collect()
    }

    /// Integral-operator action `(ρ̂ψ)(q) = ∫ ρ(q, q′) ψ(q′) dq′`.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.axis.count;
        assert_eq!(psi.len(), n);
        self.rho
            .chunks(n)
            .map(|row| row.iter().zip(psi).map(|(r, p)| r * p).sum::<Complex64>() * self.axis.step)
            .collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_samples(self.axis, self.rho.iter().map(|z| z * c).collect()).expect("same shape")
    }
}

/// Energy eigenstate `ψ_m` from the normalized Hermite-function recurrence.
pub fn fock_state(m: usize, axis: Axis) -> Result<PureState> {
    if m > MAX_FOCK {
        return Err(invalid!("Fock index {m} exceeds the stable range 0..={MAX_FOCK}"));
    }
    if m as f64 * axis.step * axis.step > 1.0 {
        warn!(
            "grid step {} is too coarse to resolve Fock state {m} (m·step² > 1)",
            axis.step
        );
    }
    let psi = axis
        .coords()
        .map(|q| Complex64::new(hermite_function(m, q), 0.0))
        .collect();
    PureState::from_samples(axis, psi)
}

/// `H_m(q) e^{-q²/2} / sqrt(2^m m! √π)` without forming `H_m`.
pub fn hermite_function(m: usize, q: f64) -> f64 {
    let mut prev = PI.powf(-0.25) * (-q * q / 2.0).exp();
    if m == 0 {
        return prev;
    }
    let mut cur = SQRT_2 * q * prev;
    for k in 1..m {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * q * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Glauber coherent state `|α⟩`.
pub fn coherent_state(alpha: Complex64, axis: Axis) -> Result<PureState> {
    let q0 = SQRT_2 * alpha.re;
    let p0 = SQRT_2 * alpha.im;
    if SQRT_2 * alpha.norm() > axis.extent() / 2.0 {
        warn!("coherent state |{alpha}⟩ reaches the outer half of the grid");
    }
    let psi: Vec<Complex64> = axis
        .coords()
        .map(|q| {
            let amp = PI.powf(-0.25) * (-(q - q0).powi(2) / 2.0).exp();
            Complex64::from_polar(amp, p0 * q - alpha.re * alpha.im)
        })
        .collect();
    let inside = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * axis.step;
    if (1.0 - inside).abs() > 1e-6 {
        return Err(invalid!(
            "coherent state |{alpha}⟩ loses {:.3e} of its mass outside the grid",
            1.0 - inside
        ));
    }
    PureState::from_samples(axis, psi)
}

/// Normalized indicator of `[-halfwidth, halfwidth]`. Each node carries the
/// box's probability over its cell, so the grid norm is exact and an edge on
/// a node gets half the density.
pub fn box_state(halfwidth: f64, axis: Axis) -> Result<PureState> {
    if !(halfwidth > 0.0 && halfwidth < axis.extent()) {
        return Err(invalid!(
            "box half-width must lie in (0, {}), got {halfwidth}",
            axis.extent()
        ));
    }
    let height = 1.0 / (2.0 * halfwidth).sqrt();
    let h = axis.step;
    let psi = axis
        .coords()
        .map(|q| {
            let inside = ((q + h / 2.0).min(halfwidth) - (q - h / 2.0).max(-halfwidth)).max(0.0);
            let frac = snap_fraction(inside / h);
            Complex64::new(height * frac.sqrt(), 0.0)
        })
        .collect();
    PureState::from_samples(axis, psi)
}

fn snap_fraction(f: f64) -> f64 {
    [0.0, 0.5, 1.0]
        .into_iter()
        .find(|c| (f - c).abs() < 1e-9)
        .unwrap_or(f)
}

/// `ρ(q, q′) = ψ(q) conj ψ(q′)`.
pub fn pure_kernel(psi: &PureState) -> DensityKernel {
    let p = psi.psi();
    let rho = p
        .iter()
        .flat_map(|a| p.iter().map(move |b| a * b.conj()))
        .collect();
    DensityKernel::from_samples(*psi.axis(), rho).expect("square by construction")
}

/// Convex combination of kernels. Negative weights are rejected; see
/// [`mix_signed`] for affine combinations.
pub fn mix(parts: &[(f64, &DensityKernel)]) -> Result<DensityKernel> {
    if let Some((w, _)) = parts.iter().find(|(w, _)| *w < 0.0) {
        return Err(invalid!("negative mixture weight {w}"));
    }
    mix_signed(parts)
}

/// Weighted sum of kernels with arbitrary real weights.
pub fn mix_signed(parts: &[(f64, &DensityKernel)]) -> Result<DensityKernel> {
    let (_, first) = parts.first().ok_or_else(|| invalid!("empty mixture"))?;
    let axis = first.axis;
    let mut rho = vec![Complex64::new(0.0, 0.0); axis.count * axis.count];
    for (w, k) in parts {
        if !k.axis.approx_eq(&axis) {
            return Err(mismatch!("mixture components live on different grids"));
        }
        for (acc, z) in rho.iter_mut().zip(&k.rho) {
            *acc += z * *w;
        }
    }
    DensityKernel::from_samples(axis, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_axis;

    fn rig() -> Axis {
        make_axis(8.0, 256).unwrap()
    }

    #[test]
    fn vacuum_peak_value() {
        let s = fock_state(0, rig()).unwrap();
        let mid = s.axis().node_index(0.0).unwrap();
        assert!((s.psi()[mid].re - PI.powf(-0.25)).abs() < 1e-12);
        assert!((PI.powf(-0.25) - 0.7511).abs() < 1e-4);
    }

    #[test]
    fn fock_one_is_odd() {
        let s = fock_state(1, rig()).unwrap();
        let mid = s.axis().node_index(0.0).unwrap();
        assert_eq!(s.psi()[mid].re, 0.0);
    }

    #[test]
    fn fock_orthonormality() {
        let axis = make_axis(12.0, 512).unwrap();
        let states: Vec<_> = (0..=10).map(|m| fock_state(m, axis).unwrap()).collect();
        for (m, a) in states.iter().enumerate() {
            for (k, b) in states.iter().enumerate() {
                let ip = a.inner(b).unwrap();
                let expect = if m == k { 1.0 } else { 0.0 };
                assert!((ip - expect).norm() < 1e-9, "⟨{m}|{k}⟩ = {ip}");
            }
        }
    }

    #[test]
    fn fock_parity_on_symmetric_grid() {
        let axis = rig();
        for m in 0..8 {
            let s = fock_state(m, axis).unwrap();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for k in 1..axis.count {
                let mirrored = s.psi()[axis.count - k];
                assert!((s.psi()[k] - mirrored * sign).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fock_index_is_bounded() {
        assert!(fock_state(MAX_FOCK + 1, rig()).is_err());
        assert!(fock_state(MAX_FOCK, make_axis(16.0, 1024).unwrap()).is_ok());
    }

    #[test]
    fn coherent_zero_is_vacuum() {
        let a = coherent_state(Complex64::new(0.0, 0.0), rig()).unwrap();
        let b = fock_state(0, rig()).unwrap();
        for (x, y) in a.psi().iter().zip(b.psi()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn coherent_overlap_with_vacuum() {
        let a = coherent_state(Complex64::new(1.0, 0.0), rig()).unwrap();
        let v = fock_state(0, rig()).unwrap();
        let p = v.inner(&a).unwrap().norm_sqr();
        assert!((p - (-1.0f64).exp()).abs() < 1e-8);
        assert!((p - 0.36787944).abs() < 1e-8);
    }

    #[test]
    fn coherent_mean_position() {
        let a = coherent_state(Complex64::new(1.0, 0.5), rig()).unwrap();
        assert!((a.mean_position() - SQRT_2).abs() < 1e-8);
    }

    #[test]
    fn coherent_off_grid_is_an_error() {
        assert!(coherent_state(Complex64::new(5.0, 0.0), rig()).is_err());
    }

    #[test]
    fn box_norm_and_height() {
        let b = box_state(1.0, rig()).unwrap();
        assert!((b.norm() - 1.0).abs() < 1e-12);
        let mid = b.axis().node_index(0.0).unwrap();
        assert!((b.psi()[mid].re - 1.0 / SQRT_2).abs() < 1e-12);
        assert!(box_state(8.0, rig()).is_err());
        assert!(box_state(0.0, rig()).is_err());
    }

    #[test]
    fn vacuum_kernel_closed_form() {
        let axis = rig();
        let k = pure_kernel(&fock_state(0, axis).unwrap());
        assert!(k.is_hermitian());
        assert!((k.trace() - 1.0).norm() < 1e-12);
        for a in (0..axis.count).step_by(5) {
            for b in (0..axis.count).step_by(3) {
                let (q, qp) = (axis.coord(a), axis.coord(b));
                let expect = (-(q * q + qp * qp) / 2.0).exp() / PI.sqrt();
                assert!((k.at(a, b) - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_kernel_diagonal_is_density() {
        let s = fock_state(3, rig()).unwrap();
        let k = pure_kernel(&s);
        for (d, z) in k.diagonal().iter().zip(s.psi()) {
            assert!((d - z.norm_sqr()).norm() < 1e-15);
        }
    }

    #[test]
    fn pure_kernel_is_a_projector() {
        let s = fock_state(2, rig()).unwrap();
        let out = pure_kernel(&s).apply(s.psi());
        for (a, b) in out.iter().zip(s.psi()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn pure_kernel_has_rank_one() {
        let s = coherent_state(Complex64::new(0.7, -0.4), rig()).unwrap();
        let k = pure_kernel(&s);
        let n = rig().count;
        // Power iteration for the leading singular pair of the PSD kernel.
        let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + (i % 7) as f64, 0.0)).collect();
        for _ in 0..4 {
            let w = k.apply(&v);
            let nrm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v = w.into_iter().map(|z| z / nrm).collect();
        }
        let kv = k.apply(&v);
        let sigma1 = kv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut resid = 0.0;
        for a in 0..n {
            for b in 0..n {
                let r = k.at(a, b) * rig().step - sigma1 * v[a] * v[b].conj();
                resid += r.norm_sqr();
            }
        }
        assert!(resid.sqrt() / sigma1 < 1e-10);
    }

    #[test]
    fn mixtures() {
        let axis = rig();
        let k0 = pure_kernel(&fock_state(0, axis).unwrap());
        let k1 = pure_kernel(&fock_state(1, axis).unwrap());
        let single = mix(&[(1.0, &k0)]).unwrap();
        assert_eq!(single.rho(), k0.rho());
        let even = mix(&[(0.5, &k0), (0.5, &k1)]).unwrap();
        assert!((even.trace() - 1.0).norm() < 1e-12);
        assert!(even.is_hermitian());
        assert!(mix(&[(-0.5, &k0), (1.5, &k1)]).is_err());
        assert!(mix_signed(&[(-0.5, &k0), (1.5, &k1)]).is_ok());
        let other = pure_kernel(&fock_state(0, make_axis(6.0, 256).unwrap()).unwrap());
        assert!(mix(&[(0.5, &k0), (0.5, &other)]).is_err());
    }
}
