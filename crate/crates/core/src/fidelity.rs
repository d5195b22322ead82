//! Transition probability `P₁₂ = Tr ρ₁ρ₂` by three routes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{contract, invalid, mismatch, Result};
use crate::grid::make_axis;
use crate::states::{fock_state, pure_kernel, DensityKernel};
use crate::tomography::{padded_slice, Tomogram};
use crate::transforms::{char_from_kernel, CharFunction};

/// Factor turning the phase-space overlap integrals into `Tr ρ₁ρ₂`.
/// Frozen from [`calibrate`]; the vacuum pair ratio lands on `1/(2π)`.
pub const CHAR_ROUTE_NORMALIZATION: f64 = 1.0 / (2.0 * PI);

/// Tolerance on the imaginary part of a route's raw value.
pub const IMAG_TOL: f64 = 1e-8;

/// Minimum angle count for the tomographic route.
pub const MIN_TOMOGRAPHIC_ANGLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Direct,
    Characteristic,
    Tomographic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransitionResult {
    pub value: f64,
    pub route: Route,
    pub normalization_constant: f64,
}

fn finish(raw: Complex64, route: Route, normalization_constant: f64) -> Result<TransitionResult> {
    if raw.im.abs() > IMAG_TOL * raw.re.abs().max(1.0) {
        return Err(contract!("{route:?} route: imaginary residue {:.3e}", raw.im));
    }
    Ok(TransitionResult {
        value: raw.re * normalization_constant,
        route,
        normalization_constant,
    })
}

/// `∫∫ ρ₁(q, q′) ρ₂(q′, q) dq dq′`.
pub fn transition_direct(k1: &DensityKernel, k2: &DensityKernel) -> Result<TransitionResult> {
    if !k1.axis().approx_eq(k2.axis()) {
        return Err(mismatch!("kernels on different grids"));
    }
    let n = k1.axis().count;
    let mut raw = Complex64::new(0.0, 0.0);
    for a in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for b in 0..n {
            row += k1.at(a, b) * k2.at(b, a);
        }
        raw += row;
    }
    let h = k1.axis().step;
    finish(raw * h * h, Route::Direct, 1.0)
}

/// `∫∫ f₁(x, y) f₂(-x, -y) dx dy` without normalization.
pub fn char_overlap(cf1: &CharFunction, cf2: &CharFunction) -> Result<Complex64> {
    if !cf1.x_axis().approx_eq(cf2.x_axis()) || !cf1.y_axis().approx_eq(cf2.y_axis()) {
        return Err(mismatch!("characteristic functions on different grids"));
    }
    let m = cf1.x_axis().count;
    let mut raw = Complex64::new(0.0, 0.0);
    // Index 0 has no mirrored partner on a symmetric grid.
    for i in 1..m {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 1..m {
            row += cf1.at(i, j) * cf2.at(m - i, m - j);
        }
        raw += row;
    }
    Ok(raw * cf1.x_axis().step * cf1.y_axis().step)
}

pub fn transition_char(cf1: &CharFunction, cf2: &CharFunction) -> Result<TransitionResult> {
    finish(char_overlap(cf1, cf2)?, Route::Characteristic, CHAR_ROUTE_NORMALIZATION)
}

/// `∫₀^π dα ∫ |λ| g₁(λ) g₂(-λ) dλ` with `g_i` the slices recovered from the
/// tomograms. The `|λ|` kink at the origin gets its Euler–Maclaurin weight.
pub fn tomographic_overlap(t1: &Tomogram, t2: &Tomogram) -> Result<Complex64> {
    if !t1.x_axis().approx_eq(t2.x_axis()) || t1.angles() != t2.angles() {
        return Err(mismatch!("tomograms on different grids"));
    }
    let k = t1.angles().len();
    if k < MIN_TOMOGRAPHIC_ANGLES {
        return Err(invalid!("tomographic route needs at least {MIN_TOMOGRAPHIC_ANGLES} angles, got {k}"));
    }
    if t1.angles().iter().any(|&a| a >= PI) {
        return Err(invalid!("tomographic route integrates over angles in [0, π)"));
    }
    let mut raw = Complex64::new(0.0, 0.0);
    for i in 0..k {
        let (g1, g2) = (padded_slice(t1, i), padded_slice(t2, i));
        let (axis, m) = (g1.t_axis, g1.t_axis.count);
        let dl = axis.step;
        let centre = m / 2;
        let mut acc = g1.values[centre] * g2.values[centre] * (dl * dl / 6.0);
        for j in 1..m {
            if j != centre {
                acc += g1.values[j] * g2.values[m - j] * (axis.coord(j).abs() * dl);
            }
        }
        raw += acc;
    }
    Ok(raw * (PI / k as f64))
}

pub fn transition_tomographic(t1: &Tomogram, t2: &Tomogram) -> Result<TransitionResult> {
    finish(tomographic_overlap(t1, t2)?, Route::Tomographic, CHAR_ROUTE_NORMALIZATION)
}

/// Outcome of the vacuum-pair normalization calibration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub extent: f64,
    pub count: usize,
    /// `transition_direct / raw overlap` for the vacuum pair.
    pub ratio: f64,
    /// Candidate the ratio snapped to.
    pub constant: f64,
}

/// Candidate normalizations: none, or one factor of `1/(2π)`.
pub const CANDIDATES: [f64; 2] = [1.0, 1.0 / (2.0 * PI)];

/// Measures the normalization on the vacuum pair and snaps it to the nearest
/// candidate within 1%.
pub fn calibrate(extent: f64, count: usize) -> Result<Calibration> {
    let k = pure_kernel(&fock_state(0, make_axis(extent, count)?)?);
    let direct = transition_direct(&k, &k)?.value;
    let cf = char_from_kernel(&k)?;
    let ratio = direct / char_overlap(&cf, &cf)?.re;
    let constant = CANDIDATES
        .into_iter()
        .find(|c| (ratio / c - 1.0).abs() < 0.01)
        .ok_or_else(|| contract!("calibration ratio {ratio} matches no candidate"))?;
    Ok(Calibration {
        extent,
        count,
        ratio,
        constant,
    })
}
