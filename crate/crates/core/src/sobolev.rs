//! Grid-refinement diagnostics for Sobolev regularity.
//!
//! A single grid always yields a finite seminorm; membership is judged from
//! how the estimate moves as the grid is refined.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::grid::{continuous_ft, make_axis, Axis, Direction, SampledField};
use crate::states::DensityKernel;

/// Successive ratios within `1 ± STABLE_BAND` count as converged.
pub const STABLE_BAND: f64 = 0.05;

/// A final ratio above this counts as divergence.
pub const DIVERGENCE_RATIO: f64 = 1.5;

pub const MIN_REFINEMENTS: usize = 3;

/// Regularity order tested by [`v_gate`] for one physical dimension.
pub const V_NU: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Diverging,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport {
    pub nu: f64,
    /// `(grid count, seminorm)` in increasing count.
    pub norm_estimates: Vec<(usize, f64)>,
    /// Same, for the Fourier transform of each level.
    pub fourier_side_estimates: Vec<(usize, f64)>,
    pub verdict: Verdict,
    pub growth_ratio: f64,
    pub fourier_verdict: Verdict,
    pub fourier_growth_ratio: f64,
}

fn xi_sq(point: &[f64]) -> f64 {
    point.iter().map(|x| x * x).sum()
}

fn weighted_sum(ft: &SampledField, nu: f64, keep: impl Fn(f64) -> bool) -> f64 {
    let mut acc = 0.0;
    for (k, z) in ft.data().iter().enumerate() {
        let r2 = xi_sq(&ft.point(k));
        if keep(r2) {
            acc += r2.powf(nu) * z.norm_sqr();
        }
    }
    acc * ft.cell_volume()
}

fn forward(field: &SampledField) -> Result<SampledField> {
    let dims: Vec<usize> = (0..field.ndim()).collect();
    continuous_ft(field, &dims, Direction::Forward)
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(invalid!("order ν must be finite and non-negative, got {nu}"));
    }
    Ok(())
}

/// `∫ |ξ|^{2ν} |F[f](ξ)|² dξ`.
pub fn sobolev_seminorm(field: &SampledField, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok(weighted_sum(&forward(field)?, nu, |_| true))
}

/// The seminorm split into `|ξ| < 1` and `|ξ| ≥ 1` contributions.
pub fn seminorm_split(field: &SampledField, nu: f64) -> Result<(f64, f64)> {
    check_nu(nu)?;
    let ft = forward(field)?;
    Ok((weighted_sum(&ft, nu, |r2| r2 < 1.0), weighted_sum(&ft, nu, |r2| r2 >= 1.0)))
}

fn ratio(prev: f64, next: f64) -> f64 {
    if prev == 0.0 && next == 0.0 {
        1.0
    } else {
        next / prev
    }
}

fn judge(estimates: &[(usize, f64)]) -> (Verdict, f64) {
    let ratios: Vec<f64> = estimates.windows(2).map(|w| ratio(w[0].1, w[1].1)).collect();
    let last = *ratios.last().expect("at least two levels");
    let verdict = if ratios.iter().all(|r| (r - 1.0).abs() <= STABLE_BAND) {
        Verdict::Stable
    } else if last > DIVERGENCE_RATIO {
        Verdict::Diverging
    } else {
        Verdict::Inconclusive
    };
    (verdict, last)
}

fn report_from_levels(levels: &[SampledField], nu: f64) -> Result<RegularityReport> {
    let mut direct = Vec::with_capacity(levels.len());
    let mut fourier = Vec::with_capacity(levels.len());
    for f in levels {
        let count = f.axes()[0].count;
        direct.push((count, sobolev_seminorm(f, nu)?));
        fourier.push((count, sobolev_seminorm(&forward(f)?, nu)?));
    }
    let (verdict, growth_ratio) = judge(&direct);
    let (fourier_verdict, fourier_growth_ratio) = judge(&fourier);
    Ok(RegularityReport {
        nu,
        norm_estimates: direct,
        fourier_side_estimates: fourier,
        verdict,
        growth_ratio,
        fourier_verdict,
        fourier_growth_ratio,
    })
}

fn check_refinements(refinements: usize) -> Result<()> {
    if refinements < MIN_REFINEMENTS {
        return Err(invalid!("at least {MIN_REFINEMENTS} refinement levels are needed, got {refinements}"));
    }
    Ok(())
}

/// Every `stride`-th node along each axis; symmetric axes stay symmetric.
fn subsample(field: &SampledField, stride: usize) -> Result<SampledField> {
    let axes: Vec<Axis> = field
        .axes()
        .iter()
        .map(|a| {
            if a.count % stride != 0 || a.count / stride < 2 {
                return Err(invalid!("{} nodes cannot be coarsened by {stride}", a.count));
            }
            Axis::new(a.min, a.step * stride as f64, a.count / stride)
        })
        .collect::<Result<_>>()?;
    let data = match field.axes() {
        [_] => field.data().iter().step_by(stride).copied().collect(),
        [_, b] => field
            .data()
            .chunks(b.count)
            .step_by(stride)
            .flat_map(|row| row.iter().step_by(stride).copied())
            .collect(),
        _ => unreachable!("fields are 1-D or 2-D"),
    };
    SampledField::new(axes, data)
}

fn sampled_levels(field: &SampledField, refinements: usize) -> Result<Vec<SampledField>> {
    check_refinements(refinements)?;
    (0..refinements).rev().map(|k| subsample(field, 1 << k)).collect()
}

/// Refinement trend of a sampled field: the given grid is the finest level,
/// coarser levels keep every `2^k`-th node over the same extent.
pub fn membership_report(field: &SampledField, nu: f64, refinements: usize) -> Result<RegularityReport> {
    check_nu(nu)?;
    report_from_levels(&sampled_levels(field, refinements)?, nu)
}

/// Axis of refinement level `k`: count `× 2^k`, extent `× 2^{k/2}`.
pub fn refined_axis(base: &Axis, level: usize) -> Result<Axis> {
    make_axis(base.extent() * 2f64.powf(level as f64 / 2.0), base.count << level)
}

/// Refinement trend of an analytic field, resampled by `generator` on grids
/// whose resolution and bandwidth both grow (see [`refined_axis`]).
pub fn membership_report_analytic(
    generator: impl Fn(usize) -> Result<SampledField>,
    nu: f64,
    refinements: usize,
) -> Result<RegularityReport> {
    check_nu(nu)?;
    check_refinements(refinements)?;
    let levels = (0..refinements).map(generator).collect::<Result<Vec<_>>>()?;
    report_from_levels(&levels, nu)
}

/// Whether a kernel passes as a member of `W₂^{ν} ∩ F[W₂^{ν}]` at `ν = 2`.
/// Returns the reports for the kernel and for its Fourier transform, both
/// built on the same refinement levels.
pub fn v_gate(kernel: &DensityKernel) -> Result<(bool, RegularityReport, RegularityReport)> {
    v_gate_field(&kernel.to_field())
}

pub fn v_gate_field(field: &SampledField) -> Result<(bool, RegularityReport, RegularityReport)> {
    let levels = sampled_levels(field, MIN_REFINEMENTS)?;
    let direct = report_from_levels(&levels, V_NU)?;
    let spectra = levels.iter().map(forward).collect::<Result<Vec<_>>>()?;
    let transformed = report_from_levels(&spectra, V_NU)?;
    let pass = [direct.verdict, direct.fourier_verdict, transformed.verdict, transformed.fourier_verdict]
        .iter()
        .all(|v| *v == Verdict::Stable);
    Ok((pass, direct, transformed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{box_state, fock_state, mix, pure_kernel};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn rig() -> Axis {
        make_axis(8.0, 256).unwrap()
    }

    #[test]
    fn zeroth_order_is_plancherel() {
        let v = fock_state(0, rig()).unwrap().to_field();
        assert!((sobolev_seminorm(&v, 0.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-8);
        let b = box_state(1.5, rig()).unwrap().to_field();
        let ft = forward(&b).unwrap();
        let direct: f64 = ft.data().iter().map(|z| z.norm_sqr()).sum::<f64>() * ft.cell_volume();
        assert!((sobolev_seminorm(&b, 0.0).unwrap() - direct).abs() < 1e-14);
        assert!(sobolev_seminorm(&b, -1.0).is_err());
    }

    #[test]
    fn dilation_scales_the_zeroth_order() {
        let a = 2.0;
        let g = |s: f64| {
            SampledField::from_fn(vec![rig()], |p| Complex64::new((-(s * p[0]).powi(2) / 2.0).exp(), 0.0)).unwrap()
        };
        let (base, squeezed) = (sobolev_seminorm(&g(1.0), 0.0).unwrap(), sobolev_seminorm(&g(a), 0.0).unwrap());
        assert!((squeezed / base - 1.0 / a).abs() < 1e-6);
    }

    #[test]
    fn high_frequency_part_is_monotone_in_order() {
        let f = fock_state(3, rig()).unwrap().to_field();
        let mut prev = 0.0;
        for nu in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
            let (_, high) = seminorm_split(&f, nu).unwrap();
            assert!(high >= prev);
            prev = high;
        }
    }

    #[test]
    fn box_state_diverges() {
        let b = box_state(1.0, rig()).unwrap().to_field();
        let r = membership_report(&b, 2.0, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Diverging);
        assert!(r.growth_ratio > 1.5);
        let analytic =
            membership_report_analytic(|k| Ok(box_state(1.0, refined_axis(&rig(), k)?)?.to_field()), 2.0, 3).unwrap();
        assert_eq!(analytic.verdict, Verdict::Diverging);
        assert!(analytic.norm_estimates.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn smooth_kernels_are_stable() {
        for m in [0, 5] {
            let k = pure_kernel(&fock_state(m, rig()).unwrap());
            let r = membership_report(&k.to_field(), 2.0, 3).unwrap();
            assert_eq!((r.verdict, r.fourier_verdict), (Verdict::Stable, Verdict::Stable), "m={m}");
        }
        let base = make_axis(8.0, 64).unwrap();
        let analytic = membership_report_analytic(
            |k| Ok(pure_kernel(&fock_state(0, refined_axis(&base, k)?)?).to_field()),
            2.0,
            3,
        )
        .unwrap();
        assert_eq!(analytic.verdict, Verdict::Stable);
    }

    #[test]
    fn gate_decisions() {
        let fock = |m| pure_kernel(&fock_state(m, rig()).unwrap());
        assert!(v_gate(&fock(0)).unwrap().0);
        let mixed = mix(&[(0.5, &fock(1)), (0.5, &fock(2))]).unwrap();
        assert!(v_gate(&mixed).unwrap().0);
        let boxed = pure_kernel(&box_state(1.0, rig()).unwrap());
        assert!(!v_gate(&boxed).unwrap().0);
    }

    #[test]
    fn gate_is_fourier_invariant() {
        for k in [
            pure_kernel(&fock_state(0, rig()).unwrap()),
            pure_kernel(&fock_state(2, rig()).unwrap()),
            pure_kernel(&box_state(1.0, rig()).unwrap()),
        ] {
            let (_, direct, transformed) = v_gate(&k).unwrap();
            assert_eq!(direct.verdict, transformed.fourier_verdict);
            assert_eq!(direct.fourier_verdict, transformed.verdict);
        }
    }

    #[test]
    fn too_few_levels_is_an_error() {
        let f = fock_state(0, rig()).unwrap().to_field();
        assert!(membership_report(&f, 2.0, 2).is_err());
    }
}
