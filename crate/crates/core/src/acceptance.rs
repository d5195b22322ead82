//! The acceptance suite: every criterion evaluated at its stated tolerance.
//! Shared by the `acceptance` test target and the `selftest` command.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fidelity::{calibrate, transition_char, transition_direct, transition_tomographic, CHAR_ROUTE_NORMALIZATION};
use crate::format::{encode_qtf, encode_qtg};
use crate::grid::{continuous_ft, integrate, make_axis, relative_l2, Axis, Direction, SampledField};
use crate::sobolev::{membership_report, membership_report_analytic, refined_axis, v_gate, Verdict};
use crate::states::{box_state, coherent_state, fock_state, mix, pure_kernel, DensityKernel, PureState};
use crate::tomography::{
    default_angles, kernel_from_tomogram, tomogram_from_char, tomogram_from_rotated_kernel, tomogram_from_wigner, Tomogram,
};
use crate::transforms::{char_from_kernel, frft, kernel_from_char, wigner_from_char, wigner_from_kernel};

/// Grid and angle settings the criteria are stated for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rig {
    pub extent: f64,
    pub count: usize,
    pub angles: usize,
}

impl Default for Rig {
    fn default() -> Self {
        Self {
            extent: 8.0,
            count: 256,
            angles: 64,
        }
    }
}

impl Rig {
    pub fn axis(&self) -> Axis {
        make_axis(self.extent, self.count).expect("valid rig")
    }
}

/// One measured quantity against its bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    /// `measured / bound` for tolerance checks.
    pub load: Option<f64>,
    pub detail: String,
}

impl Check {
    /// Passes when `value < bound`.
    pub fn below(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            label: label.into(),
            passed: value < bound,
            load: Some(value / bound),
            detail: format!("{value:.3e} < {bound:.0e}"),
        }
    }

    pub fn holds(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            passed,
            load: None,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    /// The first failing check, or else the one closest to its bound.
    pub fn headline(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed).or_else(|| {
            self.checks
                .iter()
                .filter(|c| c.load.is_some())
                .max_by(|a, b| a.load.unwrap_or(0.0).total_cmp(&b.load.unwrap_or(0.0)))
                .or(self.checks.first())
        })
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{mark} criterion {} ({}): ", self.id, self.title)?;
        if let Some(e) = &self.error {
            return write!(f, "error: {e}");
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{}/{} checks", self.checks.len() - failed, self.checks.len())?;
        if let Some(c) = self.headline() {
            let tag = if c.passed { "tightest" } else { "failed" };
            write!(f, "; {tag}: {} {}", c.label, c.detail)?;
        }
        Ok(())
    }
}

pub const CRITERIA: [(usize, &str); 9] = [
    (1, "Fourier infrastructure"),
    (2, "kernel/characteristic roundtrip"),
    (3, "tomogram route equivalence"),
    (4, "tomograms of rotated pure states"),
    (5, "Gaussian closed forms"),
    (6, "tomographic reconstruction"),
    (7, "transition probabilities"),
    (8, "Sobolev diagnostics"),
    (9, "determinism across thread counts"),
];

pub fn run(id: usize, rig: &Rig) -> CriterionReport {
    let title = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    let outcome = match id {
        1 => fourier(rig),
        2 => baker(rig),
        3 => routes(rig),
        4 => rotated_states(rig),
        5 => gaussians(rig),
        6 => reconstruction(rig),
        7 => transitions(rig),
        8 => regularity(rig),
        9 => determinism(),
        _ => Ok(Vec::new()),
    };
    let (checks, error) = match outcome {
        Ok(c) => (c, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    CriterionReport { id, title, checks, error }
}

pub fn run_all(rig: &Rig) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|(id, _)| run(*id, rig)).collect()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sup(a: impl IntoIterator<Item = f64>) -> f64 {
    a.into_iter().fold(0.0, f64::max)
}

fn fock_kernel(m: usize, axis: Axis) -> Result<DensityKernel> {
    Ok(pure_kernel(&fock_state(m, axis)?))
}

fn coherent_kernel(alpha: Complex64, axis: Axis) -> Result<DensityKernel> {
    Ok(pure_kernel(&coherent_state(alpha, axis)?))
}

fn even_mixture(axis: Axis) -> Result<DensityKernel> {
    mix(&[(0.5, &fock_kernel(0, axis)?), (0.5, &fock_kernel(1, axis)?)])
}

fn l2_sq(f: &SampledField) -> f64 {
    f.data().iter().map(|z| z.norm_sqr()).sum::<f64>() * f.cell_volume()
}

fn fourier(rig: &Rig) -> Result<Vec<Check>> {
    let axis = rig.axis();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checks = Vec::new();
    let noise = |rng: &mut ChaCha8Rng| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    let f1 = SampledField::from_fn(vec![axis], |_| noise(&mut rng))?;
    let f2 = SampledField::from_fn(vec![axis, make_axis(5.0, 96)?], |_| noise(&mut rng))?;
    for (name, f) in [("1-D", &f1), ("2-D", &f2)] {
        let dims: Vec<usize> = (0..f.ndim()).collect();
        let back = continuous_ft(&continuous_ft(f, &dims, Direction::Forward)?, &dims, Direction::Inverse)?;
        checks.push(Check::below(
            format!("roundtrip of a random {name} field"),
            relative_l2(back.data(), f.data()),
            1e-12,
        ));
    }
    let fields = [
        fock_state(3, axis)?.to_field(),
        coherent_state(c(1.0, 0.5), axis)?.to_field(),
        coherent_kernel(c(0.4, -0.3), axis)?.to_field(),
    ];
    for f in &fields {
        let dims: Vec<usize> = (0..f.ndim()).collect();
        let ft = continuous_ft(f, &dims, Direction::Forward)?;
        let lhs = (2.0 * PI).powi(f.ndim() as i32) * l2_sq(&ft);
        checks.push(Check::below(
            format!("Plancherel identity ({}-D)", f.ndim()),
            (lhs / l2_sq(f) - 1.0).abs(),
            1e-10,
        ));
    }
    let a = 1.3;
    let gauss = |shift: f64| {
        SampledField::from_fn(vec![axis], |p| c((-(p[0] - shift).powi(2) / 2.0).exp(), 0.0))
    };
    let base = continuous_ft(&gauss(0.0)?, &[0], Direction::Forward)?;
    let moved = continuous_ft(&gauss(a)?, &[0], Direction::Forward)?;
    let err = sup(base
        .data()
        .iter()
        .zip(moved.data())
        .enumerate()
        .map(|(k, (b, m))| (m - b * Complex64::from_polar(1.0, -a * base.axes()[0].coord(k))).norm()));
    checks.push(Check::below("translation phase law", err, 1e-10));
    Ok(checks)
}

fn baker(rig: &Rig) -> Result<Vec<Check>> {
    let axis = rig.axis();
    let mut family: Vec<(String, DensityKernel)> = Vec::new();
    for m in 0..=3 {
        family.push((format!("Fock {m}"), fock_kernel(m, axis)?));
    }
    for alpha in [c(1.0, 0.0), c(1.0, 0.5)] {
        family.push((format!("coherent {alpha}"), coherent_kernel(alpha, axis)?));
    }
    family
        .iter()
        .map(|(name, k)| {
            let back = kernel_from_char(&char_from_kernel(k)?)?;
            Ok(Check::below(name.clone(), relative_l2(back.rho(), k.rho()), 1e-6))
        })
        .collect()
}

fn route_family(axis: Axis) -> Result<Vec<(String, DensityKernel)>> {
    let mut family = Vec::new();
    for m in 0..=5 {
        family.push((format!("Fock {m}"), fock_kernel(m, axis)?));
    }
    family.push(("coherent 1".into(), coherent_kernel(c(1.0, 0.0), axis)?));
    family.push(("mixture ½|0⟩+½|1⟩".into(), even_mixture(axis)?));
    Ok(family)
}

fn max_normalization_error(t: &Tomogram) -> f64 {
    sup((0..t.angles().len()).map(|i| (t.normalization(i) - 1.0).abs()))
}

fn routes(rig: &Rig) -> Result<Vec<Check>> {
    let axis = rig.axis();
    let angles = default_angles(rig.angles);
    let turned: Vec<f64> = angles.iter().map(|a| a + PI).collect();
    let mut checks = Vec::new();
    for (name, k) in route_family(axis)? {
        let cf = char_from_kernel(&k)?;
        let by_char = tomogram_from_char(&cf, &angles)?;
        let by_wigner = tomogram_from_wigner(&wigner_from_char(&cf)?, &angles)?;
        let by_rotation = tomogram_from_rotated_kernel(&k, &angles)?;
        checks.push(Check::below(format!("{name}: char vs wigner"), by_char.max_abs_diff(&by_wigner)?, 1e-3));
        checks.push(Check::below(format!("{name}: char vs rotation"), by_char.max_abs_diff(&by_rotation)?, 1e-3));
        checks.push(Check::below(format!("{name}: wigner vs rotation"), by_wigner.max_abs_diff(&by_rotation)?, 1e-3));
        for (route, t) in [("char", &by_char), ("wigner", &by_wigner), ("rotation", &by_rotation)] {
            checks.push(Check::below(format!("{name}: ∫ω dx = 1 ({route})"), max_normalization_error(t), 1e-6));
        }
        let opposite = tomogram_from_char(&cf, &turned)?;
        let n = axis.count;
        let sym = sup((0..angles.len()).flat_map(|i| {
            let (a, b) = (by_char.row(i), opposite.row(i));
            (1..n).map(move |x| (b[x] - a[n - x]).abs())
        }));
        checks.push(Check::below(format!("{name}: ω(x, α+π) = ω(-x, α)"), sym, 1e-6));
    }
    Ok(checks)
}

fn rotated_states(rig: &Rig) -> Result<Vec<Check>> {
    let axis = rig.axis();
    let angles = default_angles(8);
    let mut checks = Vec::new();
    for m in 0..=3 {
        let psi = fock_state(m, axis)?;
        let tom = tomogram_from_char(&char_from_kernel(&pure_kernel(&psi))?, &angles)?;
        let mut worst: f64 = 0.0;
        for (i, &alpha) in angles.iter().enumerate() {
            let rotated: PureState = frft(&psi, alpha)?;
            for (w, z) in tom.row(i).iter().zip(rotated.psi()) {
                worst = worst.max((w - z.norm_sqr()).abs());
            }
        }
        checks.push(Check::below(format!("Fock {m}: ω vs |F_α ψ|²"), worst, 1e-6));
    }
    Ok(checks)
}

fn gaussians(rig: &Rig) -> Result<Vec<Check>> {
    let axis = rig.axis();
    let vacuum = fock_kernel(0, axis)?;
    let angles = default_angles(rig.angles);
    let oracle = |x: f64| (-x * x).exp() / PI.sqrt();
    let mut checks = Vec::new();
    let cf = char_from_kernel(&vacuum)?;
    for (route, tom) in [
        ("char", tomogram_from_char(&cf, &angles)?),
        ("rotation", tomogram_from_rotated_kernel(&vacuum, &angles)?),
    ] {
        let err = sup((0..angles.len()).flat_map(|i| {
            let row = tom.row(i).to_vec();
            axis.coords().zip(row).map(move |(x, w)| (w - oracle(x)).abs())
        }));
        checks.push(Check::below(format!("vacuum tomogram ({route})"), err, 1e-6));
    }
    let w = wigner_from_char(&cf)?;
    let mut err: f64 = 0.0;
    for (i, q) in w.q_axis().coords().enumerate() {
        for (j, p) in w.p_axis().coords().enumerate() {
            err = err.max((w.at(i, j) - 2.0 * (-(q * q + p * p)).exp()).norm());
        }
    }
    checks.push(Check::below("vacuum Wigner function", err, 1e-6));
    let mut family = route_family(axis)?;
    family.push(("coherent 1+0.5i".into(), coherent_kernel(c(1.0, 0.5), axis)?));
    for (name, k) in family {
        let w = wigner_from_kernel(&k)?;
        checks.push(Check::below(format!("{name}: ∫∫W = 2π"), (w.integral() - 2.0 * PI).norm(), 1e-6));
    }
    Ok(checks)
}

fn reconstruction(rig: &Rig) -> Result<Vec<Check>> {
    let axis = rig.axis();
    let angles = default_angles(rig.angles);
    let mut family: Vec<(String, DensityKernel)> = Vec::new();
    for m in 0..=3 {
        family.push((format!("Fock {m}"), fock_kernel(m, axis)?));
    }
    family.push(("mixture ½|0⟩+½|1⟩".into(), even_mixture(axis)?));
    let mut checks = Vec::new();
    for (name, k) in family {
        let tom = tomogram_from_char(&char_from_kernel(&k)?, &angles)?;
        let back = kernel_from_tomogram(&tom)?;
        checks.push(Check::below(format!("{name}: kernel"), relative_l2(back.rho(), k.rho()), 1e-2));
        checks.push(Check::below(format!("{name}: trace"), (back.trace() - 1.0).norm(), 1e-3));
    }
    Ok(checks)
}

/// The ten-state matrix for the transition-probability routes.
fn transition_family(axis: Axis) -> Result<Vec<(String, DensityKernel)>> {
    let mut family: Vec<(String, DensityKernel)> = Vec::new();
    for m in 0..=3 {
        family.push((format!("Fock {m}"), fock_kernel(m, axis)?));
    }
    for alpha in [c(0.5, 0.0), c(1.0, 0.0), c(1.0, 0.5), c(1.5, 0.0)] {
        family.push((format!("coherent {alpha}"), coherent_kernel(alpha, axis)?));
    }
    family.push(("mixture ½|0⟩+½|1⟩".into(), even_mixture(axis)?));
    let second = mix(&[(0.3, &fock_kernel(2, axis)?), (0.7, &coherent_kernel(c(0.5, 0.0), axis)?)])?;
    family.push(("mixture 0.3|2⟩+0.7|0.5⟩".into(), second));
    Ok(family)
}

fn transitions(rig: &Rig) -> Result<Vec<Check>> {
    let axis = rig.axis();
    let mut checks = Vec::new();
    let coarse = calibrate(rig.extent, rig.count / 2)?;
    let fine = calibrate(rig.extent, rig.count)?;
    for cal in [&coarse, &fine] {
        checks.push(Check::holds(
            format!("calibration at {} nodes", cal.count),
            cal.constant == CHAR_ROUTE_NORMALIZATION,
            format!("ratio {:.9} snaps to {:.9}", cal.ratio, cal.constant),
        ));
    }
    checks.push(Check::below(
        "calibration stability across resolutions",
        (coarse.ratio / fine.ratio - 1.0).abs(),
        1e-3,
    ));
    let family = transition_family(axis)?;
    let angles = default_angles(rig.angles);
    let cfs = family.iter().map(|(_, k)| char_from_kernel(k)).collect::<Result<Vec<_>>>()?;
    let toms = cfs.iter().map(|cf| tomogram_from_char(cf, &angles)).collect::<Result<Vec<_>>>()?;
    let (mut char_err, mut tomo_err): (f64, f64) = (0.0, 0.0);
    for i in 0..family.len() {
        for j in 0..family.len() {
            let d = transition_direct(&family[i].1, &family[j].1)?.value;
            char_err = char_err.max((d - transition_char(&cfs[i], &cfs[j])?.value).abs());
            tomo_err = tomo_err.max((d - transition_tomographic(&toms[i], &toms[j])?.value).abs());
        }
    }
    checks.push(Check::below("|direct - characteristic| over the matrix", char_err, 1e-6));
    checks.push(Check::below("|direct - tomographic| over the matrix", tomo_err, 5e-3));
    let vacuum = fock_kernel(0, axis)?;
    for alpha in [c(0.5, 0.0), c(1.0, 0.0), c(1.0, 0.5), c(0.0, -1.2), c(1.5, 0.0)] {
        let p = transition_direct(&vacuum, &coherent_kernel(alpha, axis)?)?.value;
        checks.push(Check::below(
            format!("|⟨0|{alpha}⟩|² = e^(-|α|²)"),
            (p - (-alpha.norm_sqr()).exp()).abs(),
            1e-7,
        ));
    }
    Ok(checks)
}

fn regularity(rig: &Rig) -> Result<Vec<Check>> {
    let axis = rig.axis();
    let mut checks = Vec::new();
    for m in 0..=5 {
        let (pass, direct, transformed) = v_gate(&fock_kernel(m, axis)?)?;
        checks.push(Check::holds(
            format!("Fock {m} kernel stable at ν = 2"),
            direct.verdict == Verdict::Stable && direct.fourier_verdict == Verdict::Stable && pass,
            format!("direct {:?}, Fourier {:?}", direct.verdict, direct.fourier_verdict),
        ));
        checks.push(Check::holds(
            format!("Fock {m}: identical verdicts for the kernel and its transform"),
            direct.verdict == transformed.fourier_verdict && direct.fourier_verdict == transformed.verdict,
            format!("transform: direct {:?}, Fourier {:?}", transformed.verdict, transformed.fourier_verdict),
        ));
    }
    let boxed = membership_report(&box_state(1.0, axis)?.to_field(), 2.0, 3)?;
    checks.push(Check::holds(
        "box state diverges at ν = 2 (fixed extent)",
        boxed.verdict == Verdict::Diverging && boxed.growth_ratio > 1.5,
        format!("{:?}, growth ratio {:.3}", boxed.verdict, boxed.growth_ratio),
    ));
    let base = make_axis(rig.extent, rig.count / 4)?;
    let widening = membership_report_analytic(|k| Ok(box_state(1.0, refined_axis(&base, k)?)?.to_field()), 2.0, 3)?;
    checks.push(Check::holds(
        "box state diverges at ν = 2 (growing extent)",
        widening.verdict == Verdict::Diverging && widening.growth_ratio > 1.5,
        format!("{:?}, growth ratio {:.3}", widening.verdict, widening.growth_ratio),
    ));
    Ok(checks)
}

/// Named artifact bytes from a fixed small pipeline.
pub fn determinism_artifacts() -> Result<Vec<(String, Vec<u8>)>> {
    let axis = make_axis(8.0, 128)?;
    let kernel = mix(&[(0.6, &fock_kernel(2, axis)?), (0.4, &coherent_kernel(c(0.7, -0.4), axis)?)])?;
    let angles = default_angles(16);
    let cf = char_from_kernel(&kernel)?;
    let w = wigner_from_char(&cf)?;
    let by_char = tomogram_from_char(&cf, &angles)?;
    let by_wigner = tomogram_from_wigner(&w, &angles)?;
    let by_rotation = tomogram_from_rotated_kernel(&kernel, &angles)?;
    let back = kernel_from_tomogram(&by_char)?;
    let rotated = frft(&fock_state(3, axis)?, 0.7)?;
    let fid = format!(
        "{:?}\n{:?}\n{:?}\n",
        transition_direct(&kernel, &back)?.value,
        transition_char(&cf, &cf)?.value,
        transition_tomographic(&by_char, &by_wigner)?.value,
    );
    let total = integrate(w.field());
    Ok(vec![
        ("kernel.qtf".into(), encode_qtf(&kernel.to_field())),
        ("char.qtf".into(), encode_qtf(cf.field())),
        ("wigner.qtf".into(), encode_qtf(w.field())),
        ("tomogram_char.qtg".into(), encode_qtg(&by_char)),
        ("tomogram_wigner.qtg".into(), encode_qtg(&by_wigner)),
        ("tomogram_rotate.qtg".into(), encode_qtg(&by_rotation)),
        ("reconstructed.qtf".into(), encode_qtf(&back.to_field())),
        ("frft.qtf".into(), encode_qtf(&rotated.to_field())),
        ("fidelity.txt".into(), format!("{fid}{:?}\n", total.re).into_bytes()),
    ])
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| crate::error::Error::Contract(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn determinism() -> Result<Vec<Check>> {
    let single = in_pool(1, determinism_artifacts)??;
    let mut checks = Vec::new();
    for threads in [4, 1] {
        let other = in_pool(threads, determinism_artifacts)??;
        for ((name, a), (_, b)) in single.iter().zip(&other) {
            checks.push(Check::holds(
                format!("{name}: 1 vs {threads} threads"),
                a == b,
                format!("{} bytes", a.len()),
            ));
        }
    }
    Ok(checks)
}
