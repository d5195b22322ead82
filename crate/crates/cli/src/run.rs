use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use log::warn;
use qtomo_core::acceptance::{determinism_artifacts, run_all, Rig};
use qtomo_core::fidelity::{transition_char, transition_direct, transition_tomographic, CHAR_ROUTE_NORMALIZATION};
use qtomo_core::format::{self, Artifact};
use qtomo_core::grid::{make_axis, relative_l2, Axis};
use qtomo_core::sobolev::{membership_report, v_gate};
use qtomo_core::states::{box_state, coherent_state, fock_state, mix, mix_signed, pure_kernel};
use qtomo_core::tomography::{
    char_from_tomogram, default_angles, kernel_from_tomogram, tomogram_from_char, tomogram_from_rotated_kernel,
    tomogram_from_wigner, IMAG_TOL,
};
use qtomo_core::transforms::{char_from_kernel, char_from_wigner, frft, kernel_from_char, wigner_from_char};
use qtomo_core::{CharFunction, DensityKernel, Error, PureState, SampledField, Tomogram, TransitionResult, WignerFunction};
use serde_json::json;

use crate::app::{
    Cli, Command, FidelityArgs, FidelityRoute, InputKind, MapArgs, OutputArgs, ReconstructArgs, RegularityArgs,
    StateKind, TomogramArgs, TomogramRoute,
};

/// Failure classes, each with its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(Error),
    Selftest(usize),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(Error::InvalidArgument(_) | Error::AxisMismatch(_)) => 2,
            Failure::Core(Error::Io(_) | Error::Format(_)) => 3,
            Failure::Core(Error::Contract(_)) | Failure::Selftest(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Selftest(n) => write!(f, "{n} acceptance criteria failed"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

/// Provenance lines on stderr: command line, grid, tolerances and any
/// normalization in effect.
fn header(grid: Option<&Axis>, extra: &[(&str, String)]) {
    eprintln!("# qtomo {}", env!("CARGO_PKG_VERSION"));
    eprintln!("# command: {}", std::env::args().collect::<Vec<_>>().join(" "));
    if let Some(a) = grid {
        eprintln!(
            "# grid: extent {} count {} (min {}, step {})",
            a.extent(),
            a.count,
            a.min,
            a.step
        );
    }
    eprintln!("# tolerances: imaginary residue {IMAG_TOL:e}");
    for (k, v) in extra {
        eprintln!("# {k}: {v}");
    }
}

fn emit(value: serde_json::Value) {
    println!("{value}");
}

enum Loaded {
    State(PureState),
    Kernel(DensityKernel),
    Char(CharFunction),
    Wigner(WignerFunction),
    Tomogram(Tomogram),
}

impl Loaded {
    fn position_axis(&self) -> Axis {
        match self {
            Loaded::State(s) => *s.axis(),
            Loaded::Kernel(k) => *k.axis(),
            Loaded::Char(c) => c.position_axis(),
            Loaded::Wigner(w) => w.position_axis(),
            Loaded::Tomogram(t) => *t.x_axis(),
        }
    }

    fn kernel(&self) -> Outcome<DensityKernel> {
        Ok(match self {
            Loaded::State(s) => pure_kernel(s),
            Loaded::Kernel(k) => k.clone(),
            Loaded::Char(c) => kernel_from_char(c)?,
            Loaded::Wigner(w) => kernel_from_char(&char_from_wigner(w)?)?,
            Loaded::Tomogram(t) => kernel_from_tomogram(t)?,
        })
    }

    fn char(&self) -> Outcome<CharFunction> {
        Ok(match self {
            Loaded::Char(c) => c.clone(),
            Loaded::Wigner(w) => char_from_wigner(w)?,
            Loaded::Tomogram(t) => char_from_tomogram(t)?,
            other => char_from_kernel(&other.kernel()?)?,
        })
    }

    fn wigner(&self) -> Outcome<WignerFunction> {
        Ok(match self {
            Loaded::Wigner(w) => w.clone(),
            other => wigner_from_char(&other.char()?)?,
        })
    }
}

fn load(path: &Path, from: InputKind) -> Outcome<Loaded> {
    let field = match format::read(path)? {
        Artifact::Tomogram(t) => return Ok(Loaded::Tomogram(t)),
        Artifact::Field(f) => f,
    };
    Ok(match from {
        InputKind::Auto => match field.axes() {
            [_] => Loaded::State(PureState::from_field(&field)?),
            [a, b] if a.approx_eq(b) => Loaded::Kernel(DensityKernel::from_field(&field)?),
            _ => {
                return Err(Failure::Usage(format!(
                    "{}: 2-D field on unequal axes; pass --from char or --from wigner",
                    path.display()
                )))
            }
        },
        InputKind::State => Loaded::State(PureState::from_field(&field)?),
        InputKind::Kernel => Loaded::Kernel(DensityKernel::from_field(&field)?),
        InputKind::Char => Loaded::Char(CharFunction::from_field(field)?),
        InputKind::Wigner => Loaded::Wigner(WignerFunction::from_field(field)?),
    })
}

fn write_field(out: &OutputArgs, field: &SampledField) -> Outcome {
    format::write_qtf(&out.output, field)?;
    if let Some(csv) = &out.csv {
        format::write_field_csv(BufWriter::new(File::create(csv)?), field)?;
    }
    Ok(())
}

fn write_tomogram(path: &Path, csv: Option<&PathBuf>, tom: &Tomogram) -> Outcome {
    format::write_qtg(path, tom)?;
    if let Some(csv) = csv {
        format::write_tomogram_csv(BufWriter::new(File::create(csv)?), tom)?;
    }
    Ok(())
}

/// `dir/stem_suffix.ext` next to `path`.
fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

fn gate_warning(kernel: &DensityKernel) -> Outcome {
    let (pass, direct, _) = v_gate(kernel)?;
    if !pass {
        warn!(
            "kernel fails the regularity gate at ν = 2 (direct {:?}, Fourier {:?}); tomogram formulas may not apply",
            direct.verdict, direct.fourier_verdict
        );
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Outcome {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::State { kind } => state(kind),
        Command::Char(args) => map(args, |l| Ok(l.char()?.into_field())),
        Command::Wigner(args) => map(args, |l| Ok(l.wigner()?.into_field())),
        Command::Frft(args) => {
            let psi = match load(&args.input, InputKind::State)? {
                Loaded::State(s) => s,
                _ => return Err(Failure::Usage("frft acts on a 1-D state".into())),
            };
            header(Some(psi.axis()), &[("alpha", args.alpha.to_string())]);
            let out = frft(&psi, args.alpha)?;
            write_field(&args.out, &out.to_field())?;
            emit(json!({ "alpha": args.alpha, "norm": out.norm() }));
            Ok(())
        }
        Command::Tomogram(args) => tomogram(args),
        Command::Reconstruct(args) => reconstruct(args),
        Command::Fidelity(args) => fidelity(args),
        Command::Regularity(args) => regularity(args),
        Command::Selftest(args) => selftest(args.out.as_deref()),
    }
}

fn state(kind: &StateKind) -> Outcome {
    let (built, kernel, out) = match kind {
        StateKind::Fock { m, grid, kernel, out } => {
            (fock_state(*m, make_axis(grid.extent, grid.count)?)?, *kernel, out)
        }
        StateKind::Coherent { alpha, grid, kernel, out } => {
            (coherent_state(*alpha, make_axis(grid.extent, grid.count)?)?, *kernel, out)
        }
        StateKind::Box { halfwidth, grid, kernel, out } => {
            (box_state(*halfwidth, make_axis(grid.extent, grid.count)?)?, *kernel, out)
        }
        StateKind::Mix { parts, allow_negative, out } => return mixture(parts, *allow_negative, out),
    };
    header(Some(built.axis()), &[]);
    let k = pure_kernel(&built);
    if kernel {
        write_field(out, &k.to_field())?;
    } else {
        write_field(out, &built.to_field())?;
    }
    emit(json!({ "norm": built.norm(), "trace": k.trace().re }));
    Ok(())
}

fn mixture(parts: &[String], allow_negative: bool, out: &OutputArgs) -> Outcome {
    let mut kernels = Vec::with_capacity(parts.len());
    for p in parts {
        let (w, path) = p
            .split_once(':')
            .ok_or_else(|| Failure::Usage(format!("mixture part `{p}` is not WEIGHT:FILE")))?;
        let w: f64 = w
            .parse()
            .map_err(|_| Failure::Usage(format!("bad weight `{w}` in `{p}`")))?;
        kernels.push((w, load(Path::new(path), InputKind::Auto)?.kernel()?));
    }
    let refs: Vec<(f64, &DensityKernel)> = kernels.iter().map(|(w, k)| (*w, k)).collect();
    let mixed = if allow_negative { mix_signed(&refs)? } else { mix(&refs)? };
    header(Some(mixed.axis()), &[]);
    write_field(out, &mixed.to_field())?;
    emit(json!({ "trace": mixed.trace().re, "hermitian": mixed.is_hermitian() }));
    Ok(())
}

fn map(args: &MapArgs, f: impl Fn(&Loaded) -> Outcome<SampledField>) -> Outcome {
    let input = load(&args.input, args.from)?;
    header(Some(&input.position_axis()), &[]);
    let field = f(&input)?;
    write_field(&args.out, &field)?;
    emit(json!({ "output": args.out.output, "axes": field.axes() }));
    Ok(())
}

fn tomogram(args: &TomogramArgs) -> Outcome {
    if args.angles == 0 {
        return Err(Failure::Usage("--angles must be positive".into()));
    }
    let input = load(&args.input, args.from)?;
    header(Some(&input.position_axis()), &[("angles", args.angles.to_string())]);
    let angles = if args.full_circle {
        default_angles(args.angles).into_iter().map(|a| 2.0 * a).collect()
    } else {
        default_angles(args.angles)
    };
    let kernel = input.kernel()?;
    gate_warning(&kernel)?;
    let by = |route: TomogramRoute| -> Outcome<Tomogram> {
        Ok(match route {
            TomogramRoute::Char => tomogram_from_char(&input.char()?, &angles)?,
            TomogramRoute::Wigner => tomogram_from_wigner(&input.wigner()?, &angles)?,
            TomogramRoute::Rotate => tomogram_from_rotated_kernel(&kernel, &angles)?,
            TomogramRoute::All => unreachable!("expanded by the caller"),
        })
    };
    if args.route != TomogramRoute::All {
        let tom = by(args.route)?;
        write_tomogram(&args.out.output, args.out.csv.as_ref(), &tom)?;
        emit(normalization_report(&tom, &args.out.output));
        return Ok(());
    }
    let mut toms = Vec::new();
    for (route, name) in [
        (TomogramRoute::Char, "char"),
        (TomogramRoute::Wigner, "wigner"),
        (TomogramRoute::Rotate, "rotate"),
    ] {
        let tom = by(route)?;
        let path = suffixed(&args.out.output, name);
        let csv = args.out.csv.as_ref().map(|c| suffixed(c, name));
        write_tomogram(&path, csv.as_ref(), &tom)?;
        emit(normalization_report(&tom, &path));
        toms.push((name, tom));
    }
    let mut worst: f64 = 0.0;
    for i in 0..toms.len() {
        for j in i + 1..toms.len() {
            let d = toms[i].1.max_abs_diff(&toms[j].1)?;
            worst = worst.max(d);
            emit(json!({ "pair": [toms[i].0, toms[j].0], "max_abs_diff": d }));
        }
    }
    emit(json!({ "max_pairwise_deviation": worst }));
    Ok(())
}

fn normalization_report(tom: &Tomogram, path: &Path) -> serde_json::Value {
    let worst = (0..tom.angles().len()).fold(0.0f64, |m, i| m.max((tom.normalization(i) - 1.0).abs()));
    json!({ "output": path, "angles": tom.angles().len(), "max_normalization_error": worst })
}

fn reconstruct(args: &ReconstructArgs) -> Outcome {
    let tom = match load(&args.input, InputKind::Auto)? {
        Loaded::Tomogram(t) => t,
        _ => return Err(Failure::Usage("reconstruct expects a QTG tomogram".into())),
    };
    header(Some(tom.x_axis()), &[("angles", tom.angles().len().to_string())]);
    let kernel = kernel_from_tomogram(&tom)?;
    gate_warning(&kernel)?;
    write_field(&args.out, &kernel.to_field())?;
    let mut report = json!({ "trace": kernel.trace().re, "hermitian": kernel.is_hermitian() });
    if let Some(reference) = &args.compare {
        let r = load(reference, InputKind::Auto)?.kernel()?;
        if !r.axis().approx_eq(kernel.axis()) {
            return Err(Failure::Core(Error::AxisMismatch("reference lives on another grid".into())));
        }
        report["relative_l2"] = json!(relative_l2(kernel.rho(), r.rho()));
    }
    emit(report);
    Ok(())
}

fn fidelity(args: &FidelityArgs) -> Outcome {
    let (a, b) = (load(&args.a, args.from)?, load(&args.b, args.from)?);
    let norm = CHAR_ROUTE_NORMALIZATION.to_string();
    let routes = match args.route {
        FidelityRoute::All => vec![FidelityRoute::Direct, FidelityRoute::Char, FidelityRoute::Tomo],
        r => vec![r],
    };
    header(
        Some(&a.position_axis()),
        &[("normalization_constant", if args.route == FidelityRoute::Direct { "1".into() } else { norm })],
    );
    let tomo = |l: &Loaded| -> Outcome<Tomogram> {
        Ok(match l {
            Loaded::Tomogram(t) => t.clone(),
            other => tomogram_from_char(&other.char()?, &default_angles(args.angles))?,
        })
    };
    let mut results: Vec<TransitionResult> = Vec::new();
    for r in routes {
        let result = match r {
            FidelityRoute::Direct => transition_direct(&a.kernel()?, &b.kernel()?)?,
            FidelityRoute::Char => transition_char(&a.char()?, &b.char()?)?,
            FidelityRoute::Tomo => transition_tomographic(&tomo(&a)?, &tomo(&b)?)?,
            FidelityRoute::All => unreachable!("expanded above"),
        };
        emit(json!(result));
        results.push(result);
    }
    if results.len() > 1 {
        for i in 0..results.len() {
            for j in i + 1..results.len() {
                emit(json!({
                    "pair": [results[i].route, results[j].route],
                    "deviation": (results[i].value - results[j].value).abs(),
                }));
            }
        }
    }
    Ok(())
}

fn regularity(args: &RegularityArgs) -> Outcome {
    let field = match format::read(&args.input)? {
        Artifact::Field(f) => f,
        Artifact::Tomogram(_) => return Err(Failure::Usage("regularity expects a QTF field".into())),
    };
    header(
        Some(&field.axes()[0]),
        &[("nu", args.nu.to_string()), ("refinements", args.refinements.to_string())],
    );
    let report = membership_report(&field, args.nu, args.refinements)?;
    emit(json!(report));
    Ok(())
}

fn selftest(out: Option<&Path>) -> Outcome {
    let rig = Rig::default();
    header(Some(&rig.axis()), &[("angles", rig.angles.to_string())]);
    let reports = run_all(&rig);
    for r in &reports {
        println!("{r}");
        for c in r.checks.iter().filter(|c| !c.passed) {
            println!("    failed: {} {}", c.label, c.detail);
        }
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        for (name, bytes) in determinism_artifacts()? {
            std::fs::write(dir.join(name), bytes)?;
        }
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        return Err(Failure::Selftest(failed));
    }
    Ok(())
}
