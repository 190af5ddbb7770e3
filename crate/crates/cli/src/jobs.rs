use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bse_core::io::{
    read_eigenvalues_file, read_matrix_market_file, write_eigenvalues_file, write_matrix_market_file, MmField,
    MmSymmetry,
};
use bse_core::spectra::{default_grid, SpectrumCurve};
use bse_core::{
    absorption_spectrum, dos_dominance, expand_full, pairing_defect, random_bse, residual_metrics, solve_complex,
    solve_oracle, solve_real, solve_tda, spectral_density, tda_gap_report, validate, BseError, BseOperator,
    Complex64, ComplexMatrix, DipoleData, FieldKind, PositiveEigensystem, DEFAULT_SYMMETRY_TOL,
};
use serde::Serialize;

use crate::{Cli, Command, CompareArgs, GenArgs, GenKind, InputArgs, KindArg, SolveArgs, SpectrumArgs, WhichVectors};

#[derive(Debug)]
pub enum JobError {
    /// Unreadable or malformed files, bad arguments.
    Io(String),
    /// Input does not satisfy the solver preconditions.
    Validation(String),
    /// A solver failed on validated input.
    Solver(String),
}

impl JobError {
    pub fn exit_code(&self) -> u8 {
        match self {
            JobError::Io(_) => 2,
            JobError::Validation(_) => 3,
            JobError::Solver(_) => 4,
        }
    }
}

impl fmt::Display for JobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JobError::Io(m) | JobError::Validation(m) | JobError::Solver(m) => f.write_str(m),
        }
    }
}

type JobResult<T> = Result<T, JobError>;

fn io_err(path: &Path) -> impl FnOnce(BseError) -> JobError + '_ {
    move |e| match e {
        BseError::Io(_) | BseError::Parse { .. } => JobError::Io(format!("{}: {e}", path.display())),
        other => JobError::Validation(format!("{}: {other}", path.display())),
    }
}

fn solver_err(e: BseError) -> JobError {
    JobError::Solver(e.to_string())
}

pub fn run(cli: Cli) -> JobResult<()> {
    let parallel = cli.parallel;
    with_threads(parallel, move || match cli.command {
        Command::Check(args) => check(&args),
        Command::Solve(args) => solve(&args, Solver::Complex),
        Command::SolveReal(args) => solve(&args, Solver::Real),
        Command::Tda(args) => solve(&args, Solver::Tda),
        Command::Oracle(args) => solve(&args, Solver::Oracle),
        Command::Compare(args) => compare(&args),
        Command::Spectrum(args) => spectrum(&args),
        Command::Gen(args) => gen(&args),
    })
}

#[cfg(feature = "parallel")]
fn with_threads<R: Send>(parallel: bool, job: impl FnOnce() -> R + Send) -> R {
    if parallel {
        return job();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(1).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<R: Send>(parallel: bool, job: impl FnOnce() -> R + Send) -> R {
    if parallel {
        eprintln!("warning: built without the `parallel` feature; running sequentially");
    }
    job()
}

fn input_paths(args: &InputArgs) -> JobResult<(PathBuf, PathBuf)> {
    match (&args.input, &args.a, &args.b) {
        (Some(dir), _, _) => Ok((dir.join("A.mtx"), dir.join("B.mtx"))),
        (None, Some(a), Some(b)) => Ok((a.clone(), b.clone())),
        _ => Err(JobError::Io("no input: pass --input DIR or both --a and --b".into())),
    }
}

fn load_operator(args: &InputArgs) -> JobResult<BseOperator> {
    let (pa, pb) = input_paths(args)?;
    let a = read_matrix_market_file(&pa).map_err(io_err(&pa))?;
    let b = read_matrix_market_file(&pb).map_err(io_err(&pb))?;
    if args.kind == KindArg::Real {
        for (p, m) in [(&pa, &a), (&pb, &b)] {
            if m.field == MmField::Complex {
                return Err(JobError::Validation(format!(
                    "{}: --kind real needs a real Matrix Market file",
                    p.display()
                )));
            }
        }
    }
    let op = match args.kind {
        KindArg::Auto => BseOperator::from_blocks(a.matrix, b.matrix),
        KindArg::Real => BseOperator::new(a.matrix, b.matrix, FieldKind::Real),
        KindArg::Complex => BseOperator::new(a.matrix, b.matrix, FieldKind::Complex),
    }
    .map_err(|e| JobError::Validation(e.to_string()))?;
    Ok(if args.symmetrize { op.symmetrized() } else { op })
}

/// Checks the preconditions of the full solvers; `tda` only needs `A` Hermitian.
fn require_valid(op: &BseOperator, definite: bool) -> JobResult<()> {
    let r = validate(op, DEFAULT_SYMMETRY_TOL);
    if !r.symmetry_ok {
        return Err(JobError::Validation(format!(
            "A must be Hermitian and B symmetric (relative defects {:e}, {:e}); --symmetrize projects onto that structure",
            r.sym_defects.0, r.sym_defects.1
        )));
    }
    if definite && !r.definiteness_ok {
        return Err(JobError::Validation(definiteness_message(&r)));
    }
    Ok(())
}

fn definiteness_message(r: &bse_core::ValidationReport) -> String {
    match r.failed_pivot {
        Some((index, pivot)) => format!(
            "[[A, B], [conj B, conj A]] is not positive definite: Cholesky pivot {pivot:e} at leading minor of order {} of its real embedding",
            index + 1
        ),
        None => "[[A, B], [conj B, conj A]] is not positive definite".into(),
    }
}

fn check(args: &InputArgs) -> JobResult<()> {
    let op = load_operator(args)?;
    let r = validate(&op, DEFAULT_SYMMETRY_TOL);
    println!("n: {}", op.n());
    println!(
        "symmetry: {} (relative defects: A {:e}, B {:e}; tolerance {:e})",
        if r.symmetry_ok { "ok" } else { "FAILED" },
        r.sym_defects.0,
        r.sym_defects.1,
        DEFAULT_SYMMETRY_TOL
    );
    if r.definiteness_ok {
        println!("definiteness: ok (smallest Cholesky pivot {:e})", r.margin);
    } else {
        println!("definiteness: FAILED ({})", definiteness_message(&r));
    }
    if r.ok() {
        Ok(())
    } else {
        Err(JobError::Validation("validation failed".into()))
    }
}

fn out_dir(path: &Path) -> JobResult<&Path> {
    fs::create_dir_all(path).map_err(|e| JobError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> JobResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| JobError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| JobError::Io(format!("{}: {e}", path.display())))
}

fn write_matrix(path: &Path, m: &ComplexMatrix) -> JobResult<()> {
    write_matrix_market_file(path, m, MmField::Complex, MmSymmetry::General).map_err(io_err(path))
}

fn write_curve(path: &Path, curve: &SpectrumCurve) -> JobResult<()> {
    let mut buf = Vec::new();
    curve.write_csv(&mut buf).map_err(io_err(path))?;
    fs::write(path, buf).map_err(|e| JobError::Io(format!("{}: {e}", path.display())))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Solver {
    Complex,
    Real,
    Tda,
    Oracle,
}

impl Solver {
    fn name(self) -> &'static str {
        match self {
            Solver::Complex => "solve",
            Solver::Real => "solve-real",
            Solver::Tda => "tda",
            Solver::Oracle => "oracle",
        }
    }
}

#[derive(Serialize)]
struct Metrics {
    command: &'static str,
    n: usize,
    kind: &'static str,
    /// `‖YᴴHX - Λ‖_F / ‖H‖_F`; for `tda`, `‖AZ - ZΛ‖_F / ‖A‖_F`.
    r1: Option<f64>,
    /// `‖YᴴX - I‖_F / √(2n)`; for `tda`, `‖ZᴴZ - I‖_F / √n`.
    r2: Option<f64>,
    normalization_defect: Option<f64>,
    pairing_defect: Option<f64>,
    eigenvalue_count: usize,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct Timing {
    command: &'static str,
    wall_seconds: f64,
}

fn kind_name(op: &BseOperator) -> &'static str {
    match op.kind() {
        FieldKind::Real => "real",
        FieldKind::Complex => "complex",
    }
}

fn solve(args: &SolveArgs, solver: Solver) -> JobResult<()> {
    let op = load_operator(&args.input)?;
    if solver == Solver::Oracle && args.emit_vectors {
        return Err(JobError::Io("oracle computes eigenvalues only; drop --emit-vectors".into()));
    }
    if solver == Solver::Real && op.kind() != FieldKind::Real {
        return Err(JobError::Validation("solve-real needs real A and B".into()));
    }
    require_valid(&op, solver != Solver::Tda)?;
    let out = out_dir(&args.out.out)?;
    let start = Instant::now();
    let n = op.n();
    let mut metrics = Metrics {
        command: solver.name(),
        n,
        kind: kind_name(&op),
        r1: None,
        r2: None,
        normalization_defect: None,
        pairing_defect: None,
        eigenvalue_count: 0,
        warnings: vec![],
    };
    let values = match solver {
        Solver::Complex | Solver::Real => {
            let pos = if solver == Solver::Complex { solve_complex(&op) } else { solve_real(&op) }.map_err(solver_err)?;
            let elapsed = start.elapsed().as_secs_f64();
            let full = expand_full(&op, &pos).map_err(solver_err)?;
            let (r1, r2) = residual_metrics(&op, &full).map_err(solver_err)?;
            metrics.r1 = Some(r1);
            metrics.r2 = Some(r2);
            metrics.normalization_defect = Some(pos.normalization_defect());
            metrics.warnings = pos.warnings.iter().map(|w| w.to_string()).collect();
            if args.emit_vectors {
                write_positive_vectors(out, &pos, args.which_eigenvectors)?;
            }
            write_timing(out, solver, elapsed)?;
            pos.lambda_plus
        }
        Solver::Tda => {
            let e = solve_tda(op.a()).map_err(solver_err)?;
            let elapsed = start.elapsed().as_secs_f64();
            let (r1, r2) = hermitian_metrics(op.a(), &e.values, &e.vectors);
            metrics.r1 = Some(r1);
            metrics.r2 = Some(r2);
            if args.emit_vectors {
                let names: &[&str] = match args.which_eigenvectors {
                    WhichVectors::Right => &["right.mtx"],
                    WhichVectors::Left => &["left.mtx"],
                    WhichVectors::Both => &["right.mtx", "left.mtx"],
                };
                for name in names {
                    write_matrix(&out.join(name), &e.vectors)?;
                }
            }
            write_timing(out, solver, elapsed)?;
            e.values
        }
        Solver::Oracle => {
            let v = solve_oracle(&op).map_err(solver_err)?;
            write_timing(out, solver, start.elapsed().as_secs_f64())?;
            metrics.pairing_defect = Some(pairing_defect(&v));
            v
        }
    };
    metrics.eigenvalue_count = values.len();
    let path = out.join("eigenvalues.csv");
    write_eigenvalues_file(&path, &values).map_err(io_err(&path))?;
    write_json(&out.join("metrics.json"), &metrics)?;
    for w in &metrics.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}: {} eigenvalues written to {}", solver.name(), values.len(), path.display());
    if let (Some(r1), Some(r2)) = (metrics.r1, metrics.r2) {
        println!("r1 = {r1:.3e}, r2 = {r2:.3e}");
    }
    Ok(())
}

fn write_timing(out: &Path, solver: Solver, wall_seconds: f64) -> JobResult<()> {
    write_json(
        &out.join("timing.json"),
        &Timing {
            command: solver.name(),
            wall_seconds,
        },
    )
}

fn write_positive_vectors(out: &Path, pos: &PositiveEigensystem, which: WhichVectors) -> JobResult<()> {
    let right = pos.right_vectors();
    if matches!(which, WhichVectors::Right | WhichVectors::Both) {
        write_matrix(&out.join("right.mtx"), &right)?;
    }
    if matches!(which, WhichVectors::Left | WhichVectors::Both) {
        let n = pos.n();
        let left = ComplexMatrix::from_fn(2 * n, n, |i, j| if i < n { right[(i, j)] } else { -right[(i, j)] });
        write_matrix(&out.join("left.mtx"), &left)?;
    }
    Ok(())
}

fn hermitian_metrics(a: &ComplexMatrix, values: &[f64], z: &ComplexMatrix) -> (f64, f64) {
    let n = a.rows();
    let az = a.matmul(z).expect("square");
    let mut r = 0.0;
    for (j, &l) in values.iter().enumerate() {
        for i in 0..n {
            r += (az[(i, j)] - z[(i, j)] * l).norm_sqr();
        }
    }
    let mut g = z.adjoint_matmul(z).expect("square");
    for i in 0..n {
        g[(i, i)] -= Complex64::new(1.0, 0.0);
    }
    let an = a.frobenius_norm();
    (
        if an > 0.0 { r.sqrt() / an } else { r.sqrt() },
        g.frobenius_norm() / (n.max(1) as f64).sqrt(),
    )
}

#[derive(Serialize)]
struct CompareReport {
    n: usize,
    kind: &'static str,
    max_abs_deviation: f64,
    max_rel_deviation: f64,
    oracle_pairing_defect: f64,
    tda_min_gap: f64,
    tda_max_relative_gap: f64,
    tda_bound_tolerance: f64,
    tda_bound_holds: bool,
    dos_dominance: bool,
}

fn compare(args: &CompareArgs) -> JobResult<()> {
    let op = load_operator(&args.input)?;
    require_valid(&op, true)?;
    let out = out_dir(&args.out.out)?;
    let n = op.n();
    let report = tda_gap_report(&op).map_err(solver_err)?;
    let oracle = solve_oracle(&op).map_err(solver_err)?;
    let lambda = &report.lambda_full;
    let dev: Vec<f64> = lambda.iter().zip(&oracle).map(|(x, y)| (x - y).abs()).collect();
    let max_abs = dev.iter().copied().fold(0.0, f64::max);
    let scale = lambda.first().copied().unwrap_or(1.0).abs().max(f64::MIN_POSITIVE);

    let mut csv = String::from("index,lambda,oracle,abs_deviation,tda,tda_gap\n");
    for j in 0..n {
        csv.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            j + 1,
            lambda[j],
            oracle[j],
            dev[j],
            report.lambda_tda[j],
            report.gaps[j]
        ));
    }
    let path = out.join("compare.csv");
    fs::write(&path, csv).map_err(|e| JobError::Io(format!("{}: {e}", path.display())))?;
    let summary = CompareReport {
        n,
        kind: kind_name(&op),
        max_abs_deviation: max_abs,
        max_rel_deviation: max_abs / scale,
        oracle_pairing_defect: pairing_defect(&oracle),
        tda_min_gap: report.min_gap,
        tda_max_relative_gap: report.max_relative_gap,
        tda_bound_tolerance: report.tolerance,
        tda_bound_holds: report.bound_holds,
        dos_dominance: dos_dominance(lambda, &report.lambda_tda).map_err(solver_err)?,
    };
    write_json(&out.join("compare.json"), &summary)?;
    println!("max |λ - λ_oracle| = {:.3e} ({:.3e} relative)", summary.max_abs_deviation, summary.max_rel_deviation);
    println!("oracle pairing defect = {:.3e}", summary.oracle_pairing_defect);
    println!(
        "TDA: min gap {:.3e} (bound {}), max relative gap {:.3}%",
        summary.tda_min_gap,
        if summary.tda_bound_holds { "holds" } else { "VIOLATED" },
        100.0 * summary.tda_max_relative_gap
    );
    println!("DOS dominance: {}", summary.dos_dominance);
    Ok(())
}

fn parse_grid(spec: &str) -> JobResult<Vec<f64>> {
    let bad = || JobError::Io(format!("--grid expects lo:hi:points, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let points: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi || points < 2 {
        return Err(bad());
    }
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points).map(|k| if k == points - 1 { hi } else { lo + step * k as f64 }).collect())
}

fn load_dipole(path: &Path, len: usize) -> JobResult<Vec<Complex64>> {
    let m = read_matrix_market_file(path).map_err(io_err(path))?.matrix;
    if m.cols() != 1 || m.rows() != len {
        return Err(JobError::Validation(format!(
            "{}: dipole must be a {len}x1 column, got {}x{}",
            path.display(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.into_vec())
}

fn spectrum(args: &SpectrumArgs) -> JobResult<()> {
    let (full, pos) = match &args.eigenvalues {
        Some(path) => {
            if args.dipole_r.is_some() {
                return Err(JobError::Io("absorption needs eigenvectors; pass the operator instead of --eigenvalues".into()));
            }
            let mut v = read_eigenvalues_file(path).map_err(io_err(path))?;
            if v.iter().all(|&x| x > 0.0) {
                let neg: Vec<f64> = v.iter().rev().map(|x| -x).collect();
                v.extend(neg);
            }
            (v, None)
        }
        None => {
            let op = load_operator(&args.input)?;
            require_valid(&op, true)?;
            let pos = solve_complex(&op).map_err(solver_err)?;
            let full = expand_full(&op, &pos).map_err(solver_err)?;
            (full.lambda, Some(pos))
        }
    };
    let grid = match &args.grid {
        Some(spec) => parse_grid(spec)?,
        None => default_grid(&full, args.sigma, args.grid_points).map_err(|e| JobError::Io(e.to_string()))?,
    };
    let out = out_dir(&args.out.out)?;
    let dos = spectral_density(&full, &grid, args.sigma).map_err(|e| JobError::Io(e.to_string()))?;
    write_curve(&out.join("dos.csv"), &dos)?;
    println!("dos: {} points written to {}", grid.len(), out.join("dos.csv").display());
    if let (Some(pos), Some(pr), Some(pl)) = (pos, &args.dipole_r, &args.dipole_l) {
        let len = 2 * pos.n();
        let dip = DipoleData::new(load_dipole(pr, len)?, load_dipole(pl, len)?).map_err(|e| JobError::Validation(e.to_string()))?;
        let abs = absorption_spectrum(&pos, &dip, &grid, args.sigma).map_err(solver_err)?;
        write_curve(&out.join("absorption.csv"), &abs.curve)?;
        println!(
            "absorption: written to {} (max |y_jᴴx_j - 1| = {:.3e})",
            out.join("absorption.csv").display(),
            abs.normalization_deviation
        );
    }
    Ok(())
}

fn gen(args: &GenArgs) -> JobResult<()> {
    if args.n == 0 {
        return Err(JobError::Io("--n must be at least 1".into()));
    }
    let kind = match args.kind {
        GenKind::Real => FieldKind::Real,
        GenKind::Complex => FieldKind::Complex,
    };
    let op = random_bse(args.n, args.seed, args.margin, kind).map_err(|e| JobError::Io(e.to_string()))?;
    let out = out_dir(&args.out.out)?;
    let (field, a_sym) = match kind {
        FieldKind::Real => (MmField::Real, MmSymmetry::Symmetric),
        FieldKind::Complex => (MmField::Complex, MmSymmetry::Hermitian),
    };
    let pa = out.join("A.mtx");
    let pb = out.join("B.mtx");
    write_matrix_market_file(&pa, op.a(), field, a_sym).map_err(io_err(&pa))?;
    write_matrix_market_file(&pb, op.b(), field, MmSymmetry::Symmetric).map_err(io_err(&pb))?;
    println!("gen: wrote {} and {}", pa.display(), pb.display());
    Ok(())
}
