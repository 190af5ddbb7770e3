mod common;

use bse_core::*;
use common::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn scalar_op(a: Complex64, b: Complex64) -> BseOperator {
    BseOperator::from_blocks(ComplexMatrix::from_rows(&[&[a]]), ComplexMatrix::from_rows(&[&[b]])).unwrap()
}

#[test]
fn one_by_one_complex_residuals() {
    let op = scalar_op(c(2.0, 0.0), c(0.0, 1.0));
    let pos = solve_complex(&op).unwrap();
    let full = expand_full(&op, &pos).unwrap();
    let (r1, r2) = residual_metrics(&op, &full).unwrap();
    assert!(r1 <= 1e-14 && r2 <= 1e-14, "r1 {r1:e} r2 {r2:e}");
}

#[test]
fn random_complex_n32_residuals() {
    for seed in 0..3 {
        let op = random_bse(32, seed, 1.0, FieldKind::Complex).unwrap();
        let pos = solve_complex(&op).unwrap();
        let (r1, r2) = residual_metrics(&op, &expand_full(&op, &pos).unwrap()).unwrap();
        assert!(r1 <= 5e-14 && r2 <= 5e-14, "seed {seed}: r1 {r1:e} r2 {r2:e}");
    }
}

#[test]
fn strongly_coupled_instances_solve_accurately() {
    for seed in 0..4 {
        let op = tight_bse(20, 40 + seed);
        let pos = solve_complex(&op).unwrap();
        assert!(pos.residual_norm(&op) <= 1e-12 * h_norm2(&op));
        assert!(pos.normalization_defect() <= 1e-12 * 20.0);
        let oracle = solve_oracle(&op).unwrap();
        assert!(max_abs_diff(&pos.lambda_plus, &oracle[..20]) <= 1e-12 * h_norm2(&op));
    }
}

#[test]
fn real_solver_matches_complex_solver() {
    for seed in 0..5 {
        let op = random_bse(16, 60 + seed, 1.0, FieldKind::Real).unwrap();
        let r = solve_real(&op).unwrap();
        let z = solve_complex(&op).unwrap();
        assert!(max_abs_diff(&r.lambda_plus, &z.lambda_plus) <= 1e-12 * h_norm2(&op));
        assert!(r.residual_norm(&op) <= 1e-12 * h_norm2(&op));
        assert!(r.normalization_defect() <= 1e-12 * 16.0);
        assert!(r.x1.is_real() && r.x2.is_real());
    }
}

#[test]
fn tda_random_residual() {
    let op = random_bse(32, 77, 1.0, FieldKind::Complex).unwrap();
    let e = solve_tda(op.a()).unwrap();
    let az = op.a().matmul(&e.vectors).unwrap();
    let mut r = 0.0;
    for j in 0..32 {
        for i in 0..32 {
            r += (az[(i, j)] - e.vectors[(i, j)] * e.values[j]).norm_sqr();
        }
    }
    assert!(r.sqrt() <= 1e-13 * op.a().frobenius_norm());
    assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    let reference = hermitian_eigenvalues(op.a());
    assert!(max_abs_diff(&e.values, &reference) <= 1e-12 * reference[0].abs());
}

#[test]
fn oracle_spectrum_is_closed_under_negation() {
    for seed in 0..5 {
        let op = random_bse(16, 90 + seed, 1.0, FieldKind::Complex).unwrap();
        let v = solve_oracle(&op).unwrap();
        assert_eq!(v.len(), 32);
        assert!(pairing_defect(&v) <= 1e-12 * h_norm2(&op));
    }
}

#[test]
fn scaling_scales_every_eigenvalue() {
    let op = random_bse(12, 5, 1.0, FieldKind::Complex).unwrap();
    let base = solve_complex(&op).unwrap().lambda_plus;
    for s in [1e-3, 0.37, 8.0, 1e4] {
        let scaled = solve_complex(&op.scaled(s)).unwrap().lambda_plus;
        for (x, y) in base.iter().zip(&scaled) {
            assert!((y - s * x).abs() <= 1e-13 * s * x, "s = {s}");
        }
    }
}

#[test]
fn near_singular_spectrum_warns_but_solves() {
    let a = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(1e-10, 0.0)]);
    let op = BseOperator::from_blocks(a, ComplexMatrix::zeros(2, 2)).unwrap();
    let pos = solve_complex(&op).unwrap();
    assert!(matches!(pos.warnings.as_slice(), [SolverWarning::IllConditioned { .. }]));
    assert!((pos.lambda_plus[1] - 1e-10).abs() <= 1e-12);
    let well = solve_complex(&random_bse(4, 1, 1.0, FieldKind::Complex).unwrap()).unwrap();
    assert!(well.warnings.is_empty());
}

#[test]
fn definiteness_failures_name_the_matrix() {
    let op = scalar_op(c(1.0, 0.0), c(0.0, 2.0));
    for (result, want) in [
        (solve_complex(&op).map(|_| ()), FactorTarget::Embedding),
        (solve_oracle(&op).map(|_| ()), FactorTarget::Omega),
    ] {
        match result {
            Err(BseError::NotPositiveDefinite { target, .. }) => assert_eq!(target, want),
            other => panic!("expected a definiteness failure, got {other:?}"),
        }
    }
    let real = scalar_op(c(1.0, 0.0), c(-3.0, 0.0));
    assert!(matches!(
        solve_real(&real),
        Err(BseError::NotPositiveDefinite {
            target: FactorTarget::APlusB,
            ..
        })
    ));
}

#[test]
fn non_hermitian_input_is_rejected() {
    let a = ComplexMatrix::from_rows(&[&[c(3.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(3.0, 0.0)]]);
    let op = BseOperator::from_blocks(a, ComplexMatrix::zeros(2, 2)).unwrap();
    assert!(matches!(solve_complex(&op), Err(BseError::Structure(_))));
    assert!(solve_complex(&op.symmetrized()).is_ok());
}

#[test]
fn tda_gap_report_on_random_instances() {
    for seed in 0..10 {
        let op = tight_bse(10, 120 + seed);
        let r = tda_gap_report(&op).unwrap();
        assert!(r.bound_holds, "seed {seed}: min gap {:e}", r.min_gap);
        assert!(spectra::dos_dominance(&r.lambda_full, &r.lambda_tda).unwrap());
        assert!(r.max_relative_gap >= 0.0);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let op = random_bse(40, 8, 1.0, FieldKind::Complex).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let pos = solve_complex(&op).unwrap();
            let bits: Vec<u64> = pos.lambda_plus.iter().map(|x| x.to_bits()).collect();
            let vecs: Vec<u64> = pos.x1.as_slice().iter().chain(pos.x2.as_slice()).flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect();
            (bits, vecs, solve_oracle(&op).unwrap())
        })
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one.0, four.0);
    assert_eq!(one.1, four.1);
    assert_eq!(one.2, four.2);
}
