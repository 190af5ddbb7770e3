mod common;

use bse_core::io::{read_matrix_market, write_matrix_market, MmField, MmSymmetry};
use bse_core::kernels::{cholesky, hermitian_eig};
use bse_core::*;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn complex_solver_invariants(n in 1usize..24, seed in any::<u64>(), tight in any::<bool>()) {
        let op = if tight { common::tight_bse(n, seed) } else { random_bse(n, seed, 1.0, FieldKind::Complex).unwrap() };
        let pos = solve_complex(&op).unwrap();
        let scale = common::h_norm2(&op);
        prop_assert!(pos.lambda_plus.iter().all(|&l| l > 0.0));
        prop_assert!(pos.lambda_plus.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(pos.normalization_defect() <= 1e-12 * n as f64);
        prop_assert!(pos.residual_norm(&op) <= 1e-12 * scale);
        let full = expand_full(&op, &pos).unwrap();
        for j in 0..n {
            prop_assert_eq!(full.lambda[n + j].to_bits(), (-full.lambda[j]).to_bits());
        }
        let oracle = solve_oracle(&op).unwrap();
        prop_assert!(common::max_abs_diff(&pos.lambda_plus, &oracle[..n]) <= 1e-12 * scale);
        prop_assert!(pairing_defect(&oracle) <= 1e-12 * scale);
    }

    #[test]
    fn real_solver_invariants(n in 1usize..24, seed in any::<u64>()) {
        let op = random_bse(n, seed, 0.5, FieldKind::Real).unwrap();
        let pos = solve_real(&op).unwrap();
        prop_assert!(pos.normalization_defect() <= 1e-12 * n as f64);
        prop_assert!(pos.residual_norm(&op) <= 1e-12 * common::h_norm2(&op));
    }

    #[test]
    fn scaling_is_equivariant(n in 1usize..12, seed in any::<u64>(), s in 1e-3f64..1e3) {
        let op = random_bse(n, seed, 1.0, FieldKind::Complex).unwrap();
        let base = solve_complex(&op).unwrap().lambda_plus;
        let scaled = solve_complex(&op.scaled(s)).unwrap().lambda_plus;
        for (x, y) in base.iter().zip(&scaled) {
            prop_assert!((y - s * x).abs() <= 1e-13 * s * x);
        }
    }

    #[test]
    fn tda_overestimates(n in 1usize..20, seed in any::<u64>()) {
        let op = common::tight_bse(n, seed);
        let r = tda_gap_report(&op).unwrap();
        prop_assert!(r.bound_holds, "min gap {:e}", r.min_gap);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn square_root_of_product_below_mean(n in 1usize..=16, seed in any::<u64>(), shift in 1e-3f64..2.0) {
        let mut r = common::rng(seed);
        let a1 = common::random_spd(n, &mut r, shift);
        let a2 = common::random_spd(n, &mut r, shift);
        let l2 = cholesky(&a2).unwrap().l;
        let sim = l2.transpose().matmul(&a1).unwrap().matmul(&l2).unwrap();
        let sim = RealMatrix::from_fn(n, n, |i, j| 0.5 * (sim[(i, j)] + sim[(j, i)]));
        let prod = hermitian_eig(&sim.to_complex()).unwrap().values;
        let mean = hermitian_eig(&a1.try_add(&a2).unwrap().scaled(0.5).to_complex()).unwrap().values;
        for (p, m) in prod.iter().zip(&mean) {
            prop_assert!(p.max(0.0).sqrt() <= m + 1e-12);
        }
    }

    #[test]
    fn density_is_linear_in_the_multiset(
        xs in prop::collection::vec(-5.0f64..5.0, 1..20),
        ys in prop::collection::vec(-5.0f64..5.0, 1..20),
        sigma in 0.05f64..1.0,
    ) {
        let grid: Vec<f64> = (0..200).map(|k| -8.0 + 0.08 * k as f64).collect();
        let fx = spectral_density(&xs, &grid, sigma).unwrap();
        let fy = spectral_density(&ys, &grid, sigma).unwrap();
        let union: Vec<f64> = xs.iter().chain(&ys).copied().collect();
        let fu = spectral_density(&union, &grid, sigma).unwrap();
        let (nx, ny) = (xs.len() as f64, ys.len() as f64);
        let peak = spectra::gaussian(0.0, sigma);
        for k in 0..grid.len() {
            let mix = (nx * fx.values[k] + ny * fy.values[k]) / (nx + ny);
            prop_assert!((fu.values[k] - mix).abs() <= 8.0 * f64::EPSILON * peak);
        }
    }

    #[test]
    fn density_is_shift_equivariant(
        xs in prop::collection::vec(-5.0f64..5.0, 1..20),
        c in -10.0f64..10.0,
        sigma in 0.05f64..1.0,
    ) {
        let grid: Vec<f64> = (0..200).map(|k| -8.0 + 0.08 * k as f64).collect();
        let shifted_grid: Vec<f64> = grid.iter().map(|w| w + c).collect();
        let shifted: Vec<f64> = xs.iter().map(|x| x + c).collect();
        let f = spectral_density(&xs, &grid, sigma).unwrap();
        let g = spectral_density(&shifted, &shifted_grid, sigma).unwrap();
        // each ω - λ carries O(ε (|ω| + |c|)) rounding, amplified by the Gaussian slope ≤ 1/σ
        let peak = spectra::gaussian(0.0, sigma);
        let tol = 8.0 * f64::EPSILON * peak * (1.0 + 30.0 / sigma);
        for (a, b) in f.values.iter().zip(&g.values) {
            prop_assert!((a - b).abs() <= tol);
        }
    }

    #[test]
    fn matrix_market_roundtrip(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let re = common::random_matrix(rows, cols, seed);
        let im = common::random_matrix(rows, cols, seed ^ 0x5555);
        let m = ComplexMatrix::from_parts(&re, &im).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&mut buf, &m, MmField::Complex, MmSymmetry::General).unwrap();
        prop_assert_eq!(read_matrix_market(&buf[..]).unwrap().matrix, m);
    }

    #[test]
    fn real_hamiltonian_roundtrip(n in 1usize..8, seed in any::<u64>()) {
        let op = random_bse(n, seed, 1.0, FieldKind::Complex).unwrap();
        let back = real_hamiltonian_to_bse(&bse_to_real_hamiltonian(&op)).unwrap();
        let tol = 4.0 * f64::EPSILON * op.omega().max_abs();
        prop_assert!(back.a().try_sub(op.a()).unwrap().max_abs() <= tol);
        prop_assert!(back.b().try_sub(op.b()).unwrap().max_abs() <= tol);
    }
}
