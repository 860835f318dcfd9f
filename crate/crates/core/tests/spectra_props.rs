//! Eigenvalues, kernels and gaps against dense diagonalization.

mod common;

use std::time::Instant;

use fqh_core::hamiltonian::*;
use fqh_core::operator::SparseOperator;
use fqh_core::spectra::*;
use fqh_core::tiling::{count_roots, max_particle_number};
use num_bigint::BigUint;
use proptest::prelude::*;

fn params(lambda: f64, kappa: f64) -> ModelParams {
    ModelParams::new(lambda, kappa).unwrap()
}

fn close_lists(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn lanczos_agrees_with_dense() {
    let p = params(1.0, 1.0);
    let (_, op) = build_sector(10, 3, &p, Boundary::Open).unwrap();
    let dense = dense_spectrum(&op).unwrap();
    let iterative = lowest_eigenvalues(&op, 10, 1e-10).unwrap();
    assert!(close_lists(&iterative, &dense[..10], 1e-8), "{iterative:?}\n{:?}", &dense[..10]);
    assert!(iterative[0] >= -1e-10);
    let (_, pbc) = build_sector(12, 4, &params(0.6, 1.4), Boundary::Periodic).unwrap();
    let dense = dense_spectrum(&pbc).unwrap();
    let iterative = lowest_eigenvalues(&pbc, 6, 1e-10).unwrap();
    assert!(close_lists(&iterative, &dense[..6], 1e-8));
}

#[test]
fn deflated_sector_solver_matches_dense() {
    // Sectors above the dense threshold are solved iteratively on the
    // complement of the VMD states.
    let p = ModelParams::physical(1.0).unwrap();
    let opts = LanczosOptions::default();
    for n in [5, 6] {
        let s = sector_spectrum(13, n, &p, Boundary::Open, 3, &opts).unwrap();
        assert_eq!(s.method, SolverMethod::Iterative);
        let (_, op) = build_sector(13, n, &p, Boundary::Open).unwrap();
        let dense = dense_spectrum(&op).unwrap();
        let zeros = dense.iter().filter(|&&e| e < 1e-9).count();
        assert_eq!(s.kernel_dim, zeros);
        assert!(close_lists(&s.excitations, &dense[zeros..zeros + 3], 1e-8), "N = {n}");
    }
}

#[test]
fn dense_examples() {
    assert_eq!(dense_spectrum(&SparseOperator::zeros(4)).unwrap(), vec![0.0; 4]);
    let h = build(8, &params(0.0, 0.5), Boundary::Open).unwrap();
    let ev = dense_spectrum(&h).unwrap();
    let first = ev.iter().copied().find(|&e| e > 1e-12).unwrap();
    assert!((first - 0.5).abs() < 1e-12);
    assert!(dense_spectrum(&SparseOperator::zeros(MAX_DENSE + 1)).is_err());
}

const MAX_DENSE: usize = fqh_core::operator::MAX_DENSE_DIM;

#[test]
fn kernel_dimension_counts_roots() {
    let p = params(1.0, 1.0);
    let expected = [(5, 11), (6, 17), (7, 26), (8, 37), (9, 54), (10, 79)];
    for (l, k) in expected {
        let ev = full_spectrum(l, &p, Boundary::Open).unwrap();
        let found = kernel_dimension(&ev, zero_tol_for(2.0 * l as f64 * 5.0)).unwrap();
        assert_eq!(found, k, "L = {l}");
        if l >= 8 {
            assert_eq!(BigUint::from(found), count_roots(l));
        }
    }
    assert!(kernel_dimension(&[0.0, 5e-10, 1.0], 1e-10).is_err());
    assert_eq!(kernel_dimension(&[0.0, 1e-12, 1e-8], 1e-10).unwrap(), 2);
}

#[test]
fn gap_examples() {
    let g = spectral_gap(9, &params(0.0, 2.0), Boundary::Open, None).unwrap();
    assert!((g - 1.0).abs() < 1e-12);
    for kappa in [0.3, 1.0, 2.0] {
        for l in 5..=10 {
            let g = spectral_gap(l, &params(0.0, kappa), Boundary::Open, None).unwrap();
            assert!((g - kappa.min(1.0)).abs() < 1e-10);
        }
    }
    // Boundary modes pull the gap down to order κλ²/(1+κ) at small λ.
    let p = ModelParams::physical(0.05).unwrap();
    let g = spectral_gap(9, &p, Boundary::Open, Some(54)).unwrap();
    let (_, modes) = boundary_mode_block(&p);
    let scale = p.kappa * 0.0025 / (1.0 + p.kappa);
    assert!(g > 0.0 && g <= modes[0] + 1e-12);
    assert!(g > 0.5 * scale && g < 1.5 * scale, "gap {g}, scale {scale}");
    // λ = κ = 1 at L = 10: the lowest excitation from the full spectrum.
    let p = params(1.0, 1.0);
    let ev = full_spectrum(10, &p, Boundary::Open).unwrap();
    let g = spectral_gap(10, &p, Boundary::Open, Some(79)).unwrap();
    assert!((g - ev[79]).abs() < 1e-10 && g > 0.1);
    assert!(matches!(
        spectral_gap(9, &p, Boundary::Open, Some(55)),
        Err(fqh_core::Error::KernelMismatch { expected: 55, found: 54 })
    ));
}

#[test]
fn low_spectrum_merges_sectors() {
    let p = params(0.8, 0.9);
    let s = low_spectrum(10, &p, Boundary::Open, 5, &LanczosOptions::default()).unwrap();
    let full = full_spectrum(10, &p, Boundary::Open).unwrap();
    assert_eq!(s.method, SolverMethod::Dense);
    assert_eq!(s.kernel_dim, 79);
    assert_eq!(s.eigenvalues.len(), full.len());
    assert!(close_lists(&s.eigenvalues[79..], &full[79..], 1e-10));
    assert_eq!(s.gap, s.eigenvalues[s.kernel_dim]);
}

#[test]
fn sweep_properties() {
    assert!(gap_sweep(9, Boundary::Open, &[], KappaRule::Physical).is_empty());
    let grid: Vec<f64> = (1..=15).map(|i| 0.2 * i as f64).collect();
    let rows = gap_sweep(9, Boundary::Open, &grid, KappaRule::Physical);
    assert_eq!(rows.len(), grid.len());
    for (row, &lambda) in rows.iter().zip(&grid) {
        let row = row.as_ref().unwrap();
        assert_eq!(row.lambda, lambda);
        assert_eq!(row.kernel_dim, 54);
        assert_eq!(row.levels.len(), SWEEP_LEVELS);
        assert_eq!(row.levels[0], row.gap);
        assert!(row.levels.windows(2).all(|w| w[0] <= w[1]));
        let (_, modes) = boundary_mode_block(&params(row.lambda, row.kappa));
        assert!(row.gap <= modes[0] + 1e-10, "λ = {lambda}");
    }
    // The open gap closes as λ → 0 while periodic and Dirichlet gaps stay open.
    let small = [0.02, 0.1];
    let open: Vec<f64> = gap_sweep(9, Boundary::Open, &small, KappaRule::Fixed(1.0))
        .into_iter()
        .map(|r| r.unwrap().gap)
        .collect();
    assert!(open[0] < 1e-3 && open[0] < open[1]);
    for bc in [Boundary::Periodic, Boundary::Dirichlet] {
        let grid: Vec<f64> = (1..=30).map(|i| 0.1 * i as f64).collect();
        for row in gap_sweep(9, bc, &grid, KappaRule::Physical) {
            let row = row.unwrap();
            assert!(row.gap > 0.05, "{bc:?} λ = {}: {}", row.lambda, row.gap);
        }
    }
    let pbc = gap_sweep(9, Boundary::Periodic, &[0.0], KappaRule::Fixed(0.5));
    let row = pbc[0].as_ref().unwrap();
    assert!((row.gap - 0.5).abs() < 1e-12);
    assert!(gap_sweep(9, Boundary::Open, &[0.0], KappaRule::Physical)[0].is_err());
}

#[test]
fn sector_ground_energies() {
    let p = params(1.0, 1.0);
    assert!(sector_ground_energy(9, 4, &p).unwrap().abs() < 1e-10);
    assert!(sector_ground_energy(9, 5, &p).unwrap() > 1e-3);
    assert!(sector_ground_energy(12, 5, &p).unwrap().abs() < 1e-10);
    assert!(sector_ground_energy(12, 6, &p).unwrap() > 1e-3);
    assert_eq!(sector_ground_energy(12, 0, &p).unwrap(), 0.0);
    for l in 8..=12 {
        let max = max_particle_number(l).unwrap().0;
        for n in 0..=l {
            let e = sector_ground_energy(l, n, &p).unwrap();
            assert_eq!(e.abs() < 1e-10, n <= max, "L = {l}, N = {n}: {e}");
        }
    }
}

#[test]
fn compressibility() {
    let p = params(1.0, 1.0);
    assert!(inverse_compressibility(8, 2, &p, 1.0).is_err());
    // All three energies vanish below the filling of the shorter chain.
    let below = max_particle_number(10).unwrap().0;
    assert!(inverse_compressibility(11, below, &p, 1.0).unwrap().abs() < 1e-9);
    // At the filling threshold of L = 11 the shorter chain is already excited.
    let n = max_particle_number(11).unwrap().0;
    assert!(sector_ground_energy(10, n, &p).unwrap() > 1e-3);
    let k1 = inverse_compressibility(11, n, &p, 1.0).unwrap();
    assert!(k1 > 0.0);
    let k2 = inverse_compressibility(11, n, &p, 2.0).unwrap();
    assert!((k2 - k1 / 16.0).abs() < 1e-12 * k1);
}

#[test]
fn periodic_sector_at_eighteen_sites() {
    let start = Instant::now();
    let (_, op) = build_sector(18, 6, &params(1.0, 1.0), Boundary::Periodic).unwrap();
    let ev = lowest_eigenvalues(&op, 4, 1e-10).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(ev.len(), 4);
    assert!(ev[0] >= -1e-10);
    assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    assert!(elapsed < 60.0, "took {elapsed:.1} s");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lanczos_on_random_symmetric_matrices(
        entries in prop::collection::vec((0usize..80, 0usize..80, -1.0f64..1.0), 40..400),
        k in 1usize..6,
        seed in any::<u64>(),
    ) {
        let mut triplets = Vec::new();
        for (i, j, v) in entries {
            triplets.push((i, j, v));
            triplets.push((j, i, v));
        }
        let op = SparseOperator::from_triplets(80, triplets).unwrap();
        let dense = dense_spectrum(&op).unwrap();
        let opts = LanczosOptions { seed, ..LanczosOptions::default() };
        let pairs = lowest_eigenpairs(&op, k, &[], &opts).unwrap();
        let got: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        prop_assert!(close_lists(&got, &dense[..k], 1e-8), "{:?} vs {:?}", got, &dense[..k]);
        for (theta, x) in &pairs {
            let y = op.mul_vec(x);
            let res: f64 = y.iter().zip(x).map(|(a, b)| (a - theta * b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(res < 1e-7);
        }
    }

    #[test]
    fn summary_invariants(lambda in 0.0f64..3.0, kappa in 0.1f64..3.0) {
        let p = params(lambda, kappa);
        let ev = full_spectrum(8, &p, Boundary::Open).unwrap();
        let tol = zero_tol_for(50.0);
        if let Ok(s) = summarize(ev.clone(), tol, SolverMethod::Dense) {
            prop_assert_eq!(s.kernel_dim, ev.iter().filter(|&&e| e < tol).count());
            prop_assert_eq!(s.gap, ev[s.kernel_dim]);
            prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(s.kernel_dim, 37);
        }
    }
}
