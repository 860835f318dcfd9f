//! Structure and symmetries of the chain Hamiltonian.

mod common;

use common::*;
use fqh_core::hamiltonian::*;
use fqh_core::spectra::dense_spectrum;
use fqh_core::state::SparseState;
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;

const BOUNDARIES: [Boundary; 3] = [Boundary::Open, Boundary::Periodic, Boundary::Dirichlet];

fn params(lambda: f64, kappa: f64) -> ModelParams {
    ModelParams::new(lambda, kappa).unwrap()
}

/// Dense eigenvalues of `H` collected over every particle-number sector.
fn sector_union(l: usize, p: &ModelParams, bc: Boundary) -> Vec<f64> {
    let mut all = Vec::new();
    for n in 0..=l {
        let (_, op) = build_sector(l, n, p, bc).unwrap();
        all.extend(dense_spectrum(&op).unwrap());
    }
    all.sort_by(f64::total_cmp);
    all
}

#[test]
fn symmetric_and_positive_semidefinite() {
    for bc in BOUNDARIES {
        for l in 8..=10 {
            for (lambda, kappa) in [(0.0, 0.7), (0.5, 1.0), (1.0, 0.3), (2.0, 2.5)] {
                let p = params(lambda, kappa);
                assert_eq!(build(l, &p, bc).unwrap().asymmetry(), 0.0);
                let levels = sector_union(l, &p, bc);
                assert_eq!(levels.len(), 1 << l);
                assert!(levels[0] >= -1e-10, "{bc:?} L = {l}: {}", levels[0]);
            }
        }
    }
}

#[test]
fn term_structure_by_hand() {
    let p = params(0.7, 1.3);
    let h = build(4, &p, Boundary::Open).unwrap();
    let idx = |s: &str| s.parse::<fqh_core::tiling::Configuration>().unwrap().bits() as usize;
    // One q term on four sites plus n1 n3 and n2 n4.
    assert!((h.get(idx("0110"), idx("0110")) - 1.3).abs() < 1e-15);
    assert!((h.get(idx("1001"), idx("1001")) - 1.3 * 0.49).abs() < 1e-15);
    assert!((h.get(idx("0110"), idx("1001")) + 1.3 * 0.7).abs() < 1e-15);
    assert_eq!(h.get(idx("1010"), idx("1010")), 1.0);
    assert_eq!(h.get(idx("1111"), idx("1111")), 2.0 + 1.3 * 1.49);
    assert_eq!(h.get(idx("1100"), idx("1100")), 0.0);
    let d = build(4, &p, Boundary::Dirichlet).unwrap();
    assert_eq!(d.get(idx("1100"), idx("1100")), 1.0);
    assert_eq!(d.get(idx("1111"), idx("1111")), 4.0 + 1.3 * 1.49);
    assert!(build(3, &p, Boundary::Open).is_err());
    assert!(build(7, &p, Boundary::Periodic).is_err());
    assert!(build(21, &p, Boundary::Open).is_err());
    assert!(ModelParams::new(-1.0, 1.0).is_err());
    assert!(ModelParams::new(1.0, 0.0).is_err());
}

#[test]
fn dirichlet_adds_edge_pairs() {
    let p = params(1.0, 1.0);
    let l = 9;
    let open = build(l, &p, Boundary::Open).unwrap();
    let dir = build(l, &p, Boundary::Dirichlet).unwrap();
    for b in 0..1usize << l {
        let n = |x: usize| (b >> (x - 1) & 1) as f64;
        let extra = n(1) * n(2) + n(l - 1) * n(l);
        assert_eq!(dir.get(b, b) - open.get(b, b), extra);
        for (j, v) in open.row(b) {
            if j != b {
                assert_eq!(dir.get(b, j), v);
            }
        }
    }
}

#[test]
fn vanishing_hopping_gives_trivial_gap() {
    for kappa in [0.3, 1.0, 2.0] {
        let p = params(0.0, kappa);
        for l in 5..=9 {
            let h = build(l, &p, Boundary::Open).unwrap();
            assert!((0..h.dim()).all(|i| h.row(i).all(|(j, _)| j == i)));
            let levels = dense_spectrum(&h).unwrap();
            let gap = levels.iter().copied().filter(|&e| e > 1e-12).fold(f64::INFINITY, f64::min);
            assert!((gap - kappa.min(1.0)).abs() < 1e-12, "κ = {kappa}, L = {l}");
        }
    }
}

#[test]
fn particle_number_and_translation_invariance() {
    let p = params(1.3, 0.8);
    for l in [8, 9, 11] {
        let h = build(l, &p, Boundary::Periodic).unwrap();
        let ops = symmetry_ops(l).unwrap();
        for (i, j, v) in h.triplets() {
            assert_eq!((i as u64).count_ones(), (j as u64).count_ones());
            let ti = ops.translate(i as u64) as usize;
            let tj = ops.translate(j as u64) as usize;
            // Diagonal entries are sums taken in a different order after translation.
            let image = h.get(ti, tj);
            assert!(image != 0.0 && (image - v).abs() < 1e-13);
        }
    }
    // The open chain is not translation invariant.
    let open = build(8, &p, Boundary::Open).unwrap();
    let ops = symmetry_ops(8).unwrap();
    assert!(open.triplets().iter().any(|&(i, j, v)| {
        open.get(ops.translate(i as u64) as usize, ops.translate(j as u64) as usize) != v
    }));
}

fn cnorm(m: &DMatrix<Complex<f64>>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn symmetry_relations() {
    let ops = symmetry_ops(3).unwrap();
    let t = ops.t_matrix();
    let id = DMatrix::<Complex<f64>>::identity(8, 8);
    assert!(cnorm(&(&t * &t * &t - &id)) < 1e-15);
    for l in [6, 9] {
        let ops = symmetry_ops(l).unwrap();
        let (t, u, v) = (ops.t_matrix(), ops.u_matrix(), ops.v_matrix());
        assert!(cnorm(&(&v * &t - &u * &t * &v)) < 1e-12, "L = {l}");
        assert!(cnorm(&(&u * &t - &t * &u)) < 1e-12, "L = {l}");
        let mut power = DMatrix::<Complex<f64>>::identity(1 << l, 1 << l);
        for _ in 0..l {
            power = &t * power;
        }
        assert!(cnorm(&(power - DMatrix::identity(1 << l, 1 << l))) < 1e-15);
    }
}

#[test]
fn dipole_phase_commutes_with_periodic_hamiltonian() {
    let p = params(1.0, 1.0);
    for l in [9, 10] {
        let h = build(l, &p, Boundary::Periodic).unwrap();
        let ops = symmetry_ops(l).unwrap();
        // ⟨i|[H, V]|j⟩ = H_ij (v_j − v_i).
        let worst = h
            .triplets()
            .iter()
            .map(|&(i, j, x)| (ops.v(j as u64) - ops.v(i as u64)).norm() * x.abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "L = {l}: {worst}");
    }
}

#[test]
fn sectors_reproduce_the_full_spectrum() {
    assert_eq!(sector_basis(6, 2).unwrap().len(), 15);
    assert!(sector_basis(4, 5).is_err());
    let p = params(1.0, 1.0);
    let (basis, op) = build_sector(8, 0, &p, Boundary::Open).unwrap();
    assert_eq!((basis, op.dim(), op.get(0, 0)), (vec![0], 1, 0.0));
    for bc in [Boundary::Open, Boundary::Periodic] {
        let h = build(8, &p, bc).unwrap();
        let full = dense_spectrum(&h).unwrap();
        let union = sector_union(8, &p, bc);
        assert!(full.iter().zip(&union).all(|(a, b)| (a - b).abs() < 1e-10));
        for n in 0..=8 {
            let block = sector_block(&h, 8, n).unwrap();
            let (_, direct) = build_sector(8, n, &p, bc).unwrap();
            assert_eq!(block.triplets(), direct.triplets());
        }
    }
}

#[test]
fn boundary_mode_block_closed_form() {
    let (_, ev) = boundary_mode_block(&params(0.0, 0.7));
    assert!(ev[0].abs() < 1e-15 && (ev[1] - 1.7).abs() < 1e-14);
    let (m, ev) = boundary_mode_block(&params(1.0, 1.0));
    assert!((ev[0] - (2.0 - 2f64.sqrt())).abs() < 1e-14);
    assert!((ev[1] - (2.0 + 2f64.sqrt())).abs() < 1e-14);
    let direct = DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]).symmetric_eigenvalues();
    let (lo, hi) = (direct.min(), direct.max());
    assert!((lo - ev[0]).abs() < 1e-14 && (hi - ev[1]).abs() < 1e-14);
    for kappa in [0.5, 1.0, 3.0] {
        let lambda = 1e-4;
        let (_, ev) = boundary_mode_block(&params(lambda, kappa));
        assert!((ev[0] / (lambda * lambda) - kappa / (1.0 + kappa)).abs() < 1e-6);
    }
}

#[test]
fn boundary_modes_in_the_spectrum() {
    for lambda in [0.2, 1.0, 2.0] {
        let p = ModelParams::physical(lambda).unwrap();
        let (_, ev) = boundary_mode_block(&p);
        for l in 8..=10 {
            let levels = sector_union(l, &p, Boundary::Open);
            for e in ev {
                let nearest = levels.iter().map(|x| (x - e).abs()).fold(f64::INFINITY, f64::min);
                assert!(nearest < 1e-10, "λ = {lambda}, L = {l}, e = {e}");
            }
        }
    }
}

#[test]
fn physical_parametrization() {
    assert!((physical_kappa(3.0).unwrap() - 0.25).abs() < 1e-15);
    assert!((physical_kappa(1.0).unwrap() - 3f64.powf(0.75) / 4.0).abs() < 1e-15);
    assert!(physical_kappa(0.0).is_err());
    assert!(PhysicalParams::new(0.0).is_err());
    for alpha in [0.1, 0.5, 1.0, 1.7] {
        let mp = PhysicalParams::new(alpha).unwrap().model_params();
        let expected = (1.5 * alpha * alpha).exp() / 4.0;
        assert!((mp.kappa - expected).abs() < 1e-12 * expected);
        assert!((physical_kappa(mp.lambda).unwrap() - expected).abs() < 1e-12 * expected);
    }
}

/// `G` applied to a vector of `2^L` amplitudes when `G` acts on the low
/// `L − extra` sites (`high = false`) or the high ones.
fn apply_window(q: &DMatrix<f64>, v: &[f64], extra: usize, high: bool) -> Vec<f64> {
    let d = q.nrows();
    let e = 1usize << extra;
    let index = |i: usize, s: usize| if high { s + i * e } else { i + s * d };
    let mut out = vec![0.0; d * e];
    for s in 0..e {
        let seg = nalgebra::DVector::from_iterator(d, (0..d).map(|i| v[index(i, s)]));
        let img = q * (q.transpose() * seg);
        for i in 0..d {
            out[index(i, s)] = img[i];
        }
    }
    out
}

#[test]
fn frustration_free_nesting() {
    for lambda in [0.5, 1.0] {
        let p = params(lambda, 1.0);
        let tol = 1e-9;
        let mut previous = dense_kernel_basis(5, &p, tol);
        for l in 6..=11 {
            let current = dense_kernel_basis(l, &p, tol);
            for k in 0..current.ncols() {
                let v: Vec<f64> = current.column(k).iter().copied().collect();
                for high in [false, true] {
                    let img = apply_window(&previous, &v, 1, high);
                    let err = img.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    assert!(err < 1e-8, "λ = {lambda}, L = {l}, high = {high}: {err}");
                }
            }
            previous = current;
        }
    }
}

/// `H_n = Σ_k h_k` over the martingale cover of `[1, 3n + k]`: `h_2` is the
/// open chain on `[1, 6 + k]` and `h_m` lives on `[3(m−3)+k+1, 3m+k]`.
#[test]
fn triple_cover_equivalence() {
    let p = params(1.0, 0.6);
    for (n, k) in [(3usize, 0usize), (3, 1), (3, 2), (4, 0)] {
        let l = 3 * n + k;
        for particles in 0..=l / 2 {
            let (_, full) = build_sector_window(l, particles, 1, l, &p).unwrap();
            let mut windows = vec![(1, 6 + k)];
            windows.extend((3..=n).map(|m| (3 * (m - 3) + k + 1, 3 * m + k)));
            let mut cover = DMatrix::zeros(full.dim(), full.dim());
            for (a, b) in windows {
                cover += build_sector_window(l, particles, a, b, &p).unwrap().1.to_dense().unwrap();
            }
            let h = full.to_dense().unwrap();
            let below = min_eigenvalue(&cover - &h);
            let above = min_eigenvalue(&h * 3.0 - &cover);
            assert!(below >= -1e-10 && above >= -1e-10, "L = {l}, N = {particles}");
        }
    }
}

#[test]
fn periodic_third_filling_degeneracy() {
    let p = params(1.0, 1.0);
    let l = 9;
    let (basis, op) = build_sector(l, 3, &p, Boundary::Periodic).unwrap();
    let ops = symmetry_ops(l).unwrap();
    let h = op.to_dense().unwrap();
    // V is diagonal and commutes with H, so its eigenspaces split the sector.
    let mut classes = Vec::new();
    for class in 0..l {
        let idx: Vec<usize> = (0..basis.len())
            .filter(|&i| {
                let m: usize = (0..l).filter(|&x| basis[i] >> x & 1 == 1).map(|x| x + 1).sum();
                m % l == class
            })
            .collect();
        for &i in &idx {
            let z = ops.v(basis[i]);
            assert!((z - Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * class as f64 / l as f64)).norm() < 1e-12);
        }
        let block = h.select_rows(&idx).select_columns(&idx);
        let zeros = block.symmetric_eigenvalues().iter().filter(|&&e| e.abs() < 1e-10).count();
        if zeros > 0 {
            classes.push(class);
        }
    }
    let total: usize = sector_union_kernel(l, &p);
    assert!(total >= 3);
    // Three-periodic ground states sit in V-eigenspaces a factor e^{2πi/3} apart.
    assert!(classes.iter().any(|&c| classes.contains(&((c + 3) % l)) && classes.contains(&((c + 6) % l))), "{classes:?}");
}

fn sector_union_kernel(l: usize, p: &ModelParams) -> usize {
    let (_, op) = build_sector(l, 3, p, Boundary::Periodic).unwrap();
    dense_spectrum(&op).unwrap().iter().filter(|&&e| e.abs() < 1e-10).count()
}

#[test]
fn matrix_market_dump() {
    let h = build(4, &params(1.0, 1.0), Boundary::Open).unwrap();
    let mut out = Vec::new();
    h.write_matrix_market(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('%'));
    let header: Vec<usize> = lines.next().unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
    assert_eq!(&header[..2], &[16, 16]);
    let mut count = 0;
    for line in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        let (i, j): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let v: f64 = f[2].parse().unwrap();
        assert!(i >= j);
        assert_eq!(h.get(i - 1, j - 1), v);
        count += 1;
    }
    assert_eq!(count, header[2]);
}

proptest! {
    #[test]
    fn sparse_application_matches_matrix(
        lambda in 0.0f64..3.0,
        kappa in 0.05f64..3.0,
        l in 8usize..=11,
        amps in prop::collection::vec(-1.0f64..1.0, 2048),
        bc_index in 0usize..3,
    ) {
        let bc = BOUNDARIES[bc_index];
        let p = params(lambda, kappa);
        let h = build(l, &p, bc).unwrap();
        let x: Vec<f64> = amps.iter().copied().cycle().take(1 << l).collect();
        let y = h.mul_vec(&x);
        let psi = SparseState::from_terms(l, x.iter().enumerate().map(|(b, &a)| (b as u64, a))).unwrap();
        let hpsi = apply_to_state(&p, bc, &psi).unwrap();
        for (b, &v) in y.iter().enumerate() {
            prop_assert!((hpsi.amplitude(b as u64) - v).abs() < 1e-12);
        }
        let energy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        prop_assert!(energy >= -1e-10);
    }
}
