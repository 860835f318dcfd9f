//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use fqh_core::correlations::DiagonalObservable;
use fqh_core::hamiltonian::{build_sector, Boundary, ModelParams};
use fqh_core::state::SparseState;
use fqh_core::tiling::{DominoKind, LeftBoundary, RightBoundary, RootTiling, VmdTiling};
use nalgebra::{DMatrix, SymmetricEigen};

/// Every tile sequence covering `[1, L]` that respects the edge rules:
/// a left dimer only first, right-edge tiles only last.
pub fn brute_force_tilings(l: usize) -> Vec<Vec<DominoKind>> {
    fn rec(l: usize, pos: usize, prefix: &mut Vec<DominoKind>, out: &mut Vec<Vec<DominoKind>>) {
        if pos == l {
            out.push(prefix.clone());
            return;
        }
        for kind in DominoKind::ALL {
            let end = pos + kind.length();
            if end > l {
                continue;
            }
            if kind == DominoKind::LeftDimer && pos != 0 {
                continue;
            }
            if kind.is_right_edge_only() && end != l {
                continue;
            }
            prefix.push(kind);
            rec(l, end, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(l, 0, &mut Vec::new(), &mut out);
    out
}

/// Packed particle content of a tile sequence, computed from the offsets.
pub fn content_bits(kinds: &[DominoKind]) -> u64 {
    let mut bits = 0u64;
    let mut start = 0;
    for k in kinds {
        for &o in k.particle_offsets() {
            bits |= 1 << (start + o);
        }
        start += k.length();
    }
    bits
}

/// Every root of `[1, L]` by brute force over boundary pairs and void/monomer words.
pub fn brute_force_roots(l: usize) -> BTreeSet<String> {
    brute_force_tilings(l)
        .into_iter()
        .filter(|t| {
            t.iter().all(|k| {
                !matches!(k, DominoKind::Dimer | DominoKind::Trunc1Dimer | DominoKind::Trunc2Dimer)
            })
        })
        .map(|t| {
            let tokens: Vec<&str> = t
                .iter()
                .map(|k| match k {
                    DominoKind::Void => "v",
                    DominoKind::Monomer => "m",
                    DominoKind::LeftDimer => "dl",
                    DominoKind::RightDimer => "dr",
                    DominoKind::Right1Monomer => "m1",
                    DominoKind::Right2Monomer => "m2",
                    _ => unreachable!(),
                })
                .collect();
            tokens.join(" ")
        })
        .collect()
}

pub fn tiling(kinds: &[DominoKind]) -> VmdTiling {
    VmdTiling::from_kinds(kinds).unwrap()
}

/// A root from a compact code: `left` dimer flag, interior bits (1 = monomer), right tag.
pub fn root_from_code(left: bool, interior: &[bool], right: u8) -> Option<RootTiling> {
    let left = if left { LeftBoundary::LeftDimer } else { LeftBoundary::Empty };
    let right = RightBoundary::ALL[right as usize % 4];
    let interior = interior
        .iter()
        .map(|&m| if m { DominoKind::Monomer } else { DominoKind::Void })
        .collect();
    RootTiling::new(left, interior, right).ok()
}

/// `⟨ψ, O ψ⟩/‖ψ‖²` by summing over the support of a sparse vector.
pub fn brute_expectation(psi: &SparseState, obs: &DiagonalObservable) -> f64 {
    let mut num = 0.0;
    for (bits, a) in psi.terms() {
        let w: f64 = obs.sites().map(|x| obs.weight(x, bits >> (x - 1) & 1 == 1)).product();
        num += a * a * w;
    }
    num / psi.norm_sq()
}

/// Orthonormal kernel vectors of the open chain, embedded in the full
/// `2^L` space, from a dense diagonalization of every particle-number sector.
pub fn dense_kernel_basis(l: usize, p: &ModelParams, tol: f64) -> DMatrix<f64> {
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for n in 0..=l {
        let (basis, op) = build_sector(l, n, p, Boundary::Open).unwrap();
        let eig = SymmetricEigen::new(op.to_dense().unwrap());
        for (k, &e) in eig.eigenvalues.iter().enumerate() {
            if e < tol {
                let mut v = vec![0.0; 1 << l];
                for (i, &b) in basis.iter().enumerate() {
                    v[b as usize] = eig.eigenvectors[(i, k)];
                }
                cols.push(v);
            }
        }
    }
    let mut m = DMatrix::zeros(1 << l, cols.len());
    for (k, c) in cols.iter().enumerate() {
        for (i, &x) in c.iter().enumerate() {
            m[(i, k)] = x;
        }
    }
    m
}

/// `Q Qᵀ` for an orthonormal basis `Q`.
pub fn projector(q: &DMatrix<f64>) -> DMatrix<f64> {
    q * q.transpose()
}

/// `A ⊗ 1_{2^extra}` with `A` acting on the low `n` sites of an `n + extra` site chain.
pub fn embed_low(a: &DMatrix<f64>, extra: usize) -> DMatrix<f64> {
    let d = a.nrows();
    let e = 1usize << extra;
    let mut m = DMatrix::zeros(d * e, d * e);
    for s in 0..e {
        for i in 0..d {
            for j in 0..d {
                let v = a[(i, j)];
                if v != 0.0 {
                    m[(i + s * d, j + s * d)] = v;
                }
            }
        }
    }
    m
}

/// `1_{2^extra} ⊗ A` with `A` acting on the high sites.
pub fn embed_high(a: &DMatrix<f64>, extra: usize) -> DMatrix<f64> {
    let d = a.nrows();
    let e = 1usize << extra;
    let mut m = DMatrix::zeros(d * e, d * e);
    for i in 0..d {
        for j in 0..d {
            let v = a[(i, j)];
            if v != 0.0 {
                for s in 0..e {
                    m[(s + i * e, s + j * e)] = v;
                }
            }
        }
    }
    m
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_eigenvalue(m: DMatrix<f64>) -> f64 {
    m.symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: DMatrix<f64>) -> f64 {
    m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Real root of `μ³ − μ² − 1` by bisection on `[1, 2]`.
pub fn growth_root() -> f64 {
    let (mut a, mut b) = (1.0f64, 2.0f64);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m * m * m - m * m - 1.0 > 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}
