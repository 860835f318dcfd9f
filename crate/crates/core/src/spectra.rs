//! Eigenvalues, kernel dimensions and spectral gaps.
//!
//! Every Hamiltonian conserves the particle number, so spectra are computed
//! sector by sector. Sectors up to [`DENSE_SECTOR_MAX`] states are diagonalized
//! densely; larger ones go to a Lanczos solver with full reorthogonalization
//! and locking. For open chains the known ground states of a sector are
//! deflated before the iterative solve, so the first value returned is the
//! lowest excitation of that sector.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{build_sector, physical_kappa, Boundary, ModelParams};
use crate::operator::{SparseOperator, MAX_DENSE_DIM};
use crate::vmd_states::vmd_basis;

/// Largest sector block diagonalized densely.
pub const DENSE_SECTOR_MAX: usize = 1000;

/// Seed of the Lanczos start vectors unless the caller picks another.
pub const DEFAULT_SEED: u64 = 0x5eed_f0c1;

/// Relative zero threshold: eigenvalues below `ZERO_TOL_REL · max(1, ‖H‖)` count as kernel.
pub const ZERO_TOL_REL: f64 = 1e-10;

/// How a spectrum was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMethod {
    Dense,
    Iterative,
}

/// Low-lying spectrum of an operator with its kernel and gap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Ascending eigenvalues. For iterative results only the lowest part of
    /// each sector is present.
    pub eigenvalues: Vec<f64>,
    /// Number of eigenvalues below `zero_tol`.
    pub kernel_dim: usize,
    /// Smallest eigenvalue above the kernel, 0 if none was computed.
    pub gap: f64,
    pub method: SolverMethod,
    pub zero_tol: f64,
}

/// Zero threshold for an operator of the given norm.
pub fn zero_tol_for(norm: f64) -> f64 {
    ZERO_TOL_REL * norm.max(1.0)
}

/// All eigenvalues of a symmetric operator, ascending.
pub fn dense_spectrum(op: &SparseOperator) -> Result<Vec<f64>> {
    if op.dim() > MAX_DENSE_DIM {
        return Err(Error::DimensionOverflow(format!("dense spectrum of dimension {}", op.dim())));
    }
    Ok(dense_matrix_spectrum(op.to_dense()?))
}

/// All eigenvalues of a dense symmetric matrix, ascending.
pub fn dense_matrix_spectrum(m: DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Settings of the Lanczos solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    /// Residual tolerance `‖A x − θ x‖ ≤ tol · max(1, |θ|)`.
    pub tol: f64,
    /// Iteration cap per eigenpair.
    pub max_iter: usize,
    /// Seed of the random start vectors.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { tol: 1e-10, max_iter: 1500, seed: DEFAULT_SEED }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], c: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

fn orthogonalize(w: &mut [f64], against: &[Vec<f64>]) {
    for _ in 0..2 {
        for v in against {
            let c = dot(v, w);
            axpy(w, -c, v);
        }
    }
}

/// Lowest eigenpair of `A` on the orthogonal complement of `deflate`.
///
/// `deflate` must be orthonormal. The Krylov basis is kept and fully
/// reorthogonalized, so the iteration cap also bounds the memory use.
fn lanczos_lowest(
    op: &SparseOperator,
    deflate: &[Vec<f64>],
    opts: &LanczosOptions,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, Vec<f64>)> {
    let n = op.dim();
    if deflate.len() >= n {
        return Err(Error::InvalidArgument("deflation space fills the whole space".into()));
    }
    let avail = n - deflate.len();
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    orthogonalize(&mut v, deflate);
    let nv = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= nv);

    let scale = op.row_sum_norm().max(1.0);
    let m_max = opts.max_iter.min(avail);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut next_check = 4;
    loop {
        op.apply(&v, &mut w);
        orthogonalize(&mut w, deflate);
        let a = dot(&v, &w);
        axpy(&mut w, -a, &v);
        if let (Some(prev), Some(&b)) = (basis.last(), betas.last()) {
            axpy(&mut w, -b, prev);
        }
        basis.push(v.clone());
        orthogonalize(&mut w, &basis);
        orthogonalize(&mut w, deflate);
        alphas.push(a);
        let b = dot(&w, &w).sqrt();
        let m = basis.len();
        let exhausted = b <= 1e-13 * scale || m == avail;
        if exhausted || m >= next_check || m == m_max {
            next_check = m + (m / 8).max(4);
            let mut t = DMatrix::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alphas[i];
                if i + 1 < m {
                    t[(i, i + 1)] = betas[i];
                    t[(i + 1, i)] = betas[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let (imin, theta) = eig
                .eigenvalues
                .iter()
                .copied()
                .enumerate()
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("nonempty tridiagonal");
            let residual = b * eig.eigenvectors[(m - 1, imin)].abs();
            if exhausted || residual <= opts.tol * theta.abs().max(1.0) {
                let mut x = vec![0.0; n];
                for (k, q) in basis.iter().enumerate() {
                    axpy(&mut x, eig.eigenvectors[(k, imin)], q);
                }
                orthogonalize(&mut x, deflate);
                let nx = dot(&x, &x).sqrt();
                x.iter_mut().for_each(|c| *c /= nx);
                return Ok((theta, x));
            }
            if m == m_max {
                return Err(Error::NoConvergence(format!(
                    "residual {residual:.3e} after {m} Lanczos steps (dimension {n})"
                )));
            }
        }
        betas.push(b);
        v = w.iter().map(|x| x / b).collect();
    }
}

/// The `k` lowest eigenpairs on the complement of `deflate`, ascending.
///
/// Pairs are found one at a time; each converged vector is locked and
/// projected out before the next solve, so degenerate eigenvalues are
/// returned with their multiplicity.
pub fn lowest_eigenpairs(
    op: &SparseOperator,
    k: usize,
    deflate: &[Vec<f64>],
    opts: &LanczosOptions,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<f64>> = deflate.to_vec();
    let mut out = Vec::with_capacity(k);
    let k = k.min(op.dim().saturating_sub(deflate.len()));
    for _ in 0..k {
        let (theta, x) = lanczos_lowest(op, &locked, opts, &mut rng)?;
        locked.push(x.clone());
        out.push((theta, x));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// The `k` lowest eigenvalues of a symmetric operator, to residual tolerance `tol`.
pub fn lowest_eigenvalues(op: &SparseOperator, k: usize, tol: f64) -> Result<Vec<f64>> {
    let opts = LanczosOptions { tol, ..LanczosOptions::default() };
    Ok(lowest_eigenpairs(op, k, &[], &opts)?.into_iter().map(|p| p.0).collect())
}

/// Number of eigenvalues below `zero_tol`.
///
/// Fails when an eigenvalue lies in `[zero_tol, 10 · zero_tol)`, where the
/// split between kernel and excitations is not trustworthy.
pub fn kernel_dimension(eigenvalues: &[f64], zero_tol: f64) -> Result<usize> {
    if let Some(e) = eigenvalues.iter().find(|&&e| e >= zero_tol && e < 10.0 * zero_tol) {
        return Err(Error::IllSeparated(format!(
            "eigenvalue {e:.3e} within a decade above the zero threshold {zero_tol:.1e}"
        )));
    }
    Ok(eigenvalues.iter().filter(|&&e| e < zero_tol).count())
}

/// Builds a `SpectrumResult` from a complete ascending spectrum.
pub fn summarize(eigenvalues: Vec<f64>, zero_tol: f64, method: SolverMethod) -> Result<SpectrumResult> {
    let kernel_dim = kernel_dimension(&eigenvalues, zero_tol)?;
    let gap = eigenvalues.get(kernel_dim).copied().unwrap_or(0.0);
    Ok(SpectrumResult { eigenvalues, kernel_dim, gap, method, zero_tol })
}

/// Low spectrum of one particle-number sector.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorSpectrum {
    pub particles: usize,
    pub dim: usize,
    pub kernel_dim: usize,
    /// Ascending eigenvalues above the kernel that were computed.
    pub excitations: Vec<f64>,
    pub method: SolverMethod,
}

/// Low spectrum of the `N`-particle sector with at least `k_above`
/// eigenvalues above the kernel (fewer if the sector is smaller).
pub fn sector_spectrum(
    l: usize,
    n: usize,
    p: &ModelParams,
    bc: Boundary,
    k_above: usize,
    opts: &LanczosOptions,
) -> Result<SectorSpectrum> {
    let (basis, op) = build_sector(l, n, p, bc)?;
    let zero_tol = zero_tol_for(op.row_sum_norm());
    if op.dim() <= DENSE_SECTOR_MAX {
        let ev = dense_spectrum(&op)?;
        let kernel_dim = kernel_dimension(&ev, zero_tol)?;
        return Ok(SectorSpectrum {
            particles: n,
            dim: op.dim(),
            kernel_dim,
            excitations: ev[kernel_dim..].to_vec(),
            method: SolverMethod::Dense,
        });
    }
    if bc == Boundary::Open && l >= 8 {
        // The kernel is the span of the VMD states with N particles.
        let index: std::collections::HashMap<u64, usize> =
            basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let deflate: Vec<Vec<f64>> = vmd_basis(l, Some(n), p.lambda)
            .iter()
            .map(|s| {
                let mut v = vec![0.0; op.dim()];
                for (b, a) in s.terms() {
                    v[index[&b]] = a;
                }
                v
            })
            .collect();
        let pairs = lowest_eigenpairs(&op, k_above, &deflate, opts)?;
        let excitations: Vec<f64> = pairs.into_iter().map(|p| p.0).collect();
        if let Some(&e) = excitations.first() {
            if e < 10.0 * zero_tol {
                return Err(Error::KernelMismatch { expected: deflate.len(), found: deflate.len() + 1 });
            }
        }
        return Ok(SectorSpectrum {
            particles: n,
            dim: op.dim(),
            kernel_dim: deflate.len(),
            excitations,
            method: SolverMethod::Iterative,
        });
    }
    // Unknown kernel: lock eigenpairs until enough lie above the threshold.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut kernel_dim = 0;
    let mut excitations = Vec::new();
    while excitations.len() < k_above && locked.len() < op.dim() {
        let (theta, x) = lanczos_lowest(&op, &locked, opts, &mut rng)?;
        if theta < zero_tol {
            kernel_dim += 1;
        } else if theta < 10.0 * zero_tol {
            return Err(Error::IllSeparated(format!("sector N = {n}: eigenvalue {theta:.3e}")));
        } else {
            excitations.push(theta);
        }
        locked.push(x);
    }
    excitations.sort_by(f64::total_cmp);
    Ok(SectorSpectrum { particles: n, dim: op.dim(), kernel_dim, excitations, method: SolverMethod::Iterative })
}

/// Low spectrum of the whole chain, merged over particle-number sectors.
///
/// `eigenvalues` lists the kernel zeros followed by the `k_above` lowest
/// excitations; `gap` is the smallest excitation over all sectors.
pub fn low_spectrum(
    l: usize,
    p: &ModelParams,
    bc: Boundary,
    k_above: usize,
    opts: &LanczosOptions,
) -> Result<SpectrumResult> {
    let sectors: Vec<SectorSpectrum> = (0..=l)
        .into_par_iter()
        .map(|n| sector_spectrum(l, n, p, bc, k_above.max(1), opts))
        .collect::<Result<_>>()?;
    let kernel_dim = sectors.iter().map(|s| s.kernel_dim).sum();
    let mut excitations: Vec<f64> = sectors.iter().flat_map(|s| s.excitations.iter().copied()).collect();
    excitations.sort_by(f64::total_cmp);
    let gap = excitations.first().copied().unwrap_or(0.0);
    let method = if sectors.iter().all(|s| s.method == SolverMethod::Dense) {
        SolverMethod::Dense
    } else {
        SolverMethod::Iterative
    };
    let mut eigenvalues = vec![0.0; kernel_dim];
    if method == SolverMethod::Dense {
        eigenvalues.extend(excitations);
    } else {
        eigenvalues.extend(excitations.into_iter().take(k_above));
    }
    let norm_guess = 2.0 * l as f64 * (1.0 + p.kappa * (1.0 + p.lambda).powi(2));
    Ok(SpectrumResult { eigenvalues, kernel_dim, gap, method, zero_tol: zero_tol_for(norm_guess) })
}

/// The complete spectrum of a chain with at most 12 sites, ascending.
///
/// Kernel eigenvalues are the computed values, not zeros.
pub fn full_spectrum(l: usize, p: &ModelParams, bc: Boundary) -> Result<Vec<f64>> {
    if l > 12 {
        return Err(Error::DimensionOverflow(format!("full spectrum for L = {l} > 12")));
    }
    let mut ev: Vec<f64> = (0..=l)
        .into_par_iter()
        .map(|n| -> Result<Vec<f64>> { dense_spectrum(&build_sector(l, n, p, bc)?.1) })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Kernel dimension and gap of the chain, checked against an expected kernel.
pub fn spectral_gap(l: usize, p: &ModelParams, bc: Boundary, expected_kernel: Option<usize>) -> Result<f64> {
    let s = low_spectrum(l, p, bc, 1, &LanczosOptions::default())?;
    if let Some(expected) = expected_kernel {
        if expected != s.kernel_dim {
            return Err(Error::KernelMismatch { expected, found: s.kernel_dim });
        }
    }
    Ok(s.gap)
}

/// Rule selecting κ for each λ of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum KappaRule {
    Fixed(f64),
    Physical,
}

impl KappaRule {
    /// κ at a given λ.
    pub fn kappa(&self, lambda: f64) -> Result<f64> {
        match *self {
            KappaRule::Fixed(k) => Ok(k),
            KappaRule::Physical => physical_kappa(lambda),
        }
    }
}

/// Number of excitation energies reported per sweep row.
pub const SWEEP_LEVELS: usize = 10;

/// One row of a λ sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub kappa: f64,
    pub l: usize,
    pub bc: Boundary,
    pub kernel_dim: usize,
    pub gap: f64,
    /// The lowest eigenvalues above the kernel, ascending; `levels[0] = gap`.
    pub levels: Vec<f64>,
}

/// Spectral data along a grid of λ values; one result per grid point, in grid order.
pub fn gap_sweep(l: usize, bc: Boundary, lambdas: &[f64], rule: KappaRule) -> Vec<Result<SweepRow>> {
    gap_sweep_with(l, bc, lambdas, rule, &LanczosOptions::default())
}

/// [`gap_sweep`] with explicit solver options. Grid points run in parallel
/// on the current rayon pool.
pub fn gap_sweep_with(
    l: usize,
    bc: Boundary,
    lambdas: &[f64],
    rule: KappaRule,
    opts: &LanczosOptions,
) -> Vec<Result<SweepRow>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            let kappa = rule.kappa(lambda)?;
            let p = ModelParams::new(lambda, kappa)?;
            let s = low_spectrum(l, &p, bc, SWEEP_LEVELS, opts)?;
            let levels: Vec<f64> = s.eigenvalues[s.kernel_dim..].iter().copied().take(SWEEP_LEVELS).collect();
            Ok(SweepRow { lambda, kappa, l, bc, kernel_dim: s.kernel_dim, gap: s.gap, levels })
        })
        .collect()
}

/// Lowest eigenvalue of the open chain in the `N`-particle sector.
pub fn sector_ground_energy(l: usize, n: usize, p: &ModelParams) -> Result<f64> {
    let (_, op) = build_sector(l, n, p, Boundary::Open)?;
    if op.dim() <= DENSE_SECTOR_MAX {
        return Ok(dense_spectrum(&op)?[0]);
    }
    Ok(lowest_eigenvalues(&op, 1, 1e-10)?[0])
}

/// `L (E_{L+1}(N) + E_{L−1}(N) − 2 E_L(N)) / (2π ℓ²)²` for the open chain.
pub fn inverse_compressibility(l: usize, n: usize, p: &ModelParams, magnetic_length: f64) -> Result<f64> {
    if l < 9 {
        return Err(Error::InvalidArgument(format!("inverse compressibility needs L >= 9, got {l}")));
    }
    if !(magnetic_length > 0.0) {
        return Err(Error::InvalidArgument("magnetic length must be positive".into()));
    }
    let e = |m: usize| sector_ground_energy(m, n, p);
    let second = e(l + 1)? + e(l - 1)? - 2.0 * e(l)?;
    let denom = (2.0 * std::f64::consts::PI * magnetic_length * magnetic_length).powi(2);
    Ok(l as f64 * second / denom)
}
