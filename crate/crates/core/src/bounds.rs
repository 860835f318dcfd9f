//! Lower bounds on the spectral gap.
//!
//! The open-chain bound combines the gaps of three short chains with the
//! function `f(r) = sup_{n ≥ 4} f_n(r)`, `r = λ²`, which controls the norm of
//! the martingale operator `G_{Λ₂}(1 − G_Λ)G_{Λ₁}`. The supremum is replaced by
//! the maximum over `4 ≤ n ≤ 73` plus a fixed error allowance. The periodic
//! bound follows from the finite-size criterion applied to open chains of
//! lengths `3(n+1) … 3(n+1)+5`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{Boundary, ModelParams};
use crate::spectra::{full_spectrum, spectral_gap};
use crate::state::SparseState;
use crate::tiling::{is_tiling_configuration, low_mask, MAX_DENSE_LEN};
use crate::vmd_states::{alpha, ground_projector};

/// Number of terms of the truncated supremum for which the error allowance holds.
pub const F_CERT_NMAX: usize = 73;
/// Largest `r` covered by the error allowance.
pub const F_CERT_RMAX: f64 = 35.0;
/// Upper bound on `f(r) − max_{4≤n≤73} f_n(r)` for `0 ≤ r ≤ 35`.
pub const F_CERT_ERROR: f64 = 0.0052;
/// Number of overlapping windows in the martingale covering.
pub const MARTINGALE_OVERLAP: usize = 3;
/// Length of the right window of the martingale step.
pub const MARTINGALE_WINDOW: usize = 9;

/// The constants `μ±`, `μ = μ₋/μ₊`, `Δμ = μ₊ − μ₋` and `β = |μ|` at `r = λ²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralConstants {
    pub r: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub mu: f64,
    pub delta_mu: f64,
    pub beta: f64,
}

impl SpectralConstants {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("r must be finite and nonnegative, got {r}")));
        }
        let delta_mu = (1.0 + 4.0 * r).sqrt();
        let mu_plus = 0.5 * (1.0 + delta_mu);
        let mu_minus = 0.5 * (1.0 - delta_mu);
        let mu = mu_minus / mu_plus;
        Ok(SpectralConstants { r, mu_plus, mu_minus, mu, delta_mu, beta: mu.abs() })
    }
}

/// `f_n(r) = r α_n α_{n−2} [(1 − α_{n−1}(1+r))²/(1+2r) + α_{n−3} r (1 − α_{n−1})²/(1+r)]`.
pub fn f_n(n: usize, r: f64) -> Result<f64> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("f_n needs n >= 4, got {n}")));
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("r must be nonnegative, got {r}")));
    }
    let a = |k: usize| alpha(k, r);
    let first = (1.0 - a(n - 1) * (1.0 + r)).powi(2) / (1.0 + 2.0 * r);
    let second = a(n - 3) * r * (1.0 - a(n - 1)).powi(2) / (1.0 + r);
    Ok(r * a(n) * a(n - 2) * (first + second))
}

/// Truncated supremum `max_{4≤m≤n_max} f_m(r)` with its certified upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FApprox {
    pub r: f64,
    pub n_max: usize,
    pub value: f64,
    /// `value + 0.0052`, present only when `n_max ≥ 73` and `r ≤ 35`.
    pub certified: Option<f64>,
}

/// Evaluates the truncated supremum of `f_n` at `r`.
pub fn f_approx(r: f64, n_max: usize) -> Result<FApprox> {
    if n_max < 4 {
        return Err(Error::InvalidArgument(format!("n_max must be at least 4, got {n_max}")));
    }
    let mut value: f64 = 0.0;
    for n in 4..=n_max {
        value = value.max(f_n(n, r)?);
    }
    let certified = (n_max >= F_CERT_NMAX && r <= F_CERT_RMAX).then_some(value + F_CERT_ERROR);
    Ok(FApprox { r, n_max, value, certified })
}

/// The truncated supremum on a grid of `r` values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FCurve {
    pub n_max: usize,
    pub r_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// The error allowance when it covers the whole grid.
    pub error_bound: Option<f64>,
}

impl FCurve {
    pub fn new(r_grid: Vec<f64>, n_max: usize) -> Result<Self> {
        let points: Vec<FApprox> = r_grid.par_iter().map(|&r| f_approx(r, n_max)).collect::<Result<_>>()?;
        let error_bound = points.iter().all(|p| p.certified.is_some()).then_some(F_CERT_ERROR);
        Ok(FCurve { n_max, r_grid, values: points.iter().map(|p| p.value).collect(), error_bound })
    }

    /// Certified upper bounds, if the allowance covers the grid.
    pub fn certified(&self) -> Option<Vec<f64>> {
        self.error_bound.map(|e| self.values.iter().map(|v| v + e).collect())
    }

    /// Largest decrease between consecutive grid values, 0 for a nondecreasing curve.
    pub fn max_decrease(&self) -> f64 {
        self.values.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
    }
}

/// The open-chain gap bound at one value of λ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObcBound {
    pub f_certified: f64,
    /// True when `3 f_certified < 1`, the hypothesis of the bound.
    pub threshold_ok: bool,
    /// `min(small_gaps) (1 − √(3f))²/3`, or 0 when the threshold fails.
    pub value: f64,
}

/// `min(small_gaps) · (1 − √(3f))²/3` with `f` the certified upper bound at `r = λ²`.
///
/// `small_gaps` are the gaps of the open chains on 8, 9 and 10 sites.
pub fn obc_gap_bound(lambda: f64, small_gaps: &[f64]) -> Result<ObcBound> {
    if small_gaps.is_empty() {
        return Err(Error::InvalidArgument("no short-chain gaps given".into()));
    }
    let fa = f_approx(lambda * lambda, F_CERT_NMAX)?;
    let f = fa.certified.ok_or_else(|| {
        Error::InvalidArgument(format!("no certified f value at r = {} > {F_CERT_RMAX}", fa.r))
    })?;
    let gamma = small_gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold_ok = 3.0 * f < 1.0;
    let value = if threshold_ok { martingale_bound(gamma, f.sqrt(), MARTINGALE_OVERLAP).0 / 3.0 } else { 0.0 };
    Ok(ObcBound { f_certified: f, threshold_ok, value })
}

/// Gaps of the open chains on 8, 9 and 10 sites.
pub fn small_gaps(p: &ModelParams) -> Result<Vec<f64>> {
    (8..=10).map(|l| spectral_gap(l, p, Boundary::Open, None)).collect()
}

/// `γ (1 − ε √ℓ)²` and whether `ε √ℓ < 1` held; the value is 0 otherwise.
pub fn martingale_bound(gamma: f64, epsilon: f64, ell: usize) -> (f64, bool) {
    let x = epsilon * (ell as f64).sqrt();
    if x < 1.0 {
        (gamma * (1.0 - x).powi(2), true)
    } else {
        (0.0, false)
    }
}

/// Inputs of the periodic gap bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnabeInputs {
    pub n: usize,
    /// Smallest gap of the open chains on 6 and 7 sites.
    pub gamma: f64,
    /// Largest norm of the open chains on 6 and 7 sites.
    #[serde(rename = "Gamma")]
    pub big_gamma: f64,
    /// Smallest gap of the open chains on `3(n+1) … 3(n+1)+5` sites.
    pub g_n: f64,
}

/// Computes `γ`, `Γ` and `g_n` by exact diagonalization.
pub fn knabe_inputs(p: &ModelParams, n: usize) -> Result<KnabeInputs> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("the finite-size criterion needs n >= 2, got {n}")));
    }
    let mut gamma = f64::INFINITY;
    let mut big_gamma: f64 = 0.0;
    for l in [6, 7] {
        gamma = gamma.min(spectral_gap(l, p, Boundary::Open, None)?);
        big_gamma = big_gamma.max(*full_spectrum(l, p, Boundary::Open)?.last().expect("nonempty"));
    }
    let base = 3 * (n + 1);
    let g_n = (base..=base + 5)
        .map(|l| spectral_gap(l, p, Boundary::Open, None))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(KnabeInputs { n, gamma, big_gamma, g_n })
}

/// The periodic gap bound with the outcome of the criterion `g_n > Γ/n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicBound {
    pub criterion_ok: bool,
    /// `γ n/(2Γ(n−1)) (g_n − Γ/n)`; nonpositive when the criterion fails.
    pub value: f64,
}

/// `γ n/(2Γ(n−1)) (g_n − Γ/n)`, valid for periodic chains of length `6N + r`
/// with `N > n`.
pub fn periodic_gap_bound(k: &KnabeInputs) -> PeriodicBound {
    let n = k.n as f64;
    let value = k.gamma * n / (2.0 * k.big_gamma * (n - 1.0)) * (k.g_n - k.big_gamma / n);
    PeriodicBound { criterion_ok: value > 0.0, value }
}

/// Finite-size criterion for sums of projectors: `n/(n−1) (g − 1/n)`, where
/// `g` is the smallest gap of the `n`-term subsystem Hamiltonians.
pub fn knabe_bound(n: usize, min_local_gap: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    let n = n as f64;
    Ok(n / (n - 1.0) * (min_local_gap - 1.0 / n))
}

/// Martingale norm at one chain length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartingaleNorm {
    pub l: usize,
    pub lambda: f64,
    /// `‖G_{Λ₂}(1 − G_Λ)G_{Λ₁}‖²`.
    pub epsilon_sq: f64,
    /// `‖G_{Λ₂}(1 − G_Λ)C_Λ G_{Λ₁}‖²` with `C_Λ` the tiling projector.
    pub reduced_sq: f64,
}

/// Dense `2^L × k` matrix whose columns are `v ⊗ |s⟩` (`window_first = false`)
/// or `|s⟩ ⊗ v`, for every basis vector `v` and every configuration `s` of
/// the remaining sites.
fn embedded_basis(l: usize, basis: &[SparseState], window_first: bool) -> DMatrix<f64> {
    let w = basis.first().map_or(0, |v| v.len());
    let rest = l - w;
    let mut m = DMatrix::zeros(1 << l, basis.len() << rest);
    let mut col = 0;
    for s in 0..(1u64 << rest) {
        for v in basis {
            for (b, a) in v.terms() {
                let row = if window_first { b | s << w } else { s | b << rest };
                m[(row as usize, col)] = a;
            }
            col += 1;
        }
    }
    m
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// `‖G_{Λ₂}(1 − G_Λ)G_{Λ₁}‖²` on `Λ = [1, L]` with `Λ₁` the first `L − 3`
/// sites and `Λ₂` the last 9, together with the same norm after inserting the
/// tiling projector `C_Λ` in front of `G_{Λ₁}`.
///
/// With orthonormal bases `Q₁, Q₂, Q` of the three ranges the operator equals
/// `Q₂ (Q₂ᵀQ₁ − Q₂ᵀQ QᵀQ₁) Q₁ᵀ`, so only the small middle factor is decomposed.
pub fn martingale_epsilon(l: usize, lambda: f64) -> Result<MartingaleNorm> {
    if lambda <= 0.0 {
        return Err(Error::InvalidArgument("the martingale estimate needs lambda > 0".into()));
    }
    if l < 11 {
        return Err(Error::InvalidArgument(format!("the martingale estimate needs L >= 11, got {l}")));
    }
    if l > MAX_DENSE_LEN {
        return Err(Error::DimensionOverflow(format!("martingale operator on {l} sites")));
    }
    let g = ground_projector(l, lambda)?.basis_matrix()?;
    let g1 = ground_projector(l - MARTINGALE_OVERLAP, lambda)?;
    let g2 = ground_projector(MARTINGALE_WINDOW, lambda)?;
    let q1 = embedded_basis(l, g1.basis(), true);
    let q2 = embedded_basis(l, g2.basis(), false);
    let q2t = q2.transpose();
    let q2g = &q2t * &g;
    let middle = |q1: &DMatrix<f64>| &q2t * q1 - &q2g * (g.transpose() * q1);
    let epsilon = spectral_norm(&middle(&q1));
    let mut c_q1 = q1;
    let mask = low_mask(l);
    for row in 0..c_q1.nrows() {
        if !is_tiling_configuration(l, row as u64 & mask) {
            c_q1.row_mut(row).fill(0.0);
        }
    }
    let reduced = spectral_norm(&middle(&c_q1));
    Ok(MartingaleNorm { l, lambda, epsilon_sq: epsilon * epsilon, reduced_sq: reduced * reduced })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_relations() {
        for r in [0.0, 0.3, 1.0, 7.0] {
            let c = SpectralConstants::new(r).unwrap();
            assert!((c.mu_plus * c.mu_minus + r).abs() < 1e-12);
            assert!((c.mu_plus + c.mu_minus - 1.0).abs() < 1e-12);
            assert!(c.mu <= 0.0 && c.mu > -1.0);
        }
    }

    #[test]
    fn f_vanishes_at_zero() {
        assert_eq!(f_approx(0.0, 73).unwrap().value, 0.0);
        assert_eq!(f_n(4, 0.0).unwrap(), 0.0);
        assert!(f_approx(36.0, 73).unwrap().certified.is_none());
    }

    #[test]
    fn martingale_bound_edges() {
        assert_eq!(martingale_bound(2.0, 0.0, 3), (2.0, true));
        assert!(!martingale_bound(2.0, 1.0 / 3f64.sqrt() + 1e-15, 3).1);
        assert!((knabe_bound(3, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }
}
