//! The chain Hamiltonian in the occupation basis.
//!
//! ```text
//! H = Σ_x n_x n_{x+2} + κ Σ_x q_x† q_x,    q_x = σ⁻_{x+1} σ⁻_{x+2} − λ σ⁻_x σ⁻_{x+3}
//! ```
//!
//! `q_x† q_x` acts on the four sites `x..x+3`. Its diagonal part is
//! `n_{x+1} n_{x+2} + λ² n_x n_{x+3}` and it couples `…0110…` and `…1001…`
//! with amplitude `−λ`. All matrix elements are real and carry no fermionic
//! string signs.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::SparseOperator;
use crate::state::SparseState;
use crate::tiling::low_mask;

/// Largest chain for which the full `2^L` operator is assembled.
pub const MAX_FULL_LEN: usize = 20;

/// Largest chain accepted by sector constructions.
pub const MAX_SECTOR_LEN: usize = 30;

/// Smallest periodic chain for which spectra are computed. Below it some
/// `q_x` terms wrap onto their own support.
pub const MIN_PERIODIC_LEN: usize = 8;

/// Boundary conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Terms fully inside `[1, L]`.
    Open,
    /// Terms wrap around with `x ≡ x + L`.
    Periodic,
    /// Open terms plus `n_1 n_2 + n_{L−1} n_L`.
    Dirichlet,
}

impl Boundary {
    /// Lower-case name used in tables.
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
            Boundary::Dirichlet => "dirichlet",
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" | "obc" => Ok(Boundary::Open),
            "periodic" | "pbc" => Ok(Boundary::Periodic),
            "dirichlet" => Ok(Boundary::Dirichlet),
            other => Err(Error::Parse(format!("unknown boundary condition {other:?}"))),
        }
    }
}

/// Coupling constants `λ ≥ 0` and `κ > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda: f64,
    pub kappa: f64,
}

impl ModelParams {
    /// Validated parameters.
    pub fn new(lambda: f64, kappa: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidArgument(format!("kappa must be finite and > 0, got {kappa}")));
        }
        Ok(ModelParams { lambda, kappa })
    }

    /// `λ` with `κ = κ(λ)` on the physical curve.
    pub fn physical(lambda: f64) -> Result<Self> {
        ModelParams::new(lambda, physical_kappa(lambda)?)
    }
}

/// Cylinder geometry parameter `α = ℓ/R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub alpha_cyl: f64,
}

impl PhysicalParams {
    /// Validated geometry.
    pub fn new(alpha_cyl: f64) -> Result<Self> {
        if !(alpha_cyl.is_finite() && alpha_cyl > 0.0) {
            return Err(Error::InvalidArgument(format!("alpha must be > 0, got {alpha_cyl}")));
        }
        Ok(PhysicalParams { alpha_cyl })
    }

    /// `λ = 3 e^{−2α²}` and `κ = e^{3α²/2}/4`.
    pub fn model_params(&self) -> ModelParams {
        let a2 = self.alpha_cyl * self.alpha_cyl;
        ModelParams { lambda: 3.0 * (-2.0 * a2).exp(), kappa: (1.5 * a2).exp() / 4.0 }
    }
}

/// `κ(λ) = (3^{3/4}/4) λ^{−3/4}`.
pub fn physical_kappa(lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("physical kappa needs lambda > 0, got {lambda}")));
    }
    Ok(3f64.powf(0.75) / 4.0 * lambda.powf(-0.75))
}

/// Sites of the interaction terms, 0-based.
struct Terms {
    pairs: Vec<(usize, usize)>,
    quads: Vec<[usize; 4]>,
}

fn terms(l: usize, bc: Boundary) -> Terms {
    let mut pairs = Vec::new();
    let mut quads = Vec::new();
    match bc {
        Boundary::Open | Boundary::Dirichlet => {
            pairs.extend((0..l.saturating_sub(2)).map(|x| (x, x + 2)));
            quads.extend((0..l.saturating_sub(3)).map(|x| [x, x + 1, x + 2, x + 3]));
            if bc == Boundary::Dirichlet {
                pairs.push((0, 1));
                pairs.push((l - 2, l - 1));
            }
        }
        Boundary::Periodic => {
            pairs.extend((0..l).map(|x| (x, (x + 2) % l)));
            quads.extend((0..l).map(|x| [x, (x + 1) % l, (x + 2) % l, (x + 3) % l]));
        }
    }
    Terms { pairs, quads }
}

fn check_len(l: usize, bc: Boundary, max: usize) -> Result<()> {
    let min = if bc == Boundary::Periodic { MIN_PERIODIC_LEN } else { 4 };
    if l < min {
        return Err(Error::InvalidArgument(format!(
            "{} chains need L >= {min}, got {l}",
            bc.name()
        )));
    }
    if l > max {
        return Err(Error::DimensionOverflow(format!("L = {l} exceeds {max}")));
    }
    Ok(())
}

/// Calls `emit(target, amplitude)` for every nonzero `⟨target|H|bits⟩`.
fn for_each_element(t: &Terms, p: &ModelParams, bits: u64, mut emit: impl FnMut(u64, f64)) {
    let n = |x: usize| (bits >> x & 1) as f64;
    let mut diag = 0.0;
    for &(a, b) in &t.pairs {
        diag += n(a) * n(b);
    }
    let r = p.lambda * p.lambda;
    for &[a, b, c, d] in &t.quads {
        diag += p.kappa * (n(b) * n(c) + r * n(a) * n(d));
        let occ = (n(a) as u8, n(b) as u8, n(c) as u8, n(d) as u8);
        let flip = (1u64 << a) | (1 << b) | (1 << c) | (1 << d);
        if p.lambda != 0.0 && (occ == (0, 1, 1, 0) || occ == (1, 0, 0, 1)) {
            emit(bits ^ flip, -p.kappa * p.lambda);
        }
    }
    if diag != 0.0 {
        emit(bits, diag);
    }
}

/// The Hamiltonian on the full `2^L`-dimensional space.
pub fn build(l: usize, p: &ModelParams, bc: Boundary) -> Result<SparseOperator> {
    check_len(l, bc, MAX_FULL_LEN)?;
    let t = terms(l, bc);
    let mut triplets = Vec::new();
    for bits in 0..1u64 << l {
        for_each_element(&t, p, bits, |target, v| triplets.push((target as usize, bits as usize, v)));
    }
    SparseOperator::from_triplets(1 << l, triplets)
}

/// All configurations of `L` sites with `N` particles, ascending.
pub fn sector_basis(l: usize, n: usize) -> Result<Vec<u64>> {
    if n > l {
        return Err(Error::InvalidArgument(format!("N = {n} exceeds L = {l}")));
    }
    if l > MAX_SECTOR_LEN {
        return Err(Error::DimensionOverflow(format!("sector basis on {l} sites")));
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(0);
        return Ok(out);
    }
    // Gosper's hack walks the n-subsets of l bits in increasing order.
    let mut v: u64 = (1 << n) - 1;
    let limit = 1u64 << l;
    while v < limit {
        out.push(v);
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    Ok(out)
}

/// The block of `H` on the `N`-particle sector, built directly in the sector basis.
pub fn build_sector(l: usize, n: usize, p: &ModelParams, bc: Boundary) -> Result<(Vec<u64>, SparseOperator)> {
    check_len(l, bc, MAX_SECTOR_LEN)?;
    let basis = sector_basis(l, n)?;
    let t = terms(l, bc);
    let index: std::collections::HashMap<u64, usize> =
        basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut triplets = Vec::new();
    for (col, &bits) in basis.iter().enumerate() {
        for_each_element(&t, p, bits, |target, v| triplets.push((index[&target], col, v)));
    }
    let op = SparseOperator::from_triplets(basis.len(), triplets)?;
    Ok((basis, op))
}

/// The `N`-particle block of the open Hamiltonian of the sub-interval
/// `[a, b]` (1-based), acting on a chain of `L` sites as `1 ⊗ H_{[a,b]} ⊗ 1`.
pub fn build_sector_window(
    l: usize,
    n: usize,
    a: usize,
    b: usize,
    p: &ModelParams,
) -> Result<(Vec<u64>, SparseOperator)> {
    if a == 0 || b > l || b < a + 3 {
        return Err(Error::InvalidArgument(format!("window [{a}, {b}] invalid on {l} sites")));
    }
    check_len(l, Boundary::Open, MAX_SECTOR_LEN)?;
    let local = terms(b - a + 1, Boundary::Open);
    let shift = a - 1;
    let t = Terms {
        pairs: local.pairs.iter().map(|&(x, y)| (x + shift, y + shift)).collect(),
        quads: local.quads.iter().map(|q| q.map(|x| x + shift)).collect(),
    };
    let basis = sector_basis(l, n)?;
    let index: std::collections::HashMap<u64, usize> =
        basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut triplets = Vec::new();
    for (col, &bits) in basis.iter().enumerate() {
        for_each_element(&t, p, bits, |target, v| triplets.push((index[&target], col, v)));
    }
    let op = SparseOperator::from_triplets(basis.len(), triplets)?;
    Ok((basis, op))
}

/// The block of an assembled full-space operator on the `N`-particle sector.
pub fn sector_block(h: &SparseOperator, l: usize, n: usize) -> Result<SparseOperator> {
    if h.dim() != 1 << l {
        return Err(Error::InvalidArgument(format!(
            "operator of dimension {} is not a {l}-site operator",
            h.dim()
        )));
    }
    let basis: Vec<usize> = sector_basis(l, n)?.into_iter().map(|b| b as usize).collect();
    h.restrict(&basis)
}

/// `H ψ` for a sparse state, without assembling the matrix.
pub fn apply_to_state(p: &ModelParams, bc: Boundary, psi: &SparseState) -> Result<SparseState> {
    let l = psi.len();
    check_len(l, bc, crate::tiling::MAX_PACKED_LEN)?;
    let t = terms(l, bc);
    let mut out = SparseState::zero(l)?;
    for (bits, a) in psi.terms() {
        for_each_element(&t, p, bits, |target, v| out.add_term(target, v * a));
    }
    Ok(out)
}

/// The invariant 2×2 block spanned by the two boundary modes of the open
/// chain, and its eigenvalues from the closed form.
pub fn boundary_mode_block(p: &ModelParams) -> ([[f64; 2]; 2], [f64; 2]) {
    let (l, k) = (p.lambda, p.kappa);
    let r = l * l;
    let m = [[k * r, -k * l], [-k * l, 1.0 + k * (1.0 + r)]];
    let s = ((1.0 + k).powi(2) + 4.0 * k * k * r).sqrt();
    let lo = k * r + 0.5 * ((1.0 + k) - s);
    let hi = k * r + 0.5 * ((1.0 + k) + s);
    (m, [lo, hi])
}

/// Translation `T` and the diagonal unitaries `U = e^{2πiN/L}`,
/// `V = e^{2πi Σ_x x n_x / L}` of the periodic chain.
#[derive(Clone, Debug)]
pub struct SymmetryOps {
    len: usize,
    translation: Vec<u64>,
    u_phase: Vec<Complex<f64>>,
    v_phase: Vec<Complex<f64>>,
}

impl SymmetryOps {
    /// Number of sites.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True for a chain without sites.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Image of a configuration under `T`, which moves site `x` to `x + 1`.
    pub fn translate(&self, bits: u64) -> u64 {
        self.translation[bits as usize]
    }

    /// Phase of `U` on a configuration.
    pub fn u(&self, bits: u64) -> Complex<f64> {
        self.u_phase[bits as usize]
    }

    /// Phase of `V` on a configuration.
    pub fn v(&self, bits: u64) -> Complex<f64> {
        self.v_phase[bits as usize]
    }

    /// Dense matrix of `T`.
    pub fn t_matrix(&self) -> DMatrix<Complex<f64>> {
        let d = 1 << self.len;
        let mut m = DMatrix::zeros(d, d);
        for b in 0..d {
            m[(self.translation[b] as usize, b)] = Complex::new(1.0, 0.0);
        }
        m
    }

    /// Dense matrix of `U`.
    pub fn u_matrix(&self) -> DMatrix<Complex<f64>> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.u_phase.clone()))
    }

    /// Dense matrix of `V`.
    pub fn v_matrix(&self) -> DMatrix<Complex<f64>> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.v_phase.clone()))
    }
}

/// Symmetry operators of the periodic chain on `L` sites.
pub fn symmetry_ops(l: usize) -> Result<SymmetryOps> {
    if l == 0 || l > MAX_FULL_LEN {
        return Err(Error::InvalidArgument(format!("symmetry operators need 1 <= L <= {MAX_FULL_LEN}")));
    }
    let d = 1u64 << l;
    let mask = low_mask(l);
    let mut translation = Vec::with_capacity(d as usize);
    let mut u_phase = Vec::with_capacity(d as usize);
    let mut v_phase = Vec::with_capacity(d as usize);
    for b in 0..d {
        translation.push(((b << 1) | (b >> (l - 1))) & mask);
        let n = b.count_ones() as f64;
        let moment: u64 = (0..l).filter(|&x| b >> x & 1 == 1).map(|x| x as u64 + 1).sum();
        u_phase.push(Complex::from_polar(1.0, 2.0 * PI * n / l as f64));
        v_phase.push(Complex::from_polar(1.0, 2.0 * PI * (moment % l as u64) as f64 / l as f64));
    }
    Ok(SymmetryOps { len: l, translation, u_phase, v_phase })
}
