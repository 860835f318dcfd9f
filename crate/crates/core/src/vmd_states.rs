//! Ground states built from tilings: VMD states, squeezed Tao–Thouless
//! fragments, their norms and the ground-space projectors.
//!
//! States are stored unnormalized. The amplitude of the configuration of a
//! tiling `D` is `λ^{#D}` where `#D` counts the λ-weighted tiles of `D`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::state::SparseState;
use crate::tiling::{
    enumerate_roots, expand_root, particle_content, DominoKind, LeftBoundary, RightBoundary,
    RootTiling, MAX_DENSE_LEN,
};

/// Smallest interval on which the VMD states span the kernel of the open chain
/// (apart from the single extra state at `L = 7`).
pub const MIN_GROUND_LEN: usize = 5;

/// The VMD state of a root: `Σ_D λ^{#D} |σ(D)⟩` over the tilings generated by the root.
pub fn vmd_state(root: &RootTiling, lambda: f64) -> Result<SparseState> {
    let mut state = SparseState::zero(root.interval_length())?;
    for tiling in expand_root(root) {
        let amp = lambda.powi(tiling.dimer_count() as i32);
        state.add_term(particle_content(&tiling).bits(), amp);
    }
    Ok(state)
}

/// The VMD state with the common factor `λ^{b}` of the `b` boundary dimers removed.
///
/// For `λ ≠ 0` this spans the same ray as [`vmd_state`]; at `λ = 0` it stays
/// nonzero for roots with boundary dimers.
pub fn vmd_state_reduced(root: &RootTiling, lambda: f64) -> Result<SparseState> {
    let fixed = root.boundary_dimers();
    let mut state = SparseState::zero(root.interval_length())?;
    for tiling in expand_root(root) {
        let amp = lambda.powi((tiling.dimer_count() - fixed) as i32);
        state.add_term(particle_content(&tiling).bits(), amp);
    }
    Ok(state)
}

fn check_j(j: usize) -> Result<()> {
    if (1..=3).contains(&j) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("last-monomer length j must be 1, 2 or 3, got {j}")))
    }
}

/// The root of `n` monomers whose last monomer has length `j`.
fn run_root(n: usize, j: usize) -> Result<RootTiling> {
    check_j(j)?;
    let (interior, right) = match j {
        3 => (vec![DominoKind::Monomer; n], RightBoundary::Empty),
        1 => (vec![DominoKind::Monomer; n - 1], RightBoundary::Right1Monomer),
        _ => (vec![DominoKind::Monomer; n - 1], RightBoundary::Right2Monomer),
    };
    RootTiling::new(LeftBoundary::Empty, interior, right)
}

/// Squeezed Tao–Thouless fragment `φ_n^{(j)}` on `3(n−1)+j` sites.
///
/// `n = 0` gives the scalar state of the empty interval.
pub fn squeezed_tt(n: usize, j: usize, lambda: f64) -> Result<SparseState> {
    check_j(j)?;
    if n == 0 {
        return Ok(SparseState::scalar_one());
    }
    vmd_state(&run_root(n, j)?, lambda)
}

/// `φ_n = φ_n^{(3)}`, the fragment of `n` full monomers on `3n` sites.
pub fn phi(n: usize, lambda: f64) -> SparseState {
    squeezed_tt(n, 3, lambda).expect("j = 3 is valid")
}

/// Truncated dimer configuration `σ_d^{(j)}`: `0110`, `01100` or `011000`.
pub fn sigma_d(j: usize) -> Result<SparseState> {
    check_j(j)?;
    let s = ["0110", "01100", "011000"][j - 1];
    SparseState::basis_str(s)
}

/// Squared norm `C_n = ‖φ_n‖² = (μ₊^{n+1} − μ₋^{n+1})/(μ₊ − μ₋)` with `r = λ²`.
pub fn norm_sq_closed(n: usize, r: f64) -> f64 {
    let d = (1.0 + 4.0 * r).sqrt();
    let mp = 0.5 * (1.0 + d);
    let mm = 0.5 * (1.0 - d);
    let k = (n + 1) as i32;
    (mp.powi(k) - mm.powi(k)) / d
}

/// Squared norm from the recursion `C_n = C_{n−1} + r C_{n−2}`, `C_0 = C_1 = 1`.
pub fn norm_sq_recursive(n: usize, r: f64) -> f64 {
    let (mut a, mut b) = (1.0, 1.0);
    for _ in 1..n {
        let c = b + r * a;
        a = b;
        b = c;
    }
    b
}

/// `α_n = C_{n−1}/C_n = (1/μ₊)(1 − μⁿ)/(1 − μ^{n+1})` with `μ = μ₋/μ₊`.
pub fn alpha(n: usize, r: f64) -> f64 {
    let d = (1.0 + 4.0 * r).sqrt();
    let mp = 0.5 * (1.0 + d);
    let mu = (1.0 - d) / (1.0 + d);
    let n = n as i32;
    (1.0 - mu.powi(n)) / (1.0 - mu.powi(n + 1)) / mp
}

/// The state `η_n^{(j)} = −λ α_{n−1} φ_{n−1} ⊗ φ_1^{(j)} + φ_{n−2} ⊗ σ_d^{(j)}`.
///
/// It lives on the same sites as `φ_n^{(j)}` and is orthogonal to it.
pub fn eta_state(n: usize, j: usize, lambda: f64) -> Result<SparseState> {
    check_j(j)?;
    if n < 2 {
        return Err(Error::InvalidArgument(format!("eta states need n >= 2, got {n}")));
    }
    if lambda < 0.0 {
        return Err(Error::InvalidArgument("lambda must be nonnegative".into()));
    }
    let a = alpha(n - 1, lambda * lambda);
    let first = phi(n - 1, lambda).tensor(&squeezed_tt(1, j, lambda)?)?;
    let second = phi(n - 2, lambda).tensor(&sigma_d(j)?)?;
    Ok(second.add_scaled(-lambda * a, &first))
}

/// An orthogonal projector given by an orthonormal family of sparse vectors.
#[derive(Clone, Debug)]
pub struct GroundProjector {
    len: usize,
    basis: Vec<SparseState>,
}

impl GroundProjector {
    /// Wraps vectors that are already orthonormal.
    pub fn from_orthonormal(len: usize, basis: Vec<SparseState>) -> Result<Self> {
        if let Some(v) = basis.iter().find(|v| v.len() != len) {
            return Err(Error::InvalidArgument(format!(
                "basis vector on {} sites for a projector on {len} sites",
                v.len()
            )));
        }
        Ok(GroundProjector { len, basis })
    }

    /// Number of sites.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True if the projector acts on the empty interval.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Rank of the projector.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Orthonormal basis of the range.
    pub fn basis(&self) -> &[SparseState] {
        &self.basis
    }

    /// `G ψ` for a state on the same interval.
    pub fn apply(&self, psi: &SparseState) -> SparseState {
        let mut out = SparseState::zero(self.len).expect("length checked");
        for v in &self.basis {
            let c = v.dot(psi);
            if c != 0.0 {
                out = out.add_scaled(c, v);
            }
        }
        out
    }

    /// `(1 ⊗ G ⊗ 1) ψ` with `G` acting on sites `offset+1 ..= offset+len` of `ψ`.
    pub fn apply_on_window(&self, psi: &SparseState, offset: usize) -> Result<SparseState> {
        if offset + self.len > psi.len() {
            return Err(Error::InvalidArgument(format!(
                "window [{}, {}] outside a state on {} sites",
                offset + 1,
                offset + self.len,
                psi.len()
            )));
        }
        let window = crate::tiling::low_mask(self.len) << offset;
        let mut groups: std::collections::BTreeMap<u64, Vec<(u64, f64)>> = Default::default();
        for (b, a) in psi.terms() {
            groups.entry(b & !window).or_default().push(((b & window) >> offset, a));
        }
        let mut out = SparseState::zero(psi.len())?;
        for (outside, local_terms) in groups {
            let local = SparseState::from_terms(self.len, local_terms)?;
            for (b, a) in self.apply(&local).terms() {
                out.add_term(outside | b << offset, a);
            }
        }
        Ok(out)
    }

    /// Basis vectors as the columns of a dense `2^L × rank` matrix.
    pub fn basis_matrix(&self) -> Result<DMatrix<f64>> {
        if self.len > MAX_DENSE_LEN {
            return Err(Error::DimensionOverflow(format!("2^{} rows", self.len)));
        }
        let mut q = DMatrix::zeros(1 << self.len, self.basis.len());
        for (k, v) in self.basis.iter().enumerate() {
            for (b, a) in v.terms() {
                q[(b as usize, k)] = a;
            }
        }
        Ok(q)
    }

    /// The projector as a dense `2^L × 2^L` matrix.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let q = self.basis_matrix()?;
        Ok(&q * q.transpose())
    }
}

/// Normalized reduced VMD states of every root of `[1, L]` with `N` particles,
/// in canonical root order. `None` selects all particle numbers.
pub fn vmd_basis(l: usize, particles: Option<usize>, lambda: f64) -> Vec<SparseState> {
    enumerate_roots(l)
        .iter()
        .filter(|r| particles.is_none_or(|n| r.particle_number() == n))
        .map(|r| {
            vmd_state_reduced(r, lambda)
                .and_then(|s| s.normalized())
                .expect("enumerated roots are short and their reduced states nonzero")
        })
        .collect()
}

/// The configuration `1100011`, the kernel vector at `L = 7` outside the VMD span.
pub fn exceptional_l7_state() -> SparseState {
    SparseState::basis_str("1100011").expect("valid literal")
}

/// Projector onto the span of the VMD states of `[1, L]`.
///
/// Distinct roots have disjoint supports, so the normalized states already
/// form an orthonormal basis. At `L = 7` the configuration `1100011`, which
/// carries no tiling, is appended so that the range equals the kernel of the
/// open Hamiltonian. At `λ = 0` the reduced states are used, which keeps
/// roots with boundary dimers in the basis.
pub fn ground_projector(l: usize, lambda: f64) -> Result<GroundProjector> {
    if l < MIN_GROUND_LEN {
        return Err(Error::InvalidArgument(format!(
            "ground projectors need L >= {MIN_GROUND_LEN}, got {l}"
        )));
    }
    if l > MAX_DENSE_LEN + 6 {
        return Err(Error::DimensionOverflow(format!("ground projector on {l} sites")));
    }
    let mut basis = vmd_basis(l, None, lambda);
    if l == 7 {
        basis.push(exceptional_l7_state());
    }
    GroundProjector::from_orthonormal(l, basis)
}
