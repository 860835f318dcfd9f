//! Exact ground states, spectra, spectral-gap bounds and correlation functions
//! of the truncated ν = 1/3 fractional quantum Hall chain in its spin
//! representation.
//!
//! The chain lives on an interval of `L` sites with occupation numbers
//! `n_x ∈ {0, 1}`. Its Hamiltonian is
//!
//! ```text
//! H = Σ_x n_x n_{x+2} + κ Σ_x q_x† q_x,    q_x = σ⁻_{x+1} σ⁻_{x+2} − λ σ⁻_x σ⁻_{x+3}
//! ```
//!
//! and its ground states are labelled by tilings of the interval with voids,
//! monomers and dimers. The modules follow the data flow of a calculation:
//!
//! * [`tiling`]: tile catalog, root tilings, substitution expansion and the
//!   configuration parser.
//! * [`vmd_states`]: ground states in the occupation basis, their norms and
//!   ground-space projectors.
//! * [`hamiltonian`]: sparse Hamiltonians for open, periodic and Dirichlet
//!   boundary conditions, particle-number sectors and lattice symmetries.
//! * [`spectra`]: dense and Lanczos eigensolvers, kernel dimensions, gaps and
//!   parameter sweeps.
//! * [`bounds`]: the gap-bound pipeline built from the `f` curve, the
//!   martingale estimate and the finite-size criterion for periodic chains.
//! * [`correlations`]: dynamic-programming expectations of diagonal
//!   observables, decay rates, string order and dislocation states.

// Guards such as `!(x > 0.0)` are written that way so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod correlations;
pub mod error;
pub mod hamiltonian;
pub mod operator;
pub mod spectra;
pub mod state;
pub mod tiling;
pub mod vmd_states;

pub use bounds::{FApprox, FCurve, KnabeInputs, SpectralConstants};
pub use correlations::{DiagonalObservable, DislocationWeights};
pub use error::{Error, Result};
pub use hamiltonian::{Boundary, ModelParams, PhysicalParams, SymmetryOps};
pub use operator::SparseOperator;
pub use spectra::{SolverMethod, SpectrumResult};
pub use state::{DenseState, SparseState};
pub use tiling::{Configuration, DominoKind, LeftBoundary, RightBoundary, RootTiling, Tile, VmdTiling};
pub use vmd_states::GroundProjector;
