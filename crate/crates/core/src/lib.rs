//! Exact diagonalization of the one-dimensional anyonic Hubbard model.
//!
//! The crate is organised bottom-up:
//!
//! * [`fock`]: occupation basis and anyonic ladder operators,
//! * [`model`]: Hamiltonian assembly, sector blocks, numerical and closed-form spectra,
//! * [`entanglement`]: partial traces onto one-particle subspaces and von Neumann entropies,
//! * [`dynamics`]: evolution in a uniform electric field via a rotating frame,
//! * [`thermal`]: partition function, one- and two-body correlators, quasi-momentum distribution.

pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod model;
pub mod thermal;

pub use error::{Error, Result};
pub use fock::{FockBasis, FockSpace, FockState, Mode, OperatorKind, SectorKey, Spin};
pub use linalg::{CMatrix, CVector, C64};
pub use model::{EigenLabel, ModelParams, SpectralDecomposition};
