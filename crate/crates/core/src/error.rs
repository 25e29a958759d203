use thiserror::Error;

use crate::fock::{Mode, SectorKey};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mode {mode} is not valid for a chain of {sites} sites")]
    InvalidMode { mode: Mode, sites: usize },

    #[error("unsupported site count {sites}: {reason}")]
    UnsupportedSites { sites: usize, reason: &'static str },

    #[error("operator algebra violated for ({first}, {second}) in `{relation}`: deviation {deviation:e}")]
    AlgebraViolation {
        first: Mode,
        second: Mode,
        relation: &'static str,
        deviation: f64,
    },

    #[error("basis/parameter mismatch: {0}")]
    BasisMismatch(String),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("Hamiltonian leaks between sectors {from} and {to} (element {deviation:e})")]
    SectorLeakage {
        from: SectorKey,
        to: SectorKey,
        deviation: f64,
    },

    #[error("state has support in several particle-number sectors")]
    MixedParticleNumber,

    #[error("state has no support on the traced subspace (N_M = {0:e})")]
    NoSupport(f64),

    #[error("invalid density matrix: eigenvalue {0:e} is negative")]
    InvalidDensity(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),
}
