//! Partial trace onto a one-particle subspace and von Neumann entropy.
//!
//! For an `N`-particle state `|Φ⟩` and a set `M` of one-particle modes the
//! reduced density matrix is
//!
//! ```text
//! ρ = (1/N_M) Σ_{k∈M} a_k |Φ⟩⟨Φ| a†_k,    N_M = ⟨Φ| Σ_{k∈M} a†_k a_k |Φ⟩
//! ```
//!
//! living on the whole `(N-1)`-particle sector.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockState, Mode};
use crate::linalg::{self, max_abs, CMatrix, CVector, C64, ONE, ZERO};
use crate::model::ModelParams;

/// Amplitudes below this are treated as absent when deciding particle number.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Norm tolerance for input states.
pub const NORM_TOL: f64 = 1e-10;
/// Eigenvalues in `[-NEGATIVE_TOL, 0)` are clamped to zero; anything lower is an error.
pub const NEGATIVE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubspaceLabel {
    B1,
    B2,
    B12,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    Two,
    E,
}

impl LogBase {
    fn ln_scale(self) -> f64 {
        match self {
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::E => 1.0,
        }
    }
}

/// Modes onto which a partial trace is taken.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneParticleSubspace {
    modes: Vec<Mode>,
    label: SubspaceLabel,
}

impl OneParticleSubspace {
    pub fn new(modes: Vec<Mode>, sites: usize) -> Result<Self> {
        Self::with_label(modes, sites, SubspaceLabel::Custom)
    }

    fn with_label(modes: Vec<Mode>, sites: usize, label: SubspaceLabel) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidArgument("a one-particle subspace needs at least one mode".into()));
        }
        for (i, m) in modes.iter().enumerate() {
            m.validate(sites)?;
            if modes[..i].contains(m) {
                return Err(Error::InvalidArgument(format!("mode {m} listed twice")));
            }
        }
        Ok(OneParticleSubspace { modes, label })
    }

    /// Both spin modes of one site.
    pub fn site(site: usize, sites: usize) -> Result<Self> {
        let label = match site {
            1 => SubspaceLabel::B1,
            2 => SubspaceLabel::B2,
            _ => SubspaceLabel::Custom,
        };
        Self::with_label(vec![Mode::up(site), Mode::down(site)], sites, label)
    }

    /// Every mode of the chain.
    pub fn everything(sites: usize) -> Result<Self> {
        let label = if sites == 2 { SubspaceLabel::B12 } else { SubspaceLabel::Custom };
        Self::with_label(Mode::all(sites).collect(), sites, label)
    }

    pub fn b1() -> Self {
        Self::site(1, 2).expect("site 1 exists")
    }

    pub fn b2() -> Self {
        Self::site(2, 2).expect("site 2 exists")
    }

    pub fn b12() -> Self {
        Self::everything(2).expect("two sites")
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn label(&self) -> SubspaceLabel {
        self.label
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Parse `B1`, `B2`, `B12` or a comma-separated mode list such as `1u,2d`.
    pub fn parse(s: &str, sites: usize) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "B1" => Self::site(1, sites),
            "B2" => Self::site(2, sites),
            "B12" if sites == 2 => Self::everything(sites),
            _ => {
                let modes = s.split(',').map(Mode::from_str).collect::<Result<Vec<_>>>()?;
                Self::new(modes, sites)
            }
        }
    }
}

impl fmt::Display for OneParticleSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            SubspaceLabel::B1 => write!(f, "B1"),
            SubspaceLabel::B2 => write!(f, "B2"),
            SubspaceLabel::B12 => write!(f, "B12"),
            SubspaceLabel::Custom => {
                let names: Vec<String> = self.modes.iter().map(Mode::to_string).collect();
                write!(f, "{{{}}}", names.join(","))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReducedDensityMatrix {
    pub matrix: CMatrix,
    /// `(N-1)`-particle basis states labelling rows and columns.
    pub states: Vec<FockState>,
    pub subspace: OneParticleSubspace,
    /// `N_M`
    pub normalizer: f64,
    /// Ascending, clamped at zero.
    pub eigenvalues: Vec<f64>,
}

impl ReducedDensityMatrix {
    /// `⟨bra|ρ|ket⟩`; zero if either state lies outside the sector.
    pub fn entry(&self, bra: FockState, ket: FockState) -> C64 {
        let find = |s| self.states.iter().position(|&x| x == s);
        match (find(bra), find(ket)) {
            (Some(r), Some(c)) => self.matrix[(r, c)],
            _ => ZERO,
        }
    }

    pub fn entropy(&self, base: LogBase) -> f64 {
        entropy_of_spectrum(&self.eigenvalues, base).expect("eigenvalues were validated on construction")
    }
}

/// Particle number of a state supported on a single sector.
pub fn particle_number(space: &FockSpace, phi: &CVector) -> Result<usize> {
    if phi.len() != space.dim() {
        return Err(Error::BasisMismatch(format!(
            "state has {} components, Fock space has dimension {}",
            phi.len(),
            space.dim()
        )));
    }
    let norm = phi.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidState(format!("state norm is {norm}, expected 1")));
    }
    let mut found = None;
    for (pos, z) in phi.iter().enumerate() {
        if z.norm() > SUPPORT_TOL {
            let n = space.basis().state(pos).particle_count();
            match found {
                None => found = Some(n),
                Some(m) if m != n => return Err(Error::MixedParticleNumber),
                _ => {}
            }
        }
    }
    found.ok_or_else(|| Error::InvalidState("state has no support".into()))
}

/// `a_k |Φ⟩` for each `k ∈ M`, restricted to the `(N-1)`-particle positions.
fn lowered_states(
    space: &FockSpace,
    phi: &CVector,
    subspace: &OneParticleSubspace,
) -> Result<(usize, Vec<usize>, Vec<CVector>)> {
    let n = particle_number(space, phi)?;
    if n == 0 {
        return Err(Error::InvalidState("the vacuum has no particle to trace out".into()));
    }
    let positions = space.basis().particle_positions(n - 1);
    let mut lowered = Vec::with_capacity(subspace.len());
    for &k in subspace.modes() {
        let full = space.annihilation(k)?.apply(phi);
        lowered.push(CVector::from_iterator(positions.len(), positions.iter().map(|&p| full[p])));
    }
    Ok((n, positions, lowered))
}

fn assemble_rdm(
    space: &FockSpace,
    positions: &[usize],
    vectors: &[CVector],
    subspace: &OneParticleSubspace,
) -> Result<ReducedDensityMatrix> {
    let normalizer: f64 = vectors.iter().map(|v| v.norm_squared()).sum();
    if normalizer < SUPPORT_TOL * SUPPORT_TOL {
        return Err(Error::NoSupport(normalizer));
    }
    let d = positions.len();
    let mut matrix = CMatrix::zeros(d, d);
    for v in vectors {
        matrix += v * v.adjoint();
    }
    matrix.unscale_mut(normalizer);
    let (raw, _) = linalg::eigh(&matrix, 1e-10)?;
    let eigenvalues = clamp_spectrum(&raw)?;
    Ok(ReducedDensityMatrix {
        matrix,
        states: positions.iter().map(|&p| space.basis().state(p)).collect(),
        subspace: subspace.clone(),
        normalizer,
        eigenvalues,
    })
}

fn clamp_spectrum(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&x| {
            if x < -NEGATIVE_TOL {
                Err(Error::InvalidDensity(x))
            } else {
                Ok(x.max(0.0))
            }
        })
        .collect()
}

pub fn reduced_density_matrix(
    space: &FockSpace,
    phi: &CVector,
    subspace: &OneParticleSubspace,
) -> Result<ReducedDensityMatrix> {
    let (_, positions, lowered) = lowered_states(space, phi, subspace)?;
    assemble_rdm(space, &positions, &lowered, subspace)
}

/// Reduced density matrix built from the rotated operators
/// `b_j = Σ_k w_{jk} a_k` for a unitary `w` acting inside `M`.
pub fn reduced_density_matrix_in_basis(
    space: &FockSpace,
    phi: &CVector,
    subspace: &OneParticleSubspace,
    w: &CMatrix,
) -> Result<ReducedDensityMatrix> {
    let m = subspace.len();
    if w.shape() != (m, m) {
        return Err(Error::InvalidArgument(format!(
            "rotation is {}x{} but the subspace has {m} modes",
            w.nrows(),
            w.ncols()
        )));
    }
    let (_, positions, lowered) = lowered_states(space, phi, subspace)?;
    let rotated: Vec<CVector> = (0..m)
        .map(|j| {
            let mut acc = CVector::zeros(positions.len());
            for (k, v) in lowered.iter().enumerate() {
                acc.axpy(w[(j, k)], v, ONE);
            }
            acc
        })
        .collect();
    assemble_rdm(space, &positions, &rotated, subspace)
}

/// `-Σ λ log λ` with `0 log 0 = 0`.
pub fn entropy_of_spectrum(values: &[f64], base: LogBase) -> Result<f64> {
    let clamped = clamp_spectrum(values)?;
    let s: f64 = clamped.iter().map(|&x| xlogx(x)).sum();
    Ok(-s / base.ln_scale())
}

/// `x ln x`, zero at the origin.
fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

pub fn von_neumann_entropy(rho: &ReducedDensityMatrix, base: LogBase) -> f64 {
    rho.entropy(base)
}

/// Entropy of `|Φ⟩` after tracing out `M`.
pub fn entanglement_entropy(
    space: &FockSpace,
    phi: &CVector,
    subspace: &OneParticleSubspace,
    base: LogBase,
) -> Result<f64> {
    Ok(reduced_density_matrix(space, phi, subspace)?.entropy(base))
}

/// `𝛗_{mk} = ⟨0|a_m a_k|Φ⟩ / √N_M` for a two-particle state; rows run over
/// every mode in canonical order, columns over the modes of `M`.
#[derive(Clone, Debug)]
pub struct CoefficientMatrix {
    pub entries: CMatrix,
    pub subspace: OneParticleSubspace,
}

impl CoefficientMatrix {
    pub fn new(space: &FockSpace, phi: &CVector, subspace: &OneParticleSubspace) -> Result<Self> {
        let n = particle_number(space, phi)?;
        if n != 2 {
            return Err(Error::InvalidState(format!(
                "coefficient matrix needs a two-particle state, got N = {n}"
            )));
        }
        let vacuum = space.basis().position(FockState::VACUUM);
        let modes: Vec<Mode> = space.modes().collect();
        let mut entries = CMatrix::zeros(modes.len(), subspace.len());
        let mut normalizer = 0.0;
        for (c, &k) in subspace.modes().iter().enumerate() {
            let lowered = space.annihilation(k)?.apply(phi);
            normalizer += lowered.norm_squared();
            for (r, &m) in modes.iter().enumerate() {
                let op = space.annihilation(m)?;
                entries[(r, c)] = op.apply(&lowered)[vacuum];
            }
        }
        if normalizer < SUPPORT_TOL * SUPPORT_TOL {
            return Err(Error::NoSupport(normalizer));
        }
        entries.unscale_mut(normalizer.sqrt());
        Ok(CoefficientMatrix {
            entries,
            subspace: subspace.clone(),
        })
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.entries.clone().svd(false, false).singular_values.iter().copied().collect()
    }

    /// `𝛗 𝛗†` on the one-particle modes.
    pub fn density(&self) -> CMatrix {
        &self.entries * self.entries.adjoint()
    }
}

/// Entropy from the singular values of the coefficient matrix.
pub fn entropy_via_svd(
    space: &FockSpace,
    phi: &CVector,
    subspace: &OneParticleSubspace,
    base: LogBase,
) -> Result<f64> {
    let sv = CoefficientMatrix::new(space, phi, subspace)?.singular_values();
    let weights: Vec<f64> = sv.iter().map(|s| s * s).collect();
    entropy_of_spectrum(&weights, base)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub trials: usize,
    pub seed: u64,
    pub max_deviation: f64,
}

/// Recompute `ρ` in `trials` Haar-random bases of `M` and report the largest
/// entry-wise change.
pub fn verify_basis_invariance(
    space: &FockSpace,
    phi: &CVector,
    subspace: &OneParticleSubspace,
    trials: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    let reference = reduced_density_matrix(space, phi, subspace)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation: f64 = 0.0;
    for _ in 0..trials {
        let w = linalg::haar_unitary(subspace.len(), &mut rng);
        let rotated = reduced_density_matrix_in_basis(space, phi, subspace, &w)?;
        max_deviation = max_deviation.max(max_abs(&(&rotated.matrix - &reference.matrix)));
        max_deviation = max_deviation.max((rotated.normalizer - reference.normalizer).abs());
    }
    Ok(InvarianceReport {
        trials,
        seed,
        max_deviation,
    })
}

/// Non-local entropy of the two hybridized two-particle eigenstates:
/// `-2(¼ - κ/Υ) log(¼ - κ/Υ) - 2(¼ + κ/Υ) log(¼ + κ/Υ)`.
pub fn hybrid_entropy_closed_form(p: &ModelParams, base: LogBase) -> Result<f64> {
    p.require_two_sites()?;
    let upsilon = p.derived().upsilon;
    let r = if upsilon == 0.0 { 0.0 } else { p.kappa / upsilon };
    let s = -2.0 * xlogx(0.25 - r) - 2.0 * xlogx(0.25 + r);
    Ok(s / base.ln_scale())
}
