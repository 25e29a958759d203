//! Anyonic Hubbard Hamiltonian on an open chain.
//!
//! ```text
//! H = -κ Σ_<ij> Σ_s a†_{i,s} a_{j,s} + U Σ_i n_{i↑} n_{i↓} + V Σ_<ij> Σ_{s,s'} n_{i,s} n_{j,s'}
//!     + J Σ_<ij> Σ_{s,s'} a†_{i,s} a†_{j,s'} a_{i,s'} a_{j,s} - μ Σ_{i,s} n_{i,s}
//! ```
//!
//! `<ij>` runs over ordered nearest-neighbour pairs in both directions, so the
//! single bond of the two-site model is visited twice.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockSpace, FockState, Mode, OperatorKind, SectorKey, Spin};
use crate::linalg::{self, cis, max_abs, CMatrix, CVector, C64, ONE};

/// Hermiticity tolerance accepted by [`diagonalize`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Largest cross-sector matrix element tolerated by [`block_decompose`].
pub const LEAKAGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub sites: usize,
    /// Hopping amplitude κ.
    pub kappa: f64,
    /// On-site interaction.
    pub u: f64,
    /// Nearest-neighbour density interaction.
    pub v: f64,
    /// Nearest-neighbour exchange interaction.
    pub j: f64,
    /// Chemical potential.
    pub mu: f64,
    /// Statistics parameter (radians).
    pub nu: f64,
}

impl ModelParams {
    pub fn two_site(kappa: f64, u: f64, v: f64, j: f64, mu: f64, nu: f64) -> Self {
        ModelParams {
            sites: 2,
            kappa,
            u,
            v,
            j,
            mu,
            nu,
        }
    }

    /// κ=1, U=4, V=1, J=0.25, μ=0.5 at ν=0: the parameter set used for the
    /// entropy, dynamics and correlator datasets.
    pub fn reference() -> Self {
        ModelParams::two_site(1.0, 4.0, 1.0, 0.25, 0.5, 0.0)
    }

    pub fn with_nu(self, nu: f64) -> Self {
        ModelParams { nu, ..self }
    }

    pub fn with_mu(self, mu: f64) -> Self {
        ModelParams { mu, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("kappa", self.kappa),
            ("u", self.u),
            ("v", self.v),
            ("j", self.j),
            ("mu", self.mu),
            ("nu", self.nu),
        ];
        if let Some((name, value)) = fields.iter().find(|(_, x)| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("parameter {name} = {value} is not finite")));
        }
        if self.sites == 0 || self.sites > crate::fock::MAX_SITES {
            return Err(Error::UnsupportedSites {
                sites: self.sites,
                reason: "the dense Fock engine supports 1..=4 sites",
            });
        }
        Ok(())
    }

    pub fn require_two_sites(&self) -> Result<()> {
        self.validate()?;
        if self.sites != 2 {
            return Err(Error::UnsupportedSites {
                sites: self.sites,
                reason: "closed forms exist only for the two-site model",
            });
        }
        Ok(())
    }

    /// Fock space matching `sites` and `nu`.
    pub fn space(&self) -> Result<FockSpace> {
        self.validate()?;
        FockSpace::new(self.sites, self.nu)
    }

    pub fn derived(&self) -> TwoSiteDerived {
        TwoSiteDerived::new(self)
    }
}

/// Shorthands of the two-site solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSiteDerived {
    /// `2J cos ν + U + 2V`
    pub v1: f64,
    /// `-2J cos ν + U - 2V`
    pub v2: f64,
    /// `Υ = sqrt(16κ² + v2²)`
    pub upsilon: f64,
}

impl TwoSiteDerived {
    pub fn new(p: &ModelParams) -> Self {
        let c = p.nu.cos();
        let v1 = 2.0 * p.j * c + p.u + 2.0 * p.v;
        let v2 = -2.0 * p.j * c + p.u - 2.0 * p.v;
        TwoSiteDerived {
            v1,
            v2,
            upsilon: (16.0 * p.kappa * p.kappa + v2 * v2).sqrt(),
        }
    }
}

fn check_space(p: &ModelParams, space: &FockSpace) -> Result<()> {
    p.validate()?;
    if space.sites() != p.sites {
        return Err(Error::BasisMismatch(format!(
            "parameters describe {} sites but the Fock space has {}",
            p.sites,
            space.sites()
        )));
    }
    if space.nu() != p.nu {
        return Err(Error::BasisMismatch(format!(
            "parameters carry ν = {} but the Fock space was built for ν = {}",
            p.nu,
            space.nu()
        )));
    }
    Ok(())
}

/// Ordered nearest-neighbour pairs of the open chain, both directions.
pub fn bonds(sites: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..sites).flat_map(|i| [(i, i + 1), (i + 1, i)])
}

/// Assemble `H` with hopping term `a†_i a_j` weighted by `-κ · hop(i, j)`.
pub(crate) fn assemble(
    p: &ModelParams,
    space: &FockSpace,
    hop: impl Fn(usize, usize) -> C64,
) -> Result<CMatrix> {
    use OperatorKind::{Annihilate as A, Create as C};
    check_space(p, space)?;
    let basis = space.basis();
    let mut h = CMatrix::zeros(space.dim(), space.dim());

    // Density terms are diagonal in the occupation basis.
    for (pos, &state) in basis.states().iter().enumerate() {
        let n = |site: usize, spin: Spin| state.contains(Mode::new(site, spin)) as u8 as f64;
        let mut e = -p.mu * state.particle_count() as f64;
        for site in 1..=p.sites {
            e += p.u * n(site, Spin::Up) * n(site, Spin::Down);
        }
        for (i, j) in bonds(p.sites) {
            let ni = state.site_occupation(i) as f64;
            let nj = state.site_occupation(j) as f64;
            e += p.v * ni * nj;
        }
        h[(pos, pos)] += C64::from(e);
    }

    for (i, j) in bonds(p.sites) {
        for s in Spin::ALL {
            let op = space.product(&[(Mode::new(i, s), C), (Mode::new(j, s), A)])?;
            op.add_to(&mut h, -p.kappa * hop(i, j));
        }
        if p.j != 0.0 {
            for s in Spin::ALL {
                for s2 in Spin::ALL {
                    let op = space.product(&[
                        (Mode::new(i, s), C),
                        (Mode::new(j, s2), C),
                        (Mode::new(i, s2), A),
                        (Mode::new(j, s), A),
                    ])?;
                    op.add_to(&mut h, C64::from(p.j));
                }
            }
        }
    }
    Ok(h)
}

/// Static Hamiltonian in the basis of `space`.
pub fn build_hamiltonian(p: &ModelParams, space: &FockSpace) -> Result<CMatrix> {
    assemble(p, space, |_, _| ONE)
}

/// Hamiltonian with the hopping `a†_i a_j` dressed by the Peierls phase
/// `e^{iθ (j - i)}`. With `θ = Ωt` this is the two-site model in a uniform
/// field with vector potential `A(t) = Ωt`.
pub fn build_hamiltonian_with_flux(p: &ModelParams, space: &FockSpace, theta: f64) -> Result<CMatrix> {
    assemble(p, space, |i, j| cis(theta * (j as f64 - i as f64)))
}

#[derive(Clone, Debug)]
pub struct Block {
    pub key: SectorKey,
    pub states: Vec<FockState>,
    pub positions: Range<usize>,
    pub matrix: CMatrix,
}

/// Split `h` into its `(N, 2Sz)` blocks, checking that nothing couples
/// different sectors.
pub fn block_decompose(h: &CMatrix, basis: &FockBasis) -> Result<Vec<Block>> {
    if h.nrows() != basis.dim() || h.ncols() != basis.dim() {
        return Err(Error::BasisMismatch(format!(
            "{}x{} matrix for a basis of dimension {}",
            h.nrows(),
            h.ncols(),
            basis.dim()
        )));
    }
    let sector_of: Vec<SectorKey> = basis.states().iter().map(|s| s.sector()).collect();
    for r in 0..basis.dim() {
        for c in 0..basis.dim() {
            if sector_of[r] != sector_of[c] && h[(r, c)].norm() > LEAKAGE_TOL {
                return Err(Error::SectorLeakage {
                    from: sector_of[c],
                    to: sector_of[r],
                    deviation: h[(r, c)].norm(),
                });
            }
        }
    }
    Ok(basis
        .sectors()
        .iter()
        .map(|sector| {
            let range = sector.positions.clone();
            Block {
                key: sector.key,
                states: basis.states()[range.clone()].to_vec(),
                matrix: h.view((range.start, range.start), (range.len(), range.len())).into_owned(),
                positions: range,
            }
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub eigenvectors: CMatrix,
    /// Sector of each eigenpair, when the decomposition was done per block.
    pub sectors: Vec<Option<SectorKey>>,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.eigenvectors.column(i).into_owned()
    }

    pub fn sorted_eigenvalues(&self) -> Vec<f64> {
        let mut e = self.eigenvalues.clone();
        e.sort_by(f64::total_cmp);
        e
    }

    /// `max_i |H v_i - ε_i v_i|`
    pub fn max_residual(&self, h: &CMatrix) -> f64 {
        (0..self.len())
            .map(|i| {
                let v = self.vector(i);
                linalg::max_abs_vec(&(h * &v - v.scale(self.eigenvalues[i])))
            })
            .fold(0.0, f64::max)
    }

    /// `max |V†V - I|`
    pub fn orthonormality_deviation(&self) -> f64 {
        linalg::unitarity_deviation(&self.eigenvectors)
    }

    /// Projector onto the eigenvectors whose eigenvalue lies within `tol` of `energy`.
    pub fn projector(&self, energy: f64, tol: f64) -> CMatrix {
        let n = self.eigenvectors.nrows();
        let mut p = CMatrix::zeros(n, n);
        for i in (0..self.len()).filter(|&i| (self.eigenvalues[i] - energy).abs() <= tol) {
            let v = self.vector(i);
            p += &v * v.adjoint();
        }
        p
    }
}

/// Dense Hermitian eigen-decomposition; eigenvalues ascending, each
/// eigenvector's phase fixed by [`linalg::fix_global_phase`].
pub fn diagonalize(h: &CMatrix) -> Result<SpectralDecomposition> {
    let (eigenvalues, mut vectors) = linalg::eigh(h, HERMITIAN_TOL)?;
    for mut col in vectors.column_iter_mut() {
        let mut v = col.clone_owned();
        linalg::fix_global_phase(&mut v);
        col.copy_from(&v);
    }
    Ok(SpectralDecomposition {
        sectors: vec![None; eigenvalues.len()],
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// Diagonalize block by block so every eigenvector carries a definite sector.
/// Pairs are ordered by sector, then by energy within the sector.
pub fn diagonalize_by_sector(h: &CMatrix, basis: &FockBasis) -> Result<SpectralDecomposition> {
    let blocks = block_decompose(h, basis)?;
    let dim = basis.dim();
    let mut eigenvalues = Vec::with_capacity(dim);
    let mut sectors = Vec::with_capacity(dim);
    let mut eigenvectors = CMatrix::zeros(dim, dim);
    let mut col = 0;
    for block in &blocks {
        let spec = diagonalize(&block.matrix)?;
        for k in 0..spec.len() {
            for (offset, row) in block.positions.clone().enumerate() {
                eigenvectors[(row, col)] = spec.eigenvectors[(offset, k)];
            }
            eigenvalues.push(spec.eigenvalues[k]);
            sectors.push(Some(block.key));
            col += 1;
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        sectors,
    })
}

/// Label `φ_{n,k}` of a two-site eigenstate: `k`-th state with `n` particles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EigenLabel {
    pub particles: usize,
    pub index: usize,
}

impl EigenLabel {
    pub const fn new(particles: usize, index: usize) -> Self {
        EigenLabel { particles, index }
    }

    /// Number of labelled eigenstates with `particles` particles.
    fn count(particles: usize) -> usize {
        [1, 4, 6, 4, 1].get(particles).copied().unwrap_or(0)
    }

    /// All sixteen labels in listing order.
    pub fn all() -> impl Iterator<Item = EigenLabel> {
        (0..=4).flat_map(|n| (1..=Self::count(n)).map(move |k| EigenLabel::new(n, k)))
    }

    fn validate(self) -> Result<Self> {
        if self.index >= 1 && self.index <= Self::count(self.particles) {
            Ok(self)
        } else {
            Err(Error::InvalidArgument(format!("no two-site eigenstate labelled {self}")))
        }
    }
}

impl fmt::Display for EigenLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "phi_{}_{}", self.particles, self.index)
    }
}

impl FromStr for EigenLabel {
    type Err = Error;

    /// Accepts `2,5`, `phi_2_5`, `phi25`, `φ_{2,5}`.
    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<usize> = s
            .chars()
            .filter(|c| c.is_ascii_digit())
            .map(|c| c.to_digit(10).unwrap() as usize)
            .collect();
        match digits.as_slice() {
            [n, k] => EigenLabel::new(*n, *k).validate(),
            _ => Err(Error::InvalidArgument(format!("cannot parse eigenstate label `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosedFormLevel {
    pub label: EigenLabel,
    pub sector: SectorKey,
    pub energy: f64,
}

/// The sixteen two-site eigenvalues with their labels and sectors.
pub fn closed_form_spectrum(p: &ModelParams) -> Result<Vec<ClosedFormLevel>> {
    p.require_two_sites()?;
    let TwoSiteDerived { v1, upsilon, .. } = p.derived();
    let (k, mu, c) = (p.kappa, p.mu, p.nu.cos());
    let e2_triplet = 2.0 * (p.v - p.j * c - mu);
    let e3 = p.u + 4.0 * p.v - 2.0 * p.j * c - 3.0 * mu;
    let table: [(usize, usize, i32, f64); 16] = [
        (0, 1, 0, 0.0),
        (1, 1, 1, -k - mu),
        (1, 2, 1, k - mu),
        (1, 3, -1, -k - mu),
        (1, 4, -1, k - mu),
        (2, 1, 2, e2_triplet),
        (2, 2, 0, p.u - 2.0 * mu),
        (2, 3, 0, e2_triplet),
        (2, 4, 0, 0.5 * (-4.0 * mu + upsilon + v1)),
        (2, 5, 0, 0.5 * (-4.0 * mu - upsilon + v1)),
        (2, 6, -2, e2_triplet),
        (3, 1, 1, e3 - k),
        (3, 2, 1, e3 + k),
        (3, 3, -1, e3 - k),
        (3, 4, -1, e3 + k),
        (4, 1, 0, 2.0 * (-2.0 * p.j * c - 2.0 * mu + p.u + 4.0 * p.v)),
    ];
    Ok(table
        .iter()
        .map(|&(n, idx, twice_sz, energy)| ClosedFormLevel {
            label: EigenLabel::new(n, idx),
            sector: SectorKey::new(n, twice_sz),
            energy,
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct ClosedFormState {
    pub level: ClosedFormLevel,
    /// Unit-norm vector over the full Fock space, global phase fixed.
    pub vector: CVector,
}

/// Unnormalized coefficients of `φ_{2,4}` and `φ_{2,5}` on
/// `(e^{-iν}|1↑,1↓⟩ + |2↑,2↓⟩, |1↑,2↓⟩ - |1↓,2↑⟩)`.
///
/// The textbook form divides by `Υ ∓ v2`, which vanishes at `κ = 0`; each
/// vector is rescaled by whichever of `Υ ± v2` is larger so both stay finite
/// and tend to their `κ → 0⁺` limits.
fn hybrid_coefficients(p: &ModelParams) -> [(f64, f64); 2] {
    let TwoSiteDerived { v2, upsilon, .. } = p.derived();
    let k4 = 4.0 * p.kappa;
    if upsilon == 0.0 {
        [(1.0, -1.0), (-1.0, -1.0)]
    } else if v2 >= 0.0 {
        [(upsilon + v2, -k4), (-k4, -(upsilon + v2))]
    } else {
        [(k4, -(upsilon - v2)), (-(upsilon - v2), -k4)]
    }
}

/// Analytic eigenvector for one label.
pub fn closed_form_eigenvector(p: &ModelParams, space: &FockSpace, label: EigenLabel) -> Result<ClosedFormState> {
    p.require_two_sites()?;
    if space.sites() != 2 {
        return Err(Error::BasisMismatch("closed-form eigenvectors need a two-site Fock space".into()));
    }
    let label = label.validate()?;
    let level = closed_form_spectrum(p)?
        .into_iter()
        .find(|l| l.label == label)
        .expect("every valid label has a level");
    let (u1, d1, u2, d2) = (Mode::up(1), Mode::down(1), Mode::up(2), Mode::down(2));
    let ket = |modes: &[Mode]| FockState::from_modes(modes.iter().copied());
    let phase = cis(-p.nu);
    let one = ONE;
    let terms: Vec<(FockState, C64)> = match (label.particles, label.index) {
        (0, 1) => vec![(FockState::VACUUM, one)],
        (1, 1) => vec![(ket(&[u1]), one), (ket(&[u2]), one)],
        (1, 2) => vec![(ket(&[u1]), -one), (ket(&[u2]), one)],
        (1, 3) => vec![(ket(&[d1]), one), (ket(&[d2]), one)],
        (1, 4) => vec![(ket(&[d1]), -one), (ket(&[d2]), one)],
        (2, 1) => vec![(ket(&[u1, u2]), one)],
        (2, 2) => vec![(ket(&[u1, d1]), -phase), (ket(&[u2, d2]), one)],
        (2, 3) => vec![(ket(&[u1, d2]), one), (ket(&[d1, u2]), one)],
        (2, idx @ (4 | 5)) => {
            let (d, s) = hybrid_coefficients(p)[idx - 4];
            vec![
                (ket(&[u1, d1]), phase * d),
                (ket(&[u2, d2]), C64::from(d)),
                (ket(&[u1, d2]), C64::from(s)),
                (ket(&[d1, u2]), C64::from(-s)),
            ]
        }
        (2, 6) => vec![(ket(&[d1, d2]), one)],
        (3, 1) => vec![(ket(&[u1, d1, u2]), -phase), (ket(&[u1, u2, d2]), one)],
        (3, 2) => vec![(ket(&[u1, d1, u2]), phase), (ket(&[u1, u2, d2]), one)],
        (3, 3) => vec![(ket(&[u1, d1, d2]), -phase), (ket(&[d1, u2, d2]), one)],
        (3, 4) => vec![(ket(&[u1, d1, d2]), phase), (ket(&[d1, u2, d2]), one)],
        (4, 1) => vec![(ket(&[u1, d1, u2, d2]), one)],
        _ => unreachable!("label validated above"),
    };
    let mut vector = linalg::normalized(space.vector(terms))?;
    linalg::fix_global_phase(&mut vector);
    Ok(ClosedFormState { level, vector })
}

/// All sixteen analytic eigenvectors in listing order.
pub fn closed_form_eigenvectors(p: &ModelParams, space: &FockSpace) -> Result<Vec<ClosedFormState>> {
    EigenLabel::all()
        .map(|label| closed_form_eigenvector(p, space, label))
        .collect()
}

/// `max |[A, B]|`
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a * b - b * a))
}
