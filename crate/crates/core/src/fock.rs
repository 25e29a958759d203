//! Fock space of an `L`-site spin-1/2 chain with anyonic exchange statistics.
//!
//! Modes are labelled by `(site, spin)` with the canonical order
//! `1↑ < 1↓ < 2↑ < 2↓ < ...`, i.e. `index = 2 (site - 1) + spin`. An occupation
//! pattern is stored as a bitmask over canonical indices and stands for the ket
//!
//! ```text
//! |m1, m2, ..., mN⟩ = a†_{m1} a†_{m2} ... a†_{mN} |0⟩,   m1 < m2 < ... < mN
//! ```
//!
//! The ladder operators obey the deformed algebra
//!
//! ```text
//! a_{j,s} a_{k,s'}  + e^{ iν sgn(j-k)} a_{k,s'}  a_{j,s} = 0
//! a_{j,s} a†_{k,s'} + e^{-iν sgn(j-k)} a†_{k,s'} a_{j,s} = δ_jk δ_ss'
//! ```
//!
//! with `sgn(0) = 0`, so operators on the same site anticommute for every `ν`.
//! Putting a freshly created mode `m` into canonical position moves `a†_m`
//! past every occupied mode `m' < m`, each crossing contributing
//! `-e^{iν sgn(site(m) - site(m'))}`. Annihilation uses the conjugate factor.
//! `ν = 0` reproduces Jordan-Wigner fermions, `ν = π` hardcore bosons.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cis, max_abs, CMatrix, CVector, C64, ONE};

/// Largest chain handled by the dense engine (Fock dimension 256).
pub const MAX_SITES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const ALL: [Spin; 2] = [Spin::Up, Spin::Down];

    fn offset(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    /// `+1` for up, `-1` for down (twice the `S_z` eigenvalue).
    pub fn twice_sz(self) -> i32 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "↑",
            Spin::Down => "↓",
        })
    }
}

/// A single-particle mode `(site, spin)`; sites are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mode {
    pub site: usize,
    pub spin: Spin,
}

impl Mode {
    pub const fn new(site: usize, spin: Spin) -> Self {
        Mode { site, spin }
    }

    pub const fn up(site: usize) -> Self {
        Mode::new(site, Spin::Up)
    }

    pub const fn down(site: usize) -> Self {
        Mode::new(site, Spin::Down)
    }

    /// Position in the canonical order, `2 (site - 1) + (0 | 1)`.
    ///
    /// Panics on `site == 0`; use [`Mode::validate`] for untrusted input.
    pub fn index(self) -> usize {
        2 * (self.site - 1) + self.spin.offset()
    }

    pub fn from_index(index: usize) -> Self {
        let spin = if index.is_multiple_of(2) { Spin::Up } else { Spin::Down };
        Mode::new(index / 2 + 1, spin)
    }

    pub fn validate(self, sites: usize) -> Result<Self> {
        if self.site == 0 || self.site > sites {
            Err(Error::InvalidMode { mode: self, sites })
        } else {
            Ok(self)
        }
    }

    /// All `2L` modes in canonical order.
    pub fn all(sites: usize) -> impl Iterator<Item = Mode> {
        (0..2 * sites).map(Mode::from_index)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.site, self.spin)
    }
}

impl FromStr for Mode {
    type Err = Error;

    /// Accepts `1u`, `1up`, `1↑`, `2d`, `2down`, `2↓`, ...
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let split = s
            .find(|c: char| !c.is_ascii_digit())
            .ok_or_else(|| Error::InvalidArgument(format!("mode `{s}` has no spin label")))?;
        let (site, spin) = s.split_at(split);
        let site: usize = site
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("mode `{s}` has no site number")))?;
        let spin = match spin.to_ascii_lowercase().as_str() {
            "u" | "up" | "↑" => Spin::Up,
            "d" | "dn" | "down" | "↓" => Spin::Down,
            other => return Err(Error::InvalidArgument(format!("unknown spin label `{other}`"))),
        };
        if site == 0 {
            return Err(Error::InvalidArgument("sites are numbered from 1".into()));
        }
        Ok(Mode::new(site, spin))
    }
}

/// `(N, 2 S_z)` quantum numbers of a Hamiltonian block.
///
/// Sectors sort by particle number ascending, then by `S_z` descending.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SectorKey {
    pub particles: usize,
    pub twice_sz: i32,
}

impl SectorKey {
    pub const fn new(particles: usize, twice_sz: i32) -> Self {
        SectorKey { particles, twice_sz }
    }
}

impl Ord for SectorKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.particles
            .cmp(&other.particles)
            .then(other.twice_sz.cmp(&self.twice_sz))
    }
}

impl PartialOrd for SectorKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SectorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice_sz % 2 == 0 {
            write!(f, "({}, {})", self.particles, self.twice_sz / 2)
        } else {
            write!(f, "({}, {}/2)", self.particles, self.twice_sz)
        }
    }
}

/// Occupation pattern over the `2L` modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct FockState(u32);

impl FockState {
    pub const VACUUM: FockState = FockState(0);

    pub const fn from_bits(bits: u32) -> Self {
        FockState(bits)
    }

    pub fn from_modes<I: IntoIterator<Item = Mode>>(modes: I) -> Self {
        FockState(modes.into_iter().fold(0, |acc, m| acc | (1 << m.index())))
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, mode: Mode) -> bool {
        self.0 >> mode.index() & 1 == 1
    }

    pub fn particle_count(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn twice_sz(self) -> i32 {
        self.modes().map(|m| m.spin.twice_sz()).sum()
    }

    pub fn sector(self) -> SectorKey {
        SectorKey::new(self.particle_count(), self.twice_sz())
    }

    /// Occupied modes in canonical order.
    pub fn modes(self) -> impl Iterator<Item = Mode> {
        let bits = self.0;
        (0..32usize).filter(move |i| bits >> i & 1 == 1).map(Mode::from_index)
    }

    pub fn site_occupation(self, site: usize) -> usize {
        self.modes().filter(|m| m.site == site).count()
    }

    /// Number of sites holding both spins.
    pub fn doublons(self) -> usize {
        let up = self.0 & 0x5555_5555;
        let down = (self.0 >> 1) & 0x5555_5555;
        (up & down).count_ones() as usize
    }

    fn with(self, mode: Mode) -> Self {
        FockState(self.0 | (1 << mode.index()))
    }

    fn without(self, mode: Mode) -> Self {
        FockState(self.0 & !(1 << mode.index()))
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return f.write_str("|0⟩");
        }
        let labels: Vec<String> = self.modes().map(|m| m.to_string()).collect();
        write!(f, "|{}⟩", labels.join(","))
    }
}

/// Contiguous run of basis positions sharing one `(N, 2Sz)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sector {
    pub key: SectorKey,
    pub positions: std::ops::Range<usize>,
}

/// Ordered basis of all `2^{2L}` occupation patterns.
///
/// States are grouped by sector (see [`SectorKey`] ordering). Inside a sector
/// states with more doubly occupied sites come first, then the remaining ties
/// are broken lexicographically on occupied canonical indices. For `L = 2`
/// this reproduces the listing
/// `|0⟩, |1↑⟩, |2↑⟩, |1↓⟩, |2↓⟩, |1↑,2↑⟩, |1↑,1↓⟩, |2↑,2↓⟩, |1↑,2↓⟩, |1↓,2↑⟩, ...`.
#[derive(Clone, Debug)]
pub struct FockBasis {
    sites: usize,
    states: Vec<FockState>,
    position: Vec<usize>,
    sectors: Vec<Sector>,
}

impl FockBasis {
    pub fn new(sites: usize) -> Result<Self> {
        if sites == 0 || sites > MAX_SITES {
            return Err(Error::UnsupportedSites {
                sites,
                reason: "the dense Fock engine supports 1..=4 sites",
            });
        }
        let dim = 1usize << (2 * sites);
        let mut states: Vec<FockState> = (0..dim as u32).map(FockState).collect();
        states.sort_by(|a, b| {
            a.sector()
                .cmp(&b.sector())
                .then(b.doublons().cmp(&a.doublons()))
                .then_with(|| {
                    let ia: Vec<usize> = a.modes().map(Mode::index).collect();
                    let ib: Vec<usize> = b.modes().map(Mode::index).collect();
                    ia.cmp(&ib)
                })
        });
        let mut position = vec![0; dim];
        for (i, s) in states.iter().enumerate() {
            position[s.bits() as usize] = i;
        }
        let mut sectors: Vec<Sector> = Vec::new();
        for (i, s) in states.iter().enumerate() {
            match sectors.last_mut() {
                Some(last) if last.key == s.sector() => last.positions.end = i + 1,
                _ => sectors.push(Sector {
                    key: s.sector(),
                    positions: i..i + 1,
                }),
            }
        }
        Ok(FockBasis {
            sites,
            states,
            position,
            sectors,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, position: usize) -> FockState {
        self.states[position]
    }

    pub fn position(&self, state: FockState) -> usize {
        self.position[state.bits() as usize]
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn sector(&self, key: SectorKey) -> Option<&Sector> {
        self.sectors.iter().find(|s| s.key == key)
    }

    /// Positions of all states with `particles` particles, any `S_z`.
    pub fn particle_positions(&self, particles: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.states[i].particle_count() == particles)
            .collect()
    }
}

/// Square matrix with at most one nonzero entry per column: the shape of any
/// product of ladder operators in an occupation basis.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialOperator {
    columns: Vec<Option<(usize, C64)>>,
}

impl MonomialOperator {
    pub fn identity(dim: usize) -> Self {
        MonomialOperator {
            columns: (0..dim).map(|c| Some((c, ONE))).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// Image of basis vector `column`, if nonzero.
    pub fn column(&self, column: usize) -> Option<(usize, C64)> {
        self.columns[column]
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &MonomialOperator) -> MonomialOperator {
        assert_eq!(self.dim(), rhs.dim());
        let columns = rhs
            .columns
            .iter()
            .map(|entry| {
                let (mid, a) = (*entry)?;
                let (row, b) = self.columns[mid]?;
                Some((row, a * b))
            })
            .collect();
        MonomialOperator { columns }
    }

    /// Conjugate transpose. Ladder-operator strings are injective on their
    /// support, so the adjoint is again monomial.
    pub fn adjoint(&self) -> MonomialOperator {
        let mut columns = vec![None; self.dim()];
        for (c, entry) in self.columns.iter().enumerate() {
            if let Some((r, a)) = *entry {
                debug_assert!(columns[r].is_none(), "operator is not injective");
                columns[r] = Some((c, a.conj()));
            }
        }
        MonomialOperator { columns }
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        assert_eq!(v.len(), self.dim());
        let mut out = CVector::zeros(self.dim());
        for (c, entry) in self.columns.iter().enumerate() {
            if let Some((r, a)) = *entry {
                out[r] += a * v[c];
            }
        }
        out
    }

    /// `target += coeff · self`
    pub fn add_to(&self, target: &mut CMatrix, coeff: C64) {
        for (c, entry) in self.columns.iter().enumerate() {
            if let Some((r, a)) = *entry {
                target[(r, c)] += coeff * a;
            }
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        self.add_to(&mut m, ONE);
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Create,
    Annihilate,
}

/// Phase picked up when `a†_moved` is commuted to the right of `a†_crossed`.
pub fn crossing_factor(moved: Mode, crossed: Mode, nu: f64) -> C64 {
    let sgn = match moved.site.cmp(&crossed.site) {
        Ordering::Less => -1.0,
        Ordering::Equal => 0.0,
        Ordering::Greater => 1.0,
    };
    -cis(nu * sgn)
}

/// Amplitude for inserting `mode` into `state` (which must not contain it).
fn insertion_amplitude(state: FockState, mode: Mode, nu: f64) -> C64 {
    state
        .modes()
        .take_while(|m| m.index() < mode.index())
        .fold(ONE, |acc, m| acc * crossing_factor(mode, m, nu))
}

/// Fock space for `L` sites at statistics parameter `ν`, with every ladder
/// operator pre-built.
#[derive(Clone, Debug)]
pub struct FockSpace {
    basis: FockBasis,
    nu: f64,
    creators: Vec<MonomialOperator>,
    annihilators: Vec<MonomialOperator>,
}

impl FockSpace {
    pub fn new(sites: usize, nu: f64) -> Result<Self> {
        if !nu.is_finite() {
            return Err(Error::InvalidArgument(format!("statistics parameter ν = {nu} is not finite")));
        }
        let basis = FockBasis::new(sites)?;
        let creators: Vec<MonomialOperator> = Mode::all(sites)
            .map(|mode| {
                let columns = basis
                    .states()
                    .iter()
                    .map(|&s| {
                        if s.contains(mode) {
                            None
                        } else {
                            Some((basis.position(s.with(mode)), insertion_amplitude(s, mode, nu)))
                        }
                    })
                    .collect();
                MonomialOperator { columns }
            })
            .collect();
        let annihilators = creators.iter().map(MonomialOperator::adjoint).collect();
        Ok(FockSpace {
            basis,
            nu,
            creators,
            annihilators,
        })
    }

    pub fn sites(&self) -> usize {
        self.basis.sites
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> {
        Mode::all(self.sites())
    }

    /// `a†_m |state⟩`, or `None` when the mode is already filled.
    pub fn apply_creation(&self, state: FockState, mode: Mode) -> Result<Option<(C64, FockState)>> {
        mode.validate(self.sites())?;
        if state.contains(mode) {
            return Ok(None);
        }
        Ok(Some((insertion_amplitude(state, mode, self.nu), state.with(mode))))
    }

    /// `a_m |state⟩`, or `None` when the mode is empty.
    pub fn apply_annihilation(&self, state: FockState, mode: Mode) -> Result<Option<(C64, FockState)>> {
        mode.validate(self.sites())?;
        if !state.contains(mode) {
            return Ok(None);
        }
        let rest = state.without(mode);
        Ok(Some((insertion_amplitude(rest, mode, self.nu).conj(), rest)))
    }

    pub fn creation(&self, mode: Mode) -> Result<&MonomialOperator> {
        Ok(&self.creators[mode.validate(self.sites())?.index()])
    }

    pub fn annihilation(&self, mode: Mode) -> Result<&MonomialOperator> {
        Ok(&self.annihilators[mode.validate(self.sites())?.index()])
    }

    pub fn ladder(&self, mode: Mode, kind: OperatorKind) -> Result<&MonomialOperator> {
        match kind {
            OperatorKind::Create => self.creation(mode),
            OperatorKind::Annihilate => self.annihilation(mode),
        }
    }

    /// Dense matrix of `a†_m` or `a_m`; column `c` is the image of basis state `c`.
    pub fn operator_matrix(&self, mode: Mode, kind: OperatorKind) -> Result<CMatrix> {
        Ok(self.ladder(mode, kind)?.to_dense())
    }

    /// Product of ladder operators written left to right, e.g.
    /// `[(i, Create), (j, Annihilate)]` is `a†_i a_j`.
    pub fn product(&self, factors: &[(Mode, OperatorKind)]) -> Result<MonomialOperator> {
        let mut acc = MonomialOperator::identity(self.dim());
        for &(mode, kind) in factors.iter().rev() {
            acc = self.ladder(mode, kind)?.compose(&acc);
        }
        Ok(acc)
    }

    pub fn number(&self, mode: Mode) -> Result<MonomialOperator> {
        self.product(&[(mode, OperatorKind::Create), (mode, OperatorKind::Annihilate)])
    }

    /// Diagonal matrix of the total particle number.
    pub fn total_number_matrix(&self) -> CMatrix {
        self.diagonal_matrix(|s| s.particle_count() as f64)
    }

    /// Diagonal matrix of `2 S_z = N↑ - N↓`.
    pub fn twice_sz_matrix(&self) -> CMatrix {
        self.diagonal_matrix(|s| s.twice_sz() as f64)
    }

    pub fn diagonal_matrix(&self, f: impl Fn(FockState) -> f64) -> CMatrix {
        let d = CVector::from_iterator(self.dim(), self.basis.states().iter().map(|&s| C64::from(f(s))));
        CMatrix::from_diagonal(&d)
    }

    /// Vector `Σ c |state⟩` over the full Fock space (not normalized).
    pub fn vector<I: IntoIterator<Item = (FockState, C64)>>(&self, terms: I) -> CVector {
        let mut v = CVector::zeros(self.dim());
        for (s, c) in terms {
            v[self.basis.position(s)] += c;
        }
        v
    }

    pub fn basis_vector(&self, state: FockState) -> CVector {
        self.vector([(state, ONE)])
    }

    /// Exhaustively check both defining relations over all mode pairs.
    pub fn verify_algebra(&self, tol: f64) -> Result<AlgebraReport> {
        let modes: Vec<Mode> = self.modes().collect();
        let dim = self.dim();
        let identity = CMatrix::identity(dim, dim);
        let mut max_deviation: f64 = 0.0;
        let mut pairs = 0;
        for &first in &modes {
            for &second in &modes {
                let phase = cis(self.nu * sgn(first.site, second.site));
                let a_j = self.annihilation(first)?;
                let a_k = self.annihilation(second)?;
                let c_k = self.creation(second)?;

                let mut lhs = a_j.compose(a_k).to_dense();
                a_k.compose(a_j).add_to(&mut lhs, phase);
                let dev = max_abs(&lhs);
                check(dev, tol, first, second, "a_j a_k + e^{iν sgn(j-k)} a_k a_j = 0")?;
                max_deviation = max_deviation.max(dev);

                let mut lhs = a_j.compose(c_k).to_dense();
                c_k.compose(a_j).add_to(&mut lhs, phase.conj());
                if first == second {
                    lhs -= &identity;
                }
                let dev = max_abs(&lhs);
                check(dev, tol, first, second, "a_j a†_k + e^{-iν sgn(j-k)} a†_k a_j = δ")?;
                max_deviation = max_deviation.max(dev);
                pairs += 1;
            }
        }
        Ok(AlgebraReport {
            sites: self.sites(),
            nu: self.nu,
            pairs_checked: pairs,
            max_deviation,
        })
    }
}

fn sgn(a: usize, b: usize) -> f64 {
    match a.cmp(&b) {
        Ordering::Less => -1.0,
        Ordering::Equal => 0.0,
        Ordering::Greater => 1.0,
    }
}

fn check(dev: f64, tol: f64, first: Mode, second: Mode, relation: &'static str) -> Result<()> {
    if dev < tol {
        Ok(())
    } else {
        Err(Error::AlgebraViolation {
            first,
            second,
            relation,
            deviation: dev,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlgebraReport {
    pub sites: usize,
    pub nu: f64,
    pub pairs_checked: usize,
    pub max_deviation: f64,
}

/// Build the Fock space for `(ν, L)` and check the algebra; `L` is capped at
/// [`MAX_SITES`].
pub fn verify_algebra(nu: f64, sites: usize, tol: f64) -> Result<AlgebraReport> {
    FockSpace::new(sites, nu)?.verify_algebra(tol)
}
