//! Grand-canonical thermal averages `⟨O⟩ = tr(O e^{-βH}) / Z`.
//!
//! Traces are taken in the energy eigenbasis with energies measured from the
//! ground state, so large `β` does not overflow.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockSpace, Mode, MonomialOperator, OperatorKind, Spin};
use crate::linalg::{cis, CMatrix, C64, ZERO};
use crate::model::{build_hamiltonian, closed_form_spectrum, diagonalize, EigenLabel, ModelParams, TwoSiteDerived};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    /// Inverse temperature.
    pub beta: f64,
    pub model: ModelParams,
}

impl ThermalParams {
    pub fn new(beta: f64, model: ModelParams) -> Result<Self> {
        let tp = ThermalParams { beta, model };
        tp.validate()?;
        Ok(tp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "inverse temperature must be positive and finite, got {}",
                self.beta
            )));
        }
        self.model.validate()
    }
}

/// Index `(j1 s1, j2 s2; j3 s3, j4 s4)` of `⟨a†_1 a†_2 a_3 a_4⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairIndex(pub [Mode; 4]);

impl PairIndex {
    pub fn new(c1: Mode, c2: Mode, a3: Mode, a4: Mode) -> Self {
        PairIndex([c1, c2, a3, a4])
    }

    /// Spin is conserved: `s1 + s2 = s3 + s4`.
    pub fn conserves_spin(&self) -> bool {
        let [a, b, c, d] = self.0;
        a.spin.twice_sz() + b.spin.twice_sz() == c.spin.twice_sz() + d.spin.twice_sz()
    }

    /// Every index over `sites` sites, lexicographic in canonical mode order.
    pub fn all(sites: usize) -> Vec<PairIndex> {
        let modes: Vec<Mode> = Mode::all(sites).collect();
        let mut out = Vec::with_capacity(modes.len().pow(4));
        for &a in &modes {
            for &b in &modes {
                for &c in &modes {
                    for &d in &modes {
                        out.push(PairIndex([a, b, c, d]));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for PairIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a},{b};{c},{d}")
    }
}

impl FromStr for PairIndex {
    type Err = Error;

    /// `1u,2u;1u,2u`
    fn from_str(s: &str) -> Result<Self> {
        let modes = s
            .split([',', ';'])
            .map(|m| m.parse::<Mode>())
            .collect::<Result<Vec<_>>>()?;
        match modes.as_slice() {
            [a, b, c, d] => Ok(PairIndex([*a, *b, *c, *d])),
            _ => Err(Error::InvalidArgument(format!("expected four modes in `{s}`"))),
        }
    }
}

/// Boltzmann-weighted spectrum of one parameter set.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub params: ThermalParams,
    space: FockSpace,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    probabilities: Vec<f64>,
    ln_z: f64,
}

impl Ensemble {
    pub fn new(tp: &ThermalParams) -> Result<Self> {
        tp.validate()?;
        let space = tp.model.space()?;
        let spec = diagonalize(&build_hamiltonian(&tp.model, &space)?)?;
        let e0 = spec.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = spec.eigenvalues.iter().map(|e| (-tp.beta * (e - e0)).exp()).collect();
        let total: f64 = weights.iter().sum();
        Ok(Ensemble {
            params: *tp,
            space,
            probabilities: weights.iter().map(|w| w / total).collect(),
            ln_z: total.ln() - tp.beta * e0,
            eigenvalues: spec.eigenvalues,
            eigenvectors: spec.eigenvectors,
        })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn partition_function(&self) -> f64 {
        self.ln_z.exp()
    }

    pub fn ln_partition_function(&self) -> f64 {
        self.ln_z
    }

    pub fn expectation(&self, op: &MonomialOperator) -> C64 {
        let mut acc = ZERO;
        for (i, &p) in self.probabilities.iter().enumerate() {
            let v = self.eigenvectors.column(i).into_owned();
            acc += v.dotc(&op.apply(&v)) * p;
        }
        acc
    }

    pub fn expectation_matrix(&self, m: &CMatrix) -> C64 {
        let mut acc = ZERO;
        for (i, &p) in self.probabilities.iter().enumerate() {
            let v = self.eigenvectors.column(i);
            acc += v.dotc(&(m * v)) * p;
        }
        acc
    }

    pub fn mean_particle_number(&self) -> f64 {
        self.expectation_matrix(&self.space.total_number_matrix()).re
    }

    /// `g1[a, b] = ⟨a†_a a_b⟩`, rows and columns in canonical mode order.
    pub fn one_particle_density(&self) -> CMatrix {
        let modes: Vec<Mode> = self.space.modes().collect();
        let mut g = CMatrix::zeros(modes.len(), modes.len());
        for (r, &a) in modes.iter().enumerate() {
            for (c, &b) in modes.iter().enumerate() {
                let op = self
                    .space
                    .product(&[(a, OperatorKind::Create), (b, OperatorKind::Annihilate)])
                    .expect("modes come from the space");
                g[(r, c)] = self.expectation(&op);
            }
        }
        g
    }

    pub fn pair_correlation(&self, idx: PairIndex) -> Result<C64> {
        use OperatorKind::{Annihilate as A, Create as C};
        let [a, b, c, d] = idx.0;
        let op = self.space.product(&[(a, C), (b, C), (c, A), (d, A)])?;
        Ok(self.expectation(&op))
    }

    pub fn correlators(&self) -> CorrelatorSet {
        let g2 = PairIndex::all(self.space.sites())
            .into_iter()
            .map(|idx| (idx, self.pair_correlation(idx).expect("indices come from the space")))
            .collect();
        CorrelatorSet {
            z: self.partition_function(),
            g1: self.one_particle_density(),
            g2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CorrelatorSet {
    pub z: f64,
    pub g1: CMatrix,
    pub g2: Vec<(PairIndex, C64)>,
}

impl CorrelatorSet {
    pub fn g2(&self, idx: PairIndex) -> Option<C64> {
        self.g2.iter().find(|(i, _)| *i == idx).map(|(_, v)| *v)
    }
}

pub fn partition_function(tp: &ThermalParams) -> Result<f64> {
    Ok(Ensemble::new(tp)?.partition_function())
}

pub fn one_particle_density(tp: &ThermalParams) -> Result<CMatrix> {
    Ok(Ensemble::new(tp)?.one_particle_density())
}

pub fn pair_correlation(tp: &ThermalParams, idx: PairIndex) -> Result<C64> {
    Ensemble::new(tp)?.pair_correlation(idx)
}

/// Closed-form partition function of the two-site model, term by term.
pub fn partition_function_closed(tp: &ThermalParams) -> Result<f64> {
    tp.validate()?;
    tp.model.require_two_sites()?;
    let ModelParams { kappa: k, u, v, j, mu, nu, .. } = tp.model;
    let TwoSiteDerived { v1, v2, .. } = tp.model.derived();
    let b = tp.beta;
    let c = nu.cos();
    let root = (16.0 * k * k + v2 * v2).sqrt();
    let terms = [
        (1.0, 0.0),
        (2.0, b * (k + mu)),
        (2.0, -b * (k - mu)),
        (2.0, -b * (-k + u + 4.0 * v - 2.0 * j * c - 3.0 * mu)),
        (2.0, -b * (k + u + 4.0 * v - 2.0 * j * c - 3.0 * mu)),
        (1.0, -2.0 * b * (u + 4.0 * v - 2.0 * j * c - 2.0 * mu)),
        (3.0, -2.0 * b * (v - j * c - mu)),
        (1.0, -b * (u - 2.0 * mu)),
        (1.0, -0.5 * b * (-4.0 * mu - root + v1)),
        (1.0, -0.5 * b * (-4.0 * mu + root + v1)),
    ];
    let top = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|(m, x)| m * (x - top).exp()).sum();
    Ok(sum * top.exp())
}

/// Boltzmann factors `e^{-β(ε - ε_min)}` of the labelled two-site levels, with
/// the matching shifted partition function.
struct ClosedWeights {
    params: ModelParams,
    derived: TwoSiteDerived,
    factors: Vec<(EigenLabel, f64)>,
    z: f64,
}

impl ClosedWeights {
    fn new(tp: &ThermalParams) -> Result<Self> {
        tp.validate()?;
        let levels = closed_form_spectrum(&tp.model)?;
        let e0 = levels.iter().map(|l| l.energy).fold(f64::INFINITY, f64::min);
        let factors: Vec<(EigenLabel, f64)> = levels
            .iter()
            .map(|l| (l.label, (-tp.beta * (l.energy - e0)).exp()))
            .collect();
        let z = factors.iter().map(|f| f.1).sum();
        Ok(ClosedWeights {
            params: tp.model,
            derived: tp.model.derived(),
            factors,
            z,
        })
    }

    /// `e^{-βε_{n,k}} / Z`
    fn w(&self, n: usize, k: usize) -> f64 {
        let label = EigenLabel::new(n, k);
        self.factors.iter().find(|f| f.0 == label).expect("label exists").1 / self.z
    }

    /// `κ/Υ` and `v2/Υ`, both zero where `Υ` vanishes.
    fn ratios(&self) -> (f64, f64) {
        let u = self.derived.upsilon;
        if u == 0.0 {
            (0.0, 0.0)
        } else {
            (self.params.kappa / u, self.derived.v2 / u)
        }
    }
}

/// Closed-form one-particle density matrix, canonical mode order.
pub fn one_particle_density_closed(tp: &ThermalParams) -> Result<CMatrix> {
    let cw = ClosedWeights::new(tp)?;
    let w = |n, k| cw.w(n, k);
    let (kr, _) = cw.ratios();
    let diag = 0.5
        * (w(1, 1) + w(1, 2) + 3.0 * w(2, 1) + w(2, 2) + w(2, 4) + w(2, 5) + 3.0 * w(3, 1) + 3.0 * w(3, 2)
            + 2.0 * w(4, 1));
    let off = 0.5 * (-4.0 * kr * w(2, 4) + 4.0 * kr * w(2, 5) + w(1, 1) - w(1, 2) + w(3, 1) - w(3, 2));
    Ok(CMatrix::from_fn(4, 4, |r, c| {
        let (a, b) = (Mode::from_index(r), Mode::from_index(c));
        if a.spin != b.spin {
            ZERO
        } else if a.site == b.site {
            C64::from(diag)
        } else {
            C64::from(off)
        }
    }))
}

fn pair(spec: [(usize, Spin); 4]) -> PairIndex {
    PairIndex(spec.map(|(site, spin)| Mode::new(site, spin)))
}

/// Closed-form pair correlator, or `None` when the index is not covered by
/// the closed forms, their phase relations, the spin selection rule or
/// the exclusion principle.
pub fn pair_correlation_closed(tp: &ThermalParams, idx: PairIndex) -> Result<Option<C64>> {
    use Spin::{Down as D, Up as U};
    tp.model.require_two_sites()?;
    for m in idx.0 {
        m.validate(2)?;
    }
    let [a, b, c, d] = idx.0;
    if !idx.conserves_spin() || a == b || c == d {
        return Ok(Some(ZERO));
    }
    let cw = ClosedWeights::new(tp)?;
    let w = |n, k| cw.w(n, k);
    let (kr, vr) = cw.ratios();
    let nu = tp.model.nu;
    let e_minus = cis(-nu);
    let e_plus = cis(nu);

    let same_spin = e_minus * -(w(2, 1) + w(3, 1) + w(3, 2) + w(4, 1));
    let doublon = C64::from(
        0.25 * (-2.0 * w(2, 2) - w(2, 4) - w(2, 5) - 4.0 * (w(3, 1) + w(3, 2) + w(4, 1))
            + vr * (w(2, 5) - w(2, 4))),
    );
    let doublon_hop = e_plus * (0.25 * (2.0 * w(2, 2) - w(2, 4) - w(2, 5) + vr * (w(2, 5) - w(2, 4))));
    let assisted = C64::from(kr * (w(2, 4) - w(2, 5)) + 0.5 * (w(3, 2) - w(3, 1)));
    let opposite_spin = e_minus
        * (0.25
            * (-2.0 * w(2, 1) - 4.0 * (w(3, 1) + w(3, 2) + w(4, 1)) + (vr - 1.0) * w(2, 4)
                - (1.0 + vr) * w(2, 5)));
    let spin_flip = e_minus * (0.25 * (-2.0 * w(2, 1) + (1.0 - vr) * w(2, 4) + (1.0 + vr) * w(2, 5)));

    let table = [
        (pair([(1, U), (2, U), (1, U), (2, U)]), same_spin),
        (pair([(1, D), (2, D), (1, D), (2, D)]), same_spin),
        (pair([(1, U), (1, D), (1, U), (1, D)]), doublon),
        (pair([(2, U), (2, D), (2, U), (2, D)]), doublon),
        (pair([(1, U), (1, D), (2, U), (2, D)]), doublon_hop),
        (pair([(1, U), (2, D), (1, U), (2, D)]), opposite_spin),
        (pair([(1, U), (2, D), (1, D), (2, U)]), spin_flip),
        (pair([(1, U), (1, D), (1, U), (2, D)]), assisted),
        (pair([(1, U), (1, D), (1, D), (2, U)]), -assisted),
        (pair([(2, U), (2, D), (1, U), (2, D)]), e_minus * assisted),
        (pair([(2, U), (2, D), (1, D), (2, U)]), -e_minus * assisted),
        (pair([(1, U), (2, D), (1, U), (1, D)]), e_minus * assisted),
        (pair([(1, U), (2, D), (2, U), (2, D)]), assisted),
        (pair([(1, D), (2, U), (1, U), (1, D)]), -e_minus * assisted),
        (pair([(1, D), (2, U), (2, U), (2, D)]), -assisted),
    ];
    Ok(table.iter().find(|(i, _)| *i == idx).map(|(_, v)| *v))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentumPoint {
    pub k: f64,
    pub n: f64,
    /// Imaginary part of the Fourier sum; zero up to round-off.
    pub imag: f64,
}

/// `n_{k,s} = Σ_{j,j'} e^{ik(j-j')} g1[(j,s),(j',s)]`.
pub fn quasimomentum_distribution(g1: &CMatrix, sites: usize, spin: Spin, ks: &[f64]) -> Result<Vec<MomentumPoint>> {
    if g1.shape() != (2 * sites, 2 * sites) {
        return Err(Error::BasisMismatch(format!(
            "one-particle density is {}x{}, expected {}x{}",
            g1.nrows(),
            g1.ncols(),
            2 * sites,
            2 * sites
        )));
    }
    Ok(ks
        .iter()
        .map(|&k| {
            let mut acc = ZERO;
            for j in 1..=sites {
                for jp in 1..=sites {
                    let (a, b) = (Mode::new(j, spin).index(), Mode::new(jp, spin).index());
                    acc += cis(k * (j as f64 - jp as f64)) * g1[(a, b)];
                }
            }
            MomentumPoint { k, n: acc.re, imag: acc.im }
        })
        .collect())
}

/// `2πm/L` for `m = 0..L`.
pub fn discrete_momenta(sites: usize) -> Vec<f64> {
    (0..sites)
        .map(|m| 2.0 * std::f64::consts::PI * m as f64 / sites as f64)
        .collect()
}
