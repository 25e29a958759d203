//! Two-site evolution in a uniform electric field.
//!
//! With vector potential `A(t) = Ωt` the hopping picks up a Peierls phase,
//! `a†_1 a_2 → e^{iΩt} a†_1 a_2`. In every sector `H(t) = R H(0) R†` with
//! `R = e^{iΩt K}`, where `K` is the site-1 occupation shifted by a
//! per-sector constant. In the frame rotating with `R` the Hamiltonian
//!
//! ```text
//! H̃ = H(0) + Ω K
//! ```
//!
//! is static, so `W(t) = e^{iΩtK} e^{-iH̃t}` solves `i dW/dt = H(t) W` exactly.

use crate::entanglement::{entanglement_entropy, LogBase, OneParticleSubspace};
use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockState, SectorKey};
use crate::linalg::{self, cis, CMatrix, CVector, C64};
use crate::model::{block_decompose, build_hamiltonian, build_hamiltonian_with_flux, ModelParams};

/// The `(2, 0)` sector that carries the doublon dynamics.
pub const HYBRID_SECTOR: SectorKey = SectorKey::new(2, 0);

fn require_two_sites(p: &ModelParams, space: &FockSpace) -> Result<()> {
    p.validate()?;
    if p.sites != 2 || space.sites() != 2 {
        return Err(Error::UnsupportedSites {
            sites: p.sites,
            reason: "field-driven evolution is implemented for the two-site model",
        });
    }
    Ok(())
}

fn check_field(omega: f64, t: f64) -> Result<()> {
    if !omega.is_finite() {
        return Err(Error::InvalidArgument(format!("field strength {omega} is not finite")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be finite and non-negative, got {t}")));
    }
    Ok(())
}

/// `H(t)` with hopping `a†_i a_j` weighted by `e^{iΩt(j-i)}`.
pub fn time_dependent_hamiltonian(p: &ModelParams, space: &FockSpace, omega: f64, t: f64) -> Result<CMatrix> {
    require_two_sites(p, space)?;
    if !(omega.is_finite() && t.is_finite()) {
        return Err(Error::InvalidArgument("field strength and time must be finite".into()));
    }
    build_hamiltonian_with_flux(p, space, omega * t)
}

/// One sector in the rotating frame.
#[derive(Clone, Debug)]
pub struct FrameBlock {
    pub key: SectorKey,
    pub states: Vec<FockState>,
    pub positions: std::ops::Range<usize>,
    /// Diagonal of `K`.
    pub shift: Vec<f64>,
    /// `H̃ = H(0) + Ω K`
    pub generator: CMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl FrameBlock {
    /// `e^{iΩtK}`
    pub fn frame(&self, omega: f64, t: f64) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            self.shift.len(),
            self.shift.iter().map(|&k| cis(omega * t * k)),
        ))
    }

    /// `e^{-iH̃t}`
    pub fn static_part(&self, t: f64) -> CMatrix {
        linalg::unitary_from_spectrum(&self.eigenvalues, &self.eigenvectors, t)
    }
}

/// Per-sector frame shift: site-1 occupation minus the ceiling of its midrange.
fn frame_shift(states: &[FockState]) -> Vec<f64> {
    let n1: Vec<i64> = states.iter().map(|s| s.site_occupation(1) as i64).collect();
    let (lo, hi) = (*n1.iter().min().unwrap(), *n1.iter().max().unwrap());
    let centre = (lo + hi + 1).div_euclid(2);
    n1.iter().map(|&n| (n - centre) as f64).collect()
}

/// Rotating-frame data for fixed parameters and field; evaluate at any `t`.
#[derive(Clone, Debug)]
pub struct Propagator {
    pub params: ModelParams,
    pub omega: f64,
    dim: usize,
    blocks: Vec<FrameBlock>,
}

impl Propagator {
    pub fn new(p: &ModelParams, space: &FockSpace, omega: f64) -> Result<Self> {
        require_two_sites(p, space)?;
        check_field(omega, 0.0)?;
        let h0 = build_hamiltonian(p, space)?;
        let blocks = block_decompose(&h0, space.basis())?
            .into_iter()
            .map(|b| {
                let shift = frame_shift(&b.states);
                let mut generator = b.matrix;
                for (i, k) in shift.iter().enumerate() {
                    generator[(i, i)] += C64::from(omega * k);
                }
                let (eigenvalues, eigenvectors) = linalg::eigh(&generator, 1e-12)?;
                Ok(FrameBlock {
                    key: b.key,
                    states: b.states,
                    positions: b.positions,
                    shift,
                    generator,
                    eigenvalues,
                    eigenvectors,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Propagator {
            params: *p,
            omega,
            dim: space.dim(),
            blocks,
        })
    }

    pub fn blocks(&self) -> &[FrameBlock] {
        &self.blocks
    }

    pub fn block(&self, key: SectorKey) -> Option<&FrameBlock> {
        self.blocks.iter().find(|b| b.key == key)
    }

    /// Sector block of `W(t)`.
    pub fn block_at(&self, key: SectorKey, t: f64) -> Result<CMatrix> {
        check_field(self.omega, t)?;
        let b = self
            .block(key)
            .ok_or_else(|| Error::InvalidArgument(format!("no sector {key}")))?;
        Ok(b.frame(self.omega, t) * b.static_part(t))
    }

    pub fn at(&self, t: f64) -> Result<EvolutionOperator> {
        check_field(self.omega, t)?;
        let mut matrix = CMatrix::zeros(self.dim, self.dim);
        for b in &self.blocks {
            let w = b.frame(self.omega, t) * b.static_part(t);
            let start = b.positions.start;
            matrix.view_mut((start, start), (w.nrows(), w.ncols())).copy_from(&w);
        }
        Ok(EvolutionOperator {
            t,
            omega: self.omega,
            matrix,
        })
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionOperator {
    pub t: f64,
    pub omega: f64,
    pub matrix: CMatrix,
}

impl EvolutionOperator {
    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }

    pub fn unitarity_deviation(&self) -> f64 {
        linalg::unitarity_deviation(&self.matrix)
    }
}

pub fn evolution_operator(p: &ModelParams, space: &FockSpace, omega: f64, t: f64) -> Result<EvolutionOperator> {
    Propagator::new(p, space, omega)?.at(t)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyPoint {
    pub t: f64,
    pub entropy: std::result::Result<f64, Error>,
}

/// Entropy of `W(t)|Φ₀⟩` after tracing out `M`, one result per time.
pub fn entropy_vs_time(
    p: &ModelParams,
    space: &FockSpace,
    omega: f64,
    phi0: &CVector,
    subspace: &OneParticleSubspace,
    times: &[f64],
    base: LogBase,
) -> Result<Vec<EntropyPoint>> {
    let prop = Propagator::new(p, space, omega)?;
    Ok(times
        .iter()
        .map(|&t| EntropyPoint {
            t,
            entropy: prop
                .at(t)
                .and_then(|w| entanglement_entropy(space, &w.apply(phi0), subspace, base)),
        })
        .collect())
}

/// Amplitudes of `W(t)|1↑,1↓⟩` on `|1↑,1↓⟩`, `(|1↑,2↓⟩ - |1↓,2↑⟩)/√2` and `|2↑,2↓⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtractionCoefficients {
    pub c1: C64,
    pub c2: C64,
    pub c3: C64,
    /// Raw amplitudes on `|1↑,2↓⟩` and `|1↓,2↑⟩`.
    pub w13: C64,
    pub w14: C64,
}

impl ExtractionCoefficients {
    pub fn total_weight(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr() + self.c3.norm_sqr()
    }
}

pub fn extraction_coefficients(p: &ModelParams, space: &FockSpace, omega: f64, t: f64) -> Result<ExtractionCoefficients> {
    let w = Propagator::new(p, space, omega)?.block_at(HYBRID_SECTOR, t)?;
    Ok(ExtractionCoefficients {
        c1: w[(0, 0)],
        c2: w[(2, 0)] * std::f64::consts::SQRT_2,
        c3: w[(1, 0)],
        w13: w[(2, 0)],
        w14: w[(3, 0)],
    })
}

/// Central-difference residual `max |i dW/dt - H(t) W|` at `t`.
pub fn schrodinger_residual(p: &ModelParams, space: &FockSpace, omega: f64, t: f64, step: f64) -> Result<f64> {
    let prop = Propagator::new(p, space, omega)?;
    let lo = (t - step).max(0.0);
    let hi = t + step;
    let dw = (prop.at(hi)?.matrix - prop.at(lo)?.matrix).unscale(hi - lo);
    let h = time_dependent_hamiltonian(p, space, omega, 0.5 * (lo + hi))?;
    let w = prop.at(0.5 * (lo + hi))?.matrix;
    Ok(linalg::max_abs(&(dw * C64::i() - h * w)))
}
