//! Self-check: the invariant suite, run against the configured couplings at a
//! fixed set of statistics parameters.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use anyhow::Result;
use anyon_core::dynamics::{evolution_operator, extraction_coefficients, schrodinger_residual};
use anyon_core::entanglement::{
    entanglement_entropy, entropy_via_svd, hybrid_entropy_closed_form, verify_basis_invariance, LogBase,
    OneParticleSubspace,
};
use anyon_core::fock::verify_algebra;
use anyon_core::linalg::{hermitian_deviation, max_abs, max_abs_vec, normalized};
use anyon_core::model::{build_hamiltonian, closed_form_eigenvectors, closed_form_spectrum, diagonalize};
use anyon_core::thermal::{
    discrete_momenta, pair_correlation_closed, partition_function_closed, quasimomentum_distribution,
    one_particle_density_closed, Ensemble, PairIndex, ThermalParams,
};
use anyon_core::{CVector, EigenLabel, ModelParams, Spin, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::RunConfig;
use crate::dataset::{Cell, Column, Dataset};

pub const VERIFY_NUS: [f64; 6] = [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4, PI, 1.2345];
pub const RANDOM_STATES: usize = 100;
pub const BASIS_TRIALS: usize = 100;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: &'static str, deviation: f64, tolerance: f64) -> Self {
        Check {
            name,
            deviation,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// Largest deviation among the exact checks; the finite-difference
    /// residual has its own looser tolerance and is left out.
    pub fn max_deviation(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.tolerance <= 1e-10)
            .map(|c| c.deviation)
            .fold(0.0, f64::max)
    }

    pub fn to_dataset(&self, cfg: &RunConfig) -> Result<Dataset> {
        let mut ds = Dataset::new(vec![
            Column::new("check", ""),
            Column::new("max_deviation", ""),
            Column::new("tolerance", ""),
            Column::new("passed", ""),
        ]);
        for c in &self.checks {
            ds.push(vec![
                Cell::Text(c.name.into()),
                Cell::Num(c.deviation),
                Cell::Num(c.tolerance),
                Cell::Num(if c.passed() { 1.0 } else { 0.0 }),
            ])?;
        }
        ds.attach_meta(cfg, json!({ "per_check": "see the tolerance column" }));
        ds.meta["summary"] = json!({
            "nu": VERIFY_NUS,
            "random_states": RANDOM_STATES,
            "basis_trials": BASIS_TRIALS,
            "max_deviation": self.max_deviation(),
            "passed": self.passed(),
        });
        Ok(ds)
    }
}

/// Deviation relative to `max(1, |reference|)`.
fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn random_two_particle_state(space: &anyon_core::FockSpace, rng: &mut ChaCha8Rng) -> Result<CVector> {
    let mut v = CVector::zeros(space.dim());
    for pos in space.basis().particle_positions(2) {
        v[pos] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    Ok(normalized(v)?)
}

/// Largest deviation of each named check at one statistics parameter.
fn checks_at(base: &ModelParams, beta: f64, nu: f64, seed: u64) -> Result<Vec<Check>> {
    let p = base.with_nu(nu);
    let space = p.space()?;
    let h = build_hamiltonian(&p, &space)?;
    let mut out = Vec::new();

    let algebra = verify_algebra(nu, 2, f64::INFINITY)?
        .max_deviation
        .max(verify_algebra(nu, 3, f64::INFINITY)?.max_deviation);
    out.push(Check::new("algebra", algebra, 1e-12));

    let basis = space.basis();
    let mut leakage: f64 = 0.0;
    for a in 0..space.dim() {
        for b in 0..space.dim() {
            if basis.state(a).sector() != basis.state(b).sector() {
                leakage = leakage.max(h[(a, b)].norm());
            }
        }
    }
    out.push(Check::new("hermitian", hermitian_deviation(&h), 1e-12));
    out.push(Check::new("sector_conservation", leakage, 1e-12));

    let numeric = diagonalize(&h)?.sorted_eigenvalues();
    let mut closed: Vec<f64> = closed_form_spectrum(&p)?.iter().map(|l| l.energy).collect();
    closed.sort_by(f64::total_cmp);
    let spectrum = numeric.iter().zip(&closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    out.push(Check::new("spectrum_closed_form", spectrum, 1e-10));

    let states = closed_form_eigenvectors(&p, &space)?;
    let residual = states
        .iter()
        .map(|s| max_abs_vec(&(&h * &s.vector - s.vector.scale(s.level.energy))))
        .fold(0.0, f64::max);
    out.push(Check::new("eigenvector_residual", residual, 1e-10));

    let hybrid = hybrid_entropy_closed_form(&p, LogBase::Two)?;
    let table = [
        (1, [0.0, 0.0, 1.0]),
        (2, [1.0, 1.0, 2.0]),
        (3, [1.0, 1.0, 2.0]),
        (4, [1.0, 1.0, hybrid]),
        (5, [1.0, 1.0, hybrid]),
        (6, [0.0, 0.0, 1.0]),
    ];
    let subspaces = [OneParticleSubspace::b1(), OneParticleSubspace::b2(), OneParticleSubspace::b12()];
    let mut entropy_dev: f64 = 0.0;
    for (k, expected) in table {
        let phi = &states.iter().find(|s| s.level.label == EigenLabel::new(2, k)).expect("labelled").vector;
        for (m, e) in subspaces.iter().zip(expected) {
            entropy_dev = entropy_dev.max((entanglement_entropy(&space, phi, m, LogBase::Two)? - e).abs());
        }
    }
    out.push(Check::new("entropy_table", entropy_dev, 1e-10));

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ nu.to_bits());
    let mut svd_dev: f64 = 0.0;
    for _ in 0..RANDOM_STATES {
        let phi = random_two_particle_state(&space, &mut rng)?;
        for m in &subspaces {
            let a = entanglement_entropy(&space, &phi, m, LogBase::Two)?;
            let b = entropy_via_svd(&space, &phi, m, LogBase::Two)?;
            svd_dev = svd_dev.max((a - b).abs());
        }
    }
    out.push(Check::new("svd_equivalence", svd_dev, 1e-10));

    let phi25 = &states.iter().find(|s| s.level.label == EigenLabel::new(2, 5)).expect("labelled").vector;
    let invariance = verify_basis_invariance(&space, phi25, &OneParticleSubspace::b12(), BASIS_TRIALS, seed)?;
    out.push(Check::new("basis_invariance", invariance.max_deviation, 1e-10));

    let mut unitarity: f64 = 0.0;
    let mut extraction: f64 = 0.0;
    let mut fd: f64 = 0.0;
    for omega in [0.0, 0.7, 2.0] {
        for t in [0.0, 0.9, 3.7] {
            unitarity = unitarity.max(evolution_operator(&p, &space, omega, t)?.unitarity_deviation());
            let c = extraction_coefficients(&p, &space, omega, t)?;
            extraction = extraction.max((c.total_weight() - 1.0).abs()).max((c.w14 + c.w13).norm());
            fd = fd.max(schrodinger_residual(&p, &space, omega, t + 0.5, 1e-5)?);
        }
    }
    out.push(Check::new("evolution_unitarity", unitarity, 1e-10));
    out.push(Check::new("extraction_coefficients", extraction, 1e-10));
    out.push(Check::new("schrodinger_residual", fd, 1e-6));

    let tp = ThermalParams::new(beta, p)?;
    let ens = Ensemble::new(&tp)?;
    out.push(Check::new(
        "partition_function",
        rel(partition_function_closed(&tp)?, ens.partition_function()),
        1e-10,
    ));
    let g1 = ens.one_particle_density();
    out.push(Check::new("g1_closed_form", max_abs(&(one_particle_density_closed(&tp)? - &g1)), 1e-10));
    let mut g2_dev: f64 = 0.0;
    for idx in PairIndex::all(2) {
        if let Some(closed) = pair_correlation_closed(&tp, idx)? {
            g2_dev = g2_dev.max((closed - ens.pair_correlation(idx)?).norm());
        }
    }
    out.push(Check::new("g2_closed_form", g2_dev, 1e-10));

    let ks = discrete_momenta(2);
    let up = quasimomentum_distribution(&g1, 2, Spin::Up, &ks)?;
    let down = quasimomentum_distribution(&g1, 2, Spin::Down, &ks)?;
    let mut momentum: f64 = 0.0;
    for (spin, curve) in [(Spin::Up, &up), (Spin::Down, &down)] {
        let diag: f64 = (1..=2).map(|j| g1[(anyon_core::Mode::new(j, spin).index(), anyon_core::Mode::new(j, spin).index())].re).sum();
        let total: f64 = curve.iter().map(|pt| pt.n).sum();
        momentum = momentum.max((total - 2.0 * diag).abs());
        momentum = momentum.max(curve.iter().map(|pt| pt.imag.abs().max(-pt.n)).fold(0.0, f64::max));
    }
    momentum = momentum.max(up.iter().zip(&down).map(|(a, b)| (a.n - b.n).abs()).fold(0.0, f64::max));
    out.push(Check::new("momentum_sum_rule", momentum, 1e-10));

    Ok(out)
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let base = ModelParams {
        sites: 2,
        ..cfg.params
    };
    let per_nu = VERIFY_NUS
        .par_iter()
        .map(|&nu| checks_at(&base, cfg.beta, nu, cfg.seed))
        .collect::<Result<Vec<_>>>()?;
    let mut checks = per_nu[0].clone();
    for other in &per_nu[1..] {
        for (c, o) in checks.iter_mut().zip(other) {
            c.deviation = c.deviation.max(o.deviation);
        }
    }
    Ok(Report { checks })
}
