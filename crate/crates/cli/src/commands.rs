//! Dataset producers for the sweep commands. Grid points are computed in
//! parallel and collected back in grid order.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use anyon_core::dynamics::entropy_vs_time;
use anyon_core::entanglement::{entanglement_entropy, LogBase, OneParticleSubspace};
use anyon_core::fock::{FockSpace, Mode};
use anyon_core::model::{build_hamiltonian, closed_form_eigenvector, closed_form_spectrum, diagonalize_by_sector};
use anyon_core::thermal::{quasimomentum_distribution, Ensemble, PairIndex, ThermalParams};
use anyon_core::{EigenLabel, Error, ModelParams, SectorKey, Spin, CVector};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::dataset::{Cell, Column, Dataset};

/// Compact ASCII mode tag: `1u`, `2d`.
pub fn mode_tag(m: Mode) -> String {
    let s = match m.spin {
        Spin::Up => 'u',
        Spin::Down => 'd',
    };
    format!("{}{s}", m.site)
}

/// The six pair correlators plotted against ν.
pub fn plotted_pairs() -> [PairIndex; 6] {
    let (u1, d1, u2, d2) = (Mode::up(1), Mode::down(1), Mode::up(2), Mode::down(2));
    [
        PairIndex::new(u1, u2, u1, u2),
        PairIndex::new(u1, d1, u1, d1),
        PairIndex::new(u1, d1, u2, d2),
        PairIndex::new(u1, d2, u1, d2),
        PairIndex::new(u1, d2, d1, u2),
        PairIndex::new(u1, d1, u1, d2),
    ]
}

pub fn pair_tag(idx: PairIndex) -> String {
    let [a, b, c, d] = idx.0;
    format!("{}{}_{}{}", mode_tag(a), mode_tag(b), mode_tag(c), mode_tag(d))
}

fn collect_rows(ds: &mut Dataset, chunks: Vec<Vec<Vec<Cell>>>) -> Result<()> {
    for row in chunks.into_iter().flatten() {
        ds.push(row)?;
    }
    Ok(())
}

fn at_nu(cfg: &RunConfig, nu: f64) -> ModelParams {
    cfg.params.with_nu(nu)
}

/// Entropy, or NaN when the state has no weight on the traced subspace.
/// The vacuum has nothing to trace out; callers skip it and report NaN.
fn entropy_or_nan(result: anyon_core::Result<f64>) -> Result<f64> {
    match result {
        Ok(s) => Ok(s),
        Err(Error::NoSupport(_)) => Ok(f64::NAN),
        Err(e) => Err(e.into()),
    }
}

/// Numerical eigenvalues keyed by their closed-form label. Levels are paired
/// within each sector in ascending order.
pub fn tagged_spectrum(p: &ModelParams, space: &FockSpace) -> Result<Vec<(EigenLabel, f64)>> {
    let spec = diagonalize_by_sector(&build_hamiltonian(p, space)?, space.basis())?;
    let mut numeric: BTreeMap<SectorKey, Vec<f64>> = BTreeMap::new();
    for (e, key) in spec.eigenvalues.iter().zip(&spec.sectors) {
        let key = key.context("eigenvector without a definite sector")?;
        numeric.entry(key).or_default().push(*e);
    }
    let mut closed: BTreeMap<SectorKey, Vec<(f64, EigenLabel)>> = BTreeMap::new();
    for level in closed_form_spectrum(p)? {
        closed.entry(level.sector).or_default().push((level.energy, level.label));
    }
    let mut out = Vec::with_capacity(16);
    for (key, mut levels) in closed {
        let mut values = numeric.remove(&key).unwrap_or_default();
        if values.len() != levels.len() {
            bail!("sector {key} has {} eigenvalues but {} labels", values.len(), levels.len());
        }
        values.sort_by(f64::total_cmp);
        levels.sort_by(|a, b| a.0.total_cmp(&b.0));
        out.extend(levels.iter().zip(values).map(|(&(_, label), e)| (label, e)));
    }
    out.sort_by_key(|(l, _)| *l);
    Ok(out)
}

pub fn spectrum(cfg: &RunConfig) -> Result<Dataset> {
    let sites = cfg.params.sites;
    let dim = 1usize << (2 * sites);
    let mut columns = vec![Column::new("nu", "rad")];
    if sites == 2 {
        columns.extend(EigenLabel::all().map(|l| Column::new(l.to_string(), "energy")));
    } else {
        columns.extend((0..dim).map(|i| Column::new(format!("e_{i}"), "energy")));
    }
    let mut ds = Dataset::new(columns);
    let rows = cfg
        .nu_grid
        .par_iter()
        .map(|&nu| -> Result<Vec<Vec<Cell>>> {
            let p = at_nu(cfg, nu);
            let space = p.space()?;
            let mut row = vec![Cell::Num(nu)];
            if sites == 2 {
                row.extend(tagged_spectrum(&p, &space)?.into_iter().map(|(_, e)| Cell::Num(e)));
            } else {
                let spec = diagonalize_by_sector(&build_hamiltonian(&p, &space)?, space.basis())?;
                row.extend(spec.sorted_eigenvalues().into_iter().map(Cell::Num));
            }
            Ok(vec![row])
        })
        .collect::<Result<Vec<_>>>()?;
    collect_rows(&mut ds, rows)?;
    Ok(ds)
}

fn eigenstate(p: &ModelParams, space: &FockSpace, label: EigenLabel) -> Result<CVector> {
    Ok(closed_form_eigenvector(p, space, label)?.vector)
}

pub fn entropy_sweep(cfg: &RunConfig) -> Result<Dataset> {
    let subspace = cfg.subspace()?;
    let mut columns = vec![Column::new("nu", "rad")];
    columns.extend(cfg.states.iter().map(|l| Column::new(format!("S_{l}"), "bits")));
    let mut ds = Dataset::new(columns);
    let rows = cfg
        .nu_grid
        .par_iter()
        .map(|&nu| -> Result<Vec<Vec<Cell>>> {
            let p = at_nu(cfg, nu);
            let space = p.space()?;
            let mut row = vec![Cell::Num(nu)];
            for &label in &cfg.states {
                if label.particles == 0 {
                    row.push(Cell::Num(f64::NAN));
                    continue;
                }
                let phi = eigenstate(&p, &space, label)?;
                row.push(Cell::Num(entropy_or_nan(entanglement_entropy(&space, &phi, &subspace, LogBase::Two))?));
            }
            Ok(vec![row])
        })
        .collect::<Result<Vec<_>>>()?;
    collect_rows(&mut ds, rows)?;
    Ok(ds)
}

pub fn dynamics(cfg: &RunConfig) -> Result<Dataset> {
    let subspace: OneParticleSubspace = cfg.subspace()?;
    let times = cfg.times();
    let mut columns = vec![Column::new("nu", "rad"), Column::new("omega", "1/time"), Column::new("t", "time")];
    columns.extend(cfg.states.iter().map(|l| Column::new(format!("S_{l}"), "bits")));
    let mut ds = Dataset::new(columns);
    let panels: Vec<(f64, f64)> = cfg
        .nu_grid
        .iter()
        .flat_map(|&nu| cfg.omega.iter().map(move |&w| (nu, w)))
        .collect();
    let rows = panels
        .par_iter()
        .map(|&(nu, omega)| -> Result<Vec<Vec<Cell>>> {
            let p = at_nu(cfg, nu);
            let space = p.space()?;
            let mut curves = Vec::with_capacity(cfg.states.len());
            for &label in &cfg.states {
                if label.particles == 0 {
                    curves.push(None);
                    continue;
                }
                let phi = eigenstate(&p, &space, label)?;
                curves.push(Some(entropy_vs_time(&p, &space, omega, &phi, &subspace, &times, LogBase::Two)?));
            }
            times
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let mut row = vec![Cell::Num(nu), Cell::Num(omega), Cell::Num(t)];
                    for c in &curves {
                        let s = match c {
                            Some(c) => entropy_or_nan(c[i].entropy.clone())?,
                            None => f64::NAN,
                        };
                        row.push(Cell::Num(s));
                    }
                    Ok(row)
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    collect_rows(&mut ds, rows)?;
    Ok(ds)
}

fn same_spin_pairs(sites: usize) -> Vec<(Mode, Mode)> {
    let mut out = Vec::new();
    for spin in Spin::ALL {
        for a in 1..=sites {
            for b in 1..=sites {
                out.push((Mode::new(a, spin), Mode::new(b, spin)));
            }
        }
    }
    out
}

pub fn correlators(cfg: &RunConfig) -> Result<Dataset> {
    let sites = cfg.params.sites;
    let g1_pairs = same_spin_pairs(sites);
    let mut columns = vec![Column::new("nu", "rad"), Column::new("beta", "1/energy"), Column::new("z", "")];
    for &(a, b) in &g1_pairs {
        for part in ["re", "im"] {
            columns.push(Column::new(format!("g1_{}_{}_{part}", mode_tag(a), mode_tag(b)), ""));
        }
    }
    for idx in plotted_pairs() {
        for part in ["re", "im"] {
            columns.push(Column::new(format!("g2_{}_{part}", pair_tag(idx)), ""));
        }
    }
    let mut ds = Dataset::new(columns);
    let rows = cfg
        .nu_grid
        .par_iter()
        .map(|&nu| -> Result<Vec<Vec<Cell>>> {
            let ens = Ensemble::new(&ThermalParams::new(cfg.beta, at_nu(cfg, nu))?)?;
            let g1 = ens.one_particle_density();
            let mut row = vec![Cell::Num(nu), Cell::Num(cfg.beta), Cell::Num(ens.partition_function())];
            for &(a, b) in &g1_pairs {
                let z = g1[(a.index(), b.index())];
                row.extend([Cell::Num(z.re), Cell::Num(z.im)]);
            }
            for idx in plotted_pairs() {
                let z = ens.pair_correlation(idx)?;
                row.extend([Cell::Num(z.re), Cell::Num(z.im)]);
            }
            Ok(vec![row])
        })
        .collect::<Result<Vec<_>>>()?;
    collect_rows(&mut ds, rows)?;
    Ok(ds)
}

pub fn momentum(cfg: &RunConfig) -> Result<Dataset> {
    let sites = cfg.params.sites;
    let mut ds = Dataset::new(vec![
        Column::new("nu", "rad"),
        Column::new("k", "rad/site"),
        Column::new("n_up", ""),
        Column::new("n_down", ""),
    ]);
    let rows = cfg
        .nu_grid
        .par_iter()
        .map(|&nu| -> Result<Vec<Vec<Cell>>> {
            let ens = Ensemble::new(&ThermalParams::new(cfg.beta, at_nu(cfg, nu))?)?;
            let g1 = ens.one_particle_density();
            let up = quasimomentum_distribution(&g1, sites, Spin::Up, &cfg.k_grid)?;
            let down = quasimomentum_distribution(&g1, sites, Spin::Down, &cfg.k_grid)?;
            Ok(up
                .iter()
                .zip(&down)
                .map(|(a, b)| vec![Cell::Num(nu), Cell::Num(a.k), Cell::Num(a.n), Cell::Num(b.n)])
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    collect_rows(&mut ds, rows)?;
    Ok(ds)
}
