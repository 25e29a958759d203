//! Spinful two-site fermions from Jordan–Wigner strings, written without the
//! crate's Fock machinery. States are raw bitmasks: bit `2(site-1) + spin`.

#![allow(dead_code)]

use anyon_core::linalg::{CMatrix, C64};
use anyon_core::ModelParams;

pub const MODES: usize = 4;
pub const DIM: usize = 1 << MODES;

pub fn bit(site: usize, down: bool) -> usize {
    2 * (site - 1) + down as usize
}

/// `c†_m` in bitmask order: sign `(-1)^{#occupied below m}`.
pub fn creation(m: usize) -> CMatrix {
    let mut c = CMatrix::zeros(DIM, DIM);
    for s in 0..DIM {
        if s & (1 << m) == 0 {
            let below = (s & ((1 << m) - 1)).count_ones();
            let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
            c[(s | (1 << m), s)] = C64::new(sign, 0.0);
        }
    }
    c
}

pub fn annihilation(m: usize) -> CMatrix {
    creation(m).adjoint()
}

pub fn number(m: usize) -> CMatrix {
    creation(m) * annihilation(m)
}

pub fn hamiltonian(p: &ModelParams) -> CMatrix {
    let mut h = CMatrix::zeros(DIM, DIM);
    let bonds = [(1usize, 2usize), (2, 1)];
    for &(i, j) in &bonds {
        for down in [false, true] {
            h -= creation(bit(i, down)) * annihilation(bit(j, down)) * C64::from(p.kappa);
        }
        let ni = number(bit(i, false)) + number(bit(i, true));
        let nj = number(bit(j, false)) + number(bit(j, true));
        h += ni * nj * C64::from(p.v);
        for s in [false, true] {
            for s2 in [false, true] {
                h += creation(bit(i, s))
                    * creation(bit(j, s2))
                    * annihilation(bit(i, s2))
                    * annihilation(bit(j, s))
                    * C64::from(p.j);
            }
        }
    }
    for site in 1..=2 {
        h += number(bit(site, false)) * number(bit(site, true)) * C64::from(p.u);
    }
    for m in 0..MODES {
        h -= number(m) * C64::from(p.mu);
    }
    h
}

/// `e^{-βH}` and `Z` from an eigen-decomposition of the fermionic Hamiltonian.
pub fn boltzmann(p: &ModelParams, beta: f64) -> (CMatrix, f64) {
    let h = hamiltonian(p);
    let eig = h.clone().symmetric_eigen();
    let mut rho = CMatrix::zeros(DIM, DIM);
    let mut z = 0.0;
    for (k, &e) in eig.eigenvalues.iter().enumerate() {
        let w = (-beta * e).exp();
        z += w;
        let v = eig.eigenvectors.column(k);
        rho += v * v.adjoint() * C64::from(w);
    }
    (rho, z)
}

pub fn thermal_average(op: &CMatrix, rho: &CMatrix, z: f64) -> C64 {
    (op * rho).trace() / z
}
