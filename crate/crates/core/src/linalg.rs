//! Small dense complex linear-algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// `e^{iθ}`
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max |m - m†|`
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    assert!(m.is_square());
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The input is symmetrized as `(m + m†)/2` before handing it to the solver so
/// round-off asymmetry below the checked tolerance cannot leak into the result.
pub fn eigh(m: &CMatrix, tol: f64) -> Result<(Vec<f64>, CMatrix)> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = hermitian_deviation(m);
    if dev > tol {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// `exp(-i H t)` from an eigen-decomposition `H = V diag(e) V†`.
pub fn unitary_from_spectrum(values: &[f64], vectors: &CMatrix, t: f64) -> CMatrix {
    let n = values.len();
    let mut scaled = vectors.clone();
    for (c, &e) in values.iter().enumerate() {
        let phase = cis(-e * t);
        for r in 0..n {
            scaled[(r, c)] *= phase;
        }
    }
    scaled * vectors.adjoint()
}

/// Rotate `v` so that its first entry with modulus above `1e-12` is real and
/// positive.
pub fn fix_global_phase(v: &mut CVector) {
    if let Some(z) = v.iter().copied().find(|z| z.norm() > 1e-12) {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

pub fn normalized(mut v: CVector) -> Result<CVector> {
    let norm = v.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::InvalidState(format!("cannot normalize vector of norm {norm}")));
    }
    v.unscale_mut(norm);
    Ok(v)
}

/// Haar-distributed `n x n` unitary: QR of a complex Ginibre matrix with the
/// phases of `diag(R)` divided out.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..n {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for row in 0..n {
            q[(row, c)] *= phase;
        }
    }
    q
}

/// `max |U†U - I|`
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let n = u.ncols();
    max_abs(&(u.adjoint() * u - CMatrix::identity(n, n)))
}
