//! Dense linear-algebra helpers shared by every module.
//!
//! Complex m×m matrices act on row vectors of coherent amplitudes (`γ → γL`).
//! Their real images act on interleaved column vectors `v = (Re γ₁, Im γ₁, …)`,
//! so a complex entry `a + ib` becomes the block `[[a, b], [-b, a]]` and the
//! column action of `L` is `real_rep(L)ᵀ`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Relative tolerance for positive-semidefiniteness tests.
pub const PSD_TOL: f64 = 1e-10;

/// Tolerance for unitarity of interferometer matrices.
pub const UNITARY_TOL: f64 = 1e-10;

/// Real 2m×2m image of a complex m×m matrix. Multiplicative: `real_rep(AB) = real_rep(A) real_rep(B)`.
pub fn real_rep(h: &CMatrix) -> DMatrix<f64> {
    let (rows, cols) = h.shape();
    let mut out = DMatrix::zeros(2 * rows, 2 * cols);
    for i in 0..rows {
        for j in 0..cols {
            let z = h[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = z.im;
            out[(2 * i + 1, 2 * j)] = -z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

/// Column action on interleaved real vectors of the row map `γ → γL`.
pub fn column_action(l: &CMatrix) -> DMatrix<f64> {
    real_rep(l).transpose()
}

/// Interleaved real vector `(Re z₁, Im z₁, …)`.
pub fn complex_to_real(z: &[Complex64]) -> DVector<f64> {
    DVector::from_iterator(2 * z.len(), z.iter().flat_map(|c| [c.re, c.im]))
}

pub fn real_to_complex(v: &DVector<f64>) -> Vec<Complex64> {
    v.as_slice()
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect()
}

/// Row-vector product `γL`.
pub fn row_times(gamma: &[Complex64], l: &CMatrix) -> Vec<Complex64> {
    (0..l.ncols())
        .map(|j| gamma.iter().enumerate().map(|(i, g)| g * l[(i, j)]).sum())
        .collect()
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = symmetrize(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m).first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m).last().copied().unwrap_or(0.0)
}

/// PSD test: smallest eigenvalue ≥ −tol·max(1, ‖m‖).
pub fn is_psd(m: &DMatrix<f64>) -> bool {
    let scale = m.amax().max(1.0);
    min_eigenvalue(m) >= -PSD_TOL * scale
}

/// Max-entry deviation of `U†U` from the identity.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn check_unitary(u: &CMatrix) -> Result<()> {
    let deviation = unitarity_deviation(u);
    if deviation > UNITARY_TOL {
        return Err(Error::InvalidNetwork { deviation });
    }
    Ok(())
}

/// Standard symplectic form `⊕ [[0, 1], [-1, 0]]` on m modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for j in 0..modes {
        omega[(2 * j, 2 * j + 1)] = 1.0;
        omega[(2 * j + 1, 2 * j)] = -1.0;
    }
    omega
}

/// Smallest eigenvalue of the Hermitian matrix `cov + iΩ`.
pub fn uncertainty_min_eigenvalue(cov: &DMatrix<f64>) -> f64 {
    let modes = cov.nrows() / 2;
    let omega = symplectic_form(modes);
    let h = CMatrix::from_fn(cov.nrows(), cov.ncols(), |i, j| {
        Complex64::new(0.5 * (cov[(i, j)] + cov[(j, i)]), omega[(i, j)])
    });
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric square root of a PSD matrix (negative eigenvalues clamped to zero).
pub fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = symmetrize(m).symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| x.max(0.0).sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Symplectic eigenvalues ν₁ ≤ … ≤ ν_m of a positive-definite covariance.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Vec<f64> {
    let modes = cov.nrows() / 2;
    let root = psd_sqrt(cov);
    let omega = symplectic_form(modes);
    let k = &root * omega * &root;
    // i·k is Hermitian with eigenvalues ±ν_j.
    let h = CMatrix::from_fn(k.nrows(), k.ncols(), |i, j| Complex64::new(0.0, k[(i, j)]));
    let mut ev: Vec<f64> = h
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .filter(|x| *x > 0.0)
        .collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    while ev.len() < modes {
        ev.insert(0, 0.0);
    }
    ev.truncate(modes);
    ev
}

/// `diag(values) ⊗ I₂`, the quadrature-space lift of per-mode scalars.
pub fn lift_diagonal(values: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_iterator(
        2 * values.len(),
        values.iter().flat_map(|v| [*v, *v]),
    ))
}

/// Sampler for `N(mean, cov)` with a possibly singular PSD covariance.
///
/// Draws land exactly on the affine support of the distribution.
#[derive(Debug, Clone)]
pub struct GaussianDraw {
    pub mean: DVector<f64>,
    pub factor: DMatrix<f64>,
}

impl GaussianDraw {
    pub fn new(mean: DVector<f64>, cov: &DMatrix<f64>) -> Result<Self> {
        if !is_psd(cov) {
            return Err(Error::NumericalConsistency(format!(
                "sampling covariance not PSD (min eigenvalue {:e})",
                min_eigenvalue(cov)
            )));
        }
        let eig = symmetrize(cov).symmetric_eigen();
        let scale = cov.amax().max(1.0);
        let roots = eig.eigenvalues.map(|x| {
            if x <= PSD_TOL * scale {
                0.0
            } else {
                x.sqrt()
            }
        });
        let factor = &eig.eigenvectors * DMatrix::from_diagonal(&roots);
        Ok(Self { mean, factor })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// `mean + factor·z` for a standard-normal vector `z`.
    pub fn map(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.mean + &self.factor * z
    }

    pub fn is_degenerate(&self) -> bool {
        self.factor.iter().all(|x| *x == 0.0)
    }
}
