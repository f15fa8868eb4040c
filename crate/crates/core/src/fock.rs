//! Truncated Fock-space representations of Gaussian states.
//!
//! This is the independent, brute-force side of several cross-checks: it never
//! touches covariance-matrix formulas beyond reading off the single-mode
//! Williamson parameters. Displacement and squeezing matrix elements come
//! from column recurrences, so truncated entries are exact.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::GaussianState;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Annihilation operator on `dim` levels.
pub fn annihilation(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

fn sqrt_table(n: usize) -> Vec<f64> {
    (0..=n).map(|k| (k as f64).sqrt()).collect()
}

/// `⟨m|D(α)|n⟩` for `m < rows`, `n < cols`.
///
/// Column recurrence from `a†D = D(a† + α*)`; the first column is the coherent
/// state. Every entry only depends on smaller indices, so truncation is exact.
pub fn displacement_block(alpha: Complex64, rows: usize, cols: usize) -> CMatrix {
    let sq = sqrt_table(rows.max(cols));
    let mut d = CMatrix::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return d;
    }
    d[(0, 0)] = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for m in 1..rows {
        d[(m, 0)] = d[(m - 1, 0)] * alpha / sq[m];
    }
    let ac = alpha.conj();
    for n in 1..cols {
        d[(0, n)] = -ac * d[(0, n - 1)] / sq[n];
        for m in 1..rows {
            d[(m, n)] = (d[(m - 1, n - 1)] * sq[m] - ac * d[(m, n - 1)]) / sq[n];
        }
    }
    d
}

/// `⟨m|S(r)|n⟩` for `S(r) = exp(r/2 (a†² − a²))`, `m < rows`, `n < cols`.
///
/// Uses `a†S = S(a† cosh r + a sinh r)`.
pub fn squeezing_block(r: f64, rows: usize, cols: usize) -> CMatrix {
    let sq = sqrt_table(rows.max(cols));
    let mut s = CMatrix::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return s;
    }
    let (th, sech) = (r.tanh(), 1.0 / r.cosh());
    s[(0, 0)] = Complex64::new(sech.sqrt(), 0.0);
    for m in (2..rows).step_by(2) {
        s[(m, 0)] = s[(m - 2, 0)] * (th * sq[m - 1] / sq[m]);
    }
    for n in 1..cols {
        for m in 0..rows {
            if (m + n) % 2 == 1 {
                continue;
            }
            let mut v = ZERO;
            if m > 0 {
                v += s[(m - 1, n - 1)] * (sech * sq[m] / sq[n]);
            }
            if n > 1 {
                v -= s[(m, n - 2)] * (th * sq[n - 1] / sq[n]);
            }
            s[(m, n)] = v;
        }
    }
    s
}

/// `D(α)` truncated to `dim` levels.
pub fn displacement(alpha: Complex64, dim: usize) -> CMatrix {
    displacement_block(alpha, dim, dim)
}

/// `S(r) = exp(r/2 (a†² − a²))` truncated to `dim` levels.
pub fn squeezing(r: f64, dim: usize) -> CMatrix {
    squeezing_block(r, dim, dim)
}

/// `e^{iθ a†a}`: rotates phase space by `θ` (`α → α e^{iθ}`).
pub fn rotation(theta: f64, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, theta * i as f64)
        } else {
            ZERO
        }
    })
}

/// Thermal state with mean photon number `n_bar`.
pub fn thermal(n_bar: f64, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if i != j {
            ZERO
        } else if n_bar == 0.0 {
            Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)
        } else {
            let z = n_bar / (1.0 + n_bar);
            Complex64::new((1.0 - z) * z.powi(i as i32), 0.0)
        }
    })
}

/// Single-mode Williamson data: `σ = ν R(φ) diag(e^{2r}, e^{−2r}) R(φ)ᵀ`.
#[derive(Debug, Clone, Copy)]
pub struct SingleModeParams {
    pub nu: f64,
    pub r: f64,
    pub phi: f64,
    pub alpha: Complex64,
}

pub fn single_mode_params(state: &GaussianState) -> Result<SingleModeParams> {
    if state.modes() != 1 {
        return Err(Error::Shape(format!("expected a single-mode state, got {} modes", state.modes())));
    }
    let cov = state.cov();
    let nu = cov.determinant().sqrt();
    let eig = linalg::symmetrize(cov).symmetric_eigen();
    let (imax, imin) = if eig.eigenvalues[0] >= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let (lmax, lmin) = (eig.eigenvalues[imax], eig.eigenvalues[imin]);
    let r = 0.25 * (lmax / lmin).ln();
    let v = eig.eigenvectors.column(imax);
    let phi = v[1].atan2(v[0]);
    Ok(SingleModeParams {
        nu,
        r,
        phi,
        alpha: state.disp()[0],
    })
}

/// `A` with `ρ = A A†` on `cutoff` levels, one column per retained thermal level.
pub fn single_mode_factor(state: &GaussianState, cutoff: usize) -> Result<CMatrix> {
    let p = single_mode_params(state)?;
    let a = p.alpha.norm();
    let n_bar = ((p.nu - 1.0) / 2.0).max(0.0);
    // thermal levels kept until the tail mass is below 1e-18
    let levels = if n_bar < 1e-15 {
        1
    } else {
        let z = n_bar / (1.0 + n_bar);
        ((-18.0 * 10f64.ln()) / z.ln()).ceil() as usize + 1
    };
    let work = cutoff + 40 + (6.0 * a * (cutoff as f64).sqrt() + a * a).ceil() as usize;
    let mut s = squeezing_block(p.r, work, levels);
    for (j, mut row) in s.row_iter_mut().enumerate() {
        let ph = Complex64::from_polar(1.0, p.phi * j as f64);
        row.iter_mut().for_each(|x| *x *= ph);
    }
    let mut k = displacement_block(p.alpha, cutoff, work) * s;
    let z = n_bar / (1.0 + n_bar);
    for (n, mut col) in k.column_iter_mut().enumerate() {
        let w = ((1.0 - z) * z.powi(n as i32)).sqrt();
        col.iter_mut().for_each(|x| *x *= w);
    }
    Ok(k)
}

/// Density matrix of a single-mode Gaussian state on `cutoff` levels.
pub fn single_mode_density(state: &GaussianState, cutoff: usize) -> Result<CMatrix> {
    let a = single_mode_factor(state, cutoff)?;
    Ok(&a * a.adjoint())
}

pub fn trace_deficit(rho: &CMatrix) -> f64 {
    1.0 - rho.trace().re
}

/// Factor on the smallest cutoff (16, then ×1.5) whose trace deficit is below `tol`.
pub fn auto_factor(state: &GaussianState, tol: f64, max_cutoff: usize) -> Result<CMatrix> {
    let mut cutoff = 16;
    loop {
        let a = single_mode_factor(state, cutoff)?;
        let deficit = 1.0 - a.norm_squared();
        if deficit < tol {
            return Ok(a);
        }
        if cutoff >= max_cutoff {
            return Err(Error::Truncation { deficit, cutoff });
        }
        cutoff = (cutoff * 3 / 2).min(max_cutoff);
    }
}

pub fn auto_density(state: &GaussianState, tol: f64, max_cutoff: usize) -> Result<CMatrix> {
    let a = auto_factor(state, tol, max_cutoff)?;
    Ok(&a * a.adjoint())
}

/// `(⟨x⟩, ⟨p⟩, cov)` with `x = a + a†`, `p = i(a† − a)`, symmetrized second moments.
pub fn quadrature_moments(rho: &CMatrix) -> ([f64; 2], DMatrix<f64>) {
    let dim = rho.nrows();
    let a = annihilation(dim);
    let ad = a.adjoint();
    let i = Complex64::new(0.0, 1.0);
    let x = &a + &ad;
    let p = (&ad - &a).map(|z| z * i);
    let ev = |op: &CMatrix| (rho * op).trace().re;
    let mean = [ev(&x), ev(&p)];
    let xx = ev(&(&x * &x));
    let pp = ev(&(&p * &p));
    let xp = 0.5 * (ev(&(&x * &p)) + ev(&(&p * &x)));
    let cov = DMatrix::from_row_slice(
        2,
        2,
        &[
            xx - mean[0] * mean[0],
            xp - mean[0] * mean[1],
            xp - mean[0] * mean[1],
            pp - mean[1] * mean[1],
        ],
    );
    (mean, cov)
}

fn hermitian_sqrt(m: &CMatrix) -> CMatrix {
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    let eig = h.symmetric_eigen();
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|x| Complex64::new(x.max(0.0).sqrt(), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Fidelity of `ρ = AA†` and `σ = BB†`: `(Tr |A†B|)²`.
pub fn factor_fidelity(a: &CMatrix, b: &CMatrix) -> f64 {
    let s: f64 = (a.adjoint() * b).singular_values().iter().sum();
    s * s
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn uhlmann_fidelity(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let root = hermitian_sqrt(rho);
    let inner = &root * sigma * &root;
    let h = (&inner + inner.adjoint()).map(|z| z * 0.5);
    let s: f64 = h.symmetric_eigenvalues().iter().map(|x| x.max(0.0).sqrt()).sum();
    s * s
}

/// Hermitian `H` with `exp(iH) = Wᵀ`, the single-particle generator of the
/// Fock-space unitary that maps coherent amplitudes `γ → γW`.
pub fn passive_generator(w: &CMatrix) -> Result<CMatrix> {
    linalg::check_unitary(w)?;
    let wt = w.transpose();
    let schur = wt.clone().schur();
    let (q, t) = schur.unpack();
    let n = w.nrows();
    let d = CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(t[(i, i)].arg(), 0.0) } else { ZERO });
    let h = &q * d * q.adjoint();
    Ok((&h + h.adjoint()).map(|z| z * 0.5))
}

fn sector_basis(modes: usize, total: usize) -> Vec<Vec<usize>> {
    if modes == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in sector_basis(modes - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Joint photon-number distribution of `W (⊗ρⱼ) W†` over all patterns with at
/// most `max_total` photons. Returns `(occupations, probability)` pairs; their
/// sum falls short of one by the truncated tail.
pub fn passive_photon_distribution(
    inputs: &[CMatrix],
    w: &CMatrix,
    max_total: usize,
) -> Result<Vec<(Vec<usize>, f64)>> {
    let m = inputs.len();
    if w.nrows() != m || w.ncols() != m {
        return Err(Error::Shape(format!("{m} input modes but {}x{} interferometer", w.nrows(), w.ncols())));
    }
    if let Some(small) = inputs.iter().find(|r| r.nrows() <= max_total) {
        return Err(Error::Shape(format!(
            "input density has {} levels, need more than {max_total}",
            small.nrows()
        )));
    }
    let h = passive_generator(w)?;
    let mut out = Vec::new();
    for total in 0..=max_total {
        let basis = sector_basis(m, total);
        let dim = basis.len();
        let index: HashMap<&[usize], usize> = basis.iter().enumerate().map(|(i, b)| (b.as_slice(), i)).collect();
        // Σ H_ij a_i† a_j restricted to the sector.
        let mut hs = CMatrix::zeros(dim, dim);
        for (col, occ) in basis.iter().enumerate() {
            for j in 0..m {
                if occ[j] == 0 {
                    continue;
                }
                for i in 0..m {
                    let mut next = occ.clone();
                    next[j] -= 1;
                    let amp_low = (occ[j] as f64).sqrt();
                    next[i] += 1;
                    let amp = amp_low * (next[i] as f64).sqrt();
                    let row = index[next.as_slice()];
                    hs[(row, col)] += h[(i, j)] * amp;
                }
            }
        }
        let eig = ((&hs + hs.adjoint()).map(|z| z * 0.5)).symmetric_eigen();
        let phase = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, l)));
        let u = &eig.eigenvectors * phase * eig.eigenvectors.adjoint();
        let rho = CMatrix::from_fn(dim, dim, |a, b| {
            (0..m).fold(Complex64::new(1.0, 0.0), |acc, j| acc * inputs[j][(basis[a][j], basis[b][j])])
        });
        let evolved = &u * rho * u.adjoint();
        for (a, occ) in basis.into_iter().enumerate() {
            out.push((occ, evolved[(a, a)].re));
        }
    }
    Ok(out)
}
