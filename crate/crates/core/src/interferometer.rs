//! Passive interferometer matrices: beam splitters, Haar-random unitaries,
//! and the flat `[re, im]` JSON encoding.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Two-mode beam splitter with transmissivity `t ∈ [0, 1]` and phase `phi`.
pub fn beam_splitter(t: f64, phi: f64) -> CMatrix {
    let a = Complex64::new(t.sqrt(), 0.0);
    let b = (1.0 - t).sqrt();
    CMatrix::from_row_slice(
        2,
        2,
        &[
            a,
            Complex64::from_polar(b, phi),
            -Complex64::from_polar(b, -phi),
            a,
        ],
    )
}

/// Diagonal unitary of single-mode phases.
pub fn phases(thetas: &[f64]) -> CMatrix {
    let n = thetas.len();
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, thetas[i])
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Haar-distributed m×m unitary: QR of a complex Ginibre matrix with the
/// phases of R's diagonal moved into Q.
pub fn haar_unitary<R: Rng + ?Sized>(modes: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(modes, modes, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let fix = CMatrix::from_fn(modes, modes, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    q * fix
}

/// Decodes a row-major flat list of `[re, im]` pairs into a square unitary.
pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<CMatrix> {
    let n = (pairs.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != pairs.len() {
        return Err(Error::Shape(format!(
            "interferometer needs a square number of [re, im] entries, got {}",
            pairs.len()
        )));
    }
    let w = CMatrix::from_row_iterator(n, n, pairs.iter().map(|p| Complex64::new(p[0], p[1])));
    linalg::check_unitary(&w)?;
    Ok(w)
}

pub fn to_pairs(w: &CMatrix) -> Vec<[f64; 2]> {
    let (rows, cols) = w.shape();
    (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .map(|ij| [w[ij].re, w[ij].im])
        .collect()
}

/// Real orthogonal matrix in quadrature space corresponding to `W`.
pub fn symplectic_image(w: &CMatrix) -> DMatrix<f64> {
    linalg::column_action(w)
}
