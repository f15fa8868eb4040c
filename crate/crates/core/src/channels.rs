//! Lossy linear-optical networks coupled to a thermal environment.
//!
//! The channel mixes the m system modes with m environment modes, each in a
//! thermal state with parameter `k = 2n̄ + 1`, through a 2m-mode unitary whose
//! system block is the transfer matrix `L`. On covariances it acts as
//! `σ → XσXᵀ + k(I − XXᵀ)` where `X` is the real image of `L`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interferometer;
use crate::linalg::{self, CMatrix, PSD_TOL};
use crate::rng;
use crate::state::{self, GaussianState, OrderingSpec};

/// A general noisy LON: subunitary transfer matrix `L` and thermal parameter `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LonChannel {
    l: CMatrix,
    k: f64,
}

impl LonChannel {
    pub fn new(l: CMatrix, k: f64) -> Result<Self> {
        check_k(k)?;
        if !l.is_square() || l.nrows() == 0 {
            return Err(Error::Shape(format!("transfer matrix is {}x{}", l.nrows(), l.ncols())));
        }
        let n = l.nrows();
        let gap = CMatrix::identity(n, n) - l.adjoint() * &l;
        let min_eig = gap
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::NotSubunitary { min_eig });
        }
        Ok(Self { l, k })
    }

    pub fn transfer(&self) -> &CMatrix {
        &self.l
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn modes(&self) -> usize {
        self.l.nrows()
    }

    /// Column action `X` of `α → αL` on real phase-space vectors.
    pub fn real_transfer(&self) -> DMatrix<f64> {
        linalg::column_action(&self.l)
    }
}

fn check_k(k: f64) -> Result<()> {
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::InvalidTemperature(k));
    }
    Ok(())
}

fn check_eta(eta_l: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta_l) {
        return Err(Error::InvalidParameter(format!("transmission eta_L = {eta_l} outside [0, 1]")));
    }
    Ok(())
}

/// Uniform loss: `L = √η_L · W` with `W` unitary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelJson", into = "ChannelJson")]
pub struct UniformLossLon {
    w: CMatrix,
    eta_l: f64,
    k: f64,
}

impl UniformLossLon {
    pub fn new(w: CMatrix, eta_l: f64, k: f64) -> Result<Self> {
        linalg::check_unitary(&w)?;
        check_eta(eta_l)?;
        check_k(k)?;
        Ok(Self { w, eta_l, k })
    }

    pub fn from_n_bar(w: CMatrix, eta_l: f64, n_bar: f64) -> Result<Self> {
        Self::new(w, eta_l, 2.0 * n_bar + 1.0)
    }

    pub fn w(&self) -> &CMatrix {
        &self.w
    }

    pub fn eta_l(&self) -> f64 {
        self.eta_l
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn n_bar(&self) -> f64 {
        (self.k - 1.0) / 2.0
    }

    pub fn modes(&self) -> usize {
        self.w.nrows()
    }

    /// `λ = k(1 − η_L) + η_L`.
    pub fn lambda(&self) -> f64 {
        self.k * (1.0 - self.eta_l) + self.eta_l
    }

    /// Per-mode classical-noise strength `(k − 1)(1 − η_L)`.
    pub fn noise_strength(&self) -> f64 {
        (self.k - 1.0) * (1.0 - self.eta_l)
    }

    pub fn transfer(&self) -> CMatrix {
        self.w.map(|z| z * self.eta_l.sqrt())
    }

    pub fn as_lon(&self) -> LonChannel {
        LonChannel {
            l: self.transfer(),
            k: self.k,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    w: Vec<[f64; 2]>,
    eta_l: f64,
    n_bar: f64,
}

impl TryFrom<ChannelJson> for UniformLossLon {
    type Error = Error;

    fn try_from(j: ChannelJson) -> Result<Self> {
        if !(j.n_bar >= 0.0) {
            return Err(Error::InvalidParameter(format!("n_bar = {} must be >= 0", j.n_bar)));
        }
        UniformLossLon::from_n_bar(interferometer::from_pairs(&j.w)?, j.eta_l, j.n_bar)
    }
}

impl From<UniformLossLon> for ChannelJson {
    fn from(c: UniformLossLon) -> Self {
        Self {
            w: interferometer::to_pairs(&c.w),
            eta_l: c.eta_l,
            n_bar: c.n_bar(),
        }
    }
}

/// Covariance `Σ` of the transition function plus its mean map `α → αL`.
#[derive(Debug, Clone)]
pub struct TransitionGaussian {
    /// Real 2m×2m image of `k(I − L†L) − s + L†tL`.
    pub sigma: DMatrix<f64>,
    /// Column action of `L` on real phase-space vectors.
    pub mean_map: DMatrix<f64>,
    pub min_eigenvalue: f64,
}

impl TransitionGaussian {
    pub fn is_proper(&self) -> bool {
        linalg::is_psd(&self.sigma)
    }
}

/// `Σ = k(I − L†L) − s + L†tL`, lifted to quadrature space.
pub fn transition_sigma(ch: &LonChannel, s: &OrderingSpec, t: &OrderingSpec) -> Result<TransitionGaussian> {
    let m = ch.modes();
    if s.modes() != m || t.modes() != m {
        return Err(Error::Shape(format!(
            "orderings have {} and {} modes, channel has {m}",
            s.modes(),
            t.modes()
        )));
    }
    let x = ch.real_transfer();
    let id = DMatrix::<f64>::identity(2 * m, 2 * m);
    let sigma = linalg::symmetrize(&((&id - &x * x.transpose()) * ch.k - s.lifted() + &x * t.lifted() * x.transpose()));
    let min_eigenvalue = linalg::min_eigenvalue(&sigma);
    Ok(TransitionGaussian {
        sigma,
        mean_map: x,
        min_eigenvalue,
    })
}

fn check_state_modes(state: &GaussianState, modes: usize) -> Result<()> {
    if state.modes() != modes {
        return Err(Error::Shape(format!(
            "state has {} modes, channel has {modes}",
            state.modes()
        )));
    }
    Ok(())
}

/// `σ → XσXᵀ + k(I − XXᵀ)`, `α → αL`.
pub fn apply_channel(ch: &LonChannel, state: &GaussianState) -> Result<GaussianState> {
    check_state_modes(state, ch.modes())?;
    let x = ch.real_transfer();
    let n = 2 * ch.modes();
    let cov = &x * state.cov() * x.transpose() + (DMatrix::identity(n, n) - &x * x.transpose()) * ch.k;
    Ok(GaussianState::from_parts_unchecked(
        cov,
        linalg::row_times(state.disp(), &ch.l),
    ))
}

/// Per-mode thermal-loss map: `σ → η_Lσ + (1 − η_L)kI`, `α → √η_L α`.
pub fn apply_f(state: &GaussianState, eta_l: f64, k: f64) -> Result<GaussianState> {
    check_eta(eta_l)?;
    check_k(k)?;
    let n = state.cov().nrows();
    let cov = state.cov() * eta_l + DMatrix::identity(n, n) * ((1.0 - eta_l) * k);
    let disp = state.disp().iter().map(|z| z * eta_l.sqrt()).collect();
    Ok(GaussianState::from_parts_unchecked(cov, disp))
}

/// Literal 2m-mode construction: system ⊗ thermal environment through the block
/// unitary `[[√η W, √(1−η) W], [√(1−η) W, −√η W]]`, environment traced out.
pub fn dilation_oracle(ch: &UniformLossLon, state: &GaussianState) -> Result<GaussianState> {
    dilation_with_completion(ch, state, ch.w(), &CMatrix::identity(ch.modes(), ch.modes()))
}

/// Dilation with the completion `P = √(1−η) Q`, `N = √(1−η) W Z`, `M = −√η Q Z`
/// for arbitrary unitaries `Q`, `Z`.
pub fn dilation_with_completion(
    ch: &UniformLossLon,
    state: &GaussianState,
    q: &CMatrix,
    z: &CMatrix,
) -> Result<GaussianState> {
    let m = ch.modes();
    check_state_modes(state, m)?;
    linalg::check_unitary(q)?;
    linalg::check_unitary(z)?;
    let (a, b) = (ch.eta_l.sqrt(), (1.0 - ch.eta_l).sqrt());
    let mut u = CMatrix::zeros(2 * m, 2 * m);
    u.view_mut((0, 0), (m, m)).copy_from(&ch.w.map(|x| x * a));
    u.view_mut((0, m), (m, m)).copy_from(&(&ch.w * z).map(|x| x * b));
    u.view_mut((m, 0), (m, m)).copy_from(&q.map(|x| x * b));
    u.view_mut((m, m), (m, m)).copy_from(&(q * z).map(|x| x * -a));
    let env = GaussianState::thermal(ch.k, m)?;
    let joint = GaussianState::product(&[state.clone(), env])?;
    let out = state::apply_symplectic(&joint, &u)?;
    out.reduce(&(0..m).collect::<Vec<_>>())
}

/// Ensemble statistics of the stochastic-displacement unraveling.
#[derive(Debug, Clone)]
pub struct UnravelStats {
    pub n_samples: usize,
    /// Zero-temperature output covariance (identical for every sample).
    pub base_cov: DMatrix<f64>,
    /// Ensemble quadrature mean.
    pub mean: DVector<f64>,
    /// Ensemble covariance: `base_cov` + empirical covariance of the quadrature displacements.
    pub cov: DMatrix<f64>,
    /// Empirical covariance of the sampled quadrature displacements.
    pub displacement_cov: DMatrix<f64>,
    /// Standard errors of the entries of `displacement_cov` (hence of `cov`).
    pub cov_std_err: DMatrix<f64>,
}

/// Samples the channel as a zero-temperature lossy network followed by a random
/// displacement `β ~ f(β)` with per-mode complex variance `(k−1)(1−η_L)/2`.
pub fn stochastic_unravel(ch: &UniformLossLon, state: &GaussianState, seed: u64, n_samples: usize) -> Result<UnravelStats> {
    check_state_modes(state, ch.modes())?;
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be positive".into()));
    }
    let m = ch.modes();
    let dim = 2 * m;
    let zero_t = UniformLossLon::new(ch.w.clone(), ch.eta_l, 1.0)?;
    let base = apply_channel(&zero_t.as_lon(), state)?;
    let base_mean = base.quadrature_mean();
    let c = ch.noise_strength();

    // Σd and Σddᵀ of quadrature displacements 2·v_β, accumulated per chunk.
    let partials: Vec<(DVector<f64>, DMatrix<f64>)> = if c == 0.0 {
        vec![(DVector::zeros(dim), DMatrix::zeros(dim, dim))]
    } else {
        // Real components of β have variance c/4; quadrature displacement 2β has variance c.
        let normal = Normal::new(0.0, c.sqrt()).expect("finite variance");
        rng::chunks(n_samples)
            .into_par_iter()
            .map(|(chunk, len)| {
                let mut r = rng::chunk_rng(seed, chunk);
                let mut sum = DVector::zeros(dim);
                let mut outer = DMatrix::zeros(dim, dim);
                let mut d = DVector::zeros(dim);
                for _ in 0..len {
                    for x in d.iter_mut() {
                        *x = normal.sample(&mut r);
                    }
                    sum += &d;
                    outer.ger(1.0, &d, &d, 1.0);
                }
                (sum, outer)
            })
            .collect()
    };
    let (sum, outer) = partials.into_iter().fold(
        (DVector::zeros(dim), DMatrix::zeros(dim, dim)),
        |(s, o), (ps, po)| (s + ps, o + po),
    );
    let n = n_samples as f64;
    let disp_mean = &sum / n;
    let displacement_cov = if n_samples > 1 {
        (outer - &disp_mean * disp_mean.transpose() * n) / (n - 1.0)
    } else {
        DMatrix::zeros(dim, dim)
    };
    let cov_std_err = DMatrix::from_fn(dim, dim, |i, j| {
        let v = displacement_cov[(i, i)] * displacement_cov[(j, j)] + displacement_cov[(i, j)].powi(2);
        (v / (n - 1.0).max(1.0)).sqrt()
    });
    Ok(UnravelStats {
        n_samples,
        cov: base.cov() + &displacement_cov,
        base_cov: base.cov().clone(),
        mean: base_mean + disp_mean,
        displacement_cov,
        cov_std_err,
    })
}

/// The zero-temperature channel output for a coherent input, `|γ⟩ → |√η γW⟩`.
pub fn zero_temperature_amplitudes(ch: &UniformLossLon, gamma: &[Complex64]) -> Vec<Complex64> {
    linalg::row_times(gamma, &ch.transfer())
}
