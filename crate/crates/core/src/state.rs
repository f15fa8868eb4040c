//! Gaussian states, their ordered quasi-probability distributions, and the
//! two elementary Gaussian maps (passive interferometers and classical noise).
//!
//! Conventions: quadratures are `x = a + a†`, `p = i(a† − a)`, so the vacuum
//! covariance is the identity and a thermal state with `k = 2n̄ + 1` has
//! covariance `kI`. Covariances are `2m × 2m`, mode-major `(x₁, p₁, x₂, p₂, …)`.
//! Displacements are stored as complex coherent amplitudes `α`; the real
//! phase-space vector of `α` is `v = (Re α₁, Im α₁, …)` and the quadrature mean
//! is `2v` (see [`GaussianState::quadrature_mean`]).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, PSD_TOL};

const SYMMETRY_TOL: f64 = 1e-12;

/// An m-mode Gaussian state: covariance matrix plus coherent displacement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianStateJson", into = "GaussianStateJson")]
pub struct GaussianState {
    cov: DMatrix<f64>,
    disp: Vec<Complex64>,
}

impl GaussianState {
    /// Validates shape, symmetry and the uncertainty principle `cov + iΩ ⪰ 0`.
    pub fn new(cov: DMatrix<f64>, disp: Vec<Complex64>) -> Result<Self> {
        let modes = disp.len();
        if modes == 0 {
            return Err(Error::InvalidSize(0));
        }
        if cov.shape() != (2 * modes, 2 * modes) {
            return Err(Error::Shape(format!(
                "covariance is {}x{}, expected {}x{} for {} modes",
                cov.nrows(),
                cov.ncols(),
                2 * modes,
                2 * modes,
                modes
            )));
        }
        if cov.iter().chain(disp.iter().flat_map(|z| [&z.re, &z.im])).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite state entry".into()));
        }
        let scale = cov.amax().max(1.0);
        let asym = linalg::max_asymmetry(&cov);
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        let cov = linalg::symmetrize(&cov);
        let min_eig = linalg::uncertainty_min_eigenvalue(&cov);
        if min_eig < -PSD_TOL * scale {
            return Err(Error::NotBonaFide { min_eig });
        }
        Ok(Self { cov, disp })
    }

    /// Skips the bona-fide check; used internally where validity follows from construction.
    pub(crate) fn from_parts_unchecked(cov: DMatrix<f64>, disp: Vec<Complex64>) -> Self {
        Self {
            cov: linalg::symmetrize(&cov),
            disp,
        }
    }

    pub fn vacuum(modes: usize) -> Result<Self> {
        make_state(StateKind::Vacuum, modes)
    }

    pub fn thermal(k: f64, modes: usize) -> Result<Self> {
        make_state(StateKind::Thermal { k }, modes)
    }

    pub fn squeezed_vacuum(r: f64, modes: usize) -> Result<Self> {
        make_state(StateKind::SqueezedVacuum { r }, modes)
    }

    /// Product of coherent states with the given amplitudes.
    pub fn coherent(alphas: &[Complex64]) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidSize(0));
        }
        Ok(Self::from_parts_unchecked(
            DMatrix::identity(2 * alphas.len(), 2 * alphas.len()),
            alphas.to_vec(),
        ))
    }

    /// Tensor product, modes in the given order.
    pub fn product(parts: &[GaussianState]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidSize(0));
        }
        let modes: usize = parts.iter().map(|s| s.modes()).sum();
        let mut cov = DMatrix::zeros(2 * modes, 2 * modes);
        let mut disp = Vec::with_capacity(modes);
        let mut offset = 0;
        for part in parts {
            let n = 2 * part.modes();
            cov.view_mut((offset, offset), (n, n)).copy_from(&part.cov);
            disp.extend_from_slice(&part.disp);
            offset += n;
        }
        Ok(Self::from_parts_unchecked(cov, disp))
    }

    pub fn modes(&self) -> usize {
        self.disp.len()
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn disp(&self) -> &[Complex64] {
        &self.disp
    }

    /// Displacement as a real phase-space vector `(Re α₁, Im α₁, …)`.
    pub fn mean_v(&self) -> DVector<f64> {
        linalg::complex_to_real(&self.disp)
    }

    /// Quadrature expectation values `(⟨x₁⟩, ⟨p₁⟩, …) = 2·(Re α₁, Im α₁, …)`.
    pub fn quadrature_mean(&self) -> DVector<f64> {
        v_to_quadrature(&self.mean_v())
    }

    /// Reduced state on the listed modes.
    pub fn reduce(&self, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidSize(0));
        }
        if let Some(&bad) = modes.iter().find(|&&j| j >= self.modes()) {
            return Err(Error::Shape(format!("mode {bad} out of range for {} modes", self.modes())));
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&j| [2 * j, 2 * j + 1]).collect();
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.cov[(idx[a], idx[b])]);
        let disp = modes.iter().map(|&j| self.disp[j]).collect();
        Ok(Self::from_parts_unchecked(cov, disp))
    }

    /// True when all inter-mode covariance blocks vanish.
    pub fn is_product(&self) -> bool {
        let scale = self.cov.amax().max(1.0);
        let m = self.modes();
        (0..m).all(|i| {
            (0..m).filter(|&j| j != i).all(|j| {
                (0..2).all(|a| (0..2).all(|b| self.cov[(2 * i + a, 2 * j + b)].abs() <= 1e-12 * scale))
            })
        })
    }

    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        linalg::symplectic_eigenvalues(&self.cov)
    }

    /// `Tr ρ² = 1/√det σ`.
    pub fn purity(&self) -> f64 {
        1.0 / self.cov.determinant().sqrt()
    }
}

/// Quadrature means are twice the real phase-space coordinates.
pub fn v_to_quadrature(v: &DVector<f64>) -> DVector<f64> {
    v * 2.0
}

pub fn quadrature_to_v(q: &DVector<f64>) -> DVector<f64> {
    q * 0.5
}

#[derive(Serialize, Deserialize)]
struct GaussianStateJson {
    modes: usize,
    cov: Vec<f64>,
    disp: Vec<[f64; 2]>,
}

impl TryFrom<GaussianStateJson> for GaussianState {
    type Error = Error;

    fn try_from(j: GaussianStateJson) -> Result<Self> {
        let n = 2 * j.modes;
        if j.cov.len() != n * n || j.disp.len() != j.modes {
            return Err(Error::Shape(format!(
                "state JSON: {} modes needs {} cov entries and {} disp pairs",
                j.modes,
                n * n,
                j.modes
            )));
        }
        GaussianState::new(
            DMatrix::from_row_slice(n, n, &j.cov),
            j.disp.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
        )
    }
}

impl From<GaussianState> for GaussianStateJson {
    fn from(s: GaussianState) -> Self {
        let n = 2 * s.modes();
        Self {
            modes: s.modes(),
            cov: (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|ij| s.cov[ij]).collect(),
            disp: s.disp.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// Constructor families for product states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateKind {
    Vacuum,
    /// Thermal state with `k = 2n̄ + 1`.
    Thermal { k: f64 },
    /// `S(r)|0⟩` with `S(r) = exp(r/2 (a†² − a²))`.
    SqueezedVacuum { r: f64 },
    Coherent { alpha: Complex64 },
}

/// Builds `m` identical copies of a single-mode state.
pub fn make_state(kind: StateKind, modes: usize) -> Result<GaussianState> {
    if modes == 0 {
        return Err(Error::InvalidSize(modes));
    }
    let (block, alpha) = match kind {
        StateKind::Vacuum => ([1.0, 1.0], Complex64::new(0.0, 0.0)),
        StateKind::Thermal { k } => {
            if !(k >= 1.0) || !k.is_finite() {
                return Err(Error::InvalidTemperature(k));
            }
            ([k, k], Complex64::new(0.0, 0.0))
        }
        StateKind::SqueezedVacuum { r } => {
            if !r.is_finite() {
                return Err(Error::InvalidParameter(format!("squeezing r = {r}")));
            }
            ([(2.0 * r).exp(), (-2.0 * r).exp()], Complex64::new(0.0, 0.0))
        }
        StateKind::Coherent { alpha } => ([1.0, 1.0], alpha),
    };
    let diag = DVector::from_iterator(2 * modes, (0..modes).flat_map(|_| block));
    Ok(GaussianState::from_parts_unchecked(
        DMatrix::from_diagonal(&diag),
        vec![alpha; modes],
    ))
}

/// Whether the values are state orderings `t` or measurement orderings `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderingRole {
    State,
    Measurement,
}

/// Per-mode ordering parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingSpec {
    values: Vec<f64>,
    role: OrderingRole,
}

impl OrderingSpec {
    pub fn new(values: Vec<f64>, role: OrderingRole) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSize(0));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("ordering values must be finite".into()));
        }
        Ok(Self { values, role })
    }

    pub fn state(values: Vec<f64>) -> Result<Self> {
        Self::new(values, OrderingRole::State)
    }

    pub fn measurement(values: Vec<f64>) -> Result<Self> {
        Self::new(values, OrderingRole::Measurement)
    }

    pub fn uniform(value: f64, modes: usize, role: OrderingRole) -> Result<Self> {
        Self::new(vec![value; modes], role)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn role(&self) -> OrderingRole {
        self.role
    }

    pub fn modes(&self) -> usize {
        self.values.len()
    }

    /// `diag(values) ⊗ I₂`.
    pub fn lifted(&self) -> DMatrix<f64> {
        linalg::lift_diagonal(&self.values)
    }
}

/// A point `β` of m-mode phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub beta: Vec<Complex64>,
}

impl PhasePoint {
    pub fn new(beta: Vec<Complex64>) -> Self {
        Self { beta }
    }

    pub fn origin(modes: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); modes])
    }

    pub fn from_real(v: &DVector<f64>) -> Self {
        Self::new(linalg::real_to_complex(v))
    }

    /// `(Re β₁, Im β₁, …)`.
    pub fn to_real(&self) -> DVector<f64> {
        linalg::complex_to_real(&self.beta)
    }

    pub fn modes(&self) -> usize {
        self.beta.len()
    }
}

/// The t-ordered PQD of a Gaussian state as an explicit Gaussian density on
/// real phase-space vectors: mean `v_α`, covariance `(σ − t̃)/4`.
#[derive(Debug, Clone)]
pub struct PqdGaussian {
    pub mean: DVector<f64>,
    /// `σ − t̃` (quadrature units).
    pub shifted_cov: DMatrix<f64>,
    inverse: DMatrix<f64>,
    log_norm: f64,
}

impl PqdGaussian {
    pub fn new(state: &GaussianState, ordering: &OrderingSpec) -> Result<Self> {
        check_modes(state.modes(), ordering.modes())?;
        let shifted = state.cov() - ordering.lifted();
        let scale = shifted.amax().max(1.0);
        let min_eig = linalg::min_eigenvalue(&shifted);
        if min_eig <= PSD_TOL * scale {
            return Err(Error::OrderingTooHigh { min_eig });
        }
        let chol = shifted
            .clone()
            .cholesky()
            .ok_or(Error::OrderingTooHigh { min_eig })?;
        let log_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        let m = state.modes() as f64;
        let log_norm = m * (2.0f64.ln() - std::f64::consts::PI.ln()) - 0.5 * log_det;
        Ok(Self {
            mean: state.mean_v(),
            inverse: chol.inverse(),
            shifted_cov: shifted,
            log_norm,
        })
    }

    pub fn value_at(&self, v: &DVector<f64>) -> f64 {
        let d = v - &self.mean;
        (self.log_norm - 2.0 * d.dot(&(&self.inverse * &d))).exp()
    }
}

fn check_modes(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!("mode count mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// `W^{(t)}(β) = 2^m / (π^m √det(σ − t̃)) · exp(−2 (v_β − v_α)ᵀ (σ − t̃)⁻¹ (v_β − v_α))`.
pub fn pqd_value(state: &GaussianState, ordering: &OrderingSpec, point: &PhasePoint) -> Result<f64> {
    check_modes(state.modes(), point.modes())?;
    Ok(PqdGaussian::new(state, ordering)?.value_at(&point.to_real()))
}

/// Largest ordering for which the state's PQD is a proper density.
///
/// Product states get the per-mode value (smallest eigenvalue of each 2×2
/// block); correlated states get the uniform boundary `λ_min(σ)` on every mode.
pub fn max_classical_ordering(state: &GaussianState) -> Vec<f64> {
    if state.is_product() {
        (0..state.modes())
            .map(|j| {
                let block = state.cov().view((2 * j, 2 * j), (2, 2)).into_owned();
                linalg::min_eigenvalue(&block)
            })
            .collect()
    } else {
        vec![linalg::min_eigenvalue(state.cov()); state.modes()]
    }
}

/// `σ − t̃ ⪰ 0` with an absolute eigenvalue tolerance of 1e-10.
pub fn is_t_classical(state: &GaussianState, t: &OrderingSpec) -> bool {
    if state.modes() != t.modes() {
        return false;
    }
    linalg::min_eigenvalue(&(state.cov() - t.lifted())) >= -PSD_TOL
}

/// Passive interferometer `γ → γW`: `σ → SσSᵀ` with `S` the orthogonal image of `W`.
pub fn apply_symplectic(state: &GaussianState, w: &CMatrix) -> Result<GaussianState> {
    if w.nrows() != state.modes() || w.ncols() != state.modes() {
        return Err(Error::Shape(format!(
            "interferometer is {}x{}, state has {} modes",
            w.nrows(),
            w.ncols(),
            state.modes()
        )));
    }
    linalg::check_unitary(w)?;
    let s = linalg::column_action(w);
    let cov = &s * state.cov() * s.transpose();
    Ok(GaussianState::from_parts_unchecked(
        cov,
        linalg::row_times(state.disp(), w),
    ))
}

/// Classical mixing: `σ → σ + cI`, displacement unchanged.
pub fn add_gaussian_noise(state: &GaussianState, c: f64) -> Result<GaussianState> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::InvalidNoise(c));
    }
    let n = state.cov().nrows();
    Ok(GaussianState::from_parts_unchecked(
        state.cov() + DMatrix::identity(n, n) * c,
        state.disp().to_vec(),
    ))
}
