//! Noisy threshold detectors.
//!
//! The "off" element `Π₀ = (1 − p_D) Σₙ (1 − η_D)ⁿ |n⟩⟨n|` is an unnormalized
//! thermal operator, so its ordered PQDs and its expectation values in Gaussian
//! states are closed-form Gaussians. Click-pattern probabilities follow from
//! all-off probabilities of mode subsets by inclusion–exclusion.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock;
use crate::linalg::CMatrix;
use crate::state::GaussianState;

/// Largest mode count accepted by the inclusion–exclusion oracle.
pub const MAX_ORACLE_MODES: usize = 12;
/// Largest mode count accepted by the Fock-truncation oracle.
pub const MAX_FOCK_MODES: usize = 3;

const ORDERING_TOL: f64 = 1e-12;

/// Threshold detector with efficiency `eta_d ∈ (0, 1]` and dark-count probability `p_d ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DetectorJson", into = "DetectorJson")]
pub struct DetectorSpec {
    eta_d: f64,
    p_d: f64,
}

#[derive(Serialize, Deserialize)]
struct DetectorJson {
    eta_d: f64,
    p_d: f64,
}

impl TryFrom<DetectorJson> for DetectorSpec {
    type Error = Error;
    fn try_from(j: DetectorJson) -> Result<Self> {
        DetectorSpec::new(j.eta_d, j.p_d)
    }
}

impl From<DetectorSpec> for DetectorJson {
    fn from(d: DetectorSpec) -> Self {
        Self { eta_d: d.eta_d, p_d: d.p_d }
    }
}

impl DetectorSpec {
    pub fn new(eta_d: f64, p_d: f64) -> Result<Self> {
        if !(eta_d > 0.0) {
            return Err(Error::DegenerateDetector);
        }
        if eta_d > 1.0 {
            return Err(Error::InvalidParameter(format!("detector efficiency {eta_d} > 1")));
        }
        if !(0.0..1.0).contains(&p_d) {
            return Err(Error::InvalidParameter(format!("dark-count probability {p_d} outside [0, 1)")));
        }
        Ok(Self { eta_d, p_d })
    }

    pub fn ideal() -> Self {
        Self { eta_d: 1.0, p_d: 0.0 }
    }

    pub fn eta_d(&self) -> f64 {
        self.eta_d
    }

    pub fn p_d(&self) -> f64 {
        self.p_d
    }

    /// `q_D = p_D / η_D`.
    pub fn q_d(&self) -> f64 {
        self.p_d / self.eta_d
    }
}

/// `weight × (normalized thermal state with parameter k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianOperator {
    pub weight: f64,
    /// Covariance scale `k = 2n̄ + 1` of the normalized thermal part.
    pub k: f64,
}

impl GaussianOperator {
    pub fn n_bar(&self) -> f64 {
        (self.k - 1.0) / 2.0
    }
}

/// `Π₀ = (1 − p_D)/η_D · ν_th(n̄′ = (1 − η_D)/η_D)`.
pub fn povm_off(d: &DetectorSpec) -> Result<GaussianOperator> {
    if !(d.eta_d > 0.0) {
        return Err(Error::DegenerateDetector);
    }
    Ok(GaussianOperator {
        weight: (1.0 - d.p_d) / d.eta_d,
        k: (2.0 - d.eta_d) / d.eta_d,
    })
}

/// `s̄ = 1 − 2p_D/η_D`.
pub fn detector_ordering_threshold(d: &DetectorSpec) -> f64 {
    1.0 - 2.0 * d.q_d()
}

/// Per-mode "off" probability at a phase-space point, `π W^{(−s)}_{Π₀}(β)`,
/// precomputed for one detector and ordering.
#[derive(Debug, Clone, Copy)]
pub struct PointResponse {
    peak: f64,
    width: f64,
}

impl PointResponse {
    pub fn new(d: &DetectorSpec, s: f64) -> Result<Self> {
        let s_bar = detector_ordering_threshold(d);
        if s < s_bar - ORDERING_TOL {
            return Err(Error::NotAProbability { s, s_bar });
        }
        let pi0 = povm_off(d)?;
        let width = pi0.k + s;
        Ok(Self {
            peak: (2.0 * pi0.weight / width).min(1.0),
            width,
        })
    }

    /// Off probability for `|β|² = norm_sqr`.
    pub fn off(&self, norm_sqr: f64) -> f64 {
        self.peak * (-2.0 * norm_sqr / self.width).exp()
    }

    pub fn on(&self, norm_sqr: f64) -> f64 {
        1.0 - self.off(norm_sqr)
    }
}

/// `π W^{(−s)}_{Π₀}(β)`; the "on" probability is its complement.
pub fn off_probability_given_point(d: &DetectorSpec, s: f64, beta: Complex64) -> Result<f64> {
    Ok(PointResponse::new(d, s)?.off(beta.norm_sqr()))
}

/// Probabilities of all 2^m click patterns. Index bit `j` set ⇔ mode `j` clicked.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable {
    modes: usize,
    probs: Vec<f64>,
}

impl OutcomeTable {
    pub fn new(modes: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << modes {
            return Err(Error::Shape(format!(
                "{} probabilities for {modes} modes",
                probs.len()
            )));
        }
        Ok(Self { modes, probs })
    }

    /// Empirical table from pattern counts.
    pub fn from_counts(modes: usize, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidParameter("no samples".into()));
        }
        Self::new(modes, counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, pattern: usize) -> f64 {
        self.probs[pattern]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Bitstring with character `j` giving mode `j` (`0` off, `1` on).
    pub fn pattern_string(&self, pattern: usize) -> String {
        pattern_string(pattern, self.modes)
    }

    /// CSV with header `pattern,probability`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["pattern", "probability"])?;
        for (i, p) in self.probs.iter().enumerate() {
            w.write_record([self.pattern_string(i), format!("{p:.17e}")])?;
        }
        w.flush()
    }
}

pub fn pattern_string(pattern: usize, modes: usize) -> String {
    (0..modes).map(|j| if pattern >> j & 1 == 1 { '1' } else { '0' }).collect()
}

/// `Tr[ρ ⊗_{j∈S} Π₀]` for the modes in `mask`.
pub fn all_off_probability(state: &GaussianState, d: &DetectorSpec, mask: usize) -> Result<f64> {
    let pi0 = povm_off(d)?;
    let modes: Vec<usize> = (0..state.modes()).filter(|j| mask >> j & 1 == 1).collect();
    if modes.is_empty() {
        return Ok(1.0);
    }
    let sub = state.reduce(&modes)?;
    let n = 2 * modes.len();
    // Tr[ρ₁ρ₂] = 2ⁿ/√det(σ₁+σ₂) · exp(−2 vᵀ(σ₁+σ₂)⁻¹v) for v-unit mean difference.
    let sum = sub.cov() + DMatrix::identity(n, n) * pi0.k;
    let chol = sum
        .cholesky()
        .ok_or_else(|| Error::NumericalConsistency("σ + k'I not positive definite".into()))?;
    let log_det: f64 = chol.l().diagonal().iter().map(|x| 2.0 * x.ln()).sum();
    let v = sub.mean_v();
    let quad = v.dot(&chol.solve(&v));
    let count = modes.len() as f64;
    Ok((count * (pi0.weight * 2.0).ln() - 0.5 * log_det - 2.0 * quad).exp())
}

/// Exact click-pattern distribution by inclusion–exclusion over "on" subsets:
/// `p(n) = Σ_{S ⊆ on(n)} (−1)^{|S|} P_off(off(n) ∪ S)`.
pub fn exact_outcome_probabilities(state: &GaussianState, d: &DetectorSpec) -> Result<OutcomeTable> {
    let m = state.modes();
    if m > MAX_ORACLE_MODES {
        return Err(Error::OracleScale { modes: m, max: MAX_ORACLE_MODES });
    }
    let full = (1usize << m) - 1;
    let all_off: Vec<f64> = (0..=full)
        .into_par_iter()
        .map(|mask| all_off_probability(state, d, mask))
        .collect::<Result<_>>()?;
    let probs = (0..=full)
        .into_par_iter()
        .map(|on| {
            let off = full & !on;
            let mut acc = 0.0;
            let mut sub = on;
            loop {
                let sign = if sub.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * all_off[off | sub];
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & on;
            }
            acc
        })
        .collect();
    OutcomeTable::new(m, probs)
}

/// Independent Fock-space evaluation for `W (⊗ inputs) W†`, `m ≤ 3`.
///
/// The total photon cutoff grows until the truncated tail carries less than `1e-8`.
pub fn fock_outcome_probabilities(inputs: &[GaussianState], w: &CMatrix, d: &DetectorSpec) -> Result<OutcomeTable> {
    const TAIL: f64 = 1e-8;
    const MAX_TOTAL: usize = 60;
    let m = inputs.len();
    if m == 0 {
        return Err(Error::InvalidSize(0));
    }
    if m > MAX_FOCK_MODES {
        return Err(Error::OracleScale { modes: m, max: MAX_FOCK_MODES });
    }
    let off_weight = |n: usize| (1.0 - d.p_d) * (1.0 - d.eta_d).powi(n as i32);
    let mut total = 8;
    loop {
        let rhos: Vec<CMatrix> = inputs
            .iter()
            .map(|s| fock::single_mode_density(s, total + 1))
            .collect::<Result<_>>()?;
        let dist = fock::passive_photon_distribution(&rhos, w, total)?;
        let captured: f64 = dist.iter().map(|(_, p)| p).sum();
        let deficit = 1.0 - captured;
        if deficit < TAIL {
            let mut probs = vec![0.0; 1 << m];
            for (occ, p) in &dist {
                for (pattern, slot) in probs.iter_mut().enumerate() {
                    let weight: f64 = occ
                        .iter()
                        .enumerate()
                        .map(|(j, &n)| {
                            let off = off_weight(n);
                            if pattern >> j & 1 == 1 {
                                1.0 - off
                            } else {
                                off
                            }
                        })
                        .product();
                    *slot += p * weight;
                }
            }
            return OutcomeTable::new(m, probs);
        }
        if total >= MAX_TOTAL {
            return Err(Error::Truncation { deficit, cutoff: total });
        }
        total = (total + 6).min(MAX_TOTAL);
    }
}

/// `½ Σ |p − q|`.
pub fn exact_tvd(p: &OutcomeTable, q: &OutcomeTable) -> Result<f64> {
    if p.modes != q.modes {
        return Err(Error::Shape(format!(
            "pattern spaces differ: {} vs {} modes",
            p.modes, q.modes
        )));
    }
    Ok(0.5 * p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn povm_examples() {
        let ideal = povm_off(&DetectorSpec::ideal()).unwrap();
        assert_eq!(ideal, GaussianOperator { weight: 1.0, k: 1.0 });
        let dark = povm_off(&DetectorSpec::new(1.0, 0.1).unwrap()).unwrap();
        assert_relative_eq!(dark.weight, 0.9);
        assert_relative_eq!(dark.n_bar(), 0.0);
        let half = povm_off(&DetectorSpec::new(0.5, 0.0).unwrap()).unwrap();
        assert_relative_eq!(half.weight, 2.0);
        assert_relative_eq!(half.n_bar(), 1.0);
        assert_eq!(DetectorSpec::new(0.0, 0.0), Err(Error::DegenerateDetector));
    }

    #[test]
    fn povm_matches_geometric_series() {
        // weight·ν_th has Fock weights weight·(1−z)zⁿ with z = n̄/(1+n̄); compare with (1−p)(1−η)ⁿ.
        let d = DetectorSpec::new(0.5, 0.0).unwrap();
        let op = povm_off(&d).unwrap();
        let z = op.n_bar() / (1.0 + op.n_bar());
        for n in 0..200 {
            let series = (1.0 - d.p_d()) * (1.0 - d.eta_d()).powi(n);
            let thermal = op.weight * (1.0 - z) * z.powi(n);
            assert_relative_eq!(series, thermal, max_relative = 1e-12);
        }
    }

    #[test]
    fn ordering_thresholds() {
        assert_eq!(detector_ordering_threshold(&DetectorSpec::ideal()), 1.0);
        assert_relative_eq!(detector_ordering_threshold(&DetectorSpec::new(0.4, 0.2).unwrap()), 0.0);
        assert_relative_eq!(detector_ordering_threshold(&DetectorSpec::new(0.8, 0.2).unwrap()), 0.5);
    }

    #[test]
    fn point_probabilities() {
        let ideal = DetectorSpec::ideal();
        assert_relative_eq!(off_probability_given_point(&ideal, 1.0, Complex64::new(0.0, 0.0)).unwrap(), 1.0);
        assert!(off_probability_given_point(&ideal, 1.0, Complex64::new(30.0, 0.0)).unwrap() < 1e-300);
        let d = DetectorSpec::new(0.5, 0.1).unwrap();
        let s_bar = detector_ordering_threshold(&d);
        assert_relative_eq!(
            off_probability_given_point(&d, s_bar, Complex64::new(0.0, 0.0)).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert!(matches!(
            off_probability_given_point(&d, s_bar - 0.01, Complex64::new(0.0, 0.0)),
            Err(Error::NotAProbability { .. })
        ));
    }

    #[test]
    fn single_mode_tables() {
        let vac = GaussianState::vacuum(1).unwrap();
        let t = exact_outcome_probabilities(&vac, &DetectorSpec::ideal()).unwrap();
        assert_relative_eq!(t.get(0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(t.get(1), 0.0, epsilon = 1e-15);

        let th = GaussianState::thermal(3.0, 1).unwrap();
        let t = exact_outcome_probabilities(&th, &DetectorSpec::ideal()).unwrap();
        assert_relative_eq!(t.get(0), 0.5, epsilon = 1e-15);
        let t = exact_outcome_probabilities(&th, &DetectorSpec::new(1.0, 0.1).unwrap()).unwrap();
        assert_relative_eq!(t.get(0), 0.45, epsilon = 1e-15);
    }

    #[test]
    fn coherent_off_probability() {
        // ⟨α|Π₀|α⟩ = (1−p) e^{−η|α|²}
        let d = DetectorSpec::new(0.7, 0.05).unwrap();
        let alpha = Complex64::new(0.8, -0.4);
        let s = GaussianState::coherent(&[alpha]).unwrap();
        let t = exact_outcome_probabilities(&s, &d).unwrap();
        assert_relative_eq!(t.get(0), 0.95 * (-0.7 * alpha.norm_sqr()).exp(), epsilon = 1e-14);
    }

    #[test]
    fn oracle_scale_limit() {
        let s = GaussianState::vacuum(13).unwrap();
        assert_eq!(
            exact_outcome_probabilities(&s, &DetectorSpec::ideal()),
            Err(Error::OracleScale { modes: 13, max: 12 })
        );
    }

    #[test]
    fn tvd_examples() {
        let p = OutcomeTable::new(1, vec![1.0, 0.0]).unwrap();
        let q = OutcomeTable::new(1, vec![0.0, 1.0]).unwrap();
        assert_eq!(exact_tvd(&p, &p).unwrap(), 0.0);
        assert_eq!(exact_tvd(&p, &q).unwrap(), 1.0);
        let r = OutcomeTable::new(2, vec![0.25; 4]).unwrap();
        assert!(matches!(exact_tvd(&p, &r), Err(Error::Shape(_))));
    }

    #[test]
    fn csv_output() {
        let t = OutcomeTable::new(2, vec![0.5, 0.25, 0.125, 0.125]).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "pattern,probability");
        assert!(lines[2].starts_with("10,"));
        assert!(lines[3].starts_with("01,"));
    }
}
