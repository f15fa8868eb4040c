//! Classical-simulability criteria and threshold temperatures.
//!
//! Every evaluator returns a [`ClassicalityReport`] whose margin is positive
//! when the sufficient condition holds; the intermediate scalars go into
//! `details` so sweeps can export them.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::channels::{self, LonChannel};
use crate::detectors::DetectorSpec;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::OrderingSpec;

/// Margins at or above `-MARGIN_TOL` count as satisfied.
pub const MARGIN_TOL: f64 = 1e-10;

const HBAR: f64 = 1.054_571_817e-34;
const K_B: f64 = 1.380_649e-23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Simulable,
    NotCertified,
}

impl Verdict {
    pub fn from_margin(margin: f64) -> Self {
        if margin >= -MARGIN_TOL {
            Verdict::Simulable
        } else {
            Verdict::NotCertified
        }
    }

    pub fn is_simulable(self) -> bool {
        self == Verdict::Simulable
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Simulable => "simulable",
            Verdict::NotCertified => "not-certified",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalityReport {
    pub criterion: String,
    pub verdict: Verdict,
    #[serde(serialize_with = "ser_float", deserialize_with = "de_float")]
    pub margin: f64,
    #[serde(serialize_with = "ser_float_map", deserialize_with = "de_float_map")]
    pub details: BTreeMap<String, f64>,
}

impl ClassicalityReport {
    pub fn new(criterion: &str, margin: f64, details: &[(&str, f64)]) -> Self {
        Self {
            criterion: criterion.to_string(),
            verdict: Verdict::from_margin(margin),
            margin,
            details: details.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn is_simulable(&self) -> bool {
        self.verdict.is_simulable()
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.get(key).copied()
    }
}

// JSON has no infinities; diverging thresholds are written as strings.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonFloat {
    Num(f64),
    Text(String),
}

impl From<f64> for JsonFloat {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            JsonFloat::Num(x)
        } else if x.is_nan() {
            JsonFloat::Text("nan".into())
        } else if x > 0.0 {
            JsonFloat::Text("inf".into())
        } else {
            JsonFloat::Text("-inf".into())
        }
    }
}

impl JsonFloat {
    fn value<E: serde::de::Error>(self) -> std::result::Result<f64, E> {
        match self {
            JsonFloat::Num(x) => Ok(x),
            JsonFloat::Text(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!("not a number: {other}"))),
            },
        }
    }
}

fn ser_float<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    JsonFloat::from(*x).serialize(s)
}

fn de_float<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    JsonFloat::deserialize(d)?.value()
}

fn ser_float_map<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let conv: BTreeMap<&String, JsonFloat> = m.iter().map(|(k, v)| (k, JsonFloat::from(*v))).collect();
    conv.serialize(s)
}

fn de_float_map<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<String, f64>, D::Error> {
    BTreeMap::<String, JsonFloat>::deserialize(d)?
        .into_iter()
        .map(|(k, v)| Ok((k, v.value()?)))
        .collect()
}

/// Scalar parameters of a uniform-loss noisy GBS experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSpec {
    pub r: f64,
    pub eta_l: f64,
    pub n_bar: f64,
    pub detector: DetectorSpec,
    pub modes: usize,
    pub epsilon: f64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.r.is_finite() {
            return Err(Error::InvalidParameter(format!("squeezing r = {}", self.r)));
        }
        if !(0.0..=1.0).contains(&self.eta_l) {
            return Err(Error::InvalidParameter(format!("eta_l = {} outside [0, 1]", self.eta_l)));
        }
        if !(self.n_bar >= 0.0) || !self.n_bar.is_finite() {
            return Err(Error::InvalidTemperature(2.0 * self.n_bar + 1.0));
        }
        if self.modes == 0 {
            return Err(Error::InvalidSize(0));
        }
        check_epsilon(self.epsilon)
    }

    pub fn k(&self) -> f64 {
        2.0 * self.n_bar + 1.0
    }

    pub fn a_minus(&self) -> f64 {
        a_minus(self.r, self.eta_l, self.k())
    }

    pub fn a_plus(&self) -> f64 {
        a_plus(self.r, self.eta_l, self.k())
    }

    /// The uniform-loss channel `√η_L W` at this temperature.
    pub fn channel(&self, w: &CMatrix) -> Result<LonChannel> {
        channels::UniformLossLon::new(w.clone(), self.eta_l, self.k()).map(|c| c.as_lon())
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} outside [0, 1]")));
    }
    Ok(())
}

/// Squeezed-quadrature variance after thermal loss: `η_L e^{−2r} + k(1 − η_L)`.
pub fn a_minus(r: f64, eta_l: f64, k: f64) -> f64 {
    eta_l * (-2.0 * r).exp() + k * (1.0 - eta_l)
}

/// Anti-squeezed variance after thermal loss: `η_L e^{2r} + k(1 − η_L)`.
pub fn a_plus(r: f64, eta_l: f64, k: f64) -> f64 {
    eta_l * (2.0 * r).exp() + k * (1.0 - eta_l)
}

/// Minimum eigenvalue of `k(I − L†L) − s̄ + L†t̄L`.
pub fn general_condition(ch: &LonChannel, s_bar: &OrderingSpec, t_bar: &OrderingSpec) -> Result<ClassicalityReport> {
    let tr = channels::transition_sigma(ch, s_bar, t_bar)?;
    Ok(ClassicalityReport::new(
        "general_condition",
        tr.min_eigenvalue,
        &[
            ("min_eigenvalue", tr.min_eigenvalue),
            ("k", ch.k()),
            ("modes", ch.modes() as f64),
        ],
    ))
}

/// `k ≥ λ_max[(s̄ − η_L W†t̄W)/(1 − η_L)]` for `L = √η_L W`.
pub fn uniform_recast(eta_l: f64, k: f64, s_bar: &OrderingSpec, t_bar: &OrderingSpec, w: &CMatrix) -> Result<ClassicalityReport> {
    let m = w.nrows();
    if s_bar.modes() != m || t_bar.modes() != m || !w.is_square() {
        return Err(Error::Shape(format!(
            "orderings have {} and {} modes, interferometer is {}x{}",
            s_bar.modes(),
            t_bar.modes(),
            w.nrows(),
            w.ncols()
        )));
    }
    linalg::check_unitary(w)?;
    if !(0.0..=1.0).contains(&eta_l) {
        return Err(Error::InvalidParameter(format!("eta_l = {eta_l} outside [0, 1]")));
    }
    if eta_l == 1.0 {
        return Ok(ClassicalityReport::new(
            "uniform_recast",
            f64::NEG_INFINITY,
            &[("k", k), ("rhs", f64::INFINITY)],
        ));
    }
    let diag = |v: &[f64]| {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            v.len(),
            v.iter().map(|x| Complex64::new(*x, 0.0)),
        ))
    };
    let inner = (diag(s_bar.values()) - w.adjoint() * diag(t_bar.values()) * w * Complex64::new(eta_l, 0.0))
        / Complex64::new(1.0 - eta_l, 0.0);
    let rhs = linalg::max_eigenvalue(&linalg::real_rep(&inner));
    Ok(ClassicalityReport::new("uniform_recast", k - rhs, &[("k", k), ("rhs", rhs)]))
}

/// `q_D ≥ η_L(1 − e^{−2r})/2 − n̄(1 − η_L)`.
pub fn gbs_condition(r: f64, eta_l: f64, n_bar: f64, d: &DetectorSpec) -> ClassicalityReport {
    let rhs = eta_l * (1.0 - (-2.0 * r).exp()) / 2.0 - n_bar * (1.0 - eta_l);
    let q_d = d.q_d();
    ClassicalityReport::new(
        "gbs_condition",
        q_d - rhs,
        &[
            ("q_d", q_d),
            ("rhs", rhs),
            ("a_minus", a_minus(r, eta_l, 2.0 * n_bar + 1.0)),
        ],
    )
}

/// A threshold mean photon number, infinite when `η_L = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub n_bar: f64,
    pub k: f64,
    /// `a₋` evaluated at the threshold (GBS threshold only).
    pub a_minus: Option<f64>,
}

impl Threshold {
    pub fn diverges(&self) -> bool {
        self.n_bar.is_infinite()
    }

    pub fn report(&self, criterion: &str, n_bar: f64) -> ClassicalityReport {
        let mut details = vec![("n_bar", n_bar), ("n_bar_star", self.n_bar), ("k_star", self.k)];
        if let Some(a) = self.a_minus {
            details.push(("a_minus_at_threshold", a));
        }
        ClassicalityReport::new(criterion, n_bar - self.n_bar, &details)
    }
}

fn check_eta(eta_l: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta_l) {
        return Err(Error::InvalidParameter(format!("eta_l = {eta_l} outside [0, 1]")));
    }
    Ok(())
}

/// `n̄* = η_L(1 − e^{−2r}) / (2(1 − η_L))`, above which ideal-detector GBS is simulable.
pub fn threshold_temperature_gbs(r: f64, eta_l: f64) -> Result<Threshold> {
    check_eta(eta_l)?;
    if eta_l == 1.0 {
        return Ok(Threshold {
            n_bar: f64::INFINITY,
            k: f64::INFINITY,
            a_minus: None,
        });
    }
    let n_bar = eta_l * (-(-2.0 * r).exp_m1()) / (2.0 * (1.0 - eta_l));
    let k = 2.0 * n_bar + 1.0;
    Ok(Threshold {
        n_bar,
        k,
        a_minus: Some(a_minus(r, eta_l, k)),
    })
}

/// `n̄* = η_L/(1 − η_L)`, above which every input state is simulable.
pub fn universal_threshold(eta_l: f64) -> Result<Threshold> {
    check_eta(eta_l)?;
    if eta_l == 1.0 {
        return Ok(Threshold {
            n_bar: f64::INFINITY,
            k: f64::INFINITY,
            a_minus: None,
        });
    }
    Ok(Threshold {
        n_bar: eta_l / (1.0 - eta_l),
        k: (1.0 + eta_l) / (1.0 - eta_l),
        a_minus: None,
    })
}

/// Bose–Einstein occupation at temperature `t_kelvin` for angular frequency `omega`.
/// Non-positive temperatures give `n̄ = 0`.
pub fn nbar_from_temperature(t_kelvin: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega = {omega} must be positive")));
    }
    if !(t_kelvin > 0.0) {
        return Ok(0.0);
    }
    Ok(1.0 / (HBAR * omega / (K_B * t_kelvin)).exp_m1())
}

/// Inverse of [`nbar_from_temperature`].
pub fn temperature_from_nbar(n_bar: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega = {omega} must be positive")));
    }
    if !(n_bar > 0.0) {
        return Ok(0.0);
    }
    Ok(HBAR * omega / (K_B * (1.0 / n_bar).ln_1p()))
}

/// `sech(½ Θ[ln((1 − 2q_D)/a₋)])`; equal to 1 when the log argument is ≤ 1 or `q_D ≥ ½`.
pub fn sech_bound(q_d: f64, a_minus: f64) -> f64 {
    let top = 1.0 - 2.0 * q_d;
    if top <= 0.0 {
        return 1.0;
    }
    let x = (top / a_minus).ln().max(0.0);
    1.0 / (0.5 * x).cosh()
}

fn bisect_epsilon(margin: impl Fn(f64) -> f64) -> f64 {
    if margin(0.0) >= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if margin(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Approximate-simulation condition `sech(…) ≥ (1 − ε²)^{1/m}` at finite temperature.
pub fn approx_condition(spec: &ExperimentSpec) -> Result<ClassicalityReport> {
    spec.validate()?;
    let a_m = spec.a_minus();
    let lhs = sech_bound(spec.detector.q_d(), a_m);
    let m = spec.modes as f64;
    let rhs = |eps: f64| (1.0 - eps * eps).powf(1.0 / m);
    let min_epsilon = bisect_epsilon(|eps| lhs - rhs(eps));
    Ok(ClassicalityReport::new(
        "approx_condition",
        lhs - rhs(spec.epsilon),
        &[
            ("lhs", lhs),
            ("rhs", rhs(spec.epsilon)),
            ("a_minus", a_m),
            ("epsilon", spec.epsilon),
            ("min_epsilon", min_epsilon),
            ("min_epsilon_closed_form", (1.0 - lhs.powf(m)).max(0.0).sqrt()),
        ],
    ))
}

/// Zero-temperature comparison bound `sech(…) > e^{−ε²/(4m)}` with `k = 1`.
pub fn quesada_zero_t_condition(spec: &ExperimentSpec) -> Result<ClassicalityReport> {
    spec.validate()?;
    let a_m = a_minus(spec.r, spec.eta_l, 1.0);
    let lhs = sech_bound(spec.detector.q_d(), a_m);
    let m = spec.modes as f64;
    let rhs = |eps: f64| (-eps * eps / (4.0 * m)).exp();
    let min_epsilon = bisect_epsilon(|eps| lhs - rhs(eps));
    let reachable = lhs >= rhs(1.0) - MARGIN_TOL;
    Ok(ClassicalityReport::new(
        "quesada_zero_t_condition",
        lhs - rhs(spec.epsilon),
        &[
            ("lhs", lhs),
            ("rhs", rhs(spec.epsilon)),
            ("a_minus", a_m),
            ("epsilon", spec.epsilon),
            ("min_epsilon", if reachable { min_epsilon } else { f64::INFINITY }),
            ("strict", 1.0),
        ],
    ))
}

/// Uniform orderings `(s̄, t̄) = ((1 − 2q_D)I, e^{−2r}I)` of the noisy GBS setting.
pub fn gbs_orderings(r: f64, d: &DetectorSpec, modes: usize) -> Result<(OrderingSpec, OrderingSpec)> {
    let s = OrderingSpec::measurement(vec![crate::detectors::detector_ordering_threshold(d); modes])?;
    let t = OrderingSpec::state(vec![(-2.0 * r).exp(); modes])?;
    Ok((s, t))
}
