//! Single-mode Gaussian fidelity, its maximum over t-classical Gaussian states,
//! and the resulting TVD bound.

use nalgebra::{DMatrix, Matrix2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::GaussianState;

const CLAMP_TOL: f64 = 1e-9;
const FEASIBLE_TOL: f64 = 1e-12;
const PARAM_TOL: f64 = 1e-9;
const VALUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityResult {
    pub value: f64,
    pub delta: f64,
    pub lambda: f64,
    /// Whether the raw value exceeded 1 and was clamped.
    pub clamped: bool,
    pub optimizer: Option<OptimizerRecord>,
}

/// Best feasible point found by [`f_max`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerRecord {
    pub t: f64,
    /// Covariance of the optimal classical state, row-major 2×2.
    pub cov: [f64; 4],
    pub evaluations: usize,
}

fn cov2(state: &GaussianState) -> Result<Matrix2<f64>> {
    if state.modes() != 1 {
        return Err(Error::Shape(format!(
            "fidelity is implemented for single-mode states, got {} modes",
            state.modes()
        )));
    }
    let c = state.cov();
    Ok(Matrix2::new(c[(0, 0)], c[(0, 1)], c[(1, 0)], c[(1, 1)]))
}

fn raw_fidelity(a: &Matrix2<f64>, b: &Matrix2<f64>, delta_q: [f64; 2]) -> (f64, f64, f64) {
    let sum = a + b;
    let delta = sum.determinant() / 4.0;
    let lambda = ((a.determinant() - 1.0) * (b.determinant() - 1.0) / 4.0).max(0.0);
    let quad = match sum.try_inverse() {
        Some(inv) => {
            let d = nalgebra::Vector2::new(delta_q[0], delta_q[1]);
            d.dot(&(inv * d))
        }
        None => 0.0,
    };
    let value = (-0.5 * quad).exp() / ((delta + lambda).sqrt() - lambda.sqrt());
    (value, delta, lambda)
}

/// `F = exp(−½ δᵀ(σ_a + σ_b)⁻¹δ) / (√(Δ + Λ) − √Λ)` with `Δ = det(σ_a + σ_b)/4`,
/// `Λ = (det σ_a − 1)(det σ_b − 1)/4` and `δ` the quadrature-mean difference.
pub fn gaussian_fidelity(a: &GaussianState, b: &GaussianState) -> Result<FidelityResult> {
    let (ca, cb) = (cov2(a)?, cov2(b)?);
    let qa = a.quadrature_mean();
    let qb = b.quadrature_mean();
    let (value, delta, lambda) = raw_fidelity(&ca, &cb, [qa[0] - qb[0], qa[1] - qb[1]]);
    let clamped = value > 1.0;
    if value > 1.0 + CLAMP_TOL {
        return Err(Error::NumericalConsistency(format!("fidelity {value} exceeds 1")));
    }
    Ok(FidelityResult {
        value: value.min(1.0),
        delta,
        lambda,
        clamped,
        optimizer: None,
    })
}

fn diag_fidelity(a: (f64, f64), b: (f64, f64)) -> f64 {
    let delta = (a.0 + b.0) * (a.1 + b.1) / 4.0;
    let lambda = ((a.0 * a.1 - 1.0) * (b.0 * b.1 - 1.0) / 4.0).max(0.0);
    1.0 / ((delta + lambda).sqrt() - lambda.sqrt())
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, evals: &mut usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    *evals += 2;
    while hi - lo > PARAM_TOL * (1.0 + lo.abs().max(hi.abs())) {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        *evals += 1;
    }
    let (fl, fh) = (f(lo), f(hi));
    *evals += 2;
    [(x1, f1), (x2, f2), (lo, fl), (hi, fh)]
        .into_iter()
        .fold((lo, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

/// Best diagonal `t`-classical state for a fixed `t > 0`.
///
/// Coordinates `(u, s)` map to `b_small = u ∈ [t, B]`,
/// `b_large = max(t, 1/u)·e^s`, which covers `b± ≥ t, b₊b₋ ≥ 1` as a box.
fn best_at_t(a_small: f64, a_large: f64, t: f64, evals: &mut usize) -> (f64, (f64, f64)) {
    let cap = 4.0 * a_large.max(1.0 / t).max(1.0);
    let s_cap = cap.ln() + 1.0;
    let point = |u: f64, s: f64| (u, t.max(1.0 / u) * s.exp());
    let value = |u: f64, s: f64| diag_fidelity((a_small, a_large), point(u, s));

    const GRID: usize = 40;
    let (mut u, mut s, mut best) = (t, 0.0, f64::NEG_INFINITY);
    for i in 0..=GRID {
        for j in 0..=GRID {
            let uu = t + (cap - t) * i as f64 / GRID as f64;
            let ss = s_cap * j as f64 / GRID as f64;
            let v = value(uu, ss);
            if v > best {
                (u, s, best) = (uu, ss, v);
            }
        }
    }
    *evals += (GRID + 1) * (GRID + 1);

    let du = (cap - t) / GRID as f64;
    let ds = s_cap / GRID as f64;
    let (mut ulo, mut uhi) = ((u - du).max(t), (u + du).min(cap));
    let (mut slo, mut shi) = ((s - ds).max(0.0), (s + ds).min(s_cap));
    for _ in 0..200 {
        let before = best;
        let (nu, fu) = golden_max(|x| value(x, s), ulo, uhi, evals);
        if fu >= best {
            (u, best) = (nu, fu);
        }
        let (ns, fs) = golden_max(|y| value(u, y), slo, shi, evals);
        if fs >= best {
            (s, best) = (ns, fs);
        }
        if best - before <= VALUE_TOL * 1e-5 {
            break;
        }
        // Recentre the bracket on the current point.
        (ulo, uhi) = ((u - du).max(t), (u + du).min(cap));
        (slo, shi) = ((s - ds).max(0.0), (s + ds).min(s_cap));
    }
    (best, point(u, s))
}

/// Maximal fidelity between a zero-mean diagonal state `τ = diag(a₊, a₋)` and
/// zero-mean diagonal `t`-classical states with `t ∈ [1 − 2q_D, 1]`.
pub fn f_max(tau: &GaussianState, q_d: f64) -> Result<FidelityResult> {
    let c = cov2(tau)?;
    if c[(0, 1)].abs() > 1e-12 || tau.disp()[0].norm() > 1e-12 {
        return Err(Error::Shape(
            "f_max expects a zero-mean state with diagonal covariance".into(),
        ));
    }
    let (a_p, a_m) = (c[(0, 0)], c[(1, 1)]);
    let t_min = 1.0 - 2.0 * q_d;
    let a_small = a_p.min(a_m);
    let a_large = a_p.max(a_m);
    let as_cov = |b_small: f64, b_large: f64| {
        if a_p <= a_m {
            [b_small, 0.0, 0.0, b_large]
        } else {
            [b_large, 0.0, 0.0, b_small]
        }
    };

    if a_small >= t_min - FEASIBLE_TOL {
        let (_, delta, lambda) = raw_fidelity(&c, &c, [0.0, 0.0]);
        return Ok(FidelityResult {
            value: 1.0,
            delta,
            lambda,
            clamped: false,
            optimizer: Some(OptimizerRecord {
                t: t_min.max(a_small.min(1.0)),
                cov: [c[(0, 0)], 0.0, 0.0, c[(1, 1)]],
                evaluations: 0,
            }),
        });
    }

    let mut evals = 0;
    let t_hi = 1.0;
    let outer = |t: f64, evals: &mut usize| best_at_t(a_small, a_large, t, evals);
    let inner_evals = std::cell::Cell::new(0);
    let (t_star, _) = golden_max(
        |t| {
            let mut n = 0;
            let v = outer(t, &mut n).0;
            inner_evals.set(inner_evals.get() + n);
            v
        },
        t_min,
        t_hi,
        &mut evals,
    );
    evals += inner_evals.get();
    let mut best: Option<(f64, f64, (f64, f64))> = None;
    for t in [t_min, t_star, t_hi] {
        let (v, b) = outer(t, &mut evals);
        if best.is_none_or(|(bv, _, _)| v > bv) {
            best = Some((v, t, b));
        }
    }
    let (value, t, (b_small, b_large)) = best.expect("candidates evaluated");
    let cov = as_cov(b_small, b_large);
    let cb = Matrix2::new(cov[0], 0.0, 0.0, cov[3]);
    let (raw, delta, lambda) = raw_fidelity(&c, &cb, [0.0, 0.0]);
    debug_assert!((raw - value).abs() < 1e-12);
    if value > 1.0 + CLAMP_TOL {
        return Err(Error::NumericalConsistency(format!("fidelity {value} exceeds 1")));
    }
    Ok(FidelityResult {
        value: value.min(1.0),
        delta,
        lambda,
        clamped: value > 1.0,
        optimizer: Some(OptimizerRecord { t, cov, evaluations: evals }),
    })
}

/// Closed form of [`f_max`] for the diagonal family: `sech(½ ln(t_min/a_small))`.
pub fn f_max_closed_form(a_small: f64, q_d: f64) -> f64 {
    crate::criteria::sech_bound(q_d, a_small)
}

/// `ε = √(1 − F^m)`.
pub fn tvd_bound(f: f64, modes: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidParameter(format!("fidelity {f} outside [0, 1]")));
    }
    if modes == 0 {
        return Err(Error::InvalidSize(0));
    }
    Ok((1.0 - f.powi(modes as i32)).max(0.0).sqrt())
}

/// Noisy GBS single-mode input `diag(a₊, a₋)` after thermal loss.
pub fn noisy_squeezed_input(r: f64, eta_l: f64, k: f64) -> Result<GaussianState> {
    let cov = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        crate::criteria::a_plus(r, eta_l, k),
        crate::criteria::a_minus(r, eta_l, k),
    ]));
    GaussianState::new(cov, vec![num_complex::Complex64::new(0.0, 0.0)])
}
