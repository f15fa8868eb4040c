//! Classical sampling of click patterns from nonnegative phase-space
//! quasi-probabilities, plus exact sampling from the oracle table.
//!
//! A sample draws `α` from the input's t-ordered PQD, `β` from the channel
//! transition Gaussian centred at `αL`, and then each detector independently
//! with the point probability of its (−s)-ordered POVM element.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{self, LonChannel};
use crate::criteria::{self, ClassicalityReport};
use crate::detectors::{self, DetectorSpec, OutcomeTable, PointResponse};
use crate::error::{Error, Result};
use crate::linalg::GaussianDraw;
use crate::rng;
use crate::state::{self, GaussianState, OrderingRole, OrderingSpec};

/// Largest mode count for the quadrature evaluation of the sampler's distribution.
pub const MAX_QUADRATURE_MODES: usize = 2;

#[derive(Debug, Clone)]
pub struct SamplingPlan {
    modes: usize,
    /// `α ~ N(v_α, (σ − t̃)/4)`.
    input: GaussianDraw,
    /// Real image of `L` acting on `α`.
    mean_map: DMatrix<f64>,
    /// Square-root factor of `Σ/4`.
    transition: DMatrix<f64>,
    response: PointResponse,
    t: Vec<f64>,
    s: f64,
    report: ClassicalityReport,
    seed: u64,
}

impl SamplingPlan {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Feasibility report of the underlying classicality condition.
    pub fn report(&self) -> &ClassicalityReport {
        &self.report
    }

    pub fn margin(&self) -> f64 {
        self.report.margin
    }

    /// True when the transition stage is a point mass.
    pub fn has_delta_transition(&self) -> bool {
        self.transition.iter().all(|x| *x == 0.0)
    }

    /// Mean of `β` and a factor `F` with `Cov(β) = FFᵀ`, after integrating out `α`.
    fn beta_marginal(&self) -> (DVector<f64>, DMatrix<f64>) {
        let a = &self.mean_map * &self.input.factor;
        let n = 2 * self.modes;
        let mut f = DMatrix::zeros(n, a.ncols() + self.transition.ncols());
        f.view_mut((0, 0), (n, a.ncols())).copy_from(&a);
        f.view_mut((0, a.ncols()), (n, self.transition.ncols())).copy_from(&self.transition);
        (&self.mean_map * &self.input.mean, f)
    }

    fn draw_pattern<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let n = 2 * self.modes;
        let z1 = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let z2 = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let alpha = self.input.map(&z1);
        let beta = &self.mean_map * alpha + &self.transition * z2;
        let mut pattern = 0;
        for j in 0..self.modes {
            let norm = beta[2 * j] * beta[2 * j] + beta[2 * j + 1] * beta[2 * j + 1];
            let u: f64 = rng.random();
            if u >= self.response.off(norm) {
                pattern |= 1 << j;
            }
        }
        pattern
    }
}

/// Builds the three-stage sampler with the extremal orderings `t = t̄(state)`, `s = s̄(detector)`.
pub fn build_plan(state: &GaussianState, ch: &LonChannel, d: &DetectorSpec, seed: u64) -> Result<SamplingPlan> {
    let m = state.modes();
    if ch.modes() != m {
        return Err(Error::Shape(format!("state has {m} modes, channel has {}", ch.modes())));
    }
    let t_values = state::max_classical_ordering(state);
    let s_value = detectors::detector_ordering_threshold(d);
    let t = OrderingSpec::new(t_values.clone(), OrderingRole::State)?;
    let s = OrderingSpec::uniform(s_value, m, OrderingRole::Measurement)?;
    let report = criteria::general_condition(ch, &s, &t)?;
    if !report.is_simulable() {
        return Err(Error::PlanInfeasible { margin: report.margin });
    }
    let tr = channels::transition_sigma(ch, &s, &t)?;
    let input = GaussianDraw::new(state.mean_v(), &((state.cov() - t.lifted()) / 4.0))?;
    let transition = GaussianDraw::new(DVector::zeros(2 * m), &(&tr.sigma / 4.0))?.factor;
    Ok(SamplingPlan {
        modes: m,
        input,
        mean_map: tr.mean_map,
        transition,
        response: PointResponse::new(d, s_value)?,
        t: t_values,
        s: s_value,
        report,
        seed,
    })
}

/// `n_samples` click patterns (bit `j` = mode `j` clicked), deterministic in the plan's seed.
pub fn classical_sample(plan: &SamplingPlan, n_samples: usize) -> Vec<usize> {
    rng::chunks(n_samples)
        .into_par_iter()
        .map(|(c, len)| {
            let mut r = rng::chunk_rng(plan.seed, c);
            (0..len).map(|_| plan.draw_pattern(&mut r)).collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat()
}

/// I.i.d. draws from a probability table by inverse-CDF lookup.
pub fn sample_table(table: &OutcomeTable, n_samples: usize, seed: u64) -> Vec<usize> {
    let mut cdf = Vec::with_capacity(table.probs().len());
    let mut acc = 0.0;
    for p in table.probs() {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    let total = acc;
    rng::chunks(n_samples)
        .into_par_iter()
        .map(|(c, len)| {
            let mut r = rng::chunk_rng(seed, c);
            (0..len)
                .map(|_| {
                    let u: f64 = r.random::<f64>() * total;
                    cdf.partition_point(|&x| x <= u).min(cdf.len() - 1)
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat()
}

/// Samples from the exact click distribution of `state` measured by `d`.
pub fn exact_sample(state: &GaussianState, d: &DetectorSpec, n_samples: usize, seed: u64) -> Result<Vec<usize>> {
    let table = detectors::exact_outcome_probabilities(state, d)?;
    Ok(sample_table(&table, n_samples, seed))
}

pub fn pattern_counts(modes: usize, samples: &[usize]) -> Vec<u64> {
    let mut counts = vec![0u64; 1 << modes];
    for &s in samples {
        counts[s] += 1;
    }
    counts
}

/// `½ Σ √(p(1 − p)/N)`: standard error scale of the empirical TVD.
pub fn tvd_std_err(exact: &OutcomeTable, n_samples: usize) -> f64 {
    let n = n_samples as f64;
    0.5 * exact
        .probs()
        .iter()
        .map(|p| {
            let p = p.clamp(0.0, 1.0);
            (p * (1.0 - p) / n).sqrt()
        })
        .sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub tvd: f64,
    pub n_samples: usize,
    pub stat_err: f64,
}

impl CompareReport {
    /// TVD within three standard errors of zero.
    pub fn within_tolerance(&self) -> bool {
        self.tvd <= 3.0 * self.stat_err
    }
}

/// Monte-Carlo TVD between the classical sampler and the exact table.
pub fn compare(plan: &SamplingPlan, exact: &OutcomeTable, n_samples: usize) -> Result<CompareReport> {
    if exact.modes() != plan.modes {
        return Err(Error::Shape(format!(
            "table has {} modes, plan has {}",
            exact.modes(),
            plan.modes
        )));
    }
    let samples = classical_sample(plan, n_samples);
    let empirical = OutcomeTable::from_counts(plan.modes, &pattern_counts(plan.modes, &samples))?;
    Ok(CompareReport {
        tvd: detectors::exact_tvd(&empirical, exact)?,
        n_samples,
        stat_err: tvd_std_err(exact, n_samples),
    })
}

/// Pattern probabilities implied by the plan, by trapezoid quadrature of the
/// click probabilities against the marginal density of `β` in whitened coordinates.
pub fn quadrature_distribution(plan: &SamplingPlan, step: f64, half_width: f64) -> Result<OutcomeTable> {
    let m = plan.modes;
    if m > MAX_QUADRATURE_MODES {
        return Err(Error::OracleScale { modes: m, max: MAX_QUADRATURE_MODES });
    }
    let (mean, f) = plan.beta_marginal();
    let cov = &f * f.transpose();
    let draw = GaussianDraw::new(mean, &cov)?;
    // Keep only the support directions.
    let cols: Vec<DVector<f64>> = draw
        .factor
        .column_iter()
        .filter(|c| c.norm() > 0.0)
        .map(|c| c.into_owned())
        .collect();
    let dim = cols.len();
    let basis = if dim == 0 {
        DMatrix::zeros(2 * m, 0)
    } else {
        DMatrix::from_columns(&cols)
    };

    let nodes: Vec<f64> = {
        let n = (half_width / step).ceil() as i64;
        (-n..=n).map(|i| i as f64 * step).collect()
    };
    let weights: Vec<f64> = nodes
        .iter()
        .map(|z| step * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt())
        .collect();
    let npat = 1usize << m;
    let response = plan.response;

    let eval = |z: &[f64], w: f64, acc: &mut [f64]| {
        let beta = &draw.mean + &basis * DVector::from_column_slice(z);
        let offs: Vec<f64> = (0..m)
            .map(|j| response.off(beta[2 * j] * beta[2 * j] + beta[2 * j + 1] * beta[2 * j + 1]))
            .collect();
        for (pattern, slot) in acc.iter_mut().enumerate() {
            let p: f64 = offs
                .iter()
                .enumerate()
                .map(|(j, off)| if pattern >> j & 1 == 1 { 1.0 - off } else { *off })
                .product();
            *slot += w * p;
        }
    };

    if dim == 0 {
        let mut acc = vec![0.0; npat];
        eval(&[], 1.0, &mut acc);
        return OutcomeTable::new(m, acc);
    }

    let total_inner = nodes.len().pow(dim as u32 - 1);
    let probs = (0..nodes.len())
        .into_par_iter()
        .map(|i0| {
            let mut acc = vec![0.0; npat];
            let mut z = vec![0.0; dim];
            z[0] = nodes[i0];
            for flat in 0..total_inner {
                let mut w = weights[i0];
                let mut rest = flat;
                for d in 1..dim {
                    let idx = rest % nodes.len();
                    rest /= nodes.len();
                    z[d] = nodes[idx];
                    w *= weights[idx];
                }
                if w > 0.0 {
                    eval(&z, w, &mut acc);
                }
            }
            acc
        })
        .reduce(
            || vec![0.0; npat],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    OutcomeTable::new(m, probs)
}
