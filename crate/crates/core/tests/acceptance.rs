//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thermal_gbs::channels::{self, UniformLossLon};
use thermal_gbs::criteria::{self, ExperimentSpec};
use thermal_gbs::detectors::{self, DetectorSpec};
use thermal_gbs::fidelity;
use thermal_gbs::fock;
use thermal_gbs::interferometer;
use thermal_gbs::linalg::CMatrix;
use thermal_gbs::sampler;
use thermal_gbs::state::{self, GaussianState, OrderingRole, OrderingSpec, PhasePoint};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rotated(k: f64, r: f64, phi: f64, alpha: Complex64) -> GaussianState {
    let (s, c) = phi.sin_cos();
    let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let d = DMatrix::from_diagonal(&DVector::from_vec(vec![(2.0 * r).exp(), (-2.0 * r).exp()]));
    GaussianState::new((&rot * d * rot.transpose()) * k, vec![alpha]).unwrap()
}

fn random_mode(rng: &mut ChaCha8Rng, r_max: f64, k_max: f64, a_max: f64) -> GaussianState {
    let k = rng.random_range(1.0..=k_max);
    let r = rng.random_range(-r_max..=r_max);
    let phi = rng.random_range(0.0..std::f64::consts::PI);
    let alpha = Complex64::new(rng.random_range(-a_max..=a_max), rng.random_range(-a_max..=a_max));
    rotated(k, r, phi, alpha)
}

fn gbs_threshold() -> Result<String, String> {
    let (r, eta) = (1.0, 0.5);
    let d = DetectorSpec::ideal();
    let margin = |n: f64| criteria::gbs_condition(r, eta, n, &d).margin;
    let (mut lo, mut hi) = (0.0, 10.0);
    ensure(margin(lo) < 0.0 && margin(hi) > 0.0, || "no sign change on [0, 10]".into())?;
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if margin(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let th = criteria::threshold_temperature_gbs(r, eta).map_err(|e| e.to_string())?;
    let expected = 0.5 * (1.0 - (-2.0f64).exp());
    ensure((hi - th.n_bar).abs() <= 1e-10, || format!("bisection {hi} vs closed form {}", th.n_bar))?;
    ensure((th.n_bar - expected).abs() <= 1e-12, || format!("threshold {} vs {expected}", th.n_bar))?;
    let a = criteria::a_minus(r, eta, 2.0 * th.n_bar + 1.0);
    ensure((a - 1.0).abs() <= 1e-12, || format!("a_minus {a} at threshold"))?;
    Ok(format!("n_bar* = {:.12}, |bisection - closed| = {:.1e}", th.n_bar, (hi - th.n_bar).abs()))
}

fn universal() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let m = rng.random_range(1..=8);
        let eta = rng.random_range(0.05..0.95);
        let w = interferometer::haar_unitary(m, &mut rng);
        let s = OrderingSpec::uniform(1.0, m, OrderingRole::Measurement).unwrap();
        let t = OrderingSpec::uniform(-1.0, m, OrderingRole::State).unwrap();
        let n_star = criteria::universal_threshold(eta).unwrap().n_bar;
        let at = UniformLossLon::from_n_bar(w.clone(), eta, n_star).unwrap().as_lon();
        let rep = criteria::general_condition(&at, &s, &t).map_err(|e| e.to_string())?;
        ensure(rep.margin >= -1e-10 && rep.is_simulable(), || format!("m={m} eta={eta}: margin {}", rep.margin))?;
        worst = worst.min(rep.margin);
        let below = UniformLossLon::from_n_bar(w, eta, n_star - 1e-3).unwrap().as_lon();
        let rep = criteria::general_condition(&below, &s, &t).map_err(|e| e.to_string())?;
        ensure(!rep.is_simulable(), || format!("m={m} eta={eta}: certified below threshold"))?;
    }
    Ok(format!("100 interferometers, worst margin at threshold {worst:.2e}"))
}

fn p_to_q() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    let inputs = [
        GaussianState::vacuum(1).unwrap(),
        GaussianState::squeezed_vacuum(0.3, 1).unwrap(),
        GaussianState::squeezed_vacuum(0.7, 1).unwrap(),
        GaussianState::squeezed_vacuum(1.0, 1).unwrap(),
    ];
    for eta in [0.2, 0.5, 0.8] {
        let k = (1.0 + eta) / (1.0 - eta);
        for rho in &inputs {
            let out = channels::apply_f(rho, eta, k).map_err(|e| e.to_string())?;
            let p = state::PqdGaussian::new(&out, &OrderingSpec::state(vec![1.0]).unwrap()).map_err(|e| e.to_string())?;
            let q = state::PqdGaussian::new(rho, &OrderingSpec::state(vec![-1.0]).unwrap()).map_err(|e| e.to_string())?;
            for i in 0..41 {
                for j in 0..41 {
                    let b = DVector::from_vec(vec![-2.0 + 0.1 * i as f64, -2.0 + 0.1 * j as f64]);
                    let lhs = p.value_at(&b);
                    let rhs = q.value_at(&(&b / eta.sqrt())) / eta;
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
    }
    // a two-mode input through the same identity, checked at the origin
    let sq2 = GaussianState::squeezed_vacuum(0.8, 2).unwrap();
    let eta: f64 = 0.5;
    let k = (1.0 + eta) / (1.0 - eta);
    let out = channels::apply_f(&sq2, eta, k).unwrap();
    let p = state::pqd_value(&out, &OrderingSpec::uniform(1.0, 2, OrderingRole::State).unwrap(), &PhasePoint::origin(2)).unwrap();
    let q = state::pqd_value(&sq2, &OrderingSpec::uniform(-1.0, 2, OrderingRole::State).unwrap(), &PhasePoint::origin(2)).unwrap();
    worst = worst.max((p - q / (eta * eta)).abs());
    ensure(worst <= 1e-9, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("41x41 grid, max |P - Q/eta^m| = {worst:.1e}"))
}

fn decomposition() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut equiv, mut comm): (f64, f64) = (0.0, 0.0);
    for _ in 0..200 {
        let m = rng.random_range(1..=4);
        let parts: Vec<GaussianState> = (0..m).map(|_| random_mode(&mut rng, 1.0, 4.0, 1.0)).collect();
        let mut s = GaussianState::product(&parts).unwrap();
        if rng.random_bool(0.5) {
            s = state::apply_symplectic(&s, &interferometer::haar_unitary(m, &mut rng)).unwrap();
        }
        let w = interferometer::haar_unitary(m, &mut rng);
        let eta = rng.random_range(0.0..1.0);
        let k = rng.random_range(1.0..5.0);
        let ch = UniformLossLon::new(w.clone(), eta, k).unwrap();
        let direct = channels::apply_channel(&ch.as_lon(), &s).unwrap();
        let split = state::apply_symplectic(&channels::apply_f(&s, eta, k).unwrap(), &w).unwrap();
        let dil = channels::dilation_oracle(&ch, &s).unwrap();
        for other in [&split, &dil] {
            equiv = equiv.max((direct.cov() - other.cov()).amax());
            for (a, b) in direct.disp().iter().zip(other.disp()) {
                equiv = equiv.max((a - b).norm());
            }
        }
        let swapped = channels::apply_f(&state::apply_symplectic(&s, &w).unwrap(), eta, k).unwrap();
        comm = comm.max((swapped.cov() - split.cov()).amax());
    }
    ensure(equiv <= 1e-10, || format!("equivalence deviation {equiv:.3e}"))?;
    ensure(comm <= 1e-12, || format!("commutation deviation {comm:.3e}"))?;
    Ok(format!("200 draws, equivalence {equiv:.1e}, commutation {comm:.1e}"))
}

fn sampler_exactness() -> Result<String, String> {
    let input = GaussianState::squeezed_vacuum(0.8, 2).unwrap();
    let ch = UniformLossLon::from_n_bar(interferometer::beam_splitter(0.5, 0.0), 0.4, 1.0)
        .unwrap()
        .as_lon();
    let d = DetectorSpec::ideal();
    let plan = sampler::build_plan(&input, &ch, &d, 5).map_err(|e| e.to_string())?;
    let exact = detectors::exact_outcome_probabilities(&channels::apply_channel(&ch, &input).unwrap(), &d).unwrap();
    let quad = sampler::quadrature_distribution(&plan, 0.2, 10.0).map_err(|e| e.to_string())?;
    let dev = quad
        .probs()
        .iter()
        .zip(exact.probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(dev <= 1e-6, || format!("quadrature deviation {dev:.3e}"))?;
    let cmp = sampler::compare(&plan, &exact, 1_000_000).map_err(|e| e.to_string())?;
    ensure(cmp.within_tolerance(), || format!("tvd {:.3e} > 3 x {:.3e}", cmp.tvd, cmp.stat_err))?;
    Ok(format!(
        "quadrature {dev:.1e}, Monte Carlo tvd {:.2e} (3 sigma = {:.2e})",
        cmp.tvd,
        3.0 * cmp.stat_err
    ))
}

fn fidelity_pipeline() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = random_mode(&mut rng, 1.2, 5.0, 0.5);
        let b = random_mode(&mut rng, 1.2, 5.0, 0.5);
        let closed = fidelity::gaussian_fidelity(&a, &b).map_err(|e| e.to_string())?.value;
        let fa = fock::auto_factor(&a, 1e-10, 600).map_err(|e| e.to_string())?;
        let fb = fock::auto_factor(&b, 1e-10, 600).map_err(|e| e.to_string())?;
        let dim = fa.nrows().max(fb.nrows());
        let fa = fock::single_mode_factor(&a, dim).unwrap();
        let fb = fock::single_mode_factor(&b, dim).unwrap();
        worst = worst.max((closed - fock::factor_fidelity(&fa, &fb)).abs());
    }
    ensure(worst <= 1e-6, || format!("Uhlmann deviation {worst:.3e}"))?;

    for _ in 0..200 {
        let (r, eta, k, q) = (
            rng.random_range(0.0..1.5),
            rng.random_range(0.0..1.0),
            rng.random_range(1.0..3.0),
            rng.random_range(0.0..0.45),
        );
        let a = criteria::a_minus(r, eta, k);
        if (a - (1.0 - 2.0 * q)).abs() < 1e-9 {
            continue;
        }
        let f = fidelity::f_max(&fidelity::noisy_squeezed_input(r, eta, k).unwrap(), q).unwrap().value;
        ensure((f == 1.0) == (a >= 1.0 - 2.0 * q), || format!("f_max {f} at a_minus {a}, q {q}"))?;
    }

    let mut points = 0;
    for i in 0..10 {
        for j in 0..10 {
            for l in 0..10 {
                let r = 0.2 + 0.13 * i as f64;
                let eta = 0.1 + 0.08 * j as f64;
                let q_max = eta * (1.0 - (-2.0 * r).exp()) / 2.0;
                let q = 0.09 * l as f64 * q_max;
                let d = DetectorSpec::new(1.0, q).unwrap();
                let n_b = (q_max - q) / (1.0 - eta);
                let m = 1 + (i + j + l) % 20;
                let gbs = criteria::gbs_condition(r, eta, n_b, &d);
                let f = fidelity::f_max(&fidelity::noisy_squeezed_input(r, eta, 2.0 * n_b + 1.0).unwrap(), q).unwrap();
                let tvd = fidelity::tvd_bound(f.value, m).unwrap();
                ensure(gbs.is_simulable() && tvd == 0.0, || {
                    format!("boundary r={r} eta={eta} q={q}: margin {} tvd {tvd}", gbs.margin)
                })?;
                let n_v = (n_b - 0.1).max(0.0);
                let gbs = criteria::gbs_condition(r, eta, n_v, &d);
                if gbs.margin < -1e-9 {
                    let f = fidelity::f_max(&fidelity::noisy_squeezed_input(r, eta, 2.0 * n_v + 1.0).unwrap(), q).unwrap();
                    let tvd = fidelity::tvd_bound(f.value, m).unwrap();
                    ensure(tvd > 0.0, || format!("violated r={r} eta={eta} q={q}: tvd {tvd}"))?;
                }
                points += 1;
            }
        }
    }
    Ok(format!("Uhlmann {worst:.1e} over 100 pairs, {points} boundary points"))
}

fn dominance() -> Result<String, String> {
    let (mut both, mut only_updated, mut counterexamples) = (0, 0, 0);
    for i in 0..10 {
        for j in 0..10 {
            for l in 0..5 {
                for m in [1usize, 10, 100, 1000] {
                    for e in 0..5 {
                        let spec = ExperimentSpec {
                            r: 0.1 + 0.2 * i as f64,
                            eta_l: 0.05 + 0.1 * j as f64,
                            n_bar: 0.0,
                            detector: DetectorSpec::new(1.0, 0.1 * l as f64).unwrap(),
                            modes: m,
                            epsilon: 0.2 * (e + 1) as f64,
                        };
                        let old = criteria::quesada_zero_t_condition(&spec).unwrap().is_simulable();
                        let new = criteria::approx_condition(&spec).unwrap().is_simulable();
                        match (old, new) {
                            (true, true) => both += 1,
                            (true, false) => counterexamples += 1,
                            (false, true) => only_updated += 1,
                            _ => {}
                        }
                    }
                }
            }
        }
    }
    ensure(counterexamples == 0, || format!("{counterexamples} points satisfy only the older bound"))?;
    ensure(only_updated > 0, || "no point separates the bounds".into())?;
    Ok(format!("10000 points: {both} both, {only_updated} updated only"))
}

fn unraveling() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let w: CMatrix = interferometer::haar_unitary(2, &mut rng);
    let vac = GaussianState::vacuum(2).unwrap();
    let ch = UniformLossLon::new(w.clone(), 0.5, 3.0).unwrap();
    let stats = channels::stochastic_unravel(&ch, &vac, 11, 100_000).map_err(|e| e.to_string())?;
    let mut worst_z: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let target = if i == j { 2.0 } else { 0.0 };
            let z = (stats.cov[(i, j)] - target).abs() / stats.cov_std_err[(i, j)];
            worst_z = worst_z.max(z);
        }
    }
    ensure(worst_z <= 3.0, || format!("covariance off by {worst_z:.2} standard errors"))?;
    let cold = UniformLossLon::new(w, 0.5, 1.0).unwrap();
    let stats = channels::stochastic_unravel(&cold, &vac, 11, 1000).unwrap();
    ensure(stats.displacement_cov.iter().all(|&x| x == 0.0), || "k = 1 branch has displacement variance".into())?;
    Ok(format!("max deviation {worst_z:.2} standard errors, k = 1 variance exactly 0"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Duration); 8] = [
        ("gbs threshold temperature", gbs_threshold, Duration::from_secs(1)),
        ("universal classicalization", universal, Duration::from_secs(10)),
        ("P-to-Q identity", p_to_q, Duration::from_secs(1)),
        ("channel decomposition and dilation", decomposition, Duration::from_secs(10)),
        ("sampler exactness", sampler_exactness, Duration::from_secs(120)),
        ("fidelity pipeline", fidelity_pipeline, Duration::from_secs(60)),
        ("bound dominance", dominance, Duration::from_secs(10)),
        ("stochastic unraveling", unraveling, Duration::from_secs(30)),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = match panic::catch_unwind(AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into())),
        };
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed <= *budget {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {elapsed:.2?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS [{}] {name}: {msg} ({elapsed:.2?})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{}] {name}: {msg} ({elapsed:.2?})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
