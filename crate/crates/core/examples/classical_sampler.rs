//! Phase-space sampling of a warm, lossy experiment against its exact distribution.

use thermal_gbs::channels::{self, UniformLossLon};
use thermal_gbs::detectors::{self, DetectorSpec};
use thermal_gbs::interferometer;
use thermal_gbs::sampler;
use thermal_gbs::state::GaussianState;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let input = GaussianState::squeezed_vacuum(0.8, 2)?;
    let ch = UniformLossLon::from_n_bar(interferometer::beam_splitter(0.5, 0.0), 0.4, 1.0)?.as_lon();
    let d = DetectorSpec::ideal();

    let plan = sampler::build_plan(&input, &ch, &d, 42)?;
    println!("plan margin {:.4}, t = {:?}, s = {}", plan.margin(), plan.t(), plan.s());

    let exact = detectors::exact_outcome_probabilities(&channels::apply_channel(&ch, &input)?, &d)?;
    let quad = sampler::quadrature_distribution(&plan, 0.2, 10.0)?;
    let n = 500_000;
    let counts = sampler::pattern_counts(2, &sampler::classical_sample(&plan, n));
    println!("\npattern      exact  quadrature     sampled");
    for p in 0..4 {
        println!(
            "{:>7} {:>10.6} {:>11.6} {:>11.6}",
            detectors::pattern_string(p, 2),
            exact.get(p),
            quad.get(p),
            counts[p] as f64 / n as f64
        );
    }
    let cmp = sampler::compare(&plan, &exact, n)?;
    println!("\ntvd {:.2e}, 3 x standard error {:.2e}", cmp.tvd, 3.0 * cmp.stat_err);

    // without thermal noise the same experiment has no plan
    let cold = UniformLossLon::from_n_bar(interferometer::beam_splitter(0.5, 0.0), 0.4, 0.0)?.as_lon();
    match sampler::build_plan(&input, &cold, &d, 42) {
        Ok(_) => println!("cold experiment: plan found"),
        Err(e) => println!("cold experiment: {e}"),
    }
    Ok(())
}
