//! Hot loss makes every input P-classical: the output P function is a rescaled input Q function.

use nalgebra::DVector;
use thermal_gbs::channels;
use thermal_gbs::criteria;
use thermal_gbs::state::{self, GaussianState, OrderingSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eta: f64 = 0.6;
    let k_star = criteria::universal_threshold(eta)?.k;
    println!("eta_l = {eta}: universal k* = {k_star:.4}");

    for r in [0.2, 1.0, 2.5] {
        let rho = GaussianState::squeezed_vacuum(r, 1)?;
        print!("r = {r:<4} max ordering of output:");
        for frac in [0.0, 0.5, 0.9, 1.0] {
            let k = 1.0 + frac * (k_star - 1.0);
            let out = channels::apply_f(&rho, eta, k)?;
            print!("  k={k:.2}: {:.4}", state::max_classical_ordering(&out)[0]);
        }
        println!();
    }

    // at k*, P_out(β) = Q_in(β/√η)/η
    let rho = GaussianState::squeezed_vacuum(1.0, 1)?;
    let out = channels::apply_f(&rho, eta, k_star)?;
    let p = state::PqdGaussian::new(&out, &OrderingSpec::state(vec![1.0])?)?;
    let q = state::PqdGaussian::new(&rho, &OrderingSpec::state(vec![-1.0])?)?;
    println!("\n{:>12} {:>14} {:>14}", "beta", "P_out", "Q_in/eta");
    for x in [0.0, 0.25, 0.5, 1.0, 1.5] {
        let b = DVector::from_vec(vec![x, 0.5 * x]);
        println!(
            "{:>12} {:>14.10} {:>14.10}",
            format!("{x}+{}i", 0.5 * x),
            p.value_at(&b),
            q.value_at(&(&b / eta.sqrt())) / eta
        );
    }
    Ok(())
}
