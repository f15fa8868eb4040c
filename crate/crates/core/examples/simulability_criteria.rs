//! Every criterion on one experiment, cold and warm.

use thermal_gbs::cli::{self, RunConfig};
use thermal_gbs::criteria;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let th = criteria::threshold_temperature_gbs(1.0, 0.5)?;
    let all = criteria::universal_threshold(0.5)?;
    println!("r = 1, eta_l = 0.5: GBS threshold n_bar = {:.6}, universal n_bar = {:.6}", th.n_bar, all.n_bar);
    println!("100 GHz mode at 4 K: n_bar = {:.4}", criteria::nbar_from_temperature(4.0, 2.0 * std::f64::consts::PI * 1e11)?);

    for n_bar in [0.0, 0.3, 0.6] {
        let mut cfg = RunConfig::default();
        cfg.set("n_bar", n_bar)?;
        cfg.set("p_d", 0.01)?;
        println!("\nn_bar = {n_bar}");
        for rep in cli::cmd_check(&cfg)? {
            println!("  {:<28} {:<14} margin {:+.5}", rep.criterion, rep.verdict.as_str(), rep.margin);
        }
    }
    Ok(())
}
