//! Closest classical state to a lossy squeezed input, and the sampling error it implies.

use thermal_gbs::criteria;
use thermal_gbs::fidelity;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (r, eta_l, q_d, m) = (1.0, 0.5, 0.02, 50);
    let n_star = criteria::threshold_temperature_gbs(r, eta_l)?.n_bar;
    println!("{:>8} {:>10} {:>12} {:>12} {:>10}", "n_bar", "a_minus", "f_max", "closed form", "tvd bound");
    for i in 0..=8 {
        let n_bar = n_star * i as f64 / 8.0;
        let k = 2.0 * n_bar + 1.0;
        let tau = fidelity::noisy_squeezed_input(r, eta_l, k)?;
        let f = fidelity::f_max(&tau, q_d)?;
        let a = criteria::a_minus(r, eta_l, k);
        println!(
            "{n_bar:>8.4} {a:>10.5} {:>12.8} {:>12.8} {:>10.5}",
            f.value,
            fidelity::f_max_closed_form(a, q_d),
            fidelity::tvd_bound(f.value, m)?
        );
    }
    Ok(())
}
