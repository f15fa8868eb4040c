//! Simulability over (transmission, temperature), drawn as a character map.

use thermal_gbs::cli::{self, RunConfig, Sweep};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = RunConfig::default();
    cfg.set("r", 1.0)?;
    let eta = Sweep::parse("eta_l:0.05:0.95:19")?;
    let n_bar = Sweep::parse("n_bar:0:2:41")?;
    let rows = cli::cmd_phase_diagram(&cfg, &[eta.clone(), n_bar.clone()])?;

    // '#' both thresholds passed, '+' only the GBS condition holds, '.' neither
    println!("n_bar →   (rows: eta_l from {} to {})", eta.min, eta.max);
    for (i, e) in eta.values().iter().enumerate() {
        let line: String = rows[i * n_bar.steps..(i + 1) * n_bar.steps]
            .iter()
            .map(|row| {
                let ok = |name: &str| row.reports.iter().any(|r| r.criterion == name && r.is_simulable());
                match (ok("gbs_condition"), ok("universal_threshold")) {
                    (true, true) => '#',
                    (true, false) => '+',
                    _ => '.',
                }
            })
            .collect();
        println!("{e:>5.2} {line}");
    }
    Ok(())
}
