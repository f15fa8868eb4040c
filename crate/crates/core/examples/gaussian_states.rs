//! Covariances, orderings and phase-space densities of a few standard states.

use nalgebra::DVector;
use num_complex::Complex64;
use thermal_gbs::state::{self, GaussianState, OrderingSpec, PhasePoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let states = [
        ("vacuum", GaussianState::vacuum(1)?),
        ("thermal k=3", GaussianState::thermal(3.0, 1)?),
        ("squeezed r=0.5", GaussianState::squeezed_vacuum(0.5, 1)?),
        ("coherent 0.8+0.3i", GaussianState::coherent(&[Complex64::new(0.8, 0.3)])?),
    ];

    println!("{:<20} {:>10} {:>10} {:>8} {:>8}", "state", "var x", "var p", "t_max", "purity");
    for (name, s) in &states {
        let t = state::max_classical_ordering(s)[0];
        println!(
            "{name:<20} {:>10.4} {:>10.4} {:>8.4} {:>8.4}",
            s.cov()[(0, 0)],
            s.cov()[(1, 1)],
            t,
            s.purity()
        );
    }

    // Wigner, Husimi and (where it exists) P at the origin
    println!();
    for (name, s) in &states {
        let at = |t: f64| -> Option<f64> {
            let o = OrderingSpec::state(vec![t]).ok()?;
            state::pqd_value(s, &o, &PhasePoint::origin(1)).ok()
        };
        let fmt = |v: Option<f64>| v.map_or("singular".to_string(), |x| format!("{x:.5}"));
        println!("{name:<20} W(0) = {}  Q(0) = {}  P(0) = {}", fmt(at(0.0)), fmt(at(-1.0)), fmt(at(1.0)));
    }

    // a squeezed state seen through a 50:50 beam splitter becomes correlated
    let two = GaussianState::product(&[GaussianState::squeezed_vacuum(0.7, 1)?, GaussianState::vacuum(1)?])?;
    let mixed = state::apply_symplectic(&two, &thermal_gbs::interferometer::beam_splitter(0.5, 0.0))?;
    println!();
    println!("after beam splitter: product = {}, t_max = {:.4}", mixed.is_product(), state::max_classical_ordering(&mixed)[0]);
    println!("symplectic eigenvalues: {:?}", mixed.symplectic_eigenvalues());

    let pqd = state::PqdGaussian::new(&mixed, &OrderingSpec::uniform(0.0, 2, state::OrderingRole::State)?)?;
    println!("Wigner at origin: {:.6}", pqd.value_at(&DVector::zeros(4)));
    Ok(())
}
