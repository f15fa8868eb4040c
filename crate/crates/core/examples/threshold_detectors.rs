//! Click-pattern distributions of noisy on/off detectors.

use thermal_gbs::channels::{self, UniformLossLon};
use thermal_gbs::detectors::{self, DetectorSpec};
use thermal_gbs::interferometer;
use thermal_gbs::state::GaussianState;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = DetectorSpec::new(0.8, 0.02)?;
    let off = detectors::povm_off(&d)?;
    println!("off element = {:.4} x thermal(n_bar = {:.4})", off.weight, off.n_bar());
    println!("lowest usable ordering s = {:.4}", detectors::detector_ordering_threshold(&d));

    let ch = UniformLossLon::from_n_bar(interferometer::beam_splitter(0.5, 0.3), 0.7, 0.1)?;
    let out = channels::apply_channel(&ch.as_lon(), &GaussianState::squeezed_vacuum(0.6, 2)?)?;
    let table = detectors::exact_outcome_probabilities(&out, &d)?;
    println!();
    table.write_csv(std::io::stdout())?;

    // the same numbers from photon-number amplitudes
    let inputs = vec![GaussianState::squeezed_vacuum(0.6, 1)?; 2];
    let lossy: Vec<GaussianState> = inputs
        .iter()
        .map(|s| channels::apply_f(s, ch.eta_l(), ch.k()))
        .collect::<Result<_, _>>()?;
    let fock = detectors::fock_outcome_probabilities(&lossy, ch.w(), &d)?;
    println!();
    println!("tvd(inclusion-exclusion, Fock) = {:.2e}", detectors::exact_tvd(&table, &fock)?);
    Ok(())
}
