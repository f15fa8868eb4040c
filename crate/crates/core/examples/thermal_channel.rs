//! A lossy interferometer with a hot environment, three ways.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thermal_gbs::channels::{self, UniformLossLon};
use thermal_gbs::interferometer;
use thermal_gbs::state::{self, GaussianState, OrderingSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = 3;
    let w = interferometer::haar_unitary(m, &mut ChaCha8Rng::seed_from_u64(1));
    let ch = UniformLossLon::from_n_bar(w.clone(), 0.6, 0.4)?;
    let input = GaussianState::squeezed_vacuum(0.9, m)?;

    let direct = channels::apply_channel(&ch.as_lon(), &input)?;
    let split = state::apply_symplectic(&channels::apply_f(&input, ch.eta_l(), ch.k())?, &w)?;
    let dilated = channels::dilation_oracle(&ch, &input)?;
    println!("eta_l = {}, n_bar = {}, k = {}", ch.eta_l(), ch.n_bar(), ch.k());
    println!("|direct - loss then W| = {:.2e}", (direct.cov() - split.cov()).amax());
    println!("|direct - dilation|    = {:.2e}", (direct.cov() - dilated.cov()).amax());

    // transition kernel between extremal orderings
    let t = OrderingSpec::state(state::max_classical_ordering(&input))?;
    let s = OrderingSpec::uniform(1.0, m, state::OrderingRole::Measurement)?;
    let tr = channels::transition_sigma(&ch.as_lon(), &s, &t)?;
    println!("transition covariance min eigenvalue: {:.4} (proper: {})", tr.min_eigenvalue, tr.is_proper());

    // the same channel as zero-temperature loss plus random displacements
    let vac = GaussianState::vacuum(m)?;
    let exact = channels::apply_channel(&ch.as_lon(), &vac)?;
    let stats = channels::stochastic_unravel(&ch, &vac, 7, 200_000)?;
    println!("unravelled vacuum covariance diagonal:");
    for i in 0..2 * m {
        println!("  {:.4} ± {:.4} (exact {:.4})", stats.cov[(i, i)], stats.cov_std_err[(i, i)], exact.cov()[(i, i)]);
    }
    Ok(())
}
