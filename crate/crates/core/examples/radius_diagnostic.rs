//! Pruning-radius diagnostic along the tree. At each level the radius is
//! chosen so the transmitted path (a central metric) survives with 99%
//! probability; the same radius is then applied to a rival path whose
//! noise-free metric gives its non-centrality.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use smscma::complexity::{survival_probability, RadiusDiagnostic};
use smscma::decoders::{ore_energy_order, path_metrics};
use smscma::signal::{draw_channel, noise_variance, transmit_and_receive};
use smscma::{System, UserMessage};

const TARGET: f64 = 0.99;

/// Smallest radius at which a central metric of `order` terms survives with
/// probability `TARGET`, by bisection.
fn radius_for(sigma2: f64, order: u32) -> smscma::Result<f64> {
    let (mut lo, mut hi) = (0.0, sigma2 * (order as f64 + 20.0));
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if survival_probability(0.0, sigma2, mid, order)? < TARGET {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

fn main() -> smscma::Result<()> {
    let system = System::reference(2, 2);
    let n_r = system.rx_antennas();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sent = vec![UserMessage::new(0, 0); system.users()];
    let h = draw_channel(&mut rng, system.config());
    let clean = transmit_and_receive(&system, &sent, &h, f64::INFINITY, &mut rng)?;
    let order = ore_energy_order(&system, &h).order;

    // a rival differing from the truth in the first user
    let mut rival = sent.clone();
    rival[0] = UserMessage::new(1, 1);
    let alpha2 = path_metrics(&system, &clean, &h, &order, &rival)?;

    for snr in [0.0, 6.0, 12.0] {
        let sigma2 = noise_variance(snr);
        println!("SNR {snr} dB, noise variance {sigma2:.3}");
        for (l, &a2) in alpha2.iter().enumerate() {
            let level = l + 1;
            let gamma = radius_for(sigma2, (level * n_r) as u32)?;
            let truth = RadiusDiagnostic::evaluate(level, n_r, 0.0, sigma2, gamma)?;
            let other = RadiusDiagnostic::evaluate(level, n_r, a2, sigma2, gamma)?;
            println!(
                "  level {level}  radius {:>7.4}  truth survives {:.4}  rival (alpha2 {:>6.3}) survives {:.4}",
                gamma, truth.survival, a2, other.survival
            );
        }
    }
    Ok(())
}
