//! Rayleigh channel realizations and SNR bookkeeping.

use dlcstc::channel::{draw_realization, noise_variance_from_snr, DelayProfile, NoiseSpec};

fn main() {
    let profile = DelayProfile::default();
    let ch = draw_realization(42, &profile);
    println!("h_sr   = {:.3?}", ch.h_sr);
    println!("h_rd   = {:.3?}", ch.h_rd);
    println!("h_loop = {:.3?}", ch.h_loop);
    println!("h12 = {:.3}, h21 = {:.3}", ch.h12(), ch.h21());
    println!("source delays {:?}, destination delays {:?}", ch.src_delays, ch.dst_delays);

    // Empirical E|h|^2 over many draws.
    let draws = 20_000;
    let mean: f64 = (0..draws)
        .map(|s| draw_realization(s, &profile).h_sr[0].norm_sqr())
        .sum::<f64>()
        / draws as f64;
    println!("mean |h_sr1|^2 over {draws} draws: {mean:.4}");

    let n = NoiseSpec::from_snr_db(30.0, 20.0);
    println!("SNR_R 30 dB -> sigma_R^2 = {:e}; SNR_D 20 dB -> sigma_D^2 = {:e}", n.sigma2_relay, n.sigma2_dest);
    println!("-40 dB noise power -> {:e}", noise_variance_from_snr(40.0, 1.0));
}
