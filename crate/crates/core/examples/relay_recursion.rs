//! Sample-level relay simulation against the generator convolution.

use dlcstc::channel::{draw_realization, NoiseSpec};
use dlcstc::codegen::{build_generators, solve_amplifiers};
use dlcstc::corelin::convolve_window;
use dlcstc::modem::{build_frame, qpsk_modulate, random_bits};
use dlcstc::relaysim::{draw_relay_noise, simulate_relays_with};
use dlcstc::rng::rng_from_seed;
use dlcstc::{Scheme, SchemeConfig};

fn main() -> dlcstc::Result<()> {
    let mut rng = rng_from_seed(2);
    let noise = NoiseSpec::from_snr_db(20.0, 20.0);
    for scheme in [Scheme::FdCrosstalk, Scheme::FdLoop, Scheme::Hd] {
        let cfg = SchemeConfig::new(scheme);
        let ch = draw_realization(9, &cfg.delays);
        let frame = build_frame(qpsk_modulate(&random_bits(&mut rng, 2 * cfg.n))?, cfg.p)?;
        let amps = solve_amplifiers(&cfg, &ch, &noise)?;
        let g = build_generators(&cfg, &ch, &amps)?;
        let w = draw_relay_noise(&mut rng, &noise, frame.len());
        let trace = simulate_relays_with(&cfg, &frame, &ch, &amps, &w)?;

        let len = frame.len();
        let mut worst = 0.0f64;
        for (b, branch) in g.branches.iter().enumerate() {
            let dlcstc::codegen::Branch::Relay(k) = *branch else { continue };
            let mut expect = convolve_window(&g.signal_rows[b], &frame.padded, len);
            for j in 0..2 {
                let part = convolve_window(&g.noise_rows[b][j], &w[j], len);
                for (e, v) in expect.iter_mut().zip(part.iter()) {
                    *e += v;
                }
            }
            worst = worst.max(expect.max_abs_diff(&trace.transmitted[k]));
            let power = trace.transmitted[k].energy() / len as f64;
            println!("{scheme:<13} relay {}: transmit power on this draw {power:.3}", k + 1);
        }
        println!("{scheme:<13} max |simulation - generator| = {worst:.1e}");
    }
    Ok(())
}
