//! Transmit SNR when both relays try to cancel everything themselves.

use dlcstc::channel::{draw_realization, DelayProfile, NoiseSpec};
use dlcstc::harness::run_fig2;
use dlcstc::relaysim::{simulate_naive_cancellation, Estimator};

fn main() -> dlcstc::Result<()> {
    let profile = DelayProfile {
        fixed_src: Some([0, 0]),
        ..Default::default()
    };
    let noise = NoiseSpec {
        sigma2_relay: 1e-4,
        sigma2_dest: 1e-4,
        symbol_energy: 1.0,
    };
    let ch = draw_realization(4, &profile);
    let one = simulate_naive_cancellation(&ch, 1, &noise, Estimator::Zf, 20)?;
    println!("one draw, zf: {:?}", one.iter().map(|v| v.round()).collect::<Vec<_>>());

    for est in [Estimator::Zf, Estimator::Mmse] {
        let trace = run_fig2(est, 10_000, 1)?;
        println!("{est:>4} average over 10^4 draws (dB):");
        for (i, v) in trace.iter().enumerate() {
            println!("  {:>2} {v:7.2}", i + 1);
        }
    }
    Ok(())
}
