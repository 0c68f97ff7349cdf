//! Diversity slope from a diagonal sweep SNR_R = SNR_D = gamma.

use dlcstc::harness::{estimate_diversity_order, sweep_diagonal, StopRule};
use dlcstc::{Scheme, SchemeConfig};

fn main() -> dlcstc::Result<()> {
    let stop = StopRule {
        min_errors: 100,
        max_frames: 2_000_000,
    };
    let gammas = [18.0, 24.0, 30.0];
    for scheme in [Scheme::Direct, Scheme::Hd, Scheme::FdLoop, Scheme::FdCrosstalk] {
        let pts = sweep_diagonal(&SchemeConfig::new(scheme), &gammas, &stop, 1)?;
        let slope = estimate_diversity_order(&pts)?;
        let bers: Vec<String> = pts.iter().map(|p| format!("{:.2e}", p.ber)).collect();
        println!("{:<13} slope {slope:.2}  ber {}", scheme.as_str(), bers.join(" "));
    }
    Ok(())
}
