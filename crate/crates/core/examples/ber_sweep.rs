//! BER against SNR_D at a fixed relay SNR for every scheme.

use dlcstc::harness::{sweep, StopRule};
use dlcstc::{Scheme, SchemeConfig};

fn main() -> dlcstc::Result<()> {
    let stop = StopRule {
        min_errors: 100,
        max_frames: 200_000,
    };
    let snr_d: Vec<f64> = (0..=6).map(|i| 5.0 * i as f64).collect();
    println!("{:<16}{}", "scheme", snr_d.iter().map(|s| format!("{s:>10}")).collect::<String>());
    for scheme in [Scheme::FdCrosstalk, Scheme::FdLoop, Scheme::Hd, Scheme::SelfCoding, Scheme::Direct] {
        let pts = sweep(&SchemeConfig::new(scheme), &[30.0], &snr_d, &stop, 1)?;
        let row: String = pts.iter().map(|p| format!("{:>10.2e}", p.ber)).collect();
        println!("{:<16}{row}", scheme.as_str());
    }
    Ok(())
}
