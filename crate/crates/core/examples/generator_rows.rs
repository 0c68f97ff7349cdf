//! Generator rows of the cross-talk and loop codes.

use dlcstc::channel::{draw_realization, NoiseSpec};
use dlcstc::codegen::{build_generators, solve_amplifiers};
use dlcstc::{Scheme, SchemeConfig};

fn main() -> dlcstc::Result<()> {
    let ch = draw_realization(11, &Default::default());
    for scheme in [Scheme::FdCrosstalk, Scheme::FdLoop, Scheme::Hd, Scheme::FdLoopDl] {
        let cfg = SchemeConfig::new(scheme);
        let amps = solve_amplifiers(&cfg, &ch, &NoiseSpec::from_snr_db(30.0, 30.0))?;
        let g = build_generators(&cfg, &ch, &amps)?;
        println!("{scheme}: {} branches {:?}, span {}", g.num_branches(), g.branches, g.span());
        for (b, row) in g.code_rows.iter().enumerate() {
            let taps: Vec<String> = row.taps().map(|(i, z)| format!("{i}:{:.3}", z.norm())).collect();
            println!("  code row {b}: |taps| {}", taps.join(" "));
        }
        println!("  psi = ({}, {}), xi = {}, gamma = {}", g.meta.psi1, g.meta.psi2, g.meta.xi, g.meta.gamma);
    }
    Ok(())
}
