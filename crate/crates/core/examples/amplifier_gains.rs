//! Relay amplifier gains for each scheme.

use dlcstc::channel::{draw_realization, NoiseSpec};
use dlcstc::codegen::{solve_amplifier_loop, solve_amplifiers};
use dlcstc::{Scheme, SchemeConfig};

fn main() -> dlcstc::Result<()> {
    let ch = draw_realization(7, &Default::default());
    let noise = NoiseSpec::from_snr_db(30.0, 30.0);
    for scheme in [Scheme::FdCrosstalk, Scheme::FdLoop, Scheme::Hd] {
        let cfg = SchemeConfig::new(scheme);
        let a = solve_amplifiers(&cfg, &ch, &noise)?;
        println!(
            "{scheme:<13} beta = [{:.5}, {:.5}]  residual {:.1e}  constraint ok: {}",
            a.beta[0], a.beta[1], a.residual, a.constraint_flag
        );
    }

    // Loop gain against the constraint length b.
    let h = ch.h_loop[0];
    for b in 2..=5 {
        let l = solve_amplifier_loop(h, b)?;
        println!("|h11| = {:.3}, b = {b}: beta = {:.5}, beta |h11| = {:.3}", h.norm(), l.beta, l.beta * h.norm());
    }
    Ok(())
}
