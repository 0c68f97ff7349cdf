//! Shift-full-rank: closed form against brute force.

use dlcstc::channel::{draw_realization, NoiseSpec};
use dlcstc::codegen::{build_generators, sfr_agreement, sfr_analytic, sfr_bruteforce, solve_amplifiers, SFR_REL_TOL};
use dlcstc::{Scheme, SchemeConfig};

fn main() -> dlcstc::Result<()> {
    for scheme in [Scheme::FdCrosstalk, Scheme::FdLoop] {
        let cfg = SchemeConfig::new(scheme);
        let r = sfr_agreement(&cfg, 500, 2 * cfg.xi(), 1)?;
        println!(
            "{scheme}: {} draws, analytic SFR {}, brute-force SFR {}, disagreements {}",
            r.draws, r.analytic_sfr, r.bruteforce_sfr, r.disagreements
        );
    }

    // Equal loop products break the loop code.
    let cfg = SchemeConfig::new(Scheme::FdLoop);
    let mut ch = draw_realization(5, &Default::default());
    ch.h_loop[1] = ch.h_loop[0];
    let amps = solve_amplifiers(&cfg, &ch, &NoiseSpec::noiseless())?;
    let g = build_generators(&cfg, &ch, &amps)?;
    println!(
        "h22 = h11: analytic {}, brute force {}",
        sfr_analytic(&ch, &amps, Scheme::FdLoop)?,
        sfr_bruteforce(&g, 2 * cfg.xi(), SFR_REL_TOL)?
    );
    Ok(())
}
