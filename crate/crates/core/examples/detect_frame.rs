//! One frame through the full pipeline with MMSE-DFE and ML detection.

use dlcstc::channel::{draw_realization_with, NoiseSpec};
use dlcstc::codegen::{build_generators, solve_amplifiers};
use dlcstc::modem::{bit_errors, build_frame, qpsk_demodulate, qpsk_modulate, random_bits, Constellation};
use dlcstc::receiver::{assemble_branches, equivalent_model, ml_detect, mmse_dfe_detect, Feedback};
use dlcstc::relaysim::simulate_relays;
use dlcstc::rng::rng_from_seed;
use dlcstc::{Scheme, SchemeConfig};

fn main() -> dlcstc::Result<()> {
    let mut cfg = SchemeConfig::new(Scheme::FdLoop);
    cfg.n = 4;
    cfg.delays.tau_max = 1;
    let noise = NoiseSpec::from_snr_db(15.0, 15.0);
    let mut rng = rng_from_seed(21);

    let ch = draw_realization_with(&mut rng, &cfg.delays);
    let bits = random_bits(&mut rng, 2 * cfg.n);
    let s = qpsk_modulate(&bits)?;
    let frame = build_frame(s.clone(), cfg.p)?;
    let amps = solve_amplifiers(&cfg, &ch, &noise)?;
    let g = build_generators(&cfg, &ch, &amps)?;
    let trace = simulate_relays(&cfg, &frame, &ch, &amps, &noise, &mut rng)?;
    let y = assemble_branches(&g, &trace, &frame, &ch, &noise, &cfg, &mut rng)?;
    let model = equivalent_model(&g, &ch, &noise, &cfg)?;
    println!(
        "window {} samples, H is {}x{}",
        model.window_len,
        model.h_matrix.rows(),
        model.h_matrix.cols()
    );

    let q = Constellation::qpsk();
    let dfe = mmse_dfe_detect(&y, &model, &q, &Feedback::Decision)?;
    let genie = mmse_dfe_detect(&y, &model, &q, &Feedback::Genie(s.clone()))?;
    let ml = ml_detect(&y, &model, &q)?;
    for (name, shat) in [("mmse-dfe", dfe), ("genie dfe", genie), ("ml", ml)] {
        println!("{name:>10}: {} bit errors", bit_errors(&bits, &qpsk_demodulate(&shat)));
    }
    Ok(())
}
