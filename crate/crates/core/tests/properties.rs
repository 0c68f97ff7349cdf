use dlcstc::channel::{ChannelRealization, NoiseSpec};
use dlcstc::codegen::{build_generators, sfr_analytic, sfr_bruteforce, sfr_margin, solve_amplifiers, SFR_REL_TOL};
use dlcstc::corelin::{convolve_window, ComplexSeq};
use dlcstc::harness::{run_ber_point, StopRule};
use dlcstc::modem::build_frame;
use dlcstc::relaysim::{simulate_relays_with, simulate_naive_cancellation, Estimator};
use dlcstc::{Scheme, SchemeConfig};
use num_complex::Complex64;
use proptest::prelude::*;

fn gain() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn channel() -> impl Strategy<Value = ChannelRealization> {
    (
        proptest::array::uniform9(gain()),
        proptest::array::uniform2(0usize..=1),
        proptest::array::uniform3(0usize..3),
    )
        .prop_map(|(g, src, dst)| ChannelRealization {
            h_sr: [g[0], g[1]],
            h_rd: [g[2], g[3]],
            h_loop: [g[4], g[5]],
            h_cross: [g[6], g[7]],
            h_sd: g[8],
            src_delays: src,
            dst_delays: [dst[0], dst[1]],
            dst_delay_direct: dst[2],
        })
}

fn scheme() -> impl Strategy<Value = Scheme> {
    proptest::sample::select(Scheme::ALL.to_vec())
}

fn seq(len: usize) -> impl Strategy<Value = ComplexSeq> {
    proptest::collection::vec(gain(), len).prop_map(ComplexSeq::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relay_output_is_generator_convolution(
        ch in channel(), sc in scheme(), data in seq(20), w0 in seq(26), w1 in seq(26),
    ) {
        let cfg = SchemeConfig::new(sc);
        let noise = NoiseSpec::from_snr_db(10.0, 10.0);
        prop_assume!(ch.h_sr.iter().all(|h| h.norm() > 1e-3));
        let amps = solve_amplifiers(&cfg, &ch, &noise).unwrap();
        let g = build_generators(&cfg, &ch, &amps).unwrap();
        let frame = build_frame(data, cfg.p).unwrap();
        let len = frame.len();
        let w = [w0.window(len), w1.window(len)];
        let trace = simulate_relays_with(&cfg, &frame, &ch, &amps, &w).unwrap();
        for (b, branch) in g.branches.iter().enumerate() {
            let dlcstc::codegen::Branch::Relay(k) = *branch else { continue };
            let mut want = convolve_window(&g.signal_rows[b], &frame.padded, len);
            for j in 0..2 {
                let part = convolve_window(&g.noise_rows[b][j], &w[j], len);
                for (x, y) in want.iter_mut().zip(part.iter()) {
                    *x += y;
                }
            }
            prop_assert!(want.max_abs_diff(&trace.transmitted[k]) < 1e-9);
        }
    }

    #[test]
    fn analytic_sfr_matches_bruteforce(ch in channel(), sc in proptest::sample::select(vec![Scheme::FdCrosstalk, Scheme::FdLoop, Scheme::Hd, Scheme::SelfCoding])) {
        let cfg = SchemeConfig::new(sc);
        let amps = solve_amplifiers(&cfg, &ch, &NoiseSpec::noiseless()).unwrap();
        prop_assume!(sfr_margin(&ch, &amps, sc).unwrap() > 1e-6);
        let g = build_generators(&cfg, &ch, &amps).unwrap();
        prop_assert_eq!(
            sfr_analytic(&ch, &amps, sc).unwrap(),
            sfr_bruteforce(&g, 2 * cfg.xi(), SFR_REL_TOL).unwrap()
        );
    }

    #[test]
    fn amplifiers_normalize(ch in channel(), sc in scheme()) {
        let cfg = SchemeConfig::new(sc);
        let a = solve_amplifiers(&cfg, &ch, &NoiseSpec::from_snr_db(20.0, 20.0)).unwrap();
        prop_assert!(a.residual < 1e-10);
        prop_assert!(a.beta.iter().all(|b| *b > 0.0 && b.is_finite()));
        if matches!(sc, Scheme::FdLoop | Scheme::FdLoopDl) {
            let g = build_generators(&cfg, &ch, &a).unwrap();
            for row in &g.code_rows[..2] {
                prop_assert!((row.energy() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn naive_trace_starts_at_relay_snr(ch in channel(), est in proptest::sample::select(vec![Estimator::Zf, Estimator::Mmse])) {
        prop_assume!(ch.h_sr.iter().all(|h| h.norm() > 1e-2));
        let noise = NoiseSpec { sigma2_relay: 1e-4, sigma2_dest: 1e-4, symbol_energy: 1.0 };
        let t = simulate_naive_cancellation(&ch, 2, &noise, est, 20).unwrap();
        prop_assert_eq!(t.len(), 20);
        prop_assert!(t.iter().all(|v| v.is_finite()));
        // First transmit index carries only the relay's own estimate noise.
        let want = 10.0 * ((ch.h_sr[0].norm_sqr() + ch.h_sr[1].norm_sqr()) / 2.0 / 1e-4).log10();
        prop_assert!((t[0] - want).abs() < 1e-6, "{} vs {}", t[0], want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn ber_point_accounting(sc in scheme(), snr in 0.0..12.0f64, seed in 0u64..1000) {
        let cfg = SchemeConfig::new(sc);
        let stop = StopRule { min_errors: 20, max_frames: 300 };
        let p = run_ber_point(&cfg, snr, snr, &stop, seed).unwrap();
        prop_assert_eq!(p.ber, p.bit_errors as f64 / (2 * cfg.n as u64 * p.frames) as f64);
        prop_assert!((0.0..=1.0).contains(&p.ber));
        prop_assert!(p.frames <= 300);
        prop_assert!(p.bit_errors >= 20 || p.frames == 300);
    }
}
