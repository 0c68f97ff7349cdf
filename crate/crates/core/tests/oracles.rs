//! Monte Carlo and closed-form oracles for the pipeline pieces.

use dlcstc::channel::{draw_realization, draw_realization_with, DelayProfile, NoiseSpec};
use dlcstc::codegen::{build_generators, solve_amplifier_loop, solve_amplifiers, solve_amplifiers_crosstalk};
use dlcstc::corelin::{Cholesky, ComplexSeq};
use dlcstc::harness::{run_ber_points_paired, Detector, StopRule};
use dlcstc::modem::build_frame;
use dlcstc::receiver::{assemble_branches, equivalent_model};
use dlcstc::relaysim::simulate_relays;
use dlcstc::rng::{complex_gaussian, rng_for, rng_from_seed};
use dlcstc::{Scheme, SchemeConfig};
use num_complex::Complex64;

/// Destination output of a zero-data frame: relay and destination noise only.
fn noise_only_output(cfg: &SchemeConfig, seed: u64, trial: u64, noise: &NoiseSpec) -> ComplexSeq {
    let ch = draw_realization(seed, &cfg.delays);
    let frame = build_frame(ComplexSeq::zeros(cfg.n), cfg.p).unwrap();
    let amps = solve_amplifiers(cfg, &ch, noise).unwrap();
    let g = build_generators(cfg, &ch, &amps).unwrap();
    let mut rng = rng_for(seed, trial);
    let trace = simulate_relays(cfg, &frame, &ch, &amps, noise, &mut rng).unwrap();
    assemble_branches(&g, &trace, &frame, &ch, noise, cfg, &mut rng).unwrap()
}

#[test]
fn noise_covariance_matches_monte_carlo() {
    let noise = NoiseSpec::from_snr_db(10.0, 13.0);
    for scheme in [Scheme::FdCrosstalk, Scheme::FdLoop, Scheme::Hd, Scheme::SelfCoding] {
        let cfg = SchemeConfig::new(scheme);
        let seed = 31;
        let ch = draw_realization(seed, &cfg.delays);
        let amps = solve_amplifiers(&cfg, &ch, &noise).unwrap();
        let g = build_generators(&cfg, &ch, &amps).unwrap();
        let model = equivalent_model(&g, &ch, &noise, &cfg).unwrap();
        let w = model.window_len;

        let trials = 100_000u64;
        let mut diag = vec![0.0; w];
        let mut lag1 = vec![Complex64::new(0.0, 0.0); w - 1];
        for t in 0..trials {
            let y = noise_only_output(&cfg, seed, t, &noise);
            for i in 0..w {
                diag[i] += y[i].norm_sqr();
            }
            for i in 0..w - 1 {
                lag1[i] += y[i] * y[i + 1].conj();
            }
        }
        for i in 0..w {
            let emp = diag[i] / trials as f64;
            let want = model.noise_cov[(i, i)].re;
            assert!((emp - want).abs() <= 0.05 * want, "{scheme} diag {i}: {emp} vs {want}");
        }
        // Off-diagonal terms: absolute check against the diagonal scale.
        for i in 0..w - 1 {
            let emp = lag1[i] / trials as f64;
            let want = model.noise_cov[(i, i + 1)];
            let scale = model.noise_cov[(i, i)].re;
            assert!((emp - want).norm() <= 0.03 * scale, "{scheme} lag-1 {i}: {emp} vs {want}");
        }
    }
}

#[test]
fn whitened_noise_is_white() {
    let noise = NoiseSpec::from_snr_db(5.0, 8.0);
    let cfg = SchemeConfig::new(Scheme::FdCrosstalk);
    let seed = 77;
    let ch = draw_realization(seed, &cfg.delays);
    let amps = solve_amplifiers(&cfg, &ch, &noise).unwrap();
    let g = build_generators(&cfg, &ch, &amps).unwrap();
    let model = equivalent_model(&g, &ch, &noise, &cfg).unwrap();
    let chol = Cholesky::new(&model.noise_cov).unwrap();
    let w = model.window_len;

    // 10^5 samples in total across the window.
    let trials = 100_000 / w as u64 + 1;
    let mut diag = vec![0.0; w];
    for t in 0..trials {
        let mut y = noise_only_output(&cfg, seed, t, &noise).into_inner();
        chol.solve_lower_in_place(&mut y);
        for (d, v) in diag.iter_mut().zip(&y) {
            *d += v.norm_sqr();
        }
    }
    let pooled = diag.iter().sum::<f64>() / (trials as f64 * w as f64);
    assert!((pooled - 1.0).abs() < 0.05, "pooled whitened variance {pooled}");
    for (i, d) in diag.iter().enumerate() {
        let v = d / trials as f64;
        // Per-index estimates use ~3.6k samples each.
        assert!((v - 1.0).abs() < 0.1, "index {i}: {v}");
    }
}

#[test]
fn destination_energy_matches_prediction() {
    // E|y|^2 summed over the window against the model's trace terms.
    let noise = NoiseSpec::from_snr_db(15.0, 15.0);
    let cfg = SchemeConfig::new(Scheme::FdLoop);
    let trials = 10_000u64;
    let mut emp = 0.0;
    let mut pred = 0.0;
    for t in 0..trials {
        let mut rng = rng_for(5, t);
        let ch = draw_realization_with(&mut rng, &cfg.delays);
        let s: ComplexSeq = (0..cfg.n).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
        let frame = build_frame(s, cfg.p).unwrap();
        let amps = solve_amplifiers(&cfg, &ch, &noise).unwrap();
        let g = build_generators(&cfg, &ch, &amps).unwrap();
        let trace = simulate_relays(&cfg, &frame, &ch, &amps, &noise, &mut rng).unwrap();
        let y = assemble_branches(&g, &trace, &frame, &ch, &noise, &cfg, &mut rng).unwrap();
        emp += y.energy();
        let m = equivalent_model(&g, &ch, &noise, &cfg).unwrap();
        let h2: f64 = m.h_matrix.as_slice().iter().map(|z| z.norm_sqr()).sum();
        let tr: f64 = (0..m.window_len).map(|i| m.noise_cov[(i, i)].re).sum();
        pred += h2 + tr;
    }
    let ratio = emp / pred;
    assert!((ratio - 1.0).abs() < 0.02, "ratio {ratio}");
}

#[test]
fn crosstalk_gains_follow_the_two_equation_reduction() {
    let profile = DelayProfile::default();
    let cfg = SchemeConfig::new(Scheme::FdCrosstalk);
    let gamma = cfg.gamma();
    for seed in 0..2000 {
        let ch = draw_realization(seed, &profile);
        let sol = solve_amplifiers_crosstalk(&ch, &cfg).unwrap();
        let (a, b) = (sol.beta[0].powi(2), sol.beta[1].powi(2));
        let (g12, g21) = (ch.h12().norm_sqr(), ch.h21().norm_sqr());
        // Independent evaluation of both normalization equations.
        let r = a * b * g12 * g21;
        let s: f64 = (0..=gamma).map(|n| r.powi(n as i32)).sum();
        assert!((s * a * (1.0 + g21 * b) - 1.0).abs() < 1e-10, "seed {seed}");
        assert!((s * b * (1.0 + g12 * a) - 1.0).abs() < 1e-10, "seed {seed}");
        let d = g12 - g21;
        assert!((b - a / (1.0 + a * d)).abs() < 1e-10 * b.max(1e-300) + 1e-14, "seed {seed}");
    }
}

#[test]
fn loop_gain_depends_only_on_leakage_magnitude() {
    let mut rng = rng_from_seed(4);
    for _ in 0..500 {
        let h = complex_gaussian(&mut rng, 1.0);
        let rot = Complex64::from_polar(1.0, 2.1);
        for b in 2..5 {
            let x = solve_amplifier_loop(h, b).unwrap();
            let y = solve_amplifier_loop(h * rot, b).unwrap();
            assert!((x.beta - y.beta).abs() < 1e-12);
            // sum_{j<b} (|h| beta)^(2j) beta^2 = 1
            let u = x.beta * x.beta;
            let e: f64 = (0..b).map(|j| u * (u * h.norm_sqr()).powi(j as i32)).sum();
            assert!((e - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn genie_feedback_never_loses() {
    let stop = StopRule {
        min_errors: u64::MAX,
        max_frames: 10_000,
    };
    for snr in [6.0, 12.0, 18.0] {
        let cfg = SchemeConfig::new(Scheme::FdLoop);
        let pts = run_ber_points_paired(&cfg, snr, snr, &stop, 12, &[Detector::MmseDfe, Detector::GenieDfe]).unwrap();
        let (_, hi) = pts[0].confidence_interval(1.96);
        assert!(pts[1].ber <= hi, "snr {snr}: genie {} vs decision {}", pts[1].ber, pts[0].ber);
        assert!(pts[1].ber <= pts[0].ber * 1.05, "snr {snr}: genie {} vs decision {}", pts[1].ber, pts[0].ber);
    }
}

#[test]
fn ber_non_increasing_in_destination_snr() {
    let cfg = SchemeConfig::new(Scheme::FdCrosstalk);
    let stop = StopRule {
        min_errors: 200,
        max_frames: 200_000,
    };
    let pts = dlcstc::harness::sweep(&cfg, &[30.0], &[0.0, 6.0, 12.0, 18.0, 24.0], &stop, 3).unwrap();
    for w in pts.windows(2) {
        // The higher-SNR interval may not sit entirely above the lower-SNR one.
        let (_, hi) = w[0].confidence_interval(1.96);
        let (lo, _) = w[1].confidence_interval(1.96);
        assert!(lo <= hi, "{} dB -> {} dB: {} then {}", w[0].snr_d_db, w[1].snr_d_db, w[0].ber, w[1].ber);
    }
}
