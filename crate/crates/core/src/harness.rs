//! Seeded Monte Carlo drivers.
//!
//! Frame `f` of a point always uses the generator `rng_for(seed, f)`, and
//! frames are processed in fixed-size batches whose results are summed in
//! frame order, so a point's counts do not depend on the thread count.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{draw_realization_with, DelayProfile, NoiseSpec};
use crate::codegen::{build_generators, solve_amplifiers};
use crate::config::{Scheme, SchemeConfig};
use crate::error::{Error, Result};
use crate::modem::{bit_errors, build_frame, qpsk_demodulate, qpsk_modulate, random_bits, Constellation};
use crate::receiver::{assemble_branches, equivalent_model, ml_detect, mmse_dfe_detect, Feedback};
use crate::relaysim::{naive_cancellation_snr_linear, simulate_relays, Estimator};
use crate::rng::rng_for;

/// Frames evaluated between stop-rule checks.
pub const BATCH_FRAMES: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_errors: 200,
            max_frames: 2_000_000,
        }
    }
}

/// Detection rule applied at the destination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    MmseDfe,
    /// MMSE-DFE fed back with the true symbols.
    GenieDfe,
    /// Exhaustive search; only for `N <= 6`.
    Ml,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BerPoint {
    pub scheme: Scheme,
    pub snr_r_db: f64,
    pub snr_d_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub seed: u64,
    pub wall_time_s: f64,
    /// Sum over frames of the squared per-frame error count.
    pub error_sq_sum: u64,
    pub bits_per_frame: u64,
}

impl BerPoint {
    /// True when every field except the wall time matches.
    pub fn same_counts(&self, other: &BerPoint) -> bool {
        self.scheme == other.scheme
            && self.snr_r_db.to_bits() == other.snr_r_db.to_bits()
            && self.snr_d_db.to_bits() == other.snr_d_db.to_bits()
            && self.frames == other.frames
            && self.bit_errors == other.bit_errors
            && self.ber.to_bits() == other.ber.to_bits()
            && self.seed == other.seed
            && self.error_sq_sum == other.error_sq_sum
    }

    /// Normal-approximation interval on the BER, treating frames (not bits)
    /// as the independent units since errors cluster within a frame.
    pub fn confidence_interval(&self, z: f64) -> (f64, f64) {
        if self.frames == 0 {
            return (0.0, 1.0);
        }
        let f = self.frames as f64;
        let mean = self.bit_errors as f64 / f;
        let var = (self.error_sq_sum as f64 / f - mean * mean).max(0.0);
        let half = z * (var / f).sqrt();
        let bits = self.bits_per_frame as f64;
        (((mean - half) / bits).max(0.0), ((mean + half) / bits).min(1.0))
    }
}

/// Bit errors of one frame under each requested detector. All detectors see
/// the same channel, data and noise.
pub fn run_frame(cfg: &SchemeConfig, noise: &NoiseSpec, seed: u64, frame_index: u64, detectors: &[Detector]) -> Result<Vec<u64>> {
    let mut rng = rng_for(seed, frame_index);
    let ch = draw_realization_with(&mut rng, &cfg.delays);
    let bits = random_bits(&mut rng, 2 * cfg.n);
    let s = qpsk_modulate(&bits)?;
    let frame = build_frame(s.clone(), cfg.p)?;
    let amps = solve_amplifiers(cfg, &ch, noise)?;
    let g = build_generators(cfg, &ch, &amps)?;
    let trace = simulate_relays(cfg, &frame, &ch, &amps, noise, &mut rng)?;
    let y = assemble_branches(&g, &trace, &frame, &ch, noise, cfg, &mut rng)?;
    let model = equivalent_model(&g, &ch, noise, cfg)?;
    let q = Constellation::qpsk();
    detectors
        .iter()
        .map(|d| {
            let shat = match d {
                Detector::MmseDfe => mmse_dfe_detect(&y, &model, &q, &Feedback::Decision)?,
                Detector::GenieDfe => mmse_dfe_detect(&y, &model, &q, &Feedback::Genie(s.clone()))?,
                Detector::Ml => ml_detect(&y, &model, &q)?,
            };
            Ok(bit_errors(&qpsk_demodulate(&shat), &bits))
        })
        .collect()
}

/// Runs frames until the stop rule fires, once per detector on shared
/// frames. The stop rule watches the first detector.
pub fn run_ber_points_paired(
    cfg: &SchemeConfig,
    snr_r_db: f64,
    snr_d_db: f64,
    stop: &StopRule,
    seed: u64,
    detectors: &[Detector],
) -> Result<Vec<BerPoint>> {
    if stop.min_errors == 0 {
        return Err(Error::Precondition("min_errors must be at least 1".into()));
    }
    if detectors.is_empty() {
        return Err(Error::EmptyInput("detectors"));
    }
    cfg.validate()?;
    let started = Instant::now();
    let noise = NoiseSpec::from_snr_db(snr_r_db, snr_d_db);
    let nd = detectors.len();
    let mut errors = vec![0u64; nd];
    let mut sq = vec![0u64; nd];
    let mut frames = 0u64;
    while frames < stop.max_frames && errors[0] < stop.min_errors {
        let end = (frames + BATCH_FRAMES).min(stop.max_frames);
        let batch: Vec<Vec<u64>> = (frames..end)
            .into_par_iter()
            .map(|f| run_frame(cfg, &noise, seed, f, detectors))
            .collect::<Result<_>>()?;
        for per_frame in batch {
            for (d, e) in per_frame.into_iter().enumerate() {
                errors[d] += e;
                sq[d] += e * e;
            }
        }
        frames = end;
    }
    let wall = started.elapsed().as_secs_f64();
    let bits = 2 * cfg.n as u64;
    Ok((0..nd)
        .map(|d| BerPoint {
            scheme: cfg.scheme,
            snr_r_db,
            snr_d_db,
            frames,
            bit_errors: errors[d],
            ber: errors[d] as f64 / (bits * frames) as f64,
            seed,
            wall_time_s: wall,
            error_sq_sum: sq[d],
            bits_per_frame: bits,
        })
        .collect())
}

pub fn run_ber_point(cfg: &SchemeConfig, snr_r_db: f64, snr_d_db: f64, stop: &StopRule, seed: u64) -> Result<BerPoint> {
    Ok(run_ber_points_paired(cfg, snr_r_db, snr_d_db, stop, seed, &[Detector::MmseDfe])?.remove(0))
}

/// One point per `(snr_r, snr_d)` cell, `snr_r` outer. Every cell reuses
/// `seed`, so neighbouring cells see the same channels, data and
/// normalized noise.
pub fn sweep(cfg: &SchemeConfig, snr_r_grid: &[f64], snr_d_grid: &[f64], stop: &StopRule, seed: u64) -> Result<Vec<BerPoint>> {
    if snr_r_grid.is_empty() || snr_d_grid.is_empty() {
        return Err(Error::EmptyInput("snr grid"));
    }
    let cells: Vec<(f64, f64)> = snr_r_grid
        .iter()
        .flat_map(|&r| snr_d_grid.iter().map(move |&d| (r, d)))
        .collect();
    cells
        .iter()
        .map(|&(r, d)| run_ber_point(cfg, r, d, stop, seed))
        .collect()
}

/// `snr_r = snr_d = gamma` for each gamma.
pub fn sweep_diagonal(cfg: &SchemeConfig, gammas: &[f64], stop: &StopRule, seed: u64) -> Result<Vec<BerPoint>> {
    if gammas.is_empty() {
        return Err(Error::EmptyInput("snr grid"));
    }
    gammas.iter().map(|&g| run_ber_point(cfg, g, g, stop, seed)).collect()
}

/// Negative least-squares slope of `log10(ber)` against `snr_d_db / 10`.
pub fn estimate_diversity_order(points: &[BerPoint]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {}", points.len())));
    }
    for w in points.windows(2) {
        if !(w[1].snr_d_db > w[0].snr_d_db) {
            return Err(Error::Fit("SNR values must be strictly increasing".into()));
        }
    }
    if let Some(p) = points.iter().find(|p| !(p.ber > 0.0)) {
        return Err(Error::Fit(format!("zero BER at {} dB; run more frames", p.snr_d_db)));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.snr_d_db / 10.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.ber.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(-sxy / sxx)
}

/// Setup of the naive-cancellation transmit-SNR experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig2Config {
    pub phi: usize,
    pub src_delays: [usize; 2],
    pub sigma2_relay: f64,
    pub block_len: usize,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Fig2Config {
            phi: 1,
            src_delays: [0, 0],
            sigma2_relay: 1e-4,
            block_len: 20,
        }
    }
}

pub fn run_fig2(estimator: Estimator, trials: u64, seed: u64) -> Result<Vec<f64>> {
    run_fig2_with(&Fig2Config::default(), estimator, trials, seed)
}

/// Mean transmit SNR per index in dB; the mean is over linear ratios.
pub fn run_fig2_with(fc: &Fig2Config, estimator: Estimator, trials: u64, seed: u64) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let profile = DelayProfile {
        fixed_src: Some(fc.src_delays),
        ..DelayProfile::default()
    };
    let noise = NoiseSpec {
        sigma2_relay: fc.sigma2_relay,
        sigma2_dest: fc.sigma2_relay,
        symbol_energy: 1.0,
    };
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let ch = draw_realization_with(&mut rng_for(seed, t), &profile);
            naive_cancellation_snr_linear(&ch, fc.phi, &noise, estimator, fc.block_len)
        })
        .collect::<Result<_>>()?;
    let mut sum = vec![0.0; fc.block_len];
    for tr in &per_trial {
        for (s, v) in sum.iter_mut().zip(tr) {
            *s += v;
        }
    }
    Ok(sum.into_iter().map(|s| 10.0 * (s / trials as f64).log10()).collect())
}
