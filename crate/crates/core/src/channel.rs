//! Quasi-static Rayleigh channel draws and SNR bookkeeping.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{complex_gaussian, rng_from_seed};

/// How integer delays are drawn for each realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelayProfile {
    /// Source-to-relay delays are uniform on `0..=src_delay_max`.
    pub src_delay_max: usize,
    /// Relay-to-destination delays are uniform on `0..tau_max`.
    pub tau_max: usize,
    /// Pins the source-to-relay delays instead of drawing them.
    #[serde(default)]
    pub fixed_src: Option<[usize; 2]>,
}

impl Default for DelayProfile {
    fn default() -> Self {
        DelayProfile {
            src_delay_max: 1,
            tau_max: 3,
            fixed_src: None,
        }
    }
}

/// One draw of every link gain and delay in the two-relay network.
///
/// Relay indices are 0-based here: index 0 is relay 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    /// Source to relay k.
    pub h_sr: [Complex64; 2],
    /// Relay k to destination.
    pub h_rd: [Complex64; 2],
    /// Loop channel of relay k (transmitter k into receiver k).
    pub h_loop: [Complex64; 2],
    /// Cross-talk gains `[h12, h21]`: `h12` leaks relay 1's transmitter into
    /// relay 2's receiver, `h21` the reverse.
    pub h_cross: [Complex64; 2],
    /// Source to destination, used only by schemes with a direct branch.
    pub h_sd: Complex64,
    /// Source-to-relay delays, in symbol periods.
    pub src_delays: [usize; 2],
    /// Relay-to-destination delays, in symbol periods.
    pub dst_delays: [usize; 2],
    /// Arrival delay of the direct branch.
    pub dst_delay_direct: usize,
}

impl ChannelRealization {
    pub fn h12(&self) -> Complex64 {
        self.h_cross[0]
    }

    pub fn h21(&self) -> Complex64 {
        self.h_cross[1]
    }

    /// Gain from the other relay's transmitter into relay `k`'s receiver.
    pub fn cross_into(&self, k: usize) -> Complex64 {
        if k == 0 {
            self.h21()
        } else {
            self.h12()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.h_sr
            .iter()
            .chain(&self.h_rd)
            .chain(&self.h_loop)
            .chain(&self.h_cross)
            .chain(std::iter::once(&self.h_sd))
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// A realization with unit gains everywhere, no cross-talk or loop
    /// leakage, and zero delays. Handy as a starting point in tests.
    pub fn flat() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        ChannelRealization {
            h_sr: [one; 2],
            h_rd: [one; 2],
            h_loop: [zero; 2],
            h_cross: [zero; 2],
            h_sd: one,
            src_delays: [0; 2],
            dst_delays: [0; 2],
            dst_delay_direct: 0,
        }
    }
}

/// Noise levels at the relays and the destination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma2_relay: f64,
    pub sigma2_dest: f64,
    pub symbol_energy: f64,
}

impl NoiseSpec {
    pub fn from_snr_db(snr_r_db: f64, snr_d_db: f64) -> Self {
        NoiseSpec {
            sigma2_relay: noise_variance_from_snr(snr_r_db, 1.0),
            sigma2_dest: noise_variance_from_snr(snr_d_db, 1.0),
            symbol_energy: 1.0,
        }
    }

    pub fn noiseless() -> Self {
        NoiseSpec {
            sigma2_relay: 0.0,
            sigma2_dest: 0.0,
            symbol_energy: 1.0,
        }
    }
}

/// `E_s / 10^(snr/10)`.
pub fn noise_variance_from_snr(snr_db: f64, symbol_energy: f64) -> f64 {
    symbol_energy / 10f64.powf(snr_db / 10.0)
}

/// Draws every gain i.i.d. CN(0, 1) and the delays per `profile`.
pub fn draw_realization_with<R: Rng + ?Sized>(
    rng: &mut R,
    profile: &DelayProfile,
) -> ChannelRealization {
    let pair = |rng: &mut R| [complex_gaussian(rng, 1.0), complex_gaussian(rng, 1.0)];
    let h_sr = pair(rng);
    let h_rd = pair(rng);
    let h_loop = pair(rng);
    let h_cross = pair(rng);
    let h_sd = complex_gaussian(rng, 1.0);
    let drawn_src = [
        rng.random_range(0..=profile.src_delay_max),
        rng.random_range(0..=profile.src_delay_max),
    ];
    let tau_max = profile.tau_max.max(1);
    let dst_delays = [rng.random_range(0..tau_max), rng.random_range(0..tau_max)];
    let dst_delay_direct = rng.random_range(0..tau_max);
    ChannelRealization {
        h_sr,
        h_rd,
        h_loop,
        h_cross,
        h_sd,
        src_delays: profile.fixed_src.unwrap_or(drawn_src),
        dst_delays,
        dst_delay_direct,
    }
}

pub fn draw_realization(seed: u64, profile: &DelayProfile) -> ChannelRealization {
    draw_realization_with(&mut rng_from_seed(seed), profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_seed;

    #[test]
    fn same_seed_same_draw() {
        let p = DelayProfile::default();
        assert_eq!(draw_realization(42, &p), draw_realization(42, &p));
        assert_ne!(draw_realization(42, &p), draw_realization(43, &p));
    }

    #[test]
    fn unit_mean_power() {
        let p = DelayProfile::default();
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|i| draw_realization(derive_seed(9, i), &p).h_sr[0].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((0.98..=1.02).contains(&mean), "mean {mean}");
    }

    #[test]
    fn gain_power_is_exponential() {
        // Kolmogorov-Smirnov against Exp(1) at the 1% level.
        let p = DelayProfile::default();
        let n = 100_000usize;
        let mut x: Vec<f64> = (0..n as u64)
            .map(|i| draw_realization(derive_seed(17, i), &p).h_rd[1].norm_sqr())
            .collect();
        x.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let nf = n as f64;
        let d = x
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let cdf = 1.0 - (-v).exp();
                (cdf - i as f64 / nf).abs().max(((i + 1) as f64 / nf - cdf).abs())
            })
            .fold(0.0, f64::max);
        let critical = 1.628 / nf.sqrt();
        assert!(d < critical, "KS {d} >= {critical}");
    }

    #[test]
    fn delays_within_profile() {
        let p = DelayProfile::default();
        let mut seen = [false; 2];
        for i in 0..2000 {
            let ch = draw_realization(derive_seed(1, i), &p);
            for &d in &ch.src_delays {
                assert!(d <= 1);
                seen[d] = true;
            }
            assert!(ch.dst_delays.iter().all(|&t| t < 3));
            assert!(ch.dst_delay_direct < 3);
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn fixed_source_delays() {
        let p = DelayProfile {
            fixed_src: Some([0, 1]),
            ..DelayProfile::default()
        };
        for i in 0..50 {
            assert_eq!(draw_realization(i, &p).src_delays, [0, 1]);
        }
    }

    #[test]
    fn snr_conversion() {
        assert_eq!(noise_variance_from_snr(0.0, 1.0), 1.0);
        assert!((noise_variance_from_snr(30.0, 1.0) - 1e-3).abs() < 1e-18);
        // A noise power of -40 dB relative to unit symbol energy.
        assert!((noise_variance_from_snr(40.0, 1.0) - 1e-4).abs() < 1e-18);
    }
}
