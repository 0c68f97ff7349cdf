//! Sample-by-sample relay processing.
//!
//! Each relay works on its own received stream in time order and only ever
//! looks at samples strictly older than the one it is about to transmit.
//! Relay transmissions are cut to the frame window `N + p`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, NoiseSpec};
use crate::codegen::{hd_code_rows, AmplifierSolution};
use crate::config::{Scheme, SchemeConfig};
use crate::corelin::{convolve_window, ComplexSeq, ZERO};
use crate::error::{Error, Result};
use crate::modem::Frame;
use crate::rng::complex_gaussian;

/// What the two relays sent during one frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelayTrace {
    /// `t_k(0..N+p)`.
    pub transmitted: [ComplexSeq; 2],
    /// Received samples after the relay's own loop term is removed.
    pub received_clean: [ComplexSeq; 2],
    /// The receiver noise each relay saw.
    pub relay_noise: [ComplexSeq; 2],
    /// Per-index transmit SNR in dB, when a trace computes it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_index_snr: Option<Vec<f64>>,
}

impl RelayTrace {
    fn silent(len: usize, relay_noise: [ComplexSeq; 2]) -> Self {
        RelayTrace {
            transmitted: [ComplexSeq::zeros(len), ComplexSeq::zeros(len)],
            received_clean: [ComplexSeq::zeros(len), ComplexSeq::zeros(len)],
            relay_noise,
            per_index_snr: None,
        }
    }
}

/// Two independent CN(0, sigma_R^2) streams of length `len`. Always draws
/// `2 len` samples so the generator stays aligned across SNR settings.
pub fn draw_relay_noise<R: Rng + ?Sized>(rng: &mut R, noise: &NoiseSpec, len: usize) -> [ComplexSeq; 2] {
    let mut stream = || -> ComplexSeq { (0..len).map(|_| complex_gaussian(rng, noise.sigma2_relay)).collect() };
    let w0 = stream();
    let w1 = stream();
    [w0, w1]
}

fn sample(x: &[Complex64], i: isize) -> Complex64 {
    if i < 0 {
        ZERO
    } else {
        x.get(i as usize).copied().unwrap_or(ZERO)
    }
}

fn check_noise(w: &[ComplexSeq; 2], len: usize) -> Result<()> {
    if w.iter().any(|s| s.len() < len) {
        return Err(Error::Dimension(format!("relay noise shorter than frame window {len}")));
    }
    Ok(())
}

/// Cross-talk recursion with given noise streams:
///
/// ```text
/// r_k(i) = h_sr[k] x(i - phi_k) + h_jk t_j(i) + w_k(i)
/// t_k(i) = beta_k r_k(i - phi)    (0 for i < phi)
/// ```
pub fn simulate_crosstalk_relays_with(
    frame: &Frame,
    ch: &ChannelRealization,
    amps: &AmplifierSolution,
    cfg: &SchemeConfig,
    w: &[ComplexSeq; 2],
) -> Result<RelayTrace> {
    let phi = cfg.phi;
    if phi < ch.src_delays[0].max(ch.src_delays[1]) + 1 {
        return Err(Error::Precondition(format!(
            "phi = {phi} must exceed source delays {:?}",
            ch.src_delays
        )));
    }
    if frame.p + 1 < 2 * phi {
        return Err(Error::Precondition(format!("p = {} below 2 phi - 1", frame.p)));
    }
    let len = frame.len();
    check_noise(w, len)?;
    let x = &frame.padded;
    let beta = amps.beta.map(|b| Complex64::new(b, 0.0));
    let mut t = [vec![ZERO; len], vec![ZERO; len]];
    let mut r = [vec![ZERO; len], vec![ZERO; len]];
    for i in 0..len {
        if i >= phi {
            for k in 0..2 {
                t[k][i] = beta[k] * r[k][i - phi];
            }
        }
        for k in 0..2 {
            let j = 1 - k;
            r[k][i] = ch.h_sr[k] * sample(x, i as isize - ch.src_delays[k] as isize)
                + ch.cross_into(k) * t[j][i]
                + w[k][i];
        }
    }
    let [t0, t1] = t;
    let [r0, r1] = r;
    Ok(RelayTrace {
        transmitted: [t0.into(), t1.into()],
        received_clean: [r0.into(), r1.into()],
        relay_noise: [w[0].window(len), w[1].window(len)],
        per_index_snr: None,
    })
}

pub fn simulate_crosstalk_relays<R: Rng + ?Sized>(
    frame: &Frame,
    ch: &ChannelRealization,
    amps: &AmplifierSolution,
    noise: &NoiseSpec,
    cfg: &SchemeConfig,
    rng: &mut R,
) -> Result<RelayTrace> {
    let w = draw_relay_noise(rng, noise, frame.len());
    simulate_crosstalk_relays_with(frame, ch, amps, cfg, &w)
}

/// One loop-coding relay with a given noise stream. Returns the transmitted
/// samples and the clean estimate stream `u(i) = r(i) - h t(i)`.
///
/// The relay forwards its raw received sample, loop term included, and
/// removes the residual that would otherwise make the response infinite:
///
/// ```text
/// t(i) = beta [ r(i - phi) - (h beta)^b u(i - (b+1) phi) ]
/// ```
pub fn simulate_loop_relay_with(
    frame: &Frame,
    k: usize,
    ch: &ChannelRealization,
    beta: f64,
    cfg: &SchemeConfig,
    w: &ComplexSeq,
) -> Result<(ComplexSeq, ComplexSeq)> {
    if cfg.b < 2 {
        return Err(Error::Precondition(format!("b = {} below 2", cfg.b)));
    }
    if k > 1 {
        return Err(Error::Invalid(format!("relay index {k}")));
    }
    let len = frame.len();
    if w.len() < len {
        return Err(Error::Dimension(format!("relay noise shorter than frame window {len}")));
    }
    let phi = cfg.phi as isize;
    let h = ch.h_loop[k];
    let beta_c = Complex64::new(beta, 0.0);
    let residual = (h * beta_c).powu(cfg.b as u32);
    let x = &frame.padded;
    let mut t = vec![ZERO; len];
    let mut r = vec![ZERO; len];
    let mut u = vec![ZERO; len];
    for i in 0..len {
        let ii = i as isize;
        if ii >= phi {
            t[i] = beta_c * (sample(&r, ii - phi) - residual * sample(&u, ii - (cfg.b as isize + 1) * phi));
        }
        r[i] = ch.h_sr[k] * sample(x, ii - ch.src_delays[k] as isize) + h * t[i] + w[i];
        u[i] = r[i] - h * t[i];
    }
    Ok((t.into(), u.into()))
}

pub fn simulate_loop_relay<R: Rng + ?Sized>(
    frame: &Frame,
    k: usize,
    ch: &ChannelRealization,
    amps: &AmplifierSolution,
    noise: &NoiseSpec,
    cfg: &SchemeConfig,
    rng: &mut R,
) -> Result<ComplexSeq> {
    let w: ComplexSeq = (0..frame.len()).map(|_| complex_gaussian(rng, noise.sigma2_relay)).collect();
    Ok(simulate_loop_relay_with(frame, k, ch, amps.beta[k], cfg, &w)?.0)
}

/// Half-duplex relays: receive the whole frame, then send
/// `[beta g_k * (h_sr[k] x + w_k)]_{N+p}` in a second phase.
fn hd_relays_with(frame: &Frame, ch: &ChannelRealization, amps: &AmplifierSolution, cfg: &SchemeConfig, w: &[ComplexSeq; 2]) -> Result<RelayTrace> {
    let len = frame.len();
    check_noise(w, len)?;
    let rows = hd_code_rows(cfg);
    let mut trace = RelayTrace::silent(len, [w[0].window(len), w[1].window(len)]);
    for k in 0..2 {
        let u: ComplexSeq = (0..len).map(|i| ch.h_sr[k] * frame.padded[i] + w[k][i]).collect();
        let g = rows[k].scaled(Complex64::new(amps.beta[k], 0.0));
        trace.transmitted[k] = convolve_window(&g, &u, len);
        trace.received_clean[k] = u;
    }
    Ok(trace)
}

/// Runs whichever relays `cfg.scheme` uses on given noise streams. Direct
/// transmission leaves both relays silent; self-coding uses relay 1 only.
pub fn simulate_relays_with(
    cfg: &SchemeConfig,
    frame: &Frame,
    ch: &ChannelRealization,
    amps: &AmplifierSolution,
    w: &[ComplexSeq; 2],
) -> Result<RelayTrace> {
    let len = frame.len();
    match cfg.scheme {
        Scheme::FdCrosstalk | Scheme::FdCrosstalkDl => simulate_crosstalk_relays_with(frame, ch, amps, cfg, w),
        Scheme::FdLoop | Scheme::FdLoopDl | Scheme::SelfCoding => {
            check_noise(w, len)?;
            let mut trace = RelayTrace::silent(len, [w[0].window(len), w[1].window(len)]);
            let active = if cfg.scheme == Scheme::SelfCoding { 1 } else { 2 };
            for k in 0..active {
                let (t, u) = simulate_loop_relay_with(frame, k, ch, amps.beta[k], cfg, &w[k])?;
                trace.transmitted[k] = t;
                trace.received_clean[k] = u;
            }
            Ok(trace)
        }
        Scheme::Hd => hd_relays_with(frame, ch, amps, cfg, w),
        Scheme::Direct => Ok(RelayTrace::silent(len, [w[0].window(len), w[1].window(len)])),
    }
}

pub fn simulate_relays<R: Rng + ?Sized>(
    cfg: &SchemeConfig,
    frame: &Frame,
    ch: &ChannelRealization,
    amps: &AmplifierSolution,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<RelayTrace> {
    let w = draw_relay_noise(rng, noise, frame.len());
    simulate_relays_with(cfg, frame, ch, amps, &w)
}

/// Symbol estimator used by the naive full-cancellation relays.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Zf,
    Mmse,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Zf => "zf",
            Estimator::Mmse => "mmse",
        })
    }
}

impl FromStr for Estimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zf" => Ok(Estimator::Zf),
            "mmse" => Ok(Estimator::Mmse),
            _ => Err(Error::Invalid(format!("unknown estimator '{s}'"))),
        }
    }
}

/// Reported SNR when a relay sees no noise at all.
pub const SNR_CEILING_DB: f64 = 200.0;

/// A sample written as a linear form in the data symbols and the relay
/// noise samples.
#[derive(Clone)]
struct Lin {
    x: Vec<Complex64>,
    w: Vec<Complex64>,
}

impl Lin {
    fn zero(nx: usize, nw: usize) -> Self {
        Lin {
            x: vec![ZERO; nx],
            w: vec![ZERO; nw],
        }
    }

    fn axpy(&mut self, a: Complex64, other: &Lin) {
        for (s, o) in self.x.iter_mut().zip(&other.x) {
            *s += a * o;
        }
        for (s, o) in self.w.iter_mut().zip(&other.w) {
            *s += a * o;
        }
    }

    fn scale(&mut self, a: Complex64) {
        self.x.iter_mut().chain(self.w.iter_mut()).for_each(|v| *v *= a);
    }
}

/// Naive full cancellation, per-index transmit SNR as linear power ratios.
///
/// Both relays estimate each symbol, re-encode their own and their
/// partner's transmission from that estimate, and subtract both loop and
/// cross-talk terms. Entry `n` is the SNR of `t_k(n + phi)`, averaged over
/// the two relays, with expectations taken exactly over the data and the
/// noise (every sample is tracked as a linear form in both).
pub fn naive_cancellation_snr_linear(
    ch: &ChannelRealization,
    phi: usize,
    noise: &NoiseSpec,
    estimator: Estimator,
    block_len: usize,
) -> Result<Vec<f64>> {
    if block_len < 2 {
        return Err(Error::Precondition(format!("block_len = {block_len} below 2")));
    }
    if phi < ch.src_delays[0].max(ch.src_delays[1]) + 1 {
        return Err(Error::Precondition(format!(
            "phi = {phi} must exceed source delays {:?}",
            ch.src_delays
        )));
    }
    let es = noise.symbol_energy;
    let s2 = noise.sigma2_relay;
    let total = phi + block_len;
    let nw = 2 * total;

    let mut est = [ZERO; 2];
    let mut beta = [ZERO; 2];
    for k in 0..2 {
        let h = ch.h_sr[k];
        let g = match estimator {
            Estimator::Zf => {
                if h == ZERO {
                    return Err(Error::ZeroGain(k));
                }
                h.inv()
            }
            Estimator::Mmse => h.conj() / (h.norm_sqr() + s2 / es),
        };
        let power = g.norm_sqr() * (h.norm_sqr() * es + s2);
        est[k] = g;
        beta[k] = Complex64::new(if power > 0.0 { 1.0 / power.sqrt() } else { 0.0 }, 0.0);
    }

    // xhat[k][m]: relay k's estimate of x(m).
    let mut xhat: [Vec<Lin>; 2] = [Vec::with_capacity(block_len), Vec::with_capacity(block_len)];
    let mut t: [Vec<Lin>; 2] = [Vec::with_capacity(total), Vec::with_capacity(total)];
    let in_block = |i: usize| i >= phi && i - phi < block_len;
    for i in 0..total {
        for k in 0..2 {
            let mut tk = Lin::zero(block_len, nw);
            if in_block(i) {
                tk.axpy(beta[k], &xhat[k][i - phi]);
            }
            t[k].push(tk);
        }
        for k in 0..2 {
            let j = 1 - k;
            let Some(m) = i.checked_sub(ch.src_delays[k]).filter(|&m| m < block_len) else {
                continue;
            };
            // Loop term is removed exactly; cross-talk is removed using this
            // relay's own estimate of what the partner sent.
            let mut z = Lin::zero(block_len, nw);
            z.x[m] += ch.h_sr[k];
            z.w[k * total + i] += Complex64::new(1.0, 0.0);
            let hjk = ch.cross_into(k);
            z.axpy(hjk, &t[j][i]);
            if in_block(i) {
                z.axpy(-hjk * beta[j], &xhat[k][i - phi]);
            }
            z.scale(est[k]);
            debug_assert_eq!(xhat[k].len(), m);
            xhat[k].push(z);
        }
    }

    let ceiling = 10f64.powf(SNR_CEILING_DB / 10.0);
    let snr = (0..block_len)
        .map(|n| {
            let i = n + phi;
            let per_relay = |k: usize| {
                let sig = es * t[k][i].x.iter().map(|c| c.norm_sqr()).sum::<f64>();
                let noi = s2 * t[k][i].w.iter().map(|c| c.norm_sqr()).sum::<f64>();
                if noi > 0.0 {
                    (sig / noi).min(ceiling)
                } else {
                    ceiling
                }
            };
            0.5 * (per_relay(0) + per_relay(1))
        })
        .collect();
    Ok(snr)
}

/// Per-index transmit SNR in dB; see [`naive_cancellation_snr_linear`].
pub fn simulate_naive_cancellation(
    ch: &ChannelRealization,
    phi: usize,
    noise: &NoiseSpec,
    estimator: Estimator,
    block_len: usize,
) -> Result<Vec<f64>> {
    Ok(naive_cancellation_snr_linear(ch, phi, noise, estimator, block_len)?
        .into_iter()
        .map(|v| 10.0 * v.log10())
        .collect())
}
