//! Tap sequences for every scheme.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{AmplifierSolution, Branch, GeneratorMatrix, GeneratorMeta};
use crate::channel::ChannelRealization;
use crate::config::{Scheme, SchemeConfig};
use crate::corelin::{ComplexSeq, ONE, ZERO};
use crate::error::{Error, Result};

/// Baseline generators that do not come from the full-duplex recursions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Hd,
    Direct,
    SelfCoding,
    DirectLinkRow,
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `[ones[0], 0_{phi-1}, ones[1], 0_{phi-1}, ...]`.
fn spaced(taps: &[Complex64], phi: usize) -> ComplexSeq {
    let mut row = vec![ZERO; (taps.len() - 1) * phi + 1];
    for (j, &t) in taps.iter().enumerate() {
        row[j * phi] = t;
    }
    row.into()
}

fn psi_pair(ch: &ChannelRealization, phi: usize) -> (usize, usize) {
    let [p1, p2] = ch.src_delays;
    ((phi + p2).saturating_sub(p1 + 1), (phi + p1).saturating_sub(p2 + 1))
}

fn meta(scheme: Scheme, ch: &ChannelRealization, cfg: &SchemeConfig, gamma: usize, eta: Complex64) -> GeneratorMeta {
    let (psi1, psi2) = psi_pair(ch, cfg.phi);
    GeneratorMeta {
        scheme,
        psi1,
        psi2,
        xi: cfg.xi(),
        gamma,
        eta,
    }
}

fn check_relay_delays(ch: &ChannelRealization, cfg: &SchemeConfig) -> Result<()> {
    let m = ch.src_delays[0].max(ch.src_delays[1]);
    if cfg.phi < m + 1 {
        return Err(Error::Precondition(format!(
            "phi = {} must exceed source delays {:?}",
            cfg.phi, ch.src_delays
        )));
    }
    Ok(())
}

/// Cross-talk coded generator.
///
/// Row 1 carries `eta^n beta1 h_sr1` at offset `(2n+1) phi + phi1` and
/// `eta^n beta1 h21 beta2 h_sr2` at `(2n+2) phi + phi2`, for
/// `n = 0..=Gamma`; row 2 mirrors it. The noise rows follow the same pattern
/// with unit gains in place of `h_sr` and no source delay.
pub fn build_generators_crosstalk(
    ch: &ChannelRealization,
    amps: &AmplifierSolution,
    cfg: &SchemeConfig,
) -> Result<GeneratorMatrix> {
    check_relay_delays(ch, cfg)?;
    if cfg.p + 1 < 2 * cfg.phi {
        return Err(Error::Precondition(format!(
            "p = {} below 2 phi - 1 = {}",
            cfg.p,
            2 * cfg.phi - 1
        )));
    }
    let phi = cfg.phi;
    let gamma = cfg.gamma();
    let [b1, b2] = amps.beta.map(real);
    let [d1, d2] = ch.src_delays;
    let (h12, h21) = (ch.h12(), ch.h21());
    let eta = b1 * b2 * h12 * h21;

    // (own source gain, cross source gain, own delay, cross delay, cross link)
    let a = [
        (b1 * ch.h_sr[0], b1 * h21 * b2 * ch.h_sr[1], d1, d2, b1 * h21 * b2),
        (b2 * ch.h_sr[1], b2 * h12 * b1 * ch.h_sr[0], d2, d1, b2 * h12 * b1),
    ];
    let span = (2 * gamma + 3) * phi + d1.max(d2);
    let noise_span = (2 * gamma + 2) * phi + 1;

    let mut signal_rows = Vec::with_capacity(2);
    let mut noise_rows = Vec::with_capacity(2);
    let mut code_rows = Vec::with_capacity(2);
    let (psi1, psi2) = psi_pair(ch, phi);
    for (k, &(own, cross, d_own, d_cross, link)) in a.iter().enumerate() {
        let mut sig = vec![ZERO; span];
        let mut own_noise = vec![ZERO; noise_span];
        let mut other_noise = vec![ZERO; noise_span];
        let psi = if k == 0 { psi1 } else { psi2 };
        let period = 2 * phi;
        let mut code = vec![ZERO; (gamma + 1) * period];
        let beta_k = if k == 0 { b1 } else { b2 };
        let mut pow = ONE;
        for n in 0..=gamma {
            sig[(2 * n + 1) * phi + d_own] += pow * own;
            sig[(2 * n + 2) * phi + d_cross] += pow * cross;
            own_noise[(2 * n + 1) * phi] += pow * beta_k;
            other_noise[(2 * n + 2) * phi] += pow * link;
            code[n * period] = pow * own;
            code[n * period + psi + 1] = pow * cross;
            pow *= eta;
        }
        signal_rows.push(ComplexSeq::from(sig));
        code_rows.push(ComplexSeq::from(code));
        let (own_noise, other_noise) = (ComplexSeq::from(own_noise), ComplexSeq::from(other_noise));
        noise_rows.push(if k == 0 {
            [own_noise, other_noise]
        } else {
            [other_noise, own_noise]
        });
    }

    Ok(GeneratorMatrix {
        branches: vec![Branch::Relay(0), Branch::Relay(1)],
        signal_rows,
        noise_rows,
        code_rows,
        meta: meta(Scheme::FdCrosstalk, ch, cfg, gamma, eta),
    })
}

/// `[beta, 0_{phi-1}, beta (h beta), 0_{phi-1}, ..., beta (h beta)^{b-1}]`.
pub(crate) fn loop_code_row(beta: f64, h_loop: Complex64, b: usize, phi: usize) -> ComplexSeq {
    let beta = real(beta);
    let r = h_loop * beta;
    let taps: Vec<Complex64> = std::iter::successors(Some(beta), |t| Some(t * r))
        .take(b)
        .collect();
    spaced(&taps, phi)
}

fn loop_branch(
    k: usize,
    ch: &ChannelRealization,
    beta: f64,
    cfg: &SchemeConfig,
) -> (ComplexSeq, [ComplexSeq; 2], ComplexSeq) {
    let code = loop_code_row(beta, ch.h_loop[k], cfg.b, cfg.phi);
    let signal = code.scaled(ch.h_sr[k]).delayed(cfg.phi + ch.src_delays[k]);
    let noise = code.delayed(cfg.phi);
    let noise_rows = if k == 0 {
        [noise, ComplexSeq::default()]
    } else {
        [ComplexSeq::default(), noise]
    };
    (signal, noise_rows, code)
}

/// Pads every signal row to the longest one.
fn equalize_span(rows: &mut [ComplexSeq]) {
    let span = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    for r in rows.iter_mut() {
        *r = r.window(span);
    }
}

/// Loop-channel coded generator, one row per relay.
pub fn build_generators_loop(
    ch: &ChannelRealization,
    amps: &AmplifierSolution,
    cfg: &SchemeConfig,
) -> Result<GeneratorMatrix> {
    check_relay_delays(ch, cfg)?;
    if cfg.b < 2 {
        return Err(Error::Precondition(format!("b = {} below 2", cfg.b)));
    }
    let mut signal_rows = Vec::new();
    let mut noise_rows = Vec::new();
    let mut code_rows = Vec::new();
    for k in 0..2 {
        let (s, n, c) = loop_branch(k, ch, amps.beta[k], cfg);
        signal_rows.push(s);
        noise_rows.push(n);
        code_rows.push(c);
    }
    equalize_span(&mut signal_rows);
    Ok(GeneratorMatrix {
        branches: vec![Branch::Relay(0), Branch::Relay(1)],
        signal_rows,
        noise_rows,
        code_rows,
        meta: meta(Scheme::FdLoop, ch, cfg, cfg.b - 1, ZERO),
    })
}

fn direct_code_row(cfg: &SchemeConfig) -> ComplexSeq {
    let mut row = ComplexSeq::zeros((cfg.b.max(1) - 1) * cfg.phi + 1);
    row[0] = ONE;
    row
}

/// Half-duplex rows: Vandermonde on the constants `1` and `-1`, scaled to
/// unit energy, taps spaced `phi`.
pub fn hd_code_rows(cfg: &SchemeConfig) -> [ComplexSeq; 2] {
    let norm = 1.0 / (cfg.b as f64).sqrt();
    let row = |c: f64| {
        let taps: Vec<Complex64> = (0..cfg.b).map(|j| real(c.powi(j as i32) * norm)).collect();
        spaced(&taps, cfg.phi)
    };
    [row(1.0), row(-1.0)]
}

pub fn build_generators_baseline(
    kind: BaselineKind,
    ch: &ChannelRealization,
    amps: &AmplifierSolution,
    cfg: &SchemeConfig,
) -> Result<GeneratorMatrix> {
    let direct = direct_code_row(cfg);
    let empty_noise = || [ComplexSeq::default(), ComplexSeq::default()];
    match kind {
        BaselineKind::Direct | BaselineKind::DirectLinkRow => {
            // Direct transmission alone gets the power of both relays.
            let amp = if kind == BaselineKind::Direct { SQRT_2 } else { 1.0 };
            Ok(GeneratorMatrix {
                branches: vec![Branch::Direct],
                signal_rows: vec![ComplexSeq::from(vec![real(amp)])],
                noise_rows: vec![empty_noise()],
                code_rows: vec![direct],
                meta: meta(Scheme::Direct, ch, cfg, 0, ZERO),
            })
        }
        BaselineKind::Hd => {
            if cfg.b < 2 || cfg.phi == 0 {
                return Err(Error::Precondition("hd needs b >= 2 and phi >= 1".into()));
            }
            let code_rows = hd_code_rows(cfg);
            let mut signal_rows = Vec::new();
            let mut noise_rows = Vec::new();
            for (k, code) in code_rows.iter().enumerate() {
                let beta = real(amps.beta[k]);
                signal_rows.push(code.scaled(beta * ch.h_sr[k]));
                let n = code.scaled(beta);
                noise_rows.push(if k == 0 {
                    [n, ComplexSeq::default()]
                } else {
                    [ComplexSeq::default(), n]
                });
            }
            Ok(GeneratorMatrix {
                branches: vec![Branch::Relay(0), Branch::Relay(1)],
                signal_rows,
                noise_rows,
                code_rows: code_rows.to_vec(),
                meta: meta(Scheme::Hd, ch, cfg, 0, ZERO),
            })
        }
        BaselineKind::SelfCoding => {
            check_relay_delays(ch, cfg)?;
            let (s, n, c) = loop_branch(0, ch, amps.beta[0], cfg);
            let mut signal_rows = vec![ComplexSeq::from(vec![ONE]), s];
            equalize_span(&mut signal_rows);
            Ok(GeneratorMatrix {
                branches: vec![Branch::Direct, Branch::Relay(0)],
                signal_rows,
                noise_rows: vec![empty_noise(), n],
                code_rows: vec![direct, c],
                meta: meta(Scheme::SelfCoding, ch, cfg, cfg.b - 1, ZERO),
            })
        }
    }
}

fn with_direct_link(mut g: GeneratorMatrix, ch: &ChannelRealization, cfg: &SchemeConfig, scheme: Scheme) -> Result<GeneratorMatrix> {
    let d = build_generators_baseline(BaselineKind::DirectLinkRow, ch, &AmplifierSolution::unit(), cfg)?;
    g.branches.extend(d.branches);
    g.signal_rows.extend(d.signal_rows);
    g.noise_rows.extend(d.noise_rows);
    g.code_rows.extend(d.code_rows);
    equalize_span(&mut g.signal_rows);
    g.meta.scheme = scheme;
    Ok(g)
}

/// Generator for whichever scheme `cfg` selects.
pub fn build_generators(
    cfg: &SchemeConfig,
    ch: &ChannelRealization,
    amps: &AmplifierSolution,
) -> Result<GeneratorMatrix> {
    match cfg.scheme {
        Scheme::FdCrosstalk => build_generators_crosstalk(ch, amps, cfg),
        Scheme::FdLoop => build_generators_loop(ch, amps, cfg),
        Scheme::Hd => build_generators_baseline(BaselineKind::Hd, ch, amps, cfg),
        Scheme::SelfCoding => build_generators_baseline(BaselineKind::SelfCoding, ch, amps, cfg),
        Scheme::Direct => build_generators_baseline(BaselineKind::Direct, ch, amps, cfg),
        Scheme::FdCrosstalkDl => {
            with_direct_link(build_generators_crosstalk(ch, amps, cfg)?, ch, cfg, cfg.scheme)
        }
        Scheme::FdLoopDl => with_direct_link(build_generators_loop(ch, amps, cfg)?, ch, cfg, cfg.scheme),
    }
}
