//! Zero-padding audit for the cross-talk code.
//!
//! For a codeword difference `e` the full (untruncated) code matrix is
//! `B_full = [a_bar_k * e]` with one period `a_bar_k = [a_k1, 0_{psi_k},
//! a_k2, 0_{xi - psi_k}]`. The transmitted version is the periodic
//! extension `a_hat_k = sum_n K^n a_bar_k` shifted by `n (xi + 2)`,
//! convolved with the padded frame and cut to `N + p` samples. A padding
//! length is adequate when truncation never lowers the rank.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{solve_amplifiers_crosstalk, AmplifierSolution};
use crate::channel::{draw_realization_with, ChannelRealization};
use crate::config::SchemeConfig;
use crate::corelin::{convolve, convolve_window, matrix_rank, ComplexMatrix, ComplexSeq, ONE, RANK_REL_TOL, ZERO};
use crate::error::{Error, Result};
use crate::rng::rng_for;

/// A codeword difference and channel where truncation lost rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankWitness {
    pub trial: u64,
    /// `[[a11, a12], [a21, a22]]`.
    pub a: [[Complex64; 2]; 2],
    pub k: Complex64,
    pub psi: [usize; 2],
    pub xi: usize,
    pub n: usize,
    pub p: usize,
    pub e: ComplexSeq,
    pub rank_full: usize,
    pub rank_truncated: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankAuditReport {
    pub p_tested: usize,
    pub trials: u64,
    /// `(psi1, psi2)` pairs examined per trial.
    pub psi_pairs: usize,
    pub min_rank_full: usize,
    pub min_rank_truncated: usize,
    pub drop_found: bool,
    pub drop_count: u64,
    pub witness: Option<RankWitness>,
}

fn period_row(a1: Complex64, a2: Complex64, psi: usize, xi: usize) -> ComplexSeq {
    let mut row = ComplexSeq::zeros(xi + 2);
    row[0] = a1;
    row[psi + 1] = a2;
    row
}

fn periodic_row(base: &ComplexSeq, k: Complex64, len: usize) -> ComplexSeq {
    let period = base.len();
    let mut out = ComplexSeq::zeros(len);
    let mut pow = ONE;
    let mut start = 0;
    while start < len {
        for (i, &v) in base.iter().enumerate() {
            if start + i < len {
                out[start + i] += pow * v;
            }
        }
        pow *= k;
        start += period;
    }
    out
}

/// `(rank(B_full), rank(B_trunc))` for one configuration.
pub(crate) fn audit_ranks(
    a: &[[Complex64; 2]; 2],
    k: Complex64,
    psi: [usize; 2],
    xi: usize,
    p: usize,
    e: &[Complex64],
) -> Result<(usize, usize)> {
    if e.iter().all(|&v| v == ZERO) {
        return Err(Error::Invalid("zero codeword difference".into()));
    }
    let n = e.len();
    let len = n + p;
    let mut full = Vec::with_capacity(2);
    let mut trunc = Vec::with_capacity(2);
    for j in 0..2 {
        let base = period_row(a[j][0], a[j][1], psi[j], xi);
        full.push(convolve(&base, e)?);
        let ext = periodic_row(&base, k, len);
        trunc.push(convolve_window(&ext, e, len));
    }
    Ok((
        matrix_rank(&ComplexMatrix::from_rows(&full), RANK_REL_TOL)?,
        matrix_rank(&ComplexMatrix::from_rows(&trunc), RANK_REL_TOL)?,
    ))
}

/// Recomputes a witness; true when it still shows a rank drop.
pub fn verify_witness(w: &RankWitness) -> Result<bool> {
    if w.e.len() != w.n {
        return Err(Error::Dimension(format!("witness e has {} samples, N = {}", w.e.len(), w.n)));
    }
    let (full, trunc) = audit_ranks(&w.a, w.k, w.psi, w.xi, w.p, &w.e)?;
    Ok(full == w.rank_full && trunc == w.rank_truncated && trunc < full)
}

/// Differences of two independent uniform QPSK sequences, forced nonzero.
fn qpsk_difference<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let comp = |rng: &mut R| match rng.random_range(0..4u8) {
        0 => std::f64::consts::SQRT_2,
        1 => -std::f64::consts::SQRT_2,
        _ => 0.0,
    };
    loop {
        let e: Vec<Complex64> = (0..n).map(|_| Complex64::new(comp(rng), comp(rng))).collect();
        if e.iter().any(|&v| v != ZERO) {
            return e;
        }
    }
}

fn channel_coefficients(ch: &ChannelRealization, amps: &AmplifierSolution) -> ([[Complex64; 2]; 2], Complex64) {
    let [b1, b2] = amps.beta.map(|b| Complex64::new(b, 0.0));
    let a = [
        [b1 * ch.h_sr[0], b1 * ch.h21() * b2 * ch.h_sr[1]],
        [b2 * ch.h_sr[1], b2 * ch.h12() * b1 * ch.h_sr[0]],
    ];
    (a, b1 * b2 * ch.h12() * ch.h21())
}

/// Audits padding `p` over `trials` draws.
///
/// With `fixed = None` each trial draws a fresh channel; otherwise every
/// trial reuses the given one. Even trials use a directed difference (a
/// single nonzero symbol at the last data position), odd trials a random
/// QPSK difference. Every `(psi1, psi2)` in `[0, xi]^2` is checked, since
/// the zero-run lengths a channel produces cover only part of that square.
pub fn rank_audit_padding(
    fixed: Option<(&ChannelRealization, &AmplifierSolution)>,
    cfg: &SchemeConfig,
    p: usize,
    trials: u64,
    seed: u64,
) -> Result<RankAuditReport> {
    if trials == 0 {
        return Err(Error::Precondition("rank audit needs at least one trial".into()));
    }
    let xi = cfg.xi();
    let n = cfg.n;
    let mut cfg_p = cfg.clone();
    cfg_p.p = p;

    let mut report = RankAuditReport {
        p_tested: p,
        trials,
        psi_pairs: (xi + 1) * (xi + 1),
        min_rank_full: usize::MAX,
        min_rank_truncated: usize::MAX,
        drop_found: false,
        drop_count: 0,
        witness: None,
    };
    for t in 0..trials {
        let mut rng = rng_for(seed, t);
        let (a, k) = match fixed {
            Some((ch, amps)) => channel_coefficients(ch, amps),
            None => {
                let ch = draw_realization_with(&mut rng, &cfg.delays);
                let amps = solve_amplifiers_crosstalk(&ch, &cfg_p)?;
                channel_coefficients(&ch, &amps)
            }
        };
        let e = if t % 2 == 0 {
            let mut e = vec![ZERO; n];
            e[n - 1] = qpsk_difference(&mut rng, 1)[0];
            e
        } else {
            qpsk_difference(&mut rng, n)
        };
        for psi1 in 0..=xi {
            for psi2 in 0..=xi {
                let psi = [psi1, psi2];
                let (full, trunc) = audit_ranks(&a, k, psi, xi, p, &e)?;
                report.min_rank_full = report.min_rank_full.min(full);
                report.min_rank_truncated = report.min_rank_truncated.min(trunc);
                if trunc < full {
                    report.drop_found = true;
                    report.drop_count += 1;
                    if report.witness.is_none() {
                        report.witness = Some(RankWitness {
                            trial: t,
                            a,
                            k,
                            psi,
                            xi,
                            n,
                            p,
                            e: e.clone().into(),
                            rank_full: full,
                            rank_truncated: trunc,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}
