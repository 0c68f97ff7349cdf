//! Shift-full-rank checks.
//!
//! A set of rows is SFR when the stacked matrix keeps full row rank however
//! the rows are independently delayed. The brute-force test enumerates the
//! delays; the analytic predicates are the closed-form conditions for the
//! two coded schemes.

use num_complex::Complex64;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_generators, solve_amplifiers, AmplifierSolution, GeneratorMatrix};
use crate::channel::{draw_realization_with, ChannelRealization, NoiseSpec};
use crate::config::{Scheme, SchemeConfig};
use crate::corelin::{matrix_rank, ComplexMatrix, ComplexSeq, RANK_REL_TOL, ZERO};
use crate::error::{Error, Result};
use crate::rng::rng_for;

/// Relative tolerance for treating two products as equal.
pub const SFR_REL_TOL: f64 = 1e-9;

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `|x - y| / max(|x|, |y|)`, or 0 when both vanish.
fn rel_gap(x: Complex64, y: Complex64) -> f64 {
    let scale = x.norm().max(y.norm());
    if scale == 0.0 {
        0.0
    } else {
        (x - y).norm() / scale
    }
}

/// Brute force over every per-row delay in `0..=max_shift`.
pub fn rows_are_sfr(rows: &[ComplexSeq], max_shift: usize, tol: f64) -> Result<bool> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("sfr rows"));
    }
    let r = rows.len();
    let width = rows.iter().map(|x| x.len()).max().unwrap_or(0) + max_shift;
    let mut shifts = vec![0usize; r];
    loop {
        let shifted: Vec<ComplexSeq> = rows
            .iter()
            .zip(&shifts)
            .map(|(row, &s)| row.delayed(s).window(width))
            .collect();
        if matrix_rank(&ComplexMatrix::from_rows(&shifted), tol)? < r {
            return Ok(false);
        }
        // Odometer increment over the shift vector.
        let mut i = 0;
        loop {
            if i == r {
                return Ok(true);
            }
            shifts[i] += 1;
            if shifts[i] <= max_shift {
                break;
            }
            shifts[i] = 0;
            i += 1;
        }
    }
}

/// Brute-force SFR test on a generator's code rows.
pub fn sfr_bruteforce(g: &GeneratorMatrix, max_shift: usize, tol: f64) -> Result<bool> {
    rows_are_sfr(&g.code_rows, max_shift, tol)
}

/// Normalized distance from the degenerate set of the analytic predicate:
/// 0 means the predicate sits exactly on its boundary.
pub fn sfr_margin(ch: &ChannelRealization, amps: &AmplifierSolution, scheme: Scheme) -> Result<f64> {
    let [b1, b2] = amps.beta.map(real);
    match scheme {
        Scheme::FdCrosstalk => {
            let x = b1 * ch.h12() * ch.h_sr[0] * ch.h_sr[0];
            let y = b2 * ch.h21() * ch.h_sr[1] * ch.h_sr[1];
            let lead = (b1 * ch.h_sr[0]).norm().min((b2 * ch.h_sr[1]).norm());
            Ok(rel_gap(x, y).min(lead))
        }
        Scheme::FdLoop => Ok(rel_gap(ch.h_loop[0] * b1, ch.h_loop[1] * b2)),
        Scheme::SelfCoding => Ok((ch.h_loop[0] * b1).norm()),
        Scheme::Hd | Scheme::Direct => Ok(1.0),
        Scheme::FdCrosstalkDl | Scheme::FdLoopDl => Err(Error::Invalid(format!(
            "no closed-form predicate for {scheme}; use the brute-force test"
        ))),
    }
}

/// Closed-form SFR predicates.
///
/// Cross-talk: `beta1 h12 h_sr1^2 != beta2 h21 h_sr2^2` with both
/// `beta_k h_srk` nonzero. Loop: `h11 beta1 != h22 beta2`. Self-coding pairs
/// the direct row with one loop row, which is SFR iff `h11 beta1 != 0`.
pub fn sfr_analytic(ch: &ChannelRealization, amps: &AmplifierSolution, scheme: Scheme) -> Result<bool> {
    let [b1, b2] = amps.beta.map(real);
    let nonzero = |z: Complex64| z != ZERO;
    Ok(match scheme {
        Scheme::FdCrosstalk => {
            let x = b1 * ch.h12() * ch.h_sr[0] * ch.h_sr[0];
            let y = b2 * ch.h21() * ch.h_sr[1] * ch.h_sr[1];
            nonzero(b1 * ch.h_sr[0]) && nonzero(b2 * ch.h_sr[1]) && rel_gap(x, y) > SFR_REL_TOL
        }
        Scheme::FdLoop => rel_gap(ch.h_loop[0] * b1, ch.h_loop[1] * b2) > SFR_REL_TOL,
        Scheme::SelfCoding => nonzero(ch.h_loop[0] * b1),
        Scheme::Hd | Scheme::Direct => true,
        _ => return sfr_margin(ch, amps, scheme).map(|_| false),
    })
}

/// Draws whose analytic margin falls below this are reported separately.
pub const SFR_NEAR_SINGULAR: f64 = 1e-8;

/// Tally of analytic vs brute-force verdicts over random channels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SfrAgreementReport {
    pub scheme: Scheme,
    pub draws: u64,
    pub max_shift: usize,
    pub seed: u64,
    pub analytic_sfr: u64,
    pub bruteforce_sfr: u64,
    pub disagreements: u64,
    /// Draws with margin below [`SFR_NEAR_SINGULAR`]; not counted as
    /// disagreements.
    pub near_singular: u64,
}

/// Compares [`sfr_analytic`] with [`sfr_bruteforce`] on `draws` channels
/// drawn from `cfg.delays`. Draw `i` uses `rng_for(seed, i)`.
pub fn sfr_agreement(cfg: &SchemeConfig, draws: u64, max_shift: usize, seed: u64) -> Result<SfrAgreementReport> {
    cfg.validate()?;
    let noise = NoiseSpec::noiseless();
    let verdicts: Vec<Option<(bool, bool)>> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let ch = draw_realization_with(&mut rng_for(seed, i), &cfg.delays);
            let amps = solve_amplifiers(cfg, &ch, &noise)?;
            if sfr_margin(&ch, &amps, cfg.scheme)? < SFR_NEAR_SINGULAR {
                return Ok(None);
            }
            let g = build_generators(cfg, &ch, &amps)?;
            Ok(Some((sfr_analytic(&ch, &amps, cfg.scheme)?, sfr_bruteforce(&g, max_shift, RANK_REL_TOL)?)))
        })
        .collect::<Result<_>>()?;
    let mut r = SfrAgreementReport {
        scheme: cfg.scheme,
        draws,
        max_shift,
        seed,
        analytic_sfr: 0,
        bruteforce_sfr: 0,
        disagreements: 0,
        near_singular: 0,
    };
    for v in verdicts {
        match v {
            None => r.near_singular += 1,
            Some((a, b)) => {
                r.analytic_sfr += a as u64;
                r.bruteforce_sfr += b as u64;
                r.disagreements += (a != b) as u64;
            }
        }
    }
    Ok(r)
}
