//! Generator matrices, amplifier solves and shift-full-rank analysis.
//!
//! A scheme is described by one tap sequence per transmit branch. Relay
//! branches also carry one tap sequence per relay noise stream, so the
//! destination sees
//!
//! ```text
//! t_b = [signal_row_b * x + sum_j noise_rows[b][j] * w_j]_{N+p}
//! ```
//!
//! on branch `b`, which is exactly what the sample-level relay simulation in
//! [`crate::relaysim`] produces.

mod amplifiers;
mod audit;
mod generators;
mod sfr;

pub use amplifiers::{solve_amplifier_loop, solve_amplifiers, solve_amplifiers_crosstalk, LoopAmplifier};
pub use audit::{rank_audit_padding, verify_witness, RankAuditReport, RankWitness};
pub use generators::{
    build_generators, build_generators_baseline, build_generators_crosstalk, build_generators_loop,
    hd_code_rows, BaselineKind,
};
pub use sfr::{
    rows_are_sfr, sfr_agreement, sfr_analytic, sfr_bruteforce, sfr_margin, SfrAgreementReport, SFR_NEAR_SINGULAR,
    SFR_REL_TOL,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Scheme;
use crate::corelin::ComplexSeq;

/// A transmit branch as seen by the destination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Relay `k` (0-based), received through `h_rd[k]` after `dst_delays[k]`.
    Relay(usize),
    /// The source itself, through `h_sd` after `dst_delay_direct`.
    Direct,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMeta {
    pub scheme: Scheme,
    pub psi1: usize,
    pub psi2: usize,
    pub xi: usize,
    pub gamma: usize,
    /// `beta1 beta2 h12 h21`; zero for schemes without cross-talk coding.
    pub eta: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMatrix {
    pub branches: Vec<Branch>,
    /// Source symbols to branch output, including the source-relay gain and
    /// all leading delays.
    pub signal_rows: Vec<ComplexSeq>,
    /// `noise_rows[b][j]` maps relay `j`'s receiver noise to branch `b`.
    /// Empty sequences mean no contribution.
    pub noise_rows: Vec<[ComplexSeq; 2]>,
    /// Rows checked for the shift-full-rank property: the coding structure
    /// without leading delays.
    pub code_rows: Vec<ComplexSeq>,
    pub meta: GeneratorMeta,
}

impl GeneratorMatrix {
    pub fn num_branches(&self) -> usize {
        self.branches.len()
    }

    /// Length shared by every signal row.
    pub fn span(&self) -> usize {
        self.signal_rows.iter().map(|r| r.len()).max().unwrap_or(0)
    }
}

/// Amplifying factors for the two relays.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplifierSolution {
    pub beta: [f64; 2],
    /// Largest absolute error left in the normalization equations.
    pub residual: f64,
    /// Loop scheme: `beta_k < 1 / |h_kk|` for both relays. Always true for
    /// the other schemes.
    pub constraint_flag: bool,
}

impl AmplifierSolution {
    /// Half-duplex relays scale the received sample to unit power.
    pub fn half_duplex(sigma2_relay: f64) -> Self {
        let b = 1.0 / (1.0 + sigma2_relay).sqrt();
        AmplifierSolution {
            beta: [b, b],
            residual: 0.0,
            constraint_flag: true,
        }
    }

    /// Placeholder for schemes with no relay amplification.
    pub fn unit() -> Self {
        AmplifierSolution {
            beta: [1.0, 1.0],
            residual: 0.0,
            constraint_flag: true,
        }
    }
}
