//! Power-normalizing amplifier gains.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AmplifierSolution;
use crate::channel::{ChannelRealization, NoiseSpec};
use crate::config::{Scheme, SchemeConfig};
use crate::error::{Error, Result};

const BISECT_ITERS: usize = 200;

/// Bisection on an increasing function with `f(lo) < 0 <= f(hi)`.
/// Stops once the bracket no longer shrinks in floating point.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Whichever endpoint sits closer to the root.
    if f(hi).abs() < f(lo).abs() {
        hi
    } else {
        lo
    }
}

/// Cross-talk scheme gains.
///
/// With `a = beta1^2`, `b = beta2^2` and `S = sum_{n=0}^{Gamma} |eta|^{2n}`,
/// unit mean transmit power over unit-variance source-relay gains requires
///
/// ```text
/// S a (1 + |h21|^2 b) = 1
/// S b (1 + |h12|^2 a) = 1
/// ```
///
/// Dividing the two gives `b = a / (1 + a d)` with `d = |h12|^2 - |h21|^2`,
/// which leaves one increasing scalar equation in `a`.
pub fn solve_amplifiers_crosstalk(
    ch: &ChannelRealization,
    cfg: &SchemeConfig,
) -> Result<AmplifierSolution> {
    let g12 = ch.h12().norm_sqr();
    let g21 = ch.h21().norm_sqr();
    if !(g12.is_finite() && g21.is_finite()) {
        return Err(Error::NonFinite("cross-talk gains"));
    }
    let gamma = cfg.gamma();
    let d = g12 - g21;

    let b_of = |a: f64| a / (1.0 + a * d);
    let series = |a: f64, b: f64| {
        let r = a * b * g12 * g21;
        let mut s = 0.0;
        let mut term = 1.0;
        for _ in 0..=gamma {
            s += term;
            term *= r;
        }
        s
    };
    let eq1 = |a: f64| {
        let b = b_of(a);
        if !(b > 0.0) || !b.is_finite() {
            return f64::INFINITY;
        }
        series(a, b) * a * (1.0 + g21 * b) - 1.0
    };

    // a <= 1 always (S >= 1), and b stays positive only for a < 1/|d| when
    // d < 0.
    let mut hi = 1.0;
    if d < 0.0 {
        hi = f64::min(hi, 1.0 / -d);
    }
    if !(eq1(hi) >= 0.0) {
        return Err(Error::NoRoot(format!(
            "no sign change on (0, {hi}] for |h12|^2 = {g12}, |h21|^2 = {g21}"
        )));
    }
    let a = bisect(0.0, hi, eq1);
    let b = b_of(a);
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::NoRoot(format!("non-positive gains a = {a}, b = {b}")));
    }
    let s = series(a, b);
    let r1 = (s * a * (1.0 + g21 * b) - 1.0).abs();
    let r2 = (s * b * (1.0 + g12 * a) - 1.0).abs();
    Ok(AmplifierSolution {
        beta: [a.sqrt(), b.sqrt()],
        residual: r1.max(r2),
        constraint_flag: true,
    })
}

/// Gain for one loop-coding relay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopAmplifier {
    pub beta: f64,
    pub residual: f64,
    /// `beta < 1 / |h_loop|`.
    pub within_bound: bool,
}

/// Solves `sum_{i=1}^{b} beta^2 |h beta|^{2(i-1)} = 1` for `beta > 0`.
pub fn solve_amplifier_loop(h_loop: Complex64, b: usize) -> Result<LoopAmplifier> {
    if b == 0 {
        return Err(Error::Precondition("loop code needs b >= 1".into()));
    }
    let g = h_loop.norm_sqr();
    if !g.is_finite() {
        return Err(Error::NonFinite("loop gain"));
    }
    // In u = beta^2 the sum is u * (1 + u g + ... + (u g)^{b-1}).
    let f = |u: f64| {
        let mut s = 0.0;
        let mut term = u;
        for _ in 0..b {
            s += term;
            term *= u * g;
        }
        s - 1.0
    };
    let u = bisect(0.0, 1.0, f);
    let beta = u.sqrt();
    Ok(LoopAmplifier {
        beta,
        residual: f(u).abs(),
        within_bound: beta * h_loop.norm() < 1.0,
    })
}

/// Amplifier gains for whichever scheme `cfg` selects.
pub fn solve_amplifiers(
    cfg: &SchemeConfig,
    ch: &ChannelRealization,
    noise: &NoiseSpec,
) -> Result<AmplifierSolution> {
    match cfg.scheme {
        Scheme::FdCrosstalk | Scheme::FdCrosstalkDl => solve_amplifiers_crosstalk(ch, cfg),
        Scheme::FdLoop | Scheme::FdLoopDl | Scheme::SelfCoding => {
            let l0 = solve_amplifier_loop(ch.h_loop[0], cfg.b)?;
            let l1 = solve_amplifier_loop(ch.h_loop[1], cfg.b)?;
            Ok(AmplifierSolution {
                beta: [l0.beta, l1.beta],
                residual: l0.residual.max(l1.residual),
                constraint_flag: l0.within_bound && l1.within_bound,
            })
        }
        Scheme::Hd => Ok(AmplifierSolution::half_duplex(noise.sigma2_relay)),
        Scheme::Direct => Ok(AmplifierSolution::unit()),
    }
}
