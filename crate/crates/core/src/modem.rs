//! Gray-mapped QPSK and zero-padded framing.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corelin::{ComplexSeq, ZERO};
use crate::error::{Error, Result};

/// Maps bit pairs `(b0, b1)` to `((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)`.
pub fn qpsk_modulate(bits: &[u8]) -> Result<ComplexSeq> {
    if bits.len() % 2 != 0 {
        return Err(Error::OddBitCount(bits.len()));
    }
    Ok(bits
        .chunks_exact(2)
        .map(|b| {
            let re = if b[0] == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
            let im = if b[1] == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
            Complex64::new(re, im)
        })
        .collect())
}

/// Hard sign decisions on each quadrature.
pub fn qpsk_demodulate(symbols: &[Complex64]) -> Vec<u8> {
    symbols
        .iter()
        .flat_map(|z| [(z.re < 0.0) as u8, (z.im < 0.0) as u8])
        .collect()
}

pub fn random_bits<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

pub fn bit_errors(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// A finite symbol alphabet with nearest-point slicing.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    points: Vec<Complex64>,
}

impl Constellation {
    /// Points are kept in lexicographic `(re, im)` order so that slicing
    /// ties resolve to the smallest point.
    pub fn new(mut points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("constellation"));
        }
        points.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        Ok(Constellation { points })
    }

    pub fn qpsk() -> Self {
        let r = FRAC_1_SQRT_2;
        Constellation::new(vec![
            Complex64::new(r, r),
            Complex64::new(r, -r),
            Complex64::new(-r, r),
            Complex64::new(-r, -r),
        ])
        .expect("non-empty")
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    pub fn slice(&self, z: Complex64) -> Complex64 {
        let mut best = self.points[0];
        let mut best_d = (z - best).norm_sqr();
        for &p in &self.points[1..] {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best = p;
                best_d = d;
            }
        }
        best
    }
}

/// One zero-padded source frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    /// Information symbols `s(0..N)`.
    pub data: ComplexSeq,
    /// `x(0..N+p)`: the data followed by `p` zeros.
    pub padded: ComplexSeq,
    pub n: usize,
    pub p: usize,
}

impl Frame {
    pub fn len(&self) -> usize {
        self.n + self.p
    }

    pub fn is_empty(&self) -> bool {
        self.n + self.p == 0
    }
}

pub fn build_frame(s: ComplexSeq, p: usize) -> Result<Frame> {
    if s.is_empty() {
        return Err(Error::EmptyInput("frame data"));
    }
    let n = s.len();
    let mut padded = s.clone().into_inner();
    padded.resize(n + p, ZERO);
    Ok(Frame {
        data: s,
        padded: padded.into(),
        n,
        p,
    })
}
