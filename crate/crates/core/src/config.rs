//! Scheme selection and frame parameters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::DelayProfile;
use crate::error::{Error, Result};

/// Transmission scheme under test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Full-duplex relays coding through the cross-talk links.
    FdCrosstalk,
    /// Full-duplex relays coding through their own loop channels.
    FdLoop,
    /// Half-duplex relays with a fixed two-row convolutional code.
    Hd,
    /// One loop-coding relay plus the direct link.
    SelfCoding,
    /// Source to destination only, at twice the transmit power.
    Direct,
    FdCrosstalkDl,
    FdLoopDl,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::FdCrosstalk,
        Scheme::FdLoop,
        Scheme::Hd,
        Scheme::SelfCoding,
        Scheme::Direct,
        Scheme::FdCrosstalkDl,
        Scheme::FdLoopDl,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::FdCrosstalk => "fd_crosstalk",
            Scheme::FdLoop => "fd_loop",
            Scheme::Hd => "hd",
            Scheme::SelfCoding => "self_coding",
            Scheme::Direct => "direct",
            Scheme::FdCrosstalkDl => "fd_crosstalk_dl",
            Scheme::FdLoopDl => "fd_loop_dl",
        }
    }

    pub fn is_full_duplex(self) -> bool {
        matches!(
            self,
            Scheme::FdCrosstalk | Scheme::FdLoop | Scheme::FdCrosstalkDl | Scheme::FdLoopDl
        )
    }

    pub fn has_direct_link(self) -> bool {
        matches!(
            self,
            Scheme::SelfCoding | Scheme::Direct | Scheme::FdCrosstalkDl | Scheme::FdLoopDl
        )
    }

    /// Default zero padding: longer for the two full-duplex codes.
    pub fn default_padding(self) -> usize {
        if self.is_full_duplex() {
            6
        } else {
            3
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .iter()
            .copied()
            .find(|sc| sc.as_str() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown scheme '{s}'")))
    }
}

/// Frame and code parameters for one scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    /// Information symbols per frame.
    pub n: usize,
    /// Zero padding appended to each frame.
    pub p: usize,
    /// Common processing delay at the relays.
    pub phi: usize,
    /// Constraint length of the loop-channel and half-duplex codes.
    pub b: usize,
    pub delays: DelayProfile,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme) -> Self {
        SchemeConfig {
            scheme,
            n: 20,
            p: scheme.default_padding(),
            phi: 2,
            b: 3,
            delays: DelayProfile::default(),
        }
    }

    pub fn tau_max(&self) -> usize {
        self.delays.tau_max
    }

    /// Relay transmit window `N + p`.
    pub fn frame_len(&self) -> usize {
        self.n + self.p
    }

    /// Destination receive window `N + p + tau_max - 1`.
    pub fn receive_len(&self) -> usize {
        self.n + self.p + self.tau_max().max(1) - 1
    }

    /// Zero-run bound of the cross-talk code, `2 phi - 2`.
    pub fn xi(&self) -> usize {
        2 * self.phi - 2
    }

    /// Number of extra tap pairs the cross-talk recursion produces inside
    /// the transmit window: the largest `n` with `2 n phi + phi <= N + p - 1`.
    pub fn gamma(&self) -> usize {
        let last = self.frame_len().saturating_sub(1);
        if last < self.phi || self.phi == 0 {
            return 0;
        }
        (last - self.phi) / (2 * self.phi)
    }

    /// Information bits per channel use.
    pub fn spectral_efficiency(&self) -> f64 {
        let per_frame = 2.0 * self.n as f64 / self.frame_len() as f64;
        match self.scheme {
            // Receive phase and transmit phase each take a full frame.
            Scheme::Hd => per_frame / 2.0,
            _ => per_frame,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Precondition(m));
        if self.n == 0 {
            return fail("N must be at least 1".into());
        }
        if self.delays.tau_max == 0 {
            return fail("tau_max must be at least 1".into());
        }
        let src_max = self
            .delays
            .fixed_src
            .map(|d| d[0].max(d[1]))
            .unwrap_or(self.delays.src_delay_max);
        match self.scheme {
            Scheme::FdCrosstalk | Scheme::FdCrosstalkDl => {
                if self.phi < src_max + 1 {
                    return fail(format!(
                        "phi = {} must exceed the largest source delay {src_max}",
                        self.phi
                    ));
                }
                if self.p + 1 < 2 * self.phi {
                    return fail(format!("p = {} below 2 phi - 1 = {}", self.p, 2 * self.phi - 1));
                }
            }
            Scheme::FdLoop | Scheme::FdLoopDl | Scheme::SelfCoding => {
                if self.phi < src_max + 1 {
                    return fail(format!(
                        "phi = {} must exceed the largest source delay {src_max}",
                        self.phi
                    ));
                }
                if self.b < 2 {
                    return fail(format!("b = {} below 2", self.b));
                }
            }
            Scheme::Hd => {
                if self.b < 2 || self.phi == 0 {
                    return fail("hd needs b >= 2 and phi >= 1".into());
                }
            }
            Scheme::Direct => {}
        }
        Ok(())
    }
}
