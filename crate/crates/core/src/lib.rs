//! Simulator and code-design toolkit for two-relay full-duplex asynchronous
//! amplify-and-forward networks.
//!
//! The pipeline for one frame is: draw a [`channel::ChannelRealization`],
//! build a zero-padded [`modem::Frame`], solve the relay gains and
//! generator rows ([`codegen`]), run the relays sample by sample
//! ([`relaysim`]), superpose the branches at the destination and detect with
//! a block MMSE-DFE ([`receiver`]). [`harness`] wraps this in seeded Monte
//! Carlo loops.

pub mod channel;
pub mod cli;
pub mod codegen;
pub mod config;
pub mod corelin;
pub mod error;
pub mod harness;
pub mod modem;
pub mod receiver;
pub mod relaysim;
pub mod rng;

pub use config::{Scheme, SchemeConfig};
pub use error::{Error, Result};
