//! Capacity analysis for the symmetric interference relay channel (IRC)
//! in the strong-interference regime.
//!
//! The crate is split along the three ways of looking at the channel:
//!
//! * [`gdof`] evaluates the generalized-degrees-of-freedom bounds and the
//!   achievable GDoF in closed form, classifies regimes and produces
//!   α-sweeps.
//! * [`ld`] models the linear-deterministic IRC bit by bit and runs the
//!   block-Markov neutralization / compute-forward / decode-forward scheme
//!   end to end, with backward decoding at the receivers.
//! * [`gaussian`] evaluates the Gaussian rate-constraint system of the
//!   lattice-based scheme, optimizes power splits, evaluates the genie-aided
//!   converse and estimates GDoF from finite-SNR slopes.
//!
//! [`report`] turns results into CSV rows with stable headers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gaussian;
pub mod gdof;
pub mod ld;
pub mod report;

pub use error::{Error, Result};
