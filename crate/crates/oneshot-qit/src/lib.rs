//! One-shot quantum information toolkit.
//!
//! Computes smoothed one-shot entropic quantities (hypothesis-testing and max
//! relative entropies and their mutual-information forms), exactly simulates
//! entanglement-assisted coding protocols (single-sender, two-sender
//! successive cancellation, quantum rejection sampling, and the blocked
//! variant with a classical side channel), and turns the chain-rule
//! inequalities relating these quantities into executable checks over random
//! ensembles of small-dimensional states.
//!
//! Start with the `examples/` directory for runnable entry points, or the
//! `oneshot-qit` binary for the command-line interface.

pub mod entropics;
pub mod error;
pub mod qmat;
pub mod sdp;
pub mod seed;
pub mod states;

pub use error::{Error, Result};
