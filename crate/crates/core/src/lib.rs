//! Degrees-of-freedom analysis and link-level simulation of the K-user
//! MISO broadcast channel under mixed CSIT (perfect delayed CSI plus an
//! imperfect estimate of the current CSI) carrying order-(K-1) messages.
//!
//! The crate has two halves that cross-check each other:
//!
//! * closed-form machinery — sum-DoF formulas, the outer-bound inequality
//!   families and their polytope vertices ([`analysis`]), and a numerical
//!   check of the entropy-difference bound behind the converse
//!   ([`converse`]);
//! * a Monte-Carlo simulator — per-slot channel draws ([`channel`]),
//!   zero-forcing/random beamformers ([`precoding`]), the two-phase
//!   rate-splitting superframe and the single-slot ZF scheme ([`scheme`]),
//!   and the layered receiver that turns channel realizations into
//!   per-message rates ([`receiver`], [`sim`]).
//!
//! Everything here is `no_std + alloc`; IO, CLI parsing and CSV output live
//! in the companion `mixcsit-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod channel;
pub mod cmat;
pub mod converse;
mod fit;
pub mod precoding;
pub mod receiver;
pub mod rng;
pub mod scheme;
pub mod sim;

pub use channel::{Accounting, SystemConfig};
pub use cmat::C64;
