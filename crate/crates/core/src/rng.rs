//! Deterministic random-stream derivation.
//!
//! Every unit of Monte-Carlo work owns a ChaCha stream addressed by
//! `(seed, domain, power index, trial index, slot index)`. Work items can
//! therefore run in any order, on any number of workers, and still consume
//! bit-identical randomness. ChaCha8 provides 2^64 independent streams per
//! seed; the counter layout below packs the address into one stream id.

use crate::cmat::C64;
// Float math for no_std builds; shadowed by std's inherent methods in test builds.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Namespaces keeping unrelated draws off each other's streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamDomain {
    /// Channel matrices and beamformers of one slot.
    SlotChannel = 0,
    /// Data symbols and noise of one slot (signal-level traces only).
    SlotSymbols = 1,
    /// Estimate draw of one outer iteration of the converse check.
    ConverseOuter = 2,
    /// Conditional channel samples inside one converse optimization.
    ConverseInner = 3,
}

/// Stream id layout: `domain(8) | power(8) | slot(8) | trial(32)`.
fn pack(domain: StreamDomain, power_index: usize, trial: usize, slot: usize) -> u64 {
    assert!(power_index < 1 << 8, "power grid longer than 256 points");
    assert!(slot < 1 << 8, "slot index beyond 256");
    assert!(trial < 1 << 32, "trial index beyond 2^32");
    ((domain as u64) << 48) | ((power_index as u64) << 40) | ((slot as u64) << 32) | trial as u64
}

/// RNG positioned at the start of the addressed stream.
pub fn stream_rng(
    seed: u64,
    domain: StreamDomain,
    power_index: usize,
    trial: usize,
    slot: usize,
) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(pack(domain, power_index, trial, slot));
    rng
}

/// One circularly-symmetric complex Gaussian draw with the given variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (variance * 0.5).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}
