//! System configuration and the mixed-CSIT channel model.
//!
//! Per slot, each receiver's channel row splits into an estimate known to
//! the transmitter and an estimation error:
//!
//! ```text
//! h_i = h_hat_i + h_tilde_i,
//! h_hat entries ~ CN(0, 1 - sigma^2),   h_tilde entries ~ CN(0, sigma^2),
//! sigma^2 = P^(-alpha).
//! ```
//!
//! `alpha = 0` is pure delayed CSIT (the current estimate carries nothing),
//! `alpha = 1` behaves as perfect current CSIT at the DoF level. Slots are
//! drawn i.i.d.: the temporal-correlation story only motivates where the
//! estimate comes from, the per-slot marginals above fully determine the
//! statistics. Only the effective dimension m = min{M, 2} is ever used, so
//! channels are generated directly in C^m.

use crate::cmat::{Vec2, ZERO_V2};
use crate::rng::complex_gaussian;
use alloc::vec::Vec;
use core::fmt;
// Float math for no_std builds; shadowed by std's inherent methods in test builds.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

/// How per-stream rates are booked at the receivers.
///
/// `PowerLevel` mirrors the per-term power-level diagrams: every stream is
/// credited the log of its own SINR with same-level co-streams excluded.
/// `JointMac` caps the co-received streams of one observation by its single
/// mutual-information budget. The two coincide for K = 2 and diverge for
/// K >= 3; the simulator measures both rather than adjudicating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Accounting {
    PowerLevel,
    JointMac,
}

impl Accounting {
    pub fn as_str(self) -> &'static str {
        match self {
            Accounting::PowerLevel => "power_level",
            Accounting::JointMac => "joint_mac",
        }
    }
}

/// Problem parameters shared by every experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Number of single-antenna receivers (K >= 2).
    pub users: usize,
    /// Number of transmit antennas (M >= 1).
    pub tx_antennas: usize,
    /// CSIT quality exponent in [0, 1].
    pub alpha: f64,
    /// Transmit power budgets, linear scale, strictly increasing, all > 1.
    pub power_grid: Vec<f64>,
    /// Monte-Carlo channel draws per power point.
    pub trials: usize,
    /// Master reproducibility seed.
    pub seed: u64,
    /// Rate accounting mode.
    pub accounting: Accounting,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// K must be at least 2.
    UserCount(usize),
    /// M must be at least 1.
    AntennaCount(usize),
    /// alpha must lie in [0, 1].
    Alpha(f64),
    /// Every power must exceed 1 (log-scale bookkeeping breaks otherwise).
    PowerOutOfRange(f64),
    /// Powers must be strictly increasing.
    PowerNotIncreasing,
    /// Power grid must be non-empty.
    EmptyPowerGrid,
    /// At least one trial per power point.
    Trials(usize),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::UserCount(k) => write!(f, "user count K = {k} (need K >= 2)"),
            ConfigError::AntennaCount(m) => write!(f, "antenna count M = {m} (need M >= 1)"),
            ConfigError::Alpha(a) => write!(f, "alpha = {a} outside [0, 1]"),
            ConfigError::PowerOutOfRange(p) => write!(f, "power P = {p} (need P > 1)"),
            ConfigError::PowerNotIncreasing => write!(f, "power grid not strictly increasing"),
            ConfigError::EmptyPowerGrid => write!(f, "power grid is empty"),
            ConfigError::Trials(t) => write!(f, "trials = {t} (need at least 1)"),
        }
    }
}

impl SystemConfig {
    pub fn new(
        users: usize,
        tx_antennas: usize,
        alpha: f64,
        power_grid: Vec<f64>,
        trials: usize,
        seed: u64,
        accounting: Accounting,
    ) -> Result<Self, ConfigError> {
        let cfg = SystemConfig {
            users,
            tx_antennas,
            alpha,
            power_grid,
            trials,
            seed,
            accounting,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.users < 2 {
            return Err(ConfigError::UserCount(self.users));
        }
        if self.tx_antennas < 1 {
            return Err(ConfigError::AntennaCount(self.tx_antennas));
        }
        if !(0.0..=1.0).contains(&self.alpha) || self.alpha.is_nan() {
            return Err(ConfigError::Alpha(self.alpha));
        }
        if self.power_grid.is_empty() {
            return Err(ConfigError::EmptyPowerGrid);
        }
        for &p in &self.power_grid {
            if !(p > 1.0) || !p.is_finite() {
                return Err(ConfigError::PowerOutOfRange(p));
            }
        }
        if self.power_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::PowerNotIncreasing);
        }
        if self.trials == 0 {
            return Err(ConfigError::Trials(self.trials));
        }
        Ok(())
    }

    /// Effective transmit dimension m = min{M, 2}; derived, never stored.
    pub fn dim(&self) -> usize {
        effective_dimension(self.tx_antennas)
    }
}

/// m = min{M, 2}: no part of the scheme or the bounds exploits more than
/// two transmit dimensions.
pub fn effective_dimension(tx_antennas: usize) -> usize {
    tx_antennas.min(2)
}

/// CSIT error variance `sigma^2 = P^(-alpha)`.
///
/// Rejects P <= 1, where the log-power bookkeeping is undefined.
pub fn csit_error_variance(power: f64, alpha: f64) -> Result<f64, ConfigError> {
    if !(power > 1.0) || !power.is_finite() {
        return Err(ConfigError::PowerOutOfRange(power));
    }
    if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
        return Err(ConfigError::Alpha(alpha));
    }
    Ok(power.powf(-alpha))
}

/// One slot's channel state: true rows, transmitter-side estimate, error.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSlot {
    /// Effective dimension of each row.
    pub dim: usize,
    /// True rows `h_i`, one per receiver.
    pub h: Vec<Vec2>,
    /// Estimated rows `h_hat_i`.
    pub h_hat: Vec<Vec2>,
    /// Estimation errors `h_tilde_i`.
    pub h_tilde: Vec<Vec2>,
    /// Error variance of this slot's draw.
    pub sigma2: f64,
}

/// Draws one i.i.d. channel slot for all K receivers.
///
/// The caller positions `rng` on the slot's own stream (see [`crate::rng`]);
/// entries are consumed row by row, estimate first, then error, so a fixed
/// stream yields a bit-identical slot on repeat calls.
pub fn sample_slot<R: Rng + ?Sized>(cfg: &SystemConfig, power: f64, rng: &mut R) -> ChannelSlot {
    let sigma2 = power.powf(-cfg.alpha);
    let m = cfg.dim();
    let mut h = Vec::with_capacity(cfg.users);
    let mut h_hat = Vec::with_capacity(cfg.users);
    let mut h_tilde = Vec::with_capacity(cfg.users);
    for _ in 0..cfg.users {
        let mut hat = ZERO_V2;
        let mut tilde = ZERO_V2;
        let mut row = ZERO_V2;
        for a in 0..m {
            hat[a] = complex_gaussian(rng, 1.0 - sigma2);
            tilde[a] = complex_gaussian(rng, sigma2);
            row[a] = hat[a] + tilde[a];
        }
        h.push(row);
        h_hat.push(hat);
        h_tilde.push(tilde);
    }
    ChannelSlot {
        dim: m,
        h,
        h_hat,
        h_tilde,
        sigma2,
    }
}
