//! Transmit-side scheme construction for both regimes.
//!
//! For `alpha <= 1/(K-1)` the superframe spans `2K-1` slots:
//!
//! * Phase I (slots 1..K): slot t carries a random-beamformed vector of two
//!   data symbols for message `W_{-t}` at power `P - P^alpha`, on top of K
//!   zero-forced streams at `P^alpha / K` each.
//! * Phase II (slots K+1..2K-1): the transmitter reconstructs from delayed
//!   CSI the interference `eta_t` each Phase-I vector caused at its excluded
//!   receiver, forms K-1 consecutive pairwise sums, and rebroadcasts one sum
//!   per slot at power `P - P^alpha`, again on top of K ZF streams.
//!
//! For `alpha > 1/(K-1)` a single slot carries K ZF streams at
//! `P^(1/(K-1))` each.
//!
//! Power conventions not pinned down elsewhere: the Phase-I vector's power
//! is split equally over its m components, and the Phase-II sum is divided
//! by its ensemble standard deviation `sqrt(2 (P - P^alpha))` before the
//! amplitude is applied, so the slot power constraint holds in expectation.

use crate::channel::SystemConfig;
use crate::cmat::{add_assign, mat_times_vec, row_times_mat, scale, Vec2, C64, ZERO_V2};
use crate::precoding::Beamformer;
use alloc::vec::Vec;
use core::fmt;
// Float math for no_std builds; shadowed by std's inherent methods in test builds.
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Rate splitting embedding retrospective interference alignment.
    RsRia,
    /// Pure ZF transmission.
    ZfOnly,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::RsRia => "rs_ria",
            Regime::ZfOnly => "zf_only",
        }
    }
}

/// Which phase a slot belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    One,
    Two,
    ZfOnly,
}

/// Identifier of one transmitted data symbol within a superframe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolId {
    /// Component `component` of the Phase-I vector of slot `slot` (message
    /// W_{-slot}).
    PhaseOneRd { slot: usize, component: usize },
    /// ZF stream for message W_{-user} in Phase-I slot `slot`.
    PhaseOneZf { slot: usize, user: usize },
    /// ZF stream for message W_{-user} in Phase-II slot `slot`.
    PhaseTwoZf { slot: usize, user: usize },
    /// The `index`-th pairwise sum `eta_index + eta_{index+1}`.
    OrderK { index: usize },
}

/// Resolved regime, slot schedule and per-stream power levels.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemePlan {
    pub regime: Regime,
    pub users: usize,
    /// Effective transmit dimension.
    pub dim: usize,
    /// Power budget P this plan was built for.
    pub power: f64,
    pub alpha: f64,
    /// 2K-1 in the rate-splitting regime, 1 in the ZF regime.
    pub slot_count: usize,
    /// `P - P^alpha` (0 in the ZF regime).
    pub rd_power: f64,
    /// `(1/K) P^alpha`, or `P^(1/(K-1))` in the ZF regime (possibly
    /// rescaled, see `zf_rescaled`).
    pub zf_power_per_stream: f64,
    /// Set when `K P^(1/(K-1))` exceeded P and the ZF amplitudes were
    /// uniformly rescaled to `P/K`; the power constraint is binding, and
    /// the rescale changes nothing asymptotically.
    pub zf_rescaled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeError {
    /// Symbol or beamformer counts disagree with the plan.
    DimensionMismatch,
    /// Operation called in the wrong regime.
    WrongRegime,
}

impl fmt::Display for SchemeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeError::DimensionMismatch => write!(f, "symbol/beamformer dimension mismatch"),
            SchemeError::WrongRegime => write!(f, "operation not defined for this regime"),
        }
    }
}

impl SchemePlan {
    pub fn phase_of_slot(&self, slot: usize) -> Phase {
        match self.regime {
            Regime::ZfOnly => Phase::ZfOnly,
            Regime::RsRia => {
                if slot < self.users {
                    Phase::One
                } else {
                    Phase::Two
                }
            }
        }
    }

    /// Per-component amplitude of the Phase-I vector.
    pub fn rd_component_amplitude(&self) -> f64 {
        (self.rd_power / self.dim as f64).sqrt()
    }

    /// Ensemble standard deviation of a pairwise eta sum. Each eta carries
    /// the full vector power `P - P^alpha` in expectation, and consecutive
    /// etas come from independent slots.
    pub fn combo_ensemble_std(&self) -> f64 {
        (2.0 * self.rd_power).sqrt()
    }

    /// Total allocated transmit power of one slot.
    pub fn allocated_slot_power(&self) -> f64 {
        match self.regime {
            Regime::RsRia => self.rd_power + self.users as f64 * self.zf_power_per_stream,
            Regime::ZfOnly => self.users as f64 * self.zf_power_per_stream,
        }
    }

    /// Every data-symbol identifier of one superframe.
    pub fn symbol_inventory(&self) -> Vec<SymbolId> {
        let k = self.users;
        let mut out = Vec::new();
        match self.regime {
            Regime::RsRia => {
                for slot in 0..k {
                    for component in 0..self.dim {
                        out.push(SymbolId::PhaseOneRd { slot, component });
                    }
                    for user in 0..k {
                        out.push(SymbolId::PhaseOneZf { slot, user });
                    }
                }
                for slot in k..2 * k - 1 {
                    out.push(SymbolId::OrderK { index: slot - k });
                    for user in 0..k {
                        out.push(SymbolId::PhaseTwoZf { slot, user });
                    }
                }
            }
            Regime::ZfOnly => {
                for user in 0..k {
                    out.push(SymbolId::PhaseOneZf { slot: 0, user });
                }
            }
        }
        out
    }
}

/// Selects the regime and fixes powers and the slot schedule for one power
/// point. The threshold boundary `alpha = 1/(K-1)` goes to the
/// rate-splitting regime; both sum-DoF branches agree there.
pub fn plan_superframe(cfg: &SystemConfig, power: f64) -> SchemePlan {
    let k = cfg.users;
    let kf = k as f64;
    let threshold = 1.0 / (kf - 1.0);
    if cfg.alpha <= threshold {
        let p_alpha = power.powf(cfg.alpha);
        SchemePlan {
            regime: Regime::RsRia,
            users: k,
            dim: cfg.dim(),
            power,
            alpha: cfg.alpha,
            slot_count: 2 * k - 1,
            rd_power: power - p_alpha,
            zf_power_per_stream: p_alpha / kf,
            zf_rescaled: false,
        }
    } else {
        let nominal = power.powf(1.0 / (kf - 1.0));
        let over_budget = kf * nominal > power;
        SchemePlan {
            regime: Regime::ZfOnly,
            users: k,
            dim: cfg.dim(),
            power,
            alpha: cfg.alpha,
            slot_count: 1,
            rd_power: 0.0,
            zf_power_per_stream: if over_budget { power / kf } else { nominal },
            zf_rescaled: over_budget,
        }
    }
}

/// Sum of the plan's ZF streams: `sum_i sqrt(q) p_i s_i`.
fn zf_layer(
    zf_symbols: &[C64],
    zf_beams: &[Beamformer],
    amplitude: f64,
    dim: usize,
) -> Result<Vec2, SchemeError> {
    if zf_symbols.len() != zf_beams.len() {
        return Err(SchemeError::DimensionMismatch);
    }
    let mut x = ZERO_V2;
    for (s, p) in zf_symbols.iter().zip(zf_beams) {
        if p.dim != dim {
            return Err(SchemeError::DimensionMismatch);
        }
        let v = p.vector();
        for i in 0..dim {
            x[i] += v[i] * (*s * amplitude);
        }
    }
    Ok(x)
}

/// Phase-I transmitted signal
/// `x = sqrt(rd_power/m) R s_rd + sum_i sqrt(q) p_i s_i`
/// for unit-variance symbols; the expected norm is exactly P.
pub fn build_phase1_signal(
    rd_symbols: &Vec2,
    zf_symbols: &[C64],
    rd_beam: &Beamformer,
    zf_beams: &[Beamformer],
    plan: &SchemePlan,
) -> Result<Vec2, SchemeError> {
    if plan.regime != Regime::RsRia {
        return Err(SchemeError::WrongRegime);
    }
    if rd_beam.cols != plan.dim || zf_symbols.len() != plan.users {
        return Err(SchemeError::DimensionMismatch);
    }
    let scaled = scale(rd_symbols, plan.rd_component_amplitude());
    let mut x = mat_times_vec(&rd_beam.matrix(), &scaled, plan.dim);
    let zf = zf_layer(
        zf_symbols,
        zf_beams,
        plan.zf_power_per_stream.sqrt(),
        plan.dim,
    )?;
    add_assign(&mut x, &zf);
    Ok(x)
}

/// The interference a Phase-I vector causes at its excluded receiver,
/// reconstructed from delayed CSI:
/// `eta_t = h_t^H(t) R(t) (a_rd s_rd)` with the allocated amplitude folded
/// in. The slot index convention (slot t carries the vector for W_{-t},
/// so eta_t is the slot-t quantity at Rx_t) is fixed here and only here.
pub fn reconstruct_eta(
    true_row: &Vec2,
    rd_beam: &Beamformer,
    rd_symbols: &Vec2,
    plan: &SchemePlan,
) -> C64 {
    let row = row_times_mat(true_row, &rd_beam.matrix(), plan.dim);
    let mut eta = C64::new(0.0, 0.0);
    for i in 0..plan.dim {
        eta += row[i] * rd_symbols[i];
    }
    eta * plan.rd_component_amplitude()
}

/// The K eta values of one superframe and their K-1 consecutive sums.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaRecord {
    pub eta: Vec<C64>,
    /// `combos[j] = eta[j] + eta[j+1]`.
    pub combos: Vec<C64>,
}

/// Order-K symbols: consecutive pairwise sums of the reconstructed etas.
pub fn make_order_k_symbols(eta: &[C64]) -> EtaRecord {
    let combos = eta.windows(2).map(|w| w[0] + w[1]).collect();
    EtaRecord {
        eta: eta.to_vec(),
        combos,
    }
}

/// Phase-II transmitted signal
/// `x = sqrt(rd_power) r (combo / std) + sum_i sqrt(q) p_i s_i`,
/// with the pairwise sum normalized by its ensemble standard deviation
/// before the amplitude is applied.
pub fn build_phase2_signal(
    combo: C64,
    zf_symbols: &[C64],
    rd_beam: &Beamformer,
    zf_beams: &[Beamformer],
    plan: &SchemePlan,
) -> Result<Vec2, SchemeError> {
    if plan.regime != Regime::RsRia {
        return Err(SchemeError::WrongRegime);
    }
    if rd_beam.cols != 1 || rd_beam.dim != plan.dim || zf_symbols.len() != plan.users {
        return Err(SchemeError::DimensionMismatch);
    }
    let mut x = ZERO_V2;
    if plan.rd_power > 0.0 {
        let amp = plan.rd_power.sqrt() / plan.combo_ensemble_std();
        let r = rd_beam.vector();
        for i in 0..plan.dim {
            x[i] = r[i] * (combo * amp);
        }
    }
    let zf = zf_layer(
        zf_symbols,
        zf_beams,
        plan.zf_power_per_stream.sqrt(),
        plan.dim,
    )?;
    add_assign(&mut x, &zf);
    Ok(x)
}

/// Single-slot ZF-only signal `x = sum_i sqrt(q) p_i s_i`. The per-stream
/// power in `plan` already reflects any budget rescale; `plan.zf_rescaled`
/// reports that the `K P^(1/(K-1)) > P` path triggered.
pub fn build_zf_only_signal(
    zf_symbols: &[C64],
    zf_beams: &[Beamformer],
    plan: &SchemePlan,
) -> Result<Vec2, SchemeError> {
    if plan.regime != Regime::ZfOnly {
        return Err(SchemeError::WrongRegime);
    }
    if zf_symbols.len() != plan.users {
        return Err(SchemeError::DimensionMismatch);
    }
    zf_layer(
        zf_symbols,
        zf_beams,
        plan.zf_power_per_stream.sqrt(),
        plan.dim,
    )
}
