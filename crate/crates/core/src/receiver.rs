//! Receiver-side processing: observations, power-level decomposition, the
//! layered decode chain, and per-message rate reports.
//!
//! Decoding order in the rate-splitting regime follows the power levels:
//! the full-power layer (Phase-I vector / Phase-II pairwise sum) is decoded
//! first treating the ZF layer as noise, then subtracted; the ZF streams are
//! processed next; after Phase II each receiver rebuilds all eta values from
//! its own one plus the K-1 sums and solves a stacked 2x2 system per
//! Phase-I vector.
//!
//! Two rate accountings are reported. In `power_level` mode every ZF stream
//! is booked at the log of its own SINR with same-level co-streams excluded,
//! mirroring the per-term power-level diagrams; the booking is per receiver,
//! so a stream's reported rate is the mean across its intended receivers.
//! In `joint_mac` mode the streams co-received at one observation share its
//! single mutual-information budget and a stream's deliverable rate is the
//! minimum over its intended receivers. The two modes coincide at K = 2,
//! where every stream has exactly one intended receiver.
//!
//! The full-power layer's deliverable bits are capped by what is left of a
//! receiver's per-observation budget after its booked ZF claims; each
//! Phase-I vector's symbols are additionally capped by the delivery budget
//! of the pairwise sums its eta recovery walks through. Reports carry both
//! the capped and the uncapped vector rates.

use crate::channel::Accounting;
use crate::cmat::{cdot, cond2, inv2, row_times_mat, Mat2, Vec2, C64};
use crate::fit::linfit;
use crate::precoding::Beamformer;
use crate::scheme::{Phase, Regime, SchemePlan};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
// Float math for no_std builds; shadowed by std's inherent methods in test builds.
#[allow(unused_imports)]
use num_traits::Float;

/// Gain threshold below which an order-K decode is flagged as an outage.
pub const COMBO_OUTAGE_GAIN: f64 = 1e-6;
/// Condition-number threshold flagging a near-singular stacked solve.
pub const STACK_CONDITION_LIMIT: f64 = 1e6;

/// One received scalar: `y = h^H x + z`.
pub fn receive(x: &Vec2, h_row: &Vec2, noise: C64, dim: usize) -> C64 {
    cdot(h_row, x, dim) + noise
}

// ---------------------------------------------------------------------------
// Signal-level traces and per-term power decomposition
// ---------------------------------------------------------------------------

/// Additive decomposition of one observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxTerms {
    /// Full-power layer (Phase-I vector or Phase-II sum); zero in ZF-only.
    pub rd: C64,
    /// Own ZF stream through the estimation error (noise-floor term).
    pub own_zf: C64,
    /// All other ZF streams.
    pub cross_zf: C64,
    pub noise: C64,
}

impl RxTerms {
    pub fn observation(&self) -> C64 {
        self.rd + self.own_zf + self.cross_zf + self.noise
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotTrace {
    pub phase: Phase,
    /// One decomposition per receiver.
    pub terms: Vec<RxTerms>,
}

/// Signal-level trace of one superframe.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceptionTrace {
    pub slots: Vec<SlotTrace>,
}

/// Mean linear power of each term over a batch of traces.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TermPowers {
    pub rd: f64,
    pub own_zf: f64,
    pub cross_zf: f64,
    pub noise: f64,
}

impl TermPowers {
    pub fn mean_of(traces: &[ReceptionTrace]) -> TermPowers {
        let mut acc = TermPowers::default();
        let mut n = 0usize;
        for trace in traces {
            for slot in &trace.slots {
                for t in &slot.terms {
                    acc.rd += t.rd.norm_sqr();
                    acc.own_zf += t.own_zf.norm_sqr();
                    acc.cross_zf += t.cross_zf.norm_sqr();
                    acc.noise += t.noise.norm_sqr();
                    n += 1;
                }
            }
        }
        let n = n.max(1) as f64;
        TermPowers {
            rd: acc.rd / n,
            own_zf: acc.own_zf / n,
            cross_zf: acc.cross_zf / n,
            noise: acc.noise / n,
        }
    }
}

/// Fitted log-log slope of each term's received power against P.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermSlopes {
    /// `None` when the layer carries no power anywhere on the grid
    /// (ZF-only regime, or alpha = 1).
    pub rd: Option<f64>,
    pub own_zf: f64,
    pub cross_zf: f64,
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReceiverError {
    /// Power-level regression needs at least 4 grid points.
    InsufficientGrid(usize),
}

impl fmt::Display for ReceiverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReceiverError::InsufficientGrid(n) => {
                write!(f, "power-level decomposition needs >= 4 power points, got {n}")
            }
        }
    }
}

/// Least-squares exponent of each term's mean power against P, from
/// `(P, mean term powers)` pairs across the grid.
pub fn decompose_power_levels(
    points: &[(f64, TermPowers)],
) -> Result<TermSlopes, ReceiverError> {
    if points.len() < 4 {
        return Err(ReceiverError::InsufficientGrid(points.len()));
    }
    let lp: Vec<f64> = points.iter().map(|(p, _)| p.ln()).collect();
    let slope_of = |extract: fn(&TermPowers) -> f64| -> Option<f64> {
        let ys: Vec<f64> = points.iter().map(|(_, t)| extract(t)).collect();
        if ys.iter().any(|&y| y <= 0.0) {
            return None;
        }
        let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        Some(linfit(&lp, &ly).0)
    };
    Ok(TermSlopes {
        rd: slope_of(|t| t.rd),
        own_zf: slope_of(|t| t.own_zf).unwrap_or(0.0),
        cross_zf: slope_of(|t| t.cross_zf).unwrap_or(0.0),
        noise: slope_of(|t| t.noise).unwrap_or(0.0),
    })
}

// ---------------------------------------------------------------------------
// Analytic per-slot gains
// ---------------------------------------------------------------------------

/// Full-power-layer gains of one slot, per receiver.
#[derive(Debug, Clone, PartialEq)]
pub enum RdGains {
    /// Phase I: rows `h_j^H R(t)`.
    Rows(Vec<Vec2>),
    /// Phase II: scalars `h_j^H r(t)`.
    Scalars(Vec<C64>),
    /// ZF-only slot.
    None,
}

/// Everything the rate computation needs from one slot realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotGains {
    pub phase: Phase,
    pub rd: RdGains,
    /// `zf[j][i] = h_j^H p_i(t)` (true channel row against stream i's beam).
    pub zf: Vec<Vec<C64>>,
}

/// Analytic view of one simulated superframe.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperframeGains {
    pub plan: SchemePlan,
    pub slots: Vec<SlotGains>,
}

impl SlotGains {
    /// Received power of the full-power layer at receiver `j`.
    fn rd_power_at(&self, plan: &SchemePlan, j: usize) -> f64 {
        match &self.rd {
            RdGains::Rows(rows) => {
                crate::cmat::norm_sq(&rows[j], plan.dim) * plan.rd_power / plan.dim as f64
            }
            RdGains::Scalars(g) => g[j].norm_sqr() * plan.rd_power,
            RdGains::None => 0.0,
        }
    }

    /// Total received signal power at receiver `j` (noise excluded).
    fn total_power_at(&self, plan: &SchemePlan, j: usize) -> f64 {
        let q = plan.zf_power_per_stream;
        let zf: f64 = self.zf[j].iter().map(|g| g.norm_sqr() * q).sum();
        self.rd_power_at(plan, j) + zf
    }
}

// ---------------------------------------------------------------------------
// ZF stream rates
// ---------------------------------------------------------------------------

/// Per-slot ZF stream rates under one accounting mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ZfSlotRates {
    /// `local[j][i]`: bits booked for stream i at receiver j (0 for i = j).
    pub local: Vec<Vec<f64>>,
    /// `deliverable[i]`: the stream's reported rate — mean of `local[j][i]`
    /// over intended receivers in power-level accounting, min in joint-MAC.
    pub deliverable: Vec<f64>,
    /// `claimed[j]`: total ZF bits booked at receiver j, used for the
    /// budget remainder of the full-power layer.
    pub claimed: Vec<f64>,
}

/// Books the slot's ZF streams at every receiver.
///
/// The full-power layer sits above the ZF level and is treated as removed;
/// the only interference left is the receiver's own stream leaking through
/// the estimation error, plus noise.
pub fn zf_stream_rates(gains: &SlotGains, plan: &SchemePlan, mode: Accounting) -> ZfSlotRates {
    let k = plan.users;
    let q = plan.zf_power_per_stream;
    let mut local = vec![vec![0.0; k]; k];
    let mut claimed = vec![0.0; k];
    for j in 0..k {
        let own = gains.zf[j][j].norm_sqr() * q;
        match mode {
            Accounting::PowerLevel => {
                for i in 0..k {
                    if i == j {
                        continue;
                    }
                    let s = gains.zf[j][i].norm_sqr() * q;
                    local[j][i] = (1.0 + s / (1.0 + own)).log2();
                    claimed[j] += local[j][i];
                }
            }
            Accounting::JointMac => {
                let s: f64 = (0..k)
                    .filter(|&i| i != j)
                    .map(|i| gains.zf[j][i].norm_sqr() * q)
                    .sum();
                let cap = (1.0 + s / (1.0 + own)).log2();
                let share = cap / (k - 1) as f64;
                for i in 0..k {
                    if i != j {
                        local[j][i] = share;
                    }
                }
                claimed[j] = cap;
            }
        }
    }
    let deliverable = (0..k)
        .map(|i| {
            let rates = (0..k).filter(|&j| j != i).map(|j| local[j][i]);
            match mode {
                Accounting::PowerLevel => rates.sum::<f64>() / (k - 1) as f64,
                Accounting::JointMac => rates.fold(f64::INFINITY, f64::min),
            }
        })
        .collect();
    ZfSlotRates {
        local,
        deliverable,
        claimed,
    }
}

// ---------------------------------------------------------------------------
// Order-K (pairwise-sum) decoding
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComboDecode {
    /// Matched-filter estimate of the pairwise sum, in eta units.
    pub estimate: C64,
    pub sinr: f64,
    /// `log2(1 + sinr)`; the stream's deliverable rate is the minimum of
    /// this over all K receivers.
    pub rate: f64,
    /// Set when `|h^H r|^2` fell below [`COMBO_OUTAGE_GAIN`]; recorded and
    /// the trial retained.
    pub outage: bool,
}

/// Decodes the Phase-II full-power layer at one receiver, treating the ZF
/// layer as noise.
pub fn decode_order_k(
    y: C64,
    h_row: &Vec2,
    r_beam: &Beamformer,
    zf_beams: &[Beamformer],
    plan: &SchemePlan,
) -> ComboDecode {
    let m = plan.dim;
    let g = cdot(h_row, r_beam.vector(), m);
    let interference: f64 = zf_beams
        .iter()
        .map(|p| cdot(h_row, p.vector(), m).norm_sqr() * plan.zf_power_per_stream)
        .sum();
    let g_sq = g.norm_sqr();
    let sinr = g_sq * plan.rd_power / (1.0 + interference);
    let estimate = if plan.rd_power > 0.0 && g_sq > 0.0 {
        y * plan.combo_ensemble_std() / (g * plan.rd_power.sqrt())
    } else {
        C64::new(0.0, 0.0)
    };
    ComboDecode {
        estimate,
        sinr,
        rate: (1.0 + sinr).log2(),
        outage: g_sq < COMBO_OUTAGE_GAIN,
    }
}

/// Recovers all K eta values from one known eta plus the K-1 consecutive
/// pairwise sums, by forward/backward substitution. The system is a unit
/// bidiagonal chain, so the solve is exact on noiseless inputs for any
/// starting index.
pub fn solve_eta_system(own_eta: C64, own_index: usize, combos: &[C64]) -> Vec<C64> {
    let k = combos.len() + 1;
    debug_assert!(own_index < k);
    let mut eta = vec![C64::new(0.0, 0.0); k];
    eta[own_index] = own_eta;
    for i in own_index + 1..k {
        eta[i] = combos[i - 1] - eta[i - 1];
    }
    for i in (0..own_index).rev() {
        eta[i] = combos[i] - eta[i + 1];
    }
    eta
}

// ---------------------------------------------------------------------------
// Stacked decoding of one Phase-I vector
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPairDecode {
    /// Estimates of the two unit-variance symbols.
    pub symbols: Vec2,
    /// Effective per-symbol SINR from the error covariance propagated
    /// through the stack inverse.
    pub sinr: [f64; 2],
    /// `log2(1 + sinr)` per symbol.
    pub rate_uncapped: [f64; 2],
    /// Same, after the delivery cap.
    pub rate: [f64; 2],
    /// Stack condition number exceeded [`STACK_CONDITION_LIMIT`].
    pub near_singular: bool,
}

/// Solves the stacked system for one Phase-I vector at one receiver:
///
/// ```text
/// [ h_j^H R ]            [ own_obs ]
/// [ h_t^H R ] a s_rd  =  [ eta_t   ]  + e,
/// ```
///
/// where `a` is the per-component amplitude and the two observation errors
/// have the given powers (ZF residual plus, for the second row, the
/// accumulated eta-chain error). `delivery_cap` bounds each symbol's
/// deliverable bits by the eta-delivery budget; pass `f64::INFINITY` to
/// disable it.
#[allow(clippy::too_many_arguments)]
pub fn decode_rd_pair(
    own_obs: C64,
    eta: C64,
    rd_beam: &Beamformer,
    h_j_row: &Vec2,
    h_t_row: &Vec2,
    phi_distortion: f64,
    eta_distortion: f64,
    delivery_cap: f64,
    plan: &SchemePlan,
) -> RdPairDecode {
    let zero = RdPairDecode {
        symbols: [C64::new(0.0, 0.0); 2],
        sinr: [0.0; 2],
        rate_uncapped: [0.0; 2],
        rate: [0.0; 2],
        near_singular: false,
    };
    if plan.rd_power <= 0.0 {
        return zero;
    }
    let m = plan.dim;
    let a = plan.rd_component_amplitude();
    let r = rd_beam.matrix();
    let g0 = row_times_mat(h_j_row, &r, m);
    let g1 = row_times_mat(h_t_row, &r, m);
    let stack: Mat2 = [[g0[0] * a, g0[1] * a], [g1[0] * a, g1[1] * a]];
    if cond2(&stack) > STACK_CONDITION_LIMIT {
        return RdPairDecode {
            near_singular: true,
            ..zero
        };
    }
    let inv = match inv2(&stack) {
        Some(inv) => inv,
        None => {
            return RdPairDecode {
                near_singular: true,
                ..zero
            }
        }
    };
    let obs = [own_obs, eta];
    let symbols = [
        inv[0][0] * obs[0] + inv[0][1] * obs[1],
        inv[1][0] * obs[0] + inv[1][1] * obs[1],
    ];
    let dist = [phi_distortion, eta_distortion];
    let mut sinr = [0.0; 2];
    let mut rate_uncapped = [0.0; 2];
    let mut rate = [0.0; 2];
    for s in 0..2 {
        // Error covariance diagonal of inv * diag(dist) * inv^H.
        let err = inv[s][0].norm_sqr() * dist[0] + inv[s][1].norm_sqr() * dist[1];
        sinr[s] = if err > 0.0 { 1.0 / err } else { f64::INFINITY };
        rate_uncapped[s] = (1.0 + sinr[s]).log2();
        rate[s] = rate_uncapped[s].min(delivery_cap).max(0.0);
    }
    RdPairDecode {
        symbols,
        sinr,
        rate_uncapped,
        rate,
        near_singular: false,
    }
}

// ---------------------------------------------------------------------------
// Superframe rate report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OutageCounts {
    /// Order-K decodes with near-zero beam gain.
    pub combo_low_gain: usize,
    /// Near-singular stacked solves.
    pub rd_near_singular: usize,
}

/// Per-message rates of one superframe, in bits per channel use
/// (totals divided by the slot count).
#[derive(Debug, Clone, PartialEq)]
pub struct MessageRate {
    /// Message index i of `W_{-i}`, 0-based.
    pub message: usize,
    /// Vector (Phase-I pair) contribution after the delivery cap.
    pub rd_pair: f64,
    /// Same without the cap, reported alongside.
    pub rd_pair_uncapped: f64,
    pub zf_phase1: f64,
    pub zf_phase2: f64,
}

impl MessageRate {
    pub fn total(&self) -> f64 {
        self.rd_pair + self.zf_phase1 + self.zf_phase2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub mode: Accounting,
    pub messages: Vec<MessageRate>,
    pub outages: OutageCounts,
}

impl RateReport {
    pub fn sum_rate(&self) -> f64 {
        self.messages.iter().map(|m| m.total()).sum()
    }

    pub fn sum_rate_uncapped(&self) -> f64 {
        self.messages
            .iter()
            .map(|m| m.rd_pair_uncapped + m.zf_phase1 + m.zf_phase2)
            .sum()
    }
}

/// Books one simulated superframe under the given accounting mode.
pub fn superframe_rate_report(frame: &SuperframeGains, mode: Accounting) -> RateReport {
    match frame.plan.regime {
        Regime::ZfOnly => zf_only_report(frame, mode),
        Regime::RsRia => rs_ria_report(frame, mode),
    }
}

fn zf_only_report(frame: &SuperframeGains, mode: Accounting) -> RateReport {
    let plan = &frame.plan;
    let rates = zf_stream_rates(&frame.slots[0], plan, mode);
    let messages = (0..plan.users)
        .map(|i| MessageRate {
            message: i,
            rd_pair: 0.0,
            rd_pair_uncapped: 0.0,
            zf_phase1: rates.deliverable[i],
            zf_phase2: 0.0,
        })
        .collect();
    RateReport {
        mode,
        messages,
        outages: OutageCounts::default(),
    }
}

fn rs_ria_report(frame: &SuperframeGains, mode: Accounting) -> RateReport {
    let plan = &frame.plan;
    let k = plan.users;
    let q = plan.zf_power_per_stream;
    let slots = 2 * k - 1;
    debug_assert_eq!(frame.slots.len(), slots);
    let mut outages = OutageCounts::default();

    // ZF layer of every slot, plus each receiver's booked claims.
    let zf: Vec<ZfSlotRates> = frame
        .slots
        .iter()
        .map(|s| zf_stream_rates(s, plan, mode))
        .collect();

    // Budget remainder of receiver j in slot s: what its observation can
    // still deliver for the full-power layer after the booked ZF claims.
    let remainder = |s: usize, j: usize| -> f64 {
        let budget = (1.0 + frame.slots[s].total_power_at(plan, j)).log2();
        (budget - zf[s].claimed[j]).max(0.0)
    };

    // Phase II: per pairwise sum, the delivery budget (min over receivers
    // of raw rate and budget remainder) and the per-receiver estimate
    // error power for the eta chain.
    let mut combo_delivery = vec![0.0; k - 1];
    let mut combo_err = vec![vec![0.0; k]; k - 1];
    for c in 0..k - 1 {
        let s = k + c;
        let gains = match &frame.slots[s].rd {
            RdGains::Scalars(g) => g,
            _ => unreachable!("phase-II slot carries scalar gains"),
        };
        let mut delivery = f64::INFINITY;
        for j in 0..k {
            let g_sq = gains[j].norm_sqr();
            let interference: f64 = frame.slots[s].zf[j].iter().map(|g| g.norm_sqr() * q).sum();
            let raw = (1.0 + g_sq * plan.rd_power / (1.0 + interference)).log2();
            delivery = delivery.min(raw.min(remainder(s, j)));
            if g_sq < COMBO_OUTAGE_GAIN {
                outages.combo_low_gain += 1;
            }
            combo_err[c][j] = if plan.rd_power > 0.0 && g_sq > 0.0 {
                2.0 * (1.0 + interference) / g_sq
            } else {
                f64::INFINITY
            };
        }
        combo_delivery[c] = delivery;
    }

    // Distortion of receiver j's own eta: its slot-j observation carries
    // the slot-j ZF layer (not yet decodable there) plus noise.
    let own_eta_distortion: Vec<f64> = (0..k)
        .map(|j| {
            1.0 + frame.slots[j].zf[j]
                .iter()
                .map(|g| g.norm_sqr() * q)
                .sum::<f64>()
        })
        .collect();

    let mut messages = Vec::with_capacity(k);
    for t in 0..k {
        // Message W_{-t}: its vector was sent in slot t; every receiver
        // j != t decodes it from its own slot-t observation plus the
        // recovered eta_t.
        let rows = match &frame.slots[t].rd {
            RdGains::Rows(rows) => rows,
            _ => unreachable!("phase-I slot carries row gains"),
        };
        let mut per_symbol_capped = [f64::INFINITY; 2];
        let mut per_symbol_uncapped = [f64::INFINITY; 2];
        for j in 0..k {
            if j == t {
                continue;
            }
            let phi_distortion = 1.0
                + frame.slots[t].zf[j]
                    .iter()
                    .map(|g| g.norm_sqr() * q)
                    .sum::<f64>();
            // Eta chain from j to t: one pairwise sum per step, each of
            // which must carry the recovered eta's bits, so the delivery
            // budget is the worst sum on the path.
            let path = if t > j { j..t } else { t..j };
            let mut eta_distortion = own_eta_distortion[j];
            let mut chain_delivery = f64::INFINITY;
            for c in path {
                eta_distortion += combo_err[c][j];
                chain_delivery = chain_delivery.min(combo_delivery[c]);
            }
            let cap = chain_delivery;
            let decode = stack_rates(
                &rows[j],
                &rows[t],
                phi_distortion,
                eta_distortion,
                cap,
                plan,
            );
            if decode.near_singular {
                outages.rd_near_singular += 1;
            }
            for s in 0..2 {
                per_symbol_capped[s] = per_symbol_capped[s].min(decode.rate[s]);
                per_symbol_uncapped[s] = per_symbol_uncapped[s].min(decode.rate_uncapped[s]);
            }
        }
        let zf1: f64 = (0..k).map(|s| zf[s].deliverable[t]).sum();
        let zf2: f64 = (k..slots).map(|s| zf[s].deliverable[t]).sum();
        let norm = slots as f64;
        messages.push(MessageRate {
            message: t,
            rd_pair: (per_symbol_capped[0] + per_symbol_capped[1]) / norm,
            rd_pair_uncapped: (per_symbol_uncapped[0] + per_symbol_uncapped[1]) / norm,
            zf_phase1: zf1 / norm,
            zf_phase2: zf2 / norm,
        });
    }
    RateReport {
        mode,
        messages,
        outages,
    }
}

/// Rate-only form of [`decode_rd_pair`] working from precomputed rows.
fn stack_rates(
    row_j: &Vec2,
    row_t: &Vec2,
    phi_distortion: f64,
    eta_distortion: f64,
    delivery_cap: f64,
    plan: &SchemePlan,
) -> RdPairDecode {
    let zero = RdPairDecode {
        symbols: [C64::new(0.0, 0.0); 2],
        sinr: [0.0; 2],
        rate_uncapped: [0.0; 2],
        rate: [0.0; 2],
        near_singular: false,
    };
    if plan.rd_power <= 0.0 {
        return zero;
    }
    let a = plan.rd_component_amplitude();
    let stack: Mat2 = [
        [row_j[0] * a, row_j[1] * a],
        [row_t[0] * a, row_t[1] * a],
    ];
    if cond2(&stack) > STACK_CONDITION_LIMIT {
        return RdPairDecode {
            near_singular: true,
            ..zero
        };
    }
    let inv = match inv2(&stack) {
        Some(inv) => inv,
        None => {
            return RdPairDecode {
                near_singular: true,
                ..zero
            }
        }
    };
    let dist = [phi_distortion, eta_distortion];
    let mut out = zero;
    for s in 0..2 {
        let err = inv[s][0].norm_sqr() * dist[0] + inv[s][1].norm_sqr() * dist[1];
        out.sinr[s] = if err > 0.0 { 1.0 / err } else { f64::INFINITY };
        out.rate_uncapped[s] = (1.0 + out.sinr[s]).log2();
        out.rate[s] = out.rate_uncapped[s].min(delivery_cap).max(0.0);
    }
    out
}
