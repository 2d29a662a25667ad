//! Superframe assembly: draws channels and beamformers, exposes the
//! analytic gain view consumed by the rate report, and builds signal-level
//! traces for power-decomposition runs.
//!
//! Each (power index, trial) pair is one independent unit of work whose
//! randomness is fully determined by `(seed, power index, trial, slot)`
//! stream addresses, so sweeps can be parallelized by the caller and still
//! reduce to bit-identical results in trial order.

use crate::channel::{sample_slot, ChannelSlot, SystemConfig};
use crate::cmat::{cdot, mat_times_vec, row_times_mat, scale, Vec2, C64, ZERO_V2};
use crate::precoding::{
    random_beam_vector, random_beamformer_matrix, zf_beamformer, Beamformer, PrecodingError,
};
use crate::receiver::{
    superframe_rate_report, OutageCounts, RateReport, RdGains, ReceptionTrace, RxTerms,
    SlotGains, SlotTrace, SuperframeGains, TermPowers,
};
use crate::rng::{complex_gaussian, stream_rng, StreamDomain};
use crate::scheme::{
    build_phase1_signal, build_phase2_signal, build_zf_only_signal, make_order_k_symbols,
    plan_superframe, reconstruct_eta, EtaRecord, Phase, Regime, SchemePlan,
};
use alloc::vec::Vec;
use core::fmt;
// Float math for no_std builds; shadowed by std's inherent methods in test builds.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    /// The transmission schemes need effective dimension 2; analysis-side
    /// formulas cover M = 1, the simulator does not.
    DimensionTooSmall,
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::DimensionTooSmall => {
                write!(f, "simulation requires at least 2 transmit antennas")
            }
        }
    }
}

/// One slot's channel realization and the beams built on its estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotRealization {
    pub channel: ChannelSlot,
    /// Random matrix in Phase I, random vector in Phase II, absent in the
    /// ZF-only regime.
    pub rd_beam: Option<Beamformer>,
    /// One ZF beam per user, built on that user's estimated row.
    pub zf_beams: Vec<Beamformer>,
}

/// A full superframe realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Superframe {
    pub plan: SchemePlan,
    pub slots: Vec<SlotRealization>,
}

/// ZF beam against an estimated row, falling back to a random beam when the
/// estimate is degenerate (alpha = 0 makes every estimate exactly zero, and
/// the nulling constraint is then vacuously satisfied by any unit vector).
fn zf_or_random<R: Rng + ?Sized>(
    h_hat_row: &Vec2,
    dim: usize,
    rng: &mut R,
) -> Result<Beamformer, SimError> {
    match zf_beamformer(h_hat_row, dim) {
        Ok(beam) => Ok(beam),
        Err(PrecodingError::DegenerateEstimate) => Ok(random_beam_vector(dim, rng)),
        Err(PrecodingError::DimensionTooSmall) => Err(SimError::DimensionTooSmall),
    }
}

/// Draws all channels and beamformers of one superframe.
pub fn simulate_superframe(
    cfg: &SystemConfig,
    power: f64,
    power_index: usize,
    trial: usize,
) -> Result<Superframe, SimError> {
    if cfg.dim() < 2 {
        return Err(SimError::DimensionTooSmall);
    }
    let plan = plan_superframe(cfg, power);
    let mut slots = Vec::with_capacity(plan.slot_count);
    for slot in 0..plan.slot_count {
        let mut rng = stream_rng(cfg.seed, StreamDomain::SlotChannel, power_index, trial, slot);
        let channel = sample_slot(cfg, power, &mut rng);
        let rd_beam = match plan.phase_of_slot(slot) {
            Phase::One => Some(random_beamformer_matrix(plan.dim, &mut rng)),
            Phase::Two => Some(random_beam_vector(plan.dim, &mut rng)),
            Phase::ZfOnly => None,
        };
        let zf_beams = channel
            .h_hat
            .iter()
            .map(|row| zf_or_random(row, plan.dim, &mut rng))
            .collect::<Result<Vec<_>, _>>()?;
        slots.push(SlotRealization {
            channel,
            rd_beam,
            zf_beams,
        });
    }
    Ok(Superframe { plan, slots })
}

/// Analytic gain view of a superframe.
pub fn gains(frame: &Superframe) -> SuperframeGains {
    let plan = &frame.plan;
    let slots = frame
        .slots
        .iter()
        .enumerate()
        .map(|(s, slot)| {
            let phase = plan.phase_of_slot(s);
            let rd = match (phase, &slot.rd_beam) {
                (Phase::One, Some(beam)) => {
                    let mat = beam.matrix();
                    RdGains::Rows(
                        slot.channel
                            .h
                            .iter()
                            .map(|h| row_times_mat(h, &mat, plan.dim))
                            .collect(),
                    )
                }
                (Phase::Two, Some(beam)) => RdGains::Scalars(
                    slot.channel
                        .h
                        .iter()
                        .map(|h| cdot(h, beam.vector(), plan.dim))
                        .collect(),
                ),
                _ => RdGains::None,
            };
            let zf = slot
                .channel
                .h
                .iter()
                .map(|h| {
                    slot.zf_beams
                        .iter()
                        .map(|p| cdot(h, p.vector(), plan.dim))
                        .collect()
                })
                .collect();
            SlotGains { phase, rd, zf }
        })
        .collect();
    SuperframeGains {
        plan: plan.clone(),
        slots,
    }
}

/// Simulates one trial and books it under the given accounting mode.
/// This is the unit of parallel work for rate sweeps.
pub fn trial_report(
    cfg: &SystemConfig,
    power: f64,
    power_index: usize,
    trial: usize,
) -> Result<RateReport, SimError> {
    let frame = simulate_superframe(cfg, power, power_index, trial)?;
    Ok(superframe_rate_report(&gains(&frame), cfg.accounting))
}

// ---------------------------------------------------------------------------
// Signal-level traces
// ---------------------------------------------------------------------------

/// A superframe's transmitted symbols and received decompositions.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTrace {
    pub reception: ReceptionTrace,
    /// Unit-variance Phase-I vector symbols, one pair per Phase-I slot.
    pub rd_symbols: Vec<Vec2>,
    /// Unit-variance ZF symbols per slot.
    pub zf_symbols: Vec<Vec<C64>>,
    /// Reconstructed interference values and their pairwise sums
    /// (rate-splitting regime only).
    pub etas: Option<EtaRecord>,
}

/// Draws symbols (and optionally noise) and builds the slot-by-slot
/// received-signal decomposition for one superframe realization.
///
/// With `sample_noise = false` the noise terms are exactly zero, which the
/// end-to-end eta consistency checks rely on; power-level runs sample it.
pub fn build_trace(
    frame: &Superframe,
    cfg: &SystemConfig,
    power_index: usize,
    trial: usize,
    sample_noise: bool,
) -> FrameTrace {
    let plan = &frame.plan;
    let k = plan.users;
    let m = plan.dim;

    let mut rd_symbols: Vec<Vec2> = Vec::new();
    let mut zf_symbols: Vec<Vec<C64>> = Vec::new();
    let mut noises: Vec<Vec<C64>> = Vec::new();
    for slot in 0..plan.slot_count {
        let mut rng = stream_rng(cfg.seed, StreamDomain::SlotSymbols, power_index, trial, slot);
        if plan.phase_of_slot(slot) == Phase::One {
            let mut s = ZERO_V2;
            for e in s.iter_mut().take(m) {
                *e = complex_gaussian(&mut rng, 1.0);
            }
            rd_symbols.push(s);
        }
        zf_symbols.push((0..k).map(|_| complex_gaussian(&mut rng, 1.0)).collect());
        noises.push(
            (0..k)
                .map(|_| {
                    if sample_noise {
                        complex_gaussian(&mut rng, 1.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect(),
        );
    }

    // Transmitter-side eta reconstruction from delayed CSI.
    let etas = if plan.regime == Regime::RsRia {
        let eta: Vec<C64> = (0..k)
            .map(|t| {
                reconstruct_eta(
                    &frame.slots[t].channel.h[t],
                    frame.slots[t].rd_beam.as_ref().unwrap(),
                    &rd_symbols[t],
                    plan,
                )
            })
            .collect();
        Some(make_order_k_symbols(&eta))
    } else {
        None
    };

    let mut slots = Vec::with_capacity(plan.slot_count);
    for (s, slot) in frame.slots.iter().enumerate() {
        let phase = plan.phase_of_slot(s);
        // Full-power layer of this slot, on its own.
        let rd_part: Vec2 = match phase {
            Phase::One => {
                let beam = slot.rd_beam.as_ref().unwrap();
                mat_times_vec(
                    &beam.matrix(),
                    &scale(&rd_symbols[s], plan.rd_component_amplitude()),
                    m,
                )
            }
            Phase::Two => {
                let beam = slot.rd_beam.as_ref().unwrap();
                let combo = etas.as_ref().unwrap().combos[s - k];
                if plan.rd_power > 0.0 {
                    let amp = plan.rd_power.sqrt() / plan.combo_ensemble_std();
                    let r = beam.vector();
                    [r[0] * (combo * amp), r[1] * (combo * amp)]
                } else {
                    ZERO_V2
                }
            }
            Phase::ZfOnly => ZERO_V2,
        };
        let zf_amp = plan.zf_power_per_stream.sqrt();
        let terms = (0..k)
            .map(|j| {
                let h = &slot.channel.h[j];
                let own = cdot(h, slot.zf_beams[j].vector(), m) * (zf_symbols[s][j] * zf_amp);
                let mut cross = C64::new(0.0, 0.0);
                for i in 0..k {
                    if i != j {
                        cross +=
                            cdot(h, slot.zf_beams[i].vector(), m) * (zf_symbols[s][i] * zf_amp);
                    }
                }
                RxTerms {
                    rd: cdot(h, &rd_part, m),
                    own_zf: own,
                    cross_zf: cross,
                    noise: noises[s][j],
                }
            })
            .collect();
        slots.push(SlotTrace { phase, terms });
    }

    FrameTrace {
        reception: ReceptionTrace { slots },
        rd_symbols,
        zf_symbols,
        etas,
    }
}

/// Rebuilds each slot's transmitted signal through the scheme builders;
/// used to check that the trace decomposition matches the actual signal.
pub fn rebuild_signals(frame: &Superframe, trace: &FrameTrace) -> Vec<Vec2> {
    let plan = &frame.plan;
    let k = plan.users;
    frame
        .slots
        .iter()
        .enumerate()
        .map(|(s, slot)| match plan.phase_of_slot(s) {
            Phase::One => build_phase1_signal(
                &trace.rd_symbols[s],
                &trace.zf_symbols[s],
                slot.rd_beam.as_ref().unwrap(),
                &slot.zf_beams,
                plan,
            )
            .unwrap(),
            Phase::Two => build_phase2_signal(
                trace.etas.as_ref().unwrap().combos[s - k],
                &trace.zf_symbols[s],
                slot.rd_beam.as_ref().unwrap(),
                &slot.zf_beams,
                plan,
            )
            .unwrap(),
            Phase::ZfOnly => {
                build_zf_only_signal(&trace.zf_symbols[s], &slot.zf_beams, plan).unwrap()
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Sweep reductions
// ---------------------------------------------------------------------------

/// Trial-averaged rates at one power point.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSummary {
    pub power: f64,
    /// Mean per-message rate, bits per channel use.
    pub per_message: Vec<f64>,
    pub sum_rate: f64,
    /// Sum rate with the vector delivery cap removed.
    pub sum_rate_uncapped: f64,
    pub outages: OutageCounts,
}

/// Canonical reduction of per-trial reports; callers must pass reports in
/// trial order so parallel and sequential sweeps produce identical bits.
pub fn summarize_reports(power: f64, reports: &[RateReport]) -> RateSummary {
    let n = reports.len().max(1) as f64;
    let k = reports.first().map_or(0, |r| r.messages.len());
    let mut per_message = alloc::vec![0.0; k];
    let mut sum_uncapped = 0.0;
    let mut outages = OutageCounts::default();
    for rep in reports {
        for (i, msg) in rep.messages.iter().enumerate() {
            per_message[i] += msg.total();
        }
        sum_uncapped += rep.sum_rate_uncapped();
        outages.combo_low_gain += rep.outages.combo_low_gain;
        outages.rd_near_singular += rep.outages.rd_near_singular;
    }
    for r in per_message.iter_mut() {
        *r /= n;
    }
    RateSummary {
        power,
        sum_rate: per_message.iter().sum(),
        per_message,
        sum_rate_uncapped: sum_uncapped / n,
        outages,
    }
}

/// Sequential rate sweep over the config's power grid.
pub fn rate_sweep(cfg: &SystemConfig) -> Result<Vec<RateSummary>, SimError> {
    cfg.power_grid
        .iter()
        .enumerate()
        .map(|(pi, &p)| {
            let reports = (0..cfg.trials)
                .map(|t| trial_report(cfg, p, pi, t))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(summarize_reports(p, &reports))
        })
        .collect()
}

/// Mean per-term received powers across the grid, for the power-level
/// exponent regression.
pub fn term_power_points(cfg: &SystemConfig) -> Result<Vec<(f64, TermPowers)>, SimError> {
    cfg.power_grid
        .iter()
        .enumerate()
        .map(|(pi, &p)| {
            let traces = (0..cfg.trials)
                .map(|t| {
                    let frame = simulate_superframe(cfg, p, pi, t)?;
                    Ok(build_trace(&frame, cfg, pi, t, true).reception)
                })
                .collect::<Result<Vec<_>, SimError>>()?;
            Ok((p, TermPowers::mean_of(&traces)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Accounting;
    use alloc::vec;

    fn cfg(k: usize, alpha: f64, powers: Vec<f64>, trials: usize, seed: u64) -> SystemConfig {
        SystemConfig::new(k, 2, alpha, powers, trials, seed, Accounting::PowerLevel).unwrap()
    }

    #[test]
    fn rejects_single_antenna() {
        let cfg = SystemConfig::new(
            3,
            1,
            0.2,
            vec![1e4],
            1,
            7,
            Accounting::PowerLevel,
        )
        .unwrap();
        assert_eq!(
            simulate_superframe(&cfg, 1e4, 0, 0),
            Err(SimError::DimensionTooSmall)
        );
    }

    #[test]
    fn superframe_is_deterministic() {
        let cfg = cfg(3, 0.3, vec![1e6], 1, 42);
        let a = simulate_superframe(&cfg, 1e6, 0, 5).unwrap();
        let b = simulate_superframe(&cfg, 1e6, 0, 5).unwrap();
        assert_eq!(a, b);
        let c = simulate_superframe(&cfg, 1e6, 0, 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zf_beams_null_estimates() {
        let cfg = cfg(4, 0.4, vec![1e8], 1, 1);
        let frame = simulate_superframe(&cfg, 1e8, 0, 0).unwrap();
        for slot in &frame.slots {
            for (i, beam) in slot.zf_beams.iter().enumerate() {
                let leak = cdot(&slot.channel.h_hat[i], beam.vector(), 2).norm();
                assert!(leak < 1e-10);
            }
        }
    }

    #[test]
    fn alpha_zero_falls_back_to_random_beams() {
        let cfg = cfg(3, 0.0, vec![1e6], 1, 2);
        let frame = simulate_superframe(&cfg, 1e6, 0, 0).unwrap();
        for slot in &frame.slots {
            for beam in &slot.zf_beams {
                assert_eq!(beam.kind, crate::precoding::BeamKind::RandomVector);
            }
        }
    }

    #[test]
    fn trace_decomposition_matches_rebuilt_signals() {
        for (k, alpha) in [(2, 0.3), (3, 0.25), (3, 0.9)] {
            let cfg = cfg(k, alpha, vec![1e6], 1, 9);
            let frame = simulate_superframe(&cfg, 1e6, 0, 0).unwrap();
            let trace = build_trace(&frame, &cfg, 0, 0, true);
            let signals = rebuild_signals(&frame, &trace);
            for (s, x) in signals.iter().enumerate() {
                for j in 0..k {
                    let t = &trace.reception.slots[s].terms[j];
                    let direct = crate::receiver::receive(
                        x,
                        &frame.slots[s].channel.h[j],
                        t.noise,
                        2,
                    );
                    assert!(
                        (t.observation() - direct).norm() < 1e-9,
                        "slot {s} rx {j}: decomposition does not sum to h^H x + z"
                    );
                }
            }
        }
    }

    #[test]
    fn noiseless_trace_rd_term_equals_eta_at_excluded_rx() {
        let cfg = cfg(4, 0.25, vec![1e8], 1, 3);
        let frame = simulate_superframe(&cfg, 1e8, 0, 0).unwrap();
        let trace = build_trace(&frame, &cfg, 0, 0, false);
        let etas = trace.etas.as_ref().unwrap();
        for t in 0..4 {
            let rd = trace.reception.slots[t].terms[t].rd;
            assert!(
                (rd - etas.eta[t]).norm() < 1e-12 * etas.eta[t].norm().max(1.0),
                "slot {t}: receiver-side RD term differs from reconstructed eta"
            );
        }
    }

    #[test]
    fn summaries_are_order_canonical() {
        let cfg = cfg(2, 0.5, vec![1e4, 1e6], 3, 11);
        let sweep = rate_sweep(&cfg).unwrap();
        assert_eq!(sweep.len(), 2);
        // Recompute the second point by hand in trial order.
        let reports: Vec<_> = (0..3)
            .map(|t| trial_report(&cfg, 1e6, 1, t).unwrap())
            .collect();
        let again = summarize_reports(1e6, &reports);
        assert_eq!(sweep[1], again);
    }
}
