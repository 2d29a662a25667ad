//! Cross-module slope regressions: every power-law exponent the model
//! promises is measured from simulated realizations on a reduced grid.
//! (The acceptance suite in the CLI crate re-runs these at full size.)

use mixcsit_core::analysis::{estimate_dof_slope, sum_dof};
use mixcsit_core::channel::{csit_error_variance, sample_slot, Accounting, SystemConfig};
use mixcsit_core::cmat::cdot;
use mixcsit_core::precoding::zf_beamformer;
use mixcsit_core::receiver::{
    decompose_power_levels, superframe_rate_report, zf_stream_rates, RdGains,
};
use mixcsit_core::rng::{stream_rng, StreamDomain};
use mixcsit_core::scheme::{plan_superframe, Regime};
use mixcsit_core::sim::{gains, rate_sweep, simulate_superframe, term_power_points};

fn log_grid(lo_exp: f64, hi_exp: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 10f64.powf(lo_exp + i as f64 * (hi_exp - lo_exp) / (n - 1) as f64))
        .collect()
}

fn cfg(k: usize, alpha: f64, powers: Vec<f64>, trials: usize) -> SystemConfig {
    SystemConfig::new(k, 2, alpha, powers, trials, 7, Accounting::PowerLevel).unwrap()
}

fn ln_slope(points: &[(f64, f64)]) -> f64 {
    // Log-log regression for linear-power quantities.
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0.ln()).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (p, v) in points {
        sxx += (p.ln() - mx) * (p.ln() - mx);
        sxy += (p.ln() - mx) * (v.ln() - my);
    }
    sxy / sxx
}

#[test]
fn zf_residual_leakage_scales_as_p_to_minus_alpha() {
    // E|h~^H p|^2 and E|h^H p|^2 against a unit-power ZF beam built on the
    // estimate: both collapse to sigma^2 = P^-alpha.
    let alpha = 0.6;
    let grid = log_grid(4.0, 12.0, 9);
    let mut points = vec![];
    for (pi, &p) in grid.iter().enumerate() {
        let c = cfg(2, alpha, vec![p], 1);
        let mut acc = 0.0;
        let mut n = 0usize;
        for trial in 0..4000 {
            let mut rng = stream_rng(7, StreamDomain::SlotChannel, pi, trial, 0);
            let slot = sample_slot(&c, p, &mut rng);
            let beam = zf_beamformer(&slot.h_hat[0], 2).unwrap();
            acc += cdot(&slot.h[0], beam.vector(), 2).norm_sqr();
            n += 1;
        }
        points.push((p, acc / n as f64));
        // Point value itself should track sigma^2 closely.
        let sigma2 = csit_error_variance(p, alpha).unwrap();
        let ratio = points.last().unwrap().1 / sigma2;
        assert!((0.8..1.25).contains(&ratio), "P={p}: ratio {ratio}");
    }
    let slope = ln_slope(&points);
    assert!(
        (slope + alpha).abs() < 0.03,
        "leakage slope {slope} vs -{alpha}"
    );
}

#[test]
fn term_power_exponents_match_annotations() {
    // rs_ria: full-power layer ~ P, cross-ZF ~ P^alpha, own-ZF leak ~ P^0,
    // noise ~ P^0.
    let alpha = 0.3;
    let c = cfg(3, alpha, log_grid(4.0, 12.0, 9), 120);
    let points = term_power_points(&c).unwrap();
    let slopes = decompose_power_levels(&points).unwrap();
    assert!((slopes.rd.unwrap() - 1.0).abs() < 0.03, "rd {:?}", slopes.rd);
    assert!(
        (slopes.cross_zf - alpha).abs() < 0.03,
        "cross {}",
        slopes.cross_zf
    );
    assert!(slopes.own_zf.abs() < 0.03, "own {}", slopes.own_zf);
    assert!(slopes.noise.abs() < 0.03, "noise {}", slopes.noise);

    // zf_only: desired streams at P^(1/(K-1)); the own-stream leak sits at
    // P^(1/(K-1) - alpha), at or below the noise floor in this regime.
    let c = cfg(3, 0.8, log_grid(4.0, 12.0, 9), 120);
    let points = term_power_points(&c).unwrap();
    let slopes = decompose_power_levels(&points).unwrap();
    assert!(slopes.rd.is_none());
    assert!(
        (slopes.cross_zf - 0.5).abs() < 0.03,
        "zf_only desired {}",
        slopes.cross_zf
    );
    assert!(slopes.own_zf < 0.03, "own leak grows: {}", slopes.own_zf);
    assert!((slopes.own_zf - (0.5 - 0.8)).abs() < 0.03);
}

#[test]
fn order_k_rate_slope_is_one_minus_alpha() {
    let alpha = 0.2;
    let grid = log_grid(4.0, 12.0, 9);
    let mut points = vec![];
    for (pi, &p) in grid.iter().enumerate() {
        let c = cfg(3, alpha, vec![p], 1);
        let mut acc = 0.0;
        let trials = 400;
        for t in 0..trials {
            let frame = simulate_superframe(&c, p, pi, t).unwrap();
            let g = gains(&frame);
            // Deliverable rate of the first pairwise sum: min of the raw
            // order-K SINR rate over the K receivers.
            let plan = &g.plan;
            let slot = &g.slots[3];
            let rd = match &slot.rd {
                RdGains::Scalars(v) => v,
                _ => unreachable!(),
            };
            let mut worst = f64::INFINITY;
            for j in 0..3 {
                let inter: f64 = slot.zf[j]
                    .iter()
                    .map(|x| x.norm_sqr() * plan.zf_power_per_stream)
                    .sum();
                let sinr = rd[j].norm_sqr() * plan.rd_power / (1.0 + inter);
                worst = worst.min((1.0 + sinr).log2());
            }
            acc += worst;
        }
        points.push((p, acc / trials as f64));
    }
    let fit = estimate_dof_slope(&points).unwrap();
    assert!(
        (fit.slope - (1.0 - alpha)).abs() < 0.05,
        "combo slope {} vs {}",
        fit.slope,
        1.0 - alpha
    );
}

#[test]
fn rd_pair_sinr_slope_is_one_minus_alpha() {
    // Stacked solve with distortions at the ZF residual level P^alpha.
    let alpha = 0.4;
    let grid = log_grid(4.0, 12.0, 9);
    let mut points = vec![];
    for (pi, &p) in grid.iter().enumerate() {
        let c = cfg(2, alpha, vec![p], 1);
        let mut acc = 0.0;
        let trials = 600;
        for t in 0..trials {
            let frame = simulate_superframe(&c, p, pi, t).unwrap();
            let rep = superframe_rate_report(&gains(&frame), Accounting::PowerLevel);
            // Uncapped vector rate isolates the stack SINR behavior
            // (per message, 2 symbols over 3 slots).
            acc += rep.messages[0].rd_pair_uncapped * 3.0 / 2.0;
        }
        points.push((p, acc / trials as f64));
        let _ = pi;
    }
    let fit = estimate_dof_slope(&points).unwrap();
    assert!(
        (fit.slope - (1.0 - alpha)).abs() < 0.05,
        "stack slope {} vs {}",
        fit.slope,
        1.0 - alpha
    );
}

#[test]
fn zf_layer_slopes_in_both_modes() {
    let alpha = 0.4;
    let grid = log_grid(4.0, 12.0, 9);
    let mut per_slot_sum = vec![];
    let mut per_rx_joint = vec![];
    for (pi, &p) in grid.iter().enumerate() {
        let c = cfg(3, alpha, vec![p], 1);
        let mut acc_sum = 0.0;
        let mut acc_joint = 0.0;
        let trials = 400;
        for t in 0..trials {
            let frame = simulate_superframe(&c, p, pi, t).unwrap();
            let g = gains(&frame);
            let pl = zf_stream_rates(&g.slots[0], &g.plan, Accounting::PowerLevel);
            acc_sum += pl.deliverable.iter().sum::<f64>();
            let jm = zf_stream_rates(&g.slots[0], &g.plan, Accounting::JointMac);
            acc_joint += jm.claimed[0];
        }
        per_slot_sum.push((p, acc_sum / trials as f64));
        per_rx_joint.push((p, acc_joint / trials as f64));
    }
    // Per-slot summed ZF rate: K alpha.
    let fit = estimate_dof_slope(&per_slot_sum).unwrap();
    assert!(
        (fit.slope - 3.0 * alpha).abs() < 0.1,
        "per-slot ZF sum slope {} vs {}",
        fit.slope,
        3.0 * alpha
    );
    // Per-receiver joint mutual-information cap: alpha.
    let fit = estimate_dof_slope(&per_rx_joint).unwrap();
    assert!(
        (fit.slope - alpha).abs() < 0.05,
        "per-receiver joint ZF slope {} vs {}",
        fit.slope,
        alpha
    );
}

#[test]
fn end_to_end_sum_rate_slopes_hit_closed_form() {
    // Reduced-size spot checks; the acceptance suite runs the full list.
    for (k, alpha) in [(2usize, 0.0), (3usize, 0.2)] {
        let c = cfg(k, alpha, log_grid(4.0, 12.0, 9), 250);
        let sweep = rate_sweep(&c).unwrap();
        let pts: Vec<(f64, f64)> = sweep.iter().map(|s| (s.power, s.sum_rate)).collect();
        let fit = estimate_dof_slope(&pts).unwrap();
        let target = sum_dof(k, 2, alpha);
        assert!(
            (fit.slope - target).abs() < 0.05,
            "K={k} alpha={alpha}: slope {} vs {}",
            fit.slope,
            target
        );
    }
}

#[test]
fn two_user_modes_agree_at_every_power_point() {
    let base = cfg(2, 0.5, log_grid(4.0, 12.0, 9), 100);
    let pl = rate_sweep(&base).unwrap();
    let jm_cfg = SystemConfig {
        accounting: Accounting::JointMac,
        ..base
    };
    let jm = rate_sweep(&jm_cfg).unwrap();
    for (a, b) in pl.iter().zip(&jm) {
        let rel = (a.sum_rate - b.sum_rate).abs() / a.sum_rate.max(1e-12);
        assert!(rel < 0.01, "P={}: {} vs {}", a.power, a.sum_rate, b.sum_rate);
    }
}

#[test]
fn regime_boundary_plans_agree_with_closed_form() {
    // At alpha = 1/(K-1) the plan stays in the rate-splitting regime and
    // both sum-DoF branches coincide.
    for k in [3usize, 4, 5] {
        let alpha = 1.0 / (k as f64 - 1.0);
        let c = cfg(k, alpha, vec![1e8], 1);
        let plan = plan_superframe(&c, 1e8);
        assert_eq!(plan.regime, Regime::RsRia);
        let below = sum_dof(k, 2, alpha - 1e-9);
        let above = sum_dof(k, 2, alpha + 1e-9);
        assert!((below - above).abs() < 1e-6);
    }
}
