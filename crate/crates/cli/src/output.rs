//! CSV and record-stream rendering.
//!
//! All outputs are UTF-8 with LF line endings and '.' decimals; every CSV
//! starts with a header row. Floats print in Rust's shortest round-trip
//! form, so files are byte-stable for identical inputs.

use mixcsit_core::analysis::{DofPoint, SlopeFit};
use mixcsit_core::converse::Lemma1Report;
use mixcsit_core::receiver::RateReport;
use mixcsit_core::sim::RateSummary;
use serde::Serialize;
use std::fmt::Write as _;

/// `analyze` / `fig3` table.
pub fn dof_table_csv(points: &[DofPoint]) -> String {
    let mut out = String::from("K,M,alpha,lower,upper,sum_dof\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p.users, p.tx_antennas, p.alpha, p.lower, p.upper, p.sum_dof
        );
    }
    out
}

/// `region` vertex table, one row per vertex.
pub fn region_csv(users: usize, vertices: &[Vec<f64>]) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=users).map(|i| format!("d_{i}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for v in vertices {
        let row: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `simulate` long-format table: one `(record, p, mode, key, value)` row
/// per quantity, closed by run-level summary rows. The slope summary is
/// omitted when the grid is too thin to fit one (< 4 points or < 4 decades).
pub fn simulate_csv(
    mode: &str,
    summaries: &[RateSummary],
    fit: Option<&SlopeFit>,
    target_sum_dof: f64,
) -> String {
    let mut out = String::from("record,p,mode,key,value\n");
    for s in summaries {
        for (i, rate) in s.per_message.iter().enumerate() {
            let _ = writeln!(out, "rate,{},{},w{},{}", s.power, mode, i + 1, rate);
        }
        let _ = writeln!(out, "rate,{},{},sum,{}", s.power, mode, s.sum_rate);
        let _ = writeln!(
            out,
            "rate,{},{},sum_uncapped,{}",
            s.power, mode, s.sum_rate_uncapped
        );
        let _ = writeln!(
            out,
            "outage,{},{},combo_low_gain,{}",
            s.power, mode, s.outages.combo_low_gain
        );
        let _ = writeln!(
            out,
            "outage,{},{},rd_near_singular,{}",
            s.power, mode, s.outages.rd_near_singular
        );
    }
    if let Some(fit) = fit {
        let _ = writeln!(out, "summary,,{},fitted_slope,{}", mode, fit.slope);
        let _ = writeln!(
            out,
            "summary,,{},top_decade_slope,{}",
            mode, fit.top_decade_slope
        );
    }
    let _ = writeln!(out, "summary,,{},target_sum_dof,{}", mode, target_sum_dof);
    out
}

/// `verify-lemma1` table; the fitted slope, bound and verdict are run-level
/// values repeated on every row for a fixed-width schema.
pub fn lemma_csv(report: &Lemma1Report) -> String {
    let mut out = String::from("p,mean_max_objective_bits,fitted_slope,bound,pass\n");
    for (p, v) in &report.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            p, v, report.slope, report.bound, report.pass
        );
    }
    out
}

#[derive(Serialize)]
struct MessageRecord {
    message: usize,
    rd_pair: f64,
    rd_pair_uncapped: f64,
    zf_phase1: f64,
    zf_phase2: f64,
    total: f64,
}

#[derive(Serialize)]
struct OutageRecord {
    combo_low_gain: usize,
    rd_near_singular: usize,
}

#[derive(Serialize)]
struct TrialRecord<'a> {
    p: f64,
    trial: usize,
    mode: &'a str,
    messages: Vec<MessageRecord>,
    outages: OutageRecord,
    sum_rate: f64,
}

/// One JSON object per line per trial, in `(power index, trial)` order.
pub fn record_stream(
    mode: &str,
    per_trial: &[(f64, usize, RateReport)],
) -> Result<String, serde_json::Error> {
    let mut out = String::new();
    for (p, trial, report) in per_trial {
        let rec = TrialRecord {
            p: *p,
            trial: *trial,
            mode,
            messages: report
                .messages
                .iter()
                .map(|m| MessageRecord {
                    message: m.message,
                    rd_pair: m.rd_pair,
                    rd_pair_uncapped: m.rd_pair_uncapped,
                    zf_phase1: m.zf_phase1,
                    zf_phase2: m.zf_phase2,
                    total: m.total(),
                })
                .collect(),
            outages: OutageRecord {
                combo_low_gain: report.outages.combo_low_gain,
                rd_near_singular: report.outages.rd_near_singular,
            },
            sum_rate: report.sum_rate(),
        };
        out.push_str(&serde_json::to_string(&rec)?);
        out.push('\n');
    }
    Ok(out)
}
