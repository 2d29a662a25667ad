//! Executes validated experiment specs with a deterministic worker pool.
//!
//! Parallel units are indexed (power point, trial/draw) pairs; results are
//! collected in index order and reduced sequentially, so the rendered bytes
//! depend only on the spec and seed, never on the worker count. The pool
//! size comes from the `MIXCSIT_MAX_WORKERS` environment variable (or an
//! explicit override in tests).

use crate::output;
use crate::spec::{CliError, ExperimentSpec, OutputFormat, OutputSpec};
use mixcsit_core::analysis::{
    dof_region_vertices, estimate_dof_slope, sum_dof, DofPoint, SlopeFit,
};
use mixcsit_core::converse::{finish_lemma1_report, lemma1_draw_value, MaxOptions};
use mixcsit_core::receiver::RateReport;
use mixcsit_core::sim::{summarize_reports, trial_report, RateSummary};
use rayon::prelude::*;
use std::fmt;
use std::io::Write as _;

pub const WORKERS_ENV: &str = "MIXCSIT_MAX_WORKERS";

#[derive(Debug)]
pub enum RunError {
    Spec(CliError),
    Sim(String),
    Io(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Spec(e) => write!(f, "{e}"),
            RunError::Sim(e) => write!(f, "simulation error: {e}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<CliError> for RunError {
    fn from(e: CliError) -> Self {
        RunError::Spec(e)
    }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, RunError> {
    let n = workers.or_else(|| {
        std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
    });
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.unwrap_or(0))
        .build()
        .map_err(|e| RunError::Io(e.to_string()))
}

/// Renders the spec's output bytes without touching the filesystem.
pub fn render(spec: &ExperimentSpec, workers: Option<usize>) -> Result<Vec<u8>, RunError> {
    let text = match spec {
        ExperimentSpec::Analyze {
            k_list,
            tx_antennas,
            alpha_grid,
            ..
        }
        | ExperimentSpec::Fig3 {
            k_list,
            tx_antennas,
            alpha_grid,
            ..
        } => {
            let mut points = Vec::with_capacity(k_list.len() * alpha_grid.len());
            for &k in k_list {
                for &alpha in alpha_grid {
                    points.push(
                        DofPoint::eval(k, *tx_antennas, alpha)
                            .map_err(|e| RunError::Spec(CliError::RangeViolation(e.to_string())))?,
                    );
                }
            }
            output::dof_table_csv(&points)
        }
        ExperimentSpec::Region {
            users,
            tx_antennas,
            alpha,
            ..
        } => {
            let mut vertices = dof_region_vertices(*users, *tx_antennas, *alpha);
            vertices.sort_by(|a, b| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            output::region_csv(*users, &vertices)
        }
        ExperimentSpec::Simulate { config, output } => {
            let per_trial = pool(workers)?.install(|| -> Result<Vec<_>, RunError> {
                let jobs: Vec<(usize, usize)> = (0..config.power_grid.len())
                    .flat_map(|pi| (0..config.trials).map(move |t| (pi, t)))
                    .collect();
                jobs.into_par_iter()
                    .map(|(pi, t)| {
                        let p = config.power_grid[pi];
                        trial_report(config, p, pi, t)
                            .map(|rep| (p, t, rep))
                            .map_err(|e| RunError::Sim(e.to_string()))
                    })
                    .collect()
            })?;
            match output.format {
                OutputFormat::RecordStream => output::record_stream(
                    config.accounting.as_str(),
                    &per_trial,
                )
                .map_err(|e| RunError::Io(e.to_string()))?,
                OutputFormat::Csv => {
                    let summaries = group_summaries(&config.power_grid, config.trials, per_trial);
                    let fit = slope_of(&summaries);
                    let target =
                        sum_dof(config.users, config.tx_antennas, config.alpha);
                    output::simulate_csv(
                        config.accounting.as_str(),
                        &summaries,
                        fit.as_ref(),
                        target,
                    )
                }
            }
        }
        ExperimentSpec::VerifyLemma1 {
            tx_antennas,
            alpha,
            p_grid,
            outer,
            seed,
            ..
        } => {
            let opts = MaxOptions::default();
            let outcomes = pool(workers)?.install(|| {
                let jobs: Vec<(usize, usize)> = (0..p_grid.len())
                    .flat_map(|pi| (0..*outer).map(move |d| (pi, d)))
                    .collect();
                jobs.into_par_iter()
                    .map(|(pi, d)| {
                        (
                            pi,
                            lemma1_draw_value(
                                *tx_antennas,
                                *alpha,
                                p_grid[pi],
                                pi,
                                d,
                                *seed,
                                &opts,
                            ),
                        )
                    })
                    .collect::<Vec<_>>()
            });
            let mut sums = vec![0.0f64; p_grid.len()];
            let mut nonconverged = 0usize;
            for (pi, out) in &outcomes {
                sums[*pi] += out.value_bits;
                if !out.converged {
                    nonconverged += 1;
                }
            }
            let points: Vec<(f64, f64)> = p_grid
                .iter()
                .zip(&sums)
                .map(|(&p, &s)| (p, s / *outer as f64))
                .collect();
            let report = finish_lemma1_report(*tx_antennas, *alpha, points, nonconverged);
            output::lemma_csv(&report)
        }
    };
    Ok(text.into_bytes())
}

fn group_summaries(
    grid: &[f64],
    trials: usize,
    per_trial: Vec<(f64, usize, RateReport)>,
) -> Vec<RateSummary> {
    grid.iter()
        .enumerate()
        .map(|(pi, &p)| {
            let reports: Vec<RateReport> = per_trial
                [pi * trials..(pi + 1) * trials]
                .iter()
                .map(|(_, _, r)| r.clone())
                .collect();
            summarize_reports(p, &reports)
        })
        .collect()
}

fn slope_of(summaries: &[RateSummary]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = summaries.iter().map(|s| (s.power, s.sum_rate)).collect();
    estimate_dof_slope(&pts).ok()
}

fn output_spec(spec: &ExperimentSpec) -> &OutputSpec {
    match spec {
        ExperimentSpec::Analyze { output, .. }
        | ExperimentSpec::Simulate { output, .. }
        | ExperimentSpec::Region { output, .. }
        | ExperimentSpec::VerifyLemma1 { output, .. }
        | ExperimentSpec::Fig3 { output, .. } => output,
    }
}

/// Renders and writes to the spec's destination (file or stdout).
pub fn execute(spec: &ExperimentSpec, workers: Option<usize>) -> Result<(), RunError> {
    let bytes = render(spec, workers)?;
    match &output_spec(spec).path {
        Some(path) => {
            std::fs::write(path, bytes)
                .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
        }
        None => {
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| RunError::Io(e.to_string()))?;
        }
    }
    Ok(())
}
