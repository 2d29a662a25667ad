//! Command-line surface and flag/config merging.
//!
//! Every subcommand takes the same flag set; which fields are required is
//! validated per command, so missing-field errors name the exact field.
//! Flag values take precedence over config-file values.

use crate::configfile::ConfigFile;
use crate::spec::{
    check_alpha, check_antennas, check_users, parse_accounting, parse_alpha_grid, parse_format,
    parse_k_list, parse_power_grid, CliError, ExperimentSpec, OutputFormat, OutputSpec,
};
use clap::{Args, Parser, Subcommand};
use mixcsit_core::channel::{Accounting, SystemConfig};
use std::path::PathBuf;

/// Analytical and simulated sum-DoF for the K-user MISO broadcast channel
/// with mixed CSIT and order-(K-1) messages.
#[derive(Debug, Parser)]
#[command(name = "mixcsit", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArg,
}

#[derive(Debug, Subcommand)]
pub enum CommandArg {
    /// Closed-form DoF table over K and alpha grids.
    Analyze(CommonArgs),
    /// Monte-Carlo rate sweep of the transmission scheme.
    Simulate(CommonArgs),
    /// Vertices of the DoF-region polytope.
    Region(CommonArgs),
    /// Growth check of the entropy-difference bound.
    #[command(name = "verify-lemma1")]
    VerifyLemma1(CommonArgs),
    /// Sum-DoF saturation curves (table behind the summary figure).
    Fig3(CommonArgs),
}

#[derive(Debug, Args, Default, Clone)]
pub struct CommonArgs {
    /// Sectioned key=value config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of receivers K (>= 2).
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of transmit antennas M (default 2).
    #[arg(long)]
    pub m: Option<usize>,
    /// CSIT quality exponent in [0, 1].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Power grid `start:stop:count`, log-spaced (e.g. 1e4:1e12:9).
    #[arg(long = "p-grid")]
    pub p_grid: Option<String>,
    /// Monte-Carlo trials per power point.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Reproducibility seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Rate accounting: power_level | joint_mac (default power_level).
    #[arg(long)]
    pub accounting: Option<String>,
    /// K values, comma list or inclusive range (e.g. 2,3,4 or 2..4).
    #[arg(long = "k-list")]
    pub k_list: Option<String>,
    /// Alpha grid `start:stop:step`, linear inclusive (e.g. 0:1:0.05).
    #[arg(long = "alpha-grid")]
    pub alpha_grid: Option<String>,
    /// Outer estimate draws for verify-lemma1 (default 50).
    #[arg(long)]
    pub outer: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    /// Output format: csv | record-stream (record-stream: simulate only).
    #[arg(long)]
    pub format: Option<String>,
}

/// One field resolved from flag-over-file precedence.
struct Resolver {
    file: ConfigFile,
}

impl Resolver {
    fn string(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.file.get(key).map(String::from))
    }

    fn parsed<T: std::str::FromStr + Copy>(
        &self,
        flag: &Option<T>,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        if let Some(v) = flag {
            return Ok(Some(*v));
        }
        self.file.parsed::<T>(key)
    }
}

pub fn build_spec(command: &CommandArg) -> Result<ExperimentSpec, CliError> {
    let (args, kind) = match command {
        CommandArg::Analyze(a) => (a, Kind::Analyze),
        CommandArg::Simulate(a) => (a, Kind::Simulate),
        CommandArg::Region(a) => (a, Kind::Region),
        CommandArg::VerifyLemma1(a) => (a, Kind::VerifyLemma1),
        CommandArg::Fig3(a) => (a, Kind::Fig3),
    };
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let r = Resolver { file };

    let tx_antennas = check_antennas(r.parsed(&args.m, "system.m")?.unwrap_or(2))?;
    let output = {
        let path = args
            .out
            .clone()
            .or_else(|| r.file.get("output.path").map(PathBuf::from));
        let format = match r.string(&args.format, "output.format") {
            Some(text) => parse_format(&text)?,
            None => OutputFormat::Csv,
        };
        if format == OutputFormat::RecordStream && kind != Kind::Simulate {
            return Err(CliError::RangeViolation(
                "format record-stream applies to simulate only".into(),
            ));
        }
        OutputSpec { path, format }
    };
    let seed = r.parsed(&args.seed, "experiment.seed")?.unwrap_or(0);

    match kind {
        Kind::Analyze | Kind::Fig3 => {
            let k_list = parse_k_list(
                &r.string(&args.k_list, "experiment.k_list")
                    .ok_or(CliError::MissingField("k_list"))?,
            )?;
            let alpha_grid = parse_alpha_grid(
                &r.string(&args.alpha_grid, "experiment.alpha_grid")
                    .ok_or(CliError::MissingField("alpha_grid"))?,
            )?;
            Ok(if kind == Kind::Analyze {
                ExperimentSpec::Analyze {
                    k_list,
                    tx_antennas,
                    alpha_grid,
                    output,
                }
            } else {
                ExperimentSpec::Fig3 {
                    k_list,
                    tx_antennas,
                    alpha_grid,
                    output,
                }
            })
        }
        Kind::Simulate => {
            let users = check_users(
                r.parsed(&args.k, "system.k")?
                    .ok_or(CliError::MissingField("k"))?,
            )?;
            let alpha = check_alpha(
                r.parsed(&args.alpha, "system.alpha")?
                    .ok_or(CliError::MissingField("alpha"))?,
            )?;
            let p_grid = parse_power_grid(
                &r.string(&args.p_grid, "experiment.p_grid")
                    .ok_or(CliError::MissingField("p_grid"))?,
            )?;
            let trials = r
                .parsed(&args.trials, "experiment.trials")?
                .ok_or(CliError::MissingField("trials"))?;
            let accounting = match r.string(&args.accounting, "system.accounting") {
                Some(text) => parse_accounting(&text)?,
                None => Accounting::PowerLevel,
            };
            let config = SystemConfig::new(
                users,
                tx_antennas,
                alpha,
                p_grid,
                trials,
                seed,
                accounting,
            )
            .map_err(|e| CliError::RangeViolation(e.to_string()))?;
            Ok(ExperimentSpec::Simulate { config, output })
        }
        Kind::Region => {
            let users = check_users(
                r.parsed(&args.k, "system.k")?
                    .ok_or(CliError::MissingField("k"))?,
            )?;
            if users > 8 {
                return Err(CliError::RangeViolation(format!(
                    "k = {users} (vertex enumeration supports K <= 8)"
                )));
            }
            let alpha = check_alpha(
                r.parsed(&args.alpha, "system.alpha")?
                    .ok_or(CliError::MissingField("alpha"))?,
            )?;
            Ok(ExperimentSpec::Region {
                users,
                tx_antennas,
                alpha,
                output,
            })
        }
        Kind::VerifyLemma1 => {
            let alpha = check_alpha(
                r.parsed(&args.alpha, "system.alpha")?
                    .ok_or(CliError::MissingField("alpha"))?,
            )?;
            let p_grid = parse_power_grid(
                &r.string(&args.p_grid, "experiment.p_grid")
                    .ok_or(CliError::MissingField("p_grid"))?,
            )?;
            let outer = r.parsed(&args.outer, "experiment.outer")?.unwrap_or(50);
            if outer == 0 {
                return Err(CliError::RangeViolation("outer = 0".into()));
            }
            Ok(ExperimentSpec::VerifyLemma1 {
                tx_antennas,
                alpha,
                p_grid,
                outer,
                seed,
                output,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Analyze,
    Simulate,
    Region,
    VerifyLemma1,
    Fig3,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simulate_args(extra: &[&str]) -> CommandArg {
        let mut argv = vec!["mixcsit", "simulate"];
        argv.extend_from_slice(extra);
        let cli = Cli::try_parse_from(argv).unwrap();
        cli.command
    }

    #[test]
    fn simulate_flags_round_trip() {
        let cmd = simulate_args(&[
            "--k", "3", "--m", "2", "--alpha", "0.2", "--p-grid", "1e4:1e12:9", "--trials",
            "500", "--seed", "7",
        ]);
        let spec = build_spec(&cmd).unwrap();
        match spec {
            ExperimentSpec::Simulate { config, output } => {
                assert_eq!(config.users, 3);
                assert_eq!(config.tx_antennas, 2);
                assert_eq!(config.alpha, 0.2);
                assert_eq!(config.power_grid.len(), 9);
                assert_eq!(config.trials, 500);
                assert_eq!(config.seed, 7);
                assert_eq!(config.accounting, Accounting::PowerLevel);
                assert_eq!(output.format, OutputFormat::Csv);
            }
            other => panic!("wrong spec {other:?}"),
        }
    }

    #[test]
    fn alpha_out_of_range_names_field() {
        let cmd = simulate_args(&[
            "--k", "2", "--alpha", "1.5", "--p-grid", "1e4:1e8:5", "--trials", "10",
        ]);
        match build_spec(&cmd).unwrap_err() {
            CliError::RangeViolation(msg) => assert!(msg.contains("alpha"), "{msg}"),
            other => panic!("wrong error {other:?}"),
        }
    }

    #[test]
    fn missing_field_is_named() {
        let cmd = simulate_args(&["--k", "2", "--alpha", "0.5", "--trials", "10"]);
        assert_eq!(build_spec(&cmd).unwrap_err(), CliError::MissingField("p_grid"));
    }

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(
            &path,
            "[system]\nk = 2\nalpha = 0.3\n[experiment]\np_grid = 1e4:1e8:5\ntrials = 10\n",
        )
        .unwrap();
        let cmd = simulate_args(&["--config", path.to_str().unwrap(), "--alpha", "0.4"]);
        match build_spec(&cmd).unwrap() {
            ExperimentSpec::Simulate { config, .. } => assert_eq!(config.alpha, 0.4),
            other => panic!("wrong spec {other:?}"),
        }
    }

    #[test]
    fn record_stream_restricted_to_simulate() {
        let cli = Cli::try_parse_from([
            "mixcsit", "region", "--k", "2", "--alpha", "0.5", "--format", "record-stream",
        ])
        .unwrap();
        assert!(matches!(
            build_spec(&cli.command),
            Err(CliError::RangeViolation(_))
        ));
    }
}
