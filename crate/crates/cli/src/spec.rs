//! Validated experiment descriptions and the field-level errors the
//! ingestion layer reports.

use mixcsit_core::channel::{Accounting, SystemConfig};
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// A command-required field was neither a flag nor a config value.
    MissingField(&'static str),
    /// A field value is outside its domain.
    RangeViolation(String),
    /// A config-file key (or section) is not recognized.
    UnknownKey(String),
    /// A field value could not be parsed at all.
    Malformed { field: String, value: String },
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::MissingField(name) => write!(f, "missing required field `{name}`"),
            CliError::RangeViolation(what) => write!(f, "value out of range: {what}"),
            CliError::UnknownKey(key) => write!(f, "unknown configuration key `{key}`"),
            CliError::Malformed { field, value } => {
                write!(f, "cannot parse `{value}` for field `{field}`")
            }
            CliError::Io(err) => write!(f, "io error: {err}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    /// One JSON record per line with raw per-trial rates (simulate only).
    RecordStream,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    /// Destination file; stdout when absent.
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentSpec {
    /// Closed-form DoF table over (K, alpha).
    Analyze {
        k_list: Vec<usize>,
        tx_antennas: usize,
        alpha_grid: Vec<f64>,
        output: OutputSpec,
    },
    /// Monte-Carlo rate sweep over the power grid.
    Simulate {
        config: SystemConfig,
        output: OutputSpec,
    },
    /// DoF-region vertex enumeration.
    Region {
        users: usize,
        tx_antennas: usize,
        alpha: f64,
        output: OutputSpec,
    },
    /// Entropy-difference growth check.
    VerifyLemma1 {
        tx_antennas: usize,
        alpha: f64,
        p_grid: Vec<f64>,
        outer: usize,
        seed: u64,
        output: OutputSpec,
    },
    /// Sum-DoF curve table (the saturation plot's data).
    Fig3 {
        k_list: Vec<usize>,
        tx_antennas: usize,
        alpha_grid: Vec<f64>,
        output: OutputSpec,
    },
}

/// `start:stop:count`, log-spaced inclusive; DoF slope fitting needs
/// log-uniform coverage.
pub fn parse_power_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Malformed {
        field: "p_grid".into(),
        value: text.into(),
    };
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if !(start > 1.0) || stop <= start || count < 2 {
        return Err(CliError::RangeViolation(format!(
            "p_grid `{text}` needs 1 < start < stop and count >= 2"
        )));
    }
    let (ls, le) = (start.log10(), stop.log10());
    Ok((0..count)
        .map(|i| 10f64.powf(ls + i as f64 * (le - ls) / (count - 1) as f64))
        .collect())
}

/// `start:stop:step`, linear inclusive grid of CSIT quality exponents.
pub fn parse_alpha_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Malformed {
        field: "alpha_grid".into(),
        value: text.into(),
    };
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].parse().map_err(|_| bad())?;
    let step: f64 = parts[2].parse().map_err(|_| bad())?;
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || stop < start || step <= 0.0
    {
        return Err(CliError::RangeViolation(format!(
            "alpha_grid `{text}` needs 0 <= start <= stop <= 1 and step > 0"
        )));
    }
    // Accumulated grid values are snapped to 1e-12 so tables print cleanly.
    let snap = |x: f64| (x / 1e-12).round() * 1e-12;
    let n = ((stop - start) / step + 1.5).floor() as usize;
    let mut out: Vec<f64> = (0..n)
        .map(|i| snap(start + i as f64 * step))
        .filter(|a| *a <= stop + 1e-12)
        .map(|a| a.min(1.0))
        .collect();
    if let Some(last) = out.last() {
        if (stop - last).abs() > step * 1e-9 && stop > *last {
            out.push(stop);
        }
    }
    Ok(out)
}

/// `2,3,4` or `2..4` (inclusive) or a single value.
pub fn parse_k_list(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Malformed {
        field: "k_list".into(),
        value: text.into(),
    };
    let list: Vec<usize> = if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if list.is_empty() {
        return Err(bad());
    }
    for &k in &list {
        if k < 2 {
            return Err(CliError::RangeViolation(format!("k_list entry {k} < 2")));
        }
    }
    Ok(list)
}

pub fn parse_accounting(text: &str) -> Result<Accounting, CliError> {
    match text {
        "power_level" => Ok(Accounting::PowerLevel),
        "joint_mac" => Ok(Accounting::JointMac),
        other => Err(CliError::Malformed {
            field: "accounting".into(),
            value: other.into(),
        }),
    }
}

pub fn parse_format(text: &str) -> Result<OutputFormat, CliError> {
    match text {
        "csv" => Ok(OutputFormat::Csv),
        "record-stream" => Ok(OutputFormat::RecordStream),
        other => Err(CliError::Malformed {
            field: "format".into(),
            value: other.into(),
        }),
    }
}

pub fn check_alpha(alpha: f64) -> Result<f64, CliError> {
    if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
        return Err(CliError::RangeViolation(format!("alpha = {alpha}")));
    }
    Ok(alpha)
}

pub fn check_users(k: usize) -> Result<usize, CliError> {
    if k < 2 {
        return Err(CliError::RangeViolation(format!("k = {k} (need >= 2)")));
    }
    Ok(k)
}

pub fn check_antennas(m: usize) -> Result<usize, CliError> {
    if m < 1 {
        return Err(CliError::RangeViolation(format!("m = {m} (need >= 1)")));
    }
    Ok(m)
}
