//! Closed-form sum-DoF values, outer-bound inequality families, DoF-region
//! vertices, and slope estimation from simulated rates.
//!
//! Two independent routes to the same number are kept separate on purpose:
//! [`achievable_sum_dof`] is the scheme-side value, [`sum_dof_upper`] is the
//! converse-side value obtained by taking the minimum over the two bound
//! families, and [`sum_dof`] is the branch-selected closed form asserted to
//! agree with both.

use crate::channel::{effective_dimension, ConfigError};
use crate::fit::log2_slope;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
// Float math for no_std builds; shadowed by std's inherent methods in test builds.
#[allow(unused_imports)]
use num_traits::Float;

/// One (K, M, alpha) point with its lower bound, upper bound and sum-DoF.
#[derive(Debug, Clone, PartialEq)]
pub struct DofPoint {
    pub users: usize,
    pub tx_antennas: usize,
    pub alpha: f64,
    /// Achievable sum-DoF of the rate-splitting design.
    pub lower: f64,
    /// Complete sum-DoF upper bound.
    pub upper: f64,
    /// The matched closed form.
    pub sum_dof: f64,
}

impl DofPoint {
    pub fn eval(users: usize, tx_antennas: usize, alpha: f64) -> Result<Self, ConfigError> {
        let lower = achievable_sum_dof(users, tx_antennas, alpha)?;
        let upper = sum_dof_upper(users, tx_antennas, alpha);
        let sum = sum_dof(users, tx_antennas, alpha);
        Ok(DofPoint {
            users,
            tx_antennas,
            alpha,
            lower,
            upper,
            sum_dof: sum,
        })
    }
}

/// One `coeffs . d <= rhs` constraint over the message DoF tuple.
///
/// The two bounding families carry nonnegative coefficients; the
/// nonnegativity constraints `d_i >= 0` are carried in the same form as
/// `-d_i <= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearInequality {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl LinearInequality {
    pub fn satisfied(&self, point: &[f64], tol: f64) -> bool {
        let lhs: f64 = self
            .coeffs
            .iter()
            .zip(point)
            .map(|(c, d)| c * d)
            .sum();
        lhs <= self.rhs + tol
    }
}

fn validate(users: usize, tx_antennas: usize, alpha: f64) -> Result<(), ConfigError> {
    if users < 2 {
        return Err(ConfigError::UserCount(users));
    }
    if tx_antennas < 1 {
        return Err(ConfigError::AntennaCount(tx_antennas));
    }
    if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
        return Err(ConfigError::Alpha(alpha));
    }
    Ok(())
}

/// CSIT quality threshold `1/(K-1)` separating the two regimes.
pub fn alpha_threshold(users: usize) -> f64 {
    1.0 / (users as f64 - 1.0)
}

/// Sum-DoF achieved by the rate-splitting design:
///
/// ```text
/// alpha <= 1/(K-1):  K (1 + ((m-1)/m) alpha) / (K - 1 + 1/m)
/// alpha >  1/(K-1):  K / (K - (m-1))
/// ```
///
/// with m = min{M, 2}. At m = 1 both branches collapse to 1 (one symbol
/// per slot), so M = 1 needs no special case.
pub fn achievable_sum_dof(users: usize, tx_antennas: usize, alpha: f64) -> Result<f64, ConfigError> {
    validate(users, tx_antennas, alpha)?;
    let k = users as f64;
    let m = effective_dimension(tx_antennas) as f64;
    let value = if alpha <= alpha_threshold(users) {
        k * (1.0 + (m - 1.0) / m * alpha) / (k - 1.0 + 1.0 / m)
    } else {
        k / (k - (m - 1.0))
    };
    Ok(value)
}

/// Sum-DoF upper bound with perfect CSIT: `K / (K - (m-1))`.
pub fn perfect_csit_upper(users: usize, tx_antennas: usize) -> f64 {
    let k = users as f64;
    let m = effective_dimension(tx_antennas) as f64;
    k / (k - (m - 1.0))
}

/// Complete sum-DoF upper bound, taken as the genuine minimum of the two
/// bound families: summing the mixed-CSIT inequality family gives
/// `K (1 + ((m-1)/m) alpha) / (K - 1 + 1/m)`, the perfect-CSIT family gives
/// [`perfect_csit_upper`]. The minimum switches exactly at `alpha = 1/(K-1)`.
pub fn sum_dof_upper(users: usize, tx_antennas: usize, alpha: f64) -> f64 {
    let k = users as f64;
    let m = effective_dimension(tx_antennas) as f64;
    let mixed = k * (1.0 + (m - 1.0) / m * alpha) / (k - 1.0 + 1.0 / m);
    mixed.min(perfect_csit_upper(users, tx_antennas))
}

/// The matched sum-DoF closed form (lower and upper bounds coincide).
pub fn sum_dof(users: usize, tx_antennas: usize, alpha: f64) -> f64 {
    let k = users as f64;
    let m = effective_dimension(tx_antennas) as f64;
    if alpha <= alpha_threshold(users) {
        k * (1.0 + (m - 1.0) / m * alpha) / (k - 1.0 + 1.0 / m)
    } else {
        k / (k - (m - 1.0))
    }
}

/// The outer-region constraint set over `(d_{-1}, ..., d_{-K})`:
///
/// * for each i: `(1/m) d_{-i} + sum_{k != i} d_{-k} <= 1 + ((m-1)/m) alpha`,
/// * for each k: `sum_{i != k} d_{-i} <= 1` (each receiver decodes at most
///   one symbol per slot),
/// * `d_{-i} >= 0`.
pub fn mixed_outer_inequalities(
    users: usize,
    tx_antennas: usize,
    alpha: f64,
) -> Vec<LinearInequality> {
    let m = effective_dimension(tx_antennas) as f64;
    let mixed_rhs = 1.0 + (m - 1.0) / m * alpha;
    let mut out = Vec::with_capacity(3 * users);
    for i in 0..users {
        let mut coeffs = vec![1.0; users];
        coeffs[i] = 1.0 / m;
        out.push(LinearInequality {
            coeffs,
            rhs: mixed_rhs,
        });
    }
    for k in 0..users {
        let mut coeffs = vec![1.0; users];
        coeffs[k] = 0.0;
        out.push(LinearInequality { coeffs, rhs: 1.0 });
    }
    for i in 0..users {
        let mut coeffs = vec![0.0; users];
        coeffs[i] = -1.0;
        out.push(LinearInequality { coeffs, rhs: 0.0 });
    }
    out
}

/// Vertices of the DoF region polytope, by exhaustive active-set
/// enumeration: every K-subset of constraints is solved as an equality
/// system and kept when feasible. Exact and cheap for the K <= 8 sizes
/// this region ever takes; deduplicated within 1e-9.
pub fn dof_region_vertices(users: usize, tx_antennas: usize, alpha: f64) -> Vec<Vec<f64>> {
    assert!(users <= 8, "vertex enumeration limited to K <= 8");
    let cons = mixed_outer_inequalities(users, tx_antennas, alpha);
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let mut subset: Vec<usize> = (0..users).collect();

    loop {
        if let Some(point) = solve_active_set(&cons, &subset, users) {
            if cons.iter().all(|c| c.satisfied(&point, 1e-9))
                && !vertices.iter().any(|v| close(v, &point, 1e-9))
            {
                vertices.push(point);
            }
        }
        if !next_combination(&mut subset, cons.len()) {
            break;
        }
    }
    vertices
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Advances `subset` to the next K-combination of `0..n`; false when done.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn solve_active_set(
    cons: &[LinearInequality],
    subset: &[usize],
    n: usize,
) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = subset.iter().map(|&i| cons[i].coeffs.clone()).collect();
    let mut b: Vec<f64> = subset.iter().map(|&i| cons[i].rhs).collect();
    // Gaussian elimination with partial pivoting.
    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if pivot_mag < 1e-12 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    // Adding 0.0 canonicalizes any -0.0 the elimination produced.
    Some((0..n).map(|i| b[i] / a[i][i] + 0.0).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum SlopeError {
    /// Fewer than 4 samples.
    TooFewPoints(usize),
    /// Grid spans fewer than 4 decades of power.
    InsufficientSpan(f64),
}

impl fmt::Display for SlopeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlopeError::TooFewPoints(n) => write!(f, "slope fit needs >= 4 points, got {n}"),
            SlopeError::InsufficientSpan(d) => {
                write!(f, "slope fit needs >= 4 decades of power, got {d:.2}")
            }
        }
    }
}

/// Finite-P surrogate of the DoF limit.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    /// Least-squares slope of rate against log2 P over the whole grid.
    pub slope: f64,
    pub intercept: f64,
    /// Two-point slope across the top decade; diverges from `slope` when
    /// the rate curve is still bending, so it serves as a saturation
    /// diagnostic.
    pub top_decade_slope: f64,
}

/// Least-squares DoF slope from `(P, rate bits/use)` samples.
pub fn estimate_dof_slope(samples: &[(f64, f64)]) -> Result<SlopeFit, SlopeError> {
    if samples.len() < 4 {
        return Err(SlopeError::TooFewPoints(samples.len()));
    }
    let mut sorted: Vec<(f64, f64)> = samples.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let p_lo = sorted.first().unwrap().0;
    let p_hi = sorted.last().unwrap().0;
    let decades = (p_hi / p_lo).log10();
    if decades < 4.0 - 1e-9 {
        return Err(SlopeError::InsufficientSpan(decades));
    }
    let ps: Vec<f64> = sorted.iter().map(|s| s.0).collect();
    let rs: Vec<f64> = sorted.iter().map(|s| s.1).collect();
    let (slope, intercept) = log2_slope(&ps, &rs);

    // Top decade: the trailing points within a factor of 10 of the largest P.
    let cut = p_hi / 10.0 * (1.0 - 1e-12);
    let top: Vec<&(f64, f64)> = sorted.iter().filter(|s| s.0 >= cut).collect();
    let (a, b) = if top.len() >= 2 {
        (*top[0], **top.last().unwrap())
    } else {
        (sorted[sorted.len() - 2], sorted[sorted.len() - 1])
    };
    let top_decade_slope = (b.1 - a.1) / (b.0.log2() - a.0.log2());

    Ok(SlopeFit {
        slope,
        intercept,
        top_decade_slope,
    })
}

/// Sum-DoF table over a (K, alpha) grid at fixed M.
pub fn fig3_curve(
    k_list: &[usize],
    alpha_grid: &[f64],
    tx_antennas: usize,
) -> Result<Vec<DofPoint>, ConfigError> {
    let mut out = Vec::with_capacity(k_list.len() * alpha_grid.len());
    for &k in k_list {
        for &alpha in alpha_grid {
            out.push(DofPoint::eval(k, tx_antennas, alpha)?);
        }
    }
    Ok(out)
}
