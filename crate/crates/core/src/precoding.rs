//! Unit-power zero-forcing and random beamformers.
//!
//! ZF beamformers null a stream at one receiver's *estimated* channel row;
//! the residual leakage through the true row then scales as `P^(-alpha)`,
//! which is what places the own-stream term at the noise floor. Random
//! beamformers carry the full-power layers and are drawn independently of
//! every estimate.

use crate::cmat::{cdot, norm, Mat2, Vec2, C64, ZERO_M2, ZERO_V2};
use crate::rng::complex_gaussian;
use core::fmt;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamKind {
    Zf,
    RandomVector,
    RandomMatrix,
}

/// A unit-norm beamforming vector, or a matrix of unit-norm columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub kind: BeamKind,
    /// Effective dimension of each column.
    pub dim: usize,
    /// Number of active columns (1 for vectors, `dim` for matrices).
    pub cols: usize,
    /// Column-major storage; `mat[c]` is column c.
    mat: Mat2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrecodingError {
    /// ZF needs a nontrivial null space, i.e. m = 2.
    DimensionTooSmall,
    /// Estimate row too close to zero to define a null direction.
    DegenerateEstimate,
}

impl fmt::Display for PrecodingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrecodingError::DimensionTooSmall => {
                write!(f, "zero-forcing needs effective dimension 2")
            }
            PrecodingError::DegenerateEstimate => {
                write!(f, "estimate row norm below 1e-9, null direction undefined")
            }
        }
    }
}

impl Beamformer {
    /// Builds a beamformer from explicit columns. Norms are the caller's
    /// responsibility; intended for tests and fixed reference beams.
    pub fn from_columns(kind: BeamKind, dim: usize, cols: &[Vec2]) -> Beamformer {
        assert!((1..=2).contains(&dim) && !cols.is_empty() && cols.len() <= 2);
        let mut mat = ZERO_M2;
        for (c, col) in cols.iter().enumerate() {
            mat[c] = *col;
        }
        Beamformer {
            kind,
            dim,
            cols: cols.len(),
            mat,
        }
    }

    /// Column `c` as a vector.
    pub fn col(&self, c: usize) -> &Vec2 {
        debug_assert!(c < self.cols);
        &self.mat[c]
    }

    /// The single column of a vector beamformer.
    pub fn vector(&self) -> &Vec2 {
        debug_assert_eq!(self.cols, 1);
        &self.mat[0]
    }

    /// Row-major matrix view `R[i][k]` over the active block.
    pub fn matrix(&self) -> Mat2 {
        let mut r = ZERO_M2;
        for c in 0..self.cols {
            for i in 0..self.dim {
                r[i][c] = self.mat[c][i];
            }
        }
        r
    }
}

/// Unit-power ZF beamformer `p` with `h_hat^H p = 0`.
///
/// The null direction in C^2 is unique up to phase; the phase is fixed so
/// the first nonzero component is real nonnegative, making outputs
/// reproducible and directly comparable in tests.
pub fn zf_beamformer(h_hat_row: &Vec2, dim: usize) -> Result<Beamformer, PrecodingError> {
    if dim < 2 {
        return Err(PrecodingError::DimensionTooSmall);
    }
    let n = norm(h_hat_row, 2);
    if n <= 1e-9 {
        return Err(PrecodingError::DegenerateEstimate);
    }
    let mut p = [-h_hat_row[1].conj() / n, h_hat_row[0].conj() / n];
    fix_phase(&mut p);
    let mut mat = ZERO_M2;
    mat[0] = p;
    Ok(Beamformer {
        kind: BeamKind::Zf,
        dim: 2,
        cols: 1,
        mat,
    })
}

/// `m x m` random beamformer with independent unit-norm columns.
pub fn random_beamformer_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Beamformer {
    assert!(dim == 1 || dim == 2);
    let mut mat = ZERO_M2;
    for c in 0..dim {
        mat[c] = random_unit(dim, rng);
    }
    Beamformer {
        kind: BeamKind::RandomMatrix,
        dim,
        cols: dim,
        mat,
    }
}

/// Single unit-norm random beam vector.
pub fn random_beam_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Beamformer {
    assert!(dim == 1 || dim == 2);
    let mut mat = ZERO_M2;
    mat[0] = random_unit(dim, rng);
    Beamformer {
        kind: BeamKind::RandomVector,
        dim,
        cols: 1,
        mat,
    }
}

/// i.i.d. complex Gaussian entries, then column normalization. Any
/// continuous distribution works here; unit power is the only requirement.
fn random_unit<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec2 {
    loop {
        let mut v = ZERO_V2;
        for e in v.iter_mut().take(dim) {
            *e = complex_gaussian(rng, 1.0);
        }
        let n = norm(&v, dim);
        if n > 1e-12 {
            for e in v.iter_mut().take(dim) {
                *e /= n;
            }
            return v;
        }
    }
}

fn fix_phase(v: &mut Vec2) {
    for k in 0..2 {
        let mag = v[k].norm();
        if mag > 1e-12 {
            let phase = v[k] / mag;
            let corr = phase.conj();
            v[0] *= corr;
            v[1] *= corr;
            v[k] = C64::new(mag, 0.0);
            return;
        }
    }
}

/// Leakage of a beamformer through a channel row: `|h^H p|^2`.
pub fn leakage(h_row: &Vec2, beam: &Beamformer) -> f64 {
    cdot(h_row, beam.vector(), beam.dim).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmat::norm_sq;
    use crate::rng::{stream_rng, StreamDomain};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zf_of_basis_row() {
        let p = zf_beamformer(&[c(1.0, 0.0), c(0.0, 0.0)], 2).unwrap();
        assert!((p.vector()[0]).norm() < 1e-15);
        assert!((p.vector()[1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zf_of_diagonal_row() {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let p = zf_beamformer(&[c(s, 0.0), c(s, 0.0)], 2).unwrap();
        assert!((p.vector()[0] - c(s, 0.0)).norm() < 1e-12);
        assert!((p.vector()[1] - c(-s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn zf_rejects_small_dim_and_degenerate_rows() {
        assert_eq!(
            zf_beamformer(&[c(1.0, 0.0), c(0.0, 0.0)], 1),
            Err(PrecodingError::DimensionTooSmall)
        );
        assert_eq!(
            zf_beamformer(&[c(1e-10, 0.0), c(0.0, 0.0)], 2),
            Err(PrecodingError::DegenerateEstimate)
        );
    }

    #[test]
    fn zf_orthogonality_and_norm_sweep() {
        let mut rng = stream_rng(11, StreamDomain::SlotChannel, 0, 0, 0);
        for _ in 0..1000 {
            let h = [complex_gaussian(&mut rng, 1.0), complex_gaussian(&mut rng, 1.0)];
            let p = zf_beamformer(&h, 2).unwrap();
            assert!(cdot(&h, p.vector(), 2).norm() < 1e-10);
            assert!((norm_sq(p.vector(), 2) - 1.0).abs() < 1e-12);
            // Phase convention: first component real nonnegative (or zero).
            let v = p.vector();
            let first = if v[0].norm() > 1e-12 { v[0] } else { v[1] };
            assert!(first.im.abs() < 1e-12 && first.re >= 0.0);
        }
    }

    #[test]
    fn random_vector_m1_has_unit_modulus() {
        let mut rng = stream_rng(3, StreamDomain::SlotChannel, 0, 0, 0);
        let b = random_beam_vector(1, &mut rng);
        assert!((b.vector()[0].norm() - 1.0).abs() < 1e-12);
        assert_eq!(b.vector()[1], c(0.0, 0.0));
    }

    #[test]
    fn random_matrix_full_rank_over_draws() {
        let mut rng = stream_rng(4, StreamDomain::SlotChannel, 0, 0, 0);
        for _ in 0..10_000 {
            let b = random_beamformer_matrix(2, &mut rng);
            for col in 0..2 {
                assert!((norm_sq(b.col(col), 2) - 1.0).abs() < 1e-12);
            }
            let cond = crate::cmat::cond2(&b.matrix());
            assert!(cond.is_finite());
        }
    }

    #[test]
    fn random_draws_deterministic_under_fixed_stream() {
        let mut a = stream_rng(5, StreamDomain::SlotChannel, 1, 2, 3);
        let mut b = stream_rng(5, StreamDomain::SlotChannel, 1, 2, 3);
        assert_eq!(
            random_beamformer_matrix(2, &mut a),
            random_beamformer_matrix(2, &mut b)
        );
        assert_eq!(random_beam_vector(2, &mut a), random_beam_vector(2, &mut b));
    }
}
