//! Small complex linear-algebra kernels.
//!
//! Every vector in the transmit space lives in at most two dimensions
//! (the effective dimension m = min{M, 2}), so vectors are fixed
//! `[C64; 2]` arrays and matrices are row-major `[[C64; 2]; 2]`, with the
//! active dimension `m` passed explicitly. Entries beyond `m` are zero.

use num_complex::Complex;
// Float math for no_std builds; shadowed by std's inherent methods in test builds.
#[allow(unused_imports)]
use num_traits::Float;

pub type C64 = Complex<f64>;

pub type Vec2 = [C64; 2];
pub type Mat2 = [[C64; 2]; 2];

pub const ZERO_V2: Vec2 = [Complex::new(0.0, 0.0); 2];
pub const ZERO_M2: Mat2 = [ZERO_V2; 2];

/// Hermitian inner product `a^H b` over the first `m` entries.
#[inline]
pub fn cdot(a: &Vec2, b: &Vec2, m: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..m {
        acc += a[i].conj() * b[i];
    }
    acc
}

#[inline]
pub fn norm_sq(a: &Vec2, m: usize) -> f64 {
    let mut acc = 0.0;
    for x in a.iter().take(m) {
        acc += x.norm_sqr();
    }
    acc
}

#[inline]
pub fn norm(a: &Vec2, m: usize) -> f64 {
    norm_sq(a, m).sqrt()
}

pub fn scale(a: &Vec2, s: f64) -> Vec2 {
    [a[0] * s, a[1] * s]
}

pub fn add_assign(a: &mut Vec2, b: &Vec2) {
    a[0] += b[0];
    a[1] += b[1];
}

/// Row-vector product `h^H A`, returning the resulting row of length `m`.
pub fn row_times_mat(h: &Vec2, a: &Mat2, m: usize) -> Vec2 {
    let mut out = ZERO_V2;
    for k in 0..m {
        for i in 0..m {
            out[k] += h[i].conj() * a[i][k];
        }
    }
    out
}

/// Matrix-vector product `A x` over the leading `m`-block.
pub fn mat_times_vec(a: &Mat2, x: &Vec2, m: usize) -> Vec2 {
    let mut out = ZERO_V2;
    for i in 0..m {
        for k in 0..m {
            out[i] += a[i][k] * x[k];
        }
    }
    out
}

pub fn det2(g: &Mat2) -> C64 {
    g[0][0] * g[1][1] - g[0][1] * g[1][0]
}

/// Singular values of a 2x2 complex matrix, returned as `(s_max, s_min)`.
///
/// Computed from the eigenvalues of `G^H G`, which is Hermitian PSD.
pub fn singular_values2(g: &Mat2) -> (f64, f64) {
    // Entries of G^H G.
    let a = g[0][0].norm_sqr() + g[1][0].norm_sqr();
    let d = g[0][1].norm_sqr() + g[1][1].norm_sqr();
    let c = g[0][0].conj() * g[0][1] + g[1][0].conj() * g[1][1];
    let mid = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + c.norm_sqr()).sqrt();
    let hi = (mid + rad).max(0.0);
    let lo = (mid - rad).max(0.0);
    (hi.sqrt(), lo.sqrt())
}

/// Condition number of a 2x2 matrix; `f64::INFINITY` when singular.
pub fn cond2(g: &Mat2) -> f64 {
    let (hi, lo) = singular_values2(g);
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Solves `G x = b` for a 2x2 system by Cramer's rule.
///
/// Returns `None` when the determinant underflows to zero.
pub fn solve2(g: &Mat2, b: &Vec2) -> Option<Vec2> {
    let det = det2(g);
    if det.norm_sqr() == 0.0 {
        return None;
    }
    let x0 = (b[0] * g[1][1] - b[1] * g[0][1]) / det;
    let x1 = (g[0][0] * b[1] - g[1][0] * b[0]) / det;
    Some([x0, x1])
}

/// Inverse of a 2x2 matrix; `None` when singular.
pub fn inv2(g: &Mat2) -> Option<Mat2> {
    let det = det2(g);
    if det.norm_sqr() == 0.0 {
        return None;
    }
    Some([
        [g[1][1] / det, -g[0][1] / det],
        [-g[1][0] / det, g[0][0] / det],
    ])
}

/// Eigen-decomposition of a Hermitian matrix over its leading `m`-block.
///
/// Returns eigenvalues (ascending) and the matching unit eigenvectors as
/// columns. The input's strict Hermitian part is used; callers symmetrize
/// beforehand if their matrix only holds up to round-off.
pub fn herm_eig2(h: &Mat2, m: usize) -> ([f64; 2], Mat2) {
    if m == 1 {
        let mut vecs = ZERO_M2;
        vecs[0][0] = C64::new(1.0, 0.0);
        return ([h[0][0].re, 0.0], vecs);
    }
    let a = h[0][0].re;
    let d = h[1][1].re;
    let c = h[0][1];
    let mid = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + c.norm_sqr()).sqrt();
    let lo = mid - rad;
    let hi = mid + rad;

    let mut vecs = ZERO_M2;
    if c.norm_sqr() == 0.0 {
        // Already diagonal; order the basis vectors by eigenvalue.
        let (i_lo, i_hi) = if a <= d { (0, 1) } else { (1, 0) };
        vecs[i_lo][0] = C64::new(1.0, 0.0);
        vecs[i_hi][1] = C64::new(1.0, 0.0);
        return ([a.min(d), a.max(d)], vecs);
    }
    for (j, lambda) in [lo, hi].iter().enumerate() {
        // (H - lambda I) v = 0  =>  v = (c, lambda - a) up to scale.
        let mut v = [c, C64::new(lambda - a, 0.0)];
        let n = norm(&v, 2);
        v[0] /= n;
        v[1] /= n;
        vecs[0][j] = v[0];
        vecs[1][j] = v[1];
    }
    ([lo, hi], vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cdot_conjugates_left_argument() {
        let a = [c(0.0, 1.0), c(0.0, 0.0)];
        let b = [c(0.0, 1.0), c(0.0, 0.0)];
        // (i)^H (i) = 1
        let d = cdot(&a, &b, 2);
        assert!((d.re - 1.0).abs() < 1e-15 && d.im.abs() < 1e-15);
    }

    #[test]
    fn solve2_recovers_solution() {
        let g = [[c(1.0, 1.0), c(2.0, -1.0)], [c(0.0, 1.0), c(1.0, 1.0)]];
        let x = [c(0.3, -0.7), c(1.1, 0.2)];
        let b = [
            g[0][0] * x[0] + g[0][1] * x[1],
            g[1][0] * x[0] + g[1][1] * x[1],
        ];
        let got = solve2(&g, &b).unwrap();
        assert!((got[0] - x[0]).norm() < 1e-12);
        assert!((got[1] - x[1]).norm() < 1e-12);
    }

    #[test]
    fn solve2_detects_singular() {
        let g = [[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        assert!(solve2(&g, &[c(1.0, 0.0), c(1.0, 0.0)]).is_none());
        assert_eq!(cond2(&g), f64::INFINITY);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let g = [[c(3.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(5.0, 0.0)]];
        let (hi, lo) = singular_values2(&g);
        assert!((hi - 5.0).abs() < 1e-12);
        assert!((lo - 3.0).abs() < 1e-12);
    }

    #[test]
    fn herm_eig_reconstructs_matrix() {
        let h = [[c(2.0, 0.0), c(0.5, -0.3)], [c(0.5, 0.3), c(1.0, 0.0)]];
        let (vals, vecs) = herm_eig2(&h, 2);
        assert!(vals[0] <= vals[1]);
        // H v_j = lambda_j v_j
        for j in 0..2 {
            let v = [vecs[0][j], vecs[1][j]];
            let hv = mat_times_vec(&h, &v, 2);
            for i in 0..2 {
                assert!((hv[i] - v[i] * vals[j]).norm() < 1e-12);
            }
        }
        // Eigenvectors orthonormal.
        let v0 = [vecs[0][0], vecs[1][0]];
        let v1 = [vecs[0][1], vecs[1][1]];
        assert!((norm(&v0, 2) - 1.0).abs() < 1e-12);
        assert!(cdot(&v0, &v1, 2).norm() < 1e-12);
    }

    #[test]
    fn herm_eig_diagonal_input() {
        let h = [[c(4.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
        let (vals, vecs) = herm_eig2(&h, 2);
        assert_eq!(vals, [-1.0, 4.0]);
        // Columns stay unit norm.
        assert!((norm(&[vecs[0][0], vecs[1][0]], 2) - 1.0).abs() < 1e-15);
    }
}
