//! Dense solves with condition estimates and SVD-based rank tools.

use nalgebra::{DMatrix, DVector, Matrix3};

use crate::error::{Error, Result};
use crate::hermitian::{Complex, Mat3, Vec3};

pub(crate) fn to_na(m: &Mat3) -> Matrix3<Complex> {
    Matrix3::from_fn(|i, j| m[(i, j)])
}

/// Singular values in decreasing order.
pub fn singular_values(m: &Mat3) -> [f64; 3] {
    let s = to_na(m).singular_values();
    let mut v = [s[0], s[1], s[2]];
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Right singular vectors ordered by decreasing singular value, with the values.
pub fn svd(m: &Mat3) -> ([f64; 3], [Vec3; 3]) {
    let svd = to_na(m).svd(false, true);
    let vt = svd.v_t.expect("requested V^H");
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let vals = idx.map(|k| svd.singular_values[k]);
    let vecs = idx.map(|k| Vec3(std::array::from_fn(|j| vt[(k, j)].conj())));
    (vals, vecs)
}

/// Unit vector spanning the (numerical) kernel direction of least stretch.
pub fn null_vector(m: &Mat3) -> Vec3 {
    svd(m).1[2].canonical()
}

/// Orthonormal basis of the numerical kernel: right singular vectors whose
/// singular value is at most `rel * max(1, sigma_max)`.
pub fn null_space(m: &Mat3, rel: f64) -> Vec<Vec3> {
    let (vals, vecs) = svd(m);
    let cut = rel * vals[0].max(1.0);
    (0..3).filter(|&k| vals[k] <= cut).map(|k| vecs[k]).collect()
}

/// Outcome of a square solve.
#[derive(Clone, Debug)]
pub struct Solution {
    pub x: Vec<Complex>,
    /// Reciprocal 1-norm condition number.
    pub rcond: f64,
}

/// Solves `a x = b` by partially pivoted LU, refusing when the reciprocal
/// condition number falls below `floor`.
pub fn solve(a: &DMatrix<Complex>, b: &[Complex], floor: f64) -> Result<Solution> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(n, b.len());
    let lu = a.clone().lu();
    let inv = lu.try_inverse().ok_or_else(|| Error::ill("singular system"))?;
    let rcond = 1.0 / (norm1(a) * norm1(&inv));
    if !(rcond >= floor) {
        return Err(Error::ill(format!("reciprocal condition {rcond:.3e} below {floor:.1e}")));
    }
    let x = a.clone().lu().solve(&DVector::from_column_slice(b)).ok_or_else(|| Error::ill("singular system"))?;
    Ok(Solution { x: x.iter().copied().collect(), rcond })
}

/// Convenience wrapper for 3×3 systems.
pub fn solve3(a: &Mat3, b: [Complex; 3], floor: f64) -> Result<([Complex; 3], f64)> {
    let m = DMatrix::from_fn(3, 3, |i, j| a[(i, j)]);
    let s = solve(&m, &b, floor)?;
    Ok(([s.x[0], s.x[1], s.x[2]], s.rcond))
}

fn norm1(a: &DMatrix<Complex>) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Numerical rank with relative threshold.
pub fn rank(a: &DMatrix<Complex>, rel: f64) -> usize {
    let s = a.clone().singular_values();
    let top = s.iter().copied().fold(0.0, f64::max);
    s.iter().filter(|&&x| x > rel * top.max(f64::MIN_POSITIVE)).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = DMatrix::from_fn(4, 4, |i, j| c((i * 3 + j) as f64 % 5.0 + if i == j { 4.0 } else { 0.0 }, j as f64 * 0.1));
        let x0 = [c(1.0, -1.0), c(0.5, 2.0), c(-3.0, 0.0), c(0.0, 0.25)];
        let b: Vec<Complex> = (0..4).map(|i| (0..4).map(|j| a[(i, j)] * x0[j]).sum()).collect();
        let s = solve(&a, &b, 1e-12).unwrap();
        for (u, v) in s.x.iter().zip(&x0) {
            assert!((u - v).norm() < 1e-12);
        }
        assert!(s.rcond > 0.0 && s.rcond <= 1.0);
    }

    #[test]
    fn singular_system_is_refused() {
        let a = DMatrix::from_fn(2, 2, |i, _| c(i as f64 + 1.0, 0.0));
        assert!(matches!(solve(&a, &[ONE_C, ONE_C], 1e-12), Err(Error::IllConditioned { .. })));
    }

    const ONE_C: Complex = Complex::new(1.0, 0.0);

    #[test]
    fn kernel_of_rank_one() {
        let m = Mat3::from_real([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 0.0]]);
        let ker = null_space(&m, 1e-10);
        assert_eq!(ker.len(), 2);
        for v in ker {
            assert!(m.apply(&v).norm() < 1e-12);
        }
        let s = singular_values(&m);
        assert!(s[0] >= s[1] && s[1] >= s[2]);
    }
}
