//! Small dense complex linear algebra helpers shared across modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense complex matrix used for every fiber and model block in this crate.
pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn cm(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Operator 2-norm (largest singular value). Zero-sized matrices have norm 0.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Singular values sorted in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Eigenvalues of a general complex square matrix from its Schur form.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    assert_eq!(m.nrows(), m.ncols(), "eigenvalues need a square matrix");
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let (_, t) = m.clone().schur().unpack();
    (0..n).map(|k| t[(k, k)]).collect()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    assert_eq!(m.nrows(), m.ncols());
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Deviation of `u` from unitarity, `max |u*u - id|`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let n = u.ncols();
    let id = CMatrix::identity(n, n);
    max_abs(&(u.adjoint() * u - id))
}

/// Rank via a fully pivoted LU decomposition. This is an independent route
/// from the SVD rank used by the index machinery; tests use it as an oracle.
pub fn lu_rank(m: &CMatrix, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let lu = m.clone().full_piv_lu();
    let u = lu.u();
    (0..u.nrows().min(u.ncols()))
        .filter(|&k| u[(k, k)].norm() > tol)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_norm_of_identity() {
        let id = CMatrix::identity(4, 4);
        assert!((op_norm(&id) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_swap() {
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let mut ev: Vec<f64> = eigenvalues(&m).iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] + 1.0).abs() < 1e-12);
        assert!((ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lu_rank_detects_deficiency() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ONE, ONE]);
        assert_eq!(lu_rank(&m, 1e-12), 1);
    }
}
