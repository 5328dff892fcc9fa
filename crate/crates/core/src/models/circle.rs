//! Operators on the circle in a Fourier basis, and the product model.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{GroupDesc, IrrepLabel};
use crate::linalg::{CMatrix, I};

use super::{IsotypicBlockOperator, ModelMetadata};

/// `-i d/dt + p(t)` on the circle in the basis `e^{ikt}`, `|k| <= cutoff`:
/// the diagonal Fourier multiplier `k` plus the convolution matrix of the
/// finite Fourier potential `p = Σ p_m e^{imt}`.
pub fn build_circle_model(
    potential: &[(i64, Complex64)],
    cutoff: usize,
) -> Result<IsotypicBlockOperator> {
    let max_harmonic = potential
        .iter()
        .map(|(m, _)| m.unsigned_abs())
        .max()
        .unwrap_or(0);
    if (cutoff as u64) < 2 * max_harmonic {
        return Err(Error::InvalidParameter(format!(
            "cutoff {cutoff} below twice the highest potential harmonic {max_harmonic}"
        )));
    }
    let k = cutoff as i64;
    let dim = 2 * cutoff + 1;
    let mut m = CMatrix::zeros(dim, dim);
    for p in -k..=k {
        let row = (p + k) as usize;
        m[(row, row)] += Complex64::new(p as f64, 0.0);
        for &(h, c) in potential {
            let q = p - h; // convolution: (p(t)·u)_p picks up c_h u_{p-h}
            if q.abs() <= k {
                m[(row, (q + k) as usize)] += c;
            }
        }
    }
    let meta = ModelMetadata::new("circle_first_order")
        .with("cutoff", cutoff)
        .with("harmonics", potential.len());
    Ok(IsotypicBlockOperator::trivial(m, meta))
}

/// Fourier coefficients of `sin t`: `±1/(2i)` at harmonics `±1`. The standard
/// potential of the circle example and the stability/homotopy suites.
pub fn sin_potential() -> Vec<(i64, Complex64)> {
    vec![(1, -I * 0.5), (-1, I * 0.5)]
}

/// The graded de Rham-Dirac model on the circle: `E⁺` the 0-forms, `E⁻` the
/// 1-forms, Fourier mode `e^{ikt}` labeled by `k` on both sides, and the
/// `D⁺ = d` block acting per mode as multiplication by `ik`.
///
/// With `deformed`, adds `i·c(v)` for the generating field of the circle
/// acting on itself (`f ≡ 1`), shifting the per-mode block to `i(k+1)`.
pub fn build_derham_circle_model(cutoff: usize, deformed: bool) -> Result<IsotypicBlockOperator> {
    if cutoff < 4 {
        return Err(Error::InvalidParameter(format!(
            "de Rham circle model needs cutoff >= 4, got {cutoff}"
        )));
    }
    let k = cutoff as i64;
    let mut blocks = BTreeMap::new();
    let mut labels = Vec::new();
    for mode in -k..=k {
        let entry = if deformed { mode + 1 } else { mode };
        let block = CMatrix::from_element(1, 1, I * entry as f64);
        blocks.insert(IrrepLabel::Weight(mode), (IrrepLabel::Weight(mode), block));
        labels.push((IrrepLabel::Weight(mode), 1));
    }
    let meta = ModelMetadata::new(if deformed {
        "derham_circle_deformed"
    } else {
        "derham_circle"
    })
    .with("cutoff", cutoff)
    .with_offset(0)
    .windowed();
    IsotypicBlockOperator::new(
        GroupDesc::Circle,
        labels.clone(),
        labels,
        blocks,
        true,
        meta,
    )
}

/// The product model on `N × S¹`: the base operator acts along `N` only, so
/// the circle-weight decomposition has one copy of the base matrix per weight
/// `m ∈ [-cutoff, cutoff]`, each weight with multiplicity `dim V = 1`.
pub fn build_product_model(
    base: &IsotypicBlockOperator,
    cutoff: usize,
) -> Result<IsotypicBlockOperator> {
    if cutoff < 1 {
        return Err(Error::InvalidParameter(
            "product model needs cutoff >= 1".into(),
        ));
    }
    if base.group() != GroupDesc::Trivial {
        return Err(Error::Model(
            "product model takes a trivial-group base operator".into(),
        ));
    }
    let base_matrix = base.dense();
    let k = cutoff as i64;
    let mut blocks = BTreeMap::new();
    let mut domain = Vec::new();
    let mut codomain = Vec::new();
    for m in -k..=k {
        blocks.insert(
            IrrepLabel::Weight(m),
            (IrrepLabel::Weight(m), base_matrix.clone()),
        );
        domain.push((IrrepLabel::Weight(m), base_matrix.ncols()));
        codomain.push((IrrepLabel::Weight(m), base_matrix.nrows()));
    }
    let meta = ModelMetadata::new("product")
        .with("cutoff", cutoff)
        .with("base", &base.metadata().kind)
        .with_offset(0)
        .windowed();
    IsotypicBlockOperator::new(
        GroupDesc::Circle,
        domain,
        codomain,
        blocks,
        base.graded(),
        meta,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, lu_rank};
    use crate::models::build_shift_model;

    #[test]
    fn zero_potential_is_the_fourier_multiplier() {
        let m = build_circle_model(&[], 3).unwrap().dense();
        for (i, k) in (-3i64..=3).enumerate() {
            assert!((m[(i, i)] - Complex64::new(k as f64, 0.0)).norm() < 1e-15);
        }
        assert!((0..7).all(|i| (0..7).all(|j| i == j || m[(i, j)].norm() < 1e-15)));
    }

    #[test]
    fn sin_potential_fills_off_diagonals() {
        let model = build_circle_model(&sin_potential(), 4).unwrap();
        let m = model.dense();
        // sub-diagonal (k-1 <- convolution with e^{+it}): 1/(2i) = -i/2
        for i in 1..9 {
            assert!((m[(i, i - 1)] - (-I * 0.5)).norm() < 1e-15);
        }
        // super-diagonal: +i/2
        for i in 0..8 {
            assert!((m[(i, i + 1)] - I * 0.5).norm() < 1e-15);
        }
    }

    #[test]
    fn circle_cutoff_precondition() {
        assert!(build_circle_model(&sin_potential(), 1).is_err());
    }

    #[test]
    fn circle_kernel_matches_analytic_solution() {
        // Du = 0 has the periodic solution u = e^{i cos t}; its Fourier
        // coefficients (computed by trapezoid quadrature, spectrally exact
        // for entire integrands) should be annihilated by the matrix.
        let cutoff = 32usize;
        let model = build_circle_model(&sin_potential(), cutoff).unwrap();
        let m = model.dense();
        let dim = 2 * cutoff + 1;
        let q = 512;
        let mut coeffs = Vec::with_capacity(dim);
        for k in -(cutoff as i64)..=(cutoff as i64) {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..q {
                let t = 2.0 * std::f64::consts::PI * j as f64 / q as f64;
                let u = Complex64::from_polar(1.0, t.cos());
                acc += u * Complex64::from_polar(1.0, -(k as f64) * t);
            }
            coeffs.push(acc / q as f64);
        }
        let v = nalgebra::DVector::from_vec(coeffs);
        let residual = (&m * &v).norm() / v.norm();
        assert!(residual < 1e-10, "analytic kernel residual {residual}");
        // and the kernel is one-dimensional by the LU oracle
        let rank = lu_rank(&m, 1e-8);
        assert_eq!(dim - rank, 1);
    }

    #[test]
    fn derham_undeformed_full_kernel_dimension_two() {
        let model = build_derham_circle_model(8, false).unwrap();
        let full = model.graded_full_dense().unwrap();
        let rank = lu_rank(&full, 1e-12);
        assert_eq!(full.ncols() - rank, 2); // constants in degree 0 and 1
    }

    #[test]
    fn derham_deformed_kernel_sits_at_mode_minus_one() {
        let model = build_derham_circle_model(8, true).unwrap();
        let (target, block) = model.block(&IrrepLabel::Weight(-1)).unwrap();
        assert_eq!(*target, IrrepLabel::Weight(-1));
        assert!(linalg::max_abs(block) < 1e-15);
        let (_, nonzero) = model.block(&IrrepLabel::Weight(0)).unwrap();
        assert!((nonzero[(0, 0)] - I).norm() < 1e-15);
    }

    #[test]
    fn product_model_has_one_copy_per_weight() {
        let base = build_shift_model(8).unwrap();
        let prod = build_product_model(&base, 4).unwrap();
        prod.validate().unwrap();
        assert_eq!(prod.domain_labels().len(), 9);
        for (_, _, block) in prod.blocks() {
            assert_eq!(block, &base.dense());
        }
    }

    #[test]
    fn product_rejects_labeled_base() {
        let base = crate::models::build_shift_model_z2(8).unwrap();
        assert!(build_product_model(&base, 2).is_err());
    }
}
