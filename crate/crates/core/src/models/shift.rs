//! Truncated shift and Toeplitz models.
//!
//! The shift-by-two `T(x₁,x₂,x₃,...) = (x₃,x₄,...)` is modeled as the
//! rectangular coordinate projection `C^N -> C^{N-2}`: the codomain-truncated
//! model has kernel dimension exactly 2 and zero cokernel at every `N`
//! (a square zero-padded truncation would force index 0 artificially).
//!
//! A Toeplitz operator with nonvanishing symbol `a` of winding number `w` is
//! compressed the same way: domain `span{z^0..z^{N-1}}`, codomain
//! `span{z^0..z^{N+w-1}}`, entries `c_{j-k}`. The rectangle reproduces the
//! Fredholm kernel/cokernel (`dim Ker = max(0,-w)`, `dim Coker = max(0,w)`)
//! exactly up to exponentially small truncation effects.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{GroupDesc, IrrepLabel};
use crate::linalg::{CMatrix, ONE};

use super::{IsotypicBlockOperator, ModelMetadata};

/// The shift-by-two model `C^n -> C^{n-2}` over the trivial group.
pub fn build_shift_model(n: usize) -> Result<IsotypicBlockOperator> {
    check_shift_size(n)?;
    let m = shift_matrix(n, 2);
    Ok(IsotypicBlockOperator::trivial(
        m,
        ModelMetadata::new("shift").with("n", n),
    ))
}

/// The shift-by-two model with the pair-swap `Z₂` action
/// `q(x₁,x₂,x₃,x₄,...) = (x₂,x₁,x₄,x₃,...)`.
///
/// In the basis of swap eigenvectors `(e_{2k-1} ± e_{2k})/√2` the operator
/// splits into two label-diagonal blocks, each a shift-by-one
/// `C^{n/2} -> C^{n/2-1}`, so the kernel decomposes as `V₀ ⊕ V₁`.
pub fn build_shift_model_z2(n: usize) -> Result<IsotypicBlockOperator> {
    check_shift_size(n)?;
    let half = n / 2;
    let group = GroupDesc::Cyclic(2);
    let mut blocks = BTreeMap::new();
    for j in 0..2u32 {
        blocks.insert(
            IrrepLabel::Residue(j),
            (IrrepLabel::Residue(j), shift_matrix(half, 1)),
        );
    }
    IsotypicBlockOperator::new(
        group,
        vec![
            (IrrepLabel::Residue(0), half),
            (IrrepLabel::Residue(1), half),
        ],
        vec![
            (IrrepLabel::Residue(0), half - 1),
            (IrrepLabel::Residue(1), half - 1),
        ],
        blocks,
        false,
        ModelMetadata::new("shift_z2").with("n", n),
    )
}

fn check_shift_size(n: usize) -> Result<()> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "shift model needs an even n >= 4 (the pairing breaks otherwise), got {n}"
        )));
    }
    Ok(())
}

/// `(n - by) × n` matrix dropping the first `by` coordinates.
fn shift_matrix(n: usize, by: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n - by, n);
    for j in 0..n - by {
        m[(j, j + by)] = ONE;
    }
    m
}

/// Winding number of the finite Laurent symbol `a(z) = Σ c_j z^j` around the
/// origin, by argument tracking over a fine sampling of the unit circle.
/// Errors if the symbol vanishes (the operator would not be Fredholm).
pub fn symbol_winding(coeffs: &[(i64, Complex64)]) -> Result<i64> {
    if coeffs.is_empty() {
        return Err(Error::VanishingSymbol { min_abs: 0.0 });
    }
    let max_degree = coeffs
        .iter()
        .map(|(j, _)| j.unsigned_abs())
        .max()
        .unwrap_or(0);
    let samples = 256.max(32 * max_degree as usize);
    let eval = |theta: f64| -> Complex64 {
        coeffs
            .iter()
            .map(|&(j, c)| c * Complex64::from_polar(1.0, j as f64 * theta))
            .sum()
    };
    let values: Vec<Complex64> = (0..samples)
        .map(|k| eval(2.0 * std::f64::consts::PI * k as f64 / samples as f64))
        .collect();
    let max_abs = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let min_abs = values
        .iter()
        .map(|v| v.norm())
        .fold(f64::INFINITY, f64::min);
    if min_abs <= 1e-8 * max_abs.max(1e-300) {
        return Err(Error::VanishingSymbol { min_abs });
    }
    let mut total = 0.0;
    for k in 0..samples {
        let next = values[(k + 1) % samples];
        total += (next / values[k]).arg();
    }
    let w = total / (2.0 * std::f64::consts::PI);
    let rounded = w.round();
    if (w - rounded).abs() > 1e-6 {
        return Err(Error::Model(format!(
            "winding number did not converge: {w}"
        )));
    }
    Ok(rounded as i64)
}

/// Toeplitz model of a nonvanishing finite Fourier symbol, compressed to the
/// winding-adapted rectangle `C^n -> C^{n+w}`.
pub fn build_toeplitz_model(
    coeffs: &[(i64, Complex64)],
    n: usize,
) -> Result<IsotypicBlockOperator> {
    let w = symbol_winding(coeffs)?;
    let rows = n as i64 + w;
    if n == 0 || rows < 1 {
        return Err(Error::InvalidParameter(format!(
            "truncation n = {n} too small for winding {w}"
        )));
    }
    let rows = rows as usize;
    let mut table: BTreeMap<i64, Complex64> = BTreeMap::new();
    for &(j, c) in coeffs {
        *table.entry(j).or_insert(Complex64::new(0.0, 0.0)) += c;
    }
    let mut m = CMatrix::zeros(rows, n);
    for r in 0..rows {
        for k in 0..n {
            if let Some(c) = table.get(&(r as i64 - k as i64)) {
                m[(r, k)] = *c;
            }
        }
    }
    let meta = ModelMetadata::new("toeplitz")
        .with("n", n)
        .with("winding", w)
        .with("symbol", format_symbol(coeffs));
    Ok(IsotypicBlockOperator::trivial(m, meta))
}

fn format_symbol(coeffs: &[(i64, Complex64)]) -> String {
    coeffs
        .iter()
        .map(|(j, c)| format!("({:+.3}{:+.3}i)z^{}", c.re, c.im, j))
        .collect::<Vec<_>>()
        .join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, lu_rank};

    #[test]
    fn shift_n4_is_the_coordinate_projection() {
        let m = build_shift_model(4).unwrap().dense();
        let expected = CMatrix::from_row_slice(
            2,
            4,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                ONE,
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                ONE,
            ],
        );
        assert_eq!(m, expected);
    }

    #[test]
    fn shift_kernel_is_exactly_two_at_every_n() {
        for n in [4, 10, 20, 64] {
            let m = build_shift_model(n).unwrap().dense();
            // independent oracle: LU rank
            let rank = lu_rank(&m, 1e-12);
            assert_eq!(m.ncols() - rank, 2, "kernel at n = {n}");
            assert_eq!(m.nrows() - rank, 0, "cokernel at n = {n}");
        }
    }

    #[test]
    fn shift_rejects_odd_or_tiny_n() {
        assert!(build_shift_model(3).is_err());
        assert!(build_shift_model(7).is_err());
        assert!(build_shift_model(2).is_err());
    }

    #[test]
    fn z2_shift_blocks_are_shift_by_one() {
        let model = build_shift_model_z2(20).unwrap();
        model.validate().unwrap();
        for j in 0..2u32 {
            let (target, block) = model.block(&IrrepLabel::Residue(j)).unwrap();
            assert_eq!(*target, IrrepLabel::Residue(j));
            assert_eq!(block.shape(), (9, 10));
            let rank = lu_rank(block, 1e-12);
            assert_eq!(block.ncols() - rank, 1); // kernel V_j
            assert_eq!(block.nrows() - rank, 0); // trivial cokernel
        }
    }

    #[test]
    fn winding_of_monomials() {
        for k in 1..=3i64 {
            assert_eq!(symbol_winding(&[(k, ONE)]).unwrap(), k);
            assert_eq!(symbol_winding(&[(-k, ONE)]).unwrap(), -k);
        }
    }

    #[test]
    fn winding_of_dominated_sum_is_zero() {
        // 2 + z never encircles the origin
        let w = symbol_winding(&[(0, ONE * 2.0), (1, ONE)]).unwrap();
        assert_eq!(w, 0);
    }

    #[test]
    fn vanishing_symbol_is_rejected() {
        // 1 + z vanishes at z = -1
        assert!(matches!(
            build_toeplitz_model(&[(0, ONE), (1, ONE)], 16),
            Err(Error::VanishingSymbol { .. })
        ));
    }

    #[test]
    fn toeplitz_zbar2_contains_shift_model() {
        let toeplitz = build_toeplitz_model(&[(-2, ONE)], 16).unwrap().dense();
        let shift = build_shift_model(16).unwrap().dense();
        // identical on the common rectangular sub-block
        assert_eq!(toeplitz.shape(), (14, 16));
        let dev = linalg::max_abs(&(toeplitz.rows(0, 14) - shift.rows(0, 14)));
        assert!(dev < 1e-15);
    }

    #[test]
    fn toeplitz_rank_matches_winding() {
        // dense rank oracle: ker = max(0,-w), coker = max(0,w)
        for (coeffs, w) in [
            (vec![(1i64, ONE)], 1i64),
            (vec![(-2, ONE)], -2),
            (vec![(0, ONE * 2.0), (1, ONE)], 0),
            (vec![(-1, ONE), (0, ONE * 0.5)], -1),
        ] {
            let m = build_toeplitz_model(&coeffs, 32).unwrap().dense();
            let rank = lu_rank(&m, 1e-10);
            assert_eq!(
                m.ncols() - rank,
                usize::try_from((-w).max(0)).unwrap(),
                "ker w={w}"
            );
            assert_eq!(
                m.nrows() - rank,
                usize::try_from(w.max(0)).unwrap(),
                "coker w={w}"
            );
        }
    }
}
