//! Clifford actions and the Dirac leading symbol.
//!
//! A Clifford action of `R^n` on `C^N` is a family of matrices `c_1..c_n`
//! with `c_i c_j + c_j c_i = -2 δ_ij·Id`, so that `c(v) = Σ v_i c_i` squares
//! to `-|v|²·Id`. A grading is a basis partition `N = N⁺ + N⁻` with every
//! `c(v)` block-off-diagonal. The leading symbol of the associated Dirac
//! operator is `i·c(ξ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, I, ONE, ZERO};

/// Threshold for the algebraic identity checks; the generators are built from
/// exact constants, so only rounding error is present.
pub const ALGEBRA_TOLERANCE: f64 = 1e-12;

/// A basis partition of the fiber into even (`plus`) and odd (`minus`) parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grading {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

/// A finite family of fiber matrices realizing `c(v)² = -|v|²·Id`.
///
/// Serializes as `(vector_dim, fiber_dim, generators, grading)` with each
/// generator a row-major list of `(re, im)` pairs, for golden-file tests.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(into = "CliffordActionRepr", try_from = "CliffordActionRepr")]
pub struct CliffordAction {
    vector_dim: usize,
    fiber_dim: usize,
    generators: Vec<CMatrix>,
    grading: Option<Grading>,
}

#[derive(Serialize, Deserialize)]
struct CliffordActionRepr {
    vector_dim: usize,
    fiber_dim: usize,
    /// row-major `(re, im)` entries, one list per generator
    generators: Vec<Vec<(f64, f64)>>,
    grading: Option<Grading>,
}

impl From<CliffordAction> for CliffordActionRepr {
    fn from(a: CliffordAction) -> Self {
        let n = a.fiber_dim;
        CliffordActionRepr {
            vector_dim: a.vector_dim,
            fiber_dim: n,
            generators: a
                .generators
                .iter()
                .map(|g| {
                    let mut row_major = Vec::with_capacity(n * n);
                    for i in 0..n {
                        for j in 0..n {
                            row_major.push((g[(i, j)].re, g[(i, j)].im));
                        }
                    }
                    row_major
                })
                .collect(),
            grading: a.grading,
        }
    }
}

impl TryFrom<CliffordActionRepr> for CliffordAction {
    type Error = crate::error::Error;

    fn try_from(r: CliffordActionRepr) -> Result<Self> {
        let n = r.fiber_dim;
        let mut generators = Vec::with_capacity(r.generators.len());
        for entries in &r.generators {
            if entries.len() != n * n {
                return Err(Error::DimensionMismatch(format!(
                    "generator has {} entries, fiber dimension {n} needs {}",
                    entries.len(),
                    n * n
                )));
            }
            generators.push(CMatrix::from_fn(n, n, |i, j| {
                let (re, im) = entries[i * n + j];
                Complex64::new(re, im)
            }));
        }
        if generators.len() != r.vector_dim {
            return Err(Error::DimensionMismatch(
                "generator count vs vector dimension".into(),
            ));
        }
        CliffordAction::new(generators, r.grading)
    }
}

impl CliffordAction {
    pub fn new(generators: Vec<CMatrix>, grading: Option<Grading>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidParameter(
                "need at least one generator".into(),
            ));
        }
        let n = generators[0].nrows();
        for g in &generators {
            if g.nrows() != n || g.ncols() != n {
                return Err(Error::DimensionMismatch(
                    "generators must be square matrices of equal size".into(),
                ));
            }
        }
        if let Some(gr) = &grading {
            let mut seen: Vec<usize> = gr.plus.iter().chain(gr.minus.iter()).copied().collect();
            seen.sort_unstable();
            if seen != (0..n).collect::<Vec<_>>() {
                return Err(Error::InvalidParameter(
                    "grading must partition the fiber basis".into(),
                ));
            }
        }
        Ok(CliffordAction {
            vector_dim: generators.len(),
            fiber_dim: n,
            generators,
            grading,
        })
    }

    pub fn vector_dim(&self) -> usize {
        self.vector_dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn grading(&self) -> Option<&Grading> {
        self.grading.as_ref()
    }

    /// `c(v) = Σ v_i c_i`.
    pub fn act(&self, v: &[f64]) -> Result<CMatrix> {
        if v.len() != self.vector_dim {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} does not match vector dimension {}",
                v.len(),
                self.vector_dim
            )));
        }
        let mut out = CMatrix::zeros(self.fiber_dim, self.fiber_dim);
        for (vi, ci) in v.iter().zip(&self.generators) {
            out += ci * Complex64::new(*vi, 0.0);
        }
        Ok(out)
    }

    /// The Dirac leading symbol `i·c(ξ)`.
    pub fn dirac_symbol(&self, xi: &[f64]) -> Result<CMatrix> {
        Ok(self.act(xi)? * I)
    }

    /// The `E⁺ → E⁻` block of a fiber matrix, rows indexed by the minus part
    /// and columns by the plus part of the grading.
    pub fn plus_to_minus_block(&self, m: &CMatrix) -> Result<CMatrix> {
        let gr = self
            .grading
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("action is not graded".into()))?;
        let mut out = CMatrix::zeros(gr.minus.len(), gr.plus.len());
        for (r, &i) in gr.minus.iter().enumerate() {
            for (c, &j) in gr.plus.iter().enumerate() {
                out[(r, c)] = m[(i, j)];
            }
        }
        Ok(out)
    }

    /// Check the anticommutation relations and, if graded, that every
    /// generator exchanges the grading blocks.
    pub fn verify(&self) -> CliffordReport {
        let n = self.fiber_dim;
        let id = CMatrix::identity(n, n);
        let mut dev: f64 = 0.0;
        for (i, ci) in self.generators.iter().enumerate() {
            for (j, cj) in self.generators.iter().enumerate() {
                let anti = ci * cj + cj * ci;
                let expected = if i == j {
                    &id * Complex64::new(-2.0, 0.0)
                } else {
                    CMatrix::zeros(n, n)
                };
                dev = dev.max(linalg::max_abs(&(anti - expected)));
            }
        }
        let grading_deviation = self.grading.as_ref().map(|gr| {
            let mut gdev: f64 = 0.0;
            for c in &self.generators {
                // on-diagonal blocks must vanish
                for &i in &gr.plus {
                    for &j in &gr.plus {
                        gdev = gdev.max(c[(i, j)].norm());
                    }
                }
                for &i in &gr.minus {
                    for &j in &gr.minus {
                        gdev = gdev.max(c[(i, j)].norm());
                    }
                }
            }
            gdev
        });
        let passed =
            dev < ALGEBRA_TOLERANCE && grading_deviation.is_none_or(|g| g < ALGEBRA_TOLERANCE);
        CliffordReport {
            anticommutator_deviation: dev,
            grading_deviation,
            threshold: ALGEBRA_TOLERANCE,
            passed,
        }
    }
}

/// Diagnostic report of [`CliffordAction::verify`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CliffordReport {
    /// Max deviation of `c_i c_j + c_j c_i` from `-2δ_ij·Id` over all pairs.
    pub anticommutator_deviation: f64,
    /// Max on-diagonal-block entry over all generators, for graded actions.
    pub grading_deviation: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
}

/// The three Pauli matrices.
pub fn pauli_matrices() -> [CMatrix; 3] {
    [
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

/// Clifford action of `R³` on `C²` with generators `σ_k / i`. Ungraded.
pub fn make_pauli_action() -> CliffordAction {
    let gens = pauli_matrices().map(|s| s * (-I)).to_vec();
    CliffordAction::new(gens, None).expect("static construction")
}

/// Clifford action of `R²` on `C²` with generators `σ₁/i`, `σ₂/i`, graded by
/// the σ₃ eigenspaces: `E⁺ = span{e₁}`, `E⁻ = span{e₂}`.
pub fn make_plane_action() -> CliffordAction {
    let [s1, s2, _] = pauli_matrices();
    CliffordAction::new(
        vec![s1 * (-I), s2 * (-I)],
        Some(Grading {
            plus: vec![0],
            minus: vec![1],
        }),
    )
    .expect("static construction")
}

/// Exterior-algebra Clifford action `c(v) = ε_v - ι_v` on `Λ*(C^n)`.
///
/// The fiber basis is indexed by subsets of `{1..n}` in lexicographic subset
/// order (bitmask order: subset `S` ↦ index `Σ_{i∈S} 2^{i-1}`), and the
/// grading splits even from odd degree.
pub fn make_exterior_action(n: usize) -> Result<CliffordAction> {
    if n == 0 || n > 8 {
        return Err(Error::InvalidParameter(format!(
            "exterior action supports 1 <= n <= 8, got {n}"
        )));
    }
    let dim = 1usize << n;
    let mut gens = Vec::with_capacity(n);
    for j in 0..n {
        let bit = 1usize << j;
        let mut c = CMatrix::zeros(dim, dim);
        for s in 0..dim {
            // sign = (-1)^{#{i in S : i < j}} from moving e_j past earlier factors
            let below = (s & (bit - 1)).count_ones();
            let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
            if s & bit == 0 {
                // exterior multiplication: e_j ∧ e_S
                c[(s | bit, s)] += Complex64::new(sign, 0.0);
            } else {
                // interior multiplication: -ι_j e_S
                c[(s & !bit, s)] -= Complex64::new(sign, 0.0);
            }
        }
        gens.push(c);
    }
    let plus = (0..dim).filter(|s| s.count_ones() % 2 == 0).collect();
    let minus = (0..dim).filter(|s| s.count_ones() % 2 == 1).collect();
    CliffordAction::new(gens, Some(Grading { plus, minus }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pauli_first_generator_matches() {
        // c_1 = (1/i)·σ₁ = -i·[[0,1],[1,0]]
        let a = make_pauli_action();
        let expected = CMatrix::from_row_slice(2, 2, &[ZERO, -I, -I, ZERO]);
        assert!(linalg::max_abs(&(a.generators()[0].clone() - expected)) < 1e-15);
    }

    #[test]
    fn pauli_action_squares_correctly() {
        let a = make_pauli_action();
        let c = a.act(&[1.0, 1.0, 1.0]).unwrap();
        let sq = &c * &c;
        let expected = CMatrix::identity(2, 2) * Complex64::new(-3.0, 0.0);
        assert!(linalg::max_abs(&(sq - expected)) < 1e-14);
    }

    #[test]
    fn pauli_generators_anticommute() {
        let a = make_pauli_action();
        let c1 = &a.generators()[0];
        let c2 = &a.generators()[1];
        assert!(linalg::max_abs(&(c1 * c2 + c2 * c1)) < 1e-15);
    }

    #[test]
    fn pauli_verifies() {
        assert!(make_pauli_action().verify().passed);
    }

    #[test]
    fn plane_action_is_block_off_diagonal() {
        let a = make_plane_action();
        for xi in [[1.0, 0.0], [0.3, -0.7], [0.0, 2.0]] {
            let c = a.act(&xi).unwrap();
            assert!(c[(0, 0)].norm() < 1e-15 && c[(1, 1)].norm() < 1e-15);
        }
    }

    #[test]
    fn plane_action_squares_to_minus_norm() {
        let a = make_plane_action();
        let c = a.act(&[0.6, -0.8]).unwrap();
        let sq = &c * &c;
        let expected = CMatrix::identity(2, 2) * Complex64::new(-1.0, 0.0);
        assert!(linalg::max_abs(&(sq - expected)) < 1e-14);
    }

    #[test]
    fn plane_c_of_e1_is_sigma1_over_i() {
        let a = make_plane_action();
        let c = a.act(&[1.0, 0.0]).unwrap();
        let [s1, _, _] = pauli_matrices();
        assert!(linalg::max_abs(&(c - s1 * (-I))) < 1e-15);
    }

    #[test]
    fn exterior_n1_matches_hand_expansion() {
        // On basis {1, e₁}: c(e₁)·1 = e₁ and c(e₁)·e₁ = -1.
        let a = make_exterior_action(1).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[ZERO, -ONE, ONE, ZERO]);
        assert!(linalg::max_abs(&(a.generators()[0].clone() - expected)) < 1e-15);
    }

    #[test]
    fn exterior_n2_verifies() {
        assert!(make_exterior_action(2).unwrap().verify().passed);
    }

    #[test]
    fn exterior_grading_swaps_parity() {
        let a = make_exterior_action(3).unwrap();
        let r = a.verify();
        assert!(r.passed);
        assert!(r.grading_deviation.unwrap() < 1e-15);
    }

    #[test]
    fn exterior_out_of_range() {
        assert!(make_exterior_action(0).is_err());
        assert!(make_exterior_action(9).is_err());
    }

    #[test]
    fn actions_round_trip_through_serialization() {
        for action in [
            make_pauli_action(),
            make_plane_action(),
            make_exterior_action(3).unwrap(),
        ] {
            let json = serde_json::to_string(&action).unwrap();
            let back: CliffordAction = serde_json::from_str(&json).unwrap();
            assert_eq!(back.vector_dim(), action.vector_dim());
            assert_eq!(back.fiber_dim(), action.fiber_dim());
            for (a, b) in back.generators().iter().zip(action.generators()) {
                assert!(linalg::max_abs(&(a - b)) == 0.0);
            }
            assert_eq!(back.grading(), action.grading());
            assert!(back.verify().passed);
        }
    }

    /// Golden form of the plane action: generators σ₁/i and σ₂/i row-major.
    #[test]
    fn plane_action_golden_serialization() {
        let json = serde_json::to_value(make_plane_action()).unwrap();
        assert_eq!(
            json["generators"],
            serde_json::json!([
                [[0.0, 0.0], [0.0, -1.0], [0.0, -1.0], [0.0, 0.0]],
                [[0.0, 0.0], [-1.0, 0.0], [1.0, 0.0], [0.0, 0.0]],
            ])
        );
        assert_eq!(
            json["grading"],
            serde_json::json!({ "plus": [0], "minus": [1] })
        );
    }

    #[test]
    fn broken_action_fails_verification() {
        // Replace the third Pauli generator with the identity: it squares to
        // +Id instead of -Id.
        let mut gens = make_pauli_action().generators().to_vec();
        gens[2] = CMatrix::identity(2, 2);
        let a = CliffordAction::new(gens, None).unwrap();
        let r = a.verify();
        assert!(!r.passed);
        assert!(r.anticommutator_deviation > 1.0);
    }

    #[test]
    fn dirac_symbol_of_plane_e1_is_sigma1() {
        let a = make_plane_action();
        let s = a.dirac_symbol(&[1.0, 0.0]).unwrap();
        let [s1, _, _] = pauli_matrices();
        assert!(linalg::max_abs(&(s - s1)) < 1e-15);
    }

    #[test]
    fn dirac_symbol_of_zero_is_zero() {
        let a = make_pauli_action();
        let s = a.dirac_symbol(&[0.0, 0.0, 0.0]).unwrap();
        assert!(linalg::max_abs(&s) < 1e-15);
    }

    #[test]
    fn dirac_symbol_dimension_mismatch() {
        let a = make_plane_action();
        assert!(a.dirac_symbol(&[1.0]).is_err());
    }

    fn unit_vector(dim: usize, raw: Vec<f64>) -> Option<Vec<f64>> {
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-3 {
            return None;
        }
        Some(raw.into_iter().take(dim).map(|x| x / norm).collect())
    }

    proptest! {
        #[test]
        fn unit_vectors_square_to_minus_identity(raw in proptest::collection::vec(-1.0f64..1.0, 3)) {
            prop_assume!(unit_vector(3, raw.clone()).is_some());
            let v = unit_vector(3, raw).unwrap();
            for action in [make_pauli_action(), make_exterior_action(3).unwrap()] {
                let c = action.act(&v).unwrap();
                let sq = &c * &c;
                let dev = linalg::max_abs(&(sq + CMatrix::identity(action.fiber_dim(), action.fiber_dim())));
                prop_assert!(dev < 1e-12);
            }
        }

        #[test]
        fn dirac_symbol_squares_to_norm_and_is_invertible(raw in proptest::collection::vec(-2.0f64..2.0, 2)) {
            let norm2: f64 = raw.iter().map(|x| x * x).sum();
            prop_assume!(norm2 > 1e-4);
            let a = make_plane_action();
            let s = a.dirac_symbol(&raw).unwrap();
            let sq = &s * &s;
            let expected = CMatrix::identity(2, 2) * Complex64::new(norm2, 0.0);
            prop_assert!(linalg::max_abs(&(sq - expected)) < 1e-12);
            // invertibility for ξ ≠ 0
            let det = s[(0,0)] * s[(1,1)] - s[(0,1)] * s[(1,0)];
            prop_assert!(det.norm() > 1e-8);
        }

        #[test]
        fn graded_symbol_exchanges_blocks(raw in proptest::collection::vec(-2.0f64..2.0, 2)) {
            let norm2: f64 = raw.iter().map(|x| x * x).sum();
            prop_assume!(norm2 > 1e-4);
            let a = make_exterior_action(2).unwrap();
            let v = [raw[0], raw[1]];
            let c = a.act(&v).unwrap();
            let gr = a.grading().unwrap();
            for &i in &gr.plus {
                for &j in &gr.plus {
                    prop_assert!(c[(i, j)].norm() < 1e-13);
                }
            }
            for &i in &gr.minus {
                for &j in &gr.minus {
                    prop_assert!(c[(i, j)].norm() < 1e-13);
                }
            }
        }
    }
}
