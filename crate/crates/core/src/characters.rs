//! The character ring `R(G)` and finite windows of its completion.
//!
//! `R(G)` is modeled as the free abelian group on the irreducible labels of
//! the supported groups, with the weight-additive tensor product of abelian
//! character theory. A [`WindowedCharacter`] is a truncation of an element of
//! the completed ring: labels outside its window are *unknown*, never
//! implicitly zero, so comparisons use intersection-of-windows semantics.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupDesc, IrrepLabel};
use crate::linalg::{self, CMatrix};

/// Angular tolerance for snapping eigenvalues onto the character lattice.
/// Inputs are exact model matrices, so any slack beyond rounding is an error.
pub const SNAP_TOLERANCE: f64 = 1e-6;

/// Tolerance for the unitarity precondition of [`decompose_representation`].
pub const UNITARITY_TOLERANCE: f64 = 1e-8;

/// An element of `R(G)`: a finitely supported integer combination of
/// irreducible labels. Zero multiplicities are never stored.
///
/// Serializes as the group descriptor plus a list of
/// `(label, multiplicity)` pairs in label order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "CharacterElementRepr", try_from = "CharacterElementRepr")]
pub struct CharacterElement {
    group: GroupDesc,
    entries: BTreeMap<IrrepLabel, i64>,
}

#[derive(Serialize, Deserialize)]
struct CharacterElementRepr {
    group: GroupDesc,
    entries: Vec<(IrrepLabel, i64)>,
}

impl From<CharacterElement> for CharacterElementRepr {
    fn from(c: CharacterElement) -> Self {
        CharacterElementRepr {
            group: c.group,
            entries: c.entries.into_iter().collect(),
        }
    }
}

impl TryFrom<CharacterElementRepr> for CharacterElement {
    type Error = Error;

    fn try_from(r: CharacterElementRepr) -> Result<Self> {
        CharacterElement::from_entries(r.group, r.entries)
    }
}

impl CharacterElement {
    /// The zero element of `R(G)`.
    pub fn zero(group: GroupDesc) -> Self {
        CharacterElement {
            group,
            entries: BTreeMap::new(),
        }
    }

    /// Build from `(label, multiplicity)` pairs; repeated labels accumulate.
    pub fn from_entries<I>(group: GroupDesc, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (IrrepLabel, i64)>,
    {
        let mut ch = CharacterElement::zero(group);
        for (label, mult) in entries {
            group.validate_label(&label)?;
            ch.bump(label, mult);
        }
        Ok(ch)
    }

    /// A single irreducible with multiplicity one.
    pub fn irreducible(group: GroupDesc, label: IrrepLabel) -> Result<Self> {
        Self::from_entries(group, [(label, 1)])
    }

    pub fn group(&self) -> GroupDesc {
        self.group
    }

    pub fn entries(&self) -> impl Iterator<Item = (&IrrepLabel, i64)> {
        self.entries.iter().map(|(l, &m)| (l, m))
    }

    pub fn multiplicity(&self, label: &IrrepLabel) -> i64 {
        self.entries.get(label).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    fn bump(&mut self, label: IrrepLabel, mult: i64) {
        if mult == 0 {
            return;
        }
        let slot = self.entries.entry(label.clone()).or_insert(0);
        *slot += mult;
        if *slot == 0 {
            self.entries.remove(&label);
        }
    }

    /// Entrywise integer sum; zeros are dropped. Errors on group mismatch.
    pub fn add(&self, other: &CharacterElement) -> Result<CharacterElement> {
        if self.group != other.group {
            return Err(Error::GroupMismatch(self.group, other.group));
        }
        let mut out = self.clone();
        for (l, m) in other.entries() {
            out.bump(l.clone(), m);
        }
        Ok(out)
    }

    /// `self - other` (formal difference in the Grothendieck group).
    pub fn sub(&self, other: &CharacterElement) -> Result<CharacterElement> {
        self.add(&other.negate())
    }

    pub fn negate(&self) -> CharacterElement {
        CharacterElement {
            group: self.group,
            entries: self.entries.iter().map(|(l, m)| (l.clone(), -m)).collect(),
        }
    }

    /// Tensor product, extended bilinearly: weights add for cyclic/circle
    /// groups, and the trivial group multiplies integer multiplicities.
    pub fn tensor(&self, other: &CharacterElement) -> Result<CharacterElement> {
        if self.group != other.group {
            return Err(Error::GroupMismatch(self.group, other.group));
        }
        let mut out = CharacterElement::zero(self.group);
        for (la, ma) in self.entries() {
            for (lb, mb) in other.entries() {
                let target = self.group.tensor_label(la, lb)?;
                out.bump(target, ma * mb);
            }
        }
        Ok(out)
    }

    /// Virtual dimension: `Σ multiplicity · dim(irrep)`. All supported
    /// irreducibles are one-dimensional, so this is the sum of multiplicities.
    pub fn dim(&self) -> i64 {
        self.entries.values().sum()
    }
}

impl fmt::Display for CharacterElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(l, m)| format!("{m}·[{l}]"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A truncation of an element of the completed character ring.
///
/// Only labels inside `[lo, hi]` (circle weights, or cyclic residues viewed as
/// integers) are reported; everything outside is unknown. Equality via
/// `PartialEq` is bit-level (same window, same entries); use
/// [`WindowedCharacter::agrees_with`] for intersection semantics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "WindowedCharacterRepr", try_from = "WindowedCharacterRepr")]
pub struct WindowedCharacter {
    group: GroupDesc,
    window: (i64, i64),
    entries: BTreeMap<i64, i64>,
}

#[derive(Serialize, Deserialize)]
struct WindowedCharacterRepr {
    group: GroupDesc,
    window: (i64, i64),
    entries: Vec<(i64, i64)>,
}

impl From<WindowedCharacter> for WindowedCharacterRepr {
    fn from(w: WindowedCharacter) -> Self {
        WindowedCharacterRepr {
            group: w.group,
            window: w.window,
            entries: w.entries.into_iter().collect(),
        }
    }
}

impl TryFrom<WindowedCharacterRepr> for WindowedCharacter {
    type Error = Error;

    fn try_from(r: WindowedCharacterRepr) -> Result<Self> {
        let mut w = WindowedCharacter::new(r.group, r.window)?;
        for (label, mult) in r.entries {
            w.set(label, mult)?;
        }
        Ok(w)
    }
}

impl WindowedCharacter {
    pub fn new(group: GroupDesc, window: (i64, i64)) -> Result<Self> {
        match group {
            GroupDesc::Circle | GroupDesc::Cyclic(_) => {}
            GroupDesc::Trivial => {
                return Err(Error::InvalidParameter(
                    "windowed characters need a circle or cyclic group".into(),
                ))
            }
        }
        if window.0 > window.1 {
            return Err(Error::InvalidParameter(format!(
                "window bounds out of order: [{}, {}]",
                window.0, window.1
            )));
        }
        Ok(WindowedCharacter {
            group,
            window,
            entries: BTreeMap::new(),
        })
    }

    pub fn group(&self) -> GroupDesc {
        self.group
    }

    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn set(&mut self, label: i64, mult: i64) -> Result<()> {
        if label < self.window.0 || label > self.window.1 {
            return Err(Error::InvalidParameter(format!(
                "label {label} outside window [{}, {}]",
                self.window.0, self.window.1
            )));
        }
        if mult == 0 {
            self.entries.remove(&label);
        } else {
            self.entries.insert(label, mult);
        }
        Ok(())
    }

    /// Multiplicity at `label`: `None` when the label is outside the window
    /// (unknown), `Some(0)` when inside and absent.
    pub fn get(&self, label: i64) -> Option<i64> {
        if label < self.window.0 || label > self.window.1 {
            None
        } else {
            Some(self.entries.get(&label).copied().unwrap_or(0))
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.entries.iter().map(|(&l, &m)| (l, m))
    }

    /// Equality on the intersection of the two windows. An empty intersection
    /// agrees vacuously. Windowed values never extrapolate beyond the window.
    pub fn agrees_with(&self, other: &WindowedCharacter) -> bool {
        if self.group != other.group {
            return false;
        }
        let lo = self.window.0.max(other.window.0);
        let hi = self.window.1.min(other.window.1);
        (lo..=hi).all(|l| self.get(l) == other.get(l))
    }

    /// Sum of multiplicities over the window (the dimension of the window's
    /// worth of the virtual representation).
    pub fn window_dim(&self) -> i64 {
        self.entries.values().sum()
    }
}

impl fmt::Display for WindowedCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (self.window.0..=self.window.1)
            .map(|l| format!("{l}:{}", self.get(l).unwrap_or(0)))
            .collect();
        write!(
            f,
            "window [{}, {}] {{{}}}",
            self.window.0,
            self.window.1,
            parts.join(", ")
        )
    }
}

/// How a group acts on a finite-dimensional space, as input to
/// [`decompose_representation`].
pub enum GroupAction<'a> {
    /// Action of the generator (cyclic groups) or of the single element
    /// (trivial group), as a unitary matrix.
    Generator(&'a CMatrix),
    /// Sampled one-parameter family `t ↦ U(e^{it})` for the circle group,
    /// with a bound on the absolute weight of any isotypic component.
    CircleSampler {
        sampler: &'a dyn Fn(f64) -> CMatrix,
        weight_bound: i64,
    },
}

/// Decompose a unitary representation into irreducible multiplicities.
///
/// Multiplicities come from traces of the isotypic projectors built by
/// character averaging (exact discrete Fourier sums); eigenvalues of a sample
/// matrix are snapped onto the admissible character lattice and any angular
/// distance beyond [`SNAP_TOLERANCE`] is an error.
pub fn decompose_representation(
    group: GroupDesc,
    action: GroupAction<'_>,
) -> Result<CharacterElement> {
    let projectors = isotypic_projectors(group, action)?;
    let mut entries = Vec::new();
    let mut total = 0_i64;
    let mut dim = 0_usize;
    for (label, p) in &projectors {
        dim = p.nrows();
        let tr = p.trace();
        let mult = tr.re.round();
        if (tr.re - mult).abs() > SNAP_TOLERANCE || tr.im.abs() > SNAP_TOLERANCE || mult < 0.0 {
            return Err(Error::OffLattice {
                distance: (tr.re - mult).abs().max(tr.im.abs()),
                tolerance: SNAP_TOLERANCE,
            });
        }
        total += mult as i64;
        if mult as i64 != 0 {
            entries.push((label.clone(), mult as i64));
        }
    }
    if total != dim as i64 {
        // For the circle this means some weight escaped the requested bound.
        let bound = match group {
            GroupDesc::Circle => (projectors.len() as i64 - 1) / 2,
            _ => projectors.len() as i64,
        };
        return Err(Error::WeightOutOfBound {
            bound,
            found: total,
            expected: dim as i64,
        });
    }
    CharacterElement::from_entries(group, entries)
}

/// The isotypic projectors of a unitary representation, one per candidate
/// label. They are idempotent within tolerance and sum to the identity; tests
/// rely on both properties.
pub fn isotypic_projectors(
    group: GroupDesc,
    action: GroupAction<'_>,
) -> Result<Vec<(IrrepLabel, CMatrix)>> {
    match (group, action) {
        (GroupDesc::Trivial, GroupAction::Generator(u)) => {
            let n = check_square_unitary(u)?;
            // The only element is the identity; anything else is off-lattice.
            let dev = linalg::max_abs(&(u - CMatrix::identity(n, n)));
            if dev > SNAP_TOLERANCE {
                return Err(Error::OffLattice {
                    distance: dev,
                    tolerance: SNAP_TOLERANCE,
                });
            }
            Ok(vec![(IrrepLabel::Unit, CMatrix::identity(n, n))])
        }
        (GroupDesc::Cyclic(order), GroupAction::Generator(u)) => {
            let n = check_square_unitary(u)?;
            cyclic_projectors(order, u, n)
        }
        (
            GroupDesc::Circle,
            GroupAction::CircleSampler {
                sampler,
                weight_bound,
            },
        ) => circle_projectors(sampler, weight_bound),
        (g, GroupAction::Generator(_)) => Err(Error::InvalidParameter(format!(
            "group {g} takes a sampled one-parameter family, not a generator matrix"
        ))),
        (g, GroupAction::CircleSampler { .. }) => Err(Error::InvalidParameter(format!(
            "group {g} takes a generator matrix, not a circle sampler"
        ))),
    }
}

fn check_square_unitary(u: &CMatrix) -> Result<usize> {
    if u.nrows() != u.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "representation matrix must be square, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let dev = linalg::unitarity_deviation(u);
    if dev > UNITARITY_TOLERANCE {
        return Err(Error::NotUnitary {
            deviation: dev,
            tolerance: UNITARITY_TOLERANCE,
        });
    }
    Ok(u.nrows())
}

fn cyclic_projectors(order: u32, u: &CMatrix, n: usize) -> Result<Vec<(IrrepLabel, CMatrix)>> {
    let ord = order as usize;
    // Powers of the generator; g^order must return to the identity.
    let mut powers = Vec::with_capacity(ord);
    let mut acc = CMatrix::identity(n, n);
    for _ in 0..ord {
        powers.push(acc.clone());
        acc = u * acc;
    }
    let closure_dev = linalg::max_abs(&(acc - CMatrix::identity(n, n)));
    if closure_dev > UNITARITY_TOLERANCE {
        return Err(Error::NotUnitary {
            deviation: closure_dev,
            tolerance: UNITARITY_TOLERANCE,
        });
    }
    // Every eigenvalue must sit on the lattice of order-th roots of unity.
    for ev in linalg::eigenvalues(u) {
        snap_angle(ev, f64::from(order) / (2.0 * std::f64::consts::PI))?;
    }
    let mut out = Vec::with_capacity(ord);
    for j in 0..order {
        let mut p = CMatrix::zeros(n, n);
        for (k, g) in powers.iter().enumerate() {
            let phase = -2.0 * std::f64::consts::PI * f64::from(j) * k as f64 / f64::from(order);
            p += g * Complex64::from_polar(1.0 / ord as f64, phase);
        }
        out.push((IrrepLabel::Residue(j), p));
    }
    Ok(out)
}

fn circle_projectors(
    sampler: &dyn Fn(f64) -> CMatrix,
    weight_bound: i64,
) -> Result<Vec<(IrrepLabel, CMatrix)>> {
    if weight_bound < 0 {
        return Err(Error::InvalidParameter(
            "weight bound must be non-negative".into(),
        ));
    }
    let w = weight_bound;
    let primary = circle_projector_pass(sampler, w, (2 * w + 2) as usize)?;
    // Re-run with a coprime sample count; disagreement exposes aliasing from
    // weights beyond the bound.
    let check = circle_projector_pass(sampler, w, (2 * w + 3) as usize)?;
    for ((l1, p1), (_, p2)) in primary.iter().zip(check.iter()) {
        let dev = linalg::max_abs(&(p1 - p2));
        if dev > SNAP_TOLERANCE {
            return Err(Error::WeightOutOfBound {
                bound: w,
                found: l1.as_integer().unwrap_or(0),
                expected: 0,
            });
        }
    }
    // Eigenvalues of one sample must snap onto the weight lattice within bound.
    let t0 = 2.0 * std::f64::consts::PI / (2 * w + 2) as f64;
    let u0 = sampler(t0);
    check_square_unitary(&u0)?;
    for ev in linalg::eigenvalues(&u0) {
        let m = snap_angle(ev, 1.0 / t0)?;
        if m.abs() > w {
            return Err(Error::WeightOutOfBound {
                bound: w,
                found: m,
                expected: 0,
            });
        }
    }
    Ok(primary)
}

fn circle_projector_pass(
    sampler: &dyn Fn(f64) -> CMatrix,
    weight_bound: i64,
    samples: usize,
) -> Result<Vec<(IrrepLabel, CMatrix)>> {
    let mut mats = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
        let u = sampler(t);
        check_square_unitary(&u)?;
        mats.push(u);
    }
    let n = mats[0].nrows();
    if mats.iter().any(|m| m.nrows() != n) {
        return Err(Error::DimensionMismatch("sampler changed dimension".into()));
    }
    let mut out = Vec::new();
    for m in -weight_bound..=weight_bound {
        let mut p = CMatrix::zeros(n, n);
        for (k, u) in mats.iter().enumerate() {
            let phase = -2.0 * std::f64::consts::PI * m as f64 * k as f64 / samples as f64;
            p += u * Complex64::from_polar(1.0 / samples as f64, phase);
        }
        out.push((IrrepLabel::Weight(m), p));
    }
    Ok(out)
}

/// Snap a unit-modulus eigenvalue onto the admissible lattice: returns the
/// integer nearest `arg(ev)·scale`, or errors if the angular distance to that
/// lattice point exceeds [`SNAP_TOLERANCE`].
fn snap_angle(ev: Complex64, scale: f64) -> Result<i64> {
    let modulus_dev = (ev.norm() - 1.0).abs();
    if modulus_dev > UNITARITY_TOLERANCE {
        return Err(Error::NotUnitary {
            deviation: modulus_dev,
            tolerance: UNITARITY_TOLERANCE,
        });
    }
    let theta = ev.arg();
    let m = (theta * scale).round();
    let dist = (theta - m / scale).abs();
    if dist > SNAP_TOLERANCE {
        return Err(Error::OffLattice {
            distance: dist,
            tolerance: SNAP_TOLERANCE,
        });
    }
    Ok(m as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};

    fn z2() -> GroupDesc {
        GroupDesc::Cyclic(2)
    }

    fn ch(entries: &[(IrrepLabel, i64)]) -> CharacterElement {
        CharacterElement::from_entries(z2(), entries.iter().cloned()).unwrap()
    }

    #[test]
    fn add_is_free_abelian_sum() {
        let v0 = ch(&[(IrrepLabel::Residue(0), 1)]);
        let v1 = ch(&[(IrrepLabel::Residue(1), 1)]);
        let sum = v0.add(&v1).unwrap();
        assert_eq!(sum.multiplicity(&IrrepLabel::Residue(0)), 1);
        assert_eq!(sum.multiplicity(&IrrepLabel::Residue(1)), 1);
    }

    #[test]
    fn add_cancels_and_drops_zeros() {
        let a = ch(&[(IrrepLabel::Residue(0), 2), (IrrepLabel::Residue(1), -1)]);
        let b = ch(&[(IrrepLabel::Residue(1), 1)]);
        let sum = a.add(&b).unwrap();
        assert_eq!(sum.multiplicity(&IrrepLabel::Residue(0)), 2);
        assert_eq!(sum.multiplicity(&IrrepLabel::Residue(1)), 0);
        assert_eq!(sum.support_size(), 1);
    }

    #[test]
    fn empty_is_additive_identity() {
        let zero = CharacterElement::zero(GroupDesc::Circle);
        let x = CharacterElement::from_entries(GroupDesc::Circle, [(IrrepLabel::Weight(3), 1)])
            .unwrap();
        assert_eq!(zero.add(&x).unwrap(), x);
    }

    #[test]
    fn add_rejects_group_mismatch() {
        let a = CharacterElement::zero(GroupDesc::Circle);
        let b = CharacterElement::zero(z2());
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn tensor_adds_weights_on_circle() {
        let a = CharacterElement::from_entries(GroupDesc::Circle, [(IrrepLabel::Weight(1), 1)])
            .unwrap();
        let b = CharacterElement::from_entries(GroupDesc::Circle, [(IrrepLabel::Weight(2), 1)])
            .unwrap();
        let t = a.tensor(&b).unwrap();
        assert_eq!(t.multiplicity(&IrrepLabel::Weight(3)), 1);
        assert_eq!(t.support_size(), 1);
    }

    #[test]
    fn sign_character_squares_to_trivial() {
        let v1 = ch(&[(IrrepLabel::Residue(1), 1)]);
        let t = v1.tensor(&v1).unwrap();
        assert_eq!(t.multiplicity(&IrrepLabel::Residue(0)), 1);
        assert_eq!(t.support_size(), 1);
    }

    #[test]
    fn tensor_distributes_over_add() {
        let v0 = ch(&[(IrrepLabel::Residue(0), 1)]);
        let v1 = ch(&[(IrrepLabel::Residue(1), 1)]);
        let sum = v0.add(&v1).unwrap();
        let t = sum.tensor(&v1).unwrap();
        assert_eq!(t.multiplicity(&IrrepLabel::Residue(0)), 1);
        assert_eq!(t.multiplicity(&IrrepLabel::Residue(1)), 1);
    }

    #[test]
    fn dim_examples() {
        assert_eq!(
            ch(&[(IrrepLabel::Residue(0), 1), (IrrepLabel::Residue(1), 1)]).dim(),
            2
        );
        assert_eq!(
            ch(&[(IrrepLabel::Residue(0), 2), (IrrepLabel::Residue(1), -1)]).dim(),
            1
        );
        assert_eq!(CharacterElement::zero(z2()).dim(), 0);
    }

    #[test]
    fn decompose_swap_on_c2() {
        // q(x1, x2) = (x2, x1): eigenvalues +1 (trivial) and -1 (sign).
        let swap = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let ch = decompose_representation(z2(), GroupAction::Generator(&swap)).unwrap();
        assert_eq!(ch.multiplicity(&IrrepLabel::Residue(0)), 1);
        assert_eq!(ch.multiplicity(&IrrepLabel::Residue(1)), 1);
    }

    #[test]
    fn decompose_diagonal_circle_action() {
        let sampler = |t: f64| {
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                Complex64::from_polar(1.0, t),
                Complex64::from_polar(1.0, -t),
            ]))
        };
        let ch = decompose_representation(
            GroupDesc::Circle,
            GroupAction::CircleSampler {
                sampler: &sampler,
                weight_bound: 4,
            },
        )
        .unwrap();
        assert_eq!(ch.multiplicity(&IrrepLabel::Weight(1)), 1);
        assert_eq!(ch.multiplicity(&IrrepLabel::Weight(-1)), 1);
        assert_eq!(ch.support_size(), 2);
    }

    #[test]
    fn decompose_identity_trivial_group() {
        let id = CMatrix::identity(3, 3);
        let ch = decompose_representation(GroupDesc::Trivial, GroupAction::Generator(&id)).unwrap();
        assert_eq!(ch.multiplicity(&IrrepLabel::Unit), 3);
    }

    #[test]
    fn decompose_rejects_non_unitary() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE * 2.0, ZERO, ZERO, ONE]);
        assert!(matches!(
            decompose_representation(z2(), GroupAction::Generator(&m)),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn decompose_rejects_off_lattice_eigenvalue() {
        // Unitary, but its eigenvalue e^{i·0.3} is not a square root of unity.
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::from_polar(1.0, 0.3),
                ZERO,
                ZERO,
                Complex64::from_polar(1.0, -0.3),
            ],
        );
        let r = decompose_representation(z2(), GroupAction::Generator(&m));
        assert!(r.is_err());
    }

    #[test]
    fn circle_weight_beyond_bound_is_an_error() {
        let sampler =
            |t: f64| CMatrix::from_row_slice(1, 1, &[Complex64::from_polar(1.0, 7.0 * t)]);
        let r = decompose_representation(
            GroupDesc::Circle,
            GroupAction::CircleSampler {
                sampler: &sampler,
                weight_bound: 3,
            },
        );
        assert!(r.is_err());
    }

    #[test]
    fn projectors_are_idempotent_and_sum_to_identity() {
        let swap = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let ps = isotypic_projectors(z2(), GroupAction::Generator(&swap)).unwrap();
        let mut sum = CMatrix::zeros(2, 2);
        for (_, p) in &ps {
            let idem = linalg::max_abs(&(p * p - p));
            assert!(idem < 1e-12, "projector idempotency violated: {idem}");
            sum += p;
        }
        assert!(linalg::max_abs(&(sum - CMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn windowed_agreement_uses_intersection() {
        let mut a = WindowedCharacter::new(GroupDesc::Circle, (-2, 2)).unwrap();
        let mut b = WindowedCharacter::new(GroupDesc::Circle, (0, 5)).unwrap();
        a.set(1, 4).unwrap();
        b.set(1, 4).unwrap();
        b.set(5, 99).unwrap(); // outside a's window: irrelevant
        assert!(a.agrees_with(&b));
        b.set(2, 1).unwrap(); // inside the intersection: now they differ
        assert!(!a.agrees_with(&b));
        assert_eq!(a.get(3), None);
        assert_eq!(a.get(2), Some(0));
    }

    #[test]
    fn windowed_rejects_out_of_window_set() {
        let mut a = WindowedCharacter::new(GroupDesc::Circle, (-1, 1)).unwrap();
        assert!(a.set(2, 1).is_err());
    }

    #[test]
    fn characters_serialize_as_label_multiplicity_pairs() {
        let c = ch(&[(IrrepLabel::Residue(0), 1), (IrrepLabel::Residue(1), -2)]);
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("entries"), "{json}");
        let back: CharacterElement = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);

        let mut w = WindowedCharacter::new(GroupDesc::Circle, (-2, 2)).unwrap();
        w.set(-1, 3).unwrap();
        let json = serde_json::to_string(&w).unwrap();
        let back: WindowedCharacter = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn snap_tolerance_boundary() {
        let ev = Complex64::from_polar(1.0, 2e-6);
        assert!(snap_angle(ev, 1.0).is_err());
        let ev = Complex64::from_polar(1.0, 1e-8);
        assert_eq!(snap_angle(ev, 1.0).unwrap(), 0);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_character() -> impl Strategy<Value = CharacterElement> {
            proptest::collection::vec((0u32..4, -5i64..5), 0..6).prop_map(|entries| {
                CharacterElement::from_entries(
                    GroupDesc::Cyclic(4),
                    entries
                        .into_iter()
                        .map(|(j, m)| (IrrepLabel::Residue(j), m)),
                )
                .unwrap()
            })
        }

        proptest! {
            #[test]
            fn add_is_commutative_and_associative(
                a in arb_character(), b in arb_character(), c in arb_character()
            ) {
                prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
                let left = a.add(&b).unwrap().add(&c).unwrap();
                let right = a.add(&b.add(&c).unwrap()).unwrap();
                prop_assert_eq!(left, right);
            }

            #[test]
            fn zero_is_the_identity(a in arb_character()) {
                let zero = CharacterElement::zero(GroupDesc::Cyclic(4));
                prop_assert_eq!(a.add(&zero).unwrap(), a);
            }

            #[test]
            fn tensor_distributes_over_add(
                a in arb_character(), b in arb_character(), c in arb_character()
            ) {
                let left = a.add(&b).unwrap().tensor(&c).unwrap();
                let right = a.tensor(&c).unwrap().add(&b.tensor(&c).unwrap()).unwrap();
                prop_assert_eq!(left, right);
            }

            #[test]
            fn dim_is_additive_and_multiplicative(a in arb_character(), b in arb_character()) {
                prop_assert_eq!(a.add(&b).unwrap().dim(), a.dim() + b.dim());
                prop_assert_eq!(a.tensor(&b).unwrap().dim(), a.dim() * b.dim());
            }
        }
    }
}
