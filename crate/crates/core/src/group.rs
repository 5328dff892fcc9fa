//! Compact group descriptors and labels for their irreducible representations.
//!
//! Every model in this crate lives over one of three groups: the trivial
//! group, a cyclic group `Z_n`, or the circle group `S¹`. All their
//! irreducibles are one-dimensional, which keeps isotypic decomposition an
//! exact eigenspace splitting.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The compact symmetry group of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GroupDesc {
    Trivial,
    /// Cyclic group of order `n`, `n >= 1`.
    Cyclic(u32),
    Circle,
}

impl GroupDesc {
    pub fn cyclic(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "cyclic group order must be >= 1".into(),
            ));
        }
        Ok(GroupDesc::Cyclic(n))
    }

    /// Number of irreducibles, `None` for the circle.
    pub fn irrep_count(&self) -> Option<u32> {
        match self {
            GroupDesc::Trivial => Some(1),
            GroupDesc::Cyclic(n) => Some(*n),
            GroupDesc::Circle => None,
        }
    }

    pub fn validate_label(&self, label: &IrrepLabel) -> Result<()> {
        let ok = match (self, label) {
            (GroupDesc::Trivial, IrrepLabel::Unit) => true,
            (GroupDesc::Cyclic(n), IrrepLabel::Residue(j)) => j < n,
            (GroupDesc::Circle, IrrepLabel::Weight(_)) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidLabel {
                group: *self,
                label: label.clone(),
            })
        }
    }

    /// Label of the trivial representation.
    pub fn unit_label(&self) -> IrrepLabel {
        match self {
            GroupDesc::Trivial => IrrepLabel::Unit,
            GroupDesc::Cyclic(_) => IrrepLabel::Residue(0),
            GroupDesc::Circle => IrrepLabel::Weight(0),
        }
    }

    /// Label of the tensor product of two irreducibles. For the supported
    /// abelian groups this is weight addition (mod n for cyclic groups).
    pub fn tensor_label(&self, a: &IrrepLabel, b: &IrrepLabel) -> Result<IrrepLabel> {
        self.validate_label(a)?;
        self.validate_label(b)?;
        Ok(match (self, a, b) {
            (GroupDesc::Trivial, _, _) => IrrepLabel::Unit,
            (GroupDesc::Cyclic(n), IrrepLabel::Residue(j), IrrepLabel::Residue(k)) => {
                IrrepLabel::Residue((j + k) % n)
            }
            (GroupDesc::Circle, IrrepLabel::Weight(p), IrrepLabel::Weight(q)) => {
                IrrepLabel::Weight(p + q)
            }
            _ => unreachable!("validated above"),
        })
    }
}

impl fmt::Display for GroupDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDesc::Trivial => write!(f, "trivial"),
            GroupDesc::Cyclic(n) => write!(f, "Z{n}"),
            GroupDesc::Circle => write!(f, "S1"),
        }
    }
}

/// Label of an irreducible representation.
///
/// For `Z_n` the residue `j` labels the character sending the generator to
/// `exp(2πi j/n)`; for `S¹` the integer weight `m` labels `z ↦ z^m`. Distinct
/// labels are inequivalent irreducibles, and all of them are one-dimensional.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IrrepLabel {
    Unit,
    Residue(u32),
    Weight(i64),
}

impl IrrepLabel {
    /// Complex dimension of the irreducible — always 1 for supported groups.
    pub fn dim(&self) -> usize {
        1
    }

    /// Integer view used by windowed characters (circle weights, cyclic residues).
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            IrrepLabel::Unit => None,
            IrrepLabel::Residue(j) => Some(i64::from(*j)),
            IrrepLabel::Weight(m) => Some(*m),
        }
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepLabel::Unit => write!(f, "V0"),
            IrrepLabel::Residue(j) => write!(f, "V{j}"),
            IrrepLabel::Weight(m) => write!(f, "m={m}"),
        }
    }
}
