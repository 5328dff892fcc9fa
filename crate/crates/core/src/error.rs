//! Crate-wide error type.

use thiserror::Error;

use crate::group::{GroupDesc, IrrepLabel};

#[derive(Debug, Error)]
pub enum Error {
    #[error("group mismatch: {0} vs {1}")]
    GroupMismatch(GroupDesc, GroupDesc),

    #[error("label {label} is not valid for group {group}")]
    InvalidLabel { group: GroupDesc, label: IrrepLabel },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("input matrix is not unitary (deviation {deviation:.3e} exceeds {tolerance:.1e})")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("eigenvalue off the admissible character lattice: angular distance {distance:.3e} exceeds {tolerance:.1e}")]
    OffLattice { distance: f64, tolerance: f64 },

    #[error("representation weight outside the decomposition bound {bound}: multiplicities do not sum to the dimension ({found} vs {expected})")]
    WeightOutOfBound {
        bound: i64,
        found: i64,
        expected: i64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("symbol vanishes on the unit circle (min |a| = {min_abs:.3e}); the operator is not Fredholm")]
    VanishingSymbol { min_abs: f64 },

    #[error(
        "rank decision indeterminate: gap ratio {gap_ratio:.3} below {required:.1} ({context})"
    )]
    Indeterminate {
        gap_ratio: f64,
        required: f64,
        context: String,
    },

    #[error("no convergence plateau: {0}")]
    NoPlateau(String),

    #[error("perturbation would violate the isotypic block structure: {0}")]
    BlockStructure(String),

    #[error("expression parse error at byte {position}: {message}")]
    ExprParse { position: usize, message: String },

    #[error("model construction error: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, Error>;
