//! Numerical kernels, Fredholm indices and equivariant (windowed) indices.
//!
//! Kernel dimensions come from singular-value rank decisions: a singular
//! value counts as zero iff it falls below `max(floor, rel·σ_max)`, and a
//! decision is confident only when a gap of ratio at least 10 separates the
//! rejected values from the kept ones. Cokernels are kernels of the conjugate
//! transpose; for rectangular matrices the shape itself contributes
//! `|rows - cols|` structural null directions on the wider side.
//! Indeterminate decisions never coerce to integers — every consumer here
//! fails loudly instead.

mod report;
mod suites;

pub use report::{IndexReport, LabelRow, SCHEMA_VERSION};
pub use suites::{
    composition_check, convergence_study, gluing_check, gluing_suite, homotopy_suite,
    stability_suite, CaseOutcome, ConvergenceStudy, SuiteOutcome,
};

use serde::{Deserialize, Serialize};

use crate::characters::{CharacterElement, WindowedCharacter};
use crate::error::{Error, Result};
use crate::group::{GroupDesc, IrrepLabel};
use crate::linalg::{self, CMatrix};
use crate::models::{build_plane_weight_model, IsotypicBlockOperator, PlaneParams};

/// Singular-value thresholding policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankPolicy {
    /// σ below this is always zero.
    pub absolute_floor: f64,
    /// σ below `relative_factor · σ_max` is zero.
    pub relative_factor: f64,
    /// Minimum ratio (first kept σ)/(last zeroed σ or floor) for confidence.
    pub min_gap_ratio: f64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        RankPolicy {
            absolute_floor: 1e-10,
            relative_factor: 1e-6,
            min_gap_ratio: 10.0,
        }
    }
}

/// Outcome of one numerical kernel computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankDecision {
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
    /// Null directions forced by the shape: `cols - min(rows, cols)`.
    pub structural_null: usize,
    /// Singular values counted as zero.
    pub counted_null: usize,
    /// `structural_null + counted_null`.
    pub kernel_dim: usize,
    pub threshold: f64,
    /// `(smallest kept σ) / max(largest zeroed σ, floor)`; `None` when every
    /// singular value was zeroed (unbounded gap).
    pub gap_ratio: Option<f64>,
    pub confident: bool,
}

/// Kernel dimension of a finite matrix under the given policy.
pub fn numeric_kernel(matrix: &CMatrix, policy: &RankPolicy) -> RankDecision {
    let sv = linalg::singular_values(matrix);
    decision_from_singular_values(sv, matrix.nrows(), matrix.ncols(), policy)
}

/// Kernel decision of a `rows × cols` matrix from its (descending) singular
/// values. Exposed so that one decomposition can serve both a block and its
/// conjugate transpose — the singular values agree, only the structural null
/// count differs.
pub fn decision_from_singular_values(
    sv: Vec<f64>,
    rows: usize,
    cols: usize,
    policy: &RankPolicy,
) -> RankDecision {
    let structural_null = cols - rows.min(cols);
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let threshold = policy
        .absolute_floor
        .max(policy.relative_factor * sigma_max);
    let counted_null = sv.iter().filter(|&&s| s < threshold).count();
    let kept = sv.len() - counted_null;
    let gap_ratio = if kept == 0 {
        None
    } else {
        let smallest_kept = sv[kept - 1];
        let largest_zeroed = if counted_null > 0 {
            sv[kept].max(policy.absolute_floor)
        } else {
            policy.absolute_floor
        };
        Some(smallest_kept / largest_zeroed)
    };
    let confident = gap_ratio.is_none_or(|g| g >= policy.min_gap_ratio);
    RankDecision {
        singular_values: sv,
        structural_null,
        counted_null,
        kernel_dim: structural_null + counted_null,
        threshold,
        gap_ratio,
        confident,
    }
}

fn require_confident(d: &RankDecision, context: &str) -> Result<()> {
    if d.confident {
        Ok(())
    } else {
        Err(Error::Indeterminate {
            gap_ratio: d.gap_ratio.unwrap_or(f64::INFINITY),
            required: 10.0,
            context: context.to_string(),
        })
    }
}

/// Kernel and cokernel decisions of one matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FredholmComputation {
    pub index: i64,
    pub kernel: RankDecision,
    pub cokernel: RankDecision,
}

/// `dim Ker - dim Coker` of the dense model matrix, with the cokernel as the
/// kernel of the conjugate transpose. Errors on an indeterminate decision.
pub fn fredholm_index_detailed(
    model: &IsotypicBlockOperator,
    policy: &RankPolicy,
) -> Result<FredholmComputation> {
    let dense = model.dense();
    fredholm_of_matrix(&dense, policy, &model.metadata().kind)
}

pub fn fredholm_index(model: &IsotypicBlockOperator, policy: &RankPolicy) -> Result<i64> {
    Ok(fredholm_index_detailed(model, policy)?.index)
}

pub(crate) fn fredholm_of_matrix(
    matrix: &CMatrix,
    policy: &RankPolicy,
    context: &str,
) -> Result<FredholmComputation> {
    // One decomposition serves both sides: the adjoint has the same singular
    // values, only the structural null count flips.
    let sv = linalg::singular_values(matrix);
    let kernel = decision_from_singular_values(sv.clone(), matrix.nrows(), matrix.ncols(), policy);
    require_confident(&kernel, &format!("{context}: kernel"))?;
    let cokernel = decision_from_singular_values(sv, matrix.ncols(), matrix.nrows(), policy);
    require_confident(&cokernel, &format!("{context}: cokernel"))?;
    Ok(FredholmComputation {
        index: kernel.kernel_dim as i64 - cokernel.kernel_dim as i64,
        kernel,
        cokernel,
    })
}

/// An index value: plain integer for the trivial group, a character for a
/// finite group, a windowed character for circle-group truncations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum IndexValue {
    Integer(i64),
    Character(CharacterElement),
    Windowed(WindowedCharacter),
}

impl std::fmt::Display for IndexValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IndexValue::Integer(i) => write!(f, "{i}"),
            IndexValue::Character(c) => write!(f, "{c}"),
            IndexValue::Windowed(w) => write!(f, "{w}"),
        }
    }
}

/// Per-label kernel/cokernel multiplicities of an equivariant model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelMultiplicities {
    pub domain_label: IrrepLabel,
    pub codomain_label: IrrepLabel,
    pub kernel: RankDecision,
    pub cokernel: RankDecision,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivariantComputation {
    pub value: IndexValue,
    pub per_label: Vec<LabelMultiplicities>,
}

/// Assemble per-block kernel/cokernel multiplicities into a character
/// (windowed when the model's label family is a truncation of an infinite
/// one). Every block decision must be confident.
pub fn equivariant_index(
    model: &IsotypicBlockOperator,
    policy: &RankPolicy,
) -> Result<EquivariantComputation> {
    if model.group() == GroupDesc::Trivial && model.domain_labels().len() == 1 {
        let c = fredholm_index_detailed(model, policy)?;
        return Ok(EquivariantComputation {
            value: IndexValue::Integer(c.index),
            per_label: vec![LabelMultiplicities {
                domain_label: IrrepLabel::Unit,
                codomain_label: IrrepLabel::Unit,
                kernel: c.kernel,
                cokernel: c.cokernel,
            }],
        });
    }
    let mut per_label = Vec::new();
    for (domain_label, codomain_label, block) in model.blocks() {
        let sv = linalg::singular_values(block);
        let kernel =
            decision_from_singular_values(sv.clone(), block.nrows(), block.ncols(), policy);
        require_confident(&kernel, &format!("block {domain_label}: kernel"))?;
        let cokernel = decision_from_singular_values(sv, block.ncols(), block.nrows(), policy);
        require_confident(&cokernel, &format!("block {domain_label}: cokernel"))?;
        per_label.push(LabelMultiplicities {
            domain_label: domain_label.clone(),
            codomain_label: codomain_label.clone(),
            kernel,
            cokernel,
        });
    }
    let value = if model.metadata().windowed {
        let (lo, hi) = window_of(model)?;
        let mut w = WindowedCharacter::new(model.group(), (lo, hi))?;
        for lm in &per_label {
            if let Some(l) = lm.domain_label.as_integer() {
                if l >= lo && l <= hi {
                    let prev = w.get(l).unwrap_or(0);
                    w.set(l, prev + lm.kernel.kernel_dim as i64)?;
                }
            }
            if let Some(l) = lm.codomain_label.as_integer() {
                if l >= lo && l <= hi {
                    let prev = w.get(l).unwrap_or(0);
                    w.set(l, prev - lm.cokernel.kernel_dim as i64)?;
                }
            }
        }
        IndexValue::Windowed(w)
    } else {
        let mut ker = CharacterElement::zero(model.group());
        let mut coker = CharacterElement::zero(model.group());
        for lm in &per_label {
            ker = ker.add(&CharacterElement::from_entries(
                model.group(),
                [(lm.domain_label.clone(), lm.kernel.kernel_dim as i64)],
            )?)?;
            coker = coker.add(&CharacterElement::from_entries(
                model.group(),
                [(lm.codomain_label.clone(), lm.cokernel.kernel_dim as i64)],
            )?)?;
        }
        IndexValue::Character(ker.sub(&coker)?)
    };
    Ok(EquivariantComputation { value, per_label })
}

/// The window on which both kernel and cokernel multiplicities of a windowed
/// model are known: the intersection of the integer spans of its domain and
/// codomain labels.
fn window_of(model: &IsotypicBlockOperator) -> Result<(i64, i64)> {
    let span = |labels: &[(IrrepLabel, usize)]| -> Option<(i64, i64)> {
        let ints: Vec<i64> = labels.iter().filter_map(|(l, _)| l.as_integer()).collect();
        Some((*ints.iter().min()?, *ints.iter().max()?))
    };
    let (dlo, dhi) = span(model.domain_labels())
        .ok_or_else(|| Error::Model("windowed model without integer labels".into()))?;
    let (clo, chi) = span(model.codomain_labels())
        .ok_or_else(|| Error::Model("windowed model without integer labels".into()))?;
    let lo = dlo.max(clo);
    let hi = dhi.min(chi);
    if lo > hi {
        return Err(Error::Model(
            "empty label window; assemble across adjacent weights instead".into(),
        ));
    }
    Ok((lo, hi))
}

/// One weight's worth of the deformed-plane index assembly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaneWeightEntry {
    pub weight: i64,
    pub kernel_multiplicity: usize,
    pub cokernel_multiplicity: usize,
    pub kernel_gap: Option<f64>,
    pub cokernel_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeformedPlaneIndex {
    pub character: WindowedCharacter,
    pub entries: Vec<PlaneWeightEntry>,
    /// Label offset recorded by the blocks (codomain = domain + offset).
    pub label_offset: i64,
}

/// Assemble the equivariant index of the deformed Dirac operator on the
/// plane over a weight window: kernel multiplicities by domain weight,
/// cokernel multiplicities by codomain weight per the recorded offset (the
/// cokernel at codomain weight `w` lives in the block with domain weight
/// `w + 1`). Errors on any non-converged block.
pub fn deformed_plane_index(
    params: &PlaneParams,
    window: (i64, i64),
    policy: &RankPolicy,
) -> Result<DeformedPlaneIndex> {
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::InvalidParameter("window bounds out of order".into()));
    }
    // The blocks carry offset -1, so the cokernel at codomain weight w lives
    // in the block with domain weight w + 1. One decomposition per block
    // serves both sides.
    let offset = -1i64;
    let mut spectra = std::collections::BTreeMap::new();
    for w in lo..=(hi - offset) {
        let block = build_plane_weight_model(w, params)?;
        debug_assert_eq!(block.metadata().label_offset, Some(offset));
        let dense = block.dense();
        spectra.insert(
            w,
            (
                linalg::singular_values(&dense),
                dense.nrows(),
                dense.ncols(),
            ),
        );
    }
    let mut character = WindowedCharacter::new(GroupDesc::Circle, window)?;
    let mut entries = Vec::new();
    for w in lo..=hi {
        let (sv, rows, cols) = &spectra[&w];
        let kernel = decision_from_singular_values(sv.clone(), *rows, *cols, policy);
        require_confident(&kernel, &format!("plane weight {w}: kernel"))?;
        let (sv, rows, cols) = &spectra[&(w - offset)];
        let cokernel = decision_from_singular_values(sv.clone(), *cols, *rows, policy);
        require_confident(&cokernel, &format!("plane weight {w}: cokernel"))?;
        character.set(w, kernel.kernel_dim as i64 - cokernel.kernel_dim as i64)?;
        entries.push(PlaneWeightEntry {
            weight: w,
            kernel_multiplicity: kernel.kernel_dim,
            cokernel_multiplicity: cokernel.kernel_dim,
            kernel_gap: kernel.gap_ratio,
            cokernel_gap: cokernel.gap_ratio,
        });
    }
    Ok(DeformedPlaneIndex {
        character,
        entries,
        label_offset: offset,
    })
}
