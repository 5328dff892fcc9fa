//! Finite, isotypically labeled matrix models of the operators under study.
//!
//! An [`IsotypicBlockOperator`] is a finite matrix with its domain and
//! codomain bases grouped by irreducible label. For the abelian groups used
//! here, Schur's lemma makes every equivariant model block-diagonal up to a
//! fixed label offset: each domain label maps to exactly one codomain label,
//! and the map is recorded per block.

mod circle;
mod perturb;
mod plane;
mod shift;

pub use circle::{
    build_circle_model, build_derham_circle_model, build_product_model, sin_potential,
};
pub use perturb::random_finite_rank_perturbation;
pub use plane::{
    build_glued_plane_models, build_plane_weight_model, inner_warp_profile, outer_warp_profile,
    GluedParams, PlaneParams, Rescaling, Warp,
};
pub use shift::{build_shift_model, build_shift_model_z2, build_toeplitz_model, symbol_winding};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupDesc, IrrepLabel};
use crate::linalg::CMatrix;

/// Model provenance carried into every report: the model kind, its truncation
/// parameters, and structural facts the index assembly needs (label offset,
/// whether the label family truncates an infinite one).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub kind: String,
    /// Codomain label minus domain label, for equivariant block maps.
    pub label_offset: Option<i64>,
    /// True when the label set is a finite window of an infinite family, so
    /// equivariant indices must be reported as windowed characters.
    pub windowed: bool,
    pub params: BTreeMap<String, String>,
}

impl ModelMetadata {
    pub fn new(kind: &str) -> Self {
        ModelMetadata {
            kind: kind.to_string(),
            label_offset: None,
            windowed: false,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_offset(mut self, offset: i64) -> Self {
        self.label_offset = Some(offset);
        self
    }

    pub fn windowed(mut self) -> Self {
        self.windowed = true;
        self
    }
}

/// A finite matrix model with basis vectors labeled by irreducible weight.
#[derive(Debug, Clone)]
pub struct IsotypicBlockOperator {
    group: GroupDesc,
    domain_labels: Vec<(IrrepLabel, usize)>,
    codomain_labels: Vec<(IrrepLabel, usize)>,
    /// domain label -> (codomain label, block matrix)
    blocks: BTreeMap<IrrepLabel, (IrrepLabel, CMatrix)>,
    graded: bool,
    metadata: ModelMetadata,
}

impl IsotypicBlockOperator {
    pub fn new(
        group: GroupDesc,
        domain_labels: Vec<(IrrepLabel, usize)>,
        codomain_labels: Vec<(IrrepLabel, usize)>,
        blocks: BTreeMap<IrrepLabel, (IrrepLabel, CMatrix)>,
        graded: bool,
        metadata: ModelMetadata,
    ) -> Result<Self> {
        let model = IsotypicBlockOperator {
            group,
            domain_labels,
            codomain_labels,
            blocks,
            graded,
            metadata,
        };
        model.validate()?;
        Ok(model)
    }

    /// Single-block model over the trivial group.
    pub fn trivial(matrix: CMatrix, metadata: ModelMetadata) -> Self {
        let (rows, cols) = matrix.shape();
        let mut blocks = BTreeMap::new();
        blocks.insert(IrrepLabel::Unit, (IrrepLabel::Unit, matrix));
        IsotypicBlockOperator {
            group: GroupDesc::Trivial,
            domain_labels: vec![(IrrepLabel::Unit, cols)],
            codomain_labels: vec![(IrrepLabel::Unit, rows)],
            blocks,
            graded: false,
            metadata,
        }
    }

    /// Structural consistency: labels valid for the group and declared
    /// exactly once, every domain label carrying exactly one block whose
    /// shape matches the declared dimensions, block targets distinct.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for (l, _) in &self.domain_labels {
            self.group.validate_label(l)?;
            if !seen.insert(l.clone()) {
                return Err(Error::Model(format!("duplicate domain label {l}")));
            }
        }
        let mut cod_dims = BTreeMap::new();
        let mut seen = std::collections::BTreeSet::new();
        for (l, d) in &self.codomain_labels {
            self.group.validate_label(l)?;
            if !seen.insert(l.clone()) {
                return Err(Error::Model(format!("duplicate codomain label {l}")));
            }
            cod_dims.insert(l.clone(), *d);
        }
        let mut targets = std::collections::BTreeSet::new();
        for (dl, dd) in &self.domain_labels {
            let Some((cl, m)) = self.blocks.get(dl) else {
                return Err(Error::Model(format!("domain label {dl} has no block")));
            };
            if m.ncols() != *dd {
                return Err(Error::Model(format!(
                    "block at {dl} has {} columns, declared {dd}",
                    m.ncols()
                )));
            }
            let Some(cd) = cod_dims.get(cl) else {
                return Err(Error::Model(format!(
                    "block target {cl} is not a codomain label"
                )));
            };
            if m.nrows() != *cd {
                return Err(Error::Model(format!(
                    "block {dl} -> {cl} has {} rows, declared {cd}",
                    m.nrows()
                )));
            }
            if !targets.insert(cl.clone()) {
                return Err(Error::Model(format!("codomain label {cl} targeted twice")));
            }
        }
        if self.blocks.len() != self.domain_labels.len() {
            return Err(Error::Model(
                "stray blocks without a declared domain label".into(),
            ));
        }
        if let Some(offset) = self.metadata.label_offset {
            for (dl, (cl, _)) in &self.blocks {
                if let (Some(d), Some(c)) = (dl.as_integer(), cl.as_integer()) {
                    if c - d != offset {
                        return Err(Error::Model(format!(
                            "block {dl} -> {cl} contradicts declared label offset {offset}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> GroupDesc {
        self.group
    }

    pub fn graded(&self) -> bool {
        self.graded
    }

    pub fn metadata(&self) -> &ModelMetadata {
        &self.metadata
    }

    pub fn metadata_mut(&mut self) -> &mut ModelMetadata {
        &mut self.metadata
    }

    pub fn domain_labels(&self) -> &[(IrrepLabel, usize)] {
        &self.domain_labels
    }

    pub fn codomain_labels(&self) -> &[(IrrepLabel, usize)] {
        &self.codomain_labels
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_labels.iter().map(|(_, d)| d).sum()
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_labels.iter().map(|(_, d)| d).sum()
    }

    pub fn block(&self, domain_label: &IrrepLabel) -> Option<(&IrrepLabel, &CMatrix)> {
        self.blocks.get(domain_label).map(|(l, m)| (l, m))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&IrrepLabel, &IrrepLabel, &CMatrix)> {
        self.blocks.iter().map(|(d, (c, m))| (d, c, m))
    }

    /// Assemble the dense matrix in the declared label order. Entries between
    /// different labels are structurally zero.
    pub fn dense(&self) -> CMatrix {
        let rows = self.codomain_dim();
        let cols = self.domain_dim();
        let mut out = CMatrix::zeros(rows, cols);
        let mut col_start = BTreeMap::new();
        let mut acc = 0;
        for (l, d) in &self.domain_labels {
            col_start.insert(l.clone(), acc);
            acc += d;
        }
        let mut row_start = BTreeMap::new();
        let mut acc = 0;
        for (l, d) in &self.codomain_labels {
            row_start.insert(l.clone(), acc);
            acc += d;
        }
        for (dl, (cl, m)) in &self.blocks {
            let c0 = col_start[dl];
            let r0 = row_start[cl];
            out.view_mut((r0, c0), (m.nrows(), m.ncols())).copy_from(m);
        }
        out
    }

    /// The conjugate-transpose model: domain and codomain swap, every block
    /// is adjointed. The index of the adjoint is minus the index.
    pub fn adjoint(&self) -> IsotypicBlockOperator {
        let mut blocks = BTreeMap::new();
        for (dl, (cl, m)) in &self.blocks {
            blocks.insert(cl.clone(), (dl.clone(), m.adjoint()));
        }
        let mut domain_labels = self.codomain_labels.clone();
        // codomain labels without an incoming block become blockless domain
        // labels of the adjoint; give them explicit zero blocks to the same
        // label so the structure stays total.
        for (l, d) in &mut domain_labels {
            if !blocks.contains_key(l) {
                blocks.insert(l.clone(), (l.clone(), CMatrix::zeros(0, *d)));
            }
        }
        let mut codomain_labels = self.domain_labels.clone();
        let targeted: std::collections::BTreeSet<_> =
            blocks.values().map(|(l, _)| l.clone()).collect();
        codomain_labels.retain(|(l, _)| targeted.contains(l));
        // zero-row blocks target a synthetic empty label set; patch dimensions
        for (l, (_, m)) in &blocks {
            if m.nrows() == 0 && !codomain_labels.iter().any(|(cl, _)| cl == l) {
                codomain_labels.push((l.clone(), 0));
            }
        }
        let metadata = ModelMetadata {
            kind: format!("{}_adjoint", self.metadata.kind),
            label_offset: self.metadata.label_offset.map(|o| -o),
            windowed: self.metadata.windowed,
            params: self.metadata.params.clone(),
        };
        IsotypicBlockOperator {
            group: self.group,
            domain_labels,
            codomain_labels,
            blocks,
            graded: self.graded,
            metadata,
        }
    }

    /// Composition `next ∘ self`, defined when the codomain labels and
    /// dimensions of `self` chain into the domain of `next`.
    pub fn then(&self, next: &IsotypicBlockOperator) -> Result<IsotypicBlockOperator> {
        if self.group != next.group {
            return Err(Error::GroupMismatch(self.group, next.group));
        }
        let mut blocks = BTreeMap::new();
        for (dl, (mid, m1)) in &self.blocks {
            let Some((cl, m2)) = next.blocks.get(mid) else {
                return Err(Error::DimensionMismatch(format!(
                    "composition: no block of the second factor at label {mid}"
                )));
            };
            if m2.ncols() != m1.nrows() {
                return Err(Error::DimensionMismatch(format!(
                    "composition: {}x{} after {}x{}",
                    m2.nrows(),
                    m2.ncols(),
                    m1.nrows(),
                    m1.ncols()
                )));
            }
            blocks.insert(dl.clone(), (cl.clone(), m2 * m1));
        }
        let codomain_labels: Vec<(IrrepLabel, usize)> = next
            .codomain_labels
            .iter()
            .filter(|(l, _)| blocks.values().any(|(cl, _)| cl == l))
            .cloned()
            .collect();
        let metadata = ModelMetadata::new(&format!(
            "{}_then_{}",
            self.metadata.kind, next.metadata.kind
        ));
        IsotypicBlockOperator::new(
            self.group,
            self.domain_labels.clone(),
            codomain_labels,
            blocks,
            false,
            metadata,
        )
    }

    /// For a graded block model `B = D⁺`, the full formally self-adjoint
    /// operator `[[0, B*], [B, 0]]` on domain ⊕ codomain.
    pub fn graded_full_dense(&self) -> Result<CMatrix> {
        if !self.graded {
            return Err(Error::Model(
                "full operator needs a graded block model".into(),
            ));
        }
        let b = self.dense();
        let (p, q) = (b.ncols(), b.nrows()); // dim E⁺ part, dim E⁻ part
        let mut full = CMatrix::zeros(p + q, p + q);
        full.view_mut((p, 0), (q, p)).copy_from(&b);
        full.view_mut((0, p), (p, q)).copy_from(&b.adjoint());
        Ok(full)
    }

    /// Label window `[lo, hi]` spanned by the integer labels on both sides.
    pub fn label_window(&self) -> Option<(i64, i64)> {
        let ints: Vec<i64> = self
            .domain_labels
            .iter()
            .chain(self.codomain_labels.iter())
            .filter_map(|(l, _)| l.as_integer())
            .collect();
        if ints.is_empty() {
            return None;
        }
        Some((*ints.iter().min().unwrap(), *ints.iter().max().unwrap()))
    }

    pub(crate) fn replace_block(
        &mut self,
        domain_label: &IrrepLabel,
        matrix: CMatrix,
    ) -> Result<()> {
        let Some((_, m)) = self.blocks.get_mut(domain_label) else {
            return Err(Error::Model(format!("no block at {domain_label}")));
        };
        if matrix.shape() != m.shape() {
            return Err(Error::DimensionMismatch("replacement block shape".into()));
        }
        *m = matrix;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};

    #[test]
    fn trivial_model_roundtrip() {
        let m = CMatrix::from_row_slice(2, 3, &[ONE, ZERO, ZERO, ZERO, ONE, ZERO]);
        let model = IsotypicBlockOperator::trivial(m.clone(), ModelMetadata::new("test"));
        assert_eq!(model.domain_dim(), 3);
        assert_eq!(model.codomain_dim(), 2);
        assert_eq!(model.dense(), m);
        model.validate().unwrap();
    }

    #[test]
    fn adjoint_swaps_shape() {
        let m = CMatrix::from_row_slice(2, 3, &[ONE, ZERO, ZERO, ZERO, ONE, ZERO]);
        let model = IsotypicBlockOperator::trivial(m.clone(), ModelMetadata::new("test"));
        let adj = model.adjoint();
        assert_eq!(adj.domain_dim(), 2);
        assert_eq!(adj.codomain_dim(), 3);
        assert_eq!(adj.dense(), m.adjoint());
        adj.validate().unwrap();
    }

    #[test]
    fn block_mismatch_is_rejected() {
        let mut blocks = BTreeMap::new();
        blocks.insert(
            IrrepLabel::Weight(0),
            (IrrepLabel::Weight(1), CMatrix::zeros(2, 2)),
        );
        let r = IsotypicBlockOperator::new(
            GroupDesc::Circle,
            vec![(IrrepLabel::Weight(0), 2)],
            vec![(IrrepLabel::Weight(1), 3)], // wrong dim
            blocks,
            false,
            ModelMetadata::new("bad"),
        );
        assert!(r.is_err());
    }

    #[test]
    fn offset_contradiction_is_rejected() {
        let mut blocks = BTreeMap::new();
        blocks.insert(
            IrrepLabel::Weight(0),
            (IrrepLabel::Weight(1), CMatrix::zeros(1, 1)),
        );
        let r = IsotypicBlockOperator::new(
            GroupDesc::Circle,
            vec![(IrrepLabel::Weight(0), 1)],
            vec![(IrrepLabel::Weight(1), 1)],
            blocks,
            false,
            ModelMetadata::new("bad").with_offset(0),
        );
        assert!(r.is_err());
    }
}
