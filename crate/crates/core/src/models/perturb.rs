//! Seeded finite-rank perturbations for the index-stability suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::group::GroupDesc;
use crate::linalg::{self, CMatrix};

use super::IsotypicBlockOperator;

/// Add a pseudorandom finite-rank perturbation of operator norm
/// `relative_norm · σ_max(model)`.
///
/// With `equivariant` set, each block receives an independent perturbation of
/// rank at most `rank` (clamped to the block), so the isotypic labels are
/// respected. Requesting a non-equivariant perturbation of a labeled model
/// is a contract violation and errors.
pub fn random_finite_rank_perturbation(
    model: &IsotypicBlockOperator,
    rank: usize,
    relative_norm: f64,
    seed: u64,
    equivariant: bool,
) -> Result<IsotypicBlockOperator> {
    if relative_norm > 0.5 {
        return Err(Error::InvalidParameter(format!(
            "relative norm must stay <= 0.5 to remain in the Fredholm regime of the truncation, got {relative_norm}"
        )));
    }
    if rank > model.domain_dim().min(model.codomain_dim()) {
        return Err(Error::InvalidParameter(format!(
            "rank {rank} exceeds the minimum model dimension"
        )));
    }
    if !equivariant && (model.group() != GroupDesc::Trivial || model.domain_labels().len() != 1) {
        return Err(Error::BlockStructure(
            "a labeled model only admits equivariant (blockwise) perturbations".into(),
        ));
    }
    if rank == 0 || relative_norm == 0.0 {
        let mut out = model.clone();
        out.metadata_mut()
            .params
            .insert("perturbation".into(), "rank0".into());
        return Ok(out);
    }

    let sigma_max = linalg::op_norm(&model.dense());
    let target = relative_norm * sigma_max;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = model.clone();
    let labels: Vec<_> = model
        .domain_labels()
        .iter()
        .map(|(l, _)| l.clone())
        .collect();
    for label in labels {
        let (_, block) = model.block(&label).expect("declared label");
        let (rows, cols) = block.shape();
        let block_rank = rank.min(rows).min(cols);
        if block_rank == 0 {
            continue;
        }
        let mut p = CMatrix::zeros(rows, cols);
        for _ in 0..block_rank {
            let u = random_vector(&mut rng, rows);
            let v = random_vector(&mut rng, cols);
            p += &u * v.adjoint();
        }
        let norm = linalg::op_norm(&p);
        if norm > 0.0 {
            p *= Complex64::new(target / norm, 0.0);
        }
        out.replace_block(&label, block + p)?;
    }
    let meta = out.metadata_mut();
    meta.params
        .insert("perturbation_seed".into(), seed.to_string());
    meta.params
        .insert("perturbation_rank".into(), rank.to_string());
    meta.params
        .insert("perturbation_norm".into(), relative_norm.to_string());
    Ok(out)
}

fn random_vector(rng: &mut ChaCha20Rng, len: usize) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_iterator(
        len,
        (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_shift_model, build_shift_model_z2};

    #[test]
    fn rank_zero_is_identity_operation() {
        let model = build_shift_model(10).unwrap();
        let p = random_finite_rank_perturbation(&model, 0, 0.3, 7, false).unwrap();
        assert_eq!(p.dense(), model.dense());
    }

    #[test]
    fn perturbation_norm_is_calibrated() {
        let model = build_shift_model(20).unwrap();
        let p = random_finite_rank_perturbation(&model, 3, 0.4, 42, false).unwrap();
        let diff = p.dense() - model.dense();
        let sigma_max = linalg::op_norm(&model.dense());
        let norm = linalg::op_norm(&diff);
        assert!((norm - 0.4 * sigma_max).abs() < 1e-10);
    }

    #[test]
    fn seeded_perturbations_are_reproducible() {
        let model = build_shift_model(12).unwrap();
        let a = random_finite_rank_perturbation(&model, 2, 0.2, 5, false).unwrap();
        let b = random_finite_rank_perturbation(&model, 2, 0.2, 5, false).unwrap();
        assert_eq!(a.dense(), b.dense());
        let c = random_finite_rank_perturbation(&model, 2, 0.2, 6, false).unwrap();
        assert!(linalg::max_abs(&(c.dense() - a.dense())) > 1e-6);
    }

    #[test]
    fn labeled_model_requires_equivariant_flag() {
        let model = build_shift_model_z2(12).unwrap();
        assert!(matches!(
            random_finite_rank_perturbation(&model, 1, 0.1, 0, false),
            Err(Error::BlockStructure(_))
        ));
        let p = random_finite_rank_perturbation(&model, 1, 0.1, 0, true).unwrap();
        p.validate().unwrap();
    }

    #[test]
    fn norm_cap_is_enforced() {
        let model = build_shift_model(8).unwrap();
        assert!(random_finite_rank_perturbation(&model, 1, 0.6, 0, false).is_err());
    }

    #[test]
    fn rank_cap_is_enforced() {
        let model = build_shift_model(8).unwrap();
        assert!(random_finite_rank_perturbation(&model, 7, 0.1, 0, false).is_err());
    }
}
