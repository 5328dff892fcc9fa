//! Theorem-verification suites: index stability under finite-rank
//! perturbations, homotopy invariance, composition/adjoint identities,
//! gluing additivity, and convergence studies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupDesc;
use crate::index::{equivariant_index, fredholm_index, fredholm_of_matrix, IndexValue, RankPolicy};
use crate::models::{
    build_glued_plane_models, random_finite_rank_perturbation, GluedParams, IsotypicBlockOperator,
    PlaneParams,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

impl CaseOutcome {
    pub fn new(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CaseOutcome {
            label: label.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: bool,
    pub cases: Vec<CaseOutcome>,
}

impl SuiteOutcome {
    pub fn from_cases(name: impl Into<String>, cases: Vec<CaseOutcome>) -> Self {
        let passed = cases.iter().all(|c| c.passed);
        SuiteOutcome {
            name: name.into(),
            passed,
            cases,
        }
    }
}

fn index_value(model: &IsotypicBlockOperator, policy: &RankPolicy) -> Result<IndexValue> {
    Ok(equivariant_index(model, policy)?.value)
}

/// Perturb the model `trials` times with seeded finite-rank noise (ranks
/// cycling through `1..=max_rank`) and check that every index equals the
/// unperturbed one. Labeled models are perturbed blockwise.
pub fn stability_suite(
    model: &IsotypicBlockOperator,
    trials: usize,
    max_rank: usize,
    relative_norm: f64,
    base_seed: u64,
    policy: &RankPolicy,
) -> Result<SuiteOutcome> {
    if trials == 0 {
        return Err(Error::InvalidParameter(
            "stability suite needs at least one trial".into(),
        ));
    }
    let baseline = index_value(model, policy)?;
    let labeled = model.group() != GroupDesc::Trivial || model.domain_labels().len() > 1;
    let mut cases = Vec::with_capacity(trials);
    for t in 0..trials {
        let rank = if max_rank == 0 { 0 } else { 1 + t % max_rank };
        let seed = base_seed.wrapping_add(t as u64);
        let perturbed = random_finite_rank_perturbation(model, rank, relative_norm, seed, labeled)?;
        let value = index_value(&perturbed, policy)?;
        let passed = value == baseline;
        cases.push(CaseOutcome::new(
            format!("trial {t} (rank {rank}, seed {seed})"),
            passed,
            if passed {
                String::new()
            } else {
                format!("index {value} != baseline {baseline}")
            },
        ));
    }
    Ok(SuiteOutcome::from_cases(
        format!("stability[{}]", model.metadata().kind),
        cases,
    ))
}

/// Walk a parameterized family of models and check the index is constant.
/// Every step must pass the gap-ratio confidence test; an indeterminate step
/// is an error, not a silent pass.
pub fn homotopy_suite(
    name: &str,
    path: &dyn Fn(f64) -> Result<IsotypicBlockOperator>,
    steps: usize,
    policy: &RankPolicy,
) -> Result<SuiteOutcome> {
    if steps < 2 {
        return Err(Error::InvalidParameter(
            "homotopy suite needs at least two steps".into(),
        ));
    }
    let mut baseline = None;
    let mut cases = Vec::with_capacity(steps);
    for k in 0..steps {
        let s = k as f64 / (steps - 1) as f64;
        let model = path(s)?;
        let value = index_value(&model, policy)?;
        let reference = baseline.get_or_insert_with(|| value.clone());
        let passed = value == *reference;
        cases.push(CaseOutcome::new(
            format!("s = {s:.3}"),
            passed,
            if passed {
                format!("index {value}")
            } else {
                format!("index {value} != {reference}")
            },
        ));
    }
    Ok(SuiteOutcome::from_cases(format!("homotopy[{name}]"), cases))
}

/// `Ind(B ∘ A) = Ind(A) + Ind(B)` on computed integers.
pub fn composition_check(
    a: &IsotypicBlockOperator,
    b: &IsotypicBlockOperator,
    policy: &RankPolicy,
) -> Result<CaseOutcome> {
    let composed = a.then(b)?;
    let ia = fredholm_index(a, policy)?;
    let ib = fredholm_index(b, policy)?;
    let ic = fredholm_index(&composed, policy)?;
    let passed = ic == ia + ib;
    Ok(CaseOutcome::new(
        "composition",
        passed,
        format!("Ind(BA) = {ic}, Ind(A) + Ind(B) = {} + {}", ia, ib),
    ))
}

/// Per-weight gluing additivity at one resolution: for every weight in the
/// window, index(inner) + index(outer) = index(unsplit).
pub fn gluing_check(
    params: &GluedParams,
    window: (i64, i64),
    policy: &RankPolicy,
) -> Result<SuiteOutcome> {
    let unsplit_params = PlaneParams::new(params.n_r, params.radius, params.rescaling);
    let mut cases = Vec::new();
    for w in window.0..=window.1 {
        let unsplit = crate::models::build_plane_weight_model(w, &unsplit_params)?;
        let (inner, outer) = build_glued_plane_models(w, params)?;
        let iu = fredholm_of_matrix(&unsplit.dense(), policy, "unsplit")?.index;
        let ii = fredholm_of_matrix(&inner.dense(), policy, "inner")?.index;
        let io = fredholm_of_matrix(&outer.dense(), policy, "outer")?.index;
        let passed = ii + io == iu;
        cases.push(CaseOutcome::new(
            format!("weight {w}"),
            passed,
            format!(
                "inner {ii} + outer {io} vs unsplit {iu} (n_r = {})",
                params.n_r
            ),
        ));
    }
    Ok(SuiteOutcome::from_cases("gluing", cases))
}

/// Index values across a ladder of resolutions. The accepted value requires
/// the last two resolutions to agree (every per-resolution computation
/// already enforces gap-ratio confidence).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub resolutions: Vec<usize>,
    pub values: Vec<IndexValue>,
    pub accepted_resolution: usize,
    pub accepted_value: IndexValue,
}

pub fn convergence_study(
    resolutions: &[usize],
    build: &dyn Fn(usize) -> Result<IndexValue>,
) -> Result<ConvergenceStudy> {
    if resolutions.len() < 3 {
        return Err(Error::InvalidParameter(
            "convergence study needs at least three resolutions".into(),
        ));
    }
    let mut values = Vec::with_capacity(resolutions.len());
    for &res in resolutions {
        values.push(build(res)?);
    }
    let n = values.len();
    if values[n - 1] != values[n - 2] {
        return Err(Error::NoPlateau(format!(
            "values at the two finest resolutions differ: {} vs {}",
            values[n - 2],
            values[n - 1]
        )));
    }
    Ok(ConvergenceStudy {
        resolutions: resolutions.to_vec(),
        values: values.clone(),
        accepted_resolution: resolutions[n - 1],
        accepted_value: values[n - 1].clone(),
    })
}

/// The convergence-contingent gluing suite: establish a resolution plateau of
/// the unsplit windowed index first, then check per-weight additivity at the
/// accepted resolution. The outcome reports the resolution it certified.
pub fn gluing_suite(
    params: &GluedParams,
    window: (i64, i64),
    resolutions: &[usize],
    policy: &RankPolicy,
) -> Result<SuiteOutcome> {
    let study = convergence_study(resolutions, &|n_r| {
        let p = PlaneParams::new(n_r, params.radius, params.rescaling);
        Ok(IndexValue::Windowed(
            crate::index::deformed_plane_index(&p, window, policy)?.character,
        ))
    })?;
    let accepted = GluedParams {
        n_r: study.accepted_resolution,
        ..*params
    };
    let mut outcome = gluing_check(&accepted, window, policy)?;
    outcome.cases.insert(
        0,
        CaseOutcome::new(
            "converged resolution",
            true,
            format!(
                "plateau over {:?}, accepted n_r = {}",
                study.resolutions, study.accepted_resolution
            ),
        ),
    );
    Ok(outcome)
}
