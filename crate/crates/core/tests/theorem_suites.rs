//! Cross-module integration checks: convergence plateaus across resolutions
//! and radii, windowed-character intersection semantics, and suite plumbing
//! on the built-in models.

use eqindex_core::index::{
    convergence_study, deformed_plane_index, equivariant_index, fredholm_index, homotopy_suite,
    numeric_kernel, stability_suite, IndexValue, RankPolicy,
};
use eqindex_core::models::{
    build_circle_model, build_plane_weight_model, build_product_model, build_shift_model,
    build_toeplitz_model, sin_potential, PlaneParams, Rescaling,
};
use num_complex::Complex64;

fn policy() -> RankPolicy {
    RankPolicy::default()
}

/// Plane kernel/cokernel dimensions reach a plateau: unchanged when the
/// radial resolution doubles and when the cutoff radius grows by 2.
#[test]
fn plane_multiplicities_stable_under_resolution_and_radius() {
    let configs = [
        PlaneParams::new(150, 6.0, Rescaling::One),
        PlaneParams::new(300, 6.0, Rescaling::One),
        PlaneParams::new(150, 8.0, Rescaling::One),
    ];
    for w in [-3i64, 0, 1, 4] {
        let dims: Vec<(usize, usize)> = configs
            .iter()
            .map(|p| {
                let block = build_plane_weight_model(w, p).unwrap().dense();
                let ker = numeric_kernel(&block, &policy());
                let coker = numeric_kernel(&block.adjoint(), &policy());
                assert!(
                    ker.confident && coker.confident,
                    "indeterminate at weight {w}"
                );
                (ker.kernel_dim, coker.kernel_dim)
            })
            .collect();
        assert!(
            dims.windows(2).all(|d| d[0] == d[1]),
            "weight {w}: dims {dims:?}"
        );
    }
}

/// The same multiplicities are identical for both admissible rescalings,
/// across a window that straddles the cokernel ray.
#[test]
fn plane_multiplicities_identical_across_rescalings() {
    let one = deformed_plane_index(
        &PlaneParams::new(150, 6.0, Rescaling::One),
        (-5, 5),
        &policy(),
    )
    .unwrap();
    let quad = deformed_plane_index(
        &PlaneParams::new(150, 6.0, Rescaling::Quad),
        (-5, 5),
        &policy(),
    )
    .unwrap();
    assert_eq!(one.character, quad.character);
}

/// Windowed characters computed over different windows agree on the
/// intersection and stay silent outside it.
#[test]
fn windowed_characters_agree_on_intersections() {
    let p = PlaneParams::new(120, 6.0, Rescaling::One);
    let a = deformed_plane_index(&p, (-3, 3), &policy())
        .unwrap()
        .character;
    let b = deformed_plane_index(&p, (0, 5), &policy())
        .unwrap()
        .character;
    assert!(a.agrees_with(&b));
    assert_eq!(a.get(5), None);
    assert_eq!(b.get(-1), None);
}

/// Circle model kernel dimension is 1 at every cutoff in the ladder.
#[test]
fn circle_kernel_plateau_across_cutoffs() {
    let study = convergence_study(&[16, 32, 64], &|cutoff| {
        let model = build_circle_model(&sin_potential(), cutoff)?;
        let d = numeric_kernel(&model.dense(), &policy());
        Ok(IndexValue::Integer(d.kernel_dim as i64))
    })
    .unwrap();
    assert_eq!(study.accepted_value, IndexValue::Integer(1));
    assert!(study.values.iter().all(|v| *v == IndexValue::Integer(1)));
}

/// The shift model is an exact finite construction: the index is 2 at every
/// truncation size.
#[test]
fn shift_index_exact_at_all_truncations() {
    let study = convergence_study(&[8, 20, 64], &|n| {
        let model = build_shift_model(n)?;
        Ok(IndexValue::Integer(fredholm_index(&model, &policy())?))
    })
    .unwrap();
    assert!(study.values.iter().all(|v| *v == IndexValue::Integer(2)));
}

/// Equivariant stability of the product model: blockwise perturbations leave
/// the windowed character unchanged.
#[test]
fn product_model_equivariant_stability() {
    let base = build_shift_model(12).unwrap();
    let prod = build_product_model(&base, 2).unwrap();
    let outcome = stability_suite(&prod, 6, 2, 0.3, 11, &policy()).unwrap();
    assert!(outcome.passed, "{:#?}", outcome.cases);
}

/// Homotopy suite across the Toeplitz family `2 + s·z` stays at index 0 and
/// reports a confident verdict at every step.
#[test]
fn toeplitz_homotopy_reports_every_step() {
    let path = |s: f64| {
        build_toeplitz_model(
            &[(0, Complex64::new(2.0, 0.0)), (1, Complex64::new(s, 0.0))],
            48,
        )
    };
    let outcome = homotopy_suite("2 + s z", &path, 6, &policy()).unwrap();
    assert!(outcome.passed);
    assert_eq!(outcome.cases.len(), 6);
}

/// char_dim of a finitely supported equivariant index equals the integer
/// Fredholm index of the same model.
#[test]
fn character_dimension_consistency() {
    let model = eqindex_core::models::build_shift_model_z2(16).unwrap();
    let e = equivariant_index(&model, &policy()).unwrap();
    let IndexValue::Character(c) = e.value else {
        panic!("expected character")
    };
    assert_eq!(c.dim(), fredholm_index(&model, &policy()).unwrap());
}
