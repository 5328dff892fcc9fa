//! The acceptance criteria set: every headline number this crate must
//! reproduce, each with its tolerance pinned in code. The CLI `suite
//! acceptance` command and the `acceptance` integration test both run
//! [`run_all`] and report one line per criterion.

use num_complex::Complex64;

use crate::clifford::{make_pauli_action, make_plane_action};
use crate::group::IrrepLabel;
use crate::index::{
    deformed_plane_index, equivariant_index, fredholm_index_detailed, gluing_suite, numeric_kernel,
    stability_suite, IndexValue, RankPolicy,
};
use crate::linalg::{self, CMatrix, ONE};
use crate::models::{
    build_circle_model, build_derham_circle_model, build_plane_weight_model, build_product_model,
    build_shift_model, build_shift_model_z2, build_toeplitz_model, sin_potential, GluedParams,
    PlaneParams, Rescaling, Warp,
};
use crate::symbols::{
    deformed_symbol_check, dirac_operator, ellipticity_check, laplacian,
    transversal_ellipticity_check, unit_directions, DiffOpCoefficients, OrbitDirections,
    TamingField,
};

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionOutcome {
    fn eval(id: u32, name: &'static str, r: Result<String, String>) -> Self {
        match r {
            Ok(detail) => CriterionOutcome {
                id,
                name,
                passed: true,
                detail,
            },
            Err(detail) => CriterionOutcome {
                id,
                name,
                passed: false,
                detail,
            },
        }
    }
}

fn fail(msg: impl Into<String>) -> Result<String, String> {
    Err(msg.into())
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        // NaN-conservative: any incomparable value fails the criterion
        let ok: bool = $cond;
        if !ok {
            return fail(format!($($arg)*));
        }
    };
}

fn run_err<E: std::fmt::Display>(e: E) -> String {
    format!("computation failed: {e}")
}

/// Run one acceptance criterion by its number, `None` when out of range.
pub fn run_one(id: u32) -> Option<CriterionOutcome> {
    let policy = RankPolicy::default();
    Some(match id {
        1 => CriterionOutcome::eval(1, "shift operator index", shift_index(&policy)),
        2 => CriterionOutcome::eval(2, "equivariant shift", equivariant_shift(&policy)),
        3 => CriterionOutcome::eval(3, "Toeplitz winding indices", toeplitz_winding(&policy)),
        4 => CriterionOutcome::eval(4, "circle operator", circle_operator(&policy)),
        5 => CriterionOutcome::eval(5, "de Rham-Dirac on the circle", derham_circle(&policy)),
        6 => CriterionOutcome::eval(6, "product model", product_model(&policy)),
        7 => CriterionOutcome::eval(7, "deformed Dirac on the plane", deformed_plane(&policy)),
        8 => CriterionOutcome::eval(8, "f-independence", f_independence(&policy)),
        9 => CriterionOutcome::eval(9, "compact consistency", compact_consistency(&policy)),
        10 => CriterionOutcome::eval(10, "index stability", index_stability(&policy)),
        11 => CriterionOutcome::eval(11, "gluing additivity", gluing_additivity(&policy)),
        12 => CriterionOutcome::eval(12, "symbol suite", symbol_suite()),
        _ => return None,
    })
}

/// Run every acceptance criterion. Expected wall time: well under two
/// minutes in an optimized build.
pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=12)
        .map(|id| run_one(id).expect("criterion ids are 1..=12"))
        .collect()
}

/// 1. `Ind(shift at N = 20) = 2` exactly, with gap ratio at least 1e10.
fn shift_index(policy: &RankPolicy) -> Result<String, String> {
    let model = build_shift_model(20).map_err(run_err)?;
    let c = fredholm_index_detailed(&model, policy).map_err(run_err)?;
    ensure!(c.index == 2, "index {} != 2", c.index);
    let gap = [&c.kernel, &c.cokernel]
        .iter()
        .filter_map(|d| d.gap_ratio)
        .fold(f64::INFINITY, f64::min);
    ensure!(gap >= 1e10, "gap ratio {gap:.3e} below 1e10");
    Ok(format!("index 2, min gap ratio {gap:.2e}"))
}

/// 2. The Z₂-labeled shift has equivariant index `V₀ + V₁` (kernel
///    `V₀ ⊕ V₁`, trivial cokernel).
fn equivariant_shift(policy: &RankPolicy) -> Result<String, String> {
    let model = build_shift_model_z2(20).map_err(run_err)?;
    let e = equivariant_index(&model, policy).map_err(run_err)?;
    let IndexValue::Character(c) = &e.value else {
        return fail("expected a finite character");
    };
    ensure!(
        c.multiplicity(&IrrepLabel::Residue(0)) == 1
            && c.multiplicity(&IrrepLabel::Residue(1)) == 1
            && c.support_size() == 2,
        "character {c} != V0 + V1"
    );
    for lm in &e.per_label {
        ensure!(
            lm.cokernel.kernel_dim == 0,
            "cokernel at {} not trivial",
            lm.domain_label
        );
    }
    Ok(format!("index {c}"))
}

/// 3. Toeplitz symbols `z̄, z̄², z̄³` give indices +1, +2, +3 and `z, z², z³`
///    give -1, -2, -3 at N = 64, cross-checked by an LU rank oracle.
fn toeplitz_winding(policy: &RankPolicy) -> Result<String, String> {
    for k in 1..=3i64 {
        for (power, expected) in [(-k, k), (k, -k)] {
            let model = build_toeplitz_model(&[(power, ONE)], 64).map_err(run_err)?;
            let c = fredholm_index_detailed(&model, policy).map_err(run_err)?;
            ensure!(
                c.index == expected,
                "symbol z^{power}: index {} != {expected}",
                c.index
            );
            // independent dense rank oracle
            let dense = model.dense();
            let rank = linalg::lu_rank(&dense, 1e-10);
            let oracle = (dense.ncols() - rank) as i64 - (dense.nrows() - rank) as i64;
            ensure!(
                oracle == expected,
                "LU oracle disagrees at z^{power}: {oracle}"
            );
        }
    }
    Ok("indices +1,+2,+3 / -1,-2,-3 confirmed against the dense rank oracle".into())
}

/// 4. `-i d/dt + sin t` at cutoff 32: index 0, kernel dimension 1 (the
///    analytic kernel is spanned by `e^{i cos t}`).
fn circle_operator(policy: &RankPolicy) -> Result<String, String> {
    let model = build_circle_model(&sin_potential(), 32).map_err(run_err)?;
    let c = fredholm_index_detailed(&model, policy).map_err(run_err)?;
    ensure!(c.index == 0, "index {} != 0", c.index);
    ensure!(
        c.kernel.kernel_dim == 1,
        "kernel dim {} != 1",
        c.kernel.kernel_dim
    );
    ensure!(
        c.cokernel.kernel_dim == 1,
        "cokernel dim {} != 1",
        c.cokernel.kernel_dim
    );
    // the analytic kernel e^{i cos t}, projected by quadrature, must be
    // annihilated at the rank-policy scale
    let dense = model.dense();
    let cutoff = 32i64;
    let q = 512;
    let coeffs: Vec<Complex64> = (-cutoff..=cutoff)
        .map(|k| {
            (0..q)
                .map(|j| {
                    let t = 2.0 * std::f64::consts::PI * j as f64 / q as f64;
                    Complex64::from_polar(1.0, t.cos())
                        * Complex64::from_polar(1.0, -(k as f64) * t)
                })
                .sum::<Complex64>()
                / Complex64::new(q as f64, 0.0)
        })
        .collect();
    let v = nalgebra::DVector::from_vec(coeffs);
    let residual = (&dense * &v).norm() / v.norm();
    ensure!(
        residual < 1e-8,
        "analytic kernel residual {residual:.3e} above 1e-8"
    );
    Ok(format!(
        "index 0, kernel dim 1, analytic-kernel residual {residual:.1e}"
    ))
}

/// 5. de Rham-Dirac on the circle: `dim Ker(d + d*) = 2` and
///    `Ind(D⁺) = 0`, the Euler characteristic of the circle.
fn derham_circle(policy: &RankPolicy) -> Result<String, String> {
    let model = build_derham_circle_model(16, false).map_err(run_err)?;
    let full = model.graded_full_dense().map_err(run_err)?;
    let d = numeric_kernel(&full, policy);
    ensure!(d.confident, "full-operator kernel indeterminate");
    ensure!(d.kernel_dim == 2, "dim Ker(d + d*) = {} != 2", d.kernel_dim);
    let c = fredholm_index_detailed(&model, policy).map_err(run_err)?;
    ensure!(
        c.index == 0,
        "Ind(D⁺) = {} != 0 (Euler characteristic)",
        c.index
    );
    Ok("dim Ker(d+d*) = 2, Ind(D⁺) = 0 = Euler characteristic".into())
}

/// 6. Product model over a base of index 2 with window 4: multiplicity 2 at
///    each of the 9 weights, each irreducible entering once per Peter-Weyl.
fn product_model(policy: &RankPolicy) -> Result<String, String> {
    let base = build_shift_model(20).map_err(run_err)?;
    let prod = build_product_model(&base, 4).map_err(run_err)?;
    let e = equivariant_index(&prod, policy).map_err(run_err)?;
    let IndexValue::Windowed(w) = &e.value else {
        return fail("expected a windowed character");
    };
    ensure!(w.window() == (-4, 4), "window {:?} != (-4, 4)", w.window());
    for m in -4..=4 {
        ensure!(
            w.get(m) == Some(2),
            "multiplicity at weight {m}: {:?} != 2",
            w.get(m)
        );
    }
    Ok("multiplicity 2 at each of the 9 weights in [-4, 4]".into())
}

fn plane_params() -> PlaneParams {
    PlaneParams::new(400, 8.0, Rescaling::One)
}

/// 7. Deformed Dirac on the plane, window [-8, 8] at n_r = 400, R = 8:
///    kernel multiplicities all 0; cokernel multiplicities exactly 1 for every
///    codomain weight on the ray starting at `offset + 1` and 0 below, matching
///    the closed-form solutions `z̄^k e^{-|z|²/2}` and the per-weight dense
///    eigensolve oracle; all multiplicities finite.
fn deformed_plane(policy: &RankPolicy) -> Result<String, String> {
    let params = plane_params();
    let d = deformed_plane_index(&params, (-8, 8), policy).map_err(run_err)?;
    let ray_start = d.label_offset + 1;
    for e in &d.entries {
        ensure!(
            e.kernel_multiplicity == 0,
            "kernel at weight {} is {}",
            e.weight,
            e.kernel_multiplicity
        );
        let expected = usize::from(e.weight >= ray_start);
        ensure!(
            e.cokernel_multiplicity == expected,
            "cokernel at codomain weight {} is {} != {expected}",
            e.weight,
            e.cokernel_multiplicity
        );
    }
    // Closed form: the half-density of z̄^k e^{-|z|²/2} at codomain weight
    // k >= 0 is annihilated by the adjoint block.
    let h = params.radius / params.n_r as f64;
    for k in [0i64, 3, 8] {
        let block = build_plane_weight_model(k + 1, &params)
            .map_err(run_err)?
            .dense();
        let eta = nalgebra::DVector::from_iterator(
            block.nrows(),
            (0..block.nrows()).map(|j| {
                let r = (j as f64 + 0.5) * h;
                Complex64::new(r.powf(k as f64 + 0.5) * (-r * r / 2.0).exp(), 0.0)
            }),
        );
        let residual = (block.adjoint() * &eta).norm() / eta.norm();
        ensure!(
            residual < 10.0 * h,
            "closed-form cokernel residual at codomain weight {k}: {residual:.3e}"
        );
    }
    // Dense eigensolve oracle per weight: the smallest eigenvalue of the
    // codomain square `t t*` vanishes exactly on the cokernel ray, while the
    // domain square `t* t` stays gapped everywhere.
    for w in -8..=9i64 {
        let a = build_plane_weight_model(w, &params)
            .map_err(run_err)?
            .dense();
        let dom_low = linalg::hermitian_eigenvalues(&(a.adjoint() * &a))[0];
        ensure!(
            dom_low > 0.5,
            "eigensolve oracle: kernel-side gap lost at weight {w}: {dom_low:.3e}"
        );
        let cod_ev = linalg::hermitian_eigenvalues(&(&a * a.adjoint()));
        if w >= 1 {
            ensure!(
                cod_ev[0].abs() < 1e-6,
                "eigensolve oracle: no zero mode at weight {w}"
            );
            ensure!(
                cod_ev[1] > 0.5,
                "eigensolve oracle: cokernel gap lost at weight {w}"
            );
        } else {
            ensure!(
                cod_ev[0] > 0.5,
                "eigensolve oracle: spurious zero mode at weight {w}"
            );
        }
    }
    Ok(format!(
        "kernel 0 everywhere, cokernel 1 exactly on codomain weights >= {ray_start} (recorded offset {}), closed forms and eigensolve oracle agree",
        d.label_offset
    ))
}

/// 8. The windowed character of criterion 7 is bit-identical for `f ≡ 1`
///    and `f = 1 + r²`.
fn f_independence(policy: &RankPolicy) -> Result<String, String> {
    let one = deformed_plane_index(&plane_params(), (-8, 8), policy).map_err(run_err)?;
    let quad = deformed_plane_index(
        &PlaneParams::new(400, 8.0, Rescaling::Quad),
        (-8, 8),
        policy,
    )
    .map_err(run_err)?;
    ensure!(
        one.character == quad.character,
        "characters differ between f choices"
    );
    let bytes_one = serde_json::to_string(&one.character).map_err(run_err)?;
    let bytes_quad = serde_json::to_string(&quad.character).map_err(run_err)?;
    ensure!(
        bytes_one == bytes_quad,
        "serialized characters are not byte-identical"
    );
    Ok("windowed characters bit-identical for f = 1 and f = 1 + r²".into())
}

/// 9. Deformed and undeformed de Rham-Dirac on the circle have equal indices.
fn compact_consistency(policy: &RankPolicy) -> Result<String, String> {
    let plain = build_derham_circle_model(16, false).map_err(run_err)?;
    let deformed = build_derham_circle_model(16, true).map_err(run_err)?;
    let e_plain = equivariant_index(&plain, policy).map_err(run_err)?;
    let e_def = equivariant_index(&deformed, policy).map_err(run_err)?;
    ensure!(
        e_plain.value == e_def.value,
        "indices differ: {} vs {}",
        e_plain.value,
        e_def.value
    );
    let i_plain = fredholm_index_detailed(&plain, policy)
        .map_err(run_err)?
        .index;
    let i_def = fredholm_index_detailed(&deformed, policy)
        .map_err(run_err)?
        .index;
    ensure!(
        i_plain == i_def && i_plain == 0,
        "integer indices {i_plain} vs {i_def}"
    );
    Ok("deformed and undeformed indices agree (both 0)".into())
}

/// 10. 100 seeded finite-rank perturbations (ranks cycling 1..=3, relative
///     norm 0.4) leave the shift, Toeplitz-z and circle indices unchanged.
fn index_stability(policy: &RankPolicy) -> Result<String, String> {
    let models = [
        build_shift_model(20).map_err(run_err)?,
        build_toeplitz_model(&[(1, ONE)], 64).map_err(run_err)?,
        build_circle_model(&sin_potential(), 32).map_err(run_err)?,
    ];
    for model in &models {
        let outcome = stability_suite(model, 100, 3, 0.4, 0, policy).map_err(run_err)?;
        if !outcome.passed {
            let bad = outcome.cases.iter().find(|c| !c.passed).unwrap();
            return fail(format!("{}: {} ({})", outcome.name, bad.label, bad.detail));
        }
    }
    Ok("300 perturbation trials across three models, all indices unchanged".into())
}

/// 11. Gluing additivity inner + outer = unsplit per weight on [-4, 4] at
///     the resolution certified by a convergence study (reported in the detail).
fn gluing_additivity(policy: &RankPolicy) -> Result<String, String> {
    let params = GluedParams {
        split_radius: 3.0,
        n_r: 400,
        radius: 8.0,
        rescaling: Rescaling::One,
        warp: Warp::InverseLinear,
    };
    let outcome = gluing_suite(&params, (-4, 4), &[100, 200, 400], policy).map_err(run_err)?;
    if !outcome.passed {
        let bad = outcome.cases.iter().find(|c| !c.passed).unwrap();
        return fail(format!("{}: {}", bad.label, bad.detail));
    }
    Ok(format!(
        "all 9 weight equalities hold; {}",
        outcome.cases[0].detail
    ))
}

/// 12. Symbol suite: Laplacian symbol `|ξ|²` to 1e-12; Dirac symbol `i·c(ξ)`
///     to 1e-12; plane Dirac elliptic; `-i ∂_x` on the torus with the circle
///     translating `y` transversally elliptic but not elliptic; `c(ξ + v)`
///     invertible on the transversal bundle away from the origin fiber.
fn symbol_suite() -> Result<String, String> {
    let points: Vec<Vec<f64>> = {
        let mut pts = Vec::new();
        for i in 0..8 {
            for j in 0..8 {
                pts.push(vec![-3.5 + i as f64, -3.5 + j as f64]);
            }
        }
        pts
    };
    // Laplacian symbol equals |ξ|² on sphere samples
    let lap = laplacian(2);
    for x in points.iter().take(8) {
        for xi in unit_directions(2, 32) {
            let s = lap.leading_symbol(x, &xi).map_err(run_err)?;
            let expected = xi.iter().map(|a| a * a).sum::<f64>();
            let dev = (s[(0, 0)] - Complex64::new(expected, 0.0)).norm();
            ensure!(dev < 1e-12, "Laplacian symbol deviation {dev:.3e}");
        }
    }
    // Dirac symbol equals i·c(ξ)
    let action = make_plane_action();
    let dirac = dirac_operator(&action);
    for xi in unit_directions(2, 32) {
        let s = dirac.leading_symbol(&[0.3, -0.4], &xi).map_err(run_err)?;
        let expected = action.dirac_symbol(&xi).map_err(run_err)?;
        let dev = linalg::max_abs(&(s - expected));
        ensure!(dev < 1e-12, "Dirac symbol deviation {dev:.3e}");
    }
    ensure!(
        make_pauli_action().verify().passed,
        "Pauli action failed verification"
    );
    // plane Dirac elliptic
    let e = ellipticity_check(&dirac, &points, 64).map_err(run_err)?;
    ensure!(e.elliptic, "plane Dirac not reported elliptic");
    // -i ∂_x on the torus: transversally elliptic, not elliptic
    let mut op = DiffOpCoefficients::new(1, 2, 1, 1);
    op.add_const_term(vec![1, 0], CMatrix::from_element(1, 1, ONE))
        .map_err(run_err)?;
    let full = ellipticity_check(&op, &points, 64).map_err(run_err)?;
    ensure!(!full.elliptic, "torus operator wrongly reported elliptic");
    let trans =
        transversal_ellipticity_check(&op, &OrbitDirections::torus_translation_y(), &points, 64)
            .map_err(run_err)?;
    ensure!(
        trans.transversally_elliptic,
        "torus operator not transversally elliptic"
    );
    // deformed symbol invertible away from the origin fiber
    let field = TamingField::generating_plane_rotation();
    let mut pts = points.clone();
    pts.push(vec![0.0, 0.0]);
    let ds = deformed_symbol_check(
        &action,
        &field,
        &OrbitDirections::plane_rotation(),
        &pts,
        32,
    )
    .map_err(run_err)?;
    ensure!(
        ds.invertible_away_from_locus,
        "c(ξ+v) degenerate away from the locus"
    );
    ensure!(
        ds.degenerate_points.len() == 1 && ds.locus_radius < 1e-12,
        "non-invertible locus is not the origin fiber: {} points, radius {:.3e}",
        ds.degenerate_points.len(),
        ds.locus_radius
    );
    Ok(
        "Laplacian and Dirac symbols exact to 1e-12; ellipticity verdicts as expected; \
        deformed symbol invertible away from the origin fiber"
            .into(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    // The full gate lives in tests/acceptance.rs; here only the fast
    // criteria run as unit smoke checks.
    #[test]
    fn fast_criteria_pass() {
        let policy = RankPolicy::default();
        for (name, r) in [
            ("shift", shift_index(&policy)),
            ("equivariant shift", equivariant_shift(&policy)),
            ("toeplitz", toeplitz_winding(&policy)),
            ("circle", circle_operator(&policy)),
            ("derham", derham_circle(&policy)),
            ("product", product_model(&policy)),
            ("compact consistency", compact_consistency(&policy)),
            ("symbols", symbol_suite()),
        ] {
            assert!(r.is_ok(), "{name}: {}", r.unwrap_err());
        }
    }
}
