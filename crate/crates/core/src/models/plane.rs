//! Per-weight radial models of the deformed Dirac operator on the plane,
//! and the glued (split-at-a-circle) variants.
//!
//! The operator is `D_{fv} = D + i c(fv)` for the plane Clifford action, the
//! rotation taming field `v(z) = iz`, and an admissible rescaling `f`. Its
//! `E⁺ -> E⁻` block is `D⁺_{fv} = -i(2∂_z̄ - fz·)` with
//! `2∂_z̄ = e^{iθ}(∂_r + (i/r)∂_θ)`.
//!
//! Isotypic labels are the circle-representation weights of scalar modes: a
//! section with angular factor `e^{imθ}` carries label `w = -m` (so `z̄^k`
//! carries label `+k`). The block then maps domain weight `w` to codomain
//! weight `w - 1` (label offset -1), and its radial reduction in the
//! half-density gauge `ψ = √r·φ` is
//!
//! ```text
//!     t_w = -i( d/dr + (w - 1/2)/r - f(r)·r )      on L²(dr),
//! ```
//!
//! whose formal kernel `r^{1/2-w} e^{+∫fr}` is never square integrable while
//! the adjoint kernel `r^{w-1/2} e^{-∫fr}` is square integrable exactly for
//! `w >= 1` — the half-density form of the closed-form solutions
//! `z̄^{w-1} e^{-|z|²/2}`. The staggered midpoint discretization reproduces
//! this count structurally: dropping the origin midpoint row exactly when the
//! adjoint branch is inadmissible (`w <= 0`) gives a square invertible block
//! there and an `(n)×(n-1)` block of cokernel one on the ray.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupDesc, IrrepLabel};
use crate::linalg::{CMatrix, I};

use super::{IsotypicBlockOperator, ModelMetadata};

/// Admissible rescaling choices for the deformation `i c(fv)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rescaling {
    /// `f ≡ 1`
    One,
    /// `f = 1 + r²`
    Quad,
}

impl Rescaling {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Rescaling::One => 1.0,
            Rescaling::Quad => 1.0 + r * r,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Rescaling::One => "one",
            Rescaling::Quad => "quad",
        }
    }
}

/// Conformal warp profile used to complete the glued pieces near the split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Warp {
    /// conformal factor `δ/(distance to r₀)` inside the collar
    InverseLinear,
    /// conformal factor `(δ/distance)²`
    InverseSquare,
}

impl Warp {
    /// Stretch depth in collar units; chosen so the collar potential stays
    /// around 1e3-1e4 and relative rank thresholds remain far below the O(1)
    /// spectral gaps, while the admissible branches decay to ~0 well before
    /// the truncation.
    fn depth(&self) -> f64 {
        match self {
            Warp::InverseLinear => 5.0,
            Warp::InverseSquare => 7.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Warp::InverseLinear => "inverse_linear",
            Warp::InverseSquare => "inverse_square",
        }
    }
}

/// Parameters of the unsplit per-weight plane model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneParams {
    pub n_r: usize,
    pub radius: f64,
    pub rescaling: Rescaling,
}

impl PlaneParams {
    pub fn new(n_r: usize, radius: f64, rescaling: Rescaling) -> Self {
        PlaneParams {
            n_r,
            radius,
            rescaling,
        }
    }
}

/// Parameters of the glued pair (inner disk, outer annulus).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GluedParams {
    pub split_radius: f64,
    pub n_r: usize,
    pub radius: f64,
    pub rescaling: Rescaling,
    pub warp: Warp,
}

/// Half-density radial potential of the flat deformed block at domain
/// weight `w`.
fn flat_potential(w: i64, f: Rescaling, r: f64) -> f64 {
    (w as f64 - 0.5) / r - f.eval(r) * r
}

/// Staggered bidiagonal assembly: rows are midpoints of consecutive nodes,
/// columns the kept nodes. `node_value(j)` reports whether node `j` is a dof
/// (column index) or eliminated.
struct StaggeredGrid {
    /// s-coordinates of nodes 0..=n
    nodes: Vec<f64>,
    /// column index of each node, `None` when eliminated
    cols: Vec<Option<usize>>,
    /// row index of each midpoint `j+1/2`, `None` when dropped
    rows: Vec<Option<usize>>,
    n_cols: usize,
    n_rows: usize,
}

impl StaggeredGrid {
    fn new(
        nodes: Vec<f64>,
        keep_node: impl Fn(usize) -> bool,
        keep_row: impl Fn(usize) -> bool,
    ) -> Self {
        let n = nodes.len() - 1;
        let mut cols = Vec::with_capacity(n + 1);
        let mut n_cols = 0;
        for j in 0..=n {
            if keep_node(j) {
                cols.push(Some(n_cols));
                n_cols += 1;
            } else {
                cols.push(None);
            }
        }
        let mut rows = Vec::with_capacity(n);
        let mut n_rows = 0;
        for j in 0..n {
            if keep_row(j) {
                rows.push(Some(n_rows));
                n_rows += 1;
            } else {
                rows.push(None);
            }
        }
        StaggeredGrid {
            nodes,
            cols,
            rows,
            n_cols,
            n_rows,
        }
    }

    /// Assemble `-i( dψ/ds + V(s_mid)·ψ(s_mid) )` with midpoint averaging.
    fn assemble(&self, potential: impl Fn(f64) -> f64) -> CMatrix {
        let mut m = CMatrix::zeros(self.n_rows, self.n_cols);
        let n = self.nodes.len() - 1;
        for j in 0..n {
            let Some(row) = self.rows[j] else { continue };
            let ds = self.nodes[j + 1] - self.nodes[j];
            let mid = 0.5 * (self.nodes[j] + self.nodes[j + 1]);
            let v = potential(mid);
            if let Some(c) = self.cols[j] {
                m[(row, c)] = -I * Complex64::new(-1.0 / ds + 0.5 * v, 0.0);
            }
            if let Some(c) = self.cols[j + 1] {
                m[(row, c)] = -I * Complex64::new(1.0 / ds + 0.5 * v, 0.0);
            }
        }
        m
    }
}

fn check_plane_params(n_r: usize, radius: f64) -> Result<()> {
    if n_r < 100 {
        return Err(Error::InvalidParameter(format!(
            "plane model needs n_r >= 100, got {n_r}"
        )));
    }
    if !radius.is_finite() || radius < 6.0 {
        return Err(Error::InvalidParameter(format!(
            "plane model needs a finite radius >= 6 (the Dirichlet cutoff must sit past the Gaussian decay), got {radius}"
        )));
    }
    Ok(())
}

/// The unsplit per-weight block `t_w` on the uniform grid `r_j = j·R/n_r`,
/// with `ψ(0) = 0` regularity and a Dirichlet cutoff at `R`.
pub fn build_plane_weight_model(
    weight: i64,
    params: &PlaneParams,
) -> Result<IsotypicBlockOperator> {
    check_plane_params(params.n_r, params.radius)?;
    let n = params.n_r;
    let h = params.radius / n as f64;
    let nodes: Vec<f64> = (0..=n).map(|j| j as f64 * h).collect();
    let drop_origin_row = weight <= 0;
    let grid = StaggeredGrid::new(nodes, |j| j >= 1 && j < n, |j| !(drop_origin_row && j == 0));
    let f = params.rescaling;
    let matrix = grid.assemble(|r| flat_potential(weight, f, r));
    finish_weight_model(weight, matrix, "plane_weight", params_meta(params), None)
}

fn params_meta(params: &PlaneParams) -> Vec<(String, String)> {
    vec![
        ("n_r".into(), params.n_r.to_string()),
        ("radius".into(), params.radius.to_string()),
        ("rescaling".into(), params.rescaling.name().into()),
    ]
}

fn finish_weight_model(
    weight: i64,
    matrix: CMatrix,
    kind: &str,
    extra: Vec<(String, String)>,
    glued: Option<&GluedParams>,
) -> Result<IsotypicBlockOperator> {
    let mut meta = ModelMetadata::new(kind)
        .with("weight", weight)
        .with_offset(-1)
        .windowed();
    for (k, v) in extra {
        meta = meta.with(&k, v);
    }
    if let Some(g) = glued {
        meta = meta
            .with("split_radius", g.split_radius)
            .with("warp", g.warp.name());
    }
    let (rows, cols) = matrix.shape();
    let mut blocks = BTreeMap::new();
    blocks.insert(
        IrrepLabel::Weight(weight),
        (IrrepLabel::Weight(weight - 1), matrix),
    );
    IsotypicBlockOperator::new(
        GroupDesc::Circle,
        vec![(IrrepLabel::Weight(weight), cols)],
        vec![(IrrepLabel::Weight(weight - 1), rows)],
        blocks,
        true,
        meta,
    )
}

/// Inner-piece coordinate map: arc length `s` to `(r, ω)` for the disk piece
/// `(0, r₀)` with a conformal collar of width `δ = 0.1·r₀` at the split.
/// The warp is the identity for `r < r₀ - δ`.
pub fn inner_warp_profile(warp: Warp, split_radius: f64, s: f64) -> (f64, f64) {
    let delta = 0.1 * split_radius;
    let flat_end = split_radius - delta;
    if s <= flat_end {
        return (s, 1.0);
    }
    let u = (s - flat_end) / delta;
    match warp {
        Warp::InverseLinear => (split_radius - delta * (-u).exp(), (-u).exp()),
        Warp::InverseSquare => {
            let d = 1.0 / (1.0 + u);
            (split_radius - delta * d, d * d)
        }
    }
}

/// Outer-piece coordinate map: `s = 0` sits at the truncated collar end just
/// outside the split circle and increases toward the Dirichlet cutoff at `R`.
pub fn outer_warp_profile(warp: Warp, split_radius: f64, s: f64) -> (f64, f64) {
    let delta = 0.1 * split_radius;
    let depth = warp.depth();
    let collar_len = depth * delta;
    if s >= collar_len {
        return (split_radius + delta + (s - collar_len), 1.0);
    }
    let u = depth - s / delta;
    match warp {
        Warp::InverseLinear => (split_radius + delta * (-u).exp(), (-u).exp()),
        Warp::InverseSquare => {
            let d = 1.0 / (1.0 + u);
            (split_radius + delta * d, d * d)
        }
    }
}

/// The glued pair of per-weight models: the inner disk `(0, r₀)` and the
/// outer annulus `(r₀, R)`, each completed by the conformal collar stretch.
///
/// In arc-length coordinates the deformed block becomes
/// `-i( d/ds + ω·(w-1/2)/r - f(r)·r/ω )`: the geometric part scales by the
/// conformal factor while the taming part scales by `1/ω` (the taming field's
/// length measured in the warped metric diverges at the split), so the
/// admissible solution branches decay double-exponentially into the collar
/// and the truncation there is benign. The split circle is rejected when the
/// taming field would vanish on it (`r₀ = 0`).
pub fn build_glued_plane_models(
    weight: i64,
    params: &GluedParams,
) -> Result<(IsotypicBlockOperator, IsotypicBlockOperator)> {
    check_plane_params(params.n_r, params.radius)?;
    let r0 = params.split_radius;
    if !r0.is_finite() || r0 <= 0.0 {
        return Err(Error::InvalidParameter(
            "split radius must be positive: the taming field vanishes on the split circle r₀ = 0"
                .into(),
        ));
    }
    let delta = 0.1 * r0;
    if r0 + delta >= params.radius {
        return Err(Error::InvalidParameter(format!(
            "split radius {r0} (plus its collar {delta}) must sit inside the cutoff radius {}",
            params.radius
        )));
    }
    let n = params.n_r;
    let f = params.rescaling;
    let warp = params.warp;

    // Inner piece: origin regularity on the left, stretched collar on the
    // right (Dirichlet there: both solution branches are inadmissible or
    // decayed).
    let s_max = (r0 - delta) + warp.depth() * delta;
    let nodes: Vec<f64> = (0..=n).map(|j| j as f64 * s_max / n as f64).collect();
    let drop_origin_row = weight <= 0;
    let grid = StaggeredGrid::new(nodes, |j| j >= 1 && j < n, |j| !(drop_origin_row && j == 0));
    let inner_matrix = grid.assemble(|s| {
        let (r, omega) = inner_warp_profile(warp, r0, s);
        omega * (weight as f64 - 0.5) / r - f.eval(r) * r / omega
    });
    let inner = finish_weight_model(
        weight,
        inner_matrix,
        "plane_glued_inner",
        params_meta(&PlaneParams::new(
            params.n_r,
            params.radius,
            params.rescaling,
        )),
        Some(params),
    )?;

    // Outer piece: stretched collar end on the left (no boundary condition —
    // no solution branch is admissible at a taming end), Dirichlet at R.
    let s_len = warp.depth() * delta + (params.radius - r0 - delta);
    let nodes: Vec<f64> = (0..=n).map(|j| j as f64 * s_len / n as f64).collect();
    let grid = StaggeredGrid::new(nodes, |j| j < n, |_| true);
    let outer_matrix = grid.assemble(|s| {
        let (r, omega) = outer_warp_profile(warp, r0, s);
        omega * (weight as f64 - 0.5) / r - f.eval(r) * r / omega
    });
    let outer = finish_weight_model(
        weight,
        outer_matrix,
        "plane_glued_outer",
        params_meta(&PlaneParams::new(
            params.n_r,
            params.radius,
            params.rescaling,
        )),
        Some(params),
    )?;
    Ok((inner, outer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, hermitian_eigenvalues};

    fn params(n_r: usize, radius: f64, f: Rescaling) -> PlaneParams {
        PlaneParams::new(n_r, radius, f)
    }

    #[test]
    fn parameter_preconditions() {
        assert!(build_plane_weight_model(0, &params(50, 8.0, Rescaling::One)).is_err());
        assert!(build_plane_weight_model(0, &params(200, 4.0, Rescaling::One)).is_err());
    }

    #[test]
    fn shapes_follow_the_cokernel_ray() {
        let p = params(120, 6.0, Rescaling::One);
        for w in [-3i64, 0] {
            let m = build_plane_weight_model(w, &p).unwrap().dense();
            assert_eq!(m.shape(), (119, 119), "square off the ray at w = {w}");
        }
        for w in [1i64, 4] {
            let m = build_plane_weight_model(w, &p).unwrap().dense();
            assert_eq!(m.shape(), (120, 119), "rectangular on the ray at w = {w}");
        }
    }

    #[test]
    fn matrix_is_bidiagonal() {
        let m = build_plane_weight_model(2, &params(100, 6.0, Rescaling::Quad))
            .unwrap()
            .dense();
        for r in 0..m.nrows() {
            let nnz = (0..m.ncols()).filter(|&c| m[(r, c)].norm() > 0.0).count();
            assert!(nnz <= 2, "row {r} has {nnz} nonzeros");
        }
    }

    #[test]
    fn labels_and_offset() {
        let model = build_plane_weight_model(3, &params(100, 6.0, Rescaling::One)).unwrap();
        model.validate().unwrap();
        assert_eq!(model.metadata().label_offset, Some(-1));
        let (target, _) = model.block(&IrrepLabel::Weight(3)).unwrap();
        assert_eq!(*target, IrrepLabel::Weight(2));
    }

    /// Independent oracle: the per-weight Hermitian squares `t*t` (domain
    /// side) and `t t*` (codomain side). The smallest eigenvalue vanishes
    /// exactly on the cokernel side for `w >= 1` and is bounded below by the
    /// oscillator gap everywhere else.
    #[test]
    fn eigensolve_oracle_detects_the_cokernel_ray() {
        let p = params(160, 7.0, Rescaling::One);
        for w in [-2i64, 0, 1, 3] {
            let a = build_plane_weight_model(w, &p).unwrap().dense();
            let domain_square = a.adjoint() * &a;
            let codomain_square = &a * a.adjoint();
            let ker_low = hermitian_eigenvalues(&domain_square)[0];
            let coker_low = hermitian_eigenvalues(&codomain_square)[0];
            assert!(
                ker_low > 0.5,
                "kernel side must stay gapped at w = {w}: {ker_low}"
            );
            if w >= 1 {
                assert!(
                    coker_low.abs() < 1e-8,
                    "cokernel eigenvalue at w = {w}: {coker_low}"
                );
                let second = hermitian_eigenvalues(&codomain_square)[1];
                assert!(second > 0.5, "cokernel gap at w = {w}: {second}");
            } else {
                assert!(
                    coker_low > 0.5,
                    "no cokernel off the ray at w = {w}: {coker_low}"
                );
            }
        }
    }

    #[test]
    fn closed_form_adjoint_zero_mode_is_annihilated() {
        // codomain weight w-1 = k >= 0: the discretized r^{w-1/2} e^{-r²/2}
        // (half-density form of z̄^k e^{-|z|²/2}) lies in the cokernel.
        let n_r = 200;
        let radius = 7.0;
        for f in [Rescaling::One, Rescaling::Quad] {
            for w in [1i64, 2] {
                let a = build_plane_weight_model(w, &params(n_r, radius, f))
                    .unwrap()
                    .dense();
                let h = radius / n_r as f64;
                let eta = nalgebra::DVector::from_iterator(
                    n_r,
                    (0..n_r).map(|j| {
                        let r = (j as f64 + 0.5) * h;
                        let phase = match f {
                            Rescaling::One => -r * r / 2.0,
                            Rescaling::Quad => -r * r / 2.0 - r.powi(4) / 4.0,
                        };
                        Complex64::new(r.powf(w as f64 - 0.5) * phase.exp(), 0.0)
                    }),
                );
                let residual = (a.adjoint() * &eta).norm() / eta.norm();
                assert!(
                    residual < 10.0 * h,
                    "adjoint zero-mode residual at w = {w}, f = {:?}: {residual}",
                    f
                );
            }
        }
    }

    #[test]
    fn warp_is_identity_outside_the_collar() {
        let r0 = 3.0;
        let flat_end = r0 - 0.1 * r0; // 2.7
        for warp in [Warp::InverseLinear, Warp::InverseSquare] {
            for s in [0.1, 1.0, flat_end] {
                let (r, omega) = inner_warp_profile(warp, r0, s);
                assert_eq!(r, s);
                assert_eq!(omega, 1.0);
            }
            // deep in the collar: r -> r0 from below, omega small
            let (r_deep, omega_deep) = inner_warp_profile(warp, r0, flat_end + 1.2);
            assert!(r_deep < r0 && r_deep > flat_end);
            assert!(omega_deep < 0.2);
        }
    }

    #[test]
    fn outer_profile_spans_collar_to_cutoff() {
        let r0 = 3.0;
        let warp = Warp::InverseLinear;
        let (r_start, om_start) = outer_warp_profile(warp, r0, 0.0);
        assert!(r_start > r0 && r_start < r0 + 0.1 * r0);
        assert!(om_start < 0.01);
        let collar_len = warp.depth() * 0.1 * r0;
        let (r_flat, om_flat) = outer_warp_profile(warp, r0, collar_len + 2.0);
        assert!((r_flat - (r0 + 0.1 * r0 + 2.0)).abs() < 1e-12);
        assert_eq!(om_flat, 1.0);
    }

    #[test]
    fn taming_field_length_on_the_split_circle_is_its_radius() {
        let field = crate::symbols::TamingField::generating_plane_rotation();
        for r0 in [0.5f64, 3.0] {
            for theta in [0.0f64, 1.0, 2.5] {
                let v = field.field(&[r0 * theta.cos(), r0 * theta.sin()]);
                let len = (v[0] * v[0] + v[1] * v[1]).sqrt();
                assert!((len - r0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn glued_rejects_vanishing_taming_on_the_split() {
        let p = GluedParams {
            split_radius: 0.0,
            n_r: 100,
            radius: 8.0,
            rescaling: Rescaling::One,
            warp: Warp::InverseLinear,
        };
        assert!(build_glued_plane_models(0, &p).is_err());
    }

    #[test]
    fn glued_shapes() {
        let p = GluedParams {
            split_radius: 3.0,
            n_r: 100,
            radius: 8.0,
            rescaling: Rescaling::One,
            warp: Warp::InverseLinear,
        };
        let (inner, outer) = build_glued_plane_models(2, &p).unwrap();
        assert_eq!(inner.dense().shape(), (100, 99));
        assert_eq!(outer.dense().shape(), (100, 100));
        let (inner, outer) = build_glued_plane_models(-1, &p).unwrap();
        assert_eq!(inner.dense().shape(), (99, 99));
        assert_eq!(outer.dense().shape(), (100, 100));
        let _ = linalg::max_abs(&outer.dense());
    }
}
