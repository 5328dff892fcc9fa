//! Leading symbols of differential operators and ellipticity certificates.
//!
//! A differential operator of order `k` is stored as a table
//! `α ↦ a_α(x)` over multi-indices `|α| ≤ k`, in the convention
//! `D = Σ a_α(x) D^α` with `D_j = (1/i) ∂/∂x_j`. Its leading symbol is the
//! matrix polynomial `σ_L(x, ξ) = Σ_{|α|=k} a_α(x) ξ^α`, and ellipticity is
//! decided by sampling the smallest singular value of `σ_L` over base points
//! and unit covectors — a certificate, not a proof.

pub mod expr;

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::CliffordAction;
use crate::error::{Error, Result};
use crate::group::GroupDesc;
use crate::linalg::{self, CMatrix, I, ONE};
use expr::Expr;

/// Sampled smallest singular values below this are treated as symbol
/// degeneracies.
pub const ELLIPTICITY_THRESHOLD: f64 = 1e-8;

/// Default sampling budget: 64 base points, 128 sphere directions.
pub const DEFAULT_BASE_POINTS: usize = 64;
pub const DEFAULT_SPHERE_SAMPLES: usize = 128;

/// Coefficient sampler: base point -> `N₂ × N₁` complex matrix.
pub type CoeffFn = Arc<dyn Fn(&[f64]) -> CMatrix + Send + Sync>;

/// Sampler of tangent vectors spanning the group orbit at a point.
pub type OrbitSampler = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;

/// Sampler of the Lie-algebra value of a taming map at a point.
pub type MomentSampler = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// An order-`k` differential operator as a multi-index -> coefficient table.
#[derive(Clone)]
pub struct DiffOpCoefficients {
    order: usize,
    base_dim: usize,
    input_dim: usize,
    output_dim: usize,
    terms: Vec<(Vec<u32>, CoeffFn)>,
}

impl DiffOpCoefficients {
    pub fn new(order: usize, base_dim: usize, input_dim: usize, output_dim: usize) -> Self {
        DiffOpCoefficients {
            order,
            base_dim,
            input_dim,
            output_dim,
            terms: Vec::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    /// Add the term `a_α(x) D^α`.
    pub fn add_term(&mut self, alpha: Vec<u32>, coeff: CoeffFn) -> Result<()> {
        if alpha.len() != self.base_dim {
            return Err(Error::DimensionMismatch(format!(
                "multi-index length {} does not match base dimension {}",
                alpha.len(),
                self.base_dim
            )));
        }
        if multi_order(&alpha) > self.order {
            return Err(Error::InvalidParameter(format!(
                "|α| = {} exceeds declared order {}",
                multi_order(&alpha),
                self.order
            )));
        }
        self.terms.push((alpha, coeff));
        Ok(())
    }

    /// Add a term with a constant matrix coefficient.
    pub fn add_const_term(&mut self, alpha: Vec<u32>, matrix: CMatrix) -> Result<()> {
        self.add_term(alpha, Arc::new(move |_x: &[f64]| matrix.clone()))
    }

    /// Add a scalar (1x1) term with a closure coefficient.
    pub fn add_scalar_term(
        &mut self,
        alpha: Vec<u32>,
        f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Result<()> {
        self.add_term(
            alpha,
            Arc::new(move |x: &[f64]| CMatrix::from_element(1, 1, f(x))),
        )
    }

    /// Top-order polynomial evaluation `Σ_{|α|=k} a_α(x) ξ^α`.
    pub fn leading_symbol(&self, x: &[f64], xi: &[f64]) -> Result<CMatrix> {
        self.check_point(x)?;
        self.check_point(xi)?;
        let mut out = CMatrix::zeros(self.output_dim, self.input_dim);
        for (alpha, coeff) in &self.terms {
            if multi_order(alpha) != self.order {
                continue;
            }
            let factor = xi_power(xi, alpha);
            if factor != 0.0 {
                out += coeff(x) * Complex64::new(factor, 0.0);
            }
        }
        Ok(out)
    }

    /// Exact product-rule evaluation of `t^{-k} D(e^{itf} s)(x)` for the
    /// linear phase `f = <ξ, ·>` and constant sections `s`: since
    /// `D_j e^{itf} = t ξ_j e^{itf}`, each term contributes
    /// `t^{|α|-k} a_α(x) ξ^α` — a polynomial in `1/t`, no grid involved.
    pub fn rescaled_conjugated(&self, x: &[f64], xi: &[f64], t: f64) -> Result<CMatrix> {
        self.check_point(x)?;
        self.check_point(xi)?;
        let mut out = CMatrix::zeros(self.output_dim, self.input_dim);
        for (alpha, coeff) in &self.terms {
            let factor =
                xi_power(xi, alpha) * t.powi(multi_order(alpha) as i32 - self.order as i32);
            if factor != 0.0 {
                out += coeff(x) * Complex64::new(factor, 0.0);
            }
        }
        Ok(out)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.base_dim {
            return Err(Error::DimensionMismatch(format!(
                "point length {} does not match base dimension {}",
                x.len(),
                self.base_dim
            )));
        }
        Ok(())
    }
}

fn multi_order(alpha: &[u32]) -> usize {
    alpha.iter().map(|&a| a as usize).sum()
}

fn xi_power(xi: &[f64], alpha: &[u32]) -> f64 {
    xi.iter()
        .zip(alpha)
        .map(|(x, &a)| x.powi(a as i32))
        .product()
}

/// The Laplacian `-Σ ∂²_j = Σ D_j²` on `R^n`; leading symbol `|ξ|²`.
pub fn laplacian(n: usize) -> DiffOpCoefficients {
    let mut op = DiffOpCoefficients::new(2, n, 1, 1);
    for j in 0..n {
        let mut alpha = vec![0u32; n];
        alpha[j] = 2;
        op.add_const_term(alpha, CMatrix::from_element(1, 1, ONE))
            .expect("static");
    }
    op
}

/// The scalar operator `∂/∂x_j = i D_j` on `R^n`.
pub fn partial_derivative(n: usize, j: usize) -> DiffOpCoefficients {
    assert!(j < n);
    let mut op = DiffOpCoefficients::new(1, n, 1, 1);
    let mut alpha = vec![0u32; n];
    alpha[j] = 1;
    op.add_const_term(alpha, CMatrix::from_element(1, 1, I))
        .expect("static");
    op
}

/// `-i d/dt + p(t)` on the circle, with `p` a finite Fourier sum
/// `Σ p_m e^{imt}`.
pub fn circle_first_order(potential: Vec<(i64, Complex64)>) -> DiffOpCoefficients {
    let mut op = DiffOpCoefficients::new(1, 1, 1, 1);
    op.add_const_term(vec![1], CMatrix::from_element(1, 1, ONE))
        .expect("static");
    op.add_scalar_term(vec![0], move |x: &[f64]| {
        potential
            .iter()
            .map(|&(m, c)| c * Complex64::from_polar(1.0, m as f64 * x[0]))
            .sum()
    })
    .expect("static");
    op
}

/// The generalized Dirac operator `Σ c(e_j) ∂_j` of a Clifford action with a
/// flat connection; every coefficient is the constant `i·c_j`, so the leading
/// symbol is `i·c(ξ)`.
pub fn dirac_operator(action: &CliffordAction) -> DiffOpCoefficients {
    let n = action.vector_dim();
    let fiber = action.fiber_dim();
    let mut op = DiffOpCoefficients::new(1, n, fiber, fiber);
    for (j, c) in action.generators().iter().enumerate() {
        let mut alpha = vec![0u32; n];
        alpha[j] = 1;
        op.add_const_term(alpha, c * I).expect("static");
    }
    op
}

/// Build a scalar operator from parsed coefficient expressions, one per
/// multi-index.
pub fn from_scalar_exprs(
    order: usize,
    base_dim: usize,
    terms: &[(Vec<u32>, Expr)],
) -> Result<DiffOpCoefficients> {
    let mut op = DiffOpCoefficients::new(order, base_dim, 1, 1);
    for (alpha, e) in terms {
        if let Some(max) = e.max_coord() {
            if max >= base_dim {
                return Err(Error::InvalidParameter(format!(
                    "expression mentions coordinate x{} but the base dimension is {}",
                    max + 1,
                    base_dim
                )));
            }
        }
        let e = e.clone();
        op.add_scalar_term(alpha.clone(), move |x: &[f64]| e.eval(x))?;
    }
    Ok(op)
}

/// Multiply every coefficient by a fixed scalar (the ellipticity verdict must
/// not change under this).
pub fn scale_coefficients(op: &DiffOpCoefficients, scalar: Complex64) -> DiffOpCoefficients {
    let mut out = DiffOpCoefficients::new(op.order, op.base_dim, op.input_dim, op.output_dim);
    for (alpha, coeff) in &op.terms {
        let coeff = coeff.clone();
        out.terms.push((
            alpha.clone(),
            Arc::new(move |x: &[f64]| coeff(x) * scalar) as CoeffFn,
        ));
    }
    out
}

/// Result of [`symbol_limit_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitCheckReport {
    /// `(t, ‖t^{-k} D(e^{itf}s) - σ_L‖)` per requested `t`.
    pub deviations: Vec<(f64, f64)>,
    pub max_deviation: f64,
}

/// Compare the rescaled conjugated operator against the leading symbol at the
/// given `t` values. The deviation is `O(1/t)` whenever lower-order terms are
/// present and exactly zero otherwise.
pub fn symbol_limit_check(
    op: &DiffOpCoefficients,
    x: &[f64],
    xi: &[f64],
    t_values: &[f64],
) -> Result<LimitCheckReport> {
    let lead = op.leading_symbol(x, xi)?;
    let mut deviations = Vec::with_capacity(t_values.len());
    let mut max_deviation: f64 = 0.0;
    for &t in t_values {
        let dev = linalg::op_norm(&(op.rescaled_conjugated(x, xi, t)? - &lead));
        max_deviation = max_deviation.max(dev);
        deviations.push((t, dev));
    }
    Ok(LimitCheckReport {
        deviations,
        max_deviation,
    })
}

/// Verdict of an ellipticity sampling pass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EllipticityReport {
    pub elliptic: bool,
    pub min_singular_value: f64,
    pub threshold: f64,
    /// `(x, ξ)` attaining the minimum.
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
    pub samples_checked: usize,
}

/// Decide ellipticity by sampling `σ_min(σ_L(x, ξ))` over the given base
/// points and `sphere_samples` unit covectors.
pub fn ellipticity_check(
    op: &DiffOpCoefficients,
    points: &[Vec<f64>],
    sphere_samples: usize,
) -> Result<EllipticityReport> {
    if op.input_dim != op.output_dim {
        return Err(Error::DimensionMismatch(
            "ellipticity needs equal input and output fiber dimensions".into(),
        ));
    }
    let dirs = unit_directions(op.base_dim, sphere_samples);
    let mut min_sv = f64::INFINITY;
    let mut witness = None;
    let mut samples = 0;
    for x in points {
        for xi in &dirs {
            let s = op.leading_symbol(x, xi)?;
            let sv = smallest_singular_value(&s);
            samples += 1;
            if sv < min_sv {
                min_sv = sv;
                witness = Some((x.clone(), xi.clone()));
            }
        }
    }
    Ok(EllipticityReport {
        elliptic: min_sv > ELLIPTICITY_THRESHOLD,
        min_singular_value: min_sv,
        threshold: ELLIPTICITY_THRESHOLD,
        witness,
        samples_checked: samples,
    })
}

/// Tangent directions spanning the group orbit at each base point (possibly
/// empty at fixed points). Supplied analytically by the model builders.
#[derive(Clone)]
pub struct OrbitDirections {
    base_dim: usize,
    sampler: OrbitSampler,
}

impl OrbitDirections {
    pub fn new(
        base_dim: usize,
        sampler: impl Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        OrbitDirections {
            base_dim,
            sampler: Arc::new(sampler),
        }
    }

    /// Rotation action of the circle on the plane: orbit direction `(-y, x)`
    /// away from the origin, none at the fixed point.
    pub fn plane_rotation() -> Self {
        OrbitDirections::new(2, |x: &[f64]| {
            if x[0] * x[0] + x[1] * x[1] < 1e-24 {
                vec![]
            } else {
                vec![vec![-x[1], x[0]]]
            }
        })
    }

    /// Circle acting by translation on the second coordinate of the 2-torus.
    pub fn torus_translation_y() -> Self {
        OrbitDirections::new(2, |_x: &[f64]| vec![vec![0.0, 1.0]])
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn at(&self, x: &[f64]) -> Vec<Vec<f64>> {
        (self.sampler)(x)
    }
}

/// Verdict of a transversal ellipticity sampling pass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransversalReport {
    pub transversally_elliptic: bool,
    pub min_singular_value: f64,
    pub threshold: f64,
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
    /// Points whose transversal fiber was zero-dimensional (vacuous there).
    pub empty_fiber_points: usize,
    pub samples_checked: usize,
}

/// Same sampling as [`ellipticity_check`], but with `ξ` restricted to the
/// annihilator of the orbit directions at each point — the fiber of the
/// transversal cotangent bundle. At points where the orbit dimension jumps,
/// sampling may misclassify; the report carries the raw minimum for
/// inspection.
pub fn transversal_ellipticity_check(
    op: &DiffOpCoefficients,
    orbits: &OrbitDirections,
    points: &[Vec<f64>],
    sphere_samples: usize,
) -> Result<TransversalReport> {
    if op.input_dim != op.output_dim {
        return Err(Error::DimensionMismatch(
            "transversal ellipticity needs equal fiber dimensions".into(),
        ));
    }
    if orbits.base_dim != op.base_dim {
        return Err(Error::DimensionMismatch(
            "orbit directions have the wrong base dim".into(),
        ));
    }
    let mut min_sv = f64::INFINITY;
    let mut witness = None;
    let mut empty = 0;
    let mut samples = 0;
    for x in points {
        let basis = annihilator_basis(&orbits.at(x), op.base_dim);
        if basis.is_empty() {
            empty += 1;
            continue;
        }
        for xi in subspace_directions(&basis, sphere_samples) {
            let s = op.leading_symbol(x, &xi)?;
            let sv = smallest_singular_value(&s);
            samples += 1;
            if sv < min_sv {
                min_sv = sv;
                witness = Some((x.clone(), xi));
            }
        }
    }
    Ok(TransversalReport {
        transversally_elliptic: min_sv > ELLIPTICITY_THRESHOLD && samples > 0,
        min_singular_value: min_sv,
        threshold: ELLIPTICITY_THRESHOLD,
        witness,
        empty_fiber_points: empty,
        samples_checked: samples,
    })
}

/// A taming structure for the rotation action of the circle on the plane:
/// a Lie-algebra-valued map (a real scalar for `S¹`) together with the vector
/// field it induces, `v(x) = moment(x)·(-x₂, x₁)`.
#[derive(Clone)]
pub struct TamingField {
    group: GroupDesc,
    base_dim: usize,
    moment: MomentSampler,
    /// Radius beyond which `‖v‖ > 0` is guaranteed (the vanishing set of `v`
    /// is contained in this closed ball).
    nonvanishing_radius: f64,
}

impl TamingField {
    pub fn plane_rotation(
        moment: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        nonvanishing_radius: f64,
    ) -> Self {
        TamingField {
            group: GroupDesc::Circle,
            base_dim: 2,
            moment: Arc::new(moment),
            nonvanishing_radius,
        }
    }

    /// The generating field of the rotation action (`moment ≡ 1`): `v(z) = iz`,
    /// vanishing only at the origin.
    pub fn generating_plane_rotation() -> Self {
        TamingField::plane_rotation(|_x| 1.0, 0.0)
    }

    pub fn group(&self) -> GroupDesc {
        self.group
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn nonvanishing_radius(&self) -> f64 {
        self.nonvanishing_radius
    }

    pub fn moment(&self, x: &[f64]) -> f64 {
        (self.moment)(x)
    }

    /// The induced vector field at `x`.
    pub fn field(&self, x: &[f64]) -> Vec<f64> {
        let m = (self.moment)(x);
        vec![-m * x[1], m * x[0]]
    }

    /// Spot-check equivariance `v(g·x) = g·v(x)` over sampled points and
    /// rotation angles; exact for rotation-invariant moments.
    pub fn equivariance_deviation(&self, points: &[Vec<f64>], angles: &[f64]) -> f64 {
        let mut dev: f64 = 0.0;
        for x in points {
            for &a in angles {
                let (c, s) = (a.cos(), a.sin());
                let gx = vec![c * x[0] - s * x[1], s * x[0] + c * x[1]];
                let v_gx = self.field(&gx);
                let v_x = self.field(x);
                let g_vx = [c * v_x[0] - s * v_x[1], s * v_x[0] + c * v_x[1]];
                dev = dev.max((v_gx[0] - g_vx[0]).abs().max((v_gx[1] - g_vx[1]).abs()));
            }
        }
        dev
    }
}

/// Verdict of the deformed-symbol invertibility check for `c(ξ + v(x))`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeformedSymbolReport {
    /// True iff `c(ξ+v(x)): E⁺ → E⁻` was invertible at every sampled point of
    /// the transversal cotangent bundle with `(ξ, v(x)) ≠ (0, 0)`.
    pub invertible_away_from_locus: bool,
    pub min_singular_value_away: f64,
    pub threshold: f64,
    /// Sampled base points with `v(x) = 0`, where the zero covector is a
    /// genuine degeneracy (the non-invertible compact locus).
    pub degenerate_points: Vec<Vec<f64>>,
    /// Largest `‖x‖` over the degenerate points: finite and small means the
    /// locus is contained in a compact ball.
    pub locus_radius: f64,
    pub samples_checked: usize,
}

/// Check invertibility of `c(ξ + v(x)): E⁺ → E⁻` over sampled `(x, ξ)` in the
/// transversal cotangent bundle, reporting the points with `v(x) = 0, ξ = 0`
/// as the non-invertible locus.
pub fn deformed_symbol_check(
    action: &CliffordAction,
    field: &TamingField,
    orbits: &OrbitDirections,
    points: &[Vec<f64>],
    sphere_samples: usize,
) -> Result<DeformedSymbolReport> {
    if action.grading().is_none() {
        return Err(Error::InvalidParameter(
            "deformed symbol check needs a graded action".into(),
        ));
    }
    if action.vector_dim() != field.base_dim() || orbits.base_dim() != field.base_dim() {
        return Err(Error::DimensionMismatch(
            "action, field and orbits must share a base".into(),
        ));
    }
    let mut min_away = f64::INFINITY;
    let mut degenerate = Vec::new();
    let mut locus_radius: f64 = 0.0;
    let mut samples = 0;
    for x in points {
        let v = field.field(x);
        let v_norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let basis = annihilator_basis(&orbits.at(x), field.base_dim());
        let mut xis: Vec<Vec<f64>> = vec![vec![0.0; field.base_dim()]];
        xis.extend(subspace_directions(&basis, sphere_samples));
        for xi in xis {
            let xi_norm = xi.iter().map(|a| a * a).sum::<f64>().sqrt();
            let w: Vec<f64> = xi.iter().zip(&v).map(|(a, b)| a + b).collect();
            let block = action.plus_to_minus_block(&action.act(&w)?)?;
            let sv = smallest_singular_value(&block);
            if v_norm < 1e-12 && xi_norm < 1e-12 {
                // the zero section over the vanishing set of v
                degenerate.push(x.clone());
                locus_radius = locus_radius.max(x.iter().map(|a| a * a).sum::<f64>().sqrt());
            } else {
                samples += 1;
                min_away = min_away.min(sv);
            }
        }
    }
    Ok(DeformedSymbolReport {
        invertible_away_from_locus: min_away > ELLIPTICITY_THRESHOLD,
        min_singular_value_away: min_away,
        threshold: ELLIPTICITY_THRESHOLD,
        degenerate_points: degenerate,
        locus_radius,
        samples_checked: samples,
    })
}

fn smallest_singular_value(m: &CMatrix) -> f64 {
    let sv = linalg::singular_values(m);
    sv.last().copied().unwrap_or(0.0)
}

/// Deterministic unit covectors on the sphere of `R^dim`.
pub fn unit_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => vec![],
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count.max(4))
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / count.max(4) as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..count.max(8))
                .map(|_| loop {
                    let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let n = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
                    if n > 1e-3 {
                        return raw.into_iter().map(|a| a / n).collect();
                    }
                })
                .collect()
        }
    }
}

/// Unit covectors inside the span of an orthonormal `basis`.
pub fn subspace_directions(basis: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    if basis.is_empty() {
        return vec![];
    }
    let ambient = basis[0].len();
    unit_directions(basis.len(), count)
        .into_iter()
        .map(|coef| {
            let mut v = vec![0.0; ambient];
            for (c, b) in coef.iter().zip(basis) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += c * bi;
                }
            }
            v
        })
        .collect()
}

/// Orthonormal basis of the annihilator of the span of `dirs` inside `R^dim`
/// (the whole space when `dirs` is empty).
pub fn annihilator_basis(dirs: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    if dirs.is_empty() {
        return (0..dim)
            .map(|j| {
                let mut e = vec![0.0; dim];
                e[j] = 1.0;
                e
            })
            .collect();
    }
    // Pad to a square matrix: nalgebra's SVD is thin, and the full V is
    // needed to read off the null space.
    let m = CMatrix::from_fn(dim, dim, |i, j| {
        Complex64::new(dirs.get(i).map_or(0.0, |d| d[j]), 0.0)
    });
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10).count();
    // right singular vectors beyond the rank span the null space
    (rank..v_t.nrows())
        .map(|r| (0..dim).map(|j| v_t[(r, j)].re).collect())
        .collect()
}
