//! TOML run configuration.
//!
//! ```toml
//! schema_version = 1
//!
//! [model]
//! kind = "shift"          # see ModelConfig for the full list
//! n = 20
//!
//! [policy]                # optional, defaults shown
//! absolute_floor = 1e-10
//! relative_factor = 1e-6
//! min_gap_ratio = 10.0
//!
//! [run]                   # optional
//! seed = 0
//! format = "text"         # or "machine"
//! window = [-8, 8]        # weight window for plane/windowed models
//! resolutions = [100, 200, 400]
//! ```

use num_complex::Complex64;
use serde::Deserialize;

use eqindex_core::error::{Error, Result};
use eqindex_core::index::RankPolicy;
use eqindex_core::models::{
    build_circle_model, build_derham_circle_model, build_plane_weight_model, build_product_model,
    build_shift_model, build_shift_model_z2, build_toeplitz_model, GluedParams,
    IsotypicBlockOperator, PlaneParams, Rescaling, Warp,
};
use eqindex_core::symbols::{expr, from_scalar_exprs, DiffOpCoefficients};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub schema_version: Option<u32>,
    pub model: ModelConfig,
    #[serde(default)]
    pub policy: PolicyConfig,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Shift {
        n: usize,
    },
    ShiftZ2 {
        n: usize,
    },
    Toeplitz {
        coefficients: Vec<(i64, f64, f64)>,
        n: usize,
    },
    CircleFirstOrder {
        potential: Vec<(i64, f64, f64)>,
        cutoff: usize,
    },
    DerhamCircle {
        cutoff: usize,
        #[serde(default)]
        deformed: bool,
    },
    Product {
        cutoff: usize,
        base: Box<ModelConfig>,
    },
    PlaneWeight {
        n_r: usize,
        radius: f64,
        rescaling: Rescaling,
        #[serde(default)]
        weight: Option<i64>,
    },
    PlaneGlued {
        n_r: usize,
        radius: f64,
        rescaling: Rescaling,
        warp: Warp,
        split_radius: f64,
    },
    /// A user-defined scalar operator given by coefficient expressions; `run`
    /// reports its symbol/ellipticity certificate instead of an index.
    CustomOperator {
        order: usize,
        base_dim: usize,
        coefficients: Vec<CustomTerm>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomTerm {
    pub alpha: Vec<u32>,
    pub expr: String,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub absolute_floor: Option<f64>,
    pub relative_factor: Option<f64>,
    pub min_gap_ratio: Option<f64>,
}

impl PolicyConfig {
    pub fn to_policy(self) -> RankPolicy {
        let d = RankPolicy::default();
        RankPolicy {
            absolute_floor: self.absolute_floor.unwrap_or(d.absolute_floor),
            relative_factor: self.relative_factor.unwrap_or(d.relative_factor),
            min_gap_ratio: self.min_gap_ratio.unwrap_or(d.min_gap_ratio),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub window: Option<(i64, i64)>,
    pub resolutions: Option<Vec<usize>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ConfigFile =
            toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        if let Some(v) = cfg.schema_version {
            if v != 1 {
                return Err(Error::InvalidParameter(format!(
                    "unsupported config schema version {v} (this build understands 1)"
                )));
            }
        }
        Ok(cfg)
    }
}

fn complex_list(raw: &[(i64, f64, f64)]) -> Vec<(i64, Complex64)> {
    raw.iter()
        .map(|&(k, re, im)| (k, Complex64::new(re, im)))
        .collect()
}

/// What a model config builds: a matrix model, the plane-window assembly
/// inputs, the glued pair inputs, or a bare operator for symbol checks.
pub enum BuiltModel {
    Operator(IsotypicBlockOperator),
    PlaneWindow(PlaneParams),
    Glued(GluedParams),
    Symbol(DiffOpCoefficients),
}

impl ModelConfig {
    pub fn build(&self) -> Result<BuiltModel> {
        Ok(match self {
            ModelConfig::Shift { n } => BuiltModel::Operator(build_shift_model(*n)?),
            ModelConfig::ShiftZ2 { n } => BuiltModel::Operator(build_shift_model_z2(*n)?),
            ModelConfig::Toeplitz { coefficients, n } => {
                BuiltModel::Operator(build_toeplitz_model(&complex_list(coefficients), *n)?)
            }
            ModelConfig::CircleFirstOrder { potential, cutoff } => {
                BuiltModel::Operator(build_circle_model(&complex_list(potential), *cutoff)?)
            }
            ModelConfig::DerhamCircle { cutoff, deformed } => {
                BuiltModel::Operator(build_derham_circle_model(*cutoff, *deformed)?)
            }
            ModelConfig::Product { cutoff, base } => {
                let BuiltModel::Operator(base) = base.build()? else {
                    return Err(Error::InvalidParameter(
                        "product base must be a finite matrix model".into(),
                    ));
                };
                BuiltModel::Operator(build_product_model(&base, *cutoff)?)
            }
            ModelConfig::PlaneWeight {
                n_r,
                radius,
                rescaling,
                weight,
            } => {
                let params = PlaneParams::new(*n_r, *radius, *rescaling);
                match weight {
                    Some(w) => BuiltModel::Operator(build_plane_weight_model(*w, &params)?),
                    None => BuiltModel::PlaneWindow(params),
                }
            }
            ModelConfig::PlaneGlued {
                n_r,
                radius,
                rescaling,
                warp,
                split_radius,
            } => BuiltModel::Glued(GluedParams {
                split_radius: *split_radius,
                n_r: *n_r,
                radius: *radius,
                rescaling: *rescaling,
                warp: *warp,
            }),
            ModelConfig::CustomOperator {
                order,
                base_dim,
                coefficients,
            } => {
                let mut terms = Vec::with_capacity(coefficients.len());
                for t in coefficients {
                    terms.push((t.alpha.clone(), expr::parse(&t.expr)?));
                }
                BuiltModel::Symbol(from_scalar_exprs(*order, *base_dim, &terms)?)
            }
        })
    }
}

/// Built-in presets selectable with `--model`.
pub fn preset(name: &str) -> Result<ModelConfig> {
    Ok(match name {
        "shift" => ModelConfig::Shift { n: 20 },
        "shift_z2" => ModelConfig::ShiftZ2 { n: 20 },
        "toeplitz_z" => ModelConfig::Toeplitz {
            coefficients: vec![(1, 1.0, 0.0)],
            n: 64,
        },
        "toeplitz_zbar2" => ModelConfig::Toeplitz {
            coefficients: vec![(-2, 1.0, 0.0)],
            n: 64,
        },
        "circle_sin" => ModelConfig::CircleFirstOrder {
            potential: vec![(1, 0.0, -0.5), (-1, 0.0, 0.5)],
            cutoff: 32,
        },
        "derham" => ModelConfig::DerhamCircle {
            cutoff: 16,
            deformed: false,
        },
        "derham_deformed" => ModelConfig::DerhamCircle {
            cutoff: 16,
            deformed: true,
        },
        "product" => ModelConfig::Product {
            cutoff: 4,
            base: Box::new(ModelConfig::Shift { n: 20 }),
        },
        "plane" => ModelConfig::PlaneWeight {
            n_r: 400,
            radius: 8.0,
            rescaling: Rescaling::One,
            weight: None,
        },
        "plane_glued" => ModelConfig::PlaneGlued {
            n_r: 400,
            radius: 8.0,
            rescaling: Rescaling::One,
            warp: Warp::InverseLinear,
            split_radius: 3.0,
        },
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown model preset '{other}' (try shift, shift_z2, toeplitz_z, toeplitz_zbar2, \
                 circle_sin, derham, derham_deformed, product, plane, plane_glued)"
            )))
        }
    })
}
