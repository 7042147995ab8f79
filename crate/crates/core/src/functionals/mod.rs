//! Measures of bodies, sections and projections, μ-projections, mixed
//! μ-measures and the classical functionals built from them.
//!
//! Every operation returns a [`FunctionalValue`]. Quadrature results carry the
//! difference between the requested level and the next coarser one as their
//! error estimate; closed forms carry zero.

pub(crate) mod cover;
mod misc;
mod mixed;
mod projections;
mod volumes;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use misc::{isotropic_constant, mean_width, parallel_section_profile, IsotropicConvention, ProfilePoint};
pub use mixed::{cauchy_formula_gap, mixed_measure, surface_area, MixedMethod, MixedWith};
pub use projections::{kdim_projection_volume, mu_projection, projection_area};
pub use volumes::{body_measure, body_measure_homogeneous, kdim_section_volume, section_measure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    PolarQuadrature,
    BoundaryIntegral,
    FiniteDifference,
    FacetSum,
    MonteCarloHull,
    CovarianceMc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub value: f64,
    pub error_estimate: f64,
    pub method: Method,
    pub inputs_digest: String,
}

impl FunctionalValue {
    pub(crate) fn new(value: f64, error_estimate: f64, method: Method, inputs_digest: String) -> Self {
        let error_estimate = if method == Method::Analytic {
            0.0
        } else {
            error_estimate.abs()
        };
        Self {
            value,
            error_estimate,
            method,
            inputs_digest,
        }
    }

    /// Error relative to `|value|` (infinite for a zero value with nonzero error).
    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.error_estimate == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.error_estimate / self.value.abs()
        }
    }
}

/// Resolution and seeding shared by all functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Quadrature level `0..=5`; 3 is the default working level.
    pub level: u8,
    /// Seed for stochastic rules (sphere dimension > 5) and Monte Carlo.
    pub seed: u64,
    /// Use closed forms where available. Turning this off forces the generic
    /// quadrature paths, which is how the closed forms are cross-checked.
    pub closed_forms: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            level: 3,
            seed: 0,
            closed_forms: true,
        }
    }
}

impl EvalConfig {
    pub fn with_level(level: u8) -> Self {
        Self {
            level,
            ..Self::default()
        }
    }

    /// The level used for error estimation: one below, or one above at level 0.
    pub(crate) fn companion(&self) -> u8 {
        if self.level == 0 {
            1
        } else {
            self.level - 1
        }
    }
}

/// SHA-256 of the canonical JSON of an operation and its inputs.
pub(crate) fn digest(op: &str, inputs: Value, cfg: &EvalConfig) -> String {
    let record = json!({ "op": op, "inputs": inputs, "level": cfg.level, "seed": cfg.seed });
    let bytes = serde_json::to_vec(&record).expect("JSON values serialize");
    hex::encode(Sha256::digest(bytes))
}

/// Runs `eval` at the configured level and its companion; the value comes
/// from the configured level, the error is the difference.
pub(crate) fn refine<F>(cfg: &EvalConfig, eval: F) -> crate::Result<(f64, f64)>
where
    F: Fn(u8) -> crate::Result<f64>,
{
    let fine = eval(cfg.level)?;
    let other = eval(cfg.companion())?;
    let round = 1e-13 * fine.abs();
    Ok((fine, (fine - other).abs() + round))
}
