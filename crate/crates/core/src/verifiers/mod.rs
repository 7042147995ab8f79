//! Executable versions of the comparison theorems and the lemmas behind them.
//!
//! Every check evaluates a hypothesis on a deterministic grid of directions
//! (or a seeded Grassmann sample), evaluates both sides of the conclusion and
//! returns a [`CheckReport`]. A report passes when the conclusion slack and the
//! hypothesis margin are both above minus their accumulated quadrature noise.
//! Checks whose constants are not specified by the statement are reported as
//! diagnostics and never pass or fail.

mod battery;
mod hypothesis;
mod lemmas;
mod sweep;
mod theorems;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::functionals::{EvalConfig, FunctionalValue};

pub use battery::{battery, random_symmetric_body, BatteryReport, Suite};
pub use hypothesis::{enforce_epsilon, enforce_hypothesis, evaluate_hypothesis, FunctionalPair, GridEvaluation, Hypothesis};
pub use lemmas::{lemma_bank, LEMMA_IDS};
pub use sweep::{sharpness_sweep, SweepConfig, SweepTable};
pub use theorems::{
    verify_cor13, verify_gk, verify_prop29, verify_prop31, verify_prop53, verify_thm12, verify_thm14, verify_thm51,
    verify_thm61, Variant,
};

/// Relative rounding floor added to every noise tolerance, so that exact
/// equality cases evaluated along different code paths are not reported as
/// failures because of the last few bits.
pub const ROUNDING_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Diagnostic,
}

/// A functional value with the role it plays in a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    #[serde(flatten)]
    pub value: FunctionalValue,
}

/// Outcome of one check.
///
/// `slack = rhs − lhs` for inequalities `lhs ≤ rhs`. Identities are reported
/// with `slack = −|rhs − lhs|`, so they pass exactly when both sides agree
/// within the noise. `hypothesis_margin` is the smallest `rhs − lhs` of the
/// hypothesis over the grid (0 with `grid_size = 0` for checks without one),
/// compared against its own `hypothesis_noise` since its units differ from
/// those of the conclusion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub hypothesis_margin: f64,
    pub hypothesis_noise: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub noise_tolerance: f64,
    pub verdict: Verdict,
    pub grid_size: usize,
    pub seed: u64,
    pub level: u8,
    /// Which case of a multi-case statement was evaluated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    /// Derived quantities (ratios, enforced scales, realized constants).
    #[serde(default)]
    pub details: BTreeMap<String, f64>,
    /// The functional values entering the conclusion.
    #[serde(default)]
    pub values: Vec<NamedValue>,
    /// Input digests of every functional value used, hypothesis grids
    /// collapsed to one digest per side.
    pub provenance: Vec<String>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub sub_reports: Vec<CheckReport>,
}

impl CheckReport {
    pub(crate) fn new(check_id: &str, cfg: &CheckConfig) -> Self {
        Self {
            check_id: check_id.to_string(),
            hypothesis_margin: 0.0,
            hypothesis_noise: 0.0,
            lhs: 0.0,
            rhs: 0.0,
            slack: 0.0,
            noise_tolerance: 0.0,
            verdict: Verdict::Diagnostic,
            grid_size: 0,
            seed: cfg.seed,
            level: cfg.level,
            branch: None,
            details: BTreeMap::new(),
            values: Vec::new(),
            provenance: Vec::new(),
            notes: Vec::new(),
            sub_reports: Vec::new(),
        }
    }

    pub(crate) fn with_hypothesis(mut self, grid: &GridEvaluation) -> Self {
        self.hypothesis_margin = grid.margin();
        self.hypothesis_noise = grid.noise();
        self.grid_size = grid.len();
        self.provenance.extend(grid.digests());
        self
    }

    pub(crate) fn value(&mut self, name: &str, v: &FunctionalValue) {
        self.provenance.push(v.inputs_digest.clone());
        self.values.push(NamedValue {
            name: name.to_string(),
            value: v.clone(),
        });
    }

    pub(crate) fn detail(&mut self, key: &str, v: f64) {
        self.details.insert(key.to_string(), v);
    }

    /// Sets an inequality `lhs ≤ rhs` and decides the verdict.
    pub(crate) fn inequality(mut self, lhs: f64, rhs: f64, noise: f64) -> Self {
        self.lhs = lhs;
        self.rhs = rhs;
        self.slack = rhs - lhs;
        self.noise_tolerance = noise.abs() + ROUNDING_FLOOR * lhs.abs().max(rhs.abs());
        self.decide();
        self
    }

    /// Sets an identity `lhs = rhs` and decides the verdict.
    pub(crate) fn identity(mut self, lhs: f64, rhs: f64, noise: f64) -> Self {
        self = self.inequality(lhs, rhs, noise);
        self.slack = -(rhs - lhs).abs();
        self.decide();
        self
    }

    /// Sets both sides but reports them as a diagnostic only.
    pub(crate) fn diagnostic(mut self, lhs: f64, rhs: f64, noise: f64) -> Self {
        self = self.inequality(lhs, rhs, noise);
        self.verdict = Verdict::Diagnostic;
        self
    }

    fn decide(&mut self) {
        let ok = self.slack >= -self.noise_tolerance && self.hypothesis_margin >= -self.hypothesis_noise;
        self.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    }

    /// True when this report and all of its sub-reports are not failures.
    pub fn all_pass(&self) -> bool {
        self.verdict != Verdict::Fail && self.sub_reports.iter().all(CheckReport::all_pass)
    }

    /// This report followed by its sub-reports, depth first.
    pub fn flatten(&self) -> Vec<&CheckReport> {
        let mut out = vec![self];
        for s in &self.sub_reports {
            out.extend(s.flatten());
        }
        out
    }

    /// `slack / max(|lhs|, |rhs|)`, the scale-free form of the slack.
    pub fn relative_slack(&self) -> f64 {
        let s = self.lhs.abs().max(self.rhs.abs());
        if s == 0.0 {
            0.0
        } else {
            self.slack / s
        }
    }
}

/// Resolution, seeding and the enforcement switch shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Quadrature level of every functional.
    pub level: u8,
    /// Level of the hypothesis direction grid.
    pub grid_level: u8,
    pub seed: u64,
    /// Replace `L` by `sL` with `s` from [`enforce_hypothesis`] before checking.
    pub enforce: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            level: 3,
            grid_level: 3,
            seed: 0,
            enforce: false,
        }
    }
}

impl CheckConfig {
    pub fn with_level(level: u8) -> Self {
        Self {
            level,
            grid_level: level,
            ..Self::default()
        }
    }

    pub fn enforced(self) -> Self {
        Self { enforce: true, ..self }
    }

    pub fn seeded(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn eval(&self) -> EvalConfig {
        EvalConfig {
            level: self.level,
            seed: self.seed,
            closed_forms: true,
        }
    }
}

pub(crate) fn digest_of<'a>(parts: impl IntoIterator<Item = &'a str>) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}
