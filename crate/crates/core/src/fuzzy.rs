//! Fuzzy logical connectives over membership degrees in `[0, 1]`.
//!
//! Conjunction is a t-norm θ, disjunction the dual t-conorm κ, and negation
//! the strong negation ν(x) = 1 − x. Three t-norm families are supported;
//! [`TNormFamily::Product`] is the default used by model training. The
//! t-conorm is *defined* as κ(x, y) = ν(θ(ν(x), ν(y))), so De Morgan's law
//! holds exactly (same floating-point path, not merely up to rounding).

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Tolerance for accepting slightly out-of-range degrees before clamping.
pub const DEGREE_TOLERANCE: f64 = 1e-9;

/// Errors produced by the checked connective entry points.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    /// Input was further than [`DEGREE_TOLERANCE`] outside the unit interval.
    #[error("membership degree {0} lies outside [0, 1]")]
    OutOfRange(f64),
}

/// The supported t-norm families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TNormFamily {
    /// Goedel (minimum) t-norm: θ(x, y) = min(x, y).
    Goedel,
    /// Product t-norm: θ(x, y) = x · y. The default.
    #[default]
    Product,
    /// Lukasiewicz t-norm: θ(x, y) = max(x + y − 1, 0).
    Lukasiewicz,
}

impl TNormFamily {
    /// All families, in a fixed order (useful for exhaustive law checks).
    pub const ALL: [TNormFamily; 3] = [
        TNormFamily::Goedel,
        TNormFamily::Product,
        TNormFamily::Lukasiewicz,
    ];

    /// Whether θ(x, y) = 0 implies x = 0 or y = 0.
    ///
    /// Crisp-faithfulness of zero-loss models requires a strict family:
    /// Goedel and Product qualify, Lukasiewicz does not (θ(0.3, 0.4) = 0).
    pub fn is_strict(self) -> bool {
        !matches!(self, TNormFamily::Lukasiewicz)
    }

    /// Unchecked conjunction on degrees already known to be in `[0, 1]`.
    pub(crate) fn conj(self, x: f64, y: f64) -> f64 {
        match self {
            TNormFamily::Goedel => x.min(y),
            TNormFamily::Product => x * y,
            // Evaluated as x − (1 − y) so the identity θ(x, 1) = x is exact
            // in floating point (1 − 1 vanishes before touching x).
            TNormFamily::Lukasiewicz => (x - (1.0 - y)).max(0.0),
        }
    }

    /// Unchecked disjunction; literally ν(θ(ν(x), ν(y))).
    pub(crate) fn disj(self, x: f64, y: f64) -> f64 {
        1.0 - self.conj(1.0 - x, 1.0 - y)
    }
}

impl fmt::Display for TNormFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            TNormFamily::Goedel => "goedel",
            TNormFamily::Product => "product",
            TNormFamily::Lukasiewicz => "lukasiewicz",
        };
        f.write_str(name)
    }
}

impl FromStr for TNormFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "goedel" | "godel" | "min" => Ok(TNormFamily::Goedel),
            "product" | "prod" => Ok(TNormFamily::Product),
            "lukasiewicz" | "luk" => Ok(TNormFamily::Lukasiewicz),
            other => Err(format!(
                "unknown t-norm family `{other}` (expected goedel, product, or lukasiewicz)"
            )),
        }
    }
}

/// Validates a degree against the unit interval and clamps away rounding dust.
fn check_unit(x: f64) -> Result<f64, FuzzyError> {
    if !x.is_finite() || x < -DEGREE_TOLERANCE || x > 1.0 + DEGREE_TOLERANCE {
        return Err(FuzzyError::OutOfRange(x));
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Fuzzy conjunction θ(x, y) for the given family.
///
/// Inputs within [`DEGREE_TOLERANCE`] of `[0, 1]` are clamped; anything
/// further out is a domain error rather than a silent repair.
pub fn t_norm(family: TNormFamily, x: f64, y: f64) -> Result<f64, FuzzyError> {
    Ok(family.conj(check_unit(x)?, check_unit(y)?))
}

/// Fuzzy disjunction κ(x, y) = ν(θ(ν(x), ν(y))) for the given family.
pub fn t_conorm(family: TNormFamily, x: f64, y: f64) -> Result<f64, FuzzyError> {
    Ok(family.disj(check_unit(x)?, check_unit(y)?))
}

/// Strong negation ν(x) = 1 − x.
pub fn negation(x: f64) -> Result<f64, FuzzyError> {
    Ok(1.0 - check_unit(x)?)
}
