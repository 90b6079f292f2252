//! Tolerances and memory budgets shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on dense amplitude arrays (2^26 complex numbers).
pub const DEFAULT_MAX_AMPLITUDES: u128 = 1 << 26;

/// Numeric tolerances used by checks and postconditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Unit-modulus and per-coordinate normalization checks.
    pub exact: f64,
    /// Parseval and Fourier round trips on dense arrays.
    pub parseval: f64,
    /// Character-sum orthogonality, relative to the sum length.
    pub orthogonality: f64,
    /// Norm preservation inside the simulator.
    pub unitarity: f64,
    /// Theorem-bound slack and acceptance-vs-P_Dec agreement.
    pub bound: f64,
    /// Fourth-power sum vs its closed-form lower bound.
    pub fourth_power: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: 1e-12,
            parseval: 1e-10,
            orthogonality: 1e-9,
            unitarity: 1e-9,
            bound: 1e-9,
            fourth_power: 1e-10,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 6] = ["exact", "parseval", "orthogonality", "unitarity", "bound", "fourth_power"];

    /// Override one tolerance by name. Returns an error for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "exact" => &mut self.exact,
            "parseval" => &mut self.parseval,
            "orthogonality" => &mut self.orthogonality,
            "unitarity" => &mut self.unitarity,
            "bound" => &mut self.bound,
            "fourth_power" => &mut self.fourth_power,
            other => return Err(Error::InvalidParameter(format!("unknown tolerance '{other}'"))),
        };
        *slot = value;
        Ok(())
    }
}

/// Upper limit on the size of any dense amplitude array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_amplitudes: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_amplitudes: DEFAULT_MAX_AMPLITUDES }
    }
}

impl Budget {
    pub fn new(max_amplitudes: u128) -> Self {
        Self { max_amplitudes }
    }

    /// Checks that `q^dims` amplitudes fit, returning the count as `usize`.
    pub fn check(&self, q: u32, dims: usize) -> Result<usize> {
        let required = (q as u128).checked_pow(dims as u32).unwrap_or(u128::MAX);
        if required > self.max_amplitudes || required > usize::MAX as u128 {
            return Err(Error::BudgetExceeded { required, allowed: self.max_amplitudes });
        }
        Ok(required as usize)
    }
}
