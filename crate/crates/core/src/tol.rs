//! Numerical thresholds shared by every module.

use serde::{Deserialize, Serialize};

/// Central tolerance record.
///
/// `rank` is relative to the largest singular value (or to an explicit
/// reference scale), `null` is relative to the Euclidean norm² of the vector
/// or plane being classified, `cluster` is the eigenvalue grouping radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rank: f64,
    pub null: f64,
    pub cluster: f64,
    /// Relative residual allowed when validating `AᵀG = GA`.
    pub self_adjoint: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-8,
            null: 1e-10,
            cluster: 1e-6,
            self_adjoint: 1e-10,
        }
    }
}

impl Tolerances {
    /// Looser thresholds for tensors obtained by finite differences. Planes
    /// within `1e-3` of degenerate count as degenerate.
    pub fn finite_difference() -> Self {
        Self {
            rank: 1e-5,
            null: 1e-3,
            cluster: 1e-4,
            self_adjoint: 1e-8,
        }
    }
}
