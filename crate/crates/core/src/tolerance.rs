//! Tolerance policy shared by the solver, the oracle and the verifiers.
//!
//! All absolute epsilons apply to *scaled* returns, i.e. returns multiplied
//! by `(1 - gamma) / max(1, max |r|)`, which maps every return into the unit
//! box `[-1, 1]^D` regardless of reward magnitude or horizon.

use serde::{Deserialize, Serialize};

/// Slack for hull membership and coplanarity tests.
pub const EPS_GEOM: f64 = 1e-9;
/// A face is Pareto optimal when the LP optimum exceeds this value.
pub const EPS_POS: f64 = 1e-9;
/// Two returns closer than this in L-infinity are the same geometric point.
pub const EPS_EQUAL: f64 = 1e-10;
/// Default vertex matching tolerance when comparing two fronts.
pub const COMPARE_TOL: f64 = 1e-8;
/// Relative singular-value cutoff for affine rank decisions.
pub const RANK_TOL: f64 = 1e-9;
/// Row-sum and simplex tolerance for probability vectors.
pub const PROB_TOL: f64 = 1e-12;
/// Near-max window used for greedy action selection.
pub const ACTION_TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub geom: f64,
    pub pos: f64,
    pub equal: f64,
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            geom: EPS_GEOM,
            pos: EPS_POS,
            equal: EPS_EQUAL,
            rank: RANK_TOL,
        }
    }
}
