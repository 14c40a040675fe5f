//! Shared numerical tolerances.

use serde::{Deserialize, Serialize};

/// Default comparison tolerance for real-valued checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default cap on the number of group elements handled by dense routines.
pub const DEFAULT_ORDER_CAP: usize = 10_000;

/// Tolerances threaded through a run. Every report records the values used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Generic comparison slack.
    pub tol: f64,
    /// Cap on group orders (and block-representation dimensions).
    pub order_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            order_cap: DEFAULT_ORDER_CAP,
        }
    }
}
