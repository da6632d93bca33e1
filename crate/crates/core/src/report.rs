//! Shared pass/fail report for the numeric checkers.

use crate::geometry::Vector;
use serde::{Deserialize, Serialize};

/// One recorded counterexample of a checked inequality.
///
/// `lhs` and `rhs` are the two sides as evaluated; the check failed because
/// `lhs > rhs + tol`. The locus fields identify where: grid points for the
/// pairwise checkers, an iteration index for trace monitors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub x: Option<Vector>,
    pub y: Option<Vector>,
    pub index: Option<u64>,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of an empirical check over a grid, pair list, or trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub passed: bool,
    /// Number of (point, pair, or step) instances actually evaluated.
    pub checked: usize,
    pub violations: Vec<Violation>,
    /// The grid the check ran on, when grid-based, so failures are
    /// reproducible from the report alone.
    pub grid: Vec<Vector>,
}

impl CheckReport {
    pub fn new(checked: usize, violations: Vec<Violation>, grid: Vec<Vector>) -> Self {
        CheckReport {
            passed: violations.is_empty(),
            checked,
            violations,
            grid,
        }
    }
}
