use serde::{Deserialize, Serialize};

use super::ExtremalSolution;
use crate::error::{Error, Result};
use crate::quadrature::{Integrand, PNorm};

/// Tolerance on `| |Q(x)| - D** |` at an alternation point.
pub const EQUIOSCILLATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquioscillationReport {
    /// Points of `[-1, 1]` where `|Q|` reaches the norm, increasing.
    pub points: Vec<f64>,
    pub values: Vec<f64>,
    /// Length of the longest run of consecutive points with alternating signs.
    pub alternations: usize,
}

/// Check that the sup-norm minimizer reaches `+-D**` at `n + 1` points of
/// `[-1, 1]` with alternating signs.
pub fn equioscillation_check(sol: &ExtremalSolution) -> Result<EquioscillationReport> {
    if sol.p != PNorm::Infinity {
        return Err(Error::CheckFailed(format!(
            "equioscillation needs p = inf, got p = {}",
            sol.p
        )));
    }
    let q = sol.canonical_polynomial();
    let mut candidates: Vec<f64> = q.sup_candidates().into_iter().filter(|c| c.abs() < 1.0).collect();
    candidates.push(-1.0);
    candidates.push(1.0);
    candidates.sort_by(f64::total_cmp);

    let norm = sol.canonical_norm;
    let (points, values): (Vec<f64>, Vec<f64>) = candidates
        .into_iter()
        .map(|x| (x, q.evaluate(x)))
        .filter(|(_, v)| (v.abs() - norm).abs() <= EQUIOSCILLATION_TOL)
        .unzip();
    let mut alternations = usize::from(!values.is_empty());
    let mut run = alternations;
    for w in values.windows(2) {
        run = if w[0].signum() != w[1].signum() { run + 1 } else { 1 };
        alternations = alternations.max(run);
    }
    let report = EquioscillationReport {
        points,
        values,
        alternations,
    };
    if report.alternations > sol.n {
        Ok(report)
    } else {
        Err(Error::CheckFailed(format!(
            "{} alternation points (need {}): {:?} with values {:?}",
            report.alternations,
            sol.n + 1,
            report.points,
            report.values
        )))
    }
}
