//! Sweeps over `p` (root trajectories `x_{n,i}(p)`) and over `n` (the ratio
//! `R(n, p) = 2^(-2n) C(n, p) / n!`).
//!
//! Nothing here proves anything. A drop in a root trajectory is reported with
//! its size against the solver tolerance so a reader can tell noise from a
//! candidate counterexample.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{c_canonical_from_norm, c_star_from_norm};
use crate::error::{Error, Result};
use crate::extremal::{
    closed_form_norm, norm_on_interval, solve_extremal, Method, SolveOptions, MAX_DEGREE, UNIQUENESS_TOL,
};
use crate::polynomials::{ClassicalFamily, Interval};
use crate::quadrature::PNorm;
use crate::special::factorial;

/// Drops up to this size are within solver noise.
pub const INCONCLUSIVE_BELOW: f64 = 10.0 * UNIQUENESS_TOL;
/// Largest degree for numerically solved rows of the ratio table.
pub const NUMERIC_LIMIT_MAX_DEGREE: usize = 14;
/// Largest degree for closed-form rows of the ratio table.
pub const CLOSED_FORM_LIMIT_MAX_DEGREE: usize = 30;

/// `points` values spaced evenly in `ln p` over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi.is_finite()) {
        return Err(Error::InvalidP(lo));
    }
    if !(hi > lo) || points < 2 {
        return Err(Error::InvalidP(hi));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut out: Vec<f64> = (0..points)
        .map(|j| (a + (b - a) * j as f64 / (points - 1) as f64).exp())
        .collect();
    // exact endpoints, so merging with {1, 2} does not produce near duplicates
    out[0] = lo;
    out[points - 1] = hi;
    Ok(out)
}

/// Sort a grid and merge values within `1e-12` relative of each other,
/// keeping the one with the shorter decimal form (so `2` wins over
/// `1.9999999999999998`). `inf` sorts last.
pub fn normalize_grid(mut grid: Vec<PNorm>) -> Vec<PNorm> {
    grid.sort_by(|a, b| a.value().total_cmp(&b.value()));
    grid.dedup_by(|b, a| match (*a, *b) {
        (PNorm::Finite(x), PNorm::Finite(y)) if (x - y).abs() <= 1e-12 * x.abs().max(y.abs()) => {
            if y.to_string().len() < x.to_string().len() {
                *a = *b;
            }
            true
        }
        (PNorm::Infinity, PNorm::Infinity) => true,
        _ => false,
    });
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub p: PNorm,
    /// Positive roots on `[-1, 1]`, increasing.
    pub roots: Vec<f64>,
    /// `D**(n, p, interval)`.
    pub d_star_star: f64,
    pub c_star: f64,
    pub c_canonical: f64,
    /// `2^(-2n) C(n, p) / n!`
    pub ratio: f64,
    pub method: Method,
    pub restarts: usize,
    pub converged: bool,
    /// Set when the solver did not converge or failed; the row still carries
    /// its best values when there are any.
    pub suspect: bool,
    pub error: Option<String>,
}

impl SweepRow {
    fn from_solution(sol: &crate::extremal::ExtremalSolution) -> Self {
        let c = c_canonical_from_norm(sol.n, sol.p, &sol.interval, sol.norm_value);
        Self {
            n: sol.n,
            p: sol.p,
            roots: sol.roots.positive_roots().to_vec(),
            d_star_star: sol.norm_value,
            c_star: c_star_from_norm(sol.n, sol.norm_value),
            c_canonical: c,
            ratio: c / (4f64.powi(sol.n as i32) * factorial(sol.n as u32)),
            method: sol.method,
            restarts: sol.restarts,
            converged: sol.converged,
            suspect: !sol.converged,
            error: None,
        }
    }

    fn failed(n: usize, p: PNorm, err: &Error) -> Self {
        Self {
            n,
            p,
            roots: Vec::new(),
            d_star_star: f64::NAN,
            c_star: f64::NAN,
            c_canonical: f64::NAN,
            ratio: f64::NAN,
            method: Method::NumericOptimization,
            restarts: 0,
            converged: false,
            suspect: true,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    /// No consecutive pair decreases.
    Increasing,
    /// Every drop is within [`INCONCLUSIVE_BELOW`], or the largest drop
    /// involves a suspect row.
    Inconclusive,
    /// A drop larger than [`INCONCLUSIVE_BELOW`] between converged rows. A
    /// numerical observation, to be checked at higher precision.
    ViolationFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityVerdict {
    /// Root index `i` in `x_{n,i}`, counted from the smallest positive root.
    pub index: usize,
    pub verdict: VerdictKind,
    /// Largest `x(p_j) - x(p_{j+1})`; negative when the sequence increases
    /// strictly.
    pub worst_drop: f64,
    /// The pair of exponents where `worst_drop` occurs.
    pub pair: Option<(PNorm, PNorm)>,
    /// `worst_drop / INCONCLUSIVE_BELOW`.
    pub margin: f64,
}

impl MonotonicityVerdict {
    /// True unless a drop beyond solver noise was seen.
    pub fn nondecreasing_within_tolerance(&self) -> bool {
        self.worst_drop <= INCONCLUSIVE_BELOW
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    RootTrajectory,
    LimitRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub interval: Interval,
    pub rel_tol: f64,
    pub warm_start: bool,
    pub force_numeric: bool,
    pub total_restarts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub kind: SweepKind,
    /// Exponents for a root sweep, degrees for a ratio table; strictly
    /// increasing.
    pub axis: Vec<f64>,
    pub rows: Vec<SweepRow>,
    /// One per root index (root sweeps only).
    pub verdicts: Vec<MonotonicityVerdict>,
    /// `R(n+1, p) - R(n, p)` (ratio tables only).
    pub differences: Vec<f64>,
    pub metadata: SweepMetadata,
}

impl SweepTable {
    pub fn any_suspect(&self) -> bool {
        self.rows.iter().any(|r| r.suspect)
    }

    pub fn violations(&self) -> impl Iterator<Item = &MonotonicityVerdict> {
        self.verdicts
            .iter()
            .filter(|v| v.verdict == VerdictKind::ViolationFound)
    }
}

/// Where finished rows go, and where a resumed sweep looks them up.
pub trait RowStore: Sync {
    fn lookup(&self, n: usize, p: PNorm) -> Option<SweepRow>;
    fn record(&self, row: &SweepRow);
}

/// A store that remembers nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoStore;

impl RowStore for NoStore {
    fn lookup(&self, _: usize, _: PNorm) -> Option<SweepRow> {
        None
    }
    fn record(&self, _: &SweepRow) {}
}

/// An in-memory store, mostly for tests.
#[derive(Debug, Default)]
pub struct MemoryStore {
    rows: Mutex<HashMap<(usize, u64), SweepRow>>,
}

impl MemoryStore {
    pub fn len(&self) -> usize {
        self.rows.lock().expect("store poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl RowStore for MemoryStore {
    fn lookup(&self, n: usize, p: PNorm) -> Option<SweepRow> {
        self.rows
            .lock()
            .expect("store poisoned")
            .get(&(n, p.value().to_bits()))
            .cloned()
    }

    fn record(&self, row: &SweepRow) {
        self.rows
            .lock()
            .expect("store poisoned")
            .insert((row.n, row.p.value().to_bits()), row.clone());
    }
}

fn solve_row(n: usize, p: PNorm, interval: &Interval, opts: &SolveOptions, warm: Option<&[f64]>) -> SweepRow {
    let mut o = opts.clone();
    o.warm_start = warm.map(<[f64]>::to_vec);
    match solve_extremal(n, p, interval, &o) {
        Ok(sol) => SweepRow::from_solution(&sol),
        Err(first) => {
            // a bad warm start should not sink the row; retry from the seeds
            let retry = if warm.is_some() {
                o.warm_start = None;
                solve_extremal(n, p, interval, &o)
            } else {
                Err(first)
            };
            match retry {
                Ok(sol) => SweepRow::from_solution(&sol),
                Err(Error::NotConverged { best }) => {
                    let mut row = SweepRow::from_solution(&best);
                    row.error = Some("solver did not converge".into());
                    row
                }
                Err(e) => SweepRow::failed(n, p, &e),
            }
        }
    }
}

/// The positive roots `x_{n,i}(p)` of the extremal polynomial along `grid`,
/// with a monotonicity verdict per root index.
///
/// With `opts.warm_start`-style chaining (`warm_start = true`) each solve
/// starts from the previous row's roots and the rows run in order; otherwise
/// rows are independent and run in parallel.
pub fn root_trajectory_sweep(
    n: usize,
    grid: &[PNorm],
    interval: &Interval,
    opts: &SolveOptions,
    warm_start: bool,
    store: &dyn RowStore,
) -> Result<SweepTable> {
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::DegreeOutOfRange {
            n,
            min: 1,
            max: MAX_DEGREE,
        });
    }
    for w in grid.windows(2) {
        if !(w[0].value() < w[1].value()) {
            return Err(Error::InvalidP(w[1].value()));
        }
    }
    let one = |p: PNorm, warm: Option<&[f64]>| -> SweepRow {
        if let Some(row) = store.lookup(n, p) {
            return row;
        }
        let row = solve_row(n, p, interval, opts, warm);
        store.record(&row);
        row
    };
    let rows: Vec<SweepRow> = if warm_start {
        let mut rows: Vec<SweepRow> = Vec::with_capacity(grid.len());
        for &p in grid {
            let warm = rows.last().filter(|r| !r.suspect && n > 1).map(|r| r.roots.as_slice());
            let row = one(p, warm);
            rows.push(row);
        }
        rows
    } else {
        grid.par_iter().map(|&p| one(p, None)).collect()
    };

    let verdicts = (0..n / 2).map(|i| verdict_for_index(i, &rows)).collect();
    Ok(SweepTable {
        kind: SweepKind::RootTrajectory,
        axis: grid.iter().map(|p| p.value()).collect(),
        verdicts,
        differences: Vec::new(),
        metadata: SweepMetadata {
            interval: *interval,
            rel_tol: opts.rel_tol,
            warm_start,
            force_numeric: opts.force_numeric,
            total_restarts: rows.iter().map(|r| r.restarts).sum(),
        },
        rows,
    })
}

fn verdict_for_index(i: usize, rows: &[SweepRow]) -> MonotonicityVerdict {
    let mut worst = f64::NEG_INFINITY;
    let mut pair = None;
    let mut worst_suspect = false;
    for w in rows.windows(2) {
        let (Some(a), Some(b)) = (w[0].roots.get(i), w[1].roots.get(i)) else {
            continue;
        };
        let drop = a - b;
        if drop > worst {
            worst = drop;
            pair = Some((w[0].p, w[1].p));
            worst_suspect = w[0].suspect || w[1].suspect;
        }
    }
    let verdict = if pair.is_none() || worst <= 0.0 {
        VerdictKind::Increasing
    } else if worst <= INCONCLUSIVE_BELOW || worst_suspect {
        VerdictKind::Inconclusive
    } else {
        VerdictKind::ViolationFound
    };
    let worst = if pair.is_none() { 0.0 } else { worst };
    MonotonicityVerdict {
        index: i,
        verdict,
        worst_drop: worst,
        pair,
        margin: worst / INCONCLUSIVE_BELOW,
    }
}

fn closed_form_row(n: usize, p: PNorm, interval: &Interval) -> Option<SweepRow> {
    let family = match p {
        PNorm::Infinity => ClassicalFamily::ChebyshevFirst,
        PNorm::Finite(1.0) => ClassicalFamily::ChebyshevSecond,
        PNorm::Finite(2.0) => ClassicalFamily::Legendre,
        PNorm::Finite(_) => return None,
    };
    let canonical = closed_form_norm(n, p)?;
    let d = norm_on_interval(canonical, n, p, interval);
    let c = crate::constants::closed_form_constant(n, p)?.value;
    Some(SweepRow {
        n,
        p,
        roots: family.positive_roots(n),
        d_star_star: d,
        c_star: c_star_from_norm(n, d),
        c_canonical: c,
        ratio: c / (4f64.powi(n as i32) * factorial(n as u32)),
        method: Method::ClosedForm,
        restarts: 0,
        converged: true,
        suspect: false,
        error: None,
    })
}

/// `R(n, p) = 2^(-2n) C(n, p) / n!` for `n = 1..=n_max`, with successive
/// differences. `p = 1, 2, inf` use the closed forms (up to degree 30) unless
/// `opts.force_numeric`; other rows are solved independently, in parallel.
pub fn limit_ratio_table(
    n_max: usize,
    p: PNorm,
    interval: &Interval,
    opts: &SolveOptions,
    store: &dyn RowStore,
) -> Result<SweepTable> {
    let closed = !opts.force_numeric && closed_form_norm(1, p).is_some();
    let max = if closed {
        CLOSED_FORM_LIMIT_MAX_DEGREE
    } else {
        NUMERIC_LIMIT_MAX_DEGREE
    };
    if n_max == 0 || n_max > max {
        return Err(Error::DegreeOutOfRange { n: n_max, min: 1, max });
    }
    let degrees: Vec<usize> = (1..=n_max).collect();
    let rows: Vec<SweepRow> = if closed {
        degrees
            .iter()
            .map(|&n| closed_form_row(n, p, interval).expect("closed-form exponent"))
            .collect()
    } else {
        degrees
            .par_iter()
            .map(|&n| {
                if let Some(row) = store.lookup(n, p) {
                    return row;
                }
                let row = solve_row(n, p, interval, opts, None);
                store.record(&row);
                row
            })
            .collect()
    };
    let differences = rows.windows(2).map(|w| w[1].ratio - w[0].ratio).collect();
    Ok(SweepTable {
        kind: SweepKind::LimitRatio,
        axis: degrees.iter().map(|&n| n as f64).collect(),
        verdicts: Vec::new(),
        differences,
        metadata: SweepMetadata {
            interval: *interval,
            rel_tol: opts.rel_tol,
            warm_start: false,
            force_numeric: opts.force_numeric,
            total_restarts: rows.iter().map(|r| r.restarts).sum(),
        },
        rows,
    })
}
