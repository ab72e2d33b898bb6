//! The monic polynomial of least `L^p` norm on an interval.
//!
//! On `[-1, 1]` the minimizer is unique and has the parity of its degree, so
//! it is `x^e prod (x^2 - x_i^2)` and the search runs over the `k = n/2`
//! squared positive roots. Other intervals are reached by the affine map.
//!
//! `p = 1, 2, inf` dispatch to the classical families unless the numeric
//! path is forced; everything else goes through a multi-start Nelder-Mead
//! search followed by a Newton polish (on the gradient for finite `p`, on
//! the ripple of the local maxima for `p = inf`).

mod equioscillation;
pub mod nelder_mead;
mod objective;
mod oracle;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use equioscillation::{equioscillation_check, EquioscillationReport};
pub use nelder_mead::NelderMeadOptions;
pub use oracle::{oracle_extremal, OracleOptions};

use crate::error::{Error, Result};
use crate::polynomials::{ClassicalFamily, Interval, MonicPolynomial, SymmetricRootVector};
use crate::quadrature::{integrate_split, PNorm, DEFAULT_REL_TOL};
use objective::SymmetricObjective;

pub const MIN_DEGREE: usize = 1;
pub const MAX_DEGREE: usize = 20;

/// Multi-start runs whose root vectors differ by more than this are reported
/// as distinct local minima.
pub const UNIQUENESS_TOL: f64 = 1e-7;

/// Penalty per unit of distance a proposal lies outside `[0, 1]^k`.
const BOUNDARY_PENALTY: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    NumericOptimization,
    Oracle,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub rel_tol: f64,
    /// Jittered copies of the classical seeds, on top of the three seeds.
    pub jittered_starts: usize,
    pub force_numeric: bool,
    /// Positive roots on `[-1, 1]` to start from instead of the classical
    /// seeds.
    pub warm_start: Option<Vec<f64>>,
    pub seed: u64,
    pub nelder_mead: NelderMeadOptions,
    pub parallel: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            jittered_starts: 4,
            force_numeric: false,
            warm_start: None,
            seed: 0x5eed,
            nelder_mead: NelderMeadOptions::default(),
            parallel: true,
        }
    }
}

impl SolveOptions {
    pub fn numeric() -> Self {
        Self {
            force_numeric: true,
            ..Self::default()
        }
    }
}

/// A solved extremal problem `min ||Q||_p` over monic `Q` of degree `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremalSolution {
    pub n: usize,
    pub p: PNorm,
    pub interval: Interval,
    /// Positive roots of the minimizer on `[-1, 1]`.
    pub roots: SymmetricRootVector,
    /// All `n` roots carried to `interval`.
    pub roots_on_interval: Vec<f64>,
    /// `D**(n, p, [-1, 1])`.
    pub canonical_norm: f64,
    /// `D**(n, p, interval)`.
    pub norm_value: f64,
    pub method: Method,
    /// `max_j |int sign(Q) |Q|^(p-1) t^j|` on `[-1, 1]`, finite `p` only.
    pub stationarity_residual: Option<f64>,
    pub restarts: usize,
    pub converged: bool,
    /// Converged starts that ended more than [`UNIQUENESS_TOL`] away from
    /// the reported minimizer.
    pub distinct_minima: Vec<SymmetricRootVector>,
}

impl ExtremalSolution {
    pub fn canonical_polynomial(&self) -> MonicPolynomial {
        self.roots.expand()
    }

    pub fn polynomial(&self) -> MonicPolynomial {
        MonicPolynomial::from_roots(self.roots_on_interval.clone())
    }
}

/// `D**` on `interval` from its value on `[-1, 1]`.
pub fn norm_on_interval(canonical_norm: f64, n: usize, p: PNorm, interval: &Interval) -> f64 {
    let half = 0.5 * interval.length();
    canonical_norm * half.powf(n as f64 + p.reciprocal())
}

fn classical_family(p: PNorm) -> Option<ClassicalFamily> {
    match p {
        PNorm::Infinity => Some(ClassicalFamily::ChebyshevFirst),
        PNorm::Finite(1.0) => Some(ClassicalFamily::ChebyshevSecond),
        PNorm::Finite(2.0) => Some(ClassicalFamily::Legendre),
        PNorm::Finite(_) => None,
    }
}

/// `D**(n, p, [-1, 1])` from the closed forms, for `p = 1, 2, inf`.
pub fn closed_form_norm(n: usize, p: PNorm) -> Option<f64> {
    let family = classical_family(p)?;
    Some(match family {
        ClassicalFamily::ChebyshevFirst | ClassicalFamily::ChebyshevSecond => 2f64.powi(1 - n as i32),
        ClassicalFamily::Legendre => family.monic_factor(n) * (2.0 / (2.0 * n as f64 + 1.0)).sqrt(),
    })
}

fn check_degree(n: usize) -> Result<()> {
    if (MIN_DEGREE..=MAX_DEGREE).contains(&n) {
        Ok(())
    } else {
        Err(Error::DegreeOutOfRange {
            n,
            min: MIN_DEGREE,
            max: MAX_DEGREE,
        })
    }
}

/// `max_{0 <= j < n} |int_{-1}^{1} sign(Q) |Q|^(p-1) t^j dt|`, the first-order
/// optimality conditions of the `L^p` problem.
pub fn stationarity_residual(q: &MonicPolynomial, p: f64, rel_tol: f64) -> f64 {
    (0..q.degree())
        .map(|j| {
            let (r, _) = integrate_split(-1.0, 1.0, q.roots(), rel_tol, |at| {
                let v: f64 = q.roots().iter().map(|&r| at.minus(r)).product();
                if v == 0.0 {
                    return 0.0;
                }
                v.signum() * v.abs().powf(p - 1.0) * at.x().powi(j as i32)
            });
            r.value.abs()
        })
        .fold(0.0, f64::max)
}

pub(crate) fn build_solution(
    n: usize,
    p: PNorm,
    interval: &Interval,
    roots: SymmetricRootVector,
    canonical_norm: f64,
    method: Method,
    rel_tol: f64,
) -> ExtremalSolution {
    let canonical = roots.expand();
    let roots_on_interval = canonical.rescale(&Interval::canonical(), interval).roots().to_vec();
    let stationarity = match p {
        PNorm::Finite(v) => Some(stationarity_residual(&canonical, v, rel_tol)),
        PNorm::Infinity => None,
    };
    ExtremalSolution {
        n,
        p,
        interval: *interval,
        roots,
        roots_on_interval,
        canonical_norm,
        norm_value: norm_on_interval(canonical_norm, n, p, interval),
        method,
        stationarity_residual: stationarity,
        restarts: 0,
        converged: true,
        distinct_minima: Vec::new(),
    }
}

/// Solve the extremal problem for degree `n`, exponent `p`, on `interval`.
pub fn solve_extremal(n: usize, p: PNorm, interval: &Interval, opts: &SolveOptions) -> Result<ExtremalSolution> {
    check_degree(n)?;
    if !opts.force_numeric {
        if let (Some(family), Some(norm)) = (classical_family(p), closed_form_norm(n, p)) {
            return Ok(build_solution(
                n,
                p,
                interval,
                family.symmetric_roots(n),
                norm,
                Method::ClosedForm,
                opts.rel_tol,
            ));
        }
    }

    let objective = SymmetricObjective::new(n, p, opts.rel_tol);
    let k = n / 2;
    let seeds = seeds(n, opts);
    let run = |ys: &Vec<f64>| run_start(&objective, ys, &opts.nelder_mead);
    let mut runs: Vec<StartResult> = if opts.parallel && seeds.len() > 1 && k > 0 {
        seeds.par_iter().map(run).collect()
    } else {
        seeds.iter().map(run).collect()
    };
    runs.sort_by(|a, b| {
        a.value.total_cmp(&b.value).then_with(|| {
            a.ys.iter()
                .zip(&b.ys)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let best = &runs[0];
    let winner = SymmetricRootVector::from_squares_unchecked(n, &best.ys);
    let distinct_minima = runs[1..]
        .iter()
        .filter(|r| r.converged)
        .map(|r| SymmetricRootVector::from_squares_unchecked(n, &r.ys))
        .filter(|v| v.distance(&winner) > UNIQUENESS_TOL)
        .collect();
    let canonical_norm = match p {
        PNorm::Finite(v) => best.value.powf(1.0 / v) / objective.scale(),
        PNorm::Infinity => best.value / objective.scale(),
    };
    let valid = SymmetricRootVector::new(n, winner.positive_roots().to_vec()).is_ok();
    let mut sol = build_solution(
        n,
        p,
        interval,
        winner,
        canonical_norm,
        Method::NumericOptimization,
        opts.rel_tol,
    );
    sol.restarts = runs.len();
    sol.converged = best.converged && valid;
    sol.distinct_minima = distinct_minima;
    if sol.converged {
        Ok(sol)
    } else {
        Err(Error::NotConverged { best: Box::new(sol) })
    }
}

fn seeds(n: usize, opts: &SolveOptions) -> Vec<Vec<f64>> {
    if let Some(warm) = &opts.warm_start {
        return vec![warm.iter().map(|x| x * x).collect()];
    }
    let families = [
        ClassicalFamily::ChebyshevFirst,
        ClassicalFamily::ChebyshevSecond,
        ClassicalFamily::Legendre,
    ];
    let mut out: Vec<Vec<f64>> = families.iter().map(|f| f.symmetric_roots(n).squares()).collect();
    if n / 2 == 0 {
        out.truncate(1);
        return out;
    }
    let mut rng = StdRng::seed_from_u64(opts.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    for i in 0..opts.jittered_starts {
        let base = &out[i % families.len()];
        let mut ys: Vec<f64> = base
            .iter()
            .map(|y| (y * rng.gen_range(0.8..1.2)).clamp(1e-6, 1.0))
            .collect();
        ys.sort_by(f64::total_cmp);
        out.push(ys);
    }
    out
}

#[derive(Debug, Clone)]
struct StartResult {
    ys: Vec<f64>,
    value: f64,
    converged: bool,
}

/// Clamp into `[0, 1]^k`, sort, and report how far the proposal was outside.
fn project(z: &[f64]) -> (Vec<f64>, f64) {
    let mut violation = 0.0;
    let mut ys: Vec<f64> = z
        .iter()
        .map(|&v| {
            let c = v.clamp(0.0, 1.0);
            violation += (v - c).abs();
            c
        })
        .collect();
    ys.sort_by(f64::total_cmp);
    (ys, violation)
}

fn run_start(objective: &SymmetricObjective, seed: &[f64], nm: &NelderMeadOptions) -> StartResult {
    if seed.is_empty() {
        return StartResult {
            ys: Vec::new(),
            value: objective.value(&[]),
            converged: true,
        };
    }
    let penalized = |z: &[f64]| {
        let (ys, violation) = project(z);
        objective.value(&ys) + BOUNDARY_PENALTY * violation
    };
    let nm_result = nelder_mead::minimize(penalized, seed, nm);
    let (ys, _) = project(&nm_result.x);
    let value = objective.value(&ys);
    match objective.p {
        PNorm::Finite(_) => polish_stationary(objective, ys, value),
        PNorm::Infinity => polish_ripple(objective, ys, value),
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn strictly_ordered(ys: &[f64]) -> bool {
    ys.first().is_some_and(|&y| y > 0.0) && ys.last().is_some_and(|&y| y <= 1.0) && ys.windows(2).all(|w| w[0] < w[1])
}

/// Central-difference Jacobian of `f` at `ys`, with steps that keep the
/// perturbed vector ordered.
fn jacobian(f: &dyn Fn(&[f64]) -> Vec<f64>, ys: &[f64]) -> Vec<Vec<f64>> {
    let k = ys.len();
    let mut jac = vec![vec![0.0; k]; k];
    for j in 0..k {
        let lo_gap = if j == 0 { ys[0] } else { ys[j] - ys[j - 1] };
        let hi_gap = if j + 1 == k { 1.0 - ys[j] } else { ys[j + 1] - ys[j] };
        let mut h = 1e-6 * ys[j].max(1e-3);
        h = h.min(0.25 * lo_gap);
        if hi_gap > 0.0 {
            h = h.min(0.25 * hi_gap);
        }
        let (mut plus, mut minus) = (ys.to_vec(), ys.to_vec());
        plus[j] += h;
        minus[j] -= h;
        let (fp, fm) = (f(&plus), f(&minus));
        for i in 0..k {
            jac[i][j] = (fp[i] - fm[i]) / (plus[j] - minus[j]);
        }
    }
    jac
}

/// Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..k {
            let m = a[row][col] / a[col][col];
            for c in col..k {
                a[row][c] -= m * a[col][c];
            }
            b[row] -= m * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Damped Newton iteration driving `residual` to zero from `ys`.
fn newton(residual: &dyn Fn(&[f64]) -> Option<Vec<f64>>, mut ys: Vec<f64>, tol: f64) -> (Vec<f64>, f64) {
    let Some(mut r) = residual(&ys) else {
        return (ys, f64::INFINITY);
    };
    let mut norm = max_abs(&r);
    let jac_of = |y: &[f64]| residual(y).unwrap_or_else(|| vec![f64::NAN; y.len()]);
    for _ in 0..40 {
        if norm <= tol {
            break;
        }
        let jac = jacobian(&jac_of, &ys);
        let Some(step) = solve_linear(jac, r.iter().map(|v| -v).collect()) else {
            break;
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = ys.iter().zip(&step).map(|(y, s)| y + t * s).collect();
            if strictly_ordered(&trial) {
                if let Some(rt) = residual(&trial) {
                    let nt = max_abs(&rt);
                    if nt < norm {
                        ys = trial;
                        r = rt;
                        norm = nt;
                        accepted = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !accepted || t * max_abs(&step) < 1e-16 {
            break;
        }
    }
    (ys, norm)
}

/// Stationarity tolerance on the scaled gradient, relative to `p * value`.
const GRADIENT_TOL: f64 = 1e-9;
/// Ripple tolerance for the sup norm; scaled maxima are of order one.
const RIPPLE_TOL: f64 = 1e-12;

fn polish_stationary(objective: &SymmetricObjective, ys: Vec<f64>, value: f64) -> StartResult {
    let p = objective.p.value();
    let scale = p * value;
    let start_ok = strictly_ordered(&ys);
    let grad = |y: &[f64]| Some(objective.gradient(y));
    let (polished, gnorm) = if start_ok {
        newton(&grad, ys.clone(), 1e-14 * scale)
    } else {
        (ys.clone(), f64::INFINITY)
    };
    let new_value = objective.value(&polished);
    if new_value <= value * (1.0 + 1e-10) && gnorm.is_finite() {
        StartResult {
            ys: polished,
            value: new_value,
            converged: gnorm <= GRADIENT_TOL * scale,
        }
    } else {
        let g0 = if start_ok {
            max_abs(&objective.gradient(&ys))
        } else {
            f64::INFINITY
        };
        StartResult {
            ys,
            value,
            converged: g0 <= GRADIENT_TOL * scale,
        }
    }
}

fn polish_ripple(objective: &SymmetricObjective, ys: Vec<f64>, value: f64) -> StartResult {
    let ripple = |y: &[f64]| objective.ripple(y);
    let start_ok = strictly_ordered(&ys);
    let (polished, rnorm) = if start_ok {
        newton(&ripple, ys.clone(), 1e-15)
    } else {
        (ys.clone(), f64::INFINITY)
    };
    let new_value = objective.value(&polished);
    if new_value <= value * (1.0 + 1e-12) && rnorm.is_finite() {
        StartResult {
            ys: polished,
            value: new_value,
            converged: rnorm <= RIPPLE_TOL,
        }
    } else {
        StartResult {
            ys,
            value,
            converged: false,
        }
    }
}
