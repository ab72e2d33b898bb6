//! Brute-force grid search over root configurations, used to validate the
//! optimizer. It evaluates norms of the expanded polynomial directly and
//! shares nothing with the solver beyond the quadrature rule.

use rayon::prelude::*;

use super::{build_solution, ExtremalSolution, Method};
use crate::error::{Error, Result};
use crate::polynomials::{Interval, MonicPolynomial, SymmetricRootVector};
use crate::quadrature::{lp_norm_p_power, PNorm};

pub const ORACLE_MAX_DEGREE: usize = 4;

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    /// Grid cells per unit on each axis in the first pass.
    pub resolution: usize,
    /// Number of local refinement passes.
    pub depth: usize,
    /// Each pass divides the spacing by this factor.
    pub refine_factor: usize,
    pub rel_tol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            resolution: 400,
            depth: 3,
            refine_factor: 20,
            rel_tol: 1e-10,
        }
    }
}

fn p_power(n: usize, p: f64, xs: &[f64], rel_tol: f64) -> f64 {
    let mut roots: Vec<f64> = xs.iter().flat_map(|&x| [-x, x]).collect();
    if n % 2 == 1 {
        roots.push(0.0);
    }
    let q = MonicPolynomial::from_roots(roots);
    match lp_norm_p_power(&q, &Interval::canonical(), p, rel_tol) {
        Ok(r) => r.value,
        Err(Error::ToleranceNotReached { best }) => best.value,
        Err(_) => f64::INFINITY,
    }
}

/// All strictly increasing `k`-tuples drawn from `axis`.
fn ordered_tuples(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                let last = prefix.last().copied();
                axis.iter()
                    .filter(move |&&v| last.is_none_or(|l| v > l))
                    .map(move |&v| {
                        let mut t = prefix.clone();
                        t.push(v);
                        t
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

fn argmin(n: usize, p: f64, candidates: Vec<Vec<f64>>, rel_tol: f64) -> (Vec<f64>, f64) {
    candidates
        .into_par_iter()
        .map(|xs| {
            let v = p_power(n, p, &xs, rel_tol);
            (xs, v)
        })
        .min_by(|a, b| {
            a.1.total_cmp(&b.1)
                .then_with(|| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
        })
        .expect("non-empty grid")
}

/// Grid-search minimizer for degree `n <= 4` and finite `p`.
pub fn oracle_extremal(n: usize, p: PNorm, interval: &Interval, opts: &OracleOptions) -> Result<ExtremalSolution> {
    if !(1..=ORACLE_MAX_DEGREE).contains(&n) {
        return Err(Error::DegreeOutOfRange {
            n,
            min: 1,
            max: ORACLE_MAX_DEGREE,
        });
    }
    let PNorm::Finite(pv) = p else {
        return Err(Error::InvalidP(f64::INFINITY));
    };
    let k = n / 2;
    let mut h = 1.0 / opts.resolution as f64;
    let axis: Vec<f64> = (1..=opts.resolution).map(|i| i as f64 * h).collect();
    let (mut best, mut value) = argmin(n, pv, ordered_tuples(&vec![axis; k]), opts.rel_tol);
    for _ in 0..opts.depth {
        let step = h / opts.refine_factor as f64;
        let m = opts.refine_factor as i64;
        let axes: Vec<Vec<f64>> = best
            .iter()
            .map(|&c| {
                (-m..=m)
                    .map(|j| c + j as f64 * step)
                    .filter(|&v| v > 0.0 && v <= 1.0)
                    .collect()
            })
            .collect();
        (best, value) = argmin(n, pv, ordered_tuples(&axes), opts.rel_tol);
        h = step;
    }
    let roots = SymmetricRootVector::new(n, best)?;
    Ok(build_solution(
        n,
        p,
        interval,
        roots,
        value.powf(1.0 / pv),
        Method::Oracle,
        opts.rel_tol,
    ))
}
