//! Named check suites: closed forms, bounds, oracle agreement and the
//! derivative inequality. Each check carries a short human-readable detail
//! so a failing run says what broke without a debugger.

use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{
    check_derivative_inequality, closed_form_constant, constant, gallery, submultiplicativity_check,
};
use crate::explorer::log_grid;
use crate::extremal::{
    equioscillation_check, oracle_extremal, solve_extremal, NelderMeadOptions, OracleOptions, SolveOptions,
};
use crate::polynomials::Interval;
use crate::quadrature::PNorm;

/// Numeric solver against closed forms.
pub const CLOSED_FORM_TOL: f64 = 1e-6;
/// `C(1, p)` against `2 (p+1)^(1/p)`.
pub const DEGREE_ONE_TOL: f64 = 1e-8;
/// Slack when checking that `p -> C(n, p)` decreases.
pub const MONOTONE_SLACK: f64 = 1e-9;
/// Solver norm may exceed the oracle norm by at most this much.
pub const ORACLE_NORM_SLACK: f64 = 1e-6;
pub const ORACLE_ROOT_TOL: f64 = 1e-3;
/// Ripple of the sup-norm solution around `2^(1-n)`.
pub const RIPPLE_TOL: f64 = 1e-9;

/// The exponent grid of the bound checks.
pub const BOUND_GRID: [f64; 7] = [0.25, 0.5, 1.0, 1.5, 2.0, 4.0, 8.0];
pub const ORACLE_GRID: [f64; 4] = [0.5, 0.75, 1.5, 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ClosedForms,
    Bounds,
    Oracle,
    Inequality,
    All,
}

impl Suite {
    pub const EACH: [Suite; 4] = [Suite::ClosedForms, Suite::Bounds, Suite::Oracle, Suite::Inequality];

    fn name(self) -> &'static str {
        match self {
            Suite::ClosedForms => "closed-forms",
            Suite::Bounds => "bounds",
            Suite::Oracle => "oracle",
            Suite::Inequality => "inequality",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Suite::ClosedForms,
            Suite::Bounds,
            Suite::Oracle,
            Suite::Inequality,
            Suite::All,
        ]
        .into_iter()
        .find(|x| x.name() == s)
        .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn relative(name: String, got: f64, want: f64, tol: f64) -> Self {
        let err = ((got - want) / want).abs();
        Self::new(
            name,
            err <= tol,
            format!("got {got:.17e}, want {want:.17e}, rel err {err:.2e} (tol {tol:.0e})"),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Largest degree exercised; each suite also has its own cap.
    pub n_max: usize,
    pub rel_tol: f64,
    /// Seed for the random submultiplicativity triples.
    pub seed: u64,
    pub random_triples: usize,
    /// Simplex settings for every numeric solve.
    pub nelder_mead: NelderMeadOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n_max: 8,
            rel_tol: crate::quadrature::DEFAULT_REL_TOL,
            seed: 0x5eed,
            random_triples: 20,
            nelder_mead: NelderMeadOptions::default(),
        }
    }
}

impl VerifyOptions {
    fn solve(&self) -> SolveOptions {
        SolveOptions {
            rel_tol: self.rel_tol,
            nelder_mead: self.nelder_mead,
            ..SolveOptions::default()
        }
    }

    fn numeric(&self) -> SolveOptions {
        SolveOptions {
            force_numeric: true,
            ..self.solve()
        }
    }
}

/// Run one suite, or every suite for [`Suite::All`].
pub fn run(suite: Suite, opts: &VerifyOptions) -> Vec<SuiteReport> {
    match suite {
        Suite::All => Suite::EACH.iter().map(|&s| run_one(s, opts)).collect(),
        s => vec![run_one(s, opts)],
    }
}

fn run_one(suite: Suite, opts: &VerifyOptions) -> SuiteReport {
    let checks = match suite {
        Suite::ClosedForms => closed_forms(opts),
        Suite::Bounds => bounds(opts),
        Suite::Oracle => oracle(opts),
        Suite::Inequality => inequality(opts),
        Suite::All => unreachable!("expanded by run"),
    };
    SuiteReport { suite, checks }
}

fn label(p: PNorm) -> String {
    p.to_string()
}

fn closed_forms(opts: &VerifyOptions) -> Vec<Check> {
    let unit = Interval::unit();
    let cases: Vec<(usize, PNorm)> = (1..=opts.n_max.min(8))
        .flat_map(|n| [PNorm::Finite(1.0), PNorm::Finite(2.0), PNorm::Infinity].map(|p| (n, p)))
        .collect();
    let mut checks: Vec<Check> = cases
        .par_iter()
        .map(|&(n, p)| {
            let name = format!("numeric C({n},{}) vs closed form", label(p));
            let want = closed_form_constant(n, p).expect("closed-form exponent").value;
            match constant(n, p, &unit, &opts.numeric()) {
                Ok(r) => Check::relative(name, r.c_canonical, want, CLOSED_FORM_TOL),
                Err(e) => Check::new(name, false, e.to_string()),
            }
        })
        .collect();

    let grid = log_grid(0.1, 64.0, 20).expect("valid grid");
    checks.extend(grid.iter().map(|&p| {
        let name = format!("C(1,{p:.6}) vs 2(p+1)^(1/p)");
        match constant(1, PNorm::Finite(p), &unit, &opts.numeric()) {
            Ok(r) => Check::relative(name, r.c_canonical, 2.0 * (p + 1.0).powf(1.0 / p), DEGREE_ONE_TOL),
            Err(e) => Check::new(name, false, e.to_string()),
        }
    }));

    checks.extend((1..=opts.n_max.min(8)).map(|n| {
        let name = format!("equioscillation n={n}");
        let sol = match solve_extremal(n, PNorm::Infinity, &Interval::canonical(), &opts.numeric()) {
            Ok(s) => s,
            Err(e) => return Check::new(name, false, e.to_string()),
        };
        let level = 2f64.powi(1 - n as i32);
        match equioscillation_check(&sol) {
            Ok(rep) => {
                let worst = rep.values.iter().map(|v| (v.abs() - level).abs()).fold(0.0, f64::max);
                let ok = rep.alternations > n && worst <= RIPPLE_TOL;
                Check::new(
                    name,
                    ok,
                    format!("{} alternations, max ||Q|-2^(1-n)| = {worst:.2e}", rep.alternations),
                )
            }
            Err(e) => Check::new(name, false, e.to_string()),
        }
    }));
    checks
}

fn bounds(opts: &VerifyOptions) -> Vec<Check> {
    let unit = Interval::unit();
    let solve = opts.solve();
    let n_cap = opts.n_max.min(6);
    let cases: Vec<(usize, f64)> = (1..=n_cap).flat_map(|n| BOUND_GRID.map(|p| (n, p))).collect();
    let reports: Vec<_> = cases
        .par_iter()
        .map(|&(n, p)| ((n, p), constant(n, PNorm::Finite(p), &unit, &solve)))
        .collect();
    let mut checks = Vec::new();
    for ((n, p), r) in &reports {
        let name = format!("bounds C({n},{p})");
        match r {
            Ok(r) => {
                let worst = r.bounds.iter().map(|b| b.margin).fold(f64::INFINITY, f64::min);
                checks.push(Check::new(
                    name,
                    r.all_bounds_satisfied(),
                    format!("C = {:.17e}, smallest margin {worst:.3e}", r.c_canonical),
                ));
            }
            Err(e) => checks.push(Check::new(name, false, e.to_string())),
        }
    }

    // p -> C(n, p) decreasing on the same grid extended with inf
    for n in 1..=n_cap.min(4) {
        let mut values: Vec<(PNorm, f64)> = reports
            .iter()
            .filter(|((m, _), _)| *m == n)
            .filter_map(|((_, p), r)| r.as_ref().ok().map(|r| (PNorm::Finite(*p), r.c_canonical)))
            .collect();
        match constant(n, PNorm::Infinity, &unit, &solve) {
            Ok(r) => values.push((PNorm::Infinity, r.c_canonical)),
            Err(e) => {
                checks.push(Check::new(format!("monotone in p, n={n}"), false, e.to_string()));
                continue;
            }
        }
        let bad: Vec<String> = values
            .windows(2)
            // strict: each step must drop by more than the slack
            .filter(|w| w[1].1 >= w[0].1 * (1.0 - MONOTONE_SLACK))
            .map(|w| format!("C({n},{}) = {} vs C({n},{}) = {}", w[0].0, w[0].1, w[1].0, w[1].1))
            .collect();
        checks.push(Check::new(
            format!("monotone in p, n={n}"),
            bad.is_empty(),
            if bad.is_empty() {
                format!("{} points decreasing", values.len())
            } else {
                bad.join("; ")
            },
        ));
    }

    checks.extend(submultiplicativity_cases(opts).into_iter().map(|(m, n, p, q, r)| {
        let name = format!("submultiplicative m={m} n={n} q={q} r={r}");
        match submultiplicativity_check(m, n, p, q, r, &solve) {
            Ok(rep) => Check::new(
                name,
                rep.satisfied,
                format!("lhs {:.17e} rhs {:.17e}", rep.lhs, rep.rhs),
            ),
            Err(e) => Check::new(name, false, e.to_string()),
        }
    }));
    checks
}

/// The three worked instances followed by `opts.random_triples` seeded random
/// ones with `m + n <= 6`.
pub fn submultiplicativity_cases(opts: &VerifyOptions) -> Vec<(usize, usize, PNorm, PNorm, PNorm)> {
    let f = PNorm::Finite;
    let mut out = vec![
        (1, 1, f(1.0), f(2.0), f(2.0)),
        (1, 1, f(2.0), f(4.0), f(4.0)),
        (2, 1, f(1.0), f(3.0), f(1.5)),
    ];
    let mut rng = StdRng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_triples {
        let m = rng.gen_range(1..=5);
        let n = rng.gen_range(1..=6 - m);
        let mut draw = || -> PNorm {
            if rng.gen_bool(0.1) {
                PNorm::Infinity
            } else {
                f((rng.gen_range(0.25f64.ln()..16f64.ln())).exp())
            }
        };
        let (q, r) = (draw(), draw());
        let inv = q.reciprocal() + r.reciprocal();
        let p = if inv == 0.0 { PNorm::Infinity } else { f(1.0 / inv) };
        out.push((m, n, p, q, r));
    }
    out
}

fn oracle(opts: &VerifyOptions) -> Vec<Check> {
    let canon = Interval::canonical();
    let cases: Vec<(usize, f64)> = (2..=opts.n_max.min(4))
        .flat_map(|n| ORACLE_GRID.map(|p| (n, p)))
        .collect();
    let oracle_opts = OracleOptions::default();
    cases
        .par_iter()
        .map(|&(n, p)| {
            let name = format!("oracle n={n} p={p}");
            let pn = PNorm::Finite(p);
            let (sol, orc) = match (
                solve_extremal(n, pn, &canon, &opts.solve()),
                oracle_extremal(n, pn, &canon, &oracle_opts),
            ) {
                (Ok(s), Ok(o)) => (s, o),
                (Err(e), _) | (_, Err(e)) => return Check::new(name, false, e.to_string()),
            };
            let root_gap = sol.roots.distance(&orc.roots);
            let ok = sol.norm_value <= orc.norm_value + ORACLE_NORM_SLACK && root_gap <= ORACLE_ROOT_TOL;
            Check::new(
                name,
                ok,
                format!(
                    "solver {:.17e}, oracle {:.17e}, root gap {root_gap:.2e}",
                    sol.norm_value, orc.norm_value
                ),
            )
        })
        .collect()
}

fn inequality(opts: &VerifyOptions) -> Vec<Check> {
    let intervals = [
        Interval::canonical(),
        Interval::unit(),
        Interval::new(2.0, 5.0).expect("valid"),
    ];
    let solve = opts.solve();
    let cases: Vec<(usize, PNorm, Interval)> = (1..=opts.n_max.min(4))
        .flat_map(|n| {
            [PNorm::Finite(1.0), PNorm::Finite(2.0), PNorm::Infinity]
                .into_iter()
                .flat_map(move |p| intervals.map(|i| (n, p, i)))
        })
        .collect();
    cases
        .par_iter()
        .flat_map_iter(|&(n, p, i)| {
            let fs = match gallery(n, p, &i, &solve) {
                Ok(fs) => fs,
                Err(e) => return vec![Check::new(format!("gallery n={n} p={p} on {i}"), false, e.to_string())],
            };
            fs.into_iter()
                .map(|f| {
                    let name = format!("{} n={n} p={p} on {i}", f.name);
                    match check_derivative_inequality(&f, n, p, &i, &solve) {
                        Ok(r) => {
                            let extremal = f.name == "extremal";
                            // equality exactly on the extremal polynomial
                            let ok = r.equality == extremal;
                            Check::new(
                                name,
                                ok,
                                format!(
                                    "m_n = {:.17e}, C* ||f|| = {:.17e}, equality {}",
                                    r.lhs, r.rhs, r.equality
                                ),
                            )
                        }
                        Err(e) => Check::new(name, false, e.to_string()),
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in [
            Suite::ClosedForms,
            Suite::Bounds,
            Suite::Oracle,
            Suite::Inequality,
            Suite::All,
        ] {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn random_triples_are_consistent() {
        let cases = submultiplicativity_cases(&VerifyOptions::default());
        assert_eq!(cases.len(), 23);
        for (m, n, p, q, r) in cases {
            assert!(m >= 1 && n >= 1 && m + n <= 6);
            assert!((p.reciprocal() - q.reciprocal() - r.reciprocal()).abs() <= 1e-12);
        }
    }

    #[test]
    fn small_suites_pass() {
        let opts = VerifyOptions {
            n_max: 3,
            random_triples: 3,
            ..VerifyOptions::default()
        };
        for rep in run(Suite::All, &opts) {
            let bad: Vec<_> = rep.failures().collect();
            assert!(bad.is_empty(), "{}: {bad:#?}", rep.suite);
        }
    }
}
