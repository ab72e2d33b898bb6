//! `L^p` norms of functions with known real zeros.
//!
//! Between consecutive zeros `|f|^p` is smooth, so the interval is split at
//! every zero and each panel is integrated with the tanh-sinh rule. The
//! double-exponential clustering of nodes at the panel ends absorbs the
//! `|t - r|^p` cusp for any `p > 0`, including `0 < p < 1`.
//!
//! Nodes are handed to the integrand as an [`Abscissa`], which carries the
//! exact offset from the nearer panel end. An integrand that has a factor
//! `(t - r)` with `r` a panel end should use [`Abscissa::minus`] so that the
//! factor keeps full relative accuracy right at the root.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomials::{Interval, MonicPolynomial};

pub const DEFAULT_REL_TOL: f64 = 1e-11;
pub const MIN_REL_TOL: f64 = 1e-14;
pub const MAX_REL_TOL: f64 = 1e-3;

/// Number of step halvings after the unit-step level.
pub const MAX_LEVEL: usize = 12;
const MIN_LEVEL: usize = 3;
/// Half-width of the truncated tanh-sinh sum. At `u = 5` the node sits
/// about `1e-101` (relative) from the panel end.
const T_MAX: f64 = 5.0;

/// The exponent of an `L^p` norm, `0 < p <= inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum PNorm {
    Finite(f64),
    Infinity,
}

impl PNorm {
    pub fn finite(p: f64) -> Result<Self> {
        if p > 0.0 && p.is_finite() {
            Ok(Self::Finite(p))
        } else if p == f64::INFINITY {
            Ok(Self::Infinity)
        } else {
            Err(Error::InvalidP(p))
        }
    }

    /// `p` as a double, `inf` for the sup norm.
    pub fn value(self) -> f64 {
        match self {
            Self::Finite(p) => p,
            Self::Infinity => f64::INFINITY,
        }
    }

    /// `1/p`, which is `0` for the sup norm.
    pub fn reciprocal(self) -> f64 {
        match self {
            Self::Finite(p) => 1.0 / p,
            Self::Infinity => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinity)
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(p) => write!(f, "{p}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for PNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Self::Infinity);
        }
        let p: f64 = t.parse().map_err(|_| Error::InvalidP(f64::NAN))?;
        Self::finite(p)
    }
}

impl From<PNorm> for String {
    fn from(p: PNorm) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for PNorm {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub estimated_rel_error: f64,
    pub panels: usize,
}

/// A quadrature node inside a panel `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub struct Abscissa {
    x: f64,
    lo: f64,
    hi: f64,
    from_lo: f64,
    from_hi: f64,
}

impl Abscissa {
    pub fn x(&self) -> f64 {
        self.x
    }

    /// `x - r`, exact to rounding when `r` is a panel end.
    #[inline]
    pub fn minus(&self, r: f64) -> f64 {
        if r == self.lo {
            self.from_lo
        } else if r == self.hi {
            self.from_hi
        } else {
            self.x - r
        }
    }

    /// The offset from whichever panel end equals `r`, if any.
    #[inline]
    pub fn offset_from(&self, r: f64) -> Option<f64> {
        if r == self.lo {
            Some(self.from_lo)
        } else if r == self.hi {
            Some(self.from_hi)
        } else {
            None
        }
    }
}

/// Node of the normalized rule on `[-1, 1]`: distance from the nearer end
/// and the weight (before the step factor).
#[derive(Debug, Clone, Copy)]
struct Node {
    gap: f64,
    weight: f64,
}

fn node_at(u: f64) -> Node {
    let s = FRAC_PI_2 * u.sinh();
    let e = (-2.0 * s).exp();
    // 1 - tanh(s) and sech^2(s), both without cancellation.
    let gap = 2.0 * e / (1.0 + e);
    let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
    Node {
        gap,
        weight: FRAC_PI_2 * u.cosh() * sech2,
    }
}

/// New nodes (u > 0) for each level; level 0 also owns the center node.
fn levels() -> &'static [Vec<Node>] {
    static TABLE: OnceLock<Vec<Vec<Node>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=MAX_LEVEL)
            .map(|level| {
                let h = 0.5f64.powi(level as i32);
                let mut nodes = Vec::new();
                let mut j = 1usize;
                loop {
                    let u = j as f64 * h;
                    if u > T_MAX {
                        break;
                    }
                    nodes.push(node_at(u));
                    j += if level == 0 { 1 } else { 2 };
                }
                nodes
            })
            .collect()
    })
}

/// Result of one tanh-sinh panel.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel {
    pub value: f64,
    /// Integral of `|f|`, the scale against which the error is judged.
    pub magnitude: f64,
    pub abs_error: f64,
    pub converged: bool,
}

/// Tanh-sinh rule on `[lo, hi]`, refined by halving the step until two
/// consecutive levels agree to `rel_tol` (relative to the integral of `|f|`).
pub(crate) fn tanh_sinh<F>(lo: f64, hi: f64, rel_tol: f64, f: F) -> Panel
where
    F: Fn(&Abscissa) -> f64,
{
    let half = 0.5 * (hi - lo);
    let width = hi - lo;
    let at_lo = |d: f64| Abscissa {
        x: lo + d,
        lo,
        hi,
        from_lo: d,
        from_hi: -(width - d),
    };
    let at_hi = |d: f64| Abscissa {
        x: hi - d,
        lo,
        hi,
        from_lo: width - d,
        from_hi: -d,
    };

    let center = f(&Abscissa {
        x: lo + half,
        lo,
        hi,
        from_lo: half,
        from_hi: -half,
    });
    let mut sum = FRAC_PI_2 * center;
    let mut sum_abs = FRAC_PI_2 * center.abs();
    let mut prev = f64::NAN;
    let mut result = Panel {
        value: 0.0,
        magnitude: 0.0,
        abs_error: f64::INFINITY,
        converged: false,
    };
    for (level, nodes) in levels().iter().enumerate() {
        for node in nodes {
            let d = half * node.gap;
            let fl = f(&at_lo(d));
            let fr = f(&at_hi(d));
            sum += node.weight * (fl + fr);
            sum_abs += node.weight * (fl.abs() + fr.abs());
        }
        let h = 0.5f64.powi(level as i32);
        let estimate = half * h * sum;
        let magnitude = half * h * sum_abs;
        if level > 0 {
            let diff = (estimate - prev).abs();
            result = Panel {
                value: estimate,
                magnitude,
                abs_error: diff,
                converged: false,
            };
            if level >= MIN_LEVEL && diff <= rel_tol * magnitude {
                result.converged = true;
                return result;
            }
            if magnitude == 0.0 && level >= MIN_LEVEL {
                result.converged = true;
                return result;
            }
        }
        prev = estimate;
    }
    result
}

/// Sum of tanh-sinh panels over `[lo, hi]` split at the given points.
pub(crate) fn integrate_split<F>(lo: f64, hi: f64, breaks: &[f64], rel_tol: f64, f: F) -> (QuadratureResult, bool)
where
    F: Fn(&Abscissa) -> f64,
{
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&r| r > lo && r < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    let mut value = 0.0;
    let mut magnitude = 0.0;
    let mut err = 0.0;
    let mut converged = true;
    let mut panels = 0;
    for w in edges.windows(2) {
        let panel = tanh_sinh(w[0], w[1], rel_tol, &f);
        value += panel.value;
        magnitude += panel.magnitude;
        err += panel.abs_error;
        converged &= panel.converged;
        panels += 1;
    }
    let rel = if magnitude > 0.0 { err / magnitude } else { 0.0 };
    (
        QuadratureResult {
            value,
            estimated_rel_error: rel,
            panels,
        },
        converged,
    )
}

/// A real function with known zeros, integrable panel by panel.
pub trait Integrand {
    fn eval_at(&self, at: &Abscissa) -> f64;

    /// Zeros of the function; `|f|^p` may have a cusp there.
    fn zeros(&self) -> Vec<f64>;

    /// Interior points where `|f|` may attain a local maximum.
    fn sup_candidates(&self) -> Vec<f64>;

    fn eval(&self, x: f64) -> f64 {
        self.eval_at(&Abscissa {
            x,
            lo: f64::NAN,
            hi: f64::NAN,
            from_lo: f64::NAN,
            from_hi: f64::NAN,
        })
    }
}

impl Integrand for MonicPolynomial {
    #[inline]
    fn eval_at(&self, at: &Abscissa) -> f64 {
        self.roots().iter().map(|&r| at.minus(r)).product()
    }

    fn zeros(&self) -> Vec<f64> {
        self.roots().to_vec()
    }

    fn sup_candidates(&self) -> Vec<f64> {
        self.critical_points()
    }
}

/// `factor * f`, e.g. to check that norms are absolutely homogeneous.
#[derive(Debug, Clone, Copy)]
pub struct Scaled<'a, F> {
    pub factor: f64,
    pub inner: &'a F,
}

impl<F: Integrand> Integrand for Scaled<'_, F> {
    fn eval_at(&self, at: &Abscissa) -> f64 {
        self.factor * self.inner.eval_at(at)
    }

    fn zeros(&self) -> Vec<f64> {
        self.inner.zeros()
    }

    fn sup_candidates(&self) -> Vec<f64> {
        self.inner.sup_candidates()
    }
}

fn check_tol(rel_tol: f64) -> Result<()> {
    if (MIN_REL_TOL..=MAX_REL_TOL).contains(&rel_tol) {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(rel_tol))
    }
}

/// `max |f|` over `I`, from the endpoints and the interior candidates.
pub fn sup_norm<F: Integrand + ?Sized>(f: &F, interval: &Interval) -> f64 {
    let (a, b) = (interval.a(), interval.b());
    f.sup_candidates()
        .into_iter()
        .filter(|&c| c > a && c < b)
        .chain([a, b])
        .map(|x| f.eval(x).abs())
        .fold(0.0, f64::max)
}

fn power_integral<F: Integrand + ?Sized>(
    f: &F,
    interval: &Interval,
    p: f64,
    scale: f64,
    rel_tol: f64,
) -> (QuadratureResult, bool) {
    let inv = 1.0 / scale;
    integrate_split(interval.a(), interval.b(), &f.zeros(), rel_tol, |at| {
        (f.eval_at(at) * inv).abs().powf(p)
    })
}

/// `int_I |f|^p` without the `1/p` root.
pub fn lp_norm_p_power<F: Integrand + ?Sized>(
    f: &F,
    interval: &Interval,
    p: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    check_tol(rel_tol)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidP(p));
    }
    let (r, ok) = power_integral(f, interval, p, 1.0, rel_tol);
    if ok {
        Ok(r)
    } else {
        Err(Error::ToleranceNotReached { best: r })
    }
}

/// `||f||_p` on `I`. Finite `p` integrates `|f / M|^p` with `M = max |f|`
/// so that large exponents neither underflow nor overflow.
pub fn lp_norm<F: Integrand + ?Sized>(f: &F, interval: &Interval, p: PNorm, rel_tol: f64) -> Result<QuadratureResult> {
    check_tol(rel_tol)?;
    let sup = sup_norm(f, interval);
    match p {
        PNorm::Infinity => Ok(QuadratureResult {
            value: sup,
            estimated_rel_error: 0.0,
            panels: f.sup_candidates().len() + 2,
        }),
        PNorm::Finite(p) => {
            if sup == 0.0 {
                return Ok(QuadratureResult {
                    value: 0.0,
                    estimated_rel_error: 0.0,
                    panels: 0,
                });
            }
            let (r, ok) = power_integral(f, interval, p, sup, rel_tol);
            let out = QuadratureResult {
                value: sup * r.value.powf(1.0 / p),
                estimated_rel_error: r.estimated_rel_error / p,
                panels: r.panels,
            };
            if ok {
                Ok(out)
            } else {
                Err(Error::ToleranceNotReached { best: out })
            }
        }
    }
}

/// `int_{-1}^{1} |Q(t)|^p (1 - t^2)^(-1/2) dt`, computed as
/// `int_0^pi |Q(cos u)|^p du` with panels split at `acos` of the roots.
pub fn weighted_chebyshev_norm(q: &MonicPolynomial, p: f64, rel_tol: f64) -> Result<QuadratureResult> {
    check_tol(rel_tol)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidP(p));
    }
    let angles: Vec<(f64, Option<f64>)> = q
        .roots()
        .iter()
        .map(|&r| (r, (-1.0..=1.0).contains(&r).then(|| r.acos())))
        .collect();
    let breaks: Vec<f64> = angles.iter().filter_map(|&(_, u)| u).collect();
    let (r, ok) = integrate_split(0.0, PI, &breaks, rel_tol, |at| {
        let u = at.x();
        let c = u.cos();
        angles
            .iter()
            .map(|&(r, ur)| match ur.and_then(|ur| at.offset_from(ur).map(|d| (ur, d))) {
                // cos(u) - cos(ur) = -2 sin(ur + d/2) sin(d/2)
                Some((ur, d)) => -2.0 * (ur + 0.5 * d).sin() * (0.5 * d).sin(),
                None => c - r,
            })
            .product::<f64>()
            .abs()
            .powf(p)
    });
    if ok {
        Ok(r)
    } else {
        Err(Error::ToleranceNotReached { best: r })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::ClassicalFamily;
    use approx::assert_relative_eq;

    const TOL: f64 = DEFAULT_REL_TOL;

    fn x() -> MonicPolynomial {
        MonicPolynomial::from_roots(vec![0.0])
    }

    #[test]
    fn pnorm_parsing() {
        assert_eq!("inf".parse::<PNorm>().unwrap(), PNorm::Infinity);
        assert_eq!("2".parse::<PNorm>().unwrap(), PNorm::Finite(2.0));
        assert_eq!(PNorm::Infinity.to_string(), "inf");
        assert_eq!(PNorm::Finite(0.5).to_string(), "0.5");
        assert!("0".parse::<PNorm>().is_err());
        assert!("-1".parse::<PNorm>().is_err());
        assert!("nan".parse::<PNorm>().is_err());
        assert!("abc".parse::<PNorm>().is_err());
        assert_eq!(PNorm::Infinity.reciprocal(), 0.0);
    }

    #[test]
    fn norm_of_x_on_symmetric_interval() {
        let c = Interval::canonical();
        for p in [0.1, 0.25, 0.5, 1.0, 2.0, 3.5, 16.0, 64.0] {
            let got = lp_norm(&x(), &c, PNorm::Finite(p), TOL).unwrap().value;
            let want = (2.0 / (p + 1.0)).powf(1.0 / p);
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
        assert_relative_eq!(
            lp_norm(&x(), &c, PNorm::Finite(2.0), TOL).unwrap().value,
            0.816_496_580_927_726,
            max_relative = 1e-13
        );
    }

    #[test]
    fn classical_norm_values() {
        let c = Interval::canonical();
        let u2 = MonicPolynomial::from_roots(vec![-0.5, 0.5]);
        assert_relative_eq!(
            lp_norm(&u2, &c, PNorm::Finite(1.0), TOL).unwrap().value,
            0.5,
            max_relative = 1e-12
        );
        let t2 = ClassicalFamily::ChebyshevFirst.monic(2);
        assert_relative_eq!(
            lp_norm(&t2, &c, PNorm::Infinity, TOL).unwrap().value,
            0.5,
            max_relative = 1e-14
        );
        let t3 = ClassicalFamily::ChebyshevFirst.monic(3);
        assert_relative_eq!(
            lp_norm(&t3, &c, PNorm::Infinity, TOL).unwrap().value,
            0.25,
            max_relative = 1e-14
        );
    }

    #[test]
    fn p_power_examples() {
        let half = MonicPolynomial::from_roots(vec![0.5]);
        let got = lp_norm_p_power(&half, &Interval::unit(), 2.0, TOL).unwrap().value;
        assert_relative_eq!(got, 1.0 / 12.0, max_relative = 1e-13);
        // (t - 1/2)^n, |.|^p integrates to 2 (1/2)^(np+1) / (np+1)
        for (n, p) in [(3usize, 0.3), (4, 1.7), (2, 5.0)] {
            let q = MonicPolynomial::from_roots(vec![0.5; n]);
            let np = n as f64 * p;
            let want = 2.0 * 0.5f64.powf(np + 1.0) / (np + 1.0);
            let got = lp_norm_p_power(&q, &Interval::unit(), p, TOL).unwrap().value;
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
        assert_relative_eq!(
            lp_norm_p_power(&x(), &Interval::canonical(), 1.0, TOL).unwrap().value,
            1.0,
            max_relative = 1e-13
        );
        let leg = MonicPolynomial::from_roots(vec![-(1.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()]);
        let got = lp_norm_p_power(&leg, &Interval::canonical(), 2.0, TOL).unwrap().value;
        assert_relative_eq!(got, 8.0 / 45.0, max_relative = 1e-12);
    }

    #[test]
    fn rescaled_norm_follows_length_law() {
        let got = lp_norm(
            &x().rescale(&Interval::canonical(), &Interval::unit()),
            &Interval::unit(),
            PNorm::Finite(2.0),
            TOL,
        )
        .unwrap()
        .value;
        assert_relative_eq!(got, (2.0f64 / 3.0).sqrt() * 0.5f64.powf(1.5), max_relative = 1e-13);
        assert_relative_eq!(got, 0.288_675_134_594_812_9, max_relative = 1e-13);
    }

    #[test]
    fn weighted_chebyshev() {
        let one = MonicPolynomial::from_roots(vec![]);
        assert_relative_eq!(
            weighted_chebyshev_norm(&one, 1.0, TOL).unwrap().value,
            PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            weighted_chebyshev_norm(&x(), 2.0, TOL).unwrap().value,
            FRAC_PI_2,
            max_relative = 1e-13
        );
        // T_n = 2^(n-1) * monic; int_0^pi |cos nu|^p du does not depend on n.
        for p in [0.3, 0.75, 2.5] {
            let base = weighted_chebyshev_norm(&x(), p, TOL).unwrap().value;
            for n in 2..=7 {
                let monic = weighted_chebyshev_norm(&ClassicalFamily::ChebyshevFirst.monic(n), p, TOL)
                    .unwrap()
                    .value;
                let tn = monic * 2f64.powf((n as f64 - 1.0) * p);
                assert_relative_eq!(tn, base, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn scaling_is_absolute_homogeneity() {
        let q = ClassicalFamily::Legendre.monic(5);
        let c = Interval::canonical();
        for p in [PNorm::Finite(0.5), PNorm::Finite(3.0), PNorm::Infinity] {
            let base = lp_norm(&q, &c, p, TOL).unwrap().value;
            for factor in [2.0, 10.0, -10.0] {
                let s = Scaled { factor, inner: &q };
                let v = lp_norm(&s, &c, p, TOL).unwrap().value;
                assert_relative_eq!(v, factor.abs() * base, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn norm_increases_with_p_on_unit_interval() {
        let q = MonicPolynomial::from_roots(vec![0.1, 0.35, 0.8]);
        let u = Interval::unit();
        let vals: Vec<f64> = [0.5, 1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&p| lp_norm(&q, &u, PNorm::Finite(p), TOL).unwrap().value)
            .collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]), "{vals:?}");
    }

    #[test]
    fn large_p_approaches_sup_norm() {
        let c = Interval::canonical();
        // n = 1 is 5.3% below the sup norm: (2/65)^(1/64) = 0.94706
        let x64 = lp_norm(&x(), &c, PNorm::Finite(64.0), TOL).unwrap().value;
        assert_relative_eq!(x64, 0.947_058_535_310_976_2, max_relative = 1e-13);
        for n in 2..=8 {
            let t = ClassicalFamily::ChebyshevFirst.monic(n);
            let sup = lp_norm(&t, &c, PNorm::Infinity, TOL).unwrap().value;
            let p64 = lp_norm(&t, &c, PNorm::Finite(64.0), TOL).unwrap().value;
            assert!((p64 - sup).abs() <= 0.05 * sup, "n={n}: {p64} vs {sup}");
        }
    }

    #[test]
    fn halving_tolerance_stays_within_error_estimate() {
        let q = MonicPolynomial::from_roots(vec![-0.7, -0.1, 0.4, 0.9]);
        let c = Interval::canonical();
        for p in [0.3, 1.0, 2.5] {
            let coarse = lp_norm_p_power(&q, &c, p, 1e-6).unwrap();
            let fine = lp_norm_p_power(&q, &c, p, 5e-7).unwrap();
            assert!((coarse.value - fine.value).abs() <= coarse.estimated_rel_error * coarse.value + 1e-15);
        }
    }

    #[test]
    fn tolerance_is_validated() {
        let c = Interval::canonical();
        assert!(matches!(
            lp_norm(&x(), &c, PNorm::Finite(1.0), 1e-16),
            Err(Error::InvalidTolerance(_))
        ));
        assert!(matches!(
            lp_norm(&x(), &c, PNorm::Finite(1.0), 1e-2),
            Err(Error::InvalidTolerance(_))
        ));
    }

    #[test]
    fn sup_norm_uses_interior_extrema() {
        // (x - 0.2)(x - 0.8) on [0, 1]: interior minimum -0.09 at 0.5, endpoints 0.16
        let q = MonicPolynomial::from_roots(vec![0.2, 0.8]);
        assert_relative_eq!(sup_norm(&q, &Interval::unit()), 0.16, max_relative = 1e-14);
        assert_relative_eq!(
            sup_norm(&q, &Interval::new(0.3, 0.7).unwrap()),
            0.09,
            max_relative = 1e-13
        );
    }
}
