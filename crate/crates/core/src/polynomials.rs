//! Monic polynomials in root form, the classical orthogonal families and
//! affine maps between intervals.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bounded segment `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Self { a, b })
        } else {
            Err(Error::InvalidInterval { a, b })
        }
    }

    /// `[-1, 1]`, where the extremal polynomials are symmetric.
    pub const fn canonical() -> Self {
        Self { a: -1.0, b: 1.0 }
    }

    /// `[0, 1]`, on which `C(n, p)` is defined.
    pub const fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    /// The increasing affine bijection `self -> to`, applied to `x`.
    pub fn map_to(&self, to: &Interval, x: f64) -> f64 {
        if x == self.a {
            return to.a;
        }
        if x == self.b {
            return to.b;
        }
        to.a + (x - self.a) * (to.length() / self.length())
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// A real monic polynomial `prod (x - x_j)` held by its roots.
///
/// Roots are kept sorted in increasing order. The empty root list is the
/// constant polynomial `1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonicPolynomial {
    roots: Vec<f64>,
}

impl MonicPolynomial {
    pub fn from_roots(mut roots: Vec<f64>) -> Self {
        assert!(roots.iter().all(|r| r.is_finite()), "non-finite root");
        roots.sort_by(f64::total_cmp);
        Self { roots }
    }

    /// The monomial `x^n`.
    pub fn power(n: usize) -> Self {
        Self::from_roots(vec![0.0; n])
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.roots.iter().map(|&r| x - r).product()
    }

    /// Value, first and second derivative, accumulated factor by factor.
    pub fn evaluate_with_derivatives(&self, x: f64) -> (f64, f64, f64) {
        let mut q = 1.0;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for &r in &self.roots {
            let t = x - r;
            d2 = d2 * t + 2.0 * d1;
            d1 = d1 * t + q;
            q *= t;
        }
        (q, d1, d2)
    }

    /// Coefficients in increasing powers; the last one is exactly `1`.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut c = vec![1.0];
        for &r in &self.roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= r * ci;
            }
            c = next;
        }
        c
    }

    /// Zeros of `Q'` that are not zeros of `Q`, one in each gap between
    /// consecutive distinct roots.
    ///
    /// On each gap the logarithmic derivative `sum 1/(x - x_j)` decreases
    /// strictly from `+inf` to `-inf`, so a safeguarded Newton iteration on it
    /// always finds the unique zero.
    pub fn critical_points(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for w in self.roots.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi > lo {
                out.push(self.log_derivative_zero(lo, hi));
            }
        }
        out
    }

    fn log_derivative_zero(&self, lo: f64, hi: f64) -> f64 {
        let phi = |x: f64| -> (f64, f64) {
            self.roots.iter().fold((0.0, 0.0), |(s, ds), &r| {
                let t = 1.0 / (x - r);
                (s + t, ds - t * t)
            })
        };
        let (mut a, mut b) = (lo, hi);
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (f, df) = phi(x);
            if f == 0.0 {
                return x;
            }
            if !f.is_finite() {
                break;
            }
            if f > 0.0 {
                a = x;
            } else {
                b = x;
            }
            let newton = x - f / df;
            let next = if newton > a && newton < b && df.is_finite() {
                newton
            } else {
                0.5 * (a + b)
            };
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                return next;
            }
            if b - a <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) {
                return 0.5 * (a + b);
            }
            x = next;
        }
        x
    }

    /// Roots carried through the increasing affine map `from -> to`.
    ///
    /// For finite `p` the norms obey `||P_to||_p = s^(n + 1/p) ||P_from||_p`
    /// with `s = |to| / |from|`.
    pub fn rescale(&self, from: &Interval, to: &Interval) -> MonicPolynomial {
        MonicPolynomial::from_roots(self.roots.iter().map(|&r| from.map_to(to, r)).collect())
    }
}

/// The positive roots `0 < x_1 < ... < x_k <= 1` of a polynomial
/// `x^e prod (x^2 - x_i^2)` of degree `n = 2k + e`, odd or even like `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricRootVector {
    n: usize,
    positive_roots: Vec<f64>,
}

impl SymmetricRootVector {
    pub fn new(n: usize, positive_roots: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidRoots("degree must be positive".into()));
        }
        if positive_roots.len() != n / 2 {
            return Err(Error::InvalidRoots(format!(
                "degree {n} needs {} positive roots, got {}",
                n / 2,
                positive_roots.len()
            )));
        }
        if positive_roots.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
            return Err(Error::InvalidRoots("positive roots must lie in (0, 1]".into()));
        }
        if positive_roots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidRoots("positive roots must be strictly increasing".into()));
        }
        Ok(Self { n, positive_roots })
    }

    /// From squared roots `y_i = x_i^2`, without validation.
    pub(crate) fn from_squares_unchecked(n: usize, squares: &[f64]) -> Self {
        Self {
            n,
            positive_roots: squares.iter().map(|y| y.max(0.0).sqrt()).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Number of positive roots, `floor(n / 2)`.
    pub fn k(&self) -> usize {
        self.n / 2
    }

    /// `1` for odd degree (root at the origin), `0` for even.
    pub fn epsilon(&self) -> usize {
        self.n % 2
    }

    pub fn positive_roots(&self) -> &[f64] {
        &self.positive_roots
    }

    pub fn squares(&self) -> Vec<f64> {
        self.positive_roots.iter().map(|x| x * x).collect()
    }

    pub fn expand(&self) -> MonicPolynomial {
        let mut roots = Vec::with_capacity(self.n);
        for &x in &self.positive_roots {
            roots.push(-x);
            roots.push(x);
        }
        if self.epsilon() == 1 {
            roots.push(0.0);
        }
        MonicPolynomial::from_roots(roots)
    }

    /// Largest coordinate distance to another root vector of the same degree.
    pub fn distance(&self, other: &SymmetricRootVector) -> f64 {
        self.positive_roots
            .iter()
            .zip(&other.positive_roots)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A polynomial in coefficient form, increasing powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap_or(&0.0)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn scaled(&self, c: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|v| v * c).collect())
    }

    /// `x * self`.
    fn shift_up(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(0.0);
        v.extend_from_slice(&self.coeffs);
        v
    }
}

/// Three-term recurrence `p_{n+1} = (alpha x p_n - beta p_{n-1}) / gamma`.
fn recurrence(n: usize, p0: Vec<f64>, p1: Vec<f64>, step: impl Fn(usize) -> (f64, f64, f64)) -> Polynomial {
    if n == 0 {
        return Polynomial::new(p0);
    }
    let mut prev = Polynomial::new(p0);
    let mut cur = Polynomial::new(p1);
    for m in 1..n {
        let (alpha, beta, gamma) = step(m);
        let mut next = cur.shift_up();
        for c in next.iter_mut() {
            *c *= alpha;
        }
        for (i, &c) in prev.coeffs.iter().enumerate() {
            next[i] -= beta * c;
        }
        for c in next.iter_mut() {
            *c /= gamma;
        }
        prev = cur;
        cur = Polynomial::new(next);
    }
    cur
}

/// Chebyshev polynomial of the first kind, `T_n(cos t) = cos nt`.
pub fn chebyshev_t(n: usize) -> Polynomial {
    recurrence(n, vec![1.0], vec![0.0, 1.0], |_| (2.0, 1.0, 1.0))
}

/// Chebyshev polynomial of the second kind, `U_n(cos t) = sin((n+1)t) / sin t`.
pub fn chebyshev_u(n: usize) -> Polynomial {
    recurrence(n, vec![1.0], vec![0.0, 2.0], |_| (2.0, 1.0, 1.0))
}

/// Legendre polynomial via Bonnet's recurrence.
pub fn legendre_p(n: usize) -> Polynomial {
    recurrence(n, vec![1.0], vec![0.0, 1.0], |m| {
        let m = m as f64;
        (2.0 * m + 1.0, m, m + 1.0)
    })
}

/// `P_n(x)` and `P_n'(x)` without forming coefficients.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for m in 1..n {
        let m = m as f64;
        let p2 = ((2.0 * m + 1.0) * x * p1 - m * p0) / (m + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// The three classical families whose monic forms solve the `p = inf`,
/// `p = 1` and `p = 2` problems on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassicalFamily {
    ChebyshevFirst,
    ChebyshevSecond,
    Legendre,
}

impl ClassicalFamily {
    pub fn polynomial(self, n: usize) -> Polynomial {
        match self {
            Self::ChebyshevFirst => chebyshev_t(n),
            Self::ChebyshevSecond => chebyshev_u(n),
            Self::Legendre => legendre_p(n),
        }
    }

    /// The factor that makes the degree-`n` member monic: `2^(1-n)`,
    /// `2^-n` and `2^n (n!)^2 / (2n)!` respectively.
    pub fn monic_factor(self, n: usize) -> f64 {
        match self {
            Self::ChebyshevFirst if n == 0 => 1.0,
            Self::ChebyshevFirst => 2f64.powi(1 - n as i32),
            Self::ChebyshevSecond => 2f64.powi(-(n as i32)),
            Self::Legendre => (1..=n).fold(1.0, |acc, j| acc * j as f64 / (2 * j - 1) as f64),
        }
    }

    pub fn monic_coefficients(self, n: usize) -> Polynomial {
        self.polynomial(n).scaled(self.monic_factor(n))
    }

    /// The positive roots in increasing order.
    pub fn positive_roots(self, n: usize) -> Vec<f64> {
        let k = n / 2;
        let nf = n as f64;
        // j = 1 is the largest root in each node formula.
        let mut roots: Vec<f64> = (1..=k)
            .map(|j| {
                let j = j as f64;
                match self {
                    Self::ChebyshevFirst => ((2.0 * j - 1.0) * PI / (2.0 * nf)).cos(),
                    Self::ChebyshevSecond => (j * PI / (nf + 1.0)).cos(),
                    Self::Legendre => {
                        let mut x = (PI * (j - 0.25) / (nf + 0.5)).cos();
                        for _ in 0..100 {
                            let (p, dp) = legendre_with_derivative(n, x);
                            let dx = p / dp;
                            x -= dx;
                            if dx.abs() <= 1e-16 {
                                break;
                            }
                        }
                        x
                    }
                }
            })
            .collect();
        roots.reverse();
        roots
    }

    pub fn symmetric_roots(self, n: usize) -> SymmetricRootVector {
        SymmetricRootVector {
            n,
            positive_roots: self.positive_roots(n),
        }
    }

    pub fn monic(self, n: usize) -> MonicPolynomial {
        self.symmetric_roots(n).expand()
    }
}
