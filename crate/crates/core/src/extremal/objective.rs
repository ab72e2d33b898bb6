//! The norm of `x^e prod (x^2 - y_i)` on `[-1, 1]` as a function of the
//! squared roots `y`, scaled by `2^(n-1)` so that values stay of order one.
//!
//! Even integrands are folded onto `[0, 1]`.

use crate::polynomials::MonicPolynomial;
use crate::quadrature::{integrate_split, Abscissa, PNorm};

#[derive(Debug, Clone)]
pub(crate) struct SymmetricObjective {
    pub n: usize,
    pub p: PNorm,
    pub rel_tol: f64,
}

impl SymmetricObjective {
    pub fn new(n: usize, p: PNorm, rel_tol: f64) -> Self {
        Self { n, p, rel_tol }
    }

    fn odd(&self) -> bool {
        self.n % 2 == 1
    }

    /// `2^(n-1) Q(t)`, with each factor `x^2 - y` formed as `(t - x)(t + x)`.
    #[inline]
    fn scaled_value(&self, at: &Abscissa, xs: &[f64]) -> f64 {
        let t = at.x();
        let mut v = if self.odd() { 2.0 * at.minus(0.0) } else { 1.0 };
        for &x in xs {
            v *= 4.0 * at.minus(x) * (t + x);
        }
        0.5 * v
    }

    /// The scale `2^(n-1)` applied to `Q`.
    pub fn scale(&self) -> f64 {
        2f64.powi(self.n as i32 - 1)
    }

    pub fn roots_of(ys: &[f64]) -> Vec<f64> {
        ys.iter().map(|y| y.max(0.0).sqrt()).collect()
    }

    /// `int_{-1}^{1} |2^(n-1) Q|^p` for finite `p`, `max |2^(n-1) Q|` for the
    /// sup norm.
    pub fn value(&self, ys: &[f64]) -> f64 {
        let xs = Self::roots_of(ys);
        match self.p {
            PNorm::Finite(p) => {
                let (r, _) = integrate_split(0.0, 1.0, &xs, self.rel_tol, |at| {
                    self.scaled_value(at, &xs).abs().powf(p)
                });
                2.0 * r.value
            }
            PNorm::Infinity => self.sup(&xs),
        }
    }

    fn full_polynomial(&self, xs: &[f64]) -> MonicPolynomial {
        let mut roots: Vec<f64> = xs.iter().flat_map(|&x| [-x, x]).collect();
        if self.odd() {
            roots.push(0.0);
        }
        MonicPolynomial::from_roots(roots)
    }

    fn sup(&self, xs: &[f64]) -> f64 {
        self.extrema(xs).into_iter().map(|(_, v)| v.abs()).fold(0.0, f64::max)
    }

    /// Abscissas in `[0, 1]` where `|Q|` has a local maximum (interior
    /// critical points plus `t = 1`), with the scaled values there.
    pub fn extrema(&self, xs: &[f64]) -> Vec<(f64, f64)> {
        let q = self.full_polynomial(xs);
        let s = self.scale();
        // Even degree: the origin is a critical point and the next ones lie
        // beyond the smallest positive root.
        let floor = if self.odd() {
            0.0
        } else {
            xs.first().copied().unwrap_or(0.0)
        };
        let mut pts: Vec<f64> = q
            .critical_points()
            .into_iter()
            .filter(|&c| c > floor && c < 1.0)
            .collect();
        if !self.odd() {
            pts.insert(0, 0.0);
        }
        pts.push(1.0);
        pts.into_iter().map(|t| (t, s * q.evaluate(t))).collect()
    }

    /// `d/dy_i int_{-1}^{1} |2^(n-1) Q|^p = -2p int_0^1 |2^(n-1) Q|^p / (t^2 - y_i)`.
    pub fn gradient(&self, ys: &[f64]) -> Vec<f64> {
        let PNorm::Finite(p) = self.p else {
            panic!("gradient needs a finite exponent");
        };
        let xs = Self::roots_of(ys);
        (0..xs.len())
            .map(|i| {
                let xi = xs[i];
                let (r, _) = integrate_split(0.0, 1.0, &xs, self.rel_tol, |at| {
                    let q = self.scaled_value(at, &xs);
                    let den = at.minus(xi) * (at.x() + xi);
                    q.abs().powf(p) / den
                });
                -2.0 * p * r.value
            })
            .collect()
    }

    /// Ripple mismatch between consecutive local maxima of `|Q|` on `[0, 1]`.
    /// Zero exactly at the equioscillating polynomial.
    pub fn ripple(&self, ys: &[f64]) -> Option<Vec<f64>> {
        let xs = Self::roots_of(ys);
        let ext = self.extrema(&xs);
        if ext.len() != xs.len() + 1 {
            return None;
        }
        Some(ext.windows(2).map(|w| w[0].1.abs() - w[1].1.abs()).collect())
    }
}
