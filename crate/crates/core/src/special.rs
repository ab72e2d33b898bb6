//! Factorials and related products in floating point.

/// Largest `n` whose factorial is formed as an exact product; above it the
/// log-gamma route is used.
pub const EXACT_FACTORIAL_MAX: u32 = 18;

/// `ln n!`.
pub fn ln_factorial(n: u32) -> f64 {
    if n <= EXACT_FACTORIAL_MAX {
        factorial(n).ln()
    } else {
        libm::lgamma(f64::from(n) + 1.0)
    }
}

/// `n!` as a double.
pub fn factorial(n: u32) -> f64 {
    if n <= EXACT_FACTORIAL_MAX {
        (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
    } else {
        libm::lgamma(f64::from(n) + 1.0).exp()
    }
}

/// `(2n)! / (n!)^2 / 4^n`, the central binomial coefficient scaled by `4^-n`,
/// as the product `prod (2j-1)/(2j)`.
pub fn scaled_central_binomial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, j| {
        let j = f64::from(j);
        acc * (2.0 * j - 1.0) / (2.0 * j)
    })
}
