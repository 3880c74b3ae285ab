//! Log-factorials and the factorial ratios built from them.
//!
//! Every coefficient of the form `sqrt(alpha^k * m! / n!)` is assembled as a
//! single exponent and exponentiated once, so nothing overflows before the
//! ratio is taken. `n!` itself leaves the f64 range at `n = 171`.

use std::sync::OnceLock;

const TABLE_LEN: usize = 171;

fn table() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; TABLE_LEN];
        let mut fact = 1.0_f64;
        for (n, slot) in out.iter_mut().enumerate().skip(1) {
            fact *= n as f64;
            *slot = fact.ln();
        }
        out
    })
}

/// `ln(n!)`.
///
/// Tabulated below 171, Stirling series with five correction terms above
/// (truncation error below 1e-19 there).
pub fn ln_factorial(n: usize) -> f64 {
    if n < TABLE_LEN {
        return table()[n];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2
                * (1.0 / 360.0
                    - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

/// `ln C(n, k)`; `k <= n` is the caller's responsibility.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}
