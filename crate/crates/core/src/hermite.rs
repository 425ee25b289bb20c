//! Hermite polynomials, normalized Hermite functions and generalized Laguerre
//! polynomials.
//!
//! Physicists' convention throughout: `H_0 = 1`, `H_1 = 2x`,
//! `H_{k+1} = 2x H_k - 2k H_{k-1}`, orthogonal under the weight `e^{-x^2}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Values `H_0(x) ..= H_{n_max}(x)` by the three-term recurrence.
///
/// Fails with [`Error::HermiteOverflow`] once a value leaves the finite `f64`
/// range; [`hermite_functions`] is the scaled variant that never overflows.
pub fn hermite_values(n_max: usize, x: f64) -> Result<Vec<f64>> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("x must be finite, got {x}")));
    }
    let mut h = Vec::with_capacity(n_max + 1);
    h.push(1.0);
    if n_max >= 1 {
        h.push(2.0 * x);
    }
    for k in 1..n_max {
        let next = 2.0 * x * h[k] - 2.0 * k as f64 * h[k - 1];
        if !next.is_finite() {
            return Err(Error::HermiteOverflow { n: k + 1, x });
        }
        h.push(next);
    }
    Ok(h)
}

/// Normalized Hermite functions
/// `psi_n(x) = H_n(x) e^{-x^2/2} / (pi^{1/4} 2^{n/2} sqrt(n!))`, `n = 0..=n_max`.
///
/// These are the position-space Fock wavefunctions. The recurrence
/// `psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}` keeps every
/// intermediate of order one, so no factorials or powers of two appear.
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut psi = Vec::with_capacity(n_max + 1);
    hermite_functions_into(x, n_max, &mut psi);
    psi
}

/// Same as [`hermite_functions`], writing into a reusable buffer.
pub fn hermite_functions_into(x: f64, n_max: usize, out: &mut Vec<f64>) {
    out.clear();
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n_max >= 1 {
        out.push(std::f64::consts::SQRT_2 * x * out[0]);
    }
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
}

/// Generalized Laguerre polynomial `L_n^{(alpha)}(x)` by upward recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
