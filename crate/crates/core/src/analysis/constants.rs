//! Explicit regret constants of z-HOO.

use crate::error::{Error, Result};

/// `gamma = 4 C L nu1 nu2^(-d) / ((1/rho)^(d+1) - 1) * (16 / (nu1^2 rho^2) + 9)`.
pub fn zhoo_gamma(c: f64, l: f64, nu1: f64, nu2: f64, rho: f64, d: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::invalid("rho", "must lie in (0, 1)"));
    }
    for (name, v) in [("c", c), ("l", l), ("nu1", nu1), ("nu2", nu2)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(name, "must be positive and finite"));
        }
    }
    if !(d >= 0.0) {
        return Err(Error::invalid("d", "must be non-negative"));
    }
    let lead = 4.0 * c * l * nu1 * nu2.powf(-d);
    let geometric = (1.0 / rho).powf(d + 1.0) - 1.0;
    Ok(lead / geometric * (16.0 / (nu1 * nu1 * rho * rho) + 9.0))
}

/// Closed form of the constant for `f = 1 - ||x||_inf^2` on `[0,1]^D` with
/// `nu1 = 4`, `rho = 4^(-1/D)`, `nu2 = 1/4`, `L = 2`, `d = 0`, `C = 128^(D/2)`:
/// `32 * 128^(D/2) / (4^(1/D) - 1) * (4^(2/D) + 9)`.
pub fn quadratic_sup_norm_gamma(dim: usize) -> Result<f64> {
    if dim == 0 {
        return Err(Error::invalid("dim", "must be positive"));
    }
    let d = dim as f64;
    Ok(32.0 * 128f64.powf(d / 2.0) / (4f64.powf(1.0 / d) - 1.0) * (4f64.powf(2.0 / d) + 9.0))
}
