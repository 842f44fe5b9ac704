//! Sample-based checks of weak Lipschitzness of `f` with respect to a
//! dissimilarity.

use serde::{Deserialize, Serialize};

use crate::arm::ArmPoint;
use crate::dissimilarity::Dissimilarity;
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Slack allowed on every inequality.
pub const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakLipschitzViolation {
    pub x: ArmPoint,
    pub y: ArmPoint,
    /// `f* - f(y)`.
    pub lhs: f64,
    /// The bound it exceeds.
    pub rhs: f64,
}

/// `count` pairs of independent uniform points of `[0,1]^dim`.
pub fn sample_pairs(dim: usize, count: usize, rng: &mut RngStream) -> Vec<(ArmPoint, ArmPoint)> {
    let point = |rng: &mut RngStream| ArmPoint::from_unchecked((0..dim).map(|_| rng.uniform()).collect());
    (0..count).map(|_| (point(rng), point(rng))).collect()
}

/// Pairs violating `f* - f(y) <= f* - f(x) + max(f* - f(x), l(x, y))`.
pub fn weak_lipschitz_violations(
    env: &dyn Environment,
    ell: &Dissimilarity,
    pairs: &[(ArmPoint, ArmPoint)],
) -> Result<Vec<WeakLipschitzViolation>> {
    let f_star = env.f_star();
    let mut out = Vec::new();
    for (x, y) in pairs {
        let gap_x = f_star - env.mean_payoff(x);
        let lhs = f_star - env.mean_payoff(y);
        let rhs = gap_x + gap_x.max(ell.eval(x.coords(), y.coords())?);
        if lhs > rhs + TOLERANCE {
            out.push(WeakLipschitzViolation {
                x: x.clone(),
                y: y.clone(),
                lhs,
                rhs,
            });
        }
    }
    Ok(out)
}

/// Parameters of the local form: for `x` with `f* - f(x) <= eps0` and
/// `eps` in `[0, eps0]`, the ball `B(x, f* - f(x) + eps)` lies in the
/// near-optimal set `X_{L (2 (f* - f(x)) + eps)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalWeakLipschitz {
    pub l: f64,
    pub eps0: f64,
}

impl LocalWeakLipschitz {
    pub fn new(l: f64, eps0: f64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::invalid("l", "must be positive and finite"));
        }
        if !(eps0 > 0.0) {
            return Err(Error::invalid("eps0", "must be positive"));
        }
        Ok(LocalWeakLipschitz { l, eps0 })
    }
}

/// Pairs violating the local form. Each pair is tested with the smallest
/// admissible `eps`, namely `max(0, l(x, y) - (f* - f(x)))`; pairs with `x`
/// outside `X_{eps0}` or needing `eps > eps0` carry no constraint.
pub fn local_weak_lipschitz_violations(
    env: &dyn Environment,
    ell: &Dissimilarity,
    params: LocalWeakLipschitz,
    pairs: &[(ArmPoint, ArmPoint)],
) -> Result<Vec<WeakLipschitzViolation>> {
    let f_star = env.f_star();
    let mut out = Vec::new();
    for (x, y) in pairs {
        let gap_x = f_star - env.mean_payoff(x);
        if gap_x > params.eps0 {
            continue;
        }
        let eps = (ell.eval(x.coords(), y.coords())? - gap_x).max(0.0);
        if eps > params.eps0 {
            continue;
        }
        let lhs = f_star - env.mean_payoff(y);
        let rhs = params.l * (2.0 * gap_x + eps);
        if lhs > rhs + TOLERANCE {
            out.push(WeakLipschitzViolation {
                x: x.clone(),
                y: y.clone(),
                lhs,
                rhs,
            });
        }
    }
    Ok(out)
}
