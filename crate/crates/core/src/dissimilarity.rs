//! Dissimilarities on the arm space.
//!
//! A dissimilarity is a nonnegative map with `l(x, x) = 0`; it need not be
//! symmetric or satisfy the triangle inequality. Two families are provided:
//! powers of a norm, `b * |x - y|^a`, and the dissimilarity induced by the
//! dyadic tree of coverings on `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of binary digits used by the tree-induced dissimilarity. Terms past
/// this depth fall below `rho^64` and are dropped.
const TREE_DIGITS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    Euclidean,
    Supremum,
}

impl Norm {
    pub fn of(self, v: impl IntoIterator<Item = f64>) -> f64 {
        match self {
            Norm::Euclidean => v.into_iter().map(|c| c * c).sum::<f64>().sqrt(),
            Norm::Supremum => v.into_iter().fold(0.0, |m, c| m.max(c.abs())),
        }
    }

    pub fn distance(self, x: &[f64], y: &[f64]) -> f64 {
        self.of(x.iter().zip(y).map(|(a, b)| a - b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dissimilarity {
    /// `scale * |x - y|^exponent` for the given norm.
    NormPower { norm: Norm, exponent: f64, scale: f64 },
    /// `(1 - rho) nu1 * sum_h 1{x_h != y_h} rho^h` over the dyadic digits of
    /// one-dimensional points.
    TreeInduced { nu1: f64, rho: f64 },
}

impl Dissimilarity {
    pub fn norm_power(norm: Norm, exponent: f64, scale: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::invalid("exponent", "must be positive"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid("scale", "must be positive"));
        }
        Ok(Dissimilarity::NormPower { norm, exponent, scale })
    }

    pub fn euclidean(exponent: f64, scale: f64) -> Result<Self> {
        Self::norm_power(Norm::Euclidean, exponent, scale)
    }

    pub fn supremum(exponent: f64, scale: f64) -> Result<Self> {
        Self::norm_power(Norm::Supremum, exponent, scale)
    }

    /// Absolute difference on the line.
    pub fn abs() -> Self {
        Dissimilarity::NormPower {
            norm: Norm::Supremum,
            exponent: 1.0,
            scale: 1.0,
        }
    }

    pub fn tree_induced(nu1: f64, rho: f64) -> Result<Self> {
        if !(nu1 > 0.0) {
            return Err(Error::invalid("nu1", "must be positive"));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::invalid("rho", "must lie in (0, 1)"));
        }
        Ok(Dissimilarity::TreeInduced { nu1, rho })
    }

    /// True when the dissimilarity is a metric: norm powers with exponent at most one.
    pub fn is_metric(&self) -> bool {
        matches!(self, Dissimilarity::NormPower { exponent, .. } if *exponent <= 1.0)
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        match *self {
            Dissimilarity::NormPower { norm, exponent, scale } => Ok(scale * norm.distance(x, y).powf(exponent)),
            Dissimilarity::TreeInduced { nu1, rho } => {
                if x.len() != 1 {
                    return Err(Error::UnsupportedDissimilarity(
                        "tree-induced dissimilarity beyond one dimension",
                    ));
                }
                Ok(tree_induced(x[0], y[0], nu1, rho))
            }
        }
    }

    /// Norm radius of the open `l`-ball of radius `eps`, for norm powers.
    pub fn norm_radius(&self, eps: f64) -> Result<(Norm, f64)> {
        match *self {
            Dissimilarity::NormPower { norm, exponent, scale } => Ok((norm, (eps / scale).powf(1.0 / exponent))),
            Dissimilarity::TreeInduced { .. } => Err(Error::UnsupportedDissimilarity(
                "ball geometry of the tree-induced dissimilarity",
            )),
        }
    }
}

/// Free-function form of [`Dissimilarity::eval`].
pub fn eval_dissimilarity(ell: &Dissimilarity, x: &[f64], y: &[f64]) -> Result<f64> {
    ell.eval(x, y)
}

/// Digit `h` of the path of `x` through the dyadic tree: whether `x` falls in
/// the upper child at depth `h + 1`. Cells are half-open except at 1.
fn dyadic_digit(x: f64, h: u32) -> bool {
    let cells = 2f64.powi(h as i32 + 1);
    let k = (x * cells).floor().min(cells - 1.0);
    k % 2.0 == 1.0
}

fn tree_induced(x: f64, y: f64, nu1: f64, rho: f64) -> f64 {
    let mut total = 0.0;
    let mut weight = 1.0;
    for h in 0..TREE_DIGITS {
        if dyadic_digit(x, h) != dyadic_digit(y, h) {
            total += weight;
        }
        weight *= rho;
    }
    (1.0 - rho) * nu1 * total
}
