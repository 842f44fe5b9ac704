//! Greedy packing numbers on grids and the near-optimality dimension
//! estimator built on them.
//!
//! A packing of a set `A` at scale `eps` is a family of disjoint open
//! `l`-balls of radius `eps` centred in `A` and contained in `A` (and in the
//! cube). For norm-power dissimilarities the balls are norm balls, so two of
//! them are disjoint exactly when their centres are at least twice the norm
//! radius apart. The greedy packing scans candidate centres in grid order,
//! keeps every admissible one and is maximal but not necessarily maximum:
//! its size is a lower bound on the packing number of the grid set. When no
//! ball fits, the count is reported as 1.

use serde::{Deserialize, Serialize};

use crate::arm::ArmPoint;
use crate::dissimilarity::{Dissimilarity, Norm};
use crate::env::Environment;
use crate::error::{Error, Result};

use super::regret::least_squares;

const TOL: f64 = 1e-12;

/// A subset of the regular grid `{0, 1/m, ..., 1}^D`. Axis 0 varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSet {
    dim: usize,
    intervals: usize,
    member: Vec<bool>,
    len: usize,
}

impl GridSet {
    fn check_shape(dim: usize, intervals: usize) -> Result<usize> {
        if dim == 0 {
            return Err(Error::invalid("dim", "must be positive"));
        }
        if intervals == 0 {
            return Err(Error::invalid("intervals", "must be positive"));
        }
        (intervals + 1)
            .checked_pow(dim as u32)
            .filter(|&n| n <= 1 << 28)
            .ok_or_else(|| Error::invalid("intervals", "grid too large"))
    }

    /// Every grid point.
    pub fn full(dim: usize, intervals: usize) -> Result<Self> {
        let n = Self::check_shape(dim, intervals)?;
        Ok(GridSet {
            dim,
            intervals,
            member: vec![true; n],
            len: n,
        })
    }

    /// Grid points satisfying `keep`.
    pub fn from_fn(dim: usize, intervals: usize, mut keep: impl FnMut(&[f64]) -> bool) -> Result<Self> {
        let n = Self::check_shape(dim, intervals)?;
        let mut x = vec![0.0; dim];
        let mut member = Vec::with_capacity(n);
        for k in 0..n {
            fill_point(k, dim, intervals, &mut x);
            member.push(keep(&x));
        }
        let len = member.iter().filter(|&&m| m).count();
        Ok(GridSet {
            dim,
            intervals,
            member,
            len,
        })
    }

    /// The near-optimal set `{x : f(x) >= f* - delta}` on the grid.
    pub fn sublevel(env: &dyn Environment, delta: f64, intervals: usize) -> Result<Self> {
        let f_star = env.f_star();
        Self::from_fn(env.dimension(), intervals, |x| {
            env.mean_payoff(&ArmPoint::from_unchecked(x.to_vec())) >= f_star - delta - TOL
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> f64 {
        1.0 / self.intervals as f64
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len == self.member.len()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.member.iter().enumerate().filter(|(_, &m)| m).map(|(k, _)| {
            let mut x = vec![0.0; self.dim];
            fill_point(k, self.dim, self.intervals, &mut x);
            x
        })
    }

    /// True when every grid point inside the open norm ball lies in the set.
    fn contains_ball(&self, x: &[f64], norm: Norm, radius: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let m = self.intervals as f64;
        let ranges: Vec<(usize, usize)> = x
            .iter()
            .map(|&c| {
                let lo = ((c - radius) * m).ceil().max(0.0) as usize;
                let hi = (((c + radius) * m).floor() as usize).min(self.intervals);
                (lo, hi)
            })
            .collect();
        let mut digits: Vec<usize> = ranges.iter().map(|r| r.0).collect();
        let mut y = vec![0.0; self.dim];
        loop {
            let mut k = 0;
            for (j, &d) in digits.iter().enumerate() {
                y[j] = d as f64 / m;
                k = k * (self.intervals + 1) + d;
            }
            if norm.distance(x, &y) < radius && !self.member[k] {
                return false;
            }
            let mut j = self.dim;
            loop {
                if j == 0 {
                    return true;
                }
                j -= 1;
                if digits[j] < ranges[j].1 {
                    digits[j] += 1;
                    break;
                }
                digits[j] = ranges[j].0;
            }
        }
    }
}

fn fill_point(mut k: usize, dim: usize, intervals: usize, x: &mut [f64]) {
    for j in (0..dim).rev() {
        x[j] = (k % (intervals + 1)) as f64 / intervals as f64;
        k /= intervals + 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingEstimate {
    pub radius: f64,
    pub count: usize,
    pub method: String,
    pub resolution: f64,
    /// Centres of the greedy packing (empty when no ball fits).
    #[serde(skip)]
    pub centres: Vec<Vec<f64>>,
}

/// Greedy packing of `set` by open `ell`-balls of radius `eps`.
pub fn packing_number(set: &GridSet, ell: &Dissimilarity, eps: f64) -> Result<PackingEstimate> {
    if set.is_empty() {
        return Err(Error::Empty("candidate set"));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid("eps", "must be positive and finite"));
    }
    let (norm, radius) = ell.norm_radius(eps)?;
    let gap = 2.0 * radius - TOL * (2.0 * radius).max(1.0);
    let mut centres: Vec<Vec<f64>> = Vec::new();
    for x in set.points() {
        let inside_cube = x.iter().all(|&c| c - radius >= -TOL && c + radius <= 1.0 + TOL);
        if !inside_cube {
            continue;
        }
        if centres.iter().any(|c| norm.distance(&x, c) < gap) {
            continue;
        }
        if set.contains_ball(&x, norm, radius) {
            centres.push(x);
        }
    }
    Ok(PackingEstimate {
        radius: eps,
        count: centres.len().max(1),
        method: "greedy-grid".into(),
        resolution: set.resolution(),
        centres,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearOptimalityEstimate {
    /// Regression slope of `ln N` against `ln(1/eps)`, floored at zero.
    pub slope: f64,
    pub raw_slope: f64,
    pub c: f64,
    pub estimates: Vec<PackingEstimate>,
    /// All packing counts were equal; the slope is reported as zero.
    pub degenerate: bool,
    /// Every near-optimal set was the whole grid, so the slope measures the
    /// packing dimension of the space rather than a near-optimality dimension.
    pub whole_space: bool,
}

fn check_ladder(eps_list: &[f64]) -> Result<()> {
    if eps_list.len() < 4 {
        return Err(Error::invalid("eps_list", "need at least four scales"));
    }
    if eps_list.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::invalid("eps_list", "scales must be positive and finite"));
    }
    let ratio = eps_list[1] / eps_list[0];
    let geometric = eps_list
        .windows(2)
        .all(|w| ((w[1] / w[0]) - ratio).abs() <= 1e-9 * ratio);
    if !geometric || (ratio - 1.0).abs() < 1e-9 {
        return Err(Error::invalid(
            "eps_list",
            "scales must form a non-constant geometric ladder",
        ));
    }
    Ok(())
}

/// Estimates the `c`-near-optimality dimension of `env` with respect to
/// `ell` by regressing `ln N(X_{c eps}, ell, eps)` on `ln(1/eps)` over a
/// geometric ladder of scales.
pub fn near_optimality_dimension_estimate(
    env: &dyn Environment,
    ell: &Dissimilarity,
    c: f64,
    eps_list: &[f64],
    intervals: usize,
) -> Result<NearOptimalityEstimate> {
    check_ladder(eps_list)?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::invalid("c", "must be positive and finite"));
    }
    let f_star = env.f_star();
    let values: Vec<f64> = GridSet::full(env.dimension(), intervals)?
        .points()
        .map(|x| env.mean_payoff(&ArmPoint::from_unchecked(x)))
        .collect();
    let mut estimates = Vec::with_capacity(eps_list.len());
    let mut whole_space = true;
    for &eps in eps_list {
        let mut k = 0;
        let set = GridSet::from_fn(env.dimension(), intervals, |_| {
            k += 1;
            values[k - 1] >= f_star - c * eps - TOL
        })?;
        whole_space &= set.is_full();
        estimates.push(packing_number(&set, ell, eps)?);
    }
    let degenerate = estimates.windows(2).all(|w| w[0].count == w[1].count);
    let xs: Vec<f64> = eps_list.iter().map(|e| -e.ln()).collect();
    let ys: Vec<f64> = estimates.iter().map(|p| (p.count as f64).ln()).collect();
    let raw_slope = if degenerate { 0.0 } else { least_squares(&xs, &ys).0 };
    Ok(NearOptimalityEstimate {
        slope: raw_slope.max(0.0),
        raw_slope,
        c,
        estimates,
        degenerate,
        whole_space,
    })
}
