//! Bandit environments over `[0,1]^D`.
//!
//! Every environment exposes its mean-payoff function `f`, the supremum `f*`
//! and a reward sampler. All built-in environments pay Bernoulli rewards with
//! success probability `f(x)`.

use serde::{Deserialize, Serialize};

use crate::arm::ArmPoint;
use crate::dissimilarity::Dissimilarity;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Maximum of `(sin(13x) sin(27x) + 1) / 2` on `[0, 1]`, rounded up at the
/// 12th significant digit. Reproduced by `garland_maximum_oracle` in the tests.
pub const GARLAND_F_STAR: f64 = 0.975599143812;

/// Location of the garland maximum (reported for reference only).
/// The maximum is flat, so only about eight digits are meaningful.
pub const GARLAND_ARGMAX: f64 = 0.86752621;

pub trait Environment: Send + Sync {
    fn dimension(&self) -> usize;

    fn mean_payoff(&self, x: &ArmPoint) -> f64;

    fn f_star(&self) -> f64;

    fn label(&self) -> &str;

    /// Draws one reward in `[0, 1]` for arm `x`.
    fn sample_reward(&self, x: &ArmPoint, rng: &mut RngStream) -> f64 {
        rng.bernoulli(self.mean_payoff(x))
    }
}

pub fn garland(x: f64) -> f64 {
    0.5 * ((13.0 * x).sin() * (27.0 * x).sin() + 1.0)
}

/// One-dimensional garland function with many local maxima.
#[derive(Debug, Clone, Default)]
pub struct Garland;

pub fn make_garland_env() -> Garland {
    Garland
}

impl Environment for Garland {
    fn dimension(&self) -> usize {
        1
    }

    fn mean_payoff(&self, x: &ArmPoint) -> f64 {
        garland(x.coords()[0])
    }

    fn f_star(&self) -> f64 {
        GARLAND_F_STAR
    }

    fn label(&self) -> &str {
        "garland"
    }
}

/// Norm used by [`NormPower`] environments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvNorm {
    Supremum,
    /// Euclidean norm divided by `sqrt(D)`, so the unit cube has norm at most one.
    NormalizedEuclidean,
}

/// `f(x) = 1 - |x|^a`, maximized at the origin.
#[derive(Debug, Clone)]
pub struct NormPower {
    dimension: usize,
    exponent: f64,
    norm: EnvNorm,
}

pub fn make_norm_power_env(dimension: usize, exponent: f64, norm: EnvNorm) -> Result<NormPower> {
    if dimension == 0 {
        return Err(Error::invalid("dimension", "must be at least 1"));
    }
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::invalid("exponent", format!("must be positive, got {exponent}")));
    }
    Ok(NormPower {
        dimension,
        exponent,
        norm,
    })
}

impl NormPower {
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn norm(&self) -> EnvNorm {
        self.norm
    }

    fn norm_of(&self, x: &[f64]) -> f64 {
        match self.norm {
            EnvNorm::Supremum => x.iter().fold(0.0, |m, c| m.max(c.abs())),
            EnvNorm::NormalizedEuclidean => (x.iter().map(|c| c * c).sum::<f64>() / self.dimension as f64).sqrt(),
        }
    }
}

impl Environment for NormPower {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn mean_payoff(&self, x: &ArmPoint) -> f64 {
        1.0 - self.norm_of(x.coords()).powf(self.exponent)
    }

    fn f_star(&self) -> f64 {
        1.0
    }

    fn label(&self) -> &str {
        "norm_pow"
    }
}

/// `f(x) = 1/2 + max(0, eta - l(x, center))`: flat at one half with a single
/// bump of height `eta`. One-Lipschitz with respect to `l`.
#[derive(Debug, Clone)]
pub struct Bump {
    center: ArmPoint,
    eta: f64,
    ell: Dissimilarity,
}

pub fn make_bump_env(center: ArmPoint, eta: f64, ell: Dissimilarity) -> Result<Bump> {
    if !(eta > 0.0 && eta < 0.5) {
        return Err(Error::invalid("eta", format!("must lie in (0, 1/2), got {eta}")));
    }
    if !ell.is_metric() {
        return Err(Error::UnsupportedDissimilarity("bump environment (needs a metric)"));
    }
    Ok(Bump { center, eta, ell })
}

impl Bump {
    pub fn center(&self) -> &ArmPoint {
        &self.center
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn dissimilarity(&self) -> &Dissimilarity {
        &self.ell
    }
}

impl Environment for Bump {
    fn dimension(&self) -> usize {
        self.center.dim()
    }

    fn mean_payoff(&self, x: &ArmPoint) -> f64 {
        let d = self
            .ell
            .eval(x.coords(), self.center.coords())
            .expect("arm dimension matches the environment");
        0.5 + (self.eta - d).max(0.0)
    }

    fn f_star(&self) -> f64 {
        0.5 + self.eta
    }

    fn label(&self) -> &str {
        "bump"
    }
}

/// Serializable description of a built-in environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "label", rename_all = "snake_case")]
pub enum EnvSpec {
    Garland,
    NormPow {
        dim: usize,
        exponent: f64,
        norm: EnvNorm,
    },
    Bump {
        center: Vec<f64>,
        eta: f64,
        dissimilarity: Dissimilarity,
    },
}

impl EnvSpec {
    pub fn label(&self) -> &'static str {
        match self {
            EnvSpec::Garland => "garland",
            EnvSpec::NormPow { .. } => "norm_pow",
            EnvSpec::Bump { .. } => "bump",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            EnvSpec::Garland => 1,
            EnvSpec::NormPow { dim, .. } => *dim,
            EnvSpec::Bump { center, .. } => center.len(),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Environment>> {
        Ok(match self {
            EnvSpec::Garland => Box::new(make_garland_env()),
            EnvSpec::NormPow { dim, exponent, norm } => Box::new(make_norm_power_env(*dim, *exponent, *norm)?),
            EnvSpec::Bump {
                center,
                eta,
                dissimilarity,
            } => Box::new(make_bump_env(ArmPoint::new(center.clone())?, *eta, *dissimilarity)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(c: &[f64]) -> ArmPoint {
        ArmPoint::new(c.to_vec()).unwrap()
    }

    /// Golden-section search for a maximum of a unimodal function on `[lo, hi]`.
    fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut a = hi - g * (hi - lo);
        let mut b = lo + g * (hi - lo);
        let (mut fa, mut fb) = (f(a), f(b));
        for _ in 0..200 {
            if fa < fb {
                lo = a;
                a = b;
                fa = fb;
                b = lo + g * (hi - lo);
                fb = f(b);
            } else {
                hi = b;
                b = a;
                fb = fa;
                a = hi - g * (hi - lo);
                fa = f(a);
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn garland_maximum_oracle() {
        let n = 1_000_000;
        let (best_k, _) = (0..=n)
            .map(|k| (k, garland(k as f64 / n as f64)))
            .fold((0, f64::MIN), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
        let h = 1.0 / n as f64;
        let x = golden_max(garland, best_k as f64 * h - h, best_k as f64 * h + h);
        let fmax = garland(x);
        assert!(GARLAND_F_STAR >= fmax);
        assert!(GARLAND_F_STAR - fmax < 1e-12, "f* = {fmax:.15}");
        assert!((x - GARLAND_ARGMAX).abs() < 1e-7, "argmax = {x:.15}");
    }

    #[test]
    fn garland_values() {
        let env = make_garland_env();
        assert_eq!(env.mean_payoff(&pt(&[0.0])), 0.5);
        let direct = 0.5 * ((6.5f64).sin() * (13.5f64).sin() + 1.0);
        assert_relative_eq!(env.mean_payoff(&pt(&[0.5])), direct, max_relative = 1e-15);
        assert_relative_eq!(env.mean_payoff(&pt(&[0.5])), 0.58646, epsilon = 1e-5);
    }

    #[test]
    fn garland_rewards_are_binary() {
        let env = make_garland_env();
        let mut rng = RngStream::new(1, 0);
        for k in 0..1000 {
            let y = env.sample_reward(&pt(&[k as f64 / 999.0]), &mut rng);
            assert!(y == 0.0 || y == 1.0);
        }
    }

    #[test]
    fn norm_power_values() {
        let env = make_norm_power_env(2, 2.0, EnvNorm::Supremum).unwrap();
        assert_eq!(env.mean_payoff(&pt(&[0.0, 0.0])), 1.0);
        assert_eq!(env.mean_payoff(&pt(&[0.5, 0.25])), 0.75);
        let line = make_norm_power_env(1, 1.0, EnvNorm::Supremum).unwrap();
        assert_eq!(line.mean_payoff(&pt(&[1.0])), 0.0);
        let euc = make_norm_power_env(3, 1.0, EnvNorm::NormalizedEuclidean).unwrap();
        assert_relative_eq!(euc.mean_payoff(&pt(&[1.0, 1.0, 1.0])), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn norm_power_rejects_bad_exponent() {
        assert!(make_norm_power_env(1, 0.0, EnvNorm::Supremum).is_err());
        assert!(make_norm_power_env(1, -2.0, EnvNorm::Supremum).is_err());
        assert!(make_norm_power_env(0, 1.0, EnvNorm::Supremum).is_err());
    }

    #[test]
    fn bump_values() {
        let env = make_bump_env(pt(&[0.3]), 0.1, Dissimilarity::abs()).unwrap();
        assert_relative_eq!(env.mean_payoff(&pt(&[0.3])), 0.6, max_relative = 1e-15);
        assert_relative_eq!(env.mean_payoff(&pt(&[0.35])), 0.55, max_relative = 1e-12);
        assert_eq!(env.mean_payoff(&pt(&[0.8])), 0.5);
        assert_eq!(env.mean_payoff(&pt(&[0.4])), 0.5);
        assert_relative_eq!(env.f_star(), 0.6);
    }

    #[test]
    fn bump_rejects_bad_eta_and_non_metric() {
        let c = pt(&[0.3]);
        assert!(make_bump_env(c.clone(), 0.0, Dissimilarity::abs()).is_err());
        assert!(make_bump_env(c.clone(), 0.5, Dissimilarity::abs()).is_err());
        let sq = Dissimilarity::supremum(2.0, 1.0).unwrap();
        assert!(make_bump_env(c, 0.1, sq).is_err());
    }

    fn builtin_envs() -> Vec<Box<dyn Environment>> {
        vec![
            Box::new(make_garland_env()),
            Box::new(make_norm_power_env(1, 2.0, EnvNorm::Supremum).unwrap()),
            Box::new(make_norm_power_env(2, 2.0, EnvNorm::Supremum).unwrap()),
            Box::new(make_norm_power_env(2, 1.0, EnvNorm::NormalizedEuclidean).unwrap()),
            Box::new(make_bump_env(pt(&[0.3]), 0.1, Dissimilarity::abs()).unwrap()),
            Box::new(make_bump_env(pt(&[0.7, 0.2]), 0.25, Dissimilarity::euclidean(1.0, 1.0).unwrap()).unwrap()),
        ]
    }

    #[test]
    fn payoffs_bounded_by_f_star_on_grid() {
        for env in builtin_envs() {
            let d = env.dimension();
            let per_axis: usize = if d == 1 { 10_000 } else { 100 };
            let total = per_axis.pow(d as u32);
            for k in 0..total {
                let mut rem = k;
                let coords: Vec<f64> = (0..d)
                    .map(|_| {
                        let c = rem % per_axis;
                        rem /= per_axis;
                        c as f64 / (per_axis - 1) as f64
                    })
                    .collect();
                let v = env.mean_payoff(&ArmPoint::new(coords).unwrap());
                assert!((0.0..=env.f_star()).contains(&v), "{}: {v}", env.label());
                assert!(env.f_star() <= 1.0);
            }
        }
    }

    #[test]
    fn bernoulli_empirical_mean_matches_payoff() {
        // 4 sigma band; a false alarm has probability below 1e-4 per arm.
        let env = make_garland_env();
        let mut rng = RngStream::new(2024, 5);
        let n = 100_000;
        for x in [0.1, 0.5, 0.8675] {
            let arm = pt(&[x]);
            let p = env.mean_payoff(&arm);
            let mean = (0..n).map(|_| env.sample_reward(&arm, &mut rng)).sum::<f64>() / n as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((mean - p).abs() <= 4.0 * sigma, "x={x}: {mean} vs {p}");
        }
    }

    #[test]
    fn reward_sequences_reproduce() {
        let env = make_garland_env();
        let draw = || {
            let mut rng = RngStream::new(99, 4);
            (0..500)
                .map(|k| env.sample_reward(&pt(&[(k % 17) as f64 / 16.0]), &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn bump_is_one_lipschitz() {
        let ell = Dissimilarity::euclidean(1.0, 1.0).unwrap();
        let env = make_bump_env(pt(&[0.4, 0.6]), 0.3, ell).unwrap();
        let mut rng = RngStream::new(3, 0);
        for _ in 0..10_000 {
            let x = pt(&[rng.uniform(), rng.uniform()]);
            let y = pt(&[rng.uniform(), rng.uniform()]);
            let lhs = (env.mean_payoff(&x) - env.mean_payoff(&y)).abs();
            assert!(lhs <= ell.eval(x.coords(), y.coords()).unwrap() + 1e-12);
        }
    }

    #[test]
    fn env_spec_labels_and_build() {
        let specs = [
            EnvSpec::Garland,
            EnvSpec::NormPow {
                dim: 2,
                exponent: 2.0,
                norm: EnvNorm::Supremum,
            },
            EnvSpec::Bump {
                center: vec![0.3],
                eta: 0.1,
                dissimilarity: Dissimilarity::abs(),
            },
        ];
        for s in &specs {
            let env = s.build().unwrap();
            assert_eq!(env.label(), s.label());
            assert_eq!(env.dimension(), s.dimension());
        }
        let bad = EnvSpec::Bump {
            center: vec![0.3],
            eta: 0.7,
            dissimilarity: Dissimilarity::abs(),
        };
        assert!(bad.build().is_err());
    }
}
