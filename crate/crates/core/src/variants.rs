//! Variants of HOO: truncated HOO for a known horizon, z-HOO which starts
//! its descents at a fixed depth, and local-HOO which restarts z-HOO on
//! regimes of doubling length.

use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::hoo::{CenterPicker, Descent, HooConfig, HooTree, PlayRecord, Selection, Strategy, Target, NONE};
use crate::partition::{CoverTree, NodeId, MAX_DEPTH};
use crate::rng::RngStream;

/// Depth cap of truncated HOO for horizon `n0`:
/// `ceil(((ln n0) / 2 - ln(1 / nu1)) / ln(1 / rho))`.
///
/// Requires `n0 > 1 / nu1^2`, which makes the cap at least one. A quotient
/// within `1e-9` (relative) of an integer is snapped to it before the
/// ceiling, so exact cases such as `n0 = 2^10, nu1 = 1, rho = 1/2` are not
/// pushed up by rounding in the logarithms.
pub fn truncated_depth(n0: u64, nu1: f64, rho: f64) -> Result<u32> {
    HooConfig::new(nu1, rho)?;
    if !((n0 as f64) > 1.0 / (nu1 * nu1)) {
        return Err(Error::invalid("horizon", format!("n0 = {n0} must exceed 1/nu1^2")));
    }
    let q = ((n0 as f64).ln() / 2.0 - (1.0 / nu1).ln()) / (1.0 / rho).ln();
    let nearest = q.round();
    let q = if (q - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest
    } else {
        q
    };
    let depth = q.ceil().max(1.0);
    if depth > MAX_DEPTH as f64 {
        return Err(Error::invalid("horizon", "depth cap exceeds the node index space"));
    }
    Ok(depth as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationConfig {
    pub horizon: u64,
    pub depth_cap: u32,
}

impl TruncationConfig {
    pub fn new(horizon: u64, config: &HooConfig) -> Result<Self> {
        Ok(Self {
            horizon,
            depth_cap: truncated_depth(horizon, config.nu1, config.rho)?,
        })
    }
}

/// HOO for a known horizon `n0`: `ln n` is replaced by `ln n0` and the tree
/// is cut at depth `D_{n0}`. Only the nodes on the chosen path change, so
/// each round costs `O(D_{n0})`.
#[derive(Debug, Clone)]
pub struct TruncatedHoo {
    tree: HooTree,
    truncation: TruncationConfig,
    log_term: f64,
    touched_total: u64,
    touched_last: usize,
}

impl TruncatedHoo {
    pub fn new(cover: CoverTree, config: HooConfig, horizon: u64) -> Result<Self> {
        let truncation = TruncationConfig::new(horizon, &config)?;
        Ok(Self {
            tree: HooTree::new(cover, config),
            truncation,
            log_term: (horizon as f64).ln(),
            touched_total: 0,
            touched_last: 0,
        })
    }

    pub fn truncation(&self) -> TruncationConfig {
        self.truncation
    }

    pub fn tree(&self) -> &HooTree {
        &self.tree
    }

    /// Node updates performed so far (one per path node per round).
    pub fn touched_total(&self) -> u64 {
        self.touched_total
    }

    /// Node updates performed in the last round.
    pub fn touched_last(&self) -> usize {
        self.touched_last
    }

    fn select(&self, rng: &mut RngStream) -> Descent {
        match self.tree.roots().first() {
            None => Descent {
                path: Vec::new(),
                target: Target::New {
                    id: NodeId::ROOT,
                    parent: NONE,
                    side: 0,
                },
            },
            Some(&root) => self.tree.descend(root, Some(self.truncation.depth_cap), rng),
        }
    }

    pub fn select_node(&self, rng: &mut RngStream) -> Selection {
        self.tree.selection_of(&self.select(rng))
    }

    pub fn play_round(&mut self, env: &dyn Environment, rng: &mut RngStream) -> PlayRecord {
        let descent = self.select(rng);
        let (played, record) = self.tree.apply(&descent, &CenterPicker, env, rng);
        let mut path = descent.path;
        if path.last() != Some(&played) {
            path.push(played);
        }
        for &slot in path.iter().rev() {
            self.tree.refresh_upper(slot, self.log_term);
            self.tree.refresh_bound(slot);
        }
        self.touched_last = path.len();
        self.touched_total += path.len() as u64;
        record
    }

    /// Full recomputation with `ln n0`, for cross-checking the path updates.
    pub fn recompute_all(&mut self) {
        self.tree.recompute_bounds_with_log(self.log_term);
    }
}

impl Strategy for TruncatedHoo {
    fn play_round(&mut self, env: &dyn Environment, rng: &mut RngStream) -> PlayRecord {
        TruncatedHoo::play_round(self, env, rng)
    }

    fn tree(&self) -> &HooTree {
        &self.tree
    }

    fn name(&self) -> &'static str {
        "truncated"
    }
}

/// HOO started at depth `z`: nodes above depth `z` are never played.
///
/// The first `2^z` rounds play each depth-`z` node once, in index order.
/// Afterwards a round starts at the depth-`z` node with the largest `B`
/// (uniform choice among exact ties) and descends as basic HOO.
#[derive(Debug, Clone)]
pub struct ZHoo {
    tree: HooTree,
}

impl ZHoo {
    pub fn new(cover: CoverTree, config: HooConfig, z: u32) -> Result<Self> {
        Ok(Self {
            tree: HooTree::with_start_depth(cover, config, z)?,
        })
    }

    pub fn z(&self) -> u32 {
        self.tree.start_depth()
    }

    pub fn tree(&self) -> &HooTree {
        &self.tree
    }

    #[cfg(test)]
    pub(crate) fn tree_mut(&mut self) -> &mut HooTree {
        &mut self.tree
    }

    fn select(&self, rng: &mut RngStream) -> Descent {
        let z = self.z();
        let roots = self.tree.roots();
        if (roots.len() as u128) < NodeId::width(z) {
            return Descent {
                path: Vec::new(),
                target: Target::New {
                    id: NodeId {
                        depth: z,
                        index: roots.len() as u128 + 1,
                    },
                    parent: NONE,
                    side: 0,
                },
            };
        }
        let best = roots
            .iter()
            .map(|&s| self.tree.stats_at(s).bound)
            .fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<u32> = roots
            .iter()
            .copied()
            .filter(|&s| self.tree.stats_at(s).bound == best)
            .collect();
        let start = if tied.len() == 1 {
            tied[0]
        } else {
            tied[rng.index(tied.len())]
        };
        self.tree.descend(start, None, rng)
    }

    pub fn select_node(&self, rng: &mut RngStream) -> Selection {
        self.tree.selection_of(&self.select(rng))
    }

    pub fn play_round(&mut self, env: &dyn Environment, rng: &mut RngStream) -> PlayRecord {
        let descent = self.select(rng);
        let (_, record) = self.tree.apply(&descent, &CenterPicker, env, rng);
        self.tree.recompute_bounds(record.round);
        record
    }
}

impl Strategy for ZHoo {
    fn play_round(&mut self, env: &dyn Environment, rng: &mut RngStream) -> PlayRecord {
        ZHoo::play_round(self, env, rng)
    }

    fn tree(&self) -> &HooTree {
        &self.tree
    }

    fn name(&self) -> &'static str {
        "zhoo"
    }
}

/// Regimes of local-HOO: regime `r >= 1` covers rounds `2^r - 1 ..= 2^(r+1) - 2`
/// and runs z-HOO with `z_r = ceil(log2 r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeSchedule;

impl RegimeSchedule {
    /// Regime containing round `t >= 1`.
    pub fn regime_of(t: u64) -> u32 {
        assert!(t >= 1, "rounds start at 1");
        63 - (t + 1).leading_zeros()
    }

    pub fn start(r: u32) -> u64 {
        (1u64 << r) - 1
    }

    pub fn len(r: u32) -> u64 {
        1u64 << r
    }

    pub fn end(r: u32) -> u64 {
        Self::start(r) + Self::len(r) - 1
    }

    /// `ceil(log2 r)`.
    pub fn depth(r: u32) -> u32 {
        assert!(r >= 1, "regimes start at 1");
        if r == 1 {
            0
        } else {
            32 - (r - 1).leading_zeros()
        }
    }
}

/// Doubling-trick wrapper around z-HOO. Each regime starts from a fresh tree.
#[derive(Debug, Clone)]
pub struct LocalHoo {
    cover: CoverTree,
    config: HooConfig,
    current: ZHoo,
    regime: u32,
    round: u64,
}

impl LocalHoo {
    pub fn new(cover: CoverTree, config: HooConfig) -> Self {
        Self {
            cover,
            config,
            current: ZHoo::new(cover, config, 0).expect("z = 0 is valid"),
            regime: 1,
            round: 0,
        }
    }

    pub fn regime(&self) -> u32 {
        self.regime
    }

    pub fn current(&self) -> &ZHoo {
        &self.current
    }

    pub fn play_round(&mut self, env: &dyn Environment, rng: &mut RngStream) -> PlayRecord {
        let t = self.round + 1;
        let r = RegimeSchedule::regime_of(t);
        if r != self.regime {
            self.current = ZHoo::new(self.cover, self.config, RegimeSchedule::depth(r))
                .expect("regime depth fits the index space");
            self.regime = r;
        }
        let mut record = self.current.play_round(env, rng);
        self.round = t;
        record.round = t;
        record
    }
}

impl Strategy for LocalHoo {
    fn play_round(&mut self, env: &dyn Environment, rng: &mut RngStream) -> PlayRecord {
        LocalHoo::play_round(self, env, rng)
    }

    fn tree(&self) -> &HooTree {
        self.current.tree()
    }

    fn name(&self) -> &'static str {
        "local"
    }
}

pub fn local_hoo_run(
    env: &dyn Environment,
    cover: CoverTree,
    config: HooConfig,
    horizon: u64,
    rng: &mut RngStream,
) -> Result<Vec<PlayRecord>> {
    if horizon == 0 {
        return Err(Error::invalid("horizon", "must be at least 1"));
    }
    let mut local = LocalHoo::new(cover, config);
    Ok((0..horizon).map(|_| local.play_round(env, rng)).collect())
}

/// Which strategy to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyKind {
    Basic,
    /// Truncated HOO tuned for the experiment horizon.
    Truncated,
    Zhoo {
        z: u32,
    },
    Local,
}

impl StrategyKind {
    pub fn label(&self) -> &'static str {
        match self {
            StrategyKind::Basic => "basic",
            StrategyKind::Truncated => "truncated",
            StrategyKind::Zhoo { .. } => "zhoo",
            StrategyKind::Local => "local",
        }
    }

    pub fn build(&self, cover: CoverTree, config: HooConfig, horizon: u64) -> Result<Box<dyn Strategy>> {
        Ok(match *self {
            StrategyKind::Basic => Box::new(HooTree::new(cover, config)),
            StrategyKind::Truncated => Box::new(TruncatedHoo::new(cover, config, horizon)?),
            StrategyKind::Zhoo { z } => Box::new(ZHoo::new(cover, config, z)?),
            StrategyKind::Local => Box::new(LocalHoo::new(cover, config)),
        })
    }
}
