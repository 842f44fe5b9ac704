//! The basic HOO strategy.
//!
//! The tree is an arena: nodes are appended in the order they are first
//! played, so every parent sits at a lower slot than its children and one
//! reverse sweep over the arena visits children before parents. Statistics
//! live in parallel vectors indexed by slot; the per-round sweep touches only
//! those.
//!
//! After each round every in-tree node gets
//!
//! ```text
//! U = mean + sqrt(2 ln n / T) + nu1 rho^h
//! B = min(U, max(B_left, B_right))      (absent children count as +inf)
//! ```
//!
//! and selection walks from the root towards the child with the larger `B`
//! until it leaves the tree. The node it lands on is played at the centre of
//! its region (or wherever an [`ArmPicker`] says) and inserted.

use serde::{Deserialize, Serialize};

use crate::arm::ArmPoint;
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::partition::{CoverTree, NodeId, Region, MAX_DEPTH};
use crate::rng::RngStream;

pub(crate) const NONE: u32 = u32::MAX;

/// Tuning of the optimistic bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HooConfig {
    pub nu1: f64,
    pub rho: f64,
}

impl HooConfig {
    pub fn new(nu1: f64, rho: f64) -> Result<Self> {
        if !(nu1 > 0.0 && nu1.is_finite()) {
            return Err(Error::invalid("nu1", format!("must be positive, got {nu1}")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::invalid("rho", format!("must lie in (0, 1), got {rho}")));
        }
        Ok(Self { nu1, rho })
    }

    /// `nu1 rho^depth`, the diameter allowance of a depth-`depth` cell.
    pub fn depth_term(&self, depth: u32) -> f64 {
        self.nu1 * self.rho.powi(depth as i32)
    }
}

/// `U`-value of a node played `count` times out of `n` rounds; `+inf` while unplayed.
pub fn u_value(mean: f64, count: u64, n: u64, config: &HooConfig, depth: u32) -> f64 {
    if count == 0 {
        return f64::INFINITY;
    }
    mean + (2.0 * (n as f64).ln() / count as f64).sqrt() + config.depth_term(depth)
}

/// `B = min(U, max(B_left, B_right))`.
pub fn b_value(u: f64, left: f64, right: f64) -> f64 {
    u.min(left.max(right))
}

/// Snapshot of one node's statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeStats {
    pub count: u64,
    /// Empirical mean; meaningless while `count == 0` (see [`NodeStats::mean`]).
    pub mean: f64,
    pub upper: f64,
    pub bound: f64,
}

impl NodeStats {
    pub const UNPLAYED: NodeStats = NodeStats {
        count: 0,
        mean: f64::NAN,
        upper: f64::INFINITY,
        bound: f64::INFINITY,
    };

    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then_some(self.mean)
    }
}

/// One round of play.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayRecord {
    pub round: u64,
    pub node: NodeId,
    pub arm: ArmPoint,
    pub reward: f64,
}

/// Result of a descent: the node to play and the nodes visited on the way
/// (the last entry is the node itself).
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub node: NodeId,
    pub path: Vec<NodeId>,
}

/// Chooses the arm to play inside the region of the selected node.
pub trait ArmPicker {
    fn pick(&self, region: &Region, rng: &mut RngStream) -> ArmPoint;
}

/// Plays the centre of the region.
#[derive(Debug, Clone, Copy, Default)]
pub struct CenterPicker;

impl ArmPicker for CenterPicker {
    fn pick(&self, region: &Region, _rng: &mut RngStream) -> ArmPoint {
        region.center()
    }
}

/// Plays a uniformly random point of the region.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformPicker;

impl ArmPicker for UniformPicker {
    fn pick(&self, region: &Region, rng: &mut RngStream) -> ArmPoint {
        ArmPoint::from_unchecked(
            region
                .lower()
                .iter()
                .zip(region.upper())
                .map(|(lo, hi)| lo + (hi - lo) * rng.uniform())
                .collect(),
        )
    }
}

/// Where a descent ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Target {
    /// A node outside the tree; `parent` is `NONE` for a start-depth node.
    New { id: NodeId, parent: u32, side: usize },
    /// An in-tree node at the depth cap.
    Existing(u32),
}

#[derive(Debug, Clone)]
pub(crate) struct Descent {
    /// In-tree slots visited, from the start node down.
    pub path: Vec<u32>,
    pub target: Target,
}

/// The tree grown by HOO, together with its statistics.
#[derive(Debug, Clone)]
pub struct HooTree {
    cover: CoverTree,
    config: HooConfig,
    start_depth: u32,
    ids: Vec<NodeId>,
    regions: Vec<Region>,
    parent: Vec<u32>,
    children: Vec<[u32; 2]>,
    count: Vec<u64>,
    mean: Vec<f64>,
    /// `mean + nu1 rho^h`, refreshed whenever the mean changes.
    shift: Vec<f64>,
    inv_sqrt_count: Vec<f64>,
    upper: Vec<f64>,
    /// `B` of slot `s` at position `s + 1`; position 0 holds `+inf` and stands
    /// for every absent child.
    bound: Vec<f64>,
    /// Positions in `bound` of each slot's children (0 when absent).
    child_keys: Vec<[u32; 2]>,
    /// Start-depth nodes in the tree. They are inserted in index order, so
    /// `roots[k]` holds index `k + 1`.
    roots: Vec<u32>,
    rounds: u64,
}

impl HooTree {
    pub fn new(cover: CoverTree, config: HooConfig) -> Self {
        Self::with_start_depth(cover, config, 0).expect("depth 0 is always valid")
    }

    /// Tree whose plays never go above `start_depth` (the z-HOO forest).
    pub fn with_start_depth(cover: CoverTree, config: HooConfig, start_depth: u32) -> Result<Self> {
        if start_depth >= MAX_DEPTH {
            return Err(Error::invalid(
                "z",
                format!("2^{start_depth} start nodes exceed the node index space"),
            ));
        }
        Ok(Self {
            cover,
            config,
            start_depth,
            ids: Vec::new(),
            regions: Vec::new(),
            parent: Vec::new(),
            children: Vec::new(),
            count: Vec::new(),
            mean: Vec::new(),
            shift: Vec::new(),
            inv_sqrt_count: Vec::new(),
            upper: Vec::new(),
            bound: vec![f64::INFINITY],
            child_keys: Vec::new(),
            roots: Vec::new(),
            rounds: 0,
        })
    }

    pub fn cover(&self) -> &CoverTree {
        &self.cover
    }

    pub fn config(&self) -> &HooConfig {
        &self.config
    }

    pub fn start_depth(&self) -> u32 {
        self.start_depth
    }

    /// Number of nodes in the tree.
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Rounds played so far.
    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn max_depth(&self) -> Option<u32> {
        self.ids.iter().map(|id| id.depth).max()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.find(id).is_some()
    }

    pub fn stats(&self, id: NodeId) -> NodeStats {
        self.find(id).map_or(NodeStats::UNPLAYED, |slot| self.stats_at(slot))
    }

    pub fn region(&self, id: NodeId) -> Option<&Region> {
        self.find(id).map(|slot| &self.regions[slot as usize])
    }

    /// In-tree nodes in insertion order.
    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, NodeStats)> + '_ {
        (0..self.ids.len()).map(|s| (self.ids[s], self.stats_at(s as u32)))
    }

    /// In-tree children of `id`.
    pub fn children_in_tree(&self, id: NodeId) -> Vec<NodeId> {
        self.find(id)
            .map(|slot| {
                self.children[slot as usize]
                    .iter()
                    .filter(|c| **c != NONE)
                    .map(|c| self.ids[*c as usize])
                    .collect()
            })
            .unwrap_or_default()
    }

    pub(crate) fn stats_at(&self, slot: u32) -> NodeStats {
        let s = slot as usize;
        NodeStats {
            count: self.count[s],
            mean: self.mean[s],
            upper: self.upper[s],
            bound: self.bound[s + 1],
        }
    }

    pub(crate) fn roots(&self) -> &[u32] {
        &self.roots
    }

    pub(crate) fn find(&self, id: NodeId) -> Option<u32> {
        let top = id.ancestor_at(self.start_depth)?;
        let mut slot = *self.roots.get(usize::try_from(top.index - 1).ok()?)?;
        for step in (0..id.depth - self.start_depth).rev() {
            let side = ((id.index - 1) >> step) & 1;
            slot = self.children[slot as usize][side as usize];
            if slot == NONE {
                return None;
            }
        }
        Some(slot)
    }

    fn child_bound(&self, child: u32) -> f64 {
        if child == NONE {
            f64::INFINITY
        } else {
            self.bound[child as usize + 1]
        }
    }

    /// Walks down from `start` (an in-tree slot) following the larger `B`,
    /// flipping a fair coin on exact ties. Stops on the first node outside
    /// the tree, or on an in-tree node at `depth_cap`.
    pub(crate) fn descend(&self, start: u32, depth_cap: Option<u32>, rng: &mut RngStream) -> Descent {
        let mut path = vec![start];
        let mut slot = start;
        loop {
            let id = self.ids[slot as usize];
            if depth_cap == Some(id.depth) {
                return Descent {
                    path,
                    target: Target::Existing(slot),
                };
            }
            let [l, r] = self.children[slot as usize];
            let (bl, br) = (self.child_bound(l), self.child_bound(r));
            let side = if bl > br {
                0
            } else if bl < br {
                1
            } else if rng.coin() {
                0
            } else {
                1
            };
            let next = if side == 0 { l } else { r };
            if next == NONE {
                let child = if side == 0 { id.left() } else { id.right() };
                return Descent {
                    path,
                    target: Target::New {
                        id: child,
                        parent: slot,
                        side,
                    },
                };
            }
            path.push(next);
            slot = next;
        }
    }

    /// Algorithm selection from the root: the root itself while the tree is
    /// empty, otherwise a descent.
    pub(crate) fn select_basic(&self, rng: &mut RngStream) -> Descent {
        debug_assert_eq!(self.start_depth, 0);
        match self.roots.first() {
            None => Descent {
                path: Vec::new(),
                target: Target::New {
                    id: NodeId::ROOT,
                    parent: NONE,
                    side: 0,
                },
            },
            Some(&root) => self.descend(root, None, rng),
        }
    }

    pub(crate) fn selection_of(&self, descent: &Descent) -> Selection {
        let mut path: Vec<NodeId> = descent.path.iter().map(|s| self.ids[*s as usize]).collect();
        let node = match descent.target {
            Target::New { id, .. } => {
                path.push(id);
                id
            }
            Target::Existing(slot) => self.ids[slot as usize],
        };
        Selection { node, path }
    }

    /// Picks the node to play next without changing the tree.
    pub fn select_node(&self, rng: &mut RngStream) -> Selection {
        assert_eq!(self.start_depth, 0, "select_node descends from the root");
        let descent = self.select_basic(rng);
        self.selection_of(&descent)
    }

    /// Region of the descent target.
    pub(crate) fn target_region(&self, target: Target) -> Region {
        match target {
            Target::Existing(slot) => self.regions[slot as usize].clone(),
            Target::New { id, parent, side } => {
                if parent == NONE {
                    self.cover.region_of(id).expect("start node is valid")
                } else {
                    let (lo, hi) = self.regions[parent as usize].split();
                    if side == 0 {
                        lo
                    } else {
                        hi
                    }
                }
            }
        }
    }

    /// Adds a fresh node (counters zero, bounds infinite) and returns its slot.
    pub(crate) fn insert(&mut self, target: Target, region: Region) -> u32 {
        let Target::New { id, parent, side } = target else {
            unreachable!("insert called on an existing node");
        };
        let slot = u32::try_from(self.ids.len()).expect("tree size fits in u32");
        assert!(slot != NONE, "tree size fits in u32");
        self.ids.push(id);
        self.regions.push(region);
        self.parent.push(parent);
        self.children.push([NONE, NONE]);
        self.count.push(0);
        self.mean.push(0.0);
        self.shift.push(0.0);
        self.inv_sqrt_count.push(f64::INFINITY);
        self.upper.push(f64::INFINITY);
        self.bound.push(f64::INFINITY);
        self.child_keys.push([0, 0]);
        if parent == NONE {
            debug_assert_eq!(id.index, self.roots.len() as u128 + 1);
            self.roots.push(slot);
        } else {
            self.children[parent as usize][side] = slot;
            self.child_keys[parent as usize][side] = slot + 1;
        }
        slot
    }

    /// Counts the reward at `slot`: `T += 1`, `mean += (Y - mean) / T`.
    pub(crate) fn record(&mut self, slot: u32, reward: f64) {
        let s = slot as usize;
        let t = self.count[s] + 1;
        self.count[s] = t;
        let tf = t as f64;
        self.mean[s] = (1.0 - 1.0 / tf) * self.mean[s] + reward / tf;
        self.inv_sqrt_count[s] = 1.0 / tf.sqrt();
        self.shift[s] = self.mean[s] + self.config.depth_term(self.ids[s].depth);
    }

    /// Refreshes `U` at one slot using `log_term = ln n`.
    pub(crate) fn refresh_upper(&mut self, slot: u32, log_term: f64) -> f64 {
        let s = slot as usize;
        let u = self.shift[s] + (2.0 * log_term).sqrt() * self.inv_sqrt_count[s];
        self.upper[s] = u;
        u
    }

    /// `B` at one slot from its current `U` and its children.
    pub(crate) fn refresh_bound(&mut self, slot: u32) {
        let s = slot as usize;
        let [l, r] = self.child_keys[s];
        self.bound[s + 1] = b_value(self.upper[s], self.bound[l as usize], self.bound[r as usize]);
    }

    /// Recomputes `U` for every in-tree node with round count `n`, then `B`
    /// in one children-before-parents sweep.
    pub fn recompute_bounds(&mut self, n: u64) {
        self.recompute_bounds_with_log((n as f64).ln());
    }

    pub(crate) fn recompute_bounds_with_log(&mut self, log_term: f64) {
        let scale = (2.0 * log_term).sqrt();
        let n = self.ids.len();
        let (shift, inv, keys) = (&self.shift[..n], &self.inv_sqrt_count[..n], &self.child_keys[..n]);
        let upper = &mut self.upper[..n];
        let bound = &mut self.bound[..n + 1];
        for s in (0..n).rev() {
            let u = shift[s] + scale * inv[s];
            upper[s] = u;
            let [l, r] = keys[s];
            let (bl, br) = (bound[l as usize], bound[r as usize]);
            let children = if bl > br { bl } else { br };
            bound[s + 1] = if u < children { u } else { children };
        }
    }

    #[cfg(test)]
    pub(crate) fn set_bound(&mut self, id: NodeId, bound: f64) {
        let slot = self.find(id).expect("node in tree");
        self.bound[slot as usize + 1] = bound;
    }

    pub(crate) fn advance_round(&mut self) -> u64 {
        self.rounds += 1;
        self.rounds
    }

    /// Executes a descent: picks the arm, samples the reward, inserts the
    /// node if new and updates counts and means along the path. Bounds are
    /// left to the caller.
    pub(crate) fn apply(
        &mut self,
        descent: &Descent,
        picker: &dyn ArmPicker,
        env: &dyn Environment,
        rng: &mut RngStream,
    ) -> (u32, PlayRecord) {
        let region = self.target_region(descent.target);
        let arm = picker.pick(&region, rng);
        let reward = env.sample_reward(&arm, rng);
        let played = match descent.target {
            Target::New { .. } => self.insert(descent.target, region),
            Target::Existing(slot) => slot,
        };
        for &slot in &descent.path {
            if slot != played {
                self.record(slot, reward);
            }
        }
        self.record(played, reward);
        let round = self.advance_round();
        let record = PlayRecord {
            round,
            node: self.ids[played as usize],
            arm,
            reward,
        };
        (played, record)
    }

    pub fn play_round(&mut self, env: &dyn Environment, rng: &mut RngStream) -> PlayRecord {
        self.play_round_with(&CenterPicker, env, rng)
    }

    /// One round of HOO with a custom arm picker.
    pub fn play_round_with(
        &mut self,
        picker: &dyn ArmPicker,
        env: &dyn Environment,
        rng: &mut RngStream,
    ) -> PlayRecord {
        let descent = self.select_basic(rng);
        let (_, record) = self.apply(&descent, picker, env, rng);
        self.recompute_bounds(record.round);
        record
    }
}

/// A bandit strategy driven round by round.
pub trait Strategy: Send {
    fn play_round(&mut self, env: &dyn Environment, rng: &mut RngStream) -> PlayRecord;

    /// Tree currently in use (the current regime's tree for restarting strategies).
    fn tree(&self) -> &HooTree;

    fn name(&self) -> &'static str;
}

impl Strategy for HooTree {
    fn play_round(&mut self, env: &dyn Environment, rng: &mut RngStream) -> PlayRecord {
        HooTree::play_round(self, env, rng)
    }

    fn tree(&self) -> &HooTree {
        self
    }

    fn name(&self) -> &'static str {
        "basic"
    }
}

/// Runs basic HOO for `horizon` rounds.
pub fn run(
    env: &dyn Environment,
    cover: CoverTree,
    config: HooConfig,
    horizon: u64,
    rng: &mut RngStream,
) -> Result<Vec<PlayRecord>> {
    if horizon == 0 {
        return Err(Error::invalid("horizon", "must be at least 1"));
    }
    if cover.dimension() != env.dimension() {
        return Err(Error::DimensionMismatch {
            expected: env.dimension(),
            found: cover.dimension(),
        });
    }
    let mut tree = HooTree::new(cover, config);
    Ok((0..horizon).map(|_| tree.play_round(env, rng)).collect())
}
