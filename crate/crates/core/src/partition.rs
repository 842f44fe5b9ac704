//! Trees of coverings of the unit cube.
//!
//! Node `(h, i)` sits at depth `h` with index `i` in `1..=2^h`; its children
//! are `(h+1, 2i-1)` and `(h+1, 2i)`. The region of a node is obtained by
//! replaying `h` bisections from `[0,1]^D`: each split halves the longest
//! side of the box (lowest axis on ties), and the binary digits of `i - 1`
//! pick the lower or upper half at each step. Regions are never stored by the
//! tree itself; they are recomputed from the node id.
//!
//! Cells are half-open `[lo, hi)` except on the upper face of the cube, so the
//! depth-`h` regions partition `[0,1]^D` exactly.

use serde::{Deserialize, Serialize};

use crate::arm::ArmPoint;
use crate::dissimilarity::Dissimilarity;
use crate::error::{Error, Result};

/// Deepest representable node: indices at depth `h` go up to `2^h`.
pub const MAX_DEPTH: u32 = 127;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId {
    pub depth: u32,
    pub index: u128,
}

impl NodeId {
    pub const ROOT: NodeId = NodeId { depth: 0, index: 1 };

    pub fn new(depth: u32, index: u128) -> Result<Self> {
        if depth > MAX_DEPTH || index == 0 || index > 1u128 << depth {
            return Err(Error::NodeOutOfRange { depth, index });
        }
        Ok(Self { depth, index })
    }

    /// Number of nodes at `depth`.
    pub fn width(depth: u32) -> u128 {
        1u128 << depth
    }

    pub fn left(self) -> NodeId {
        debug_assert!(self.depth < MAX_DEPTH);
        NodeId {
            depth: self.depth + 1,
            index: 2 * self.index - 1,
        }
    }

    pub fn right(self) -> NodeId {
        debug_assert!(self.depth < MAX_DEPTH);
        NodeId {
            depth: self.depth + 1,
            index: 2 * self.index,
        }
    }

    pub fn children(self) -> [NodeId; 2] {
        [self.left(), self.right()]
    }

    pub fn parent(self) -> Option<NodeId> {
        (self.depth > 0).then(|| NodeId {
            depth: self.depth - 1,
            index: self.index.div_ceil(2),
        })
    }

    /// Ancestor at `depth` (the node itself when depths match).
    pub fn ancestor_at(self, depth: u32) -> Option<NodeId> {
        (depth <= self.depth).then(|| {
            let shift = self.depth - depth;
            NodeId {
                depth,
                index: ((self.index - 1) >> shift) + 1,
            }
        })
    }

    pub fn is_descendant_of(self, other: NodeId) -> bool {
        self.ancestor_at(other.depth) == Some(other)
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.depth, self.index)
    }
}

/// Axis-aligned box inside `[0,1]^D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Region {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        let ok = lower
            .iter()
            .zip(&upper)
            .all(|(lo, hi)| 0.0 <= *lo && lo <= hi && *hi <= 1.0);
        if !ok {
            return Err(Error::invalid("region", "bounds must satisfy 0 <= lower <= upper <= 1"));
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(dim: usize) -> Self {
        Self {
            lower: vec![0.0; dim],
            upper: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn sides(&self) -> impl Iterator<Item = f64> + '_ {
        self.lower.iter().zip(&self.upper).map(|(lo, hi)| hi - lo)
    }

    pub fn center(&self) -> ArmPoint {
        ArmPoint::from_unchecked(
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(lo, hi)| 0.5 * (lo + hi))
                .collect(),
        )
    }

    /// Longest side, lowest axis on ties.
    pub fn split_axis(&self) -> usize {
        let mut best = 0;
        let mut best_len = f64::NEG_INFINITY;
        for (axis, len) in self.sides().enumerate() {
            if len > best_len {
                best = axis;
                best_len = len;
            }
        }
        best
    }

    /// Bisects along [`Region::split_axis`]; returns `(lower half, upper half)`.
    pub fn split(&self) -> (Region, Region) {
        let axis = self.split_axis();
        let mid = 0.5 * (self.lower[axis] + self.upper[axis]);
        let mut left = self.clone();
        let mut right = self.clone();
        left.upper[axis] = mid;
        right.lower[axis] = mid;
        (left, right)
    }

    /// Membership under the half-open convention.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&c, (&lo, &hi))| lo <= c && (c < hi || (hi == 1.0 && c == 1.0)))
    }

    pub fn volume(&self) -> f64 {
        self.sides().product()
    }
}

/// The dyadic tree of coverings of `[0,1]^D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverTree {
    dimension: usize,
}

impl CoverTree {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid("dimension", "must be at least 1"));
        }
        Ok(Self { dimension })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn root_region(&self) -> Region {
        Region::unit(self.dimension)
    }

    pub fn region_of(&self, node: NodeId) -> Result<Region> {
        let node = NodeId::new(node.depth, node.index)?;
        let mut region = self.root_region();
        let path = node.index - 1;
        for step in (0..node.depth).rev() {
            let (lo, hi) = region.split();
            region = if (path >> step) & 1 == 0 { lo } else { hi };
        }
        Ok(region)
    }

    pub fn center_of(&self, node: NodeId) -> Result<ArmPoint> {
        Ok(self.region_of(node)?.center())
    }

    /// Depth-`depth` node whose region contains `x`.
    pub fn locate(&self, x: &[f64], depth: u32) -> Result<NodeId> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: x.len(),
            });
        }
        let mut node = NodeId::ROOT;
        let mut region = self.root_region();
        for _ in 0..depth {
            let (lo, hi) = region.split();
            if lo.contains(x) {
                node = node.left();
                region = lo;
            } else {
                node = node.right();
                region = hi;
            }
        }
        Ok(node)
    }
}

pub fn region_of(tree: &CoverTree, node: NodeId) -> Result<Region> {
    tree.region_of(node)
}

pub fn center_of(tree: &CoverTree, node: NodeId) -> Result<ArmPoint> {
    tree.center_of(node)
}

/// Exact diameter of a box under a norm-power dissimilarity.
pub fn region_diameter(region: &Region, ell: &Dissimilarity) -> Result<f64> {
    match *ell {
        Dissimilarity::NormPower { norm, exponent, scale } => Ok(scale * norm.of(region.sides()).powf(exponent)),
        Dissimilarity::TreeInduced { .. } => Err(Error::UnsupportedDissimilarity("closed-form box diameter")),
    }
}

/// Shrinking-rate parameters tying the tree to a dissimilarity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionParams {
    pub nu1: f64,
    pub rho: f64,
    pub nu2: f64,
}

fn check_recipe_inputs(dim: usize, a: f64, b: f64) -> Result<()> {
    if dim == 0 {
        return Err(Error::invalid("dimension", "must be at least 1"));
    }
    if !(a > 0.0) {
        return Err(Error::invalid("a", "must be positive"));
    }
    if !(b > 0.0) {
        return Err(Error::invalid("b", "must be positive"));
    }
    Ok(())
}

/// Parameters for `l(x, y) = b |x - y|_2^a` on `[0,1]^D`:
/// `nu1 = b (2 sqrt(D))^a`, `rho = 2^(-a/D)`, `nu2 = b / 2^a`.
pub fn params_for_euclidean(dim: usize, a: f64, b: f64) -> Result<PartitionParams> {
    check_recipe_inputs(dim, a, b)?;
    let d = dim as f64;
    Ok(PartitionParams {
        nu1: b * (2.0 * d.sqrt()).powf(a),
        rho: 2f64.powf(-a / d),
        nu2: b / 2f64.powf(a),
    })
}

/// Parameters for `l(x, y) = b |x - y|_inf^a` on `[0,1]^D`:
/// `nu1 = b 2^a`, `rho = 2^(-a/D)`, `nu2 = b / 2^a`.
pub fn params_for_supremum(dim: usize, a: f64, b: f64) -> Result<PartitionParams> {
    check_recipe_inputs(dim, a, b)?;
    Ok(PartitionParams {
        nu1: b * 2f64.powf(a),
        rho: 2f64.powf(-a / dim as f64),
        nu2: b / 2f64.powf(a),
    })
}

/// Which part of the shrinking assumption a node violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShrinkingCondition {
    /// `diam(P_{h,i}) <= nu1 rho^h`.
    Diameter,
    /// The ball of radius `nu2 rho^h` around the cell center lies in the cell.
    BallInside,
    /// Depth-`h` balls are pairwise disjoint.
    BallsDisjoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkingViolation {
    pub condition: ShrinkingCondition,
    pub node: NodeId,
    /// Checked quantity (diameter, ball radius, twice the ball radius).
    pub value: f64,
    /// Bound it had to respect.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkingReport {
    pub max_depth: u32,
    pub nodes_checked: u64,
    /// First violation of each condition at each depth.
    pub violations: Vec<ShrinkingViolation>,
}

impl ShrinkingReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn passes_condition(&self, condition: ShrinkingCondition) -> bool {
        self.violations.iter().all(|v| v.condition != condition)
    }
}

/// Relative slack for the closed-form comparisons; bounds that hold with
/// equality (e.g. inscribed balls touching the faces) must not fail on
/// rounding.
const CERT_REL_TOL: f64 = 1e-12;

fn exceeds(value: f64, bound: f64) -> bool {
    value > bound * (1.0 + CERT_REL_TOL)
}

/// Checks the shrinking assumption for every node down to `max_depth`, with
/// balls centred at the cell centres.
///
/// Disjointness uses the lattice structure of a level: all depth-`h` cells
/// are translates of one box, so the closest pair of centres is one side
/// length apart along the shortest axis, and open norm balls of radius `r`
/// are disjoint iff their centres are at least `2r` apart.
pub fn certify_shrinking(
    tree: &CoverTree,
    params: &PartitionParams,
    ell: &Dissimilarity,
    max_depth: u32,
) -> Result<ShrinkingReport> {
    if max_depth > MAX_DEPTH {
        return Err(Error::invalid("max_depth", format!("must be at most {MAX_DEPTH}")));
    }
    let mut report = ShrinkingReport {
        max_depth,
        nodes_checked: 0,
        violations: Vec::new(),
    };
    let mut level = vec![(NodeId::ROOT, tree.root_region())];
    for depth in 0..=max_depth {
        let scale = params.rho.powi(depth as i32);
        let diam_bound = params.nu1 * scale;
        let (_, radius) = ell.norm_radius(params.nu2 * scale)?;
        let mut seen = [false; 3];
        for (node, region) in &level {
            report.nodes_checked += 1;
            let diam = region_diameter(region, ell)?;
            let half_min_side = region.sides().fold(f64::INFINITY, f64::min) / 2.0;
            let min_side = 2.0 * half_min_side;
            let checks = [
                (ShrinkingCondition::Diameter, diam, diam_bound),
                (ShrinkingCondition::BallInside, radius, half_min_side),
                (ShrinkingCondition::BallsDisjoint, 2.0 * radius, min_side),
            ];
            for (k, (condition, value, bound)) in checks.into_iter().enumerate() {
                if condition == ShrinkingCondition::BallsDisjoint && level.len() < 2 {
                    continue;
                }
                if !seen[k] && exceeds(value, bound) {
                    seen[k] = true;
                    report.violations.push(ShrinkingViolation {
                        condition,
                        node: *node,
                        value,
                        bound,
                    });
                }
            }
        }
        if depth < max_depth {
            level = level
                .iter()
                .flat_map(|(node, region)| {
                    let (lo, hi) = region.split();
                    [(node.left(), lo), (node.right(), hi)]
                })
                .collect();
        }
    }
    Ok(report)
}

/// Largest `nu2` for which balls centred at cell centres stay inside the
/// cells of every depth, for a norm power `b |.|^a` with the given `rho`.
/// The bound is the same for the Euclidean and supremum norms.
///
/// Diagnostic companion to [`certify_shrinking`]; scans depths up to
/// `max_depth`.
pub fn max_inscribed_nu2(tree: &CoverTree, rho: f64, a: f64, b: f64, max_depth: u32) -> f64 {
    let mut region = tree.root_region();
    let mut best = f64::INFINITY;
    for depth in 0..=max_depth {
        let half_min_side = region.sides().fold(f64::INFINITY, f64::min) / 2.0;
        best = best.min(b * half_min_side.powf(a) / rho.powi(depth as i32));
        region = region.split().0;
    }
    best
}
