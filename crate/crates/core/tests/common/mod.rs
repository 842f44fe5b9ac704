#![allow(dead_code)]

use std::collections::HashMap;

use hoo_core::hoo::u_value;
use hoo_core::{HooConfig, HooTree, NodeId, PlayRecord};

/// Ancestors of `id` from depth `top` down to `id`, by repeated halving.
pub fn lineage(id: NodeId, top: u32) -> Vec<NodeId> {
    let mut out = vec![id];
    let mut cur = id;
    while cur.depth > top {
        cur = NodeId {
            depth: cur.depth - 1,
            index: cur.index.div_ceil(2),
        };
        out.push(cur);
    }
    out.reverse();
    out
}

/// Counts and means rebuilt from the play log alone.
pub fn replay(log: &[PlayRecord], top: u32) -> HashMap<NodeId, (u64, f64)> {
    let mut sums: HashMap<NodeId, (u64, f64)> = HashMap::new();
    for r in log {
        for a in lineage(r.node, top) {
            let e = sums.entry(a).or_insert((0, 0.0));
            e.0 += 1;
            e.1 += r.reward;
        }
    }
    sums.into_iter().map(|(k, (c, s))| (k, (c, s / c as f64))).collect()
}

pub fn check_replay(tree: &HooTree, log: &[PlayRecord]) -> Result<(), String> {
    let replayed = replay(log, tree.start_depth());
    if replayed.len() != tree.len() {
        return Err(format!("replay has {} nodes, tree {}", replayed.len(), tree.len()));
    }
    for (id, stats) in tree.nodes() {
        let (count, mean) = replayed.get(&id).ok_or(format!("{id} not in replay"))?;
        if *count != stats.count {
            return Err(format!("{id}: count {} vs replay {count}", stats.count));
        }
        if (stats.mean - mean).abs() > 1e-9 {
            return Err(format!("{id}: mean {} vs replay {mean}", stats.mean));
        }
    }
    Ok(())
}

/// `B` recomputed by recursion over the tree from literal `U`-values.
pub fn oracle_bounds(tree: &HooTree, n: u64) -> HashMap<NodeId, (f64, f64)> {
    fn visit(tree: &HooTree, id: NodeId, n: u64, cfg: &HooConfig, out: &mut HashMap<NodeId, (f64, f64)>) -> f64 {
        let s = tree.stats(id);
        let u = u_value(s.mean, s.count, n, cfg, id.depth);
        let mut best = f64::NEG_INFINITY;
        let kids = tree.children_in_tree(id);
        for side in [id.left(), id.right()] {
            let b = if kids.contains(&side) {
                visit(tree, side, n, cfg, out)
            } else {
                f64::INFINITY
            };
            best = best.max(b);
        }
        let b = u.min(best);
        out.insert(id, (u, b));
        b
    }
    let mut out = HashMap::new();
    let cfg = *tree.config();
    let tops: Vec<NodeId> = tree
        .nodes()
        .map(|(id, _)| id)
        .filter(|id| id.depth == tree.start_depth())
        .collect();
    for top in tops {
        visit(tree, top, n, &cfg, &mut out);
    }
    out
}

/// Stored `U` and `B` against the oracle, `B <= U`, and `B = U` at leaves.
pub fn check_bounds(tree: &HooTree, n: u64) -> Result<(), String> {
    let oracle = oracle_bounds(tree, n);
    for (id, s) in tree.nodes() {
        let (u, b) = oracle[&id];
        if (s.upper - u).abs() > 1e-12 * u.abs().max(1.0) {
            return Err(format!("{id}: U {} vs oracle {u}", s.upper));
        }
        if (s.bound - b).abs() > 1e-12 * b.abs().max(1.0) {
            return Err(format!("{id}: B {} vs oracle {b}", s.bound));
        }
        if s.bound > s.upper {
            return Err(format!("{id}: B {} > U {}", s.bound, s.upper));
        }
        if tree.children_in_tree(id).is_empty() && s.bound != s.upper {
            return Err(format!("{id}: leaf with B {} != U {}", s.bound, s.upper));
        }
    }
    Ok(())
}

/// `B` is nondecreasing down a selected path.
pub fn check_path(tree: &HooTree, path: &[NodeId]) -> Result<(), String> {
    let bounds: Vec<f64> = path.iter().map(|&id| tree.stats(id).bound).collect();
    if bounds.windows(2).all(|w| w[0] <= w[1]) {
        Ok(())
    } else {
        Err(format!("path B not monotone: {bounds:?}"))
    }
}
