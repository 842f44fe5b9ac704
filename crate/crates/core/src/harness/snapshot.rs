use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::hoo::HooTree;

/// `f64` that may be `+inf`; JSON has no infinity, so non-finite values are
/// written as the strings `"inf"`, `"-inf"` and `"nan"`.
mod extended {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotNode {
    pub depth: u32,
    pub index: u128,
    pub count: u64,
    pub mean: Option<f64>,
    #[serde(with = "extended")]
    pub upper: f64,
    #[serde(with = "extended")]
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeSnapshot {
    pub round: u64,
    pub nodes: Vec<SnapshotNode>,
}

/// Statistics of every node of `tree`, ordered by depth and then index.
pub fn export_tree_snapshot(tree: &HooTree, round: u64) -> TreeSnapshot {
    let mut nodes: Vec<SnapshotNode> = tree
        .nodes()
        .map(|(id, s)| SnapshotNode {
            depth: id.depth,
            index: id.index,
            count: s.count,
            mean: s.mean(),
            upper: s.upper,
            bound: s.bound,
        })
        .collect();
    nodes.sort_by_key(|n| (n.depth, n.index));
    TreeSnapshot { round, nodes }
}

impl TreeSnapshot {
    /// One line per node, indented by depth.
    pub fn to_text(&self) -> String {
        let mut out = format!("round {} nodes {}\n", self.round, self.nodes.len());
        for n in &self.nodes {
            let mean = n.mean.map_or_else(|| "-".to_string(), |m| format!("{m:.6}"));
            let _ = writeln!(
                out,
                "{:indent$}({},{}) T={} mean={} U={:.6} B={:.6}",
                "",
                n.depth,
                n.index,
                n.count,
                mean,
                n.upper,
                n.bound,
                indent = 2 * n.depth as usize
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serialises")
    }

    /// Number of nodes at each depth.
    pub fn depth_profile(&self) -> Vec<usize> {
        let mut profile = Vec::new();
        for n in &self.nodes {
            let d = n.depth as usize;
            if profile.len() <= d {
                profile.resize(d + 1, 0);
            }
            profile[d] += 1;
        }
        profile
    }
}
