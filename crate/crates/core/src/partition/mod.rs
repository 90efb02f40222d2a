//! Vertex-cut partitioning of scalar diagrams.
//!
//! The diagram is turned inside out: every edge becomes a hypergraph node
//! and every spider a hyperedge over its incident edges. A k-way node
//! partition then cuts exactly the spiders whose edges land in more than
//! one part, and those spiders become the cut parameters.

mod fm;
pub mod plan;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diagram::{EdgeKind, SpiderId, ZxDiagram};
use crate::error::{Error, Result};

pub use plan::{
    build_segments, choose_k, plan_for_partition, plan_from_assignment, Candidate, PartInfo,
    PartitionPlan, PlanOptions,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Net {
    pub spider: SpiderId,
    /// Incident edge nodes, ascending.
    pub pins: Vec<usize>,
    /// 1 for a T-spider, else 0.
    pub t_weight: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PartitionHypergraph {
    /// One node per non-loop edge, as `(u, v, kind)` with `u < v`, in
    /// [`ZxDiagram::edges`] order.
    pub nodes: Vec<(SpiderId, SpiderId, EdgeKind)>,
    /// Balance weight: each T-spider spreads a total weight of 1 over its
    /// incident edges.
    pub node_weight: Vec<f64>,
    /// One per live spider, ascending by id; isolated spiders have no pins.
    pub nets: Vec<Net>,
}

impl PartitionHypergraph {
    pub fn pin_count(&self) -> usize {
        self.nets.iter().map(|n| n.pins.len()).sum()
    }

    /// Nets with at least one pin; empty nets cannot be cut.
    pub fn live_nets(&self) -> impl Iterator<Item = &Net> + '_ {
        self.nets.iter().filter(|n| !n.pins.is_empty())
    }
}

/// Self-loops never connect two parts, so they get no node.
pub fn to_partition_hypergraph(d: &ZxDiagram) -> PartitionHypergraph {
    let nodes: Vec<_> = d.edges().into_iter().filter(|e| e.0 != e.1).collect();
    let mut pins: BTreeMap<SpiderId, Vec<usize>> = d.spider_ids().map(|v| (v, Vec::new())).collect();
    for (i, &(u, v, _)) in nodes.iter().enumerate() {
        pins.get_mut(&u).expect("live spider").push(i);
        pins.get_mut(&v).expect("live spider").push(i);
    }
    let mut node_weight = vec![0.0; nodes.len()];
    let nets: Vec<Net> = pins
        .into_iter()
        .map(|(v, pins)| {
            let t = d.phase(v).is_t_like();
            if t && !pins.is_empty() {
                let w = 1.0 / pins.len() as f64;
                for &p in &pins {
                    node_weight[p] += w;
                }
            }
            Net {
                spider: v,
                pins,
                t_weight: t as u32,
            }
        })
        .collect();
    PartitionHypergraph {
        nodes,
        node_weight,
        nets,
    }
}

/// A k-way split of the hypergraph's nodes and the spiders it cuts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KWayPartition {
    pub k: usize,
    pub node_part: Vec<usize>,
    /// Non-cut spiders with at least one edge.
    pub assignment: BTreeMap<SpiderId, usize>,
    pub cut_spiders: Vec<SpiderId>,
}

impl KWayPartition {
    pub fn from_node_parts(h: &PartitionHypergraph, k: usize, node_part: Vec<usize>) -> KWayPartition {
        let mut assignment = BTreeMap::new();
        let mut cut_spiders = Vec::new();
        for n in h.live_nets() {
            let first = node_part[n.pins[0]];
            if n.pins.iter().all(|&p| node_part[p] == first) {
                assignment.insert(n.spider, first);
            } else {
                cut_spiders.push(n.spider);
            }
        }
        KWayPartition {
            k,
            node_part,
            assignment,
            cut_spiders,
        }
    }

    /// T-weight carried by each part's nodes.
    pub fn part_weights(&self, h: &PartitionHypergraph) -> Vec<f64> {
        let mut w = vec![0.0; self.k];
        for (i, &p) in self.node_part.iter().enumerate() {
            w[p] += h.node_weight[i];
        }
        w
    }
}

/// Anything that can split a hypergraph k ways.
pub trait Partitioner: Sync {
    fn partition(&self, h: &PartitionHypergraph, k: usize, eps: f64) -> Result<KWayPartition>;
}

/// Recursive bisection with Fiduccia–Mattheyses refinement, best of a fixed
/// number of seeded starts per bisection.
#[derive(Clone, Copy, Debug)]
pub struct FmPartitioner {
    pub starts: usize,
    pub seed: u64,
    pub max_passes: usize,
}

impl Default for FmPartitioner {
    fn default() -> Self {
        FmPartitioner {
            starts: 8,
            seed: 0x5eed,
            max_passes: 12,
        }
    }
}

impl Partitioner for FmPartitioner {
    fn partition(&self, h: &PartitionHypergraph, k: usize, eps: f64) -> Result<KWayPartition> {
        if k < 2 {
            return Err(Error::Invalid(format!("k must be at least 2, got {k}")));
        }
        if k > h.nets.len() {
            return Err(Error::Invalid(format!(
                "k = {k} exceeds the spider count {}",
                h.nets.len()
            )));
        }
        if !(eps >= 0.0) {
            return Err(Error::Invalid(format!("balance tolerance must be non-negative, got {eps}")));
        }
        let node_part = fm::recursive_bisection(h, k, eps, self);
        Ok(KWayPartition::from_node_parts(h, k, node_part))
    }
}

/// [`FmPartitioner`] with its defaults.
pub fn partition_k(h: &PartitionHypergraph, k: usize, eps: f64) -> Result<KWayPartition> {
    FmPartitioner::default().partition(h, k, eps)
}
