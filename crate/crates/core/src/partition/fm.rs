//! Recursive bisection with Fiduccia–Mattheyses refinement.
//!
//! The objective is the number of cut nets. A net cut by an earlier
//! bisection is already paid for, so it is dropped from the subproblems.

use std::cmp::Reverse;
use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FmPartitioner, PartitionHypergraph};

pub(super) fn recursive_bisection(h: &PartitionHypergraph, k: usize, eps: f64, cfg: &FmPartitioner) -> Vec<usize> {
    let mut node_part = vec![0usize; h.nodes.len()];
    let mut net_cut = vec![false; h.nets.len()];
    // The tolerance applies to each bisection, so a final part may exceed
    // its share by up to (1+ε)^⌈log2 k⌉. Tightening it per level costs
    // noticeably more cuts.
    let nodes: Vec<usize> = (0..h.nodes.len()).collect();
    split(h, &nodes, 0, k, eps, cfg, &mut node_part, &mut net_cut, 1);
    node_part
}

#[allow(clippy::too_many_arguments)]
fn split(
    h: &PartitionHypergraph,
    nodes: &[usize],
    first_part: usize,
    k: usize,
    eps: f64,
    cfg: &FmPartitioner,
    node_part: &mut [usize],
    net_cut: &mut [bool],
    path: u64,
) {
    if k == 1 || nodes.is_empty() {
        for &n in nodes {
            node_part[n] = first_part;
        }
        return;
    }
    let k0 = k / 2;
    let sub = SubGraph::new(h, nodes, net_cut);
    let side = sub.bisect(k0 as f64 / k as f64, eps, cfg, path);
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for (i, &n) in nodes.iter().enumerate() {
        if side[i] {
            right.push(n);
        } else {
            left.push(n);
        }
    }
    for (ni, pins) in sub.nets.iter().enumerate() {
        let s0 = side[pins[0]];
        if pins.iter().any(|&p| side[p] != s0) {
            net_cut[sub.net_ids[ni]] = true;
        }
    }
    split(h, &left, first_part, k0, eps, cfg, node_part, net_cut, 2 * path);
    split(h, &right, first_part + k0, k - k0, eps, cfg, node_part, net_cut, 2 * path + 1);
}

struct SubGraph {
    weight: Vec<f64>,
    /// Local pin lists of the nets still uncut with ≥ 2 pins here.
    nets: Vec<Vec<usize>>,
    net_ids: Vec<usize>,
    node_nets: Vec<Vec<usize>>,
}

impl SubGraph {
    fn new(h: &PartitionHypergraph, nodes: &[usize], net_cut: &[bool]) -> SubGraph {
        let mut local = std::collections::HashMap::with_capacity(nodes.len());
        for (i, &n) in nodes.iter().enumerate() {
            local.insert(n, i);
        }
        let mut nets = Vec::new();
        let mut net_ids = Vec::new();
        let mut node_nets = vec![Vec::new(); nodes.len()];
        for (ni, net) in h.nets.iter().enumerate() {
            if net_cut[ni] {
                continue;
            }
            let pins: Vec<usize> = net.pins.iter().filter_map(|p| local.get(p).copied()).collect();
            if pins.len() < 2 {
                continue;
            }
            for &p in &pins {
                node_nets[p].push(nets.len());
            }
            nets.push(pins);
            net_ids.push(ni);
        }
        let mut weight: Vec<f64> = nodes.iter().map(|&n| h.node_weight[n]).collect();
        if weight.iter().sum::<f64>() <= 0.0 {
            weight.iter_mut().for_each(|w| *w = 1.0);
        }
        SubGraph {
            weight,
            nets,
            net_ids,
            node_nets,
        }
    }

    /// `true` marks the second side. `frac` is the first side's share.
    fn bisect(&self, frac: f64, eps: f64, cfg: &FmPartitioner, path: u64) -> Vec<bool> {
        let total: f64 = self.weight.iter().sum();
        let wmax = self.weight.iter().copied().fold(0.0, f64::max);
        let target = [total * frac, total * (1.0 - frac)];
        let cap = [
            ((1.0 + eps) * target[0]).max(target[0] + wmax),
            ((1.0 + eps) * target[1]).max(target[1] + wmax),
        ];
        let mut best: Option<(usize, f64, Vec<bool>)> = None;
        for s in 0..cfg.starts.max(1) {
            let seed = cfg.seed ^ path.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (s as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut side = self.grow(target[0], &mut rng);
            let cut = self.refine(&mut side, &cap, cfg.max_passes);
            let w1: f64 = side.iter().zip(&self.weight).filter(|(s, _)| **s).map(|(_, w)| w).sum();
            let imbalance = (w1 - target[1]).abs();
            let better = match &best {
                None => true,
                Some((bc, bi, _)) => cut < *bc || (cut == *bc && imbalance < *bi - 1e-12),
            };
            if better {
                best = Some((cut, imbalance, side));
            }
        }
        best.expect("at least one start").2
    }

    /// Breadth-first growth of the first side from a random node until it
    /// reaches its target weight.
    fn grow(&self, target0: f64, rng: &mut ChaCha8Rng) -> Vec<bool> {
        let m = self.weight.len();
        let mut side = vec![true; m];
        let mut seen = vec![false; m];
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(rng);
        let mut w0 = 0.0;
        let mut queue = VecDeque::new();
        let mut next_seed = order.into_iter();
        while w0 < target0 {
            let v = match queue.pop_front() {
                Some(v) => v,
                None => match next_seed.by_ref().find(|&v| !seen[v]) {
                    Some(v) => {
                        seen[v] = true;
                        v
                    }
                    None => break,
                },
            };
            side[v] = false;
            w0 += self.weight[v];
            let mut nbrs: Vec<usize> = self.node_nets[v]
                .iter()
                .flat_map(|&n| self.nets[n].iter().copied())
                .filter(|&u| !seen[u])
                .collect();
            nbrs.sort_unstable();
            nbrs.dedup();
            // A little randomness in the frontier order.
            if nbrs.len() > 1 && rng.gen_bool(0.5) {
                nbrs.reverse();
            }
            for u in nbrs {
                seen[u] = true;
                queue.push_back(u);
            }
        }
        side
    }

    fn counts(&self, side: &[bool]) -> Vec<[usize; 2]> {
        self.nets
            .iter()
            .map(|pins| {
                let ones = pins.iter().filter(|&&p| side[p]).count();
                [pins.len() - ones, ones]
            })
            .collect()
    }

    fn gain(&self, v: usize, side: &[bool], counts: &[[usize; 2]]) -> i64 {
        let from = side[v] as usize;
        let mut g = 0;
        for &n in &self.node_nets[v] {
            if counts[n][from] == 1 {
                g += 1;
            }
            if counts[n][1 - from] == 0 {
                g -= 1;
            }
        }
        g
    }

    /// FM passes until no pass improves the cut. Returns the final cut.
    fn refine(&self, side: &mut [bool], cap: &[f64; 2], max_passes: usize) -> usize {
        let m = side.len();
        let mut counts = self.counts(side);
        let mut cut = counts.iter().filter(|c| c[0] > 0 && c[1] > 0).count();
        let mut w = [0.0f64; 2];
        for v in 0..m {
            w[side[v] as usize] += self.weight[v];
        }
        let fits = |w: &[f64; 2]| w[0] <= cap[0] + 1e-9 && w[1] <= cap[1] + 1e-9;
        for _ in 0..max_passes {
            let start_cut = cut;
            let start_ok = fits(&w);
            let mut gains: Vec<i64> = (0..m).map(|v| self.gain(v, side, &counts)).collect();
            let mut queue: BTreeSet<(i64, Reverse<usize>)> = (0..m).map(|v| (gains[v], Reverse(v))).collect();
            let mut moves = Vec::new();
            let mut best = (start_cut, 0usize, start_ok);
            loop {
                let next = queue.iter().rev().copied().find(|&(_, Reverse(v))| {
                    let to = 1 - side[v] as usize;
                    w[to] + self.weight[v] <= cap[to] + 1e-9 || !fits(&w)
                });
                let Some((g, Reverse(v))) = next else { break };
                queue.remove(&(g, Reverse(v)));
                let from = side[v] as usize;
                let to = 1 - from;
                for &n in &self.node_nets[v] {
                    let was_cut = counts[n][0] > 0 && counts[n][1] > 0;
                    counts[n][from] -= 1;
                    counts[n][to] += 1;
                    let is_cut = counts[n][0] > 0 && counts[n][1] > 0;
                    match (was_cut, is_cut) {
                        (false, true) => cut += 1,
                        (true, false) => cut -= 1,
                        _ => {}
                    }
                }
                side[v] = !side[v];
                w[from] -= self.weight[v];
                w[to] += self.weight[v];
                moves.push(v);
                for &n in &self.node_nets[v] {
                    for &u in &self.nets[n] {
                        if u != v && queue.remove(&(gains[u], Reverse(u))) {
                            gains[u] = self.gain(u, side, &counts);
                            queue.insert((gains[u], Reverse(u)));
                        }
                    }
                }
                let ok = fits(&w);
                if (ok && !best.2) || (ok == best.2 && cut < best.0) {
                    best = (cut, moves.len(), ok);
                }
            }
            for &v in moves[best.1..].iter().rev() {
                let from = side[v] as usize;
                for &n in &self.node_nets[v] {
                    counts[n][from] -= 1;
                    counts[n][1 - from] += 1;
                }
                side[v] = !side[v];
                w[from] -= self.weight[v];
                w[1 - from] += self.weight[v];
            }
            cut = best.0;
            if !(cut < start_cut || (best.2 && !start_ok)) {
                break;
            }
        }
        cut
    }
}
