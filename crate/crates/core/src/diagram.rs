//! ZX-diagrams: Z/X spiders joined by a multiset of plain and Hadamard
//! edges, an optional ordered boundary, a global scalar, and parameter
//! dependent scalar factors introduced by cutting.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::phase::{ParamFactor, ParamId, Phase};
use crate::scalar::ScalarC;

pub type SpiderId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpiderKind {
    Z,
    X,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Plain,
    Hadamard,
}

impl EdgeKind {
    pub fn toggled(self) -> EdgeKind {
        match self {
            EdgeKind::Plain => EdgeKind::Hadamard,
            EdgeKind::Hadamard => EdgeKind::Plain,
        }
    }

    /// Composition of two edge segments in series (H·H = I).
    pub fn compose(self, other: EdgeKind) -> EdgeKind {
        if self == other {
            EdgeKind::Plain
        } else {
            EdgeKind::Hadamard
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spider {
    pub kind: SpiderKind,
    pub phase: Phase,
}

/// Number of parallel edges of each kind between two spiders.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EdgeMult {
    pub plain: u32,
    pub hadamard: u32,
}

impl EdgeMult {
    pub fn total(&self) -> u32 {
        self.plain + self.hadamard
    }

    fn add(&mut self, kind: EdgeKind, n: u32) {
        match kind {
            EdgeKind::Plain => self.plain += n,
            EdgeKind::Hadamard => self.hadamard += n,
        }
    }

    pub fn count(&self, kind: EdgeKind) -> u32 {
        match kind {
            EdgeKind::Plain => self.plain,
            EdgeKind::Hadamard => self.hadamard,
        }
    }
}

/// One open wire of the diagram, attached to `spider` through an edge of
/// the given kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub spider: SpiderId,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, Default)]
pub struct ZxDiagram {
    spiders: Vec<Option<Spider>>,
    /// Sorted by neighbour id. Self-loops are stored once, under the
    /// spider's own id.
    adj: Vec<Vec<(SpiderId, EdgeMult)>>,
    live: usize,
    inputs: Vec<Wire>,
    outputs: Vec<Wire>,
    scalar: ScalarC,
    factors: Vec<ParamFactor>,
    params: BTreeSet<ParamId>,
}

impl ZxDiagram {
    pub fn new() -> Self {
        ZxDiagram {
            scalar: ScalarC::one(),
            ..Default::default()
        }
    }

    pub fn add_spider(&mut self, kind: SpiderKind, phase: Phase) -> SpiderId {
        self.params.extend(phase.params().iter().copied());
        let id = self.spiders.len();
        self.spiders.push(Some(Spider { kind, phase }));
        self.adj.push(Vec::new());
        self.live += 1;
        id
    }

    pub fn add_z(&mut self, eighths: i64) -> SpiderId {
        self.add_spider(SpiderKind::Z, Phase::eighths(eighths))
    }

    pub fn add_x(&mut self, eighths: i64) -> SpiderId {
        self.add_spider(SpiderKind::X, Phase::eighths(eighths))
    }

    /// Removes a spider and every edge touching it. Boundary wires that
    /// point at it are left for the caller to fix.
    pub fn remove_spider(&mut self, v: SpiderId) {
        if self.spiders.get(v).is_none_or(|s| s.is_none()) {
            return;
        }
        let nbrs = std::mem::take(&mut self.adj[v]);
        for (w, _) in nbrs {
            if w != v {
                if let Ok(i) = self.adj[w].binary_search_by_key(&v, |e| e.0) {
                    self.adj[w].remove(i);
                }
            }
        }
        self.spiders[v] = None;
        self.live -= 1;
    }

    pub fn contains(&self, v: SpiderId) -> bool {
        matches!(self.spiders.get(v), Some(Some(_)))
    }

    pub fn spider(&self, v: SpiderId) -> &Spider {
        self.spiders[v].as_ref().expect("live spider")
    }

    pub fn kind(&self, v: SpiderId) -> SpiderKind {
        self.spider(v).kind
    }

    pub fn set_kind(&mut self, v: SpiderId, kind: SpiderKind) {
        self.spiders[v].as_mut().expect("live spider").kind = kind;
    }

    pub fn phase(&self, v: SpiderId) -> &Phase {
        &self.spider(v).phase
    }

    /// Adds `delta` to the spider's phase, declaring any new parameters.
    pub fn add_to_phase(&mut self, v: SpiderId, delta: &Phase) {
        self.params.extend(delta.params().iter().copied());
        self.spiders[v]
            .as_mut()
            .expect("live spider")
            .phase
            .add(delta);
    }

    pub fn add_eighths(&mut self, v: SpiderId, k: i64) {
        self.spiders[v]
            .as_mut()
            .expect("live spider")
            .phase
            .add_eighths(k);
    }

    pub fn set_phase(&mut self, v: SpiderId, phase: Phase) {
        self.params.extend(phase.params().iter().copied());
        self.spiders[v].as_mut().expect("live spider").phase = phase;
    }

    pub(crate) fn phase_mut(&mut self, v: SpiderId) -> &mut Phase {
        &mut self.spiders[v].as_mut().expect("live spider").phase
    }

    /// Live spider ids in ascending order.
    pub fn spider_ids(&self) -> impl Iterator<Item = SpiderId> + '_ {
        self.spiders
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|_| i))
    }

    pub fn num_spiders(&self) -> usize {
        self.live
    }

    /// Upper bound (exclusive) on spider ids ever issued.
    pub fn id_bound(&self) -> usize {
        self.spiders.len()
    }

    pub fn add_edge(&mut self, u: SpiderId, v: SpiderId, kind: EdgeKind) {
        self.add_edges(u, v, kind, 1);
    }

    pub fn add_edges(&mut self, u: SpiderId, v: SpiderId, kind: EdgeKind, n: u32) {
        if n == 0 {
            return;
        }
        debug_assert!(self.contains(u) && self.contains(v));
        Self::bump(&mut self.adj[u], v, kind, n);
        if u != v {
            Self::bump(&mut self.adj[v], u, kind, n);
        }
    }

    fn bump(list: &mut Vec<(SpiderId, EdgeMult)>, w: SpiderId, kind: EdgeKind, n: u32) {
        match list.binary_search_by_key(&w, |e| e.0) {
            Ok(i) => list[i].1.add(kind, n),
            Err(i) => {
                let mut m = EdgeMult::default();
                m.add(kind, n);
                list.insert(i, (w, m));
            }
        }
    }

    /// Replaces the multiplicities between `u` and `v` (removing the entry
    /// when both are zero).
    pub fn set_edge_mult(&mut self, u: SpiderId, v: SpiderId, m: EdgeMult) {
        Self::put(&mut self.adj[u], v, m);
        if u != v {
            Self::put(&mut self.adj[v], u, m);
        }
    }

    fn put(list: &mut Vec<(SpiderId, EdgeMult)>, w: SpiderId, m: EdgeMult) {
        match list.binary_search_by_key(&w, |e| e.0) {
            Ok(i) => {
                if m.total() == 0 {
                    list.remove(i);
                } else {
                    list[i].1 = m;
                }
            }
            Err(i) => {
                if m.total() > 0 {
                    list.insert(i, (w, m));
                }
            }
        }
    }

    pub fn remove_all_edges(&mut self, u: SpiderId, v: SpiderId) {
        self.set_edge_mult(u, v, EdgeMult::default());
    }

    pub fn edge_mult(&self, u: SpiderId, v: SpiderId) -> EdgeMult {
        match self.adj[u].binary_search_by_key(&v, |e| e.0) {
            Ok(i) => self.adj[u][i].1,
            Err(_) => EdgeMult::default(),
        }
    }

    pub fn connected(&self, u: SpiderId, v: SpiderId) -> bool {
        self.edge_mult(u, v).total() > 0
    }

    /// Neighbour multiplicities of `v`, sorted by neighbour id; includes a
    /// self-loop entry if there is one.
    pub fn incident(&self, v: SpiderId) -> &[(SpiderId, EdgeMult)] {
        &self.adj[v]
    }

    /// Distinct neighbours other than `v` itself.
    pub fn neighbors(&self, v: SpiderId) -> impl Iterator<Item = SpiderId> + '_ {
        self.adj[v].iter().map(|e| e.0).filter(move |&w| w != v)
    }

    pub fn neighbor_vec(&self, v: SpiderId) -> Vec<SpiderId> {
        self.neighbors(v).collect()
    }

    /// Number of legs, counting self-loops twice and boundary wires once.
    pub fn degree(&self, v: SpiderId) -> usize {
        let mut d = 0usize;
        for &(w, m) in &self.adj[v] {
            d += m.total() as usize * if w == v { 2 } else { 1 };
        }
        d + self.boundary_legs(v)
    }

    pub fn boundary_legs(&self, v: SpiderId) -> usize {
        self.inputs
            .iter()
            .chain(self.outputs.iter())
            .filter(|w| w.spider == v)
            .count()
    }

    /// All edges with multiplicity, as `(u, v, kind)` with `u ≤ v`.
    pub fn edges(&self) -> Vec<(SpiderId, SpiderId, EdgeKind)> {
        let mut out = Vec::new();
        for u in self.spider_ids() {
            for &(v, m) in &self.adj[u] {
                if v < u {
                    continue;
                }
                for _ in 0..m.plain {
                    out.push((u, v, EdgeKind::Plain));
                }
                for _ in 0..m.hadamard {
                    out.push((u, v, EdgeKind::Hadamard));
                }
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.spider_ids()
            .map(|u| {
                self.adj[u]
                    .iter()
                    .filter(|e| e.0 >= u)
                    .map(|e| e.1.total() as usize)
                    .sum::<usize>()
            })
            .sum()
    }

    pub fn inputs(&self) -> &[Wire] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Wire] {
        &self.outputs
    }

    pub fn inputs_mut(&mut self) -> &mut Vec<Wire> {
        &mut self.inputs
    }

    pub fn outputs_mut(&mut self) -> &mut Vec<Wire> {
        &mut self.outputs
    }

    pub fn is_scalar(&self) -> bool {
        self.inputs.is_empty() && self.outputs.is_empty()
    }

    /// Points every boundary wire at `from` to `to`, composing its kind
    /// with `via`.
    pub fn redirect_wires(&mut self, from: SpiderId, to: SpiderId, via: EdgeKind) {
        for w in self.inputs.iter_mut().chain(self.outputs.iter_mut()) {
            if w.spider == from {
                w.spider = to;
                w.kind = w.kind.compose(via);
            }
        }
    }

    pub fn scalar(&self) -> &ScalarC {
        &self.scalar
    }

    pub fn scalar_mut(&mut self) -> &mut ScalarC {
        &mut self.scalar
    }

    pub fn mul_scalar(&mut self, s: ScalarC) {
        self.scalar *= s;
    }

    pub fn factors(&self) -> &[ParamFactor] {
        &self.factors
    }

    pub fn add_factor(&mut self, f: ParamFactor) {
        self.params.extend(f.params.iter().copied());
        if let Some(v) = f.resolved() {
            self.scalar *= v;
        } else {
            self.factors.push(f);
        }
    }

    pub(crate) fn factors_mut(&mut self) -> &mut Vec<ParamFactor> {
        &mut self.factors
    }

    pub fn params(&self) -> &BTreeSet<ParamId> {
        &self.params
    }

    pub(crate) fn params_mut(&mut self) -> &mut BTreeSet<ParamId> {
        &mut self.params
    }

    pub fn declare_param(&mut self, p: ParamId) {
        self.params.insert(p);
    }

    pub fn has_params(&self) -> bool {
        !self.params.is_empty()
    }

    /// Number of spiders whose phase is an odd multiple of π/4.
    pub fn t_count(&self) -> usize {
        self.spider_ids()
            .filter(|&v| self.phase(v).is_t_like())
            .count()
    }

    /// Parameters referenced by spiders or factors.
    pub fn used_params(&self) -> BTreeSet<ParamId> {
        let mut used = BTreeSet::new();
        for v in self.spider_ids() {
            used.extend(self.phase(v).params().iter().copied());
        }
        for f in &self.factors {
            used.extend(f.params.iter().copied());
        }
        used
    }

    /// Lists every broken structural invariant; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (u, list) in self.adj.iter().enumerate() {
            if !list.is_empty() && !self.contains(u) {
                out.push("edge references missing spider".to_string());
                continue;
            }
            for &(v, m) in list {
                if !self.contains(v) {
                    out.push("edge references missing spider".to_string());
                } else if v != u && self.edge_mult(v, u) != m {
                    out.push("asymmetric edge record".to_string());
                }
            }
        }
        for w in self.inputs.iter().chain(self.outputs.iter()) {
            if !self.contains(w.spider) {
                out.push("boundary wire references missing spider".to_string());
            }
        }
        let used = self.used_params();
        if used.iter().any(|p| !self.params.contains(p)) {
            out.push("undeclared parameter".to_string());
        }
        if self.params.iter().any(|p| !used.contains(p)) {
            out.push("declared parameter is unused".to_string());
        }
        out.dedup();
        out
    }

    /// Serializable snapshot for debugging dumps.
    pub fn to_dump(&self) -> DiagramDump {
        DiagramDump {
            spiders: self
                .spider_ids()
                .map(|id| SpiderDump {
                    id,
                    kind: self.kind(id),
                    phase_eighths: self.phase(id).fixed(),
                    params: self.phase(id).params().to_vec(),
                })
                .collect(),
            edges: self
                .edges()
                .into_iter()
                .map(|(u, v, kind)| EdgeDump { u, v, kind })
                .collect(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            scalar: self.scalar,
            params: self.params.iter().copied().collect(),
            factors: self.factors.clone(),
        }
    }

    /// Copies the spiders in `keep` (and the edges among them) into a new
    /// diagram, returning it with the old→new id map. Boundary, scalar and
    /// factors are not copied.
    pub fn induced(&self, keep: &[SpiderId]) -> (ZxDiagram, Vec<Option<SpiderId>>) {
        let mut map = vec![None; self.spiders.len()];
        let mut sub = ZxDiagram::new();
        for &v in keep {
            let s = self.spider(v);
            map[v] = Some(sub.add_spider(s.kind, s.phase.clone()));
        }
        for &u in keep {
            for &(v, m) in &self.adj[u] {
                if v < u {
                    continue;
                }
                if let (Some(a), Some(b)) = (map[u], map[v]) {
                    sub.add_edges(a, b, EdgeKind::Plain, m.plain);
                    sub.add_edges(a, b, EdgeKind::Hadamard, m.hadamard);
                }
            }
        }
        (sub, map)
    }

    /// Connected components of the spider graph (boundary ignored), each
    /// sorted ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<SpiderId>> {
        let mut seen = vec![false; self.spiders.len()];
        let mut comps = Vec::new();
        for s in self.spider_ids() {
            if seen[s] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpiderDump {
    pub id: SpiderId,
    pub kind: SpiderKind,
    pub phase_eighths: u8,
    pub params: Vec<ParamId>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeDump {
    pub u: SpiderId,
    pub v: SpiderId,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagramDump {
    pub spiders: Vec<SpiderDump>,
    pub edges: Vec<EdgeDump>,
    pub inputs: Vec<Wire>,
    pub outputs: Vec<Wire>,
    pub scalar: ScalarC,
    pub params: Vec<ParamId>,
    pub factors: Vec<ParamFactor>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_diagram_is_valid() {
        assert!(ZxDiagram::new().validate().is_empty());
    }

    #[test]
    fn dangling_edge_is_reported() {
        let mut d = ZxDiagram::new();
        let a = d.add_z(0);
        let b = d.add_z(0);
        d.add_edge(a, b, EdgeKind::Hadamard);
        // drop b without cleaning a's adjacency
        d.spiders[b] = None;
        d.live -= 1;
        assert_eq!(d.validate(), vec!["edge references missing spider".to_string()]);
    }

    #[test]
    fn undeclared_parameter_is_reported() {
        let mut d = ZxDiagram::new();
        d.add_spider(SpiderKind::Z, Phase::param(4));
        d.params.clear();
        assert_eq!(d.validate(), vec!["undeclared parameter".to_string()]);
    }

    #[test]
    fn multiset_edges_and_degree() {
        let mut d = ZxDiagram::new();
        let a = d.add_z(0);
        let b = d.add_x(0);
        d.add_edge(a, b, EdgeKind::Plain);
        d.add_edge(a, b, EdgeKind::Plain);
        d.add_edge(a, a, EdgeKind::Hadamard);
        assert_eq!(d.degree(a), 4);
        assert_eq!(d.degree(b), 2);
        assert_eq!(d.num_edges(), 3);
        d.remove_spider(b);
        assert_eq!(d.degree(a), 2);
        assert!(d.validate().is_empty());
    }
}
