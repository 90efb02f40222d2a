//! Clifford simplification of ZX-diagrams.
//!
//! Diagrams are first brought to graph-like form (only Z-spiders, only
//! Hadamard edges, no self-loops or parallel edges). The rules below keep
//! that form and record every scalar they produce. In parameter-safe mode
//! a rule may only delete spiders whose phase has no parameter terms; phases
//! of surviving spiders can carry parameters freely, since every rule only
//! adds constants to them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diagram::{EdgeKind, SpiderId, SpiderKind, ZxDiagram};
use crate::error::{Error, Result};
use crate::phase::{ParamFactor, Phase};
use crate::scalar::ScalarC;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RuleName {
    ColorChange,
    Fuse,
    HadamardCancel,
    Identity,
    LocalComplement,
    Pivot,
    PivotGadget,
    Copy,
    GadgetFuse,
    GadgetNormalize,
    ScalarElim,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RewriteStep {
    pub rule_name: RuleName,
    pub affected_spiders: Vec<SpiderId>,
    /// Scalar after the step divided by the scalar before it.
    pub scalar_delta: ScalarC,
}

/// Counts of rule applications, per rule.
pub type RuleCounts = BTreeMap<RuleName, usize>;

impl PartialOrd for RuleName {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RuleName {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}

fn interior(d: &ZxDiagram, v: SpiderId) -> bool {
    d.boundary_legs(v) == 0
}

fn param_free(d: &ZxDiagram, v: SpiderId) -> bool {
    d.phase(v).is_param_free()
}

/// Neighbour count in a graph-like diagram.
fn arity(d: &ZxDiagram, v: SpiderId) -> usize {
    d.incident(v).len()
}

fn is_leaf(d: &ZxDiagram, v: SpiderId) -> bool {
    interior(d, v) && arity(d, v) == 1
}

/// Spider with exactly one interior leaf neighbour.
fn gadget_leaf(d: &ZxDiagram, h: SpiderId) -> Option<SpiderId> {
    let mut leaf = None;
    for w in d.neighbors(h) {
        if is_leaf(d, w) {
            if leaf.is_some() {
                return None;
            }
            leaf = Some(w);
        }
    }
    leaf
}

fn has_leaf(d: &ZxDiagram, v: SpiderId) -> bool {
    d.neighbors(v).any(|w| is_leaf(d, w))
}

/// Adds a Hadamard edge between Z-spiders of a graph-like diagram,
/// cancelling against an existing one (Hopf) or turning into a phase when
/// `u == w`.
pub(crate) fn add_h_smart(d: &mut ZxDiagram, u: SpiderId, w: SpiderId) {
    if u == w {
        d.add_eighths(u, 4);
        d.scalar_mut().mul_sqrt2_pow(-1);
        return;
    }
    let m = d.edge_mult(u, w);
    debug_assert_eq!(m.plain, 0, "graph-like diagrams have no plain edges");
    if m.hadamard > 0 {
        d.remove_all_edges(u, w);
        d.scalar_mut().mul_sqrt2_pow(-2);
    } else {
        d.add_edge(u, w, EdgeKind::Hadamard);
    }
}

/// Fuses `b` into `a`, as if they were joined by a plain wire.
pub(crate) fn fuse_into(d: &mut ZxDiagram, a: SpiderId, b: SpiderId) {
    let ph = d.phase(b).clone();
    d.add_to_phase(a, &ph);
    let inc = d.incident(b).to_vec();
    d.redirect_wires(b, a, EdgeKind::Plain);
    d.remove_spider(b);
    for (w, m) in inc {
        debug_assert_eq!(m.plain, 0);
        let w = if w == b { a } else { w };
        for _ in 0..m.hadamard {
            add_h_smart(d, a, w);
        }
    }
}

/// Color-changes X-spiders, fuses plain-connected spiders, and clears
/// self-loops and parallel Hadamard pairs.
pub fn to_graph_like(d: &mut ZxDiagram) -> RuleCounts {
    let mut counts = RuleCounts::new();
    let ids: Vec<SpiderId> = d.spider_ids().collect();
    for &v in &ids {
        if d.kind(v) == SpiderKind::X {
            color_change(d, v);
            *counts.entry(RuleName::ColorChange).or_default() += 1;
        }
    }
    for &u in &ids {
        if !d.contains(u) {
            continue;
        }
        loop {
            let next = d
                .incident(u)
                .iter()
                .find(|(w, m)| *w != u && m.plain > 0)
                .map(|e| e.0);
            let Some(w) = next else { break };
            fuse_plain(d, u, w);
            *counts.entry(RuleName::Fuse).or_default() += 1;
        }
    }
    for u in d.spider_ids().collect::<Vec<_>>() {
        let loops = d.edge_mult(u, u);
        if loops.total() > 0 {
            d.remove_all_edges(u, u);
            d.add_eighths(u, 4 * loops.hadamard as i64);
            d.scalar_mut().mul_sqrt2_pow(-(loops.hadamard as i32));
        }
        let inc = d.incident(u).to_vec();
        for (w, m) in inc {
            if w > u && m.hadamard > 1 {
                let pairs = m.hadamard / 2;
                d.scalar_mut().mul_sqrt2_pow(-2 * pairs as i32);
                d.set_edge_mult(
                    u,
                    w,
                    crate::diagram::EdgeMult {
                        plain: 0,
                        hadamard: m.hadamard % 2,
                    },
                );
                *counts.entry(RuleName::HadamardCancel).or_default() += pairs as usize;
            }
        }
    }
    counts
}

/// Turns an X-spider into a Z-spider by toggling every incident edge.
pub fn color_change(d: &mut ZxDiagram, v: SpiderId) {
    let kind = match d.kind(v) {
        SpiderKind::X => SpiderKind::Z,
        SpiderKind::Z => SpiderKind::X,
    };
    d.set_kind(v, kind);
    for (w, m) in d.incident(v).to_vec() {
        if w != v {
            d.set_edge_mult(
                v,
                w,
                crate::diagram::EdgeMult {
                    plain: m.hadamard,
                    hadamard: m.plain,
                },
            );
        }
    }
    for w in d.inputs_mut().iter_mut() {
        if w.spider == v {
            w.kind = w.kind.toggled();
        }
    }
    for w in d.outputs_mut().iter_mut() {
        if w.spider == v {
            w.kind = w.kind.toggled();
        }
    }
}

/// Fuses two Z-spiders joined by at least one plain edge, before the
/// diagram is graph-like.
fn fuse_plain(d: &mut ZxDiagram, a: SpiderId, b: SpiderId) {
    let ph = d.phase(b).clone();
    d.add_to_phase(a, &ph);
    let between = d.edge_mult(a, b);
    let inc = d.incident(b).to_vec();
    d.redirect_wires(b, a, EdgeKind::Plain);
    d.remove_spider(b);
    // Remaining a–b edges and b's own loops become loops on a; plain loops
    // on a Z-spider vanish, Hadamard loops are cleared later.
    let mut h_loops = between.hadamard;
    for (w, m) in inc {
        if w == b {
            h_loops += m.hadamard;
        } else if w != a {
            d.add_edges(a, w, EdgeKind::Plain, m.plain);
            d.add_edges(a, w, EdgeKind::Hadamard, m.hadamard);
        }
    }
    d.add_edges(a, a, EdgeKind::Hadamard, h_loops);
}

pub fn is_graph_like(d: &ZxDiagram) -> bool {
    d.spider_ids().all(|v| {
        d.kind(v) == SpiderKind::Z
            && d
                .incident(v)
                .iter()
                .all(|&(w, m)| w != v && m.plain == 0 && m.hadamard == 1)
    })
}

// ----------------------------------------------------------------------
// Rules. Each `try_*` checks its precondition at the given spider and, if
// it holds, applies the rewrite and returns the affected spiders.

fn try_scalar_elim(d: &mut ZxDiagram, v: SpiderId, _safe: bool) -> Option<Vec<SpiderId>> {
    if !interior(d, v) {
        return None;
    }
    match arity(d, v) {
        0 => {
            let ph = d.phase(v).clone();
            d.remove_spider(v);
            if ph.is_param_free() {
                d.mul_scalar(ScalarC::one_plus_phase(ph.fixed()));
            } else {
                d.add_factor(ParamFactor::new(
                    ph.params().iter().copied(),
                    [
                        ScalarC::one_plus_phase(ph.fixed()),
                        ScalarC::one_plus_phase((ph.fixed() + 4) % 8),
                    ],
                ));
            }
            Some(vec![v])
        }
        1 => {
            let w = d.incident(v)[0].0;
            if !(is_leaf(d, w) && param_free(d, v) && param_free(d, w)) {
                return None;
            }
            let (a, b) = (d.phase(v).fixed(), d.phase(w).fixed());
            let val = ScalarC::one()
                + ScalarC::phase(a)
                + ScalarC::phase(b)
                + -ScalarC::phase((a + b) % 8);
            d.remove_spider(v);
            d.remove_spider(w);
            d.mul_scalar(val * ScalarC::sqrt2_pow(-1));
            Some(vec![v, w])
        }
        _ => None,
    }
}

fn try_identity(d: &mut ZxDiagram, v: SpiderId, _safe: bool) -> Option<Vec<SpiderId>> {
    if !(interior(d, v) && d.phase(v).is_zero() && arity(d, v) == 2) {
        return None;
    }
    let (a, b) = (d.incident(v)[0].0, d.incident(v)[1].0);
    d.remove_spider(v);
    fuse_into(d, a, b);
    Some(vec![v, a, b])
}

fn try_local_complement(d: &mut ZxDiagram, v: SpiderId, _safe: bool) -> Option<Vec<SpiderId>> {
    if !(interior(d, v) && d.phase(v).is_proper_clifford()) {
        return None;
    }
    let fixed = d.phase(v).fixed() as i64;
    let ns = d.neighbor_vec(v);
    let n = ns.len() as i32;
    d.remove_spider(v);
    for (i, &a) in ns.iter().enumerate() {
        d.add_eighths(a, -fixed);
        for &b in &ns[i + 1..] {
            add_h_smart(d, a, b);
        }
    }
    d.scalar_mut().mul_sqrt2_pow((n - 1) * (n - 2) / 2);
    d.scalar_mut().mul_phase(if fixed == 2 { 1 } else { 7 });
    let mut aff = vec![v];
    aff.extend(ns);
    Some(aff)
}

/// Pivot on an adjacent pair of interior Pauli spiders.
fn pivot(d: &mut ZxDiagram, u: SpiderId, v: SpiderId) -> Vec<SpiderId> {
    let a = d.phase(u).fixed() as i64 / 4;
    let b = d.phase(v).fixed() as i64 / 4;
    let nu: Vec<SpiderId> = d.neighbors(u).filter(|&w| w != v).collect();
    let nv: Vec<SpiderId> = d.neighbors(v).filter(|&w| w != u).collect();
    let shared: Vec<SpiderId> = nu.iter().copied().filter(|w| nv.contains(w)).collect();
    let only_u: Vec<SpiderId> = nu.iter().copied().filter(|w| !shared.contains(w)).collect();
    let only_v: Vec<SpiderId> = nv.iter().copied().filter(|w| !shared.contains(w)).collect();
    let (x, y, s) = (nu.len() as i32, nv.len() as i32, shared.len() as i32);
    d.remove_spider(u);
    d.remove_spider(v);
    for &p in &only_u {
        for &q in &only_v {
            add_h_smart(d, p, q);
        }
        for &q in &shared {
            add_h_smart(d, p, q);
        }
    }
    for &p in &only_v {
        for &q in &shared {
            add_h_smart(d, p, q);
        }
    }
    for &p in &only_u {
        d.add_eighths(p, 4 * b);
    }
    for &p in &only_v {
        d.add_eighths(p, 4 * a);
    }
    for &p in &shared {
        d.add_eighths(p, 4 * (a + b + 1));
    }
    d.scalar_mut().mul_sqrt2_pow((x - 1) * (y - 1) - s * s);
    if a * b == 1 {
        *d.scalar_mut() = -*d.scalar();
    }
    let mut aff = vec![u, v];
    aff.extend(nu);
    aff.extend(only_v);
    aff
}

fn pauli_interior(d: &ZxDiagram, v: SpiderId) -> bool {
    interior(d, v) && d.phase(v).is_pauli()
}

fn try_pivot(d: &mut ZxDiagram, u: SpiderId, _safe: bool) -> Option<Vec<SpiderId>> {
    if !pauli_interior(d, u) {
        return None;
    }
    let v = d.neighbors(u).find(|&v| pauli_interior(d, v))?;
    Some(pivot(d, u, v))
}

/// A Pauli leaf copies through its (parameter-free) neighbour.
fn try_copy(d: &mut ZxDiagram, v: SpiderId, _safe: bool) -> Option<Vec<SpiderId>> {
    if !(pauli_interior(d, v) && arity(d, v) == 1) {
        return None;
    }
    let w = d.incident(v)[0].0;
    if !(interior(d, w) && param_free(d, w)) {
        return None;
    }
    let b = d.phase(v).fixed() / 4;
    let alpha = d.phase(w).fixed();
    let others: Vec<SpiderId> = d.neighbors(w).filter(|&x| x != v).collect();
    let m = others.len() as i32;
    d.remove_spider(v);
    d.remove_spider(w);
    for &x in &others {
        d.add_eighths(x, 4 * b as i64);
    }
    d.scalar_mut().mul_sqrt2_pow(1 - m);
    d.scalar_mut().mul_phase((alpha * b) % 8);
    let mut aff = vec![v, w];
    aff.extend(others);
    Some(aff)
}

/// A phase-π gadget hub flips to phase 0 by negating its leaf.
fn try_gadget_normalize(d: &mut ZxDiagram, h: SpiderId, _safe: bool) -> Option<Vec<SpiderId>> {
    if !(interior(d, h) && d.phase(h).is_pauli() && d.phase(h).fixed() == 4 && arity(d, h) >= 2) {
        return None;
    }
    let l = gadget_leaf(d, h)?;
    if !param_free(d, l) || d.phase(l).is_pauli() {
        return None;
    }
    let beta = d.phase(l).fixed();
    d.set_phase(h, Phase::zero());
    d.set_phase(l, Phase::eighths(-(beta as i64)));
    d.scalar_mut().mul_phase(beta);
    Some(vec![h, l])
}

/// Hub/leaf pairs with phase-0 hubs, keyed by their target set.
fn collect_gadgets(d: &ZxDiagram) -> BTreeMap<Vec<SpiderId>, Vec<(SpiderId, SpiderId)>> {
    let mut by_targets: BTreeMap<Vec<SpiderId>, Vec<(SpiderId, SpiderId)>> = BTreeMap::new();
    for h in d.spider_ids() {
        if let Some(t) = gadget_targets(d, h) {
            by_targets.entry(t.1).or_default().push((h, t.0));
        }
    }
    by_targets
}

fn gadget_targets(d: &ZxDiagram, h: SpiderId) -> Option<(SpiderId, Vec<SpiderId>)> {
    if !(interior(d, h) && d.phase(h).is_zero() && arity(d, h) >= 2) {
        return None;
    }
    let l = gadget_leaf(d, h)?;
    let targets: Vec<SpiderId> = d.neighbors(h).filter(|&w| w != l).collect();
    Some((l, targets))
}

fn try_gadget_fuse_all(d: &mut ZxDiagram) -> Vec<Vec<SpiderId>> {
    let mut applied = Vec::new();
    for (targets, group) in collect_gadgets(d) {
        if group.len() < 2 {
            continue;
        }
        let (h0, l0) = group[0];
        for &(h, l) in &group[1..] {
            let still = |d: &ZxDiagram, h: SpiderId, l: SpiderId| {
                d.contains(h)
                    && d.contains(l)
                    && gadget_targets(d, h).is_some_and(|(ll, t)| ll == l && t == targets)
            };
            if !(still(d, h0, l0) && still(d, h, l)) {
                continue;
            }
            let ph = d.phase(l).clone();
            d.add_to_phase(l0, &ph);
            d.remove_spider(l);
            d.remove_spider(h);
            d.scalar_mut().mul_sqrt2_pow(1 - targets.len() as i32);
            applied.push(vec![h0, l0, h, l]);
        }
    }
    applied
}

/// Pivots a Pauli spider against a non-Pauli neighbour by first moving the
/// neighbour's phase out onto a fresh gadget.
fn try_pivot_gadget(d: &mut ZxDiagram, u: SpiderId, _safe: bool) -> Option<Vec<SpiderId>> {
    if !(pauli_interior(d, u) && arity(d, u) >= 2 && !has_leaf(d, u)) {
        return None;
    }
    let v = d.neighbors(u).find(|&v| {
        interior(d, v)
            && param_free(d, v)
            && !d.phase(v).is_pauli()
            && arity(d, v) >= 2
            && !has_leaf(d, v)
    })?;
    let ph = d.phase(v).clone();
    d.set_phase(v, Phase::zero());
    let h = d.add_z(0);
    let l = d.add_spider(SpiderKind::Z, ph);
    d.add_edge(v, h, EdgeKind::Hadamard);
    d.add_edge(h, l, EdgeKind::Hadamard);
    let mut aff = pivot(d, u, v);
    aff.extend([h, l]);
    Some(aff)
}

type Rule = fn(&mut ZxDiagram, SpiderId, bool) -> Option<Vec<SpiderId>>;

const VERTEX_RULES: [(RuleName, Rule); 6] = [
    (RuleName::ScalarElim, try_scalar_elim),
    (RuleName::Identity, try_identity),
    (RuleName::LocalComplement, try_local_complement),
    (RuleName::Pivot, try_pivot),
    (RuleName::Copy, try_copy),
    (RuleName::GadgetNormalize, try_gadget_normalize),
];

/// Drives rules to a fixpoint, optionally recording a trace.
pub struct Simplifier<'t> {
    pub trace: Option<&'t mut Vec<RewriteStep>>,
    pub counts: RuleCounts,
}

impl<'t> Simplifier<'t> {
    pub fn new() -> Self {
        Simplifier {
            trace: None,
            counts: RuleCounts::new(),
        }
    }

    pub fn with_trace(trace: &'t mut Vec<RewriteStep>) -> Self {
        Simplifier {
            trace: Some(trace),
            counts: RuleCounts::new(),
        }
    }

    fn record(&mut self, rule: RuleName, spiders: Vec<SpiderId>, before: ScalarC, after: ScalarC) {
        *self.counts.entry(rule).or_default() += 1;
        if let Some(t) = self.trace.as_mut() {
            let delta = match before.inv() {
                Some(inv) => after * inv,
                None => ScalarC::zero(),
            };
            t.push(RewriteStep {
                rule_name: rule,
                affected_spiders: spiders,
                scalar_delta: delta,
            });
        }
    }

    /// Simplifies in place. Parameterized spiders are never deleted, so the
    /// same routine serves both the full and the parameter-safe variant.
    pub fn run(&mut self, d: &mut ZxDiagram) {
        let before = *d.scalar();
        for (rule, n) in to_graph_like(d) {
            *self.counts.entry(rule).or_default() += n;
        }
        if let Some(t) = self.trace.as_mut() {
            if d.spider_ids().next().is_some() {
                let delta = before.inv().map_or(ScalarC::zero(), |i| *d.scalar() * i);
                t.push(RewriteStep {
                    rule_name: RuleName::Fuse,
                    affected_spiders: Vec::new(),
                    scalar_delta: delta,
                });
            }
        }
        if self.zero_out(d) {
            return;
        }
        loop {
            let mut changed = false;
            for (rule, f) in VERTEX_RULES {
                let ids: Vec<SpiderId> = d.spider_ids().collect();
                for v in ids {
                    if !d.contains(v) {
                        continue;
                    }
                    let before = *d.scalar();
                    if let Some(aff) = f(d, v, true) {
                        self.record(rule, aff, before, *d.scalar());
                        changed = true;
                        if self.zero_out(d) {
                            return;
                        }
                    }
                }
            }
            let before = *d.scalar();
            let fused = try_gadget_fuse_all(d);
            if !fused.is_empty() {
                changed = true;
                let n = fused.len();
                for (i, aff) in fused.into_iter().enumerate() {
                    // Only the last entry carries the combined delta.
                    let after = if i + 1 == n { *d.scalar() } else { before };
                    self.record(RuleName::GadgetFuse, aff, before, after);
                }
            }
            if !changed {
                let ids: Vec<SpiderId> = d.spider_ids().collect();
                for v in ids {
                    if !d.contains(v) {
                        continue;
                    }
                    let before = *d.scalar();
                    if let Some(aff) = try_pivot_gadget(d, v, true) {
                        self.record(RuleName::PivotGadget, aff, before, *d.scalar());
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Empties a scalar diagram whose scalar has become exactly zero.
    fn zero_out(&mut self, d: &mut ZxDiagram) -> bool {
        if !d.scalar().is_zero() {
            return false;
        }
        if d.is_scalar() {
            clear_to_zero(d);
        }
        true
    }
}

impl Default for Simplifier<'_> {
    fn default() -> Self {
        Self::new()
    }
}

/// Replaces a scalar diagram by the empty diagram with scalar 0.
pub(crate) fn clear_to_zero(d: &mut ZxDiagram) {
    let ids: Vec<SpiderId> = d.spider_ids().collect();
    for v in ids {
        d.remove_spider(v);
    }
    d.factors_mut().clear();
    d.params_mut().clear();
    *d.scalar_mut() = ScalarC::zero();
}

/// Applies one rule application (the first match, in rule order then
/// ascending spider id) to a graph-like diagram.
pub fn step_once(d: &mut ZxDiagram) -> Option<RewriteStep> {
    let ids: Vec<SpiderId> = d.spider_ids().collect();
    let rules: Vec<(RuleName, Rule)> = VERTEX_RULES
        .iter()
        .copied()
        .chain([(RuleName::PivotGadget, try_pivot_gadget as Rule)])
        .collect();
    for (rule, f) in rules {
        for &v in &ids {
            let before = *d.scalar();
            if let Some(aff) = f(d, v, true) {
                let delta = before.inv().map_or(ScalarC::zero(), |i| *d.scalar() * i);
                return Some(RewriteStep {
                    rule_name: rule,
                    affected_spiders: aff,
                    scalar_delta: delta,
                });
            }
        }
    }
    let before = *d.scalar();
    let mut fused = try_gadget_fuse_all(d);
    if !fused.is_empty() {
        let delta = before.inv().map_or(ScalarC::zero(), |i| *d.scalar() * i);
        return Some(RewriteStep {
            rule_name: RuleName::GadgetFuse,
            affected_spiders: fused.swap_remove(0),
            scalar_delta: delta,
        });
    }
    None
}

/// Full Clifford simplification of a parameter-free diagram.
pub fn clifford_simplify(d: &ZxDiagram) -> Result<ZxDiagram> {
    if !d.used_params().is_empty() {
        return Err(Error::Parameterized);
    }
    let mut r = d.clone();
    Simplifier::new().run(&mut r);
    Ok(r)
}

/// Simplification valid for every assignment of the diagram's parameters.
pub fn param_safe_simplify(d: &ZxDiagram) -> ZxDiagram {
    let mut r = d.clone();
    Simplifier::new().run(&mut r);
    r
}
