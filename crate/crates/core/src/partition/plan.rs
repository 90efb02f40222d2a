//! Partition plans: per-part costs, the simulated regroup schedule, the
//! choice of k, and the cut segment diagrams a plan describes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{to_partition_hypergraph, FmPartitioner, KWayPartition, PartitionHypergraph, Partitioner};
use crate::costmodel::{CostModel, Estimate};
use crate::cutting::cut_leg_coefficient;
use crate::diagram::{SpiderId, SpiderKind, ZxDiagram};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::phase::{ParamFactor, ParamId, Phase};
use crate::regroup::simulate_schedule_steps;
use crate::scalar::ScalarC;

#[derive(Clone, Copy, Debug)]
pub struct PlanOptions {
    /// Largest k tried; `None` means `min(16, t/4)`.
    pub k_max: Option<usize>,
    pub eps: f64,
    /// Only consider k ≥ 2 (falls back to k = 1 if no split exists).
    pub force_partition: bool,
    pub partitioner: FmPartitioner,
    pub exec: Exec,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            k_max: None,
            eps: 0.1,
            force_partition: false,
            partitioner: FmPartitioner::default(),
            exec: Exec::default(),
        }
    }
}

pub fn default_k_max(t: usize) -> usize {
    (t / 4).clamp(1, 16)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PartInfo {
    /// T-spiders in the part (cut spiders excluded).
    pub t: usize,
    /// Cut parameters touching the part.
    pub c: usize,
    pub spiders: usize,
    pub params: Vec<ParamId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlannedStep {
    pub i: usize,
    pub j: usize,
    pub p: usize,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Candidate {
    pub k: usize,
    pub cuts: usize,
    pub s_precomp: f64,
    pub s_crossref: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PartitionPlan {
    pub k: usize,
    /// Part of every non-cut spider that has an edge.
    pub assignment: BTreeMap<SpiderId, usize>,
    /// Ascending; the i-th cut spider becomes parameter i.
    pub cut_spiders: Vec<SpiderId>,
    pub parts: Vec<PartInfo>,
    pub total_cuts: usize,
    pub t_count: usize,
    pub alpha: f64,
    /// `Σ 2^{α t_i + c_i}`; for k = 1 this is `2^{αt}`.
    pub s_precomp: f64,
    /// Simulated cheapest-first regroup cost.
    pub s_crossref: f64,
    /// `2^C` products of the brute-force parameter sum.
    pub naive_crossref: f64,
    pub max_step_params: usize,
    pub t_decomp: Estimate,
    /// Projected time of this plan; for k = 1 it is the direct estimate.
    pub t_smart: Estimate,
    pub schedule: Vec<PlannedStep>,
    /// Every k considered, when the plan came from [`choose_k`].
    pub candidates: Vec<Candidate>,
    /// Part of each hypergraph node, in [`to_partition_hypergraph`] order.
    #[serde(skip)]
    pub node_part: Vec<usize>,
}

impl PartitionPlan {
    /// Checks that the non-cut spiders split along the assignment: no edge
    /// joins two parts, and every edge belongs to one of the k parts.
    pub fn check_separator(&self, d: &ZxDiagram) -> Result<()> {
        let cut: BTreeSet<SpiderId> = self.cut_spiders.iter().copied().collect();
        for (u, v, _) in d.edges() {
            if u == v {
                continue;
            }
            match (self.assignment.get(&u), self.assignment.get(&v)) {
                (Some(a), Some(b)) if a != b => {
                    return Err(Error::Invalid(format!("edge {u}-{v} joins parts {a} and {b}")))
                }
                (None, _) if !cut.contains(&u) => {
                    return Err(Error::Invalid(format!("spider {u} is neither assigned nor cut")))
                }
                (_, None) if !cut.contains(&v) => {
                    return Err(Error::Invalid(format!("spider {v} is neither assigned nor cut")))
                }
                _ => {}
            }
        }
        if self.assignment.values().any(|&p| p >= self.k) {
            return Err(Error::Invalid("assignment names a part beyond k".into()));
        }
        Ok(())
    }
}

fn check_input(d: &ZxDiagram) -> Result<()> {
    if !d.is_scalar() {
        return Err(Error::NotScalar);
    }
    if !d.used_params().is_empty() {
        return Err(Error::Parameterized);
    }
    Ok(())
}

fn single_part_plan(d: &ZxDiagram, cm: &CostModel) -> PartitionPlan {
    let h = to_partition_hypergraph(d);
    let t = d.t_count();
    let est = cm.estimate_decomp(t);
    let assignment = h.live_nets().map(|n| (n.spider, 0)).collect();
    PartitionPlan {
        k: 1,
        assignment,
        cut_spiders: Vec::new(),
        parts: vec![PartInfo {
            t,
            c: 0,
            spiders: d.num_spiders(),
            params: Vec::new(),
        }],
        total_cuts: 0,
        t_count: t,
        alpha: cm.alpha,
        s_precomp: est.calcs,
        s_crossref: 0.0,
        naive_crossref: 1.0,
        max_step_params: 0,
        t_decomp: est,
        t_smart: est,
        schedule: Vec::new(),
        candidates: Vec::new(),
        node_part: vec![0; h.nodes.len()],
    }
}

/// Costs the given k-way split of `d`. Empty parts are dropped and the
/// rest renumbered in order.
pub fn plan_for_partition(
    d: &ZxDiagram,
    h: &PartitionHypergraph,
    kw: &KWayPartition,
    cm: &CostModel,
) -> Result<PartitionPlan> {
    check_input(d)?;
    if kw.node_part.len() != h.nodes.len() {
        return Err(Error::Invalid("partition does not match the hypergraph".into()));
    }
    let mut used = vec![false; kw.k];
    for &p in &kw.node_part {
        used[p] = true;
    }
    let mut renumber = vec![usize::MAX; kw.k];
    let mut k = 0;
    for (p, &u) in used.iter().enumerate() {
        if u {
            renumber[p] = k;
            k += 1;
        }
    }
    if k <= 1 {
        return Ok(single_part_plan(d, cm));
    }
    let node_part: Vec<usize> = kw.node_part.iter().map(|&p| renumber[p]).collect();
    let kw = KWayPartition::from_node_parts(h, k, node_part);
    let param_of: BTreeMap<SpiderId, ParamId> =
        kw.cut_spiders.iter().enumerate().map(|(i, &v)| (v, i as ParamId)).collect();

    let mut parts = vec![
        PartInfo {
            t: 0,
            c: 0,
            spiders: 0,
            params: Vec::new(),
        };
        k
    ];
    for (&v, &p) in &kw.assignment {
        parts[p].spiders += 1;
        if d.phase(v).is_t_like() {
            parts[p].t += 1;
        }
    }
    for n in h.live_nets() {
        if let Some(&pid) = param_of.get(&n.spider) {
            let touched: BTreeSet<usize> = n.pins.iter().map(|&x| kw.node_part[x]).collect();
            for p in touched {
                parts[p].params.push(pid);
            }
        }
    }
    for part in &mut parts {
        part.params.sort_unstable();
        part.c = part.params.len();
    }
    let s_precomp: f64 = parts
        .iter()
        .map(|p| (cm.alpha * p.t as f64 + p.c as f64).exp2())
        .sum();
    let sets: Vec<Vec<ParamId>> = parts.iter().map(|p| p.params.clone()).collect();
    let (s_crossref, max_p, steps) = simulate_schedule_steps(&sets);
    let s_crossref = s_crossref as f64;
    let t = d.t_count();
    let c = kw.cut_spiders.len();
    Ok(PartitionPlan {
        k,
        assignment: kw.assignment,
        cut_spiders: kw.cut_spiders,
        parts,
        total_cuts: c,
        t_count: t,
        alpha: cm.alpha,
        s_precomp,
        s_crossref,
        naive_crossref: (c as f64).exp2(),
        max_step_params: max_p,
        t_decomp: cm.estimate_decomp(t),
        t_smart: cm.estimate_smart(s_precomp, s_crossref),
        schedule: steps
            .into_iter()
            .map(|(i, j, p)| PlannedStep {
                i,
                j,
                p,
                cost: (p as f64).exp2(),
            })
            .collect(),
        candidates: Vec::new(),
        node_part: kw.node_part,
    })
}

/// A plan from an explicit spider → part map; spiders with edges that are
/// not in the map are cut. An edge between two cut spiders goes to the
/// lowest part either of them touches.
pub fn plan_from_assignment(
    d: &ZxDiagram,
    assignment: &BTreeMap<SpiderId, usize>,
    cm: &CostModel,
) -> Result<PartitionPlan> {
    check_input(d)?;
    let h = to_partition_hypergraph(d);
    let k = assignment.values().map(|&p| p + 1).max().unwrap_or(1);
    let mut lowest: BTreeMap<SpiderId, usize> = BTreeMap::new();
    for &(u, v, _) in &h.nodes {
        for (x, y) in [(u, v), (v, u)] {
            if let Some(&p) = assignment.get(&y) {
                let e = lowest.entry(x).or_insert(p);
                *e = (*e).min(p);
            }
        }
    }
    let mut node_part = Vec::with_capacity(h.nodes.len());
    for &(u, v, _) in &h.nodes {
        let p = match (assignment.get(&u), assignment.get(&v)) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Invalid(format!("edge {u}-{v} joins parts {a} and {b}")))
            }
            (Some(&a), _) | (_, Some(&a)) => a,
            (None, None) => {
                let lu = lowest.get(&u).copied().unwrap_or(usize::MAX);
                let lv = lowest.get(&v).copied().unwrap_or(usize::MAX);
                match lu.min(lv) {
                    usize::MAX => 0,
                    p => p,
                }
            }
        };
        node_part.push(p);
    }
    let kw = KWayPartition::from_node_parts(&h, k, node_part);
    if kw.assignment.iter().any(|(v, p)| assignment.get(v) != Some(p)) {
        return Err(Error::Invalid("assignment is not consistent with the edges".into()));
    }
    if k == 1 {
        return Ok(single_part_plan(d, cm));
    }
    plan_for_partition(d, &h, &kw, cm)
}

/// Tries k = 1..=k_max and keeps the plan with the smallest projected
/// time; ties go to the smaller k. Forcing a partition raises k_max to at
/// least 2.
pub fn choose_k(d: &ZxDiagram, cm: &CostModel, opts: &PlanOptions) -> Result<PartitionPlan> {
    check_input(d)?;
    cm.validate()?;
    let h = to_partition_hypergraph(d);
    let t = d.t_count();
    let live = h.live_nets().count();
    let mut k_max = opts.k_max.unwrap_or_else(|| default_k_max(t));
    if opts.force_partition {
        k_max = k_max.max(2);
    }
    let k_max = k_max.min(live);
    let ks: Vec<usize> = (2..=k_max).collect();
    let tried = opts.exec.map_slice(&ks, |&k| {
        let kw = opts.partitioner.partition(&h, k, opts.eps)?;
        plan_for_partition(d, &h, &kw, cm)
    });
    let mut plans = vec![single_part_plan(d, cm)];
    for p in tried {
        plans.push(p?);
    }
    let candidates: Vec<Candidate> = plans
        .iter()
        .map(|p| Candidate {
            k: p.k,
            cuts: p.total_cuts,
            s_precomp: p.s_precomp,
            s_crossref: p.s_crossref,
            seconds: p.t_smart.seconds,
        })
        .collect();
    let eligible = |p: &PartitionPlan| !opts.force_partition || p.k >= 2;
    let mut best: Option<usize> = None;
    for (i, p) in plans.iter().enumerate() {
        if !eligible(p) {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => {
                let (s, bs) = (p.t_smart.seconds, plans[b].t_smart.seconds);
                s < bs * (1.0 - 1e-12) || (s <= bs * (1.0 + 1e-12) && p.k < plans[b].k)
            }
        };
        if better {
            best = Some(i);
        }
    }
    let mut plan = plans.swap_remove(best.unwrap_or(0));
    plan.candidates = candidates;
    Ok(plan)
}

/// Loops a cut or isolated spider sees once it is a Z-spider: phase and
/// scalar corrections for the Hadamard loops.
fn loop_correction(d: &ZxDiagram, v: SpiderId) -> (u8, i32) {
    let loops = d.edge_mult(v, v);
    let h = match d.kind(v) {
        SpiderKind::Z => loops.hadamard,
        SpiderKind::X => loops.plain,
    };
    let alpha = ((d.phase(v).fixed() as u32 + 4 * h) % 8) as u8;
    (alpha, -(h as i32))
}

/// The segment diagrams of a plan: part i's spiders plus one parameterized
/// piece per cut leg it receives. Summing the product of the segment
/// values over all parameter assignments gives the value of `d`.
pub fn build_segments(d: &ZxDiagram, plan: &PartitionPlan) -> Result<Vec<ZxDiagram>> {
    check_input(d)?;
    let h = to_partition_hypergraph(d);
    if plan.node_part.len() != h.nodes.len() {
        return Err(Error::Invalid("plan was made for a different diagram".into()));
    }
    let param_of: BTreeMap<SpiderId, ParamId> =
        plan.cut_spiders.iter().enumerate().map(|(i, &v)| (v, i as ParamId)).collect();
    let mut members: Vec<Vec<SpiderId>> = vec![Vec::new(); plan.k];
    for (&v, &p) in &plan.assignment {
        members[p].push(v);
    }
    let mut segs = Vec::with_capacity(plan.k);
    let mut maps = Vec::with_capacity(plan.k);
    for (i, keep) in members.iter().enumerate() {
        let (mut sub, map) = d.induced(keep);
        for &p in &plan.parts[i].params {
            sub.declare_param(p);
        }
        segs.push(sub);
        maps.push(map);
    }
    for (idx, &(u, v, kind)) in h.nodes.iter().enumerate() {
        let cu = param_of.get(&u).copied();
        let cv = param_of.get(&v).copied();
        if cu.is_none() && cv.is_none() {
            continue;
        }
        let p = plan.node_part[idx];
        let mut eff = kind;
        let mut ends = [0; 2];
        for (slot, (x, cx)) in [(u, cu), (v, cv)].into_iter().enumerate() {
            ends[slot] = match cx {
                Some(pid) => {
                    if d.kind(x) == SpiderKind::Z {
                        eff = eff.toggled();
                    }
                    segs[p].add_spider(SpiderKind::Z, Phase::param(pid))
                }
                None => maps[p][x].ok_or_else(|| Error::Invalid(format!("spider {x} is not in part {p}")))?,
            };
        }
        segs[p].add_edge(ends[0], ends[1], eff);
    }
    let s = cut_leg_coefficient();
    for (&v, &pid) in &param_of {
        let legs: usize = d
            .incident(v)
            .iter()
            .filter(|e| e.0 != v)
            .map(|e| e.1.total() as usize)
            .sum();
        let (alpha, sq) = loop_correction(d, v);
        let mut sn = ScalarC::sqrt2_pow(sq);
        for _ in 0..legs {
            sn *= s;
        }
        let home = plan
            .parts
            .iter()
            .position(|p| p.params.binary_search(&pid).is_ok())
            .ok_or_else(|| Error::Invalid(format!("cut spider {v} touches no part")))?;
        segs[home].add_factor(ParamFactor::new([pid], [sn, sn * ScalarC::phase(alpha)]));
    }
    let mut global = *d.scalar();
    for v in d.spider_ids() {
        if d.incident(v).iter().all(|e| e.0 == v) && !plan.assignment.contains_key(&v) {
            let (alpha, sq) = loop_correction(d, v);
            global *= ScalarC::sqrt2_pow(sq) * ScalarC::one_plus_phase(alpha);
        }
    }
    segs[0].mul_scalar(global);
    Ok(segs)
}
