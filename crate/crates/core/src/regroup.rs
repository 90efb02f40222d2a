//! Segment scalar tables and their pairwise contraction.
//!
//! A segment's table is indexed by its parameters in ascending id order,
//! the first parameter being the most significant bit. With that order a
//! segment's index is the masked-bit extraction of the index over any
//! superset of its parameters, which is what the contraction kernel uses.

use serde::{Deserialize, Serialize};

use crate::cutting::{assignment_for, instantiate_in_place};
use crate::decompose::{decompose_with_stats, DecompOptions};
use crate::diagram::ZxDiagram;
use crate::error::{Error, Result};
use crate::rewrite::param_safe_simplify;
use crate::exec::Exec;
use crate::phase::ParamId;
use crate::scalar::ScalarC;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// Ascending, no duplicates.
    pub params: Vec<ParamId>,
    /// Length `2^params.len()`.
    pub table: Vec<ScalarC>,
}

impl Segment {
    pub fn new(params: Vec<ParamId>, table: Vec<ScalarC>) -> Result<Segment> {
        if params.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("segment parameters must be strictly ascending".into()));
        }
        if params.len() >= 63 || table.len() != 1usize << params.len() {
            return Err(Error::Invalid(format!(
                "table of length {} does not match {} parameters",
                table.len(),
                params.len()
            )));
        }
        Ok(Segment { params, table })
    }

    pub fn scalar(s: ScalarC) -> Segment {
        Segment {
            params: Vec::new(),
            table: vec![s],
        }
    }

    pub fn shares_param(&self, other: &Segment) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.params.len() && j < other.params.len() {
            match self.params[i].cmp(&other.params[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

/// Extracts the bits of `global` selected by `mask` and packs them, keeping
/// their relative order (a software `pext`).
pub fn local_index(global: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let bit = m.trailing_zeros();
        out |= ((global >> bit) & 1) << k;
        k += 1;
        m &= m - 1;
    }
    out
}

/// Inverse of [`local_index`]: scatters the low bits of `local` into the
/// positions selected by `mask` (a software `pdep`).
pub fn deposit(local: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let bit = m.trailing_zeros();
        out |= ((local >> k) & 1) << bit;
        k += 1;
        m &= m - 1;
    }
    out
}

/// Mask of `subset` within `all` (both ascending), MSB-first.
pub fn mask_of(all: &[ParamId], subset: &[ParamId]) -> u64 {
    let n = all.len();
    let mut m = 0u64;
    for p in subset {
        let pos = all.binary_search(p).expect("subset of union");
        m |= 1 << (n - 1 - pos);
    }
    m
}

fn sorted_union(a: &[ParamId], b: &[ParamId]) -> Vec<ParamId> {
    let mut u: Vec<ParamId> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

/// Parameters the regrouped pair keeps: those in exactly one of the two,
/// plus shared ones still needed by some other segment.
pub fn kept_params(a: &Segment, b: &Segment, elsewhere: &dyn Fn(ParamId) -> bool) -> Vec<ParamId> {
    sorted_union(&a.params, &b.params)
        .into_iter()
        .filter(|p| {
            let in_a = a.params.binary_search(p).is_ok();
            let in_b = b.params.binary_search(p).is_ok();
            in_a != in_b || elsewhere(*p)
        })
        .collect()
}

/// Contracts two segments into one over `keep`, summing every other shared
/// parameter out. Each output entry accumulates its `2^{|A∪B|-|keep|}`
/// products in ascending order of the summed bits, whichever `exec` is
/// used, so the result does not depend on the thread count.
pub fn contract_pair(a: &Segment, b: &Segment, keep: &[ParamId], exec: Exec) -> Segment {
    let union = sorted_union(&a.params, &b.params);
    let ma = mask_of(&union, &a.params);
    let mb = mask_of(&union, &b.params);
    let mk = mask_of(&union, keep);
    let full = if union.is_empty() { 0 } else { u64::MAX >> (64 - union.len()) };
    let ms = full & !mk;
    let inner = 1u64 << ms.count_ones();
    let entry = |o: usize| -> ScalarC {
        let base = deposit(o as u64, mk);
        let mut acc = ScalarC::zero();
        for s in 0..inner {
            let g = base | deposit(s, ms);
            acc += a.table[local_index(g, ma) as usize] * b.table[local_index(g, mb) as usize];
        }
        acc
    };
    let table = exec.map_range(1usize << keep.len(), entry);
    Segment {
        params: keep.to_vec(),
        table,
    }
}

/// Reference scatter form of [`contract_pair`]: one pass over all
/// `2^{|A∪B|}` global indices, adding each product into its output bin.
pub fn contract_pair_scatter(a: &Segment, b: &Segment, keep: &[ParamId]) -> Segment {
    let union = sorted_union(&a.params, &b.params);
    let ma = mask_of(&union, &a.params);
    let mb = mask_of(&union, &b.params);
    let mk = mask_of(&union, keep);
    let mut table = vec![ScalarC::zero(); 1 << keep.len()];
    for g in 0..(1u64 << union.len()) {
        let prod = a.table[local_index(g, ma) as usize] * b.table[local_index(g, mb) as usize];
        table[local_index(g, mk) as usize] += prod;
    }
    Segment {
        params: keep.to_vec(),
        table,
    }
}

/// Sum of a segment's table over all its parameters.
pub fn sum_out(s: &Segment) -> ScalarC {
    s.table.iter().copied().sum()
}

/// The connected pair with the fewest parameters between them, as
/// `(i, j, |A∪B|)` with `i < j`; ties go to the lexicographically first
/// pair.
pub fn min_pair(segments: &[Segment]) -> Option<(usize, usize, usize)> {
    min_pair_by(segments.len(), |i| &segments[i].params)
}

pub(crate) fn min_pair_by<'a>(
    n: usize,
    params: impl Fn(usize) -> &'a [ParamId],
) -> Option<(usize, usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (params(i), params(j));
            let mut shared = 0usize;
            let (mut x, mut y) = (0, 0);
            while x < a.len() && y < b.len() {
                match a[x].cmp(&b[y]) {
                    std::cmp::Ordering::Less => x += 1,
                    std::cmp::Ordering::Greater => y += 1,
                    std::cmp::Ordering::Equal => {
                        shared += 1;
                        x += 1;
                        y += 1;
                    }
                }
            }
            if shared == 0 {
                continue;
            }
            let p = a.len() + b.len() - shared;
            if best.is_none_or(|(_, _, bp)| p < bp) {
                best = Some((i, j, p));
            }
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RegroupStep {
    pub i: usize,
    pub j: usize,
    pub p: usize,
    pub cost: u128,
    pub cumulative: u128,
    pub kept: Vec<ParamId>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RegroupStats {
    /// Products computed while regrouping (`Σ 2^p` over steps), plus the
    /// entries summed for any segment left holding parameters of its own.
    pub s_crossref: u128,
    pub max_step_params: usize,
    pub steps: Vec<RegroupStep>,
}

/// Regroups the pair `(i, j)` in place: the merged segment takes slot `i`
/// and slot `j` is removed. Returns the step record.
pub fn regroup_pair(segments: &mut Vec<Segment>, i: usize, j: usize, exec: Exec) -> Result<RegroupStep> {
    if i == j || i >= segments.len() || j >= segments.len() {
        return Err(Error::Invalid(format!("bad segment pair ({i}, {j})")));
    }
    if !segments[i].shares_param(&segments[j]) {
        return Err(Error::Invalid(format!("segments {i} and {j} share no parameter")));
    }
    let elsewhere = |p: ParamId| {
        segments
            .iter()
            .enumerate()
            .any(|(k, s)| k != i && k != j && s.params.binary_search(&p).is_ok())
    };
    let keep = kept_params(&segments[i], &segments[j], &elsewhere);
    let p = sorted_union(&segments[i].params, &segments[j].params).len();
    let merged = contract_pair(&segments[i], &segments[j], &keep, exec);
    segments[i] = merged;
    segments.remove(j);
    Ok(RegroupStep {
        i,
        j,
        p,
        cost: 1u128 << p,
        cumulative: 0,
        kept: keep,
    })
}

/// Contracts all segments to one scalar, cheapest connected pair first.
pub fn regroup_all(segments: Vec<Segment>, exec: Exec) -> Result<(ScalarC, RegroupStats)> {
    let mut segs = segments;
    let mut stats = RegroupStats::default();
    while let Some((i, j, _)) = min_pair(&segs) {
        let mut step = regroup_pair(&mut segs, i, j, exec)?;
        stats.s_crossref += step.cost;
        stats.max_step_params = stats.max_step_params.max(step.p);
        step.cumulative = stats.s_crossref;
        stats.steps.push(step);
    }
    let mut result = ScalarC::one();
    for s in &segs {
        if !s.params.is_empty() {
            stats.s_crossref += s.table.len() as u128;
            stats.max_step_params = stats.max_step_params.max(s.params.len());
        }
        result *= sum_out(s);
    }
    Ok((result, stats))
}

/// Cross-reference cost of regrouping segments with the given parameter
/// sets, without touching any tables.
pub fn simulate_schedule(param_sets: &[Vec<ParamId>]) -> (u128, usize) {
    let (total, max_p, _) = simulate_schedule_steps(param_sets);
    (total, max_p)
}

/// [`simulate_schedule`] plus the `(i, j, p)` pair chosen at each step.
pub fn simulate_schedule_steps(param_sets: &[Vec<ParamId>]) -> (u128, usize, Vec<(usize, usize, usize)>) {
    let mut sets: Vec<Vec<ParamId>> = param_sets.to_vec();
    let mut total = 0u128;
    let mut max_p = 0usize;
    let mut steps = Vec::new();
    while let Some((i, j, p)) = min_pair_by(sets.len(), |k| &sets[k]) {
        let (a, b) = (&sets[i], &sets[j]);
        let keep: Vec<ParamId> = sorted_union(a, b)
            .into_iter()
            .filter(|q| {
                let ia = a.binary_search(q).is_ok();
                let ib = b.binary_search(q).is_ok();
                ia != ib
                    || sets
                        .iter()
                        .enumerate()
                        .any(|(k, s)| k != i && k != j && s.binary_search(q).is_ok())
            })
            .collect();
        total = total.saturating_add(1u128.checked_shl(p as u32).unwrap_or(u128::MAX));
        max_p = max_p.max(p);
        steps.push((i, j, p));
        sets[i] = keep;
        sets.remove(j);
    }
    for s in &sets {
        if !s.is_empty() {
            total = total.saturating_add(1u128.checked_shl(s.len() as u32).unwrap_or(u128::MAX));
            max_p = max_p.max(s.len());
        }
    }
    (total, max_p, steps)
}

/// Tabulates a scalar segment diagram over its declared parameters.
/// Returns the segment and the number of Clifford leaves evaluated.
pub fn precompute_segment(seg: &ZxDiagram, exec: Exec) -> Result<(Segment, u64)> {
    if !seg.is_scalar() {
        return Err(Error::Invalid("segment diagram has boundary wires".into()));
    }
    let params: Vec<ParamId> = seg.params().iter().copied().collect();
    if params.len() >= 63 {
        return Err(Error::SizeCap(format!("{} segment parameters", params.len())));
    }
    let shared = param_safe_simplify(seg);
    let opts = DecompOptions {
        exec,
        ..DecompOptions::default()
    };
    // Parallelism goes to the assignments; each decomposition runs
    // sequentially unless there is only one.
    let inner = DecompOptions {
        exec: if params.is_empty() { exec } else { Exec::Sequential },
        ..opts
    };
    let results = opts.exec.map_range(1usize << params.len(), |idx| {
        let mut d = shared.clone();
        instantiate_in_place(&mut d, &assignment_for(&params, idx));
        decompose_with_stats(&d, &inner)
    });
    let mut table = Vec::with_capacity(results.len());
    let mut leaves = 0u64;
    for r in results {
        let (v, st) = r?;
        table.push(v);
        leaves += st.leaves;
    }
    Ok((Segment::new(params, table)?, leaves))
}
