//! The end-to-end pipeline with its three evaluation methods.
//!
//! * `direct`: simplify and decompose the whole diagram.
//! * `naive`: the same partition plan, but every one of the `2^C`
//!   parameter assignments instantiates and fully reduces every segment,
//!   and the products are summed by brute force.
//! * `smart`: tabulate each segment over its local parameters once, then
//!   regroup the tables cheapest pair first.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{plug, BasisState, Circuit};
use crate::costmodel::{CostModel, Estimate};
use crate::cutting::{assignment_for, instantiate_in_place};
use crate::decompose::{decompose_with_stats, DecompOptions};
use crate::diagram::ZxDiagram;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::partition::{build_segments, choose_k, PartitionPlan, PlanOptions};
use crate::phase::ParamId;
use crate::regroup::{precompute_segment, regroup_all, RegroupStep};
use crate::rewrite::clifford_simplify;
use crate::scalar::ScalarC;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Naive,
    Smart,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Direct, Method::Naive, Method::Smart];

    pub fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Naive => "naive",
            Method::Smart => "smart",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(Method::Direct),
            "naive" => Ok(Method::Naive),
            "smart" => Ok(Method::Smart),
            _ => Err(Error::Invalid(format!("unknown method {s:?} (direct, naive, smart)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Caps {
    pub max_leaves: f64,
    pub max_table_entries: f64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_leaves: (1u64 << 28) as f64,
            max_table_entries: (1u64 << 26) as f64,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EngineConfig {
    pub cost_model: CostModel,
    pub plan: PlanOptions,
    pub caps: Caps,
}

impl EngineConfig {
    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.plan.exec = exec;
        self
    }

    fn decomp(&self) -> DecompOptions {
        DecompOptions {
            exec: self.plan.exec,
            ..DecompOptions::default()
        }
    }
}

/// Hardware-independent work done by a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Counts {
    /// Clifford leaves evaluated by stabiliser decomposition.
    pub leaves: u64,
    /// Segment table entries filled.
    pub table_entries: u64,
    /// Products formed while combining segment values.
    pub crossref: u64,
}

impl Counts {
    pub fn total(&self) -> u64 {
        self.leaves + self.crossref
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Projection {
    pub direct: Estimate,
    pub naive: Estimate,
    pub smart: Estimate,
}

/// Projected runtimes of the three methods for one plan.
pub fn project(plan: &PartitionPlan, cm: &CostModel) -> Projection {
    let direct = cm.estimate_decomp(plan.t_count);
    let naive = if plan.k == 1 {
        direct
    } else {
        let leaves: f64 = plan
            .parts
            .iter()
            .map(|p| (cm.alpha * p.t as f64).exp2())
            .sum::<f64>()
            * plan.naive_crossref;
        let seconds = leaves / cm.r_decomp + plan.naive_crossref / cm.r_crossref;
        Estimate {
            calcs: leaves + plan.naive_crossref,
            seconds,
            log2_seconds: seconds.log2(),
        }
    };
    Projection {
        direct,
        naive,
        smart: plan.t_smart,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub method: Option<Method>,
    pub qubits: usize,
    pub gates: usize,
    /// T-count of the circuit as written.
    pub circuit_t_count: usize,
    /// T-count after plugging and Clifford simplification.
    pub t_count: usize,
    pub amplitude: Option<[f64; 2]>,
    pub probability: Option<f64>,
    pub counts: Counts,
    pub projection: Projection,
    pub plan: Option<PartitionPlan>,
    pub regroup_steps: Vec<RegroupStep>,
    /// Wall-clock seconds; excluded from determinism comparisons.
    pub wall_seconds: f64,
}

/// Plugs the circuit into a scalar diagram and Clifford-simplifies it.
pub fn prepare(c: &Circuit, ins: &[BasisState], outs: &[BasisState]) -> Result<ZxDiagram> {
    let d = plug(&c.to_diagram(), ins, outs)?;
    clifford_simplify(&d)
}

fn cap(stage: &str, projected: f64, cap: f64) -> Result<()> {
    if projected > cap {
        return Err(Error::ResourceCap {
            stage: stage.into(),
            projected,
            cap,
        });
    }
    Ok(())
}

/// Refuses to run a method whose projected work exceeds the caps.
pub fn check_caps(plan: &PartitionPlan, method: Method, cfg: &EngineConfig) -> Result<()> {
    let cm = &cfg.cost_model;
    let caps = &cfg.caps;
    let direct_leaves = (cm.alpha * plan.t_count as f64).exp2();
    match method {
        Method::Direct => cap("decompose", direct_leaves, caps.max_leaves),
        _ if plan.k == 1 => cap("decompose", direct_leaves, caps.max_leaves),
        Method::Naive => {
            let p = project(plan, cm);
            cap("naive", p.naive.calcs, caps.max_leaves)
        }
        Method::Smart => {
            cap("precompute", plan.s_precomp, caps.max_leaves)?;
            let widest = plan.parts.iter().map(|p| p.c).max().unwrap_or(0).max(plan.max_step_params);
            cap("regroup", (widest as f64).exp2(), caps.max_table_entries)
        }
    }
}

pub fn run_direct(d: &ZxDiagram, cfg: &EngineConfig) -> Result<(ScalarC, Counts)> {
    let (v, st) = decompose_with_stats(d, &cfg.decomp())?;
    Ok((
        v,
        Counts {
            leaves: st.leaves,
            ..Counts::default()
        },
    ))
}

/// Brute-force sum over all `2^C` assignments of the product of fully
/// reduced segment values.
pub fn run_naive(d: &ZxDiagram, plan: &PartitionPlan, cfg: &EngineConfig) -> Result<(ScalarC, Counts)> {
    if plan.k == 1 {
        return run_direct(d, cfg);
    }
    let segs = build_segments(d, plan)?;
    let c = plan.total_cuts;
    if c >= 63 {
        return Err(Error::SizeCap(format!("{c} cuts")));
    }
    let all: Vec<ParamId> = (0..c as ParamId).collect();
    let inner = DecompOptions {
        exec: Exec::Sequential,
        ..cfg.decomp()
    };
    let terms = cfg.plan.exec.map_range(1usize << c, |idx| -> Result<(ScalarC, u64)> {
        let a = assignment_for(&all, idx);
        let mut prod = ScalarC::one();
        let mut leaves = 0;
        for s in &segs {
            let mut inst = s.clone();
            let local = a.iter().filter(|(p, _)| s.params().contains(p)).map(|(&p, &b)| (p, b)).collect();
            instantiate_in_place(&mut inst, &local);
            let (v, st) = decompose_with_stats(&inst, &inner)?;
            prod *= v;
            leaves += st.leaves;
        }
        Ok((prod, leaves))
    });
    let mut total = ScalarC::zero();
    let mut leaves = 0;
    for t in terms {
        let (v, l) = t?;
        total += v;
        leaves += l;
    }
    Ok((
        total,
        Counts {
            leaves,
            table_entries: 0,
            crossref: 1u64 << c,
        },
    ))
}

/// Precomputes every segment table, then regroups.
pub fn run_smart(
    d: &ZxDiagram,
    plan: &PartitionPlan,
    cfg: &EngineConfig,
) -> Result<(ScalarC, Counts, Vec<RegroupStep>)> {
    if plan.k == 1 {
        let (v, c) = run_direct(d, cfg)?;
        return Ok((v, c, Vec::new()));
    }
    let segs = build_segments(d, plan)?;
    let mut tables = Vec::with_capacity(segs.len());
    let mut counts = Counts::default();
    for s in &segs {
        let (t, leaves) = precompute_segment(s, cfg.plan.exec)?;
        counts.leaves += leaves;
        counts.table_entries += t.table.len() as u64;
        tables.push(t);
    }
    let (v, stats) = regroup_all(tables, cfg.plan.exec)?;
    counts.crossref = u64::try_from(stats.s_crossref).unwrap_or(u64::MAX);
    Ok((v, counts, stats.steps))
}

/// Plan for a prepared diagram; `direct` never needs one, but it is still
/// reported for the projections.
pub fn plan_diagram(d: &ZxDiagram, cfg: &EngineConfig) -> Result<PartitionPlan> {
    choose_k(d, &cfg.cost_model, &cfg.plan)
}

fn base_report(c: &Circuit, d: &ZxDiagram, plan: &PartitionPlan, cfg: &EngineConfig) -> Report {
    Report {
        method: None,
        qubits: c.qubits,
        gates: c.gates.len(),
        circuit_t_count: c.t_count(),
        t_count: d.t_count(),
        amplitude: None,
        probability: None,
        counts: Counts::default(),
        projection: project(plan, &cfg.cost_model),
        plan: Some(plan.clone()),
        regroup_steps: Vec::new(),
        wall_seconds: 0.0,
    }
}

/// Plan and projections only; nothing is evaluated.
pub fn plan_circuit(c: &Circuit, ins: &[BasisState], outs: &[BasisState], cfg: &EngineConfig) -> Result<Report> {
    let start = Instant::now();
    let d = prepare(c, ins, outs)?;
    let plan = plan_diagram(&d, cfg)?;
    let mut r = base_report(c, &d, &plan, cfg);
    r.wall_seconds = start.elapsed().as_secs_f64();
    Ok(r)
}

/// `⟨outs|U|ins⟩` by the chosen method.
pub fn simulate_amplitude(
    c: &Circuit,
    ins: &[BasisState],
    outs: &[BasisState],
    method: Method,
    cfg: &EngineConfig,
) -> Result<(Complex64, Report)> {
    let start = Instant::now();
    let d = prepare(c, ins, outs)?;
    let plan = plan_diagram(&d, cfg)?;
    check_caps(&plan, method, cfg)?;
    let (v, counts, steps) = match method {
        Method::Direct => {
            let (v, c) = run_direct(&d, cfg)?;
            (v, c, Vec::new())
        }
        Method::Naive => {
            let (v, c) = run_naive(&d, &plan, cfg)?;
            (v, c, Vec::new())
        }
        Method::Smart => run_smart(&d, &plan, cfg)?,
    };
    let amp = v.to_complex();
    let mut r = base_report(c, &d, &plan, cfg);
    r.method = Some(method);
    r.amplitude = Some([amp.re, amp.im]);
    r.probability = Some(amp.norm_sqr());
    r.counts = counts;
    r.regroup_steps = steps;
    r.wall_seconds = start.elapsed().as_secs_f64();
    Ok((amp, r))
}
