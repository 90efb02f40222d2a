//! Benchmark sweeps and rate calibration.
//!
//! Every sample circuit is plugged with `⟨+|` and `|+⟩` on all qubits and
//! Clifford-simplified before any method sees it. Sample seeds are derived
//! from the sweep seed and the cell coordinates, so any cell can be
//! reproduced on its own.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::circuit::{BasisState, Circuit};
use crate::costmodel::CostModel;
use crate::decompose::{measure_alpha, DecompOptions};
use crate::engine::{check_caps, prepare, project, run_direct, run_naive, Caps, EngineConfig, Method};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::generators::{format_sigma, gen_clifford_t, CircuitSpec};
use crate::partition::{build_segments, choose_k, PlanOptions};
use crate::regroup::{precompute_segment, regroup_all};

/// CSV header shared by both sweeps.
pub const CSV_HEADER: &str = "qubits,depth,sigma,method,mean_log2_seconds,std_log2_seconds,samples,real_runs";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepRow {
    pub qubits: usize,
    pub depth: usize,
    #[serde(with = "crate::generators::sigma_serde")]
    pub sigma: f64,
    pub method: Method,
    pub mean_log2_seconds: f64,
    pub std_log2_seconds: f64,
    pub samples: usize,
    /// Samples whose time was measured rather than projected.
    pub real_runs: usize,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{:.6},{},{}",
            self.qubits,
            self.depth,
            format_sigma(self.sigma),
            self.method,
            self.mean_log2_seconds,
            self.std_log2_seconds,
            self.samples,
            self.real_runs
        )
    }
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub samples: usize,
    pub seed: u64,
    /// Never run anything; report projections only.
    pub estimate_only: bool,
    pub engine: EngineConfig,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            samples: 10,
            seed: 0,
            estimate_only: true,
            engine: EngineConfig::default(),
        }
    }
}

/// Seed of one sample, mixed from the sweep seed and the cell coordinates.
pub fn cell_seed(seed: u64, qubits: usize, depth: usize, sigma: f64, sample: usize) -> u64 {
    let mut h = seed ^ 0x243f_6a88_85a3_08d3;
    for x in [qubits as u64, depth as u64, sigma.to_bits(), sample as u64] {
        h = (h ^ x).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        h ^= h >> 29;
    }
    h
}

/// `log2` seconds of each method on one circuit: measured if the
/// projection is under the threshold and within the caps, else projected.
pub fn evaluate_sample(c: &Circuit, opts: &SweepOptions) -> Result<Vec<(Method, f64, bool)>> {
    let cfg = &opts.engine;
    let plus = BasisState::all_plus(c.qubits);
    let d = prepare(c, &plus, &plus)?;
    let plan = choose_k(&d, &cfg.cost_model, &cfg.plan)?;
    let proj = project(&plan, &cfg.cost_model);
    let mut out = Vec::with_capacity(3);
    for m in Method::ALL {
        let est = match m {
            Method::Direct => proj.direct,
            Method::Naive => proj.naive,
            Method::Smart => proj.smart,
        };
        let runnable = !opts.estimate_only
            && est.seconds < cfg.cost_model.real_run_threshold_secs
            && check_caps(&plan, m, cfg).is_ok();
        if !runnable {
            out.push((m, est.log2_seconds, false));
            continue;
        }
        let start = Instant::now();
        match m {
            Method::Direct => {
                run_direct(&d, cfg)?;
            }
            Method::Naive => {
                run_naive(&d, &plan, cfg)?;
            }
            Method::Smart => {
                crate::engine::run_smart(&d, &plan, cfg)?;
            }
        }
        let secs = (cfg.cost_model.t_overhead + start.elapsed().as_secs_f64()).max(1e-9);
        out.push((m, secs.log2(), true));
    }
    Ok(out)
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// One row per method for each `(qubits, depth, sigma)` cell.
pub fn sweep_cells(cells: &[(usize, usize, f64)], opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    if opts.samples == 0 {
        return Err(Error::Invalid("at least one sample per cell is needed".into()));
    }
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..opts.samples).map(move |s| (c, s)))
        .collect();
    // Measured runs are timed one at a time so they do not compete for
    // cores; projections are computed concurrently.
    let exec = if opts.estimate_only { opts.engine.plan.exec } else { Exec::Sequential };
    let results = exec.map_slice(&tasks, |&(ci, s)| {
        let (n, depth, sigma) = cells[ci];
        let c = gen_clifford_t(&CircuitSpec {
            qubits: n,
            depth,
            sigma,
            seed: cell_seed(opts.seed, n, depth, sigma, s),
        })?;
        evaluate_sample(&c, opts)
    });
    let mut per_cell: Vec<Vec<Vec<(Method, f64, bool)>>> = vec![Vec::new(); cells.len()];
    for (r, &(ci, _)) in results.into_iter().zip(&tasks) {
        per_cell[ci].push(r?);
    }
    let mut rows = Vec::new();
    for (ci, samples) in per_cell.iter().enumerate() {
        let (n, depth, sigma) = cells[ci];
        for (mi, m) in Method::ALL.iter().enumerate() {
            let xs: Vec<f64> = samples.iter().map(|s| s[mi].1).collect();
            let real = samples.iter().filter(|s| s[mi].2).count();
            let (mean, std) = mean_std(&xs);
            rows.push(SweepRow {
                qubits: n,
                depth,
                sigma,
                method: *m,
                mean_log2_seconds: mean,
                std_log2_seconds: std,
                samples: xs.len(),
                real_runs: real,
            });
        }
    }
    Ok(rows)
}

/// Depth × qubit grid at a fixed σ.
pub fn sweep_heatmap(qubits: &[usize], depths: &[usize], sigma: f64, opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    let cells: Vec<_> = qubits
        .iter()
        .flat_map(|&n| depths.iter().map(move |&d| (n, d, sigma)))
        .collect();
    sweep_cells(&cells, opts)
}

/// σ sweep at fixed size.
pub fn sweep_sigma(qubits: usize, depth: usize, sigmas: &[f64], opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    let cells: Vec<_> = sigmas.iter().map(|&s| (qubits, depth, s)).collect();
    sweep_cells(&cells, opts)
}

#[derive(Clone, Copy, Debug)]
pub struct CalibrateSpec {
    pub samples: usize,
    pub qubits: usize,
    pub depth: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for CalibrateSpec {
    fn default() -> Self {
        CalibrateSpec {
            samples: 8,
            qubits: 12,
            depth: 160,
            seed: 1,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Calibration {
    pub cost_model: CostModel,
    pub alpha_std_dev: f64,
    pub direct_leaves: u64,
    pub precomp_leaves: u64,
    pub crossref_products: u64,
    pub seconds: f64,
}

/// Times each calculation type on random circuits and returns measured
/// rates. Rates with nothing to measure keep the base model's value.
pub fn calibrate(base: &CostModel, spec: &CalibrateSpec) -> Result<Calibration> {
    let start = Instant::now();
    let mut diagrams = Vec::new();
    for s in 0..spec.samples {
        let c = gen_clifford_t(&CircuitSpec {
            qubits: spec.qubits,
            depth: spec.depth,
            sigma: 2.0,
            seed: spec.seed.wrapping_add(s as u64),
        })?;
        let plus = BasisState::all_plus(c.qubits);
        let d = prepare(&c, &plus, &plus)?;
        if d.t_count() > 0 {
            diagrams.push(d);
        }
    }
    let mut cm = *base;
    let opts = DecompOptions {
        exec: spec.exec,
        ..DecompOptions::default()
    };
    let alpha = measure_alpha(&diagrams, &opts).ok();
    if let Some(a) = &alpha {
        cm.alpha = a.mean.clamp(1e-3, 1.0);
    }
    let cfg = EngineConfig {
        cost_model: cm,
        plan: PlanOptions {
            force_partition: true,
            exec: spec.exec,
            ..PlanOptions::default()
        },
        caps: Caps::default(),
    };
    let (mut dl, mut dt) = (0u64, 0f64);
    let (mut pl, mut pt) = (0u64, 0f64);
    let (mut cl, mut ct) = (0u64, 0f64);
    for d in &diagrams {
        let t0 = Instant::now();
        let (_, counts) = run_direct(d, &cfg)?;
        dt += t0.elapsed().as_secs_f64();
        dl += counts.leaves;
        let plan = choose_k(d, &cm, &cfg.plan)?;
        if plan.k < 2 || check_caps(&plan, Method::Smart, &cfg).is_err() {
            continue;
        }
        let segs = build_segments(d, &plan)?;
        let t1 = Instant::now();
        let mut tables = Vec::new();
        for s in &segs {
            let (t, leaves) = precompute_segment(s, spec.exec)?;
            pl += leaves;
            tables.push(t);
        }
        pt += t1.elapsed().as_secs_f64();
        let t2 = Instant::now();
        let (_, stats) = regroup_all(tables, spec.exec)?;
        ct += t2.elapsed().as_secs_f64();
        cl += u64::try_from(stats.s_crossref).unwrap_or(u64::MAX);
    }
    let rate = |n: u64, t: f64, old: f64| if n > 0 && t > 0.0 { n as f64 / t } else { old };
    cm.r_decomp = rate(dl, dt, cm.r_decomp);
    cm.r_precomp = rate(pl, pt, cm.r_precomp);
    cm.r_crossref = rate(cl, ct, cm.r_crossref);
    cm.validate()?;
    Ok(Calibration {
        cost_model: cm,
        alpha_std_dev: alpha.map_or(f64::NAN, |a| a.std_dev),
        direct_leaves: dl,
        precomp_leaves: pl,
        crossref_products: cl,
        seconds: start.elapsed().as_secs_f64(),
    })
}
