use std::collections::BTreeSet;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zxpart::decompose::{decompose_with_stats, DecompOptions};
use zxpart::engine::{plan_diagram, prepare, run_naive, EngineConfig};
use zxpart::generators::{gen_clifford_t, gen_compound, CircuitSpec, CompoundSpec};
use zxpart::partition::build_segments;
use zxpart::regroup::{contract_pair, precompute_segment, regroup_all};
use zxpart::sweep::{sweep_sigma, SweepOptions};
use zxpart::{BasisState, Exec, ParamId, ScalarC, Segment, ZxDiagram};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn random_segment(rng: &mut ChaCha8Rng, params: Vec<ParamId>) -> Segment {
    let table = (0..1usize << params.len())
        .map(|_| ScalarC::from_complex(Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    Segment::new(params, table).unwrap()
}

fn prepared(c: &zxpart::Circuit) -> ZxDiagram {
    let plus = BasisState::all_plus(c.qubits);
    prepare(c, &plus, &plus).unwrap()
}

fn compound(depth_per_block: usize, seed: u64) -> ZxDiagram {
    prepared(
        &gen_compound(&CompoundSpec {
            blocks: 3,
            qubits_per_block: 4,
            depth_per_block,
            external_cnots: 3,
            block_sigma: 1.0,
            seed,
        })
        .unwrap(),
    )
}

fn regroup_kernels(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut g = c.benchmark_group("contract_pair");
    for p in [12usize, 16, 20] {
        // A and B overlap on a third of the union; half the rest is kept.
        let shared = p / 3;
        let a_params: Vec<ParamId> = (0..(p + shared) / 2).map(|x| x as ParamId).collect();
        let b_params: Vec<ParamId> = ((p - shared) / 2..p).map(|x| x as ParamId).collect();
        let a = random_segment(&mut rng, a_params.clone());
        let b = random_segment(&mut rng, b_params.clone());
        let keep: Vec<ParamId> = a_params
            .iter()
            .chain(&b_params)
            .copied()
            .filter(|x| x % 2 == 0)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, p), &p, |bench, _| {
                bench.iter(|| contract_pair(black_box(&a), black_box(&b), &keep, exec))
            });
        }
    }
    g.finish();

    let mut g = c.benchmark_group("regroup_all");
    let chain: Vec<Segment> = (0..6)
        .map(|i| random_segment(&mut rng, (i * 3..i * 3 + 6).map(|x| x as ParamId).collect()))
        .collect();
    for (name, exec) in MODES {
        g.bench_function(name, |bench| bench.iter(|| regroup_all(black_box(chain.clone()), exec).unwrap()));
    }
    g.finish();
}

fn precompute(c: &mut Criterion) {
    let d = compound(50, 4);
    let mut plan_cfg = EngineConfig::default();
    plan_cfg.plan.force_partition = true;
    let plan = plan_diagram(&d, &plan_cfg).unwrap();
    let segs = build_segments(&d, &plan).unwrap();
    let widest = segs.iter().max_by_key(|s| s.params().len()).unwrap().clone();
    let mut g = c.benchmark_group("precompute_segment");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |bench| bench.iter(|| precompute_segment(black_box(&widest), exec).unwrap()));
    }
    g.finish();

    let mut g = c.benchmark_group("naive_sum");
    g.sample_size(10);
    for (name, exec) in MODES {
        let run_cfg = plan_cfg.with_exec(exec);
        g.bench_function(name, |bench| bench.iter(|| run_naive(black_box(&d), &plan, &run_cfg).unwrap()));
    }
    g.finish();
}

fn decomposition(c: &mut Criterion) {
    let d = prepared(
        &gen_clifford_t(&CircuitSpec {
            qubits: 10,
            depth: 160,
            sigma: f64::INFINITY,
            seed: 2,
        })
        .unwrap(),
    );
    let mut g = c.benchmark_group("decompose_branches");
    g.sample_size(10);
    for (name, exec) in MODES {
        let opts = DecompOptions {
            exec,
            ..DecompOptions::default()
        };
        g.bench_function(name, |bench| bench.iter(|| decompose_with_stats(black_box(&d), &opts).unwrap()));
    }
    g.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep_sigma_estimates");
    g.sample_size(10);
    for (name, exec) in MODES {
        let opts = SweepOptions {
            samples: 10,
            seed: 3,
            estimate_only: true,
            engine: EngineConfig::default().with_exec(exec),
        };
        g.bench_function(name, |bench| {
            bench.iter(|| sweep_sigma(16, 200, &[0.0, 2.0, f64::INFINITY], black_box(&opts)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, regroup_kernels, precompute, decomposition, sweeps);
criterion_main!(benches);
