use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zxpart::engine::prepare;
use zxpart::generators::{gen_clifford_t, gen_compound, CircuitSpec, CompoundSpec};
use zxpart::partition::{choose_k, partition_k, plan_for_partition, to_partition_hypergraph, PlanOptions};
use zxpart::{BasisState, CostModel, EdgeKind, SpiderId, ZxDiagram};

fn complete_t_graph(d: &mut ZxDiagram, n: usize) -> Vec<SpiderId> {
    let ids: Vec<_> = (0..n).map(|i| d.add_z(if i % 2 == 0 { 1 } else { 3 })).collect();
    for i in 0..n {
        for j in i + 1..n {
            d.add_edge(ids[i], ids[j], EdgeKind::Hadamard);
        }
    }
    ids
}

/// Component sizes of the graph left after removing `gone`.
fn components(d: &ZxDiagram, gone: &BTreeSet<SpiderId>) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    let mut sizes = Vec::new();
    for v in d.spider_ids().filter(|v| !gone.contains(v)) {
        if !seen.insert(v) {
            continue;
        }
        let mut stack = vec![v];
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for w in d.neighbors(u) {
                if !gone.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    sizes
}

fn separates(d: &ZxDiagram, gone: &BTreeSet<SpiderId>) -> bool {
    components(d, gone).len() >= 2
}

fn subsets(items: &[SpiderId], max: usize) -> Vec<BTreeSet<SpiderId>> {
    let mut out = vec![BTreeSet::new()];
    for &x in items {
        let grown: Vec<_> = out
            .iter()
            .filter(|s| s.len() < max)
            .map(|s| {
                let mut s = s.clone();
                s.insert(x);
                s
            })
            .collect();
        out.extend(grown);
    }
    out
}

#[test]
fn handshake_on_random_diagrams() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..20 {
        let mut d = ZxDiagram::new();
        let ids: Vec<_> = (0..50).map(|_| d.add_z(rng.gen_range(0..8))).collect();
        for _ in 0..rng.gen_range(40..200) {
            let (a, b) = (ids[rng.gen_range(0..50)], ids[rng.gen_range(0..50)]);
            if a != b {
                d.add_edge(a, b, EdgeKind::Hadamard);
            }
        }
        let h = to_partition_hypergraph(&d);
        assert_eq!(h.nets.len(), d.num_spiders());
        assert_eq!(h.pin_count(), 2 * h.nodes.len());
        for n in &h.nets {
            assert_eq!(n.pins.len(), d.degree(n.spider));
        }
    }
}

#[test]
fn complete_graph_has_no_small_separator() {
    let mut d = ZxDiagram::new();
    let ids = complete_t_graph(&mut d, 6);
    // Exhaustively: no set of at most four spiders separates K6.
    assert!(subsets(&ids, 4).iter().all(|s| !separates(&d, s)));
    let kw = partition_k(&to_partition_hypergraph(&d), 2, 0.1).unwrap();
    assert!(kw.cut_spiders.len() >= 4, "{:?}", kw.cut_spiders);
}

#[test]
fn path_cut_matches_brute_force_separator() {
    let mut d = ZxDiagram::new();
    let ids: Vec<_> = (0..9).map(|_| d.add_z(1)).collect();
    for w in ids.windows(2) {
        d.add_edge(w[0], w[1], EdgeKind::Hadamard);
    }
    // Single-spider separators leaving two halves of four T-spiders each.
    let balanced: Vec<SpiderId> = ids
        .iter()
        .copied()
        .filter(|&v| components(&d, &BTreeSet::from([v])) == [4, 4])
        .collect();
    assert_eq!(balanced.len(), 1);
    let kw = partition_k(&to_partition_hypergraph(&d), 2, 0.1).unwrap();
    assert_eq!(kw.cut_spiders, balanced);
}

#[test]
fn dense_diagram_stays_whole() {
    let mut d = ZxDiagram::new();
    complete_t_graph(&mut d, 12);
    let plan = choose_k(&d, &CostModel::default(), &PlanOptions::default()).unwrap();
    assert_eq!(plan.k, 1);
    assert_eq!(plan.total_cuts, 0);
}

#[test]
fn two_components_of_twenty_t() {
    let mut d = ZxDiagram::new();
    complete_t_graph(&mut d, 20);
    complete_t_graph(&mut d, 20);
    let cm = CostModel::default().with_alpha(0.5);
    let opts = PlanOptions {
        k_max: Some(2),
        ..PlanOptions::default()
    };
    let plan = choose_k(&d, &cm, &opts).unwrap();
    assert_eq!(plan.k, 2);
    assert_eq!(plan.total_cuts, 0);
    assert_eq!(plan.s_precomp, 2048.0);
    let direct = cm.estimate_decomp(40);
    assert_eq!(direct.calcs, (1u64 << 20) as f64);
    assert!(plan.t_smart.seconds < direct.seconds);
}

#[test]
fn every_plan_is_a_valid_separator() {
    let cm = CostModel::default();
    for seed in 0..12 {
        let c = gen_compound(&CompoundSpec {
            blocks: 2 + seed as usize % 3,
            qubits_per_block: 4,
            depth_per_block: 60,
            external_cnots: 3,
            block_sigma: 1.0,
            seed,
        })
        .unwrap();
        let plus = BasisState::all_plus(c.qubits);
        let d = prepare(&c, &plus, &plus).unwrap();
        let h = to_partition_hypergraph(&d);
        for k in 2..=4.min(h.nets.len()) {
            let kw = partition_k(&h, k, 0.1).unwrap();
            let plan = plan_for_partition(&d, &h, &kw, &cm).unwrap();
            plan.check_separator(&d).unwrap();
            let s: f64 = plan
                .parts
                .iter()
                .map(|p| (cm.alpha * p.t as f64 + p.c as f64).exp2())
                .sum();
            assert!((s - plan.s_precomp).abs() <= 1e-9 * s);
        }
    }
}

#[test]
fn compound_cuts_stay_near_the_external_links() {
    // k blocks joined by n_ext CNOTs: a good split cuts at most two
    // spiders per external link.
    for seed in 0..4 {
        let c = gen_compound(&CompoundSpec {
            blocks: 5,
            qubits_per_block: 6,
            depth_per_block: 120,
            external_cnots: 8,
            block_sigma: 1.0,
            seed,
        })
        .unwrap();
        let plus = BasisState::all_plus(c.qubits);
        let d = prepare(&c, &plus, &plus).unwrap();
        let kw = partition_k(&to_partition_hypergraph(&d), 5, 0.1).unwrap();
        assert!(kw.cut_spiders.len() <= 16, "seed {seed}: {} cuts", kw.cut_spiders.len());
    }
}

#[test]
fn more_parts_means_more_cuts_and_cheaper_segments() {
    // Corpus averages over block-structured circuits, up to k = 4 of their
    // six blocks. Dense random circuits do not show the S_precomp trend.
    let cm = CostModel::default();
    let ks = [2usize, 3, 4];
    let mut cuts = vec![0.0; ks.len()];
    let mut log_s = vec![0.0; ks.len()];
    let n = 12;
    for seed in 0..n {
        let c = gen_compound(&CompoundSpec {
            blocks: 6,
            qubits_per_block: 5,
            depth_per_block: 150,
            external_cnots: 5,
            block_sigma: 1.0,
            seed,
        })
        .unwrap();
        let plus = BasisState::all_plus(c.qubits);
        let d = prepare(&c, &plus, &plus).unwrap();
        let h = to_partition_hypergraph(&d);
        for (i, &k) in ks.iter().enumerate() {
            let plan = plan_for_partition(&d, &h, &partition_k(&h, k, 0.1).unwrap(), &cm).unwrap();
            cuts[i] += plan.total_cuts as f64 / n as f64;
            log_s[i] += plan.s_precomp.log2() / n as f64;
        }
    }
    assert!(cuts.windows(2).all(|w| w[0] <= w[1]), "cuts {cuts:?}");
    assert!(log_s.windows(2).all(|w| w[0] >= w[1]), "log2 S_precomp {log_s:?}");
}

#[test]
fn choose_k_never_beats_direct_by_losing() {
    let cm = CostModel::default();
    for seed in 0..20 {
        let c = gen_clifford_t(&CircuitSpec {
            qubits: 6 + seed as usize % 6,
            depth: 120,
            sigma: [0.0, 2.0, f64::INFINITY][seed as usize % 3],
            seed,
        })
        .unwrap();
        let plus = BasisState::all_plus(c.qubits);
        let d = prepare(&c, &plus, &plus).unwrap();
        let opts = PlanOptions {
            k_max: Some(4),
            ..PlanOptions::default()
        };
        let plan = choose_k(&d, &cm, &opts).unwrap();
        assert!(plan.t_smart.seconds <= cm.estimate_decomp(plan.t_count).seconds * (1.0 + 1e-12));
        let forced = choose_k(
            &d,
            &cm,
            &PlanOptions {
                force_partition: true,
                ..opts
            },
        )
        .unwrap();
        assert!(forced.t_smart.seconds >= plan.t_smart.seconds * (1.0 - 1e-12));
    }
}
