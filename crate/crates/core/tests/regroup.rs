use std::collections::BTreeSet;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zxpart::oracle::naive_global_sum;
use zxpart::regroup::{
    contract_pair, local_index, min_pair, regroup_all, regroup_pair, simulate_schedule, sum_out,
};
use zxpart::{Exec, ParamId, ScalarC, Segment};

fn segment(params: &[ParamId], values: &[f64]) -> Segment {
    Segment::new(
        params.to_vec(),
        values.iter().map(|&v| ScalarC::from_complex(Complex64::new(v, 0.0))).collect(),
    )
    .unwrap()
}

fn random_segment(rng: &mut ChaCha8Rng, params: BTreeSet<ParamId>) -> Segment {
    let params: Vec<ParamId> = params.into_iter().collect();
    let table = (0..1usize << params.len())
        .map(|_| ScalarC::from_complex(Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    Segment::new(params, table).unwrap()
}

fn random_system(rng: &mut ChaCha8Rng, k: usize, n_params: usize) -> Vec<Segment> {
    let mut sets = vec![BTreeSet::new(); k];
    for p in 0..n_params as ParamId {
        sets[rng.gen_range(0..k)].insert(p);
        for s in sets.iter_mut() {
            if rng.gen_bool(0.35) {
                s.insert(p);
            }
        }
    }
    sets.into_iter().map(|s| random_segment(rng, s)).collect()
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * b.norm().max(1e-300)
}

#[test]
fn table_one_worked_values() {
    let a = segment(&[0, 1], &[1.0, 2.0, 3.0, 4.0]);
    let b = segment(&[1, 2], &[5.0, 6.0, 7.0, 8.0]);
    let mut segs = vec![a, b];
    let step = regroup_pair(&mut segs, 0, 1, Exec::Sequential).unwrap();
    assert_eq!(step.p, 3);
    assert_eq!(step.kept, vec![0, 2]);
    let got: Vec<f64> = segs[0].table.iter().map(|s| s.to_complex().re).collect();
    // 1·5+2·7, 1·6+2·8, 3·5+4·7, 3·6+4·8
    assert_eq!(got, vec![19.0, 22.0, 43.0, 50.0]);
}

#[test]
fn shared_with_a_third_segment_is_elementwise() {
    let a = segment(&[0, 1], &[1.0, 2.0, 3.0, 4.0]);
    let b = segment(&[0, 1], &[5.0, 6.0, 7.0, 8.0]);
    let c = segment(&[0, 1], &[1.0; 4]);
    let mut segs = vec![a, b, c];
    regroup_pair(&mut segs, 0, 1, Exec::Sequential).unwrap();
    assert_eq!(segs[0].params, vec![0, 1]);
    let got: Vec<f64> = segs[0].table.iter().map(|s| s.to_complex().re).collect();
    assert_eq!(got, vec![5.0, 12.0, 21.0, 32.0]);
}

#[test]
fn section_three_chain_first_step() {
    // A{a,b,c} B{a..f} C{d..i} D{g,h,i}: regrouping A with B keeps d,e,f.
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let sets: [&[ParamId]; 4] = [&[0, 1, 2], &[0, 1, 2, 3, 4, 5], &[3, 4, 5, 6, 7, 8], &[6, 7, 8]];
    let segs: Vec<Segment> = sets.iter().map(|s| random_segment(&mut rng, s.iter().copied().collect())).collect();
    assert_eq!(min_pair(&segs), Some((0, 1, 6)));
    let mut work = segs.clone();
    let step = regroup_pair(&mut work, 0, 1, Exec::Sequential).unwrap();
    assert_eq!((step.kept.clone(), step.cost), (vec![3, 4, 5], 64));
    let (v, stats) = regroup_all(segs.clone(), Exec::default()).unwrap();
    assert_eq!(stats.s_crossref, 136);
    let param_sets: Vec<Vec<ParamId>> = sets.iter().map(|s| s.to_vec()).collect();
    assert_eq!(simulate_schedule(&param_sets).0, 136);
    assert!(close(v.to_complex(), naive_global_sum(&segs).unwrap(), 1e-12));
}

#[test]
fn min_pair_edge_cases() {
    let two = vec![segment(&[0, 1], &[1.0; 4]), segment(&[1, 2, 3], &[1.0; 8])];
    assert_eq!(min_pair(&two), Some((0, 1, 4)));
    let apart = vec![segment(&[0], &[1.0; 2]), segment(&[1], &[1.0; 2])];
    assert_eq!(min_pair(&apart), None);
    let mut apart = apart;
    assert!(regroup_pair(&mut apart, 0, 1, Exec::Sequential).is_err());
}

#[test]
fn local_index_with_full_mask_is_identity() {
    for n in 0..12 {
        let mask = (1u64 << n) - 1;
        for g in 0..1u64 << n {
            assert_eq!(local_index(g, mask), g);
        }
    }
}

/// Regroups in a random valid order, then sums out what is left.
fn random_order_value(mut segs: Vec<Segment>, rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let mut pairs = Vec::new();
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                if segs[i].shares_param(&segs[j]) {
                    pairs.push((i, j));
                }
            }
        }
        if pairs.is_empty() {
            break;
        }
        let (i, j) = pairs[rng.gen_range(0..pairs.len())];
        regroup_pair(&mut segs, i, j, Exec::Sequential).unwrap();
    }
    segs.iter().map(|s| sum_out(s).to_complex()).product()
}

#[test]
fn regroup_order_does_not_change_the_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let k = rng.gen_range(2..=6);
        let n_params = rng.gen_range(1..=12);
        let segs = random_system(&mut rng, k, n_params);
        let (best, _) = regroup_all(segs.clone(), Exec::Sequential).unwrap();
        for _ in 0..3 {
            let other = random_order_value(segs.clone(), &mut rng);
            assert!(close(other, best.to_complex(), 1e-10), "{other} vs {}", best.to_complex());
        }
    }
}

#[test]
fn reported_cost_is_the_sum_over_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let k = rng.gen_range(1..=6);
        let n_params = rng.gen_range(0..=12);
        let segs = random_system(&mut rng, k, n_params);
        let (_, stats) = regroup_all(segs.clone(), Exec::Sequential).unwrap();
        let mut cumulative = 0u128;
        for s in &stats.steps {
            assert_eq!(s.cost, 1u128 << s.p);
            cumulative += s.cost;
            assert_eq!(s.cumulative, cumulative);
        }
        let param_sets: Vec<Vec<ParamId>> = segs.iter().map(|s| s.params.clone()).collect();
        assert_eq!(simulate_schedule(&param_sets).0, stats.s_crossref);
        assert!(stats.s_crossref >= cumulative);
    }
}

#[test]
fn sequential_kernel_is_reproducible_and_matches_parallel() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let a_params = (0..8).filter(|_| rng.gen_bool(0.6)).collect();
        let a = random_segment(&mut rng, a_params);
        let b_params = (0..8).filter(|_| rng.gen_bool(0.6)).collect();
        let b = random_segment(&mut rng, b_params);
        let keep: BTreeSet<ParamId> = a.params.iter().chain(&b.params).copied().filter(|p| p % 3 == 0).collect();
        let keep: Vec<ParamId> = keep.into_iter().collect();
        let s1 = contract_pair(&a, &b, &keep, Exec::Sequential);
        let s2 = contract_pair(&a, &b, &keep, Exec::Sequential);
        assert_eq!(s1, s2);
        let par = contract_pair(&a, &b, &keep, Exec::default());
        assert_eq!(par.params, s1.params);
        for (x, y) in par.table.iter().zip(&s1.table) {
            assert!((x.to_complex() - y.to_complex()).norm() <= 1e-12 * (1.0 + y.to_complex().norm()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exchange_matches_brute_force(seed in any::<u64>(), k in 1usize..=6, n_params in 0usize..=14) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let segs = random_system(&mut rng, k, n_params);
        let want = naive_global_sum(&segs).unwrap();
        let (got, _) = regroup_all(segs, Exec::default()).unwrap();
        prop_assert!(close(got.to_complex(), want, 1e-12), "{} vs {}", got.to_complex(), want);
    }

    #[test]
    fn simulated_schedule_matches_execution(seed in any::<u64>(), k in 1usize..=6, n_params in 0usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let segs = random_system(&mut rng, k, n_params);
        let param_sets: Vec<Vec<ParamId>> = segs.iter().map(|s| s.params.clone()).collect();
        let (cost, max_p) = simulate_schedule(&param_sets);
        let (_, stats) = regroup_all(segs, Exec::Sequential).unwrap();
        prop_assert_eq!(cost, stats.s_crossref);
        prop_assert_eq!(max_p, stats.max_step_params);
    }
}
