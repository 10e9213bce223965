//! Property tests: matroid axioms on every backend, agreement of the
//! binary-search edge finders with direct scans, BFS label agreement with
//! the explicitly built exchange graph, and wire-format round-trips.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use matroid_union::exchange::{
    build_reference_graph, find_in_edge, find_out_edge, update_partition,
};
use matroid_union::gen::{random_instance, random_spec, BackendKind};
use matroid_union::oracle::{ElemSet, Element, Instance, MatroidOracle};
use matroid_union::verify::{
    reference_distances, reference_reverse_distances, reference_shortest_path, validate_partition,
};
use matroid_union::{algos_ind, algos_rank, PartitionState, INF_DIST};

fn kind_from_index(idx: usize) -> BackendKind {
    BackendKind::ALL[idx % BackendKind::ALL.len()]
}

fn mask_set(n: usize, mask: u32) -> ElemSet {
    let mut s = ElemSet::with_capacity(n);
    for v in 0..n {
        if mask >> v & 1 == 1 {
            s.insert(v);
        }
    }
    s
}

fn independent_masks(m: &MatroidOracle, n: usize) -> Vec<u32> {
    (0u32..1 << n).filter(|&x| m.is_independent(&mask_set(n, x))).collect()
}

/// Downward closure and the augmentation property, checked exhaustively.
fn assert_matroid_axioms(m: &MatroidOracle, n: usize) {
    let indep = independent_masks(m, n);
    assert!(indep.contains(&0), "empty set must be independent");
    for &s in &indep {
        for v in 0..n {
            if s >> v & 1 == 1 {
                assert!(
                    indep.binary_search(&(s & !(1 << v))).is_ok(),
                    "downward closure fails: {s:b} minus {v}"
                );
            }
        }
    }
    for &big in &indep {
        for &small in &indep {
            if small.count_ones() >= big.count_ones() {
                continue;
            }
            let grow = (0..n).any(|v| {
                big >> v & 1 == 1
                    && small >> v & 1 == 0
                    && indep.binary_search(&(small | 1 << v)).is_ok()
            });
            assert!(grow, "augmentation fails for {small:b} < {big:b}");
        }
    }
}

/// Brute-force rank using only independence queries.
fn brute_rank(m: &MatroidOracle, n: usize, set: &ElemSet) -> usize {
    let members: Vec<Element> = set.ones().collect();
    let mut best = 0;
    for pick in 0u32..1 << members.len() {
        let sub: Vec<Element> = members
            .iter()
            .enumerate()
            .filter(|(j, _)| pick >> j & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let mut candidate = ElemSet::with_capacity(n);
        for v in &sub {
            candidate.insert(*v);
        }
        if m.is_independent(&candidate) {
            best = best.max(sub.len());
        }
    }
    best
}

/// Maximal independent set built by inserting a shuffled element order.
fn random_independent_set(m: &MatroidOracle, n: usize, rng: &mut ChaCha8Rng) -> ElemSet {
    let mut order: Vec<Element> = (0..n).collect();
    order.shuffle(rng);
    let keep = rng.gen_range(0..=n);
    let mut s = ElemSet::with_capacity(n);
    for &v in order.iter().take(keep) {
        let mut probe = s.clone();
        probe.insert(v);
        if m.is_independent(&probe) {
            s = probe;
        }
    }
    s
}

/// A partition state reached by augmenting along shortest reference paths.
fn reachable_state(inst: &Instance, augmentations: usize) -> PartitionState {
    let probe = inst.uncounted_clone();
    let mut state = PartitionState::empty(inst.n(), inst.k());
    for _ in 0..augmentations {
        let graph = build_reference_graph(&probe, &state);
        match reference_shortest_path(&graph, &state) {
            Some(path) => update_partition(&mut state, &path),
            None => break,
        }
    }
    state
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matroid_axioms_hold(kind_idx in 0usize..5, n in 1usize..=8, seed in 0u64..500) {
        let inst = random_instance(kind_from_index(kind_idx), n, 2, seed);
        for m in inst.matroids() {
            assert_matroid_axioms(m, n);
        }
    }

    #[test]
    fn rank_matches_brute_force(kind_idx in 0usize..5, n in 1usize..=9, seed in 0u64..500, mask in 0u32..4096) {
        let inst = random_instance(kind_from_index(kind_idx), n, 2, seed);
        let set = mask_set(n, mask & ((1 << n) - 1));
        for m in inst.matroids() {
            prop_assert_eq!(m.rank(&set), brute_rank(m, n, &set));
        }
    }

    #[test]
    fn find_out_edge_agrees_with_scan(kind_idx in 0usize..5, n in 1usize..=10, seed in 0u64..1000, sub in 0u64..1000) {
        let inst = random_instance(kind_from_index(kind_idx), n, 1, seed);
        let m = inst.matroid(0);
        let probe = inst.uncounted_clone();
        let direct = probe.matroid(0);
        let mut rng = ChaCha8Rng::seed_from_u64(sub);
        let s = random_independent_set(direct, n, &mut rng);
        let outside: Vec<Element> = (0..n).filter(|&v| !s.contains(v)).collect();
        prop_assume!(!outside.is_empty());
        let v = outside[rng.gen_range(0..outside.len())];
        let pool: Vec<Element> = s.ones().filter(|_| rng.gen_bool(0.7)).collect();

        let got = find_out_edge(m, &s, v, &pool);
        let want = pool.iter().copied().find(|&u| {
            let mut q = s.clone();
            q.insert(v);
            q.remove(u);
            direct.is_independent(&q)
        });
        prop_assert_eq!(got, want);
    }

    #[test]
    fn find_in_edge_agrees_with_scan(kind_idx in 0usize..5, n in 1usize..=10, seed in 0u64..1000, sub in 0u64..1000) {
        let inst = random_instance(kind_from_index(kind_idx), n, 1, seed);
        let m = inst.matroid(0);
        let probe = inst.uncounted_clone();
        let direct = probe.matroid(0);
        let mut rng = ChaCha8Rng::seed_from_u64(sub);
        let s = random_independent_set(direct, n, &mut rng);
        let members: Vec<Element> = s.ones().collect();
        let u = if members.is_empty() || rng.gen_bool(0.3) {
            None
        } else {
            Some(members[rng.gen_range(0..members.len())])
        };
        let pool: Vec<Element> = (0..n)
            .filter(|&a| !s.contains(a) && rng.gen_bool(0.7))
            .collect();

        let got = find_in_edge(m, &s, u, &pool);
        let want = pool.iter().copied().find(|&a| {
            let mut q = s.clone();
            if let Some(x) = u {
                q.remove(x);
            }
            q.insert(a);
            direct.is_independent(&q)
        });
        prop_assert_eq!(got, want);
    }

    #[test]
    fn bfs_labels_agree_below_sink_distance(kind_idx in 0usize..5, n in 1usize..=10, k in 1usize..=4, seed in 0u64..1000, augs in 0usize..=10) {
        let inst = random_instance(kind_from_index(kind_idx), n, k, seed);
        let state = reachable_state(&inst, augs);
        prop_assert!(validate_partition(&inst, &state));
        let labels = algos_ind::get_distance_independence(&inst, &state);

        let probe = inst.uncounted_clone();
        let graph = build_reference_graph(&probe, &state);
        let (ref_dist, ref_sinks) = reference_distances(&graph, &state);
        let d_t = ref_sinks.iter().copied().min().unwrap_or(INF_DIST);
        prop_assert_eq!(labels.d_t(), d_t);
        for v in 0..n {
            if ref_dist[v] < d_t || labels.dist[v] < d_t {
                prop_assert_eq!(labels.dist[v], ref_dist[v], "element {}", v);
            }
        }
    }

    #[test]
    fn reverse_bfs_labels_agree_below_source_distance(kind_idx in 0usize..5, n in 1usize..=10, k in 1usize..=4, seed in 0u64..1000, augs in 0usize..=10) {
        let inst = random_instance(kind_from_index(kind_idx), n, k, seed);
        let state = reachable_state(&inst, augs);
        let labels = algos_rank::get_distance_rank(&inst, &state);
        prop_assert_eq!(inst.snapshot_stats().independence_queries, 0);

        let probe = inst.uncounted_clone();
        let graph = build_reference_graph(&probe, &state);
        let (ref_dist, ref_ds) = reference_reverse_distances(&graph, &state);
        prop_assert_eq!(labels.d_s, ref_ds);
        for v in 0..n {
            if ref_dist[v] < ref_ds || labels.dist[v] < ref_ds {
                prop_assert_eq!(labels.dist[v], ref_dist[v], "element {}", v);
            }
        }
    }

    #[test]
    fn reference_graph_matches_definition(kind_idx in 0usize..5, n in 1usize..=9, k in 1usize..=3, seed in 0u64..1000, augs in 0usize..=8) {
        let inst = random_instance(kind_from_index(kind_idx), n, k, seed);
        let state = reachable_state(&inst, augs);
        let graph = build_reference_graph(&inst, &state);
        let probe = inst.uncounted_clone();

        for i in 0..k {
            let m = probe.matroid(i);
            let part = state.part(i);
            for v in 0..n {
                let mut with_v = part.clone();
                if !part.contains(v) {
                    with_v.insert(v);
                }
                let sink = !part.contains(v) && m.is_independent(&with_v);
                prop_assert_eq!(graph.sink_set(i).contains(v), sink);
                for u in part.ones() {
                    let expected = if part.contains(v) || sink {
                        false
                    } else {
                        let mut q = with_v.clone();
                        q.remove(u);
                        m.is_independent(&q)
                    };
                    let stored = graph.out_edges(v).contains(&(u as u32, i as u32));
                    prop_assert_eq!(stored, expected, "edge ({}, {}) part {}", v, u, i);
                }
            }
        }
    }

    #[test]
    fn spec_round_trip(kind_idx in 0usize..5, n in 1usize..=12, k in 1usize..=5, seed in 0u64..10_000) {
        let spec = random_spec(kind_from_index(kind_idx), n, k, seed);
        let inst = Instance::from_spec(spec.clone()).unwrap();
        let text = inst.to_json();
        let back = Instance::from_json(&text).unwrap();
        prop_assert_eq!(back.spec(), &spec);
        prop_assert_eq!(back.to_json(), text);
    }
}

/// One deterministic exhaustive axiom pass per backend at the size limit
/// the suite promises.
#[test]
fn axioms_at_n10_every_backend() {
    for kind in BackendKind::ALL {
        for seed in [7u64, 19] {
            let inst = random_instance(kind, 10, 2, seed);
            for m in inst.matroids() {
                assert_matroid_axioms(m, 10);
            }
        }
    }
}

#[test]
fn rank_brute_force_at_n12() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for kind in BackendKind::ALL {
        let inst = random_instance(kind, 12, 1, 11);
        let m = inst.matroid(0);
        for _ in 0..40 {
            let mask: u32 = rng.gen_range(0..1 << 12);
            let set = mask_set(12, mask);
            assert_eq!(m.rank(&set), brute_rank(m, 12, &set));
        }
    }
}
