//! Rank-oracle solvers.
//!
//! The rank-side algorithms traverse the compressed exchange graph in
//! reverse: one `find_in_edge` call per vertex discovers an incoming edge,
//! so a full BFS costs `O((n + k) log n)` rank queries instead of the
//! `Ω(min(kn, np))` an independence-oracle BFS needs. Levels here measure
//! distance *to* the sink family; the path search walks sink-to-source.

use std::collections::{BTreeSet, VecDeque};

use crate::algos_ind::{AlgoError, PhaseOutcome};
use crate::exchange::{find_in_edge, update_partition, AugmentingPath, PartitionState};
use crate::oracle::{Element, Instance};
use crate::report::{PhaseKind, PhaseLog, SolveReport};
use crate::{Dist, INF_DIST};

/// Reverse BFS levels: `dist[v]` is the distance from `v` to the nearest
/// sink, `d_s = 1 + min_{v ∉ S} dist[v]` is the full source-sink distance.
#[derive(Debug, Clone)]
pub struct ReverseDistanceLabels {
    pub dist: Vec<Dist>,
    pub d_s: Dist,
}

/// Reverse BFS seeded from every sink through a single global pool of
/// unlabeled elements. `O((n + k) log n)` rank queries; no independence
/// queries at all.
pub fn get_distance_rank(inst: &Instance, state: &PartitionState) -> ReverseDistanceLabels {
    let (n, k) = (inst.n(), inst.k());
    let mut dist = vec![INF_DIST; n];
    let mut d_s = INF_DIST;
    let mut avail = vec![true; n];
    let mut queue: VecDeque<Element> = VecDeque::new();

    let pool_without = |avail: &[bool], part: &crate::oracle::ElemSet| -> Vec<Element> {
        (0..n).filter(|&v| avail[v] && !part.contains(v)).collect()
    };

    for i in 0..k {
        let part = state.part(i);
        loop {
            let pool = pool_without(&avail, part);
            match find_in_edge(inst.matroid(i), part, None, &pool) {
                Some(u) => {
                    dist[u] = 1;
                    avail[u] = false;
                    queue.push_back(u);
                }
                None => break,
            }
        }
    }

    while let Some(v) = queue.pop_front() {
        match state.part_of(v) {
            None => {
                if d_s == INF_DIST {
                    d_s = dist[v] + 1;
                }
            }
            Some(i) => {
                let part = state.part(i);
                loop {
                    let pool = pool_without(&avail, part);
                    match find_in_edge(inst.matroid(i), part, Some(v), &pool) {
                        Some(u) => {
                            dist[u] = dist[v] + 1;
                            avail[u] = false;
                            queue.push_back(u);
                        }
                        None => break,
                    }
                }
            }
        }
    }
    ReverseDistanceLabels { dist, d_s }
}

/// One blocking-flow phase under the rank oracle: reverse BFS, then walk
/// paths sink-to-source through the layers, retiring sinks whose search
/// pool is exhausted and removing retreated elements for the rest of the
/// phase. Same contract as the independence-side phase; `O((n + k) log n)`
/// rank queries.
pub fn block_flow_rank(inst: &Instance, state: &mut PartitionState) -> PhaseOutcome {
    let labels = get_distance_rank(inst, state);
    let d_s = labels.d_s;
    if d_s == INF_DIST {
        return PhaseOutcome {
            d_t: INF_DIST,
            augmentations: 0,
        };
    }
    let augmentations = rank_phase(inst, state, &labels);
    assert!(augmentations >= 1, "reachable sink but no augmenting path");
    PhaseOutcome {
        d_t: d_s,
        augmentations,
    }
}

fn rank_phase(inst: &Instance, state: &mut PartitionState, labels: &ReverseDistanceLabels) -> u64 {
    let n = state.n();
    let k = state.k();
    let ds = labels.d_s as usize;
    debug_assert!(ds >= 2);

    // layers[idx] holds level idx+1: elements at that distance to the sinks.
    // Levels below ds−1 contain only S elements; level ds−1 is where the
    // path meets the source side, so only elements outside S qualify there.
    let mut layers: Vec<BTreeSet<Element>> = (1..ds)
        .map(|lvl| {
            (0..n)
                .filter(|&v| labels.dist[v] == lvl as Dist)
                .collect()
        })
        .collect();
    let mut sink_live = vec![true; k];
    let mut augmentations = 0u64;

    let collect_pool = |layer: &BTreeSet<Element>,
                        state: &PartitionState,
                        exclude_part: usize,
                        source_layer: bool| {
        layer
            .iter()
            .copied()
            .filter(|&w| {
                if source_layer {
                    !state.contains(w)
                } else {
                    state.part_of(w) != Some(exclude_part)
                }
            })
            .collect::<Vec<_>>()
    };

    'phase: loop {
        if layers.iter().any(|l| l.is_empty()) || !sink_live.iter().any(|&x| x) {
            break;
        }
        let mut a: Vec<Element> = vec![usize::MAX; ds];
        let mut sink: Option<usize> = None;
        let mut complete = false;
        let mut l = 0usize;
        loop {
            if l == ds - 1 {
                complete = true;
                break;
            }
            if l == 0 {
                let mut seeded = false;
                for j in 0..k {
                    if !sink_live[j] {
                        continue;
                    }
                    let pool = collect_pool(&layers[0], state, j, ds == 2);
                    match find_in_edge(inst.matroid(j), state.part(j), None, &pool) {
                        Some(w) => {
                            a[1] = w;
                            sink = Some(j);
                            seeded = true;
                            break;
                        }
                        None => sink_live[j] = false,
                    }
                }
                if !seeded {
                    break;
                }
                l = 1;
                continue;
            }
            // extend from a_l (in S) to level l+1
            let v = a[l];
            let i = state.part_of(v).expect("interior element in S");
            let pool = collect_pool(&layers[l], state, i, l + 1 == ds - 1);
            match find_in_edge(inst.matroid(i), state.part(i), Some(v), &pool) {
                Some(w) => {
                    a[l + 1] = w;
                    l += 1;
                }
                None => {
                    layers[l - 1].remove(&v);
                    if layers[l - 1].is_empty() {
                        break;
                    }
                    if l == 1 {
                        l = 0;
                    } else {
                        l -= 1;
                    }
                }
            }
        }

        if complete {
            // path s, a_{ds-1}, ..., a_1, t_j
            let interior: Vec<Element> = (1..ds).rev().map(|m| a[m]).collect();
            let path = AugmentingPath {
                interior,
                sink: sink.expect("complete path has a sink"),
            };
            update_partition(state, &path);
            for lvl in 1..ds {
                layers[lvl - 1].remove(&a[lvl]);
            }
            augmentations += 1;
        } else if layers.iter().any(|l| l.is_empty()) {
            break 'phase;
        }
        // otherwise the sink pool ran dry; the loop head re-checks
    }
    augmentations
}

/// Repeat [`block_flow_rank`] from the empty partition until no sink is
/// reachable: exact `p` in `O((n + k) √p log n)` rank queries.
pub fn solve_rank(inst: &Instance) -> SolveReport {
    let start = inst.snapshot_stats();
    let mut phases = Vec::new();
    let mut state = PartitionState::empty(inst.n(), inst.k());
    loop {
        let before = inst.snapshot_stats();
        let out = block_flow_rank(inst, &mut state);
        phases.push(rank_phase_log(inst, out, &before));
        if !out.progressed() {
            break;
        }
    }
    finalize(inst, state, start, phases)
}

/// Exactly `⌈1/eps⌉` rank-oracle blocking-flow phases.
pub fn solve_rank_approx(inst: &Instance, eps: f64) -> Result<SolveReport, AlgoError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(AlgoError::EpsOutOfRange(eps));
    }
    let rounds = (1.0 / eps).ceil() as u64;
    let start = inst.snapshot_stats();
    let mut phases = Vec::new();
    let mut state = PartitionState::empty(inst.n(), inst.k());
    for _ in 0..rounds {
        let before = inst.snapshot_stats();
        let out = block_flow_rank(inst, &mut state);
        phases.push(rank_phase_log(inst, out, &before));
    }
    Ok(finalize(inst, state, start, phases))
}

fn rank_phase_log(
    inst: &Instance,
    out: PhaseOutcome,
    before: &crate::oracle::QueryStats,
) -> PhaseLog {
    let delta = inst.snapshot_stats().delta_since(before);
    PhaseLog {
        kind: PhaseKind::BlockFlowRank,
        d_t: out.d_t,
        augmentations: out.augmentations,
        ind_queries: delta.independence_queries,
        rank_queries: delta.rank_queries,
    }
}

fn finalize(
    inst: &Instance,
    state: PartitionState,
    start: crate::oracle::QueryStats,
    phases: Vec<PhaseLog>,
) -> SolveReport {
    let mut stats = inst.snapshot_stats().delta_since(&start);
    stats.phases = phases.len() as u64;
    stats.augmentations = phases.iter().map(|p| p.augmentations).sum();
    SolveReport::new(state, stats, phases)
}
