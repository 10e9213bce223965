//! Independent ground truth for tests and the `verify` front-end.
//!
//! Everything here queries a counter-reset clone of the instance, so
//! verification never shows up in the stats of the run under test.

use std::collections::VecDeque;

use thiserror::Error;

use crate::exchange::{
    build_reference_graph, update_partition, AugmentingPath, ExchangeEdgeSet, PartitionState,
};
use crate::oracle::{ElemSet, Element, Instance};
use crate::report::{PhaseKind, PhaseLog, SolveReport};
use crate::{Dist, INF_DIST};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("ground set of size {0} is too large for exhaustive verification (limit {1})")]
    TooLarge(usize, usize),
}

/// Largest ground-set size the exhaustive oracle will enumerate.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Exhaustive evaluation of the matroid-union rank formula.
#[derive(Debug, Clone)]
pub struct OracleVerdict {
    pub p_true: usize,
    /// A set `T` attaining `min_T Σ_i rank_i(T) + |V ∖ T|`.
    pub witness: Vec<Element>,
}

/// Exact `p` by minimizing `Σ_i rank_i(T) + |V ∖ T|` over all `T ⊆ V`.
/// Refuses `n > 20`; the enumeration is `2^n` rank evaluations per matroid.
pub fn union_rank_oracle(inst: &Instance) -> Result<OracleVerdict, VerifyError> {
    let n = inst.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(VerifyError::TooLarge(n, EXHAUSTIVE_LIMIT));
    }
    let probe = inst.uncounted_clone();
    let mut best = usize::MAX;
    let mut witness = 0u32;
    for mask in 0u32..(1u32 << n) {
        let t = set_from_mask(n, mask);
        let outside = n - t.count_ones(..);
        let value: usize = probe.matroids().iter().map(|m| m.rank(&t)).sum::<usize>() + outside;
        if value < best {
            best = value;
            witness = mask;
        }
    }
    Ok(OracleVerdict {
        p_true: best,
        witness: set_from_mask(n, witness).ones().collect(),
    })
}

fn set_from_mask(n: usize, mask: u32) -> ElemSet {
    let mut s = ElemSet::with_capacity(n);
    for v in 0..n {
        if mask >> v & 1 == 1 {
            s.insert(v);
        }
    }
    s
}

/// Forward BFS over an explicitly built exchange graph. Returns exact
/// levels for every element and sink.
pub fn reference_distances(
    graph: &ExchangeEdgeSet,
    state: &PartitionState,
) -> (Vec<Dist>, Vec<Dist>) {
    let n = state.n();
    let k = state.k();
    let mut dist = vec![INF_DIST; n];
    let mut dist_sinks = vec![INF_DIST; k];
    let mut queue: VecDeque<Element> = VecDeque::new();
    for v in 0..n {
        if !state.contains(v) {
            dist[v] = 1;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for i in 0..k {
            if dist_sinks[i] == INF_DIST && graph.sink_set(i).contains(v) {
                dist_sinks[i] = dist[v] + 1;
            }
        }
        for &(u, _) in graph.out_edges(v) {
            let u = u as Element;
            if dist[u] == INF_DIST {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    (dist, dist_sinks)
}

/// Reverse levels: distance from each element to the sink family, plus
/// `d_s = 1 + min_{v ∉ S} d_v`.
pub fn reference_reverse_distances(
    graph: &ExchangeEdgeSet,
    state: &PartitionState,
) -> (Vec<Dist>, Dist) {
    let n = state.n();
    let k = state.k();
    let mut dist = vec![INF_DIST; n];
    let mut queue: VecDeque<Element> = VecDeque::new();
    for v in 0..n {
        if (0..k).any(|i| graph.sink_set(i).contains(v)) {
            dist[v] = 1;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in graph.in_edges(v) {
            let w = w as Element;
            if dist[w] == INF_DIST {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let d_s = (0..n)
        .filter(|&v| !state.contains(v))
        .map(|v| dist[v])
        .min()
        .unwrap_or(INF_DIST)
        .saturating_add(1);
    (dist, d_s)
}

/// Shortest augmenting path in an explicit graph, if any sink is
/// reachable: plain BFS, first sink hit in dequeue order.
pub fn reference_shortest_path(
    graph: &ExchangeEdgeSet,
    state: &PartitionState,
) -> Option<AugmentingPath> {
    let n = state.n();
    let k = state.k();
    let mut parent: Vec<Option<Element>> = vec![None; n];
    let mut seen = ElemSet::with_capacity(n);
    let mut queue: VecDeque<Element> = VecDeque::new();
    for v in 0..n {
        if !state.contains(v) {
            seen.insert(v);
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        if let Some(j) = (0..k).find(|&i| graph.sink_set(i).contains(v)) {
            let mut chain = vec![v];
            let mut cur = v;
            while let Some(w) = parent[cur] {
                chain.push(w);
                cur = w;
            }
            chain.reverse();
            return Some(AugmentingPath {
                interior: chain,
                sink: j,
            });
        }
        for &(u, _) in graph.out_edges(v) {
            let u = u as Element;
            if !seen.contains(u) {
                seen.insert(u);
                parent[u] = Some(v);
                queue.push_back(u);
            }
        }
    }
    None
}

/// Structurally simple exact solver: rebuild the whole exchange graph,
/// take one shortest augmenting path, repeat until no sink is reachable.
/// Queries its own uncounted clone; the report's stats cover that clone.
pub fn reference_solver(inst: &Instance) -> SolveReport {
    let probe = inst.uncounted_clone();
    let start = probe.snapshot_stats();
    let mut state = PartitionState::empty(probe.n(), probe.k());
    let mut augmentations = 0u64;
    let mut rebuilds = 0u64;
    loop {
        rebuilds += 1;
        let graph = build_reference_graph(&probe, &state);
        match reference_shortest_path(&graph, &state) {
            Some(path) => {
                update_partition(&mut state, &path);
                augmentations += 1;
            }
            None => break,
        }
    }
    let mut stats = probe.snapshot_stats().delta_since(&start);
    stats.phases = rebuilds;
    stats.augmentations = augmentations;
    let delta = stats.clone();
    SolveReport::new(
        state,
        stats,
        vec![PhaseLog {
            kind: PhaseKind::BlockFlowBinary,
            d_t: INF_DIST,
            augmentations,
            ind_queries: delta.independence_queries,
            rank_queries: delta.rank_queries,
        }],
    )
}

/// True iff the parts are disjoint (structural) and each part is
/// independent in its matroid (uncounted queries).
pub fn validate_partition(inst: &Instance, state: &PartitionState) -> bool {
    if state.n() != inst.n() || state.k() != inst.k() {
        return false;
    }
    // parts must agree with the assignment map and be pairwise disjoint
    let mut assigned = vec![false; state.n()];
    for i in 0..state.k() {
        for v in state.part(i).ones() {
            if assigned[v] || state.part_of(v) != Some(i) {
                return false;
            }
            assigned[v] = true;
        }
    }
    let probe = inst.uncounted_clone();
    (0..state.k()).all(|i| probe.matroid(i).is_independent(state.part(i)))
}
