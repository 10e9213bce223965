//! Independence-oracle solvers.
//!
//! Three engines over the compressed exchange graph, all driving
//! [`update_partition`] along shortest augmenting paths:
//!
//! - blocking flow with binary-search edge finding
//!   ([`block_flow_independence`]): one BFS per phase, then a layered DFS
//!   that exhausts every shortest path of the current length;
//! - blocking flow with direct per-pair edge queries
//!   ([`block_flow_enumeration`]): same phase contract, but edges are
//!   discovered by scanning and sink adjacency is kept incrementally, which
//!   is cheaper when `k` is large;
//! - edge-recycling augmentation ([`edge_recycling_augmentation`]): the
//!   edge set is enumerated once, then BFS runs before every augmentation,
//!   recycling stored edges into parts not yet touched (dirty set `J`) and
//!   binary-searching only into touched ones.
//!
//! [`solve_combined`] runs blocking-flow phases while the source-to-sink
//! distance is below `max(1, ⌈p̄ / k'^{2/3}⌉)` and finishes with
//! edge-recycling phases.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::exchange::{
    build_out_edges_given_sinks, ceil_log2, find_out_edge, update_partition, AugmentingPath,
    ExchangeEdgeSet, PartitionState,
};
use crate::oracle::{ElemSet, Element, Instance};
use crate::report::{PhaseKind, PhaseLog, SolveReport};
use crate::{Dist, INF_DIST};

#[derive(Debug, Error)]
pub enum AlgoError {
    #[error("eps must lie in (0, 1], got {0}")]
    EpsOutOfRange(f64),
}

/// BFS levels from the source. Non-`S` elements sit at level 1, `S`
/// elements at 2 or more, `d_T = min_i d_{t_i}`.
#[derive(Debug, Clone)]
pub struct DistanceLabels {
    pub dist: Vec<Dist>,
    pub dist_sinks: Vec<Dist>,
}

impl DistanceLabels {
    pub fn d_t(&self) -> Dist {
        self.dist_sinks.iter().copied().min().unwrap_or(INF_DIST)
    }
}

/// What one blocking-flow phase saw and did. `d_t` is the distance at the
/// start of the phase; `INF_DIST` means no sink was reachable and the
/// state is unchanged.
#[derive(Debug, Clone, Copy)]
pub struct PhaseOutcome {
    pub d_t: Dist,
    pub augmentations: u64,
}

impl PhaseOutcome {
    pub fn progressed(&self) -> bool {
        self.augmentations > 0
    }
}

/// A part's members as a shrinking search pool: ascending order for the
/// binary search plus constant-time membership.
struct PartPool {
    sorted: Vec<Element>,
    member: ElemSet,
}

impl PartPool {
    fn new(part: &ElemSet) -> PartPool {
        PartPool {
            sorted: part.ones().collect(),
            member: part.clone(),
        }
    }

    fn remove(&mut self, u: Element) {
        self.member.remove(u);
        let at = self.sorted.binary_search(&u).expect("element in pool");
        self.sorted.remove(at);
    }
}

/// `F_i = {v ∉ S_i | S_i + v ∈ I_i}` for every matroid; at most `kn`
/// independence queries.
pub fn build_all_sink_sets(inst: &Instance, state: &PartitionState) -> Vec<ElemSet> {
    (0..inst.k())
        .map(|i| build_sink_set(inst, state, i))
        .collect()
}

fn build_sink_set(inst: &Instance, state: &PartitionState, i: usize) -> ElemSet {
    let n = inst.n();
    let part = state.part(i);
    let mut f = ElemSet::with_capacity(n);
    for v in 0..n {
        if part.contains(v) {
            continue;
        }
        let mut probe = part.clone();
        probe.insert(v);
        if inst.matroid(i).is_independent(&probe) {
            f.insert(v);
        }
    }
    f
}

/// Greedy maximal partition: for each matroid in turn, take every
/// still-free element that keeps the part independent. Returns the
/// partition and `p̄ = |∪S_i|` with `p̄ ≤ p ≤ 2p̄`, for at most `kn`
/// independence queries.
pub fn greedy_half_approx(inst: &Instance) -> (PartitionState, usize) {
    let (n, k) = (inst.n(), inst.k());
    let mut state = PartitionState::empty(n, k);
    for i in 0..k {
        let m = inst.matroid(i);
        for v in 0..n {
            if state.contains(v) {
                continue;
            }
            let mut probe = state.part(i).clone();
            probe.insert(v);
            if m.is_independent(&probe) {
                state.insert(i, v);
            }
        }
    }
    let p_bar = state.size();
    (state, p_bar)
}

/// Source BFS over the compressed exchange graph via `find_out_edge`
/// against per-part shrinking pools. Labels are exact for every vertex
/// below `d_T` and for `d_T` itself; deeper labels may be off because the
/// unguarded search can report an edge out of a vertex that already
/// reaches a sink. Uses `O(kn + p log p)` independence queries.
pub fn get_distance_independence(inst: &Instance, state: &PartitionState) -> DistanceLabels {
    let (n, k) = (inst.n(), inst.k());
    let mut dist = vec![INF_DIST; n];
    let mut dist_sinks = vec![INF_DIST; k];
    let mut queue: VecDeque<Element> = VecDeque::new();
    for v in 0..n {
        if !state.contains(v) {
            dist[v] = 1;
            queue.push_back(v);
        }
    }
    let mut pools: Vec<PartPool> = (0..k).map(|i| PartPool::new(state.part(i))).collect();

    while let Some(v) = queue.pop_front() {
        let dv = dist[v];
        for i in 0..k {
            if dist_sinks[i] != INF_DIST || state.part(i).contains(v) {
                continue;
            }
            let mut probe = state.part(i).clone();
            probe.insert(v);
            if inst.matroid(i).is_independent(&probe) {
                dist_sinks[i] = dv + 1;
            }
        }
        for i in 0..k {
            if state.part(i).contains(v) {
                continue;
            }
            while let Some(u) = find_out_edge(inst.matroid(i), state.part(i), v, &pools[i].sorted)
            {
                dist[u] = dv + 1;
                queue.push_back(u);
                pools[i].remove(u);
            }
        }
    }
    DistanceLabels { dist, dist_sinks }
}

/// One blocking-flow phase with binary-search edge discovery: BFS, then
/// exhaust shortest augmenting paths of length `d_T`. On return either no
/// sink was reachable (state unchanged) or `|S|` grew and the distance
/// strictly increased. `O(kn + p log p)` independence queries.
pub fn block_flow_independence(inst: &Instance, state: &mut PartitionState) -> PhaseOutcome {
    let labels = get_distance_independence(inst, state);
    let d_t = labels.d_t();
    if d_t == INF_DIST {
        return PhaseOutcome {
            d_t,
            augmentations: 0,
        };
    }
    let augmentations = binary_search_phase(inst, state, &labels);
    assert!(augmentations >= 1, "reachable sink but no augmenting path");
    PhaseOutcome { d_t, augmentations }
}

/// Layered path search of the binary-search variant. `layers[idx]` holds
/// the surviving vertices of level `idx + 1`; an element retreated from is
/// removed for the rest of the phase, and per-element live index sets
/// persist across path searches.
fn binary_search_phase(
    inst: &Instance,
    state: &mut PartitionState,
    labels: &DistanceLabels,
) -> u64 {
    let (n, k) = (inst.n(), inst.k());
    let dt = labels.d_t() as usize;
    debug_assert!(dt >= 2);

    let mut layers: Vec<BTreeSet<Element>> = (1..dt)
        .map(|lvl| {
            (0..n)
                .filter(|&v| labels.dist[v] == lvl as Dist)
                .collect()
        })
        .collect();
    let mut live: Vec<ElemSet> = vec![full_index_set(k); n];
    let mut augmentations = 0u64;

    'phase: loop {
        if layers.iter().any(|l| l.is_empty()) {
            break;
        }
        // search for one path s, a_1, ..., a_{dt-1}, t_j
        let mut a: Vec<Element> = vec![usize::MAX; dt];
        let mut sink: Option<usize> = None;
        let mut l = 0usize;
        loop {
            if l == 0 {
                a[1] = *layers[0].iter().next().expect("layer 1 non-empty");
                l = 1;
                continue;
            }
            if l == dt - 1 {
                // sink step
                let v = a[l];
                for i in 0..k {
                    if state.part(i).contains(v) {
                        continue;
                    }
                    let mut probe = state.part(i).clone();
                    probe.insert(v);
                    if inst.matroid(i).is_independent(&probe) {
                        sink = Some(i);
                        break;
                    }
                }
                if sink.is_some() {
                    break;
                }
            } else {
                // advance from a_l into layer l+1
                let v = a[l];
                let mut next: Option<Element> = None;
                for i in live[v].ones().collect::<Vec<_>>() {
                    if state.part(i).contains(v) {
                        continue;
                    }
                    let pool: Vec<Element> = layers[l]
                        .iter()
                        .copied()
                        .filter(|&u| state.part(i).contains(u))
                        .collect();
                    match find_out_edge(inst.matroid(i), state.part(i), v, &pool) {
                        Some(u) => {
                            next = Some(u);
                            break;
                        }
                        None => {
                            live[v].remove(i);
                        }
                    }
                }
                if let Some(u) = next {
                    a[l + 1] = u;
                    l += 1;
                    continue;
                }
            }
            // retreat: a_l is on no remaining shortest path
            let v = a[l];
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

        match sink {
            Some(j) => {
                let path = AugmentingPath {
                    interior: a[1..dt].to_vec(),
                    sink: j,
                };
                update_partition(state, &path);
                for lvl in 1..dt {
                    layers[lvl - 1].remove(&a[lvl]);
                }
                augmentations += 1;
            }
            None => break 'phase,
        }
    }
    augmentations
}

fn full_index_set(k: usize) -> ElemSet {
    let mut s = ElemSet::with_capacity(k);
    s.insert_range(..);
    s
}

/// Source BFS with direct per-pair edge queries. Sink labels come free
/// from the maintained `F_i` sets, and the `S_i + v ∈ I_i` guard of the
/// edge definition is applied through them, so every label is exact. At
/// most one query per `(v, u, i)` candidate, `O(np)` in total.
fn enumeration_distance(
    inst: &Instance,
    state: &PartitionState,
    sinks: &[ElemSet],
) -> DistanceLabels {
    let (n, k) = (inst.n(), inst.k());
    let mut dist = vec![INF_DIST; n];
    let mut dist_sinks = vec![INF_DIST; k];
    let mut queue: VecDeque<Element> = VecDeque::new();
    for v in 0..n {
        if !state.contains(v) {
            dist[v] = 1;
            queue.push_back(v);
        }
    }
    let mut pools: Vec<PartPool> = (0..k).map(|i| PartPool::new(state.part(i))).collect();

    while let Some(v) = queue.pop_front() {
        let dv = dist[v];
        for i in 0..k {
            if dist_sinks[i] == INF_DIST && sinks[i].contains(v) {
                dist_sinks[i] = dv + 1;
            }
        }
        for i in 0..k {
            if state.part(i).contains(v) || sinks[i].contains(v) {
                continue;
            }
            let mut with_v = state.part(i).clone();
            with_v.insert(v);
            for u in pools[i].sorted.clone() {
                if !pools[i].member.contains(u) {
                    continue;
                }
                let mut probe = with_v.clone();
                probe.remove(u);
                if inst.matroid(i).is_independent(&probe) {
                    dist[u] = dv + 1;
                    queue.push_back(u);
                    pools[i].remove(u);
                }
            }
        }
    }
    DistanceLabels { dist, dist_sinks }
}

/// One blocking-flow phase in the direct-enumeration style: same contract
/// as [`block_flow_independence`], but each candidate `(v, u, i)` is
/// queried at most once against any one version of `S_i`, and the sink
/// sets are maintained with at most `n` queries per augmentation
/// (rebuilding only the sink part, whose span changed).
pub fn block_flow_enumeration(
    inst: &Instance,
    state: &mut PartitionState,
    sinks: &mut [ElemSet],
) -> PhaseOutcome {
    let labels = enumeration_distance(inst, state, sinks);
    let d_t = labels.d_t();
    if d_t == INF_DIST {
        return PhaseOutcome {
            d_t,
            augmentations: 0,
        };
    }
    let augmentations = enumeration_phase(inst, state, sinks, &labels);
    assert!(augmentations >= 1, "reachable sink but no augmenting path");
    PhaseOutcome { d_t, augmentations }
}

fn enumeration_phase(
    inst: &Instance,
    state: &mut PartitionState,
    sinks: &mut [ElemSet],
    labels: &DistanceLabels,
) -> u64 {
    let n = state.n();
    let k = state.k();
    let dt = labels.d_t() as usize;
    let mut layers: Vec<BTreeSet<Element>> = (1..dt)
        .map(|lvl| {
            (0..n)
                .filter(|&v| labels.dist[v] == lvl as Dist)
                .collect()
        })
        .collect();
    // failed (v, u) probes, valid while the target's part is unchanged
    let mut part_version: Vec<u32> = vec![0; k];
    let mut failed: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
    let mut augmentations = 0u64;

    'phase: loop {
        if layers.iter().any(|l| l.is_empty()) {
            break;
        }
        let mut a: Vec<Element> = vec![usize::MAX; dt];
        let mut sink: Option<usize> = None;
        let mut l = 0usize;
        loop {
            if l == 0 {
                a[1] = *layers[0].iter().next().expect("layer 1 non-empty");
                l = 1;
                continue;
            }
            if l == dt - 1 {
                let v = a[l];
                sink = (0..k).find(|&i| sinks[i].contains(v));
                if sink.is_some() {
                    break;
                }
            } else {
                let v = a[l];
                let mut next: Option<Element> = None;
                for u in layers[l].iter().copied().collect::<Vec<_>>() {
                    let i = state.part_of(u).expect("interior layers lie in S");
                    if state.part(i).contains(v) || sinks[i].contains(v) {
                        continue;
                    }
                    if failed.get(&(v as u32, u as u32))
                        == Some(&(i as u32, part_version[i]))
                    {
                        continue;
                    }
                    let mut probe = state.part(i).clone();
                    probe.insert(v);
                    probe.remove(u);
                    if inst.matroid(i).is_independent(&probe) {
                        next = Some(u);
                        break;
                    }
                    failed.insert((v as u32, u as u32), (i as u32, part_version[i]));
                }
                if let Some(u) = next {
                    a[l + 1] = u;
                    l += 1;
                    continue;
                }
            }
            let v = a[l];
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

        match sink {
            Some(j) => {
                let path = AugmentingPath {
                    interior: a[1..dt].to_vec(),
                    sink: j,
                };
                for &v in &path.interior[1..] {
                    part_version[state.part_of(v).expect("interior in S")] += 1;
                }
                part_version[j] += 1;
                update_partition(state, &path);
                sinks[j] = build_sink_set(inst, state, j);
                for lvl in 1..dt {
                    layers[lvl - 1].remove(&a[lvl]);
                }
                augmentations += 1;
            }
            None => break 'phase,
        }
    }
    augmentations
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockFlowVariant {
    BinarySearch,
    Enumeration,
    /// Pick per instance: enumeration when `k ⌈log₂ max(2p̄, 2)⌉ > 2p̄`
    /// (the per-phase `kn log p` term would dominate the `np` one).
    Auto,
}

/// The `Auto` comparison rule, shared with [`solve_combined`].
pub fn enumeration_preferred(k: usize, p_bar: usize) -> bool {
    (k as u64) * ceil_log2((2 * p_bar).max(2)) > 2 * p_bar as u64
}

/// Repeat blocking-flow phases from the empty partition until no sink is
/// reachable; the result is a maximum partitionable set. Phase count is
/// `O(√p)` since each phase strictly increases the source-sink distance.
pub fn solve_blockflow(inst: &Instance, variant: BlockFlowVariant) -> SolveReport {
    let start = inst.snapshot_stats();
    let mut phases: Vec<PhaseLog> = Vec::new();
    let variant = match variant {
        BlockFlowVariant::Auto => {
            let before = inst.snapshot_stats();
            let (_, p_bar) = greedy_half_approx(inst);
            phases.push(phase_log(inst, PhaseKind::Greedy, INF_DIST, 0, &before));
            if enumeration_preferred(inst.k(), p_bar) {
                BlockFlowVariant::Enumeration
            } else {
                BlockFlowVariant::BinarySearch
            }
        }
        v => v,
    };

    let mut state = PartitionState::empty(inst.n(), inst.k());
    match variant {
        BlockFlowVariant::BinarySearch => loop {
            let before = inst.snapshot_stats();
            let out = block_flow_independence(inst, &mut state);
            phases.push(phase_log(
                inst,
                PhaseKind::BlockFlowBinary,
                out.d_t,
                out.augmentations,
                &before,
            ));
            if !out.progressed() {
                break;
            }
        },
        BlockFlowVariant::Enumeration => {
            let mut sinks = build_all_sink_sets(inst, &state);
            loop {
                let before = inst.snapshot_stats();
                let out = block_flow_enumeration(inst, &mut state, &mut sinks);
                phases.push(phase_log(
                    inst,
                    PhaseKind::BlockFlowEnumeration,
                    out.d_t,
                    out.augmentations,
                    &before,
                ));
                if !out.progressed() {
                    break;
                }
            }
        }
        BlockFlowVariant::Auto => unreachable!("resolved above"),
    }
    finalize(inst, state, start, phases)
}

/// Run exactly `⌈1/eps⌉` binary-search blocking-flow phases; the returned
/// size is within a `1 − O(eps)` factor of optimal.
pub fn solve_approx(inst: &Instance, eps: f64) -> Result<SolveReport, AlgoError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(AlgoError::EpsOutOfRange(eps));
    }
    let rounds = (1.0 / eps).ceil() as u64;
    let start = inst.snapshot_stats();
    let mut phases = Vec::new();
    let mut state = PartitionState::empty(inst.n(), inst.k());
    for _ in 0..rounds {
        let before = inst.snapshot_stats();
        let out = block_flow_independence(inst, &mut state);
        phases.push(phase_log(
            inst,
            PhaseKind::BlockFlowBinary,
            out.d_t,
            out.augmentations,
            &before,
        ));
    }
    Ok(finalize(inst, state, start, phases))
}

/// Result of one recycling BFS: the shortest augmenting path if any sink
/// is reachable, plus how many `find_out_edge` invocations were spent.
#[derive(Debug, Clone)]
pub struct RecycleBfsOutcome {
    pub path: Option<AugmentingPath>,
    pub find_out_edge_calls: u64,
}

/// BFS before one recycling augmentation: stored `estar` edges serve every
/// clean part, `find_out_edge` serves the dirty ones, and the first
/// dequeued vertex adjacent to any sink ends the search. `find_out_edge`
/// is invoked `O(p + n·|J|)` times.
pub fn edge_recycling_bfs(
    inst: &Instance,
    state: &PartitionState,
    estar: &ExchangeEdgeSet,
    dirty: &[bool],
    sinks: &[ElemSet],
) -> RecycleBfsOutcome {
    let (n, k) = (inst.n(), inst.k());
    let mut parent: Vec<Option<Element>> = vec![None; n];
    let mut queue: VecDeque<Element> = VecDeque::new();
    for v in 0..n {
        if !state.contains(v) {
            queue.push_back(v);
        }
    }
    let mut pools: Vec<PartPool> = (0..k).map(|i| PartPool::new(state.part(i))).collect();
    let mut calls = 0u64;

    while let Some(v) = queue.pop_front() {
        if let Some(j) = (0..k).find(|&i| sinks[i].contains(v)) {
            let mut chain = vec![v];
            let mut cur = v;
            while let Some(w) = parent[cur] {
                chain.push(w);
                cur = w;
            }
            chain.reverse();
            return RecycleBfsOutcome {
                path: Some(AugmentingPath {
                    interior: chain,
                    sink: j,
                }),
                find_out_edge_calls: calls,
            };
        }
        for i in 0..k {
            if !dirty[i] || state.part(i).contains(v) {
                continue;
            }
            loop {
                calls += 1;
                match find_out_edge(inst.matroid(i), state.part(i), v, &pools[i].sorted) {
                    Some(u) => {
                        parent[u] = Some(v);
                        queue.push_back(u);
                        pools[i].remove(u);
                    }
                    None => break,
                }
            }
        }
        for &(u, pi) in estar.out_edges(v) {
            let (u, pi) = (u as Element, pi as usize);
            if dirty[pi] || !pools[pi].member.contains(u) {
                continue;
            }
            parent[u] = Some(v);
            queue.push_back(u);
            pools[pi].remove(u);
        }
    }
    RecycleBfsOutcome {
        path: None,
        find_out_edge_calls: calls,
    }
}

/// Everything the recycling state holds mid-run, handed to observers after
/// each augmentation for invariant checking.
pub struct RecycleInspect<'a> {
    pub state: &'a PartitionState,
    pub estar: &'a ExchangeEdgeSet,
    pub dirty: &'a [bool],
    pub sinks: &'a [ElemSet],
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RecycleOutcome {
    pub augmentations: u64,
    pub bfs_calls: u64,
    pub find_out_edge_calls: u64,
    /// Final value of the dirty-size accumulator.
    pub sum: u64,
    /// True when the loop ended because no augmenting path exists.
    pub no_path: bool,
}

/// One edge-recycling round: enumerate `E*` once (`O(np)` queries thanks to
/// the current sink sets), then BFS + augment until either no path remains
/// or the accumulated dirty-set sizes reach `2p̄`. After each augmentation,
/// only the sink part's `F_j` is rebuilt; the other touched parts keep
/// their span, so their sink sets stay exact. `O(np log p)` independence
/// queries in total.
pub fn edge_recycling_augmentation(
    inst: &Instance,
    state: &mut PartitionState,
    sinks: &mut [ElemSet],
    p_bar: usize,
) -> RecycleOutcome {
    edge_recycling_augmentation_observed(inst, state, sinks, p_bar, |_| {})
}

pub fn edge_recycling_augmentation_observed(
    inst: &Instance,
    state: &mut PartitionState,
    sinks: &mut [ElemSet],
    p_bar: usize,
    mut observer: impl FnMut(RecycleInspect),
) -> RecycleOutcome {
    let k = inst.k();
    let estar = build_out_edges_given_sinks(inst, state, sinks);
    let mut dirty = vec![false; k];
    let mut out = RecycleOutcome::default();

    while out.sum < 2 * p_bar as u64 {
        let bfs = edge_recycling_bfs(inst, state, &estar, &dirty, sinks);
        out.bfs_calls += 1;
        out.find_out_edge_calls += bfs.find_out_edge_calls;
        let Some(path) = bfs.path else {
            out.no_path = true;
            break;
        };
        for &v in &path.interior[1..] {
            dirty[state.part_of(v).expect("interior in S")] = true;
        }
        dirty[path.sink] = true;
        update_partition(state, &path);
        sinks[path.sink] = build_sink_set(inst, state, path.sink);
        out.sum += dirty.iter().filter(|&&d| d).count() as u64;
        out.augmentations += 1;
        observer(RecycleInspect {
            state,
            estar: &estar,
            dirty: &dirty,
            sinks,
        });
    }
    out
}

/// Pure edge-recycling pipeline: greedy for `p̄`, sink sets once, then
/// recycling rounds from the empty partition until no path remains.
pub fn solve_recycle(inst: &Instance) -> SolveReport {
    let start = inst.snapshot_stats();
    let mut phases = Vec::new();
    let before = inst.snapshot_stats();
    let (_, p_bar) = greedy_half_approx(inst);
    phases.push(phase_log(inst, PhaseKind::Greedy, INF_DIST, 0, &before));

    let mut state = PartitionState::empty(inst.n(), inst.k());
    if p_bar > 0 {
        let mut sinks = build_all_sink_sets(inst, &state);
        loop {
            let before = inst.snapshot_stats();
            let out = edge_recycling_augmentation(inst, &mut state, &mut sinks, p_bar);
            phases.push(phase_log(
                inst,
                PhaseKind::EdgeRecycling,
                INF_DIST,
                out.augmentations,
                &before,
            ));
            if out.no_path {
                break;
            }
        }
    }
    finalize(inst, state, start, phases)
}

/// `max(1, ⌈p̄ / k'^{2/3}⌉)` computed exactly in integers: the smallest
/// `d ≥ 1` with `d³ k'² ≥ p̄³`.
pub fn combined_distance_threshold(p_bar: usize, k_prime: usize) -> Dist {
    if p_bar == 0 || k_prime == 0 {
        return 1;
    }
    let target = (p_bar as u128).pow(3);
    let kk = (k_prime as u128).pow(2);
    let mut d = 1u128;
    while d * d * d * kk < target {
        d += 1;
    }
    d as Dist
}

pub fn solve_combined(inst: &Instance) -> SolveReport {
    solve_combined_with(inst, None)
}

/// Combined solver: greedy for `p̄`, blocking-flow phases (variant chosen
/// by [`enumeration_preferred`]) until the source-sink distance reaches
/// `d = max(1, ⌈p̄ / k'^{2/3}⌉)` with `k' = min(k, 2p̄)`, then
/// edge-recycling rounds until no path remains.
pub fn solve_combined_with(inst: &Instance, d_override: Option<Dist>) -> SolveReport {
    let start = inst.snapshot_stats();
    let mut phases = Vec::new();
    let before = inst.snapshot_stats();
    let (_, p_bar) = greedy_half_approx(inst);
    phases.push(phase_log(inst, PhaseKind::Greedy, INF_DIST, 0, &before));

    let mut state = PartitionState::empty(inst.n(), inst.k());
    if p_bar == 0 {
        // every element is a loop in every matroid; p ≤ 2p̄ = 0
        return finalize(inst, state, start, phases);
    }
    let k_prime = inst.k().min(2 * p_bar);
    let threshold = d_override.unwrap_or_else(|| combined_distance_threshold(p_bar, k_prime));
    let use_enum = enumeration_preferred(inst.k(), p_bar);

    let mut sinks: Option<Vec<ElemSet>> = if use_enum {
        Some(build_all_sink_sets(inst, &state))
    } else {
        None
    };
    loop {
        let before = inst.snapshot_stats();
        let (kind, d_t, augs) = if let Some(sinks) = sinks.as_mut() {
            let labels = enumeration_distance(inst, &state, sinks);
            let d_t = labels.d_t();
            let augs = if d_t >= threshold {
                0
            } else {
                enumeration_phase(inst, &mut state, sinks, &labels)
            };
            (PhaseKind::BlockFlowEnumeration, d_t, augs)
        } else {
            let labels = get_distance_independence(inst, &state);
            let d_t = labels.d_t();
            let augs = if d_t >= threshold {
                0
            } else {
                binary_search_phase(inst, &mut state, &labels)
            };
            (PhaseKind::BlockFlowBinary, d_t, augs)
        };
        phases.push(phase_log(inst, kind, d_t, augs, &before));
        if d_t >= threshold {
            break;
        }
    }

    let mut sinks = sinks.unwrap_or_else(|| build_all_sink_sets(inst, &state));
    loop {
        let before = inst.snapshot_stats();
        let out = edge_recycling_augmentation(inst, &mut state, &mut sinks, p_bar);
        phases.push(phase_log(
            inst,
            PhaseKind::EdgeRecycling,
            INF_DIST,
            out.augmentations,
            &before,
        ));
        if out.no_path {
            break;
        }
    }
    finalize(inst, state, start, phases)
}

fn phase_log(
    inst: &Instance,
    kind: PhaseKind,
    d_t: Dist,
    augmentations: u64,
    before: &crate::oracle::QueryStats,
) -> PhaseLog {
    let delta = inst.snapshot_stats().delta_since(before);
    PhaseLog {
        kind,
        d_t,
        augmentations,
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
    stats.phases = phases
        .iter()
        .filter(|p| p.kind != PhaseKind::Greedy)
        .count() as u64;
    stats.augmentations = phases.iter().map(|p| p.augmentations).sum();
    SolveReport::new(state, stats, phases)
}
