//! Compressed-exchange-graph primitives.
//!
//! The compressed exchange graph of a partition `(S_1..S_k)` has vertices
//! `V ∪ {s, t_1..t_k}` and edges
//!
//! - `s → v` for every `v ∉ S`,
//! - `v → u` whenever some part `S_i` contains `u`, `S_i + v` is dependent,
//!   and `S_i + v − u` is independent,
//! - `v → t_i` whenever `v ∉ S_i` and `S_i + v` is independent.
//!
//! A shortest `s → t_j` path is an augmenting path: applying
//! [`update_partition`] along it grows the partitionable set by one while
//! keeping every part independent.
//!
//! [`find_out_edge`] and [`find_in_edge`] discover edges by binary search
//! instead of scanning, at one certificate query plus a logarithmic number
//! of halving probes. Both assert their own query budgets on every call.
//! [`build_reference_graph`] enumerates the whole edge set directly and is
//! the ground truth the searched variants are tested against.

use crate::oracle::{ElemSet, Element, Instance, MatroidOracle};

/// The current partitionable set `S` as `k` disjoint parts plus the
/// element-to-part assignment map.
#[derive(Debug, Clone)]
pub struct PartitionState {
    parts: Vec<ElemSet>,
    part_of: Vec<Option<u32>>,
}

impl PartitionState {
    pub fn empty(n: usize, k: usize) -> PartitionState {
        assert!(k >= 1, "instance must have at least one matroid");
        PartitionState {
            parts: vec![ElemSet::with_capacity(n); k],
            part_of: vec![None; n],
        }
    }

    /// Build a state from explicit parts; panics when parts overlap.
    pub fn from_parts(n: usize, k: usize, parts: &[Vec<Element>]) -> PartitionState {
        assert!(parts.len() <= k);
        let mut state = PartitionState::empty(n, k);
        for (i, members) in parts.iter().enumerate() {
            for &v in members {
                state.insert(i, v);
            }
        }
        state
    }

    pub fn n(&self) -> usize {
        self.part_of.len()
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn part(&self, i: usize) -> &ElemSet {
        &self.parts[i]
    }

    pub fn parts(&self) -> &[ElemSet] {
        &self.parts
    }

    /// Part index of `v`, or `None` when `v ∉ S`.
    pub fn part_of(&self, v: Element) -> Option<usize> {
        self.part_of[v].map(|i| i as usize)
    }

    pub fn contains(&self, v: Element) -> bool {
        self.part_of[v].is_some()
    }

    /// `|S|`.
    pub fn size(&self) -> usize {
        self.part_of.iter().filter(|p| p.is_some()).count()
    }

    /// The covered set `S = ∪ S_i`.
    pub fn covered(&self) -> ElemSet {
        let mut s = ElemSet::with_capacity(self.n());
        for (v, p) in self.part_of.iter().enumerate() {
            if p.is_some() {
                s.insert(v);
            }
        }
        s
    }

    pub fn part_elements(&self, i: usize) -> Vec<Element> {
        self.parts[i].ones().collect()
    }

    pub fn insert(&mut self, i: usize, v: Element) {
        assert!(self.part_of[v].is_none(), "element {v} already assigned");
        self.part_of[v] = Some(i as u32);
        self.parts[i].insert(v);
    }

    pub fn remove(&mut self, i: usize, v: Element) {
        assert_eq!(
            self.part_of[v],
            Some(i as u32),
            "element {v} not in part {i}"
        );
        self.part_of[v] = None;
        self.parts[i].remove(v);
    }
}

/// An augmenting path `s, v_1, …, v_{l−1}, t_j`: `interior` holds
/// `v_1..v_{l−1}` in path order (`v_1 ∉ S`, the rest in `S`), `sink` is `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentingPath {
    pub interior: Vec<Element>,
    pub sink: usize,
}

impl AugmentingPath {
    /// Path length counted in edges (`l`).
    pub fn len(&self) -> usize {
        self.interior.len() + 1
    }
}

/// `⌈log₂ m⌉` for `m ≥ 1`.
pub(crate) fn ceil_log2(m: usize) -> u64 {
    debug_assert!(m >= 1);
    m.next_power_of_two().trailing_zeros() as u64
}

/// Find `u ∈ pool` with `S + v − u` independent, or `None` when no such
/// element exists.
///
/// `pool ⊆ S` is scanned in its given order and the first exchangeable
/// element under that order is returned. Uses exactly one independence
/// query when returning `None` (the certificate `S + v − pool ∈ I`, which
/// holds iff an exchangeable element exists), and at most
/// `⌈log₂ |pool|⌉ + 2` when returning an element.
pub fn find_out_edge(
    m: &MatroidOracle,
    s: &ElemSet,
    v: Element,
    pool: &[Element],
) -> Option<Element> {
    assert!(!s.contains(v), "find_out_edge: element {v} is in S");
    assert!(
        pool.iter().all(|&u| s.contains(u)),
        "find_out_edge: pool not contained in S"
    );
    let before = m.independence_queries();

    let mut base = s.clone();
    base.insert(v);
    let mut probe = base.clone();
    for &u in pool {
        probe.remove(u);
    }
    let certificate = m.is_independent(&probe);

    let found = if certificate && !pool.is_empty() {
        // Window of pool known to contain an exchangeable element; prefer
        // the earlier half so ties resolve to the first in pool order.
        let mut lo = 0;
        let mut hi = pool.len();
        while hi - lo > 1 {
            let mid = lo + (hi - lo).div_ceil(2);
            let mut q = base.clone();
            for &u in &pool[lo..mid] {
                q.remove(u);
            }
            if m.is_independent(&q) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(pool[lo])
    } else {
        None
    };

    let used = m.independence_queries() - before;
    match found {
        Some(_) => assert!(used <= ceil_log2(pool.len()) + 2),
        None => assert_eq!(used, 1),
    }
    found
}

/// Find `v ∈ pool` with `S − u + v` independent (`u = None`: `S + v`
/// independent), or `None` when no such element exists.
///
/// `pool ∩ S = ∅`. One rank query certifies existence
/// (`rank(S − u + pool) > |S − u|`), then binary search narrows the pool;
/// ties resolve to the first element in pool order. Uses at most
/// `2⌈log₂ |pool|⌉ + 2` rank queries, and none at all on an empty pool.
pub fn find_in_edge(
    m: &MatroidOracle,
    s: &ElemSet,
    u: Option<Element>,
    pool: &[Element],
) -> Option<Element> {
    if let Some(x) = u {
        assert!(s.contains(x), "find_in_edge: element {x} not in S");
    }
    assert!(
        pool.iter().all(|&a| !s.contains(a)),
        "find_in_edge: pool intersects S"
    );
    if pool.is_empty() {
        return None;
    }
    let before = m.rank_queries();

    let mut base = s.clone();
    if let Some(x) = u {
        base.remove(x);
    }
    let base_size = base.count_ones(..);

    let mut probe = base.clone();
    for &a in pool {
        probe.insert(a);
    }
    let found = if m.rank(&probe) > base_size {
        let mut lo = 0;
        let mut hi = pool.len();
        while hi - lo > 1 {
            let mid = lo + (hi - lo).div_ceil(2);
            let mut q = base.clone();
            for &a in &pool[lo..mid] {
                q.insert(a);
            }
            if m.rank(&q) > base_size {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(pool[lo])
    } else {
        None
    };

    let used = m.rank_queries() - before;
    assert!(used <= 2 * ceil_log2(pool.len()) + 2);
    found
}

/// Apply an augmenting path: part `π(v_{i+1})` gains `v_i` and loses
/// `v_{i+1}` for each consecutive interior pair, then part `j` gains the
/// last interior element. Net effect `S → S + v_1`. The caller guarantees
/// the path is a shortest augmenting path; with that, every part stays
/// independent.
pub fn update_partition(state: &mut PartitionState, path: &AugmentingPath) {
    assert!(!path.interior.is_empty(), "path has no interior elements");
    assert!(
        !state.contains(path.interior[0]),
        "path head must be outside S"
    );
    for w in path.interior.windows(2) {
        let (vi, vnext) = (w[0], w[1]);
        let part = state
            .part_of(vnext)
            .expect("interior path element not in S");
        state.remove(part, vnext);
        state.insert(part, vi);
    }
    state.insert(path.sink, *path.interior.last().unwrap());
}

/// Exchange edges plus per-matroid sink adjacency, stored both by source
/// and by target.
#[derive(Debug, Clone)]
pub struct ExchangeEdgeSet {
    /// `by_source[v]` lists `(u, i)` with `u ∈ S_i` and edge `v → u`,
    /// ordered by part then element.
    by_source: Vec<Vec<(u32, u32)>>,
    /// `by_target[u]` lists sources `v` with edge `v → u`.
    by_target: Vec<Vec<u32>>,
    /// `sink_sets[i] = F_i = {v ∉ S_i | S_i + v ∈ I_i}`.
    sink_sets: Vec<ElemSet>,
}

impl ExchangeEdgeSet {
    pub fn out_edges(&self, v: Element) -> &[(u32, u32)] {
        &self.by_source[v]
    }

    pub fn in_edges(&self, u: Element) -> &[u32] {
        &self.by_target[u]
    }

    pub fn sink_set(&self, i: usize) -> &ElemSet {
        &self.sink_sets[i]
    }

    pub fn sink_sets(&self) -> &[ElemSet] {
        &self.sink_sets
    }

    pub fn edge_count(&self) -> usize {
        self.by_source.iter().map(|a| a.len()).sum()
    }

    /// Sorted `(v, u)` pairs of stored edges whose target lies in part `i`.
    pub fn edges_into_part(&self, state: &PartitionState, i: usize) -> Vec<(Element, Element)> {
        let mut edges: Vec<(Element, Element)> = Vec::new();
        for u in state.part(i).ones() {
            for &v in &self.by_target[u] {
                edges.push((v as Element, u));
            }
        }
        edges.sort_unstable();
        edges
    }
}

/// Enumerate the exchange graph directly from its definition: for every
/// part `i` and `v ∉ S_i`, one query decides `S_i + v ∈ I_i` (a sink edge
/// into `t_i`), and when dependent, one query per `u ∈ S_i` decides the
/// edge `v → u`. Costs `O(np + kn)` independence queries.
pub fn build_reference_graph(inst: &Instance, state: &PartitionState) -> ExchangeEdgeSet {
    build_graph_inner(inst, state, None)
}

/// Same enumeration, but with current sink sets supplied so the
/// `S_i + v ∈ I_i` guard is free: only `(v, u)` pairs with `v ∉ S_i ∪ F_i`
/// are queried, `O(np)` independence queries in total.
pub fn build_out_edges_given_sinks(
    inst: &Instance,
    state: &PartitionState,
    sinks: &[ElemSet],
) -> ExchangeEdgeSet {
    build_graph_inner(inst, state, Some(sinks))
}

fn build_graph_inner(
    inst: &Instance,
    state: &PartitionState,
    known_sinks: Option<&[ElemSet]>,
) -> ExchangeEdgeSet {
    let n = inst.n();
    let k = inst.k();
    let mut by_source: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    let mut by_target: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut sink_sets = Vec::with_capacity(k);

    for i in 0..k {
        let m = inst.matroid(i);
        let part = state.part(i);
        let members = state.part_elements(i);
        let mut sinks_i = ElemSet::with_capacity(n);
        for v in 0..n {
            if part.contains(v) {
                continue;
            }
            let extendable = match known_sinks {
                Some(f) => f[i].contains(v),
                None => {
                    let mut probe = part.clone();
                    probe.insert(v);
                    m.is_independent(&probe)
                }
            };
            if extendable {
                sinks_i.insert(v);
                continue;
            }
            let mut with_v = part.clone();
            with_v.insert(v);
            for &u in &members {
                let mut q = with_v.clone();
                q.remove(u);
                if m.is_independent(&q) {
                    by_source[v].push((u as u32, i as u32));
                    by_target[u].push(v as u32);
                }
            }
        }
        sink_sets.push(sinks_i);
    }

    ExchangeEdgeSet {
        by_source,
        by_target,
        sink_sets,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{elem_set, InstanceSpec, MatroidSpec};

    fn triangle(k: usize) -> Instance {
        let spec = MatroidSpec::Graphic {
            num_vertices: 3,
            edges: vec![(0, 1), (1, 2), (2, 0)],
        };
        Instance::from_spec(InstanceSpec {
            n: 3,
            matroids: vec![spec; k],
        })
        .unwrap()
    }

    fn uniform(n: usize, r: usize, k: usize) -> Instance {
        Instance::from_spec(InstanceSpec {
            n,
            matroids: vec![MatroidSpec::Uniform { r }; k],
        })
        .unwrap()
    }

    #[test]
    fn find_out_edge_full_rank_uniform() {
        let inst = uniform(3, 2, 1);
        let s = elem_set(3, &[0, 1]);
        let u = find_out_edge(inst.matroid(0), &s, 2, &[0, 1]);
        assert_eq!(u, Some(0)); // both valid; first in pool order wins
    }

    #[test]
    fn find_out_edge_triangle() {
        let inst = triangle(1);
        let s = elem_set(3, &[0, 1]);
        assert_eq!(find_out_edge(inst.matroid(0), &s, 2, &[0]), Some(0));
        assert_eq!(find_out_edge(inst.matroid(0), &s, 2, &[0, 1]), Some(0));
        assert_eq!(find_out_edge(inst.matroid(0), &s, 2, &[1]), Some(1));
    }

    #[test]
    fn find_out_edge_empty_pool_costs_one_query() {
        let inst = Instance::from_json(
            r#"{"n": 2, "matroids": [{"type":"partition","blocks":[[0,1]],"capacities":[1]}]}"#,
        )
        .unwrap();
        let s = elem_set(2, &[0]);
        let before = inst.matroid(0).independence_queries();
        assert_eq!(find_out_edge(inst.matroid(0), &s, 1, &[]), None);
        assert_eq!(inst.matroid(0).independence_queries() - before, 1);
    }

    #[test]
    fn find_out_edge_loop_source() {
        let inst = uniform(4, 0, 1);
        let s = elem_set(4, &[]);
        let before = inst.matroid(0).independence_queries();
        assert_eq!(find_out_edge(inst.matroid(0), &s, 1, &[]), None);
        assert_eq!(inst.matroid(0).independence_queries() - before, 1);
    }

    #[test]
    fn find_in_edge_examples() {
        let inst = uniform(3, 2, 1);
        let s = elem_set(3, &[0, 1]);
        assert_eq!(find_in_edge(inst.matroid(0), &s, Some(0), &[2]), Some(2));

        let tri = triangle(1);
        let s = elem_set(3, &[0, 1]);
        // adding the third triangle edge closes the cycle
        assert_eq!(find_in_edge(tri.matroid(0), &s, None, &[2]), None);
        assert_eq!(find_in_edge(tri.matroid(0), &s, None, &[]), None);
    }

    #[test]
    fn find_in_edge_empty_pool_costs_nothing() {
        let inst = uniform(3, 2, 1);
        let s = elem_set(3, &[0]);
        let before = inst.matroid(0).rank_queries();
        assert_eq!(find_in_edge(inst.matroid(0), &s, None, &[]), None);
        assert_eq!(inst.matroid(0).rank_queries(), before);
    }

    #[test]
    #[should_panic(expected = "is in S")]
    fn find_out_edge_rejects_member_source() {
        let inst = uniform(3, 2, 1);
        let s = elem_set(3, &[0, 1]);
        find_out_edge(inst.matroid(0), &s, 0, &[1]);
    }

    #[test]
    #[should_panic(expected = "pool not contained in S")]
    fn find_out_edge_rejects_bad_pool() {
        let inst = uniform(3, 2, 1);
        let s = elem_set(3, &[0]);
        find_out_edge(inst.matroid(0), &s, 2, &[1]);
    }

    #[test]
    fn update_length_two_path() {
        let mut state = PartitionState::empty(3, 2);
        update_partition(
            &mut state,
            &AugmentingPath {
                interior: vec![0],
                sink: 1,
            },
        );
        assert_eq!(state.part_elements(1), vec![0]);
        assert_eq!(state.size(), 1);
    }

    #[test]
    fn update_three_element_chain_hits_same_part() {
        // path s, v1=2, v2=0, t_0 with 0 ∈ S_0: part 0 swaps 0 out and back in
        let mut state = PartitionState::from_parts(3, 2, &[vec![0], vec![]]);
        update_partition(
            &mut state,
            &AugmentingPath {
                interior: vec![2, 0],
                sink: 0,
            },
        );
        assert_eq!(state.part_elements(0), vec![0, 2]);
        assert_eq!(state.size(), 2);
    }

    #[test]
    fn update_chain_across_parts() {
        let mut state = PartitionState::from_parts(4, 2, &[vec![1], vec![2]]);
        // path s, 0, 1, 2, t_1: part0 swaps 1→0, part1 swaps 2→1, part1 gains 2
        update_partition(
            &mut state,
            &AugmentingPath {
                interior: vec![0, 1, 2],
                sink: 1,
            },
        );
        assert_eq!(state.part_elements(0), vec![0]);
        assert_eq!(state.part_elements(1), vec![1, 2]);
        assert_eq!(state.size(), 3);
    }

    #[test]
    fn reference_graph_on_empty_state() {
        let inst = triangle(2);
        let state = PartitionState::empty(3, 2);
        let g = build_reference_graph(&inst, &state);
        assert_eq!(g.edge_count(), 0);
        // every triangle edge is a non-loop in both matroids
        for i in 0..2 {
            assert_eq!(g.sink_set(i).count_ones(..), 3);
        }
    }

    #[test]
    fn reference_graph_triangle_saturated_part() {
        let inst = triangle(1);
        let state = PartitionState::from_parts(3, 1, &[vec![0, 1]]);
        let g = build_reference_graph(&inst, &state);
        assert_eq!(g.out_edges(2), &[(0, 0), (1, 0)]);
        assert_eq!(g.sink_set(0).count_ones(..), 0);
    }

    #[test]
    fn reference_graph_free_matroid_has_no_exchange_edges() {
        let inst = uniform(3, 3, 1);
        let state = PartitionState::from_parts(3, 1, &[vec![0, 1]]);
        let g = build_reference_graph(&inst, &state);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.sink_set(0).ones().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn sink_guarded_build_matches_reference() {
        let inst = triangle(2);
        let state = PartitionState::from_parts(3, 2, &[vec![0, 1], vec![]]);
        let reference = build_reference_graph(&inst, &state);
        let guarded = build_out_edges_given_sinks(&inst, &state, reference.sink_sets());
        for v in 0..3 {
            assert_eq!(reference.out_edges(v), guarded.out_edges(v));
        }
    }
}
