//! Matroid oracles with per-call query counting.
//!
//! Every algorithm in this crate sees a matroid only through
//! [`MatroidOracle::is_independent`] and [`MatroidOracle::rank`]; each call
//! bumps exactly one counter by exactly one. Four concrete backends are
//! provided: uniform, partition, graphic (forests of a multigraph), and
//! binary-linear over GF(2). There is deliberately no caching or
//! memoization anywhere in this module: it would falsify query counts.

use std::cell::Cell;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Ground-set element, a dense index in `[0, n)`.
pub type Element = usize;

/// A subset of the ground set. The bitset capacity is always the instance's
/// ground-set size `n`; oracles reject sets sized for a different instance.
pub type ElemSet = FixedBitSet;

/// Build an [`ElemSet`] over a ground set of size `n` from explicit members.
pub fn elem_set(n: usize, members: &[Element]) -> ElemSet {
    let mut s = ElemSet::with_capacity(n);
    for &v in members {
        assert!(v < n, "element {v} out of range for ground set of size {n}");
        s.insert(v);
    }
    s
}

/// Serializable matroid description. Field names and tags are the wire
/// format of the instance JSON schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MatroidSpec {
    Uniform {
        r: usize,
    },
    Partition {
        blocks: Vec<Vec<Element>>,
        capacities: Vec<usize>,
    },
    /// `edges[i]` is ground element `i`.
    Graphic {
        num_vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    /// Column `i` of the row strings is ground element `i`.
    Binary {
        rows: Vec<String>,
    },
}

impl MatroidSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            MatroidSpec::Uniform { .. } => "uniform",
            MatroidSpec::Partition { .. } => "partition",
            MatroidSpec::Graphic { .. } => "graphic",
            MatroidSpec::Binary { .. } => "binary",
        }
    }
}

/// Serializable instance: `n` plus one spec per matroid, all over `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub matroids: Vec<MatroidSpec>,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("instance JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("instance must contain at least one matroid")]
    NoMatroids,
    #[error("matroid {index} ({kind}): {reason}")]
    BadMatroid {
        index: usize,
        kind: &'static str,
        reason: String,
    },
}

/// Compiled backend. Immutable after construction.
#[derive(Debug, Clone)]
enum Backend {
    Uniform {
        rank: usize,
    },
    Partition {
        block_masks: Vec<ElemSet>,
        capacities: Vec<usize>,
    },
    Graphic {
        num_vertices: usize,
        edges: Vec<(u32, u32)>,
    },
    Binary {
        /// One bit-row of the column-major matrix per ground element.
        columns: Vec<Vec<u64>>,
    },
}

impl Backend {
    fn compile(n: usize, index: usize, spec: &MatroidSpec) -> Result<Backend, InstanceError> {
        let bad = |reason: String| InstanceError::BadMatroid {
            index,
            kind: spec.kind_name(),
            reason,
        };
        match spec {
            MatroidSpec::Uniform { r } => Ok(Backend::Uniform { rank: *r }),
            MatroidSpec::Partition { blocks, capacities } => {
                if blocks.len() != capacities.len() {
                    return Err(bad(format!(
                        "{} blocks but {} capacities",
                        blocks.len(),
                        capacities.len()
                    )));
                }
                let mut seen = vec![false; n];
                let mut block_masks = Vec::with_capacity(blocks.len());
                for block in blocks {
                    let mut mask = ElemSet::with_capacity(n);
                    for &v in block {
                        if v >= n {
                            return Err(bad(format!("block element {v} out of range")));
                        }
                        if seen[v] {
                            return Err(bad(format!("element {v} appears in two blocks")));
                        }
                        seen[v] = true;
                        mask.insert(v);
                    }
                    block_masks.push(mask);
                }
                if let Some(v) = seen.iter().position(|covered| !covered) {
                    return Err(bad(format!("element {v} is in no block")));
                }
                Ok(Backend::Partition {
                    block_masks,
                    capacities: capacities.clone(),
                })
            }
            MatroidSpec::Graphic {
                num_vertices,
                edges,
            } => {
                if edges.len() != n {
                    return Err(bad(format!(
                        "{} edges for ground set of size {n}",
                        edges.len()
                    )));
                }
                for &(u, v) in edges {
                    if u >= *num_vertices || v >= *num_vertices {
                        return Err(bad(format!("edge ({u},{v}) out of vertex range")));
                    }
                }
                Ok(Backend::Graphic {
                    num_vertices: *num_vertices,
                    edges: edges.iter().map(|&(u, v)| (u as u32, v as u32)).collect(),
                })
            }
            MatroidSpec::Binary { rows } => {
                let words = rows.len().div_ceil(64);
                let mut columns = vec![vec![0u64; words]; n];
                for (r, row) in rows.iter().enumerate() {
                    if row.len() != n {
                        return Err(bad(format!(
                            "row {r} has length {} expected {n}",
                            row.len()
                        )));
                    }
                    for (c, ch) in row.bytes().enumerate() {
                        match ch {
                            b'0' => {}
                            b'1' => columns[c][r / 64] |= 1u64 << (r % 64),
                            _ => return Err(bad(format!("row {r} contains non-binary char"))),
                        }
                    }
                }
                Ok(Backend::Binary { columns })
            }
        }
    }

    fn independent(&self, set: &ElemSet) -> bool {
        match self {
            Backend::Uniform { rank } => set.count_ones(..) <= *rank,
            Backend::Partition {
                block_masks,
                capacities,
            } => block_masks
                .iter()
                .zip(capacities)
                .all(|(mask, &cap)| mask.intersection_count(set) <= cap),
            Backend::Graphic {
                num_vertices,
                edges,
            } => {
                let mut uf = UnionFind::new(*num_vertices);
                set.ones()
                    .all(|e| uf.union(edges[e].0 as usize, edges[e].1 as usize))
            }
            Backend::Binary { columns } => {
                let mut basis: Vec<Vec<u64>> = Vec::new();
                set.ones().all(|e| gf2_insert(&mut basis, &columns[e]))
            }
        }
    }

    fn rank(&self, set: &ElemSet) -> usize {
        match self {
            Backend::Uniform { rank } => set.count_ones(..).min(*rank),
            Backend::Partition {
                block_masks,
                capacities,
            } => block_masks
                .iter()
                .zip(capacities)
                .map(|(mask, &cap)| mask.intersection_count(set).min(cap))
                .sum(),
            Backend::Graphic {
                num_vertices,
                edges,
            } => {
                let mut uf = UnionFind::new(*num_vertices);
                set.ones()
                    .filter(|&e| uf.union(edges[e].0 as usize, edges[e].1 as usize))
                    .count()
            }
            Backend::Binary { columns } => {
                let mut basis: Vec<Vec<u64>> = Vec::new();
                set.ones()
                    .filter(|&e| gf2_insert(&mut basis, &columns[e]))
                    .count()
            }
        }
    }
}

/// Insert a GF(2) vector into a row-echelon basis. Returns false when the
/// vector is in the span (reduces to zero).
fn gf2_insert(basis: &mut Vec<Vec<u64>>, column: &[u64]) -> bool {
    let mut col = column.to_vec();
    for b in basis.iter() {
        let lead = leading_bit(b).expect("basis vectors are nonzero");
        if bit_at(&col, lead) {
            xor_into(&mut col, b);
        }
    }
    if leading_bit(&col).is_none() {
        return false;
    }
    basis.push(col);
    true
}

fn leading_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn bit_at(v: &[u64], bit: usize) -> bool {
    v[bit / 64] >> (bit % 64) & 1 == 1
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

/// Plain union-find with path halving, rebuilt for every graphic-matroid
/// query so the cost model charges per oracle call rather than amortizing
/// structure reuse across calls.
struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb as u32;
        true
    }
}

/// One matroid behind the counting query interface.
///
/// Immutable after construction except for the two counters, so a shared
/// reference suffices everywhere. An oracle is confined to one logical
/// worker; concurrent runs clone the whole [`Instance`].
#[derive(Debug, Clone)]
pub struct MatroidOracle {
    n: usize,
    backend: Backend,
    independence_queries: Cell<u64>,
    rank_queries: Cell<u64>,
}

impl MatroidOracle {
    pub fn from_spec(n: usize, index: usize, spec: &MatroidSpec) -> Result<Self, InstanceError> {
        Ok(MatroidOracle {
            n,
            backend: Backend::compile(n, index, spec)?,
            independence_queries: Cell::new(0),
            rank_queries: Cell::new(0),
        })
    }

    fn check_set(&self, set: &ElemSet) {
        assert!(
            set.len() == self.n,
            "instance mismatch: set over ground size {} queried against oracle over {}",
            set.len(),
            self.n
        );
    }

    /// Independence query. Counted.
    pub fn is_independent(&self, set: &ElemSet) -> bool {
        self.check_set(set);
        self.independence_queries
            .set(self.independence_queries.get() + 1);
        self.backend.independent(set)
    }

    /// Rank query: size of a largest independent subset. Counted.
    pub fn rank(&self, set: &ElemSet) -> usize {
        self.check_set(set);
        self.rank_queries.set(self.rank_queries.get() + 1);
        self.backend.rank(set)
    }

    pub fn independence_queries(&self) -> u64 {
        self.independence_queries.get()
    }

    pub fn rank_queries(&self) -> u64 {
        self.rank_queries.get()
    }

    pub fn reset_counters(&self) {
        self.independence_queries.set(0);
        self.rank_queries.set(0);
    }
}

/// Snapshot of query counters plus run-level phase/augmentation counts.
/// Totals always equal the sum of the per-matroid columns.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QueryStats {
    pub independence_queries: u64,
    pub rank_queries: u64,
    pub per_matroid_independence: Vec<u64>,
    pub per_matroid_rank: Vec<u64>,
    pub phases: u64,
    pub augmentations: u64,
}

impl QueryStats {
    /// Component-wise difference `self - earlier`; counters are monotone so
    /// this is the cost of whatever ran in between.
    pub fn delta_since(&self, earlier: &QueryStats) -> QueryStats {
        QueryStats {
            independence_queries: self.independence_queries - earlier.independence_queries,
            rank_queries: self.rank_queries - earlier.rank_queries,
            per_matroid_independence: self
                .per_matroid_independence
                .iter()
                .zip(&earlier.per_matroid_independence)
                .map(|(a, b)| a - b)
                .collect(),
            per_matroid_rank: self
                .per_matroid_rank
                .iter()
                .zip(&earlier.per_matroid_rank)
                .map(|(a, b)| a - b)
                .collect(),
            phases: self.phases - earlier.phases,
            augmentations: self.augmentations - earlier.augmentations,
        }
    }
}

/// A matroid-partition instance: `k` oracles over the same ground set.
#[derive(Debug, Clone)]
pub struct Instance {
    spec: InstanceSpec,
    matroids: Vec<MatroidOracle>,
}

impl Instance {
    pub fn from_spec(spec: InstanceSpec) -> Result<Instance, InstanceError> {
        if spec.matroids.is_empty() {
            return Err(InstanceError::NoMatroids);
        }
        let matroids = spec
            .matroids
            .iter()
            .enumerate()
            .map(|(i, m)| MatroidOracle::from_spec(spec.n, i, m))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Instance { spec, matroids })
    }

    pub fn from_json(text: &str) -> Result<Instance, InstanceError> {
        Instance::from_spec(serde_json::from_str(text)?)
    }

    /// Pretty JSON in schema field order; `from_json(to_json(x))` is
    /// byte-identical to `to_json(x)`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.spec).expect("spec serializes");
        s.push('\n');
        s
    }

    pub fn spec(&self) -> &InstanceSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn k(&self) -> usize {
        self.matroids.len()
    }

    pub fn matroid(&self, i: usize) -> &MatroidOracle {
        &self.matroids[i]
    }

    pub fn matroids(&self) -> &[MatroidOracle] {
        &self.matroids
    }

    pub fn empty_set(&self) -> ElemSet {
        ElemSet::with_capacity(self.spec.n)
    }

    pub fn snapshot_stats(&self) -> QueryStats {
        let per_ind: Vec<u64> = self
            .matroids
            .iter()
            .map(|m| m.independence_queries())
            .collect();
        let per_rank: Vec<u64> = self.matroids.iter().map(|m| m.rank_queries()).collect();
        QueryStats {
            independence_queries: per_ind.iter().sum(),
            rank_queries: per_rank.iter().sum(),
            per_matroid_independence: per_ind,
            per_matroid_rank: per_rank,
            phases: 0,
            augmentations: 0,
        }
    }

    pub fn reset_stats(&self) {
        for m in &self.matroids {
            m.reset_counters();
        }
    }

    /// Counter-free copy for verification probes, so ground-truth checks
    /// never show up in the stats of the run under test.
    pub fn uncounted_clone(&self) -> Instance {
        let copy = self.clone();
        copy.reset_stats();
        copy
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn triangle_spec() -> MatroidSpec {
        MatroidSpec::Graphic {
            num_vertices: 3,
            edges: vec![(0, 1), (1, 2), (2, 0)],
        }
    }

    fn single(n: usize, spec: MatroidSpec) -> Instance {
        Instance::from_spec(InstanceSpec {
            n,
            matroids: vec![spec],
        })
        .unwrap()
    }

    #[test]
    fn uniform_examples() {
        let inst = single(5, MatroidSpec::Uniform { r: 2 });
        let m = inst.matroid(0);
        assert!(m.is_independent(&elem_set(5, &[0, 1])));
        assert_eq!(m.rank(&elem_set(5, &[0, 1, 2, 3])), 2);
        assert_eq!(m.rank(&elem_set(5, &[])), 0);
    }

    #[test]
    fn graphic_triangle_examples() {
        let inst = single(3, triangle_spec());
        let m = inst.matroid(0);
        assert!(!m.is_independent(&elem_set(3, &[0, 1, 2])));
        assert!(m.is_independent(&elem_set(3, &[0, 1])));
        assert_eq!(m.rank(&elem_set(3, &[0, 1, 2])), 2);
    }

    #[test]
    fn binary_dependent_triple() {
        // columns (1,0), (0,1), (1,1): GF(2) rank 2 < 3
        let inst = single(
            3,
            MatroidSpec::Binary {
                rows: vec!["101".into(), "011".into()],
            },
        );
        let m = inst.matroid(0);
        assert!(!m.is_independent(&elem_set(3, &[0, 1, 2])));
        assert_eq!(m.rank(&elem_set(3, &[0, 1, 2])), 2);
        assert!(m.is_independent(&elem_set(3, &[0, 1])));
    }

    #[test]
    fn partition_block_cap() {
        let inst = single(
            2,
            MatroidSpec::Partition {
                blocks: vec![vec![0, 1]],
                capacities: vec![1],
            },
        );
        let m = inst.matroid(0);
        assert!(m.is_independent(&elem_set(2, &[0])));
        assert!(!m.is_independent(&elem_set(2, &[0, 1])));
        assert_eq!(m.rank(&elem_set(2, &[0, 1])), 1);
    }

    #[test]
    fn counters_per_call() {
        let inst = single(3, triangle_spec());
        let m = inst.matroid(0);
        assert_eq!(inst.snapshot_stats().independence_queries, 0);
        assert_eq!(inst.snapshot_stats().rank_queries, 0);
        m.is_independent(&elem_set(3, &[0]));
        m.is_independent(&elem_set(3, &[1]));
        m.is_independent(&elem_set(3, &[0, 1, 2]));
        m.rank(&elem_set(3, &[0, 1]));
        let s = inst.snapshot_stats();
        assert_eq!(s.independence_queries, 3);
        assert_eq!(s.rank_queries, 1);
        assert_eq!(s.per_matroid_independence, vec![3]);
        assert_eq!(
            s.independence_queries,
            s.per_matroid_independence.iter().sum::<u64>()
        );
        inst.reset_stats();
        assert_eq!(inst.snapshot_stats().independence_queries, 0);
    }

    #[test]
    #[should_panic(expected = "instance mismatch")]
    fn wrong_ground_size_panics() {
        let inst = single(3, triangle_spec());
        inst.matroid(0).is_independent(&elem_set(4, &[0]));
    }

    #[test]
    fn loader_rejects_bad_instances() {
        assert!(Instance::from_json("{not json").is_err());
        assert!(matches!(
            Instance::from_json(r#"{"n": 3, "matroids": []}"#),
            Err(InstanceError::NoMatroids)
        ));
        // graphic edge count must match n
        assert!(Instance::from_json(
            r#"{"n": 2, "matroids": [{"type":"graphic","num_vertices":2,"edges":[[0,1]]}]}"#
        )
        .is_err());
        // partition blocks must cover [0, n) exactly
        assert!(Instance::from_json(
            r#"{"n": 2, "matroids": [{"type":"partition","blocks":[[0]],"capacities":[1]}]}"#
        )
        .is_err());
        assert!(Instance::from_json(
            r#"{"n": 2, "matroids": [{"type":"partition","blocks":[[0,1],[1]],"capacities":[1,1]}]}"#
        )
        .is_err());
        // binary rows must have length n
        assert!(Instance::from_json(
            r#"{"n": 3, "matroids": [{"type":"binary","rows":["01"]}]}"#
        )
        .is_err());
    }

    #[test]
    fn json_round_trip_is_stable() {
        let text = r#"{"n": 3, "matroids": [{"type":"graphic","num_vertices":3,"edges":[[0,1],[1,2],[2,0]]},{"type":"uniform","r":2}]}"#;
        let inst = Instance::from_json(text).unwrap();
        let once = inst.to_json();
        let twice = Instance::from_json(&once).unwrap().to_json();
        assert_eq!(once, twice);
    }
}
