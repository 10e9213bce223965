//! Maximum matroid partition (matroid union) under counted oracle access.
//!
//! Given `k` matroids over a common ground set of `n` elements, the goal is
//! to find a largest set that splits into `k` parts, the i-th part
//! independent in the i-th matroid. All algorithms here touch the matroids
//! only through [`oracle::MatroidOracle`], which counts every independence
//! and rank query, so solvers can be compared by query complexity rather
//! than wall time.
//!
//! Module map:
//! - [`oracle`]: concrete matroid backends behind a counting query interface.
//! - [`exchange`]: binary-search edge finding, augmentation, and a
//!   direct-enumeration builder for the compressed exchange graph.
//! - [`algos_ind`]: independence-oracle solvers (greedy, blocking flow in two
//!   flavors, edge-recycling augmentation, and the combined solver).
//! - [`algos_rank`]: rank-oracle solvers (reverse BFS + blocking flow).
//! - [`verify`]: brute-force ground truth, used by tests and `verify`
//!   front-ends; never charged against a solver's budget.
//! - [`gen`]: seeded random instance generators.

pub mod algos_ind;
pub mod algos_rank;
pub mod exchange;
pub mod gen;
pub mod oracle;
pub mod report;
pub mod verify;

/// BFS level / distance value. `INF_DIST` stands for "unreachable".
pub type Dist = u32;
pub const INF_DIST: Dist = u32::MAX;

pub use exchange::{AugmentingPath, ExchangeEdgeSet, PartitionState};
pub use oracle::{ElemSet, Element, Instance, MatroidOracle, QueryStats};
pub use report::{PhaseKind, PhaseLog, SolveReport};
