//! Solver run reports: final partition, size, query stats, per-phase log.

use crate::exchange::PartitionState;
use crate::oracle::QueryStats;
use crate::Dist;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseKind {
    Greedy,
    BlockFlowBinary,
    BlockFlowEnumeration,
    BlockFlowRank,
    EdgeRecycling,
}

impl PhaseKind {
    pub fn name(self) -> &'static str {
        match self {
            PhaseKind::Greedy => "greedy",
            PhaseKind::BlockFlowBinary => "blockflow-binary",
            PhaseKind::BlockFlowEnumeration => "blockflow-enumeration",
            PhaseKind::BlockFlowRank => "blockflow-rank",
            PhaseKind::EdgeRecycling => "edge-recycling",
        }
    }
}

/// One phase of a solver run. `d_t` is the source-to-sink distance observed
/// by the phase's own BFS (`INF_DIST` when no sink was reachable, and for
/// phase kinds without a distance notion).
#[derive(Debug, Clone)]
pub struct PhaseLog {
    pub kind: PhaseKind,
    pub d_t: Dist,
    pub augmentations: u64,
    pub ind_queries: u64,
    pub rank_queries: u64,
}

/// Outcome of a whole solver run.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub state: PartitionState,
    pub p: usize,
    pub stats: QueryStats,
    pub phases: Vec<PhaseLog>,
}

impl SolveReport {
    pub fn new(state: PartitionState, stats: QueryStats, phases: Vec<PhaseLog>) -> SolveReport {
        let p = state.size();
        SolveReport {
            state,
            p,
            stats,
            phases,
        }
    }
}
