use serde::{Deserialize, Serialize};

use super::{require_one_to_one, Algorithm, PartitionResult};
use crate::assignment::Partition;
use crate::coloring::{build_digraph, equitable_color, Coloring};
use crate::error::Result;
use crate::instance::Instance;
use crate::solver::optimum;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiTrace {
    pub coloring: Coloring,
}

/// Keeps the unconstrained optimum and partitions the agents into the
/// `2k + 1` classes of an equitable coloring of its review graph, so no
/// review stays inside a class.
pub fn multi_partition(instance: &Instance, k: usize) -> Result<PartitionResult> {
    multi_partition_traced(instance, k).map(|(r, _)| r)
}

pub fn multi_partition_traced(instance: &Instance, k: usize) -> Result<(PartitionResult, MultiTrace)> {
    require_one_to_one(instance, "multi-partitioning")?;
    let inst = instance.with_k(k)?;
    let (assignment, value) = optimum(&inst)?;
    let graph = build_digraph(&inst, &assignment)?;
    let coloring = equitable_color(&graph, 2 * k + 1)?;
    let partition = Partition::multi(coloring.classes());
    let result = PartitionResult {
        algorithm: Algorithm::Multi,
        seed: None,
        assignment,
        partition,
        dummy_agents: 0,
        value,
    };
    Ok((result, MultiTrace { coloring }))
}
