use serde::{Deserialize, Serialize};

use super::{combinations, cut_value, require_one_to_one, Algorithm, PartitionResult};
use crate::assignment::{Assignment, Partition};
use crate::coloring::{build_digraph, equitable_color, Coloring};
use crate::error::Result;
use crate::instance::Instance;
use crate::score::Score;
use crate::solver::optimum_for_partition;

/// Intermediate state of [`coloring_partition_traced`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringTrace {
    pub opt_assignment: Assignment,
    pub opt: Score,
    /// Equitable coloring of the padded review graph.
    pub coloring: Coloring,
    /// Every `(k + 1)`-subset of colors and the optimal similarity it cuts.
    pub cut_values: Vec<(Vec<usize>, Score)>,
    /// Index into `cut_values` of the chosen subset.
    pub best: usize,
}

impl ColoringTrace {
    pub fn best_cut(&self) -> Score {
        self.cut_values[self.best].1
    }
}

/// Colors the review graph of the optimum with `2k + 2` equitable classes and
/// keeps the split into `k + 1` classes per side that cuts the most
/// similarity. Pads with zero-similarity agents to a multiple of `2k + 2`.
pub fn coloring_partition(instance: &Instance, k: usize) -> Result<PartitionResult> {
    coloring_partition_traced(instance, k).map(|(r, _)| r)
}

pub fn coloring_partition_traced(instance: &Instance, k: usize) -> Result<(PartitionResult, ColoringTrace)> {
    require_one_to_one(instance, "coloring partitioning")?;
    let inst = instance.with_k(k)?;
    let n = inst.n_agents();
    let colors = 2 * k + 2;
    let dummies = (colors - n % colors) % colors;

    let (opt_assignment, opt) = crate::solver::optimum(&inst)?;
    let padded = inst.padded(dummies)?;
    let graph = build_digraph(&padded, &opt_assignment)?;
    let coloring = equitable_color(&graph, colors)?;

    let mut cut_values = Vec::new();
    let mut best = 0;
    for (i, subset) in combinations(colors, k + 1).into_iter().enumerate() {
        let mut inside = vec![false; colors];
        for &c in &subset {
            inside[c] = true;
        }
        let x = cut_value(&inst, &opt_assignment, &|v| inside[coloring.color(v)] as usize);
        if x > cut_values.get(best).map_or(Score(-1), |e: &(Vec<usize>, Score)| e.1) {
            best = i;
        }
        cut_values.push((subset, x));
    }

    let chosen = &cut_values[best].0;
    let (mut first, mut second) = (Vec::new(), Vec::new());
    for v in 0..padded.n_agents() {
        if chosen.contains(&coloring.color(v)) {
            first.push(v);
        } else {
            second.push(v);
        }
    }
    let partition = Partition::bipartition(first, second);
    let (assignment, value) = optimum_for_partition(&padded, &partition)?;
    let result = PartitionResult {
        algorithm: Algorithm::Coloring,
        seed: None,
        assignment,
        partition,
        dummy_agents: dummies,
        value,
    };
    let trace = ColoringTrace {
        opt_assignment,
        opt,
        coloring,
        cut_values,
        best,
    };
    Ok((result, trace))
}
