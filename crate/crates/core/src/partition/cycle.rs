use serde::{Deserialize, Serialize};

use super::{require_even, require_one_to_one, Algorithm, PartitionResult};
use crate::assignment::{Assignment, Partition};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::score::Score;
use crate::solver::{optimum_for_partition, solve_k1_matching, AssignmentProblem};

/// Review cycles of a load-one assignment: in each cycle, agent `c[i]`
/// reviews the paper of `c[i + 1]` (cyclically).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleDecomposition {
    pub cycles: Vec<Vec<usize>>,
}

/// Splits a load-one assignment into its cycles, each starting from its
/// smallest index, in order of that index.
pub fn decompose_cycles(n: usize, assignment: &Assignment) -> Result<CycleDecomposition> {
    let succ = assignment
        .as_permutation(n)
        .ok_or_else(|| Error::InvalidAssignment("not a load-one assignment".into()))?;
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            cycle.push(v);
            v = succ[v];
        }
        if v != start {
            return Err(Error::InvalidAssignment("papers are not each reviewed once".into()));
        }
        cycles.push(cycle);
    }
    Ok(CycleDecomposition { cycles })
}

/// Intermediate state of [`cycle_breaking_traced`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleTrace {
    pub k1_assignment: Assignment,
    pub k1_value: Score,
    pub decomposition: CycleDecomposition,
    /// Position in each cycle of its lightest edge.
    pub cut_positions: Vec<usize>,
    /// Per cycle, the alternating halves `(a, b)`; `a` is never smaller.
    pub local_sets: Vec<(Vec<usize>, Vec<usize>)>,
}

/// Position `y` of the lightest edge `c[y] -> c[y + 1]`, lowest on ties.
fn lightest_edge(instance: &Instance, cycle: &[usize]) -> usize {
    let l = cycle.len();
    (0..l)
        .min_by_key(|&i| (instance.sim(cycle[i], cycle[(i + 1) % l]), i))
        .unwrap_or(0)
}

/// Breaks each review cycle of the load-one optimum at its lightest edge and
/// alternates the members between the two sides.
pub fn cycle_breaking(instance: &Instance, k: usize) -> Result<PartitionResult> {
    cycle_breaking_traced(instance, k).map(|(r, _)| r)
}

pub fn cycle_breaking_traced(instance: &Instance, k: usize) -> Result<(PartitionResult, CycleTrace)> {
    require_one_to_one(instance, "cycle breaking")?;
    require_even(instance, "cycle breaking")?;
    let n = instance.n_agents();
    let unit = instance.with_k(1)?;
    let (k1_assignment, k1_value) = solve_k1_matching(&AssignmentProblem::new(&unit))?;
    let decomposition = decompose_cycles(n, &k1_assignment)?;

    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut cut_positions = Vec::new();
    let mut local_sets = Vec::new();
    for cycle in &decomposition.cycles {
        let l = cycle.len();
        let y = lightest_edge(instance, cycle);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 1..=l {
            let member = cycle[(y + i) % l];
            if i % 2 == 1 {
                a.push(member);
            } else {
                b.push(member);
            }
        }
        if first.len() <= second.len() {
            first.extend(&a);
            second.extend(&b);
        } else {
            first.extend(&b);
            second.extend(&a);
        }
        cut_positions.push(y);
        local_sets.push((a, b));
    }

    let partition = Partition::bipartition(first, second);
    let inst = instance.with_k(k)?;
    let (assignment, value) = optimum_for_partition(&inst, &partition)?;
    let result = PartitionResult {
        algorithm: Algorithm::Cycle,
        seed: None,
        assignment,
        partition,
        dummy_agents: 0,
        value,
    };
    let trace = CycleTrace {
        k1_assignment,
        k1_value,
        decomposition,
        cut_positions,
        local_sets,
    };
    Ok((result, trace))
}
