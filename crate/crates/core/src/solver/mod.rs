//! Exact maximum-similarity assignment under load, authorship and partition
//! constraints.

mod flow;
mod hungarian;

use std::collections::BTreeSet;

use crate::assignment::{Assignment, Partition};
use crate::error::{Error, Result};
use crate::instance::{Instance, Loads};
use crate::metrics::partition_sides;
use crate::score::Score;

/// An instance together with the constraints of one solve.
///
/// Authorship pairs and ineligible reviewers are always forbidden. With a
/// partition constraint, every pair whose agent and paper fall in the same
/// subset is forbidden as well.
#[derive(Debug, Clone)]
pub struct AssignmentProblem<'a> {
    instance: &'a Instance,
    loads: Loads,
    forbidden: BTreeSet<(usize, usize)>,
    partition: Option<Partition>,
}

impl<'a> AssignmentProblem<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        AssignmentProblem {
            instance,
            loads: instance.loads(),
            forbidden: BTreeSet::new(),
            partition: None,
        }
    }

    pub fn with_loads(mut self, loads: Loads) -> Self {
        self.loads = loads;
        self
    }

    pub fn forbid(mut self, agent: usize, paper: usize) -> Self {
        self.forbidden.insert((agent, paper));
        self
    }

    pub fn with_partition(mut self, partition: Partition) -> Self {
        self.partition = Some(partition);
        self
    }

    pub fn instance(&self) -> &Instance {
        self.instance
    }

    pub fn loads(&self) -> Loads {
        self.loads
    }

    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    /// Extra forbidden pairs beyond authorship and the partition.
    pub fn extra_forbidden(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.forbidden.iter().copied()
    }

    /// Row-major `n x m` table of pairs that may be assigned.
    pub fn allowed_pairs(&self) -> Result<Vec<bool>> {
        let inst = self.instance;
        let (n, m) = (inst.n_agents(), inst.n_papers());
        if self.loads.agent == 0 || self.loads.paper == 0 {
            return Err(Error::InvalidInstance("loads must be positive".into()));
        }
        for &(a, p) in &self.forbidden {
            if a >= n || p >= m {
                return Err(Error::InvalidInstance(format!("forbidden pair ({a}, {p}) out of range")));
            }
        }
        let sides = match &self.partition {
            Some(part) => Some(partition_sides(inst, part)?),
            None => None,
        };
        let mut allowed = vec![true; n * m];
        for a in 0..n {
            let eligible = inst.is_eligible_reviewer(a);
            for p in 0..m {
                let cut = match &sides {
                    Some((agents, papers)) => agents[a] != papers[p],
                    None => true,
                };
                allowed[a * m + p] = eligible && cut && !inst.is_author(a, p);
            }
        }
        for &(a, p) in &self.forbidden {
            allowed[a * m + p] = false;
        }
        Ok(allowed)
    }

    fn agent_capacity(&self, agent: usize) -> usize {
        if self.instance.is_eligible_reviewer(agent) {
            self.loads.agent
        } else {
            0
        }
    }
}

/// Maximum total similarity over every assignment satisfying `problem`.
///
/// Fails with [`Error::Infeasible`] when some paper cannot receive its full
/// reviewer load.
pub fn solve_max_similarity(problem: &AssignmentProblem<'_>) -> Result<(Assignment, Score)> {
    let inst = problem.instance;
    let (n, m) = (inst.n_agents(), inst.n_papers());
    let allowed = problem.allowed_pairs()?;
    let mut edges = Vec::new();
    for a in 0..n {
        for p in 0..m {
            if allowed[a * m + p] {
                edges.push((a, p, inst.sim(a, p).units()));
            }
        }
    }
    let left: Vec<usize> = (0..n).map(|a| problem.agent_capacity(a)).collect();
    let right = vec![problem.loads.paper; m];
    let out = flow::max_weight_flow(&left, &right, &edges);
    if let Some(p) = out.right_filled.iter().position(|&f| f < problem.loads.paper) {
        let placed: usize = out.right_filled.iter().sum();
        return Err(Error::Infeasible(format!(
            "paper {p} can receive only {} of {} reviewers ({placed} of {} reviews placeable with agent load {})",
            out.right_filled[p],
            problem.loads.paper,
            m * problem.loads.paper,
            problem.loads.agent
        )));
    }
    let assignment = Assignment::from_pairs(out.pairs);
    let value = assignment.pairs().iter().map(|&(a, p)| inst.sim(a, p)).sum();
    Ok((assignment, value))
}

/// Load-one optimum computed with the Hungarian method, independent of the
/// flow solver. One-to-one instances only.
pub fn solve_k1_matching(problem: &AssignmentProblem<'_>) -> Result<(Assignment, Score)> {
    let inst = problem.instance;
    if !inst.is_one_to_one() {
        return Err(Error::Precondition("load-one matching needs a one-to-one instance".into()));
    }
    let n = inst.n_agents();
    let allowed = problem.allowed_pairs()?;
    let big = (n as i64 + 1) * Score::ONE.units() + 1;
    let cost: Vec<i64> = (0..n * n)
        .map(|idx| {
            if allowed[idx] {
                -inst.sim(idx / n, idx % n).units()
            } else {
                big
            }
        })
        .collect();
    let col = hungarian::min_cost_perfect(n, &cost);
    if let Some(a) = (0..n).find(|&a| !allowed[a * n + col[a]]) {
        return Err(Error::Infeasible(format!(
            "no perfect load-one assignment exists (agent {a} has no admissible paper left)"
        )));
    }
    let assignment = Assignment::from_pairs(col.iter().enumerate().map(|(a, &p)| (a, p)).collect());
    let value = assignment.pairs().iter().map(|&(a, p)| inst.sim(a, p)).sum();
    Ok((assignment, value))
}

/// Maximum-weight permutation of `0..n` without fixed points on a square
/// weight matrix (row-major, non-negative). Needs `n >= 2`.
pub(crate) fn max_weight_derangement(n: usize, weights: &[i64]) -> Result<Vec<usize>> {
    if n < 2 {
        return Err(Error::Infeasible(format!("no assignment without self-review among {n} items")));
    }
    let top = weights.iter().copied().max().unwrap_or(0);
    let big = (n as i64 + 1) * (top + 1);
    let cost: Vec<i64> = (0..n * n)
        .map(|idx| if idx / n == idx % n { big } else { -weights[idx] })
        .collect();
    Ok(hungarian::min_cost_perfect(n, &cost))
}

/// Unconstrained optimum of `instance` at its own loads.
pub fn optimum(instance: &Instance) -> Result<(Assignment, Score)> {
    solve_max_similarity(&AssignmentProblem::new(instance))
}

/// Optimum subject to `partition`.
pub fn optimum_for_partition(instance: &Instance, partition: &Partition) -> Result<(Assignment, Score)> {
    solve_max_similarity(&AssignmentProblem::new(instance).with_partition(partition.clone()))
}
