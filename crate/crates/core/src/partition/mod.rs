//! Partition-based strategyproof assignment algorithms.

mod color;
mod cycle;
mod multi;
mod random;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use color::{coloring_partition, coloring_partition_traced, ColoringTrace};
pub use cycle::{cycle_breaking, cycle_breaking_traced, decompose_cycles, CycleDecomposition, CycleTrace};
pub use multi::{multi_partition, multi_partition_traced, MultiTrace};
pub use random::{random_bipartition, random_partition};

use crate::assignment::{Assignment, Partition};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::metrics::Report;
use crate::score::Score;

/// Which algorithm produced a [`PartitionResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Random,
    Cycle,
    Coloring,
    Multi,
    General,
    RandomComponents,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Random,
        Algorithm::Cycle,
        Algorithm::Coloring,
        Algorithm::Multi,
        Algorithm::General,
        Algorithm::RandomComponents,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Random => "random",
            Algorithm::Cycle => "cycle",
            Algorithm::Coloring => "coloring",
            Algorithm::Multi => "multi",
            Algorithm::General => "general",
            Algorithm::RandomComponents => "random-components",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Algorithm::Random | Algorithm::RandomComponents)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidInstance(format!("unknown algorithm {s:?}")))
    }
}

/// A partition of the agents and the best assignment that respects it.
///
/// When padding agents were added, agent and paper indices refer to the
/// padded instance: the last `dummy_agents` indices are padding and every
/// pair touching them has similarity zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub algorithm: Algorithm,
    pub seed: Option<u64>,
    pub assignment: Assignment,
    pub partition: Partition,
    pub dummy_agents: usize,
    pub value: Score,
}

impl PartitionResult {
    /// The instance the result's indices refer to.
    pub fn working_instance(&self, original: &Instance) -> Result<Instance> {
        if self.dummy_agents == 0 {
            Ok(original.clone())
        } else {
            original.padded(self.dummy_agents)
        }
    }

    /// Whether the pair involves a padding agent or a padding paper.
    pub fn is_dummy_pair(&self, original: &Instance, agent: usize, paper: usize) -> bool {
        agent >= original.n_agents() || paper >= original.n_papers()
    }

    pub fn report(&self, original: &Instance, opt: Score) -> Result<Report> {
        let inst = self.working_instance(original)?;
        Report::new(&inst, &self.assignment, Some(&self.partition), opt)
    }
}

/// Runs `algorithm` on `instance` at the instance's own loads. `seed` is
/// used only by the randomized algorithms.
pub fn run(algorithm: Algorithm, instance: &Instance, seed: u64) -> Result<PartitionResult> {
    let k = instance.k();
    match algorithm {
        Algorithm::Random => random_partition(instance, k, seed),
        Algorithm::Cycle => cycle_breaking(instance, k),
        Algorithm::Coloring => coloring_partition(instance, k),
        Algorithm::Multi => multi_partition(instance, k),
        Algorithm::General => crate::general::heuristic_partition(instance),
        Algorithm::RandomComponents => crate::general::random_component_partition(instance, seed),
    }
}

pub(crate) fn require_one_to_one(instance: &Instance, what: &str) -> Result<()> {
    if instance.is_one_to_one() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what} needs a one-to-one instance")))
    }
}

pub(crate) fn require_even(instance: &Instance, what: &str) -> Result<()> {
    if instance.n_agents().is_multiple_of(2) {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{what} needs an even number of agents, got {}",
            instance.n_agents()
        )))
    }
}

/// Sum of similarities of `assignment` pairs whose endpoints carry different
/// labels.
pub fn cut_value(instance: &Instance, assignment: &Assignment, label: &dyn Fn(usize) -> usize) -> Score {
    assignment
        .pairs()
        .iter()
        .filter(|&&(a, p)| label(a) != label(p))
        .map(|&(a, p)| instance.sim(a, p))
        .sum()
}

/// All `r`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..r).rev().find(|&i| idx[i] != i + n - r) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
