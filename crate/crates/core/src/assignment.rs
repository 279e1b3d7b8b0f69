use serde::{Deserialize, Serialize};

/// A set of `(agent, paper)` review pairs, kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pairs: Vec<(usize, usize)>,
}

impl Assignment {
    /// Sorts the pairs. Duplicates are kept so that validation can report them.
    pub fn from_pairs(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        Assignment { pairs }
    }

    pub fn empty() -> Self {
        Assignment::default()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, agent: usize, paper: usize) -> bool {
        self.pairs.binary_search(&(agent, paper)).is_ok()
    }

    /// Papers reviewed by `agent`.
    pub fn papers_of(&self, agent: usize) -> impl Iterator<Item = usize> + '_ {
        let start = self.pairs.partition_point(|&(a, _)| a < agent);
        self.pairs[start..]
            .iter()
            .take_while(move |&&(a, _)| a == agent)
            .map(|&(_, p)| p)
    }

    /// For a one-to-one load-1 assignment, `successor[i]` is the paper agent
    /// `i` reviews. Returns `None` if some agent does not have exactly one paper.
    pub fn as_permutation(&self, n: usize) -> Option<Vec<usize>> {
        let mut succ = vec![usize::MAX; n];
        for &(a, p) in &self.pairs {
            if a >= n || succ[a] != usize::MAX {
                return None;
            }
            succ[a] = p;
        }
        succ.iter().all(|&p| p < n).then_some(succ)
    }
}

/// Whether a partition is a two-subset split or a family of several subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionKind {
    Bipartition,
    Multi,
}

/// A partition of the agents into subsets. Papers follow their authors unless
/// explicit paper subsets are given (needed when some paper has no author
/// who is still a reviewer).
///
/// Subsets are stored as given so that validation can report overlaps and
/// gaps in partitions read from files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    kind: PartitionKind,
    subsets: Vec<Vec<usize>>,
    paper_subsets: Option<Vec<Vec<usize>>>,
}

impl Partition {
    pub fn bipartition(mut first: Vec<usize>, mut second: Vec<usize>) -> Self {
        first.sort_unstable();
        second.sort_unstable();
        Partition {
            kind: PartitionKind::Bipartition,
            subsets: vec![first, second],
            paper_subsets: None,
        }
    }

    pub fn multi(mut subsets: Vec<Vec<usize>>) -> Self {
        for s in &mut subsets {
            s.sort_unstable();
        }
        Partition {
            kind: PartitionKind::Multi,
            subsets,
            paper_subsets: None,
        }
    }

    /// Builds a partition from a per-agent subset label.
    pub fn from_labels(kind: PartitionKind, labels: &[usize]) -> Self {
        let parts = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
        let parts = if kind == PartitionKind::Bipartition { parts.max(2) } else { parts };
        let mut subsets = vec![Vec::new(); parts];
        for (agent, &l) in labels.iter().enumerate() {
            subsets[l].push(agent);
        }
        Partition {
            kind,
            subsets,
            paper_subsets: None,
        }
    }

    pub fn with_paper_subsets(mut self, mut papers: Vec<Vec<usize>>) -> Self {
        for s in &mut papers {
            s.sort_unstable();
        }
        self.paper_subsets = Some(papers);
        self
    }

    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn paper_subsets(&self) -> Option<&[Vec<usize>]> {
        self.paper_subsets.as_deref()
    }

    pub fn num_subsets(&self) -> usize {
        self.subsets.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.subsets.iter().map(Vec::len).collect()
    }

    /// Subset index of every agent in `0..n`; `None` for agents not covered.
    /// When an agent appears twice the first subset wins.
    pub fn agent_labels(&self, n: usize) -> Vec<Option<usize>> {
        let mut labels = vec![None; n];
        for (s, members) in self.subsets.iter().enumerate() {
            for &a in members {
                if a < n && labels[a].is_none() {
                    labels[a] = Some(s);
                }
            }
        }
        labels
    }

    /// Label vector for a partition known to be valid.
    pub fn labels(&self, n: usize) -> Vec<usize> {
        self.agent_labels(n)
            .into_iter()
            .map(|l| l.expect("partition covers every agent"))
            .collect()
    }
}
