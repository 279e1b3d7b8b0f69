//! Objective values, constraint checking and the summary report.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::assignment::{Assignment, Partition, PartitionKind};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::score::Score;

fn check_indices(instance: &Instance, assignment: &Assignment) -> Result<()> {
    for &(a, p) in assignment.pairs() {
        if a >= instance.n_agents() || p >= instance.n_papers() {
            return Err(Error::InvalidAssignment(format!(
                "pair ({a}, {p}) outside {} agents x {} papers",
                instance.n_agents(),
                instance.n_papers()
            )));
        }
    }
    Ok(())
}

/// Sum of similarities over the assigned pairs.
pub fn total_similarity(instance: &Instance, assignment: &Assignment) -> Result<Score> {
    check_indices(instance, assignment)?;
    Ok(assignment.pairs().iter().map(|&(a, p)| instance.sim(a, p)).sum())
}

/// Papers that count for per-paper metrics (padding papers excluded).
fn real_papers(instance: &Instance) -> usize {
    if instance.is_one_to_one() {
        instance.real_agents()
    } else {
        instance.n_papers()
    }
}

/// Smallest per-paper assigned similarity (the fairness objective).
pub fn maxmin_value(instance: &Instance, assignment: &Assignment) -> Result<Score> {
    check_indices(instance, assignment)?;
    let mut per_paper = vec![Score::ZERO; instance.n_papers()];
    for &(a, p) in assignment.pairs() {
        per_paper[p] += instance.sim(a, p);
    }
    Ok(per_paper[..real_papers(instance)]
        .iter()
        .copied()
        .min()
        .unwrap_or(Score::ZERO))
}

/// One violated constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    PairOutOfRange { agent: usize, paper: usize },
    DuplicatePair { agent: usize, paper: usize },
    SelfReview { agent: usize, paper: usize },
    IneligibleReviewer { agent: usize, paper: usize },
    PaperLoad { paper: usize, assigned: usize, required: usize },
    AgentLoad { agent: usize, assigned: usize, limit: usize, exact: bool },
    SameSubset { agent: usize, paper: usize, subset: usize },
    WrongSubsetCount { found: usize, expected: usize },
    AgentOutOfRange { agent: usize },
    AgentInTwoSubsets { agent: usize },
    AgentUncovered { agent: usize },
    PaperUnplaced { paper: usize },
    SplitAuthorship { paper: usize },
    Imbalance { sizes: Vec<usize> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            PairOutOfRange { agent, paper } => write!(f, "pair ({agent}, {paper}) is out of range"),
            DuplicatePair { agent, paper } => write!(f, "pair ({agent}, {paper}) appears more than once"),
            SelfReview { agent, paper } => write!(f, "agent {agent} reviews own paper {paper}"),
            IneligibleReviewer { agent, paper } => {
                write!(f, "agent {agent} is not an eligible reviewer but reviews paper {paper}")
            }
            PaperLoad { paper, assigned, required } => {
                write!(f, "paper {paper} has {assigned} reviewers, requires {required}")
            }
            AgentLoad { agent, assigned, limit, exact } => {
                let rel = if *exact { "exactly" } else { "at most" };
                write!(f, "agent {agent} has {assigned} reviews, allowed {rel} {limit}")
            }
            SameSubset { agent, paper, subset } => {
                write!(f, "agent {agent} reviews paper {paper} from its own subset {subset}")
            }
            WrongSubsetCount { found, expected } => write!(f, "partition has {found} subsets, expected {expected}"),
            AgentOutOfRange { agent } => write!(f, "partition lists unknown agent {agent}"),
            AgentInTwoSubsets { agent } => write!(f, "agent {agent} appears in more than one subset"),
            AgentUncovered { agent } => write!(f, "agent {agent} is in no subset"),
            PaperUnplaced { paper } => write!(f, "paper {paper} cannot be placed in a subset"),
            SplitAuthorship { paper } => write!(f, "authors of paper {paper} are in different subsets"),
            Imbalance { sizes } => write!(f, "unbalanced subset sizes {sizes:?}"),
        }
    }
}

/// Result of [`validate`]: every violated constraint, in a stable order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Subset of each paper under `partition`, plus placement violations.
pub(crate) fn paper_labels(
    instance: &Instance,
    partition: &Partition,
    agent_labels: &[Option<usize>],
    violations: &mut Vec<Violation>,
) -> Vec<Option<usize>> {
    let m = instance.n_papers();
    let mut labels = vec![None; m];
    if let Some(explicit) = partition.paper_subsets() {
        for (s, papers) in explicit.iter().enumerate() {
            for &p in papers {
                if p < m && labels[p].is_none() {
                    labels[p] = Some(s);
                }
            }
        }
    }
    for (p, label) in labels.iter_mut().enumerate() {
        let author_sides: Vec<usize> = instance
            .authors_of(p)
            .iter()
            .filter(|&&a| instance.is_eligible_reviewer(a))
            .filter_map(|&a| agent_labels[a])
            .collect();
        let consistent = match *label {
            Some(s) => author_sides.iter().all(|&x| x == s),
            None => author_sides.windows(2).all(|w| w[0] == w[1]),
        };
        if !consistent {
            violations.push(Violation::SplitAuthorship { paper: p });
        }
        if label.is_none() {
            *label = author_sides.first().copied();
        }
        if label.is_none() {
            violations.push(Violation::PaperUnplaced { paper: p });
        }
    }
    labels
}

/// Agent and paper subset labels for a structurally sound partition.
/// Balance is not checked here.
pub(crate) fn partition_sides(instance: &Instance, partition: &Partition) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = instance.n_agents();
    let mut violations = Vec::new();
    let mut seen = vec![false; n];
    for members in partition.subsets() {
        for &a in members {
            if a >= n {
                violations.push(Violation::AgentOutOfRange { agent: a });
            } else if std::mem::replace(&mut seen[a], true) {
                violations.push(Violation::AgentInTwoSubsets { agent: a });
            }
        }
    }
    for (a, &s) in seen.iter().enumerate() {
        if !s {
            violations.push(Violation::AgentUncovered { agent: a });
        }
    }
    let agent_labels = partition.agent_labels(n);
    let papers = paper_labels(instance, partition, &agent_labels, &mut violations);
    if let Some(v) = violations.first() {
        return Err(Error::Precondition(format!("unusable partition: {v}")));
    }
    Ok((
        agent_labels.into_iter().map(|l| l.unwrap_or(0)).collect(),
        papers.into_iter().map(|l| l.unwrap_or(0)).collect(),
    ))
}

/// Checks load, authorship, eligibility and (optionally) partition constraints.
/// Violations are data: this never fails.
pub fn validate(instance: &Instance, assignment: &Assignment, partition: Option<&Partition>) -> Verdict {
    let n = instance.n_agents();
    let m = instance.n_papers();
    let loads = instance.loads();
    let mut violations = Vec::new();

    let mut agent_count = vec![0usize; n];
    let mut paper_count = vec![0usize; m];
    let mut prev = None;
    for &(a, p) in assignment.pairs() {
        if a >= n || p >= m {
            violations.push(Violation::PairOutOfRange { agent: a, paper: p });
            continue;
        }
        if prev == Some((a, p)) {
            violations.push(Violation::DuplicatePair { agent: a, paper: p });
        }
        prev = Some((a, p));
        agent_count[a] += 1;
        paper_count[p] += 1;
        if instance.is_author(a, p) {
            violations.push(Violation::SelfReview { agent: a, paper: p });
        }
        if !instance.is_eligible_reviewer(a) {
            violations.push(Violation::IneligibleReviewer { agent: a, paper: p });
        }
    }
    for (p, &c) in paper_count.iter().enumerate() {
        if c != loads.paper {
            violations.push(Violation::PaperLoad {
                paper: p,
                assigned: c,
                required: loads.paper,
            });
        }
    }
    let exact = instance.is_one_to_one();
    for (a, &c) in agent_count.iter().enumerate() {
        if (exact && c != loads.agent) || c > loads.agent {
            violations.push(Violation::AgentLoad {
                agent: a,
                assigned: c,
                limit: loads.agent,
                exact,
            });
        }
    }

    if let Some(partition) = partition {
        check_partition(instance, assignment, partition, &mut violations);
    }
    Verdict { violations }
}

fn check_partition(instance: &Instance, assignment: &Assignment, partition: &Partition, violations: &mut Vec<Violation>) {
    let n = instance.n_agents();
    if partition.kind() == PartitionKind::Bipartition && partition.num_subsets() != 2 {
        violations.push(Violation::WrongSubsetCount {
            found: partition.num_subsets(),
            expected: 2,
        });
    }
    let mut seen = vec![false; n];
    for members in partition.subsets() {
        for &a in members {
            if a >= n {
                violations.push(Violation::AgentOutOfRange { agent: a });
            } else if seen[a] {
                violations.push(Violation::AgentInTwoSubsets { agent: a });
            } else {
                seen[a] = true;
            }
        }
    }
    for (a, &s) in seen.iter().enumerate() {
        if !s {
            violations.push(Violation::AgentUncovered { agent: a });
        }
    }
    let sizes = partition.sizes();
    let balanced = match partition.kind() {
        PartitionKind::Bipartition if instance.is_one_to_one() => sizes.windows(2).all(|w| w[0] == w[1]),
        PartitionKind::Bipartition => true,
        PartitionKind::Multi => {
            let lo = sizes.iter().min().copied().unwrap_or(0);
            let hi = sizes.iter().max().copied().unwrap_or(0);
            hi - lo <= 1
        }
    };
    if !balanced {
        violations.push(Violation::Imbalance { sizes });
    }

    let agent_labels = partition.agent_labels(n);
    let paper_side = paper_labels(instance, partition, &agent_labels, violations);
    for &(a, p) in assignment.pairs() {
        if a >= n || p >= instance.n_papers() {
            continue;
        }
        if let (Some(sa), Some(sp)) = (agent_labels[a], paper_side[p]) {
            if sa == sp {
                violations.push(Violation::SameSubset {
                    agent: a,
                    paper: p,
                    subset: sa,
                });
            }
        }
    }
}

/// Quality summary of one assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub total_similarity: Score,
    pub opt_similarity: Score,
    #[serde(with = "ratio_text")]
    pub loss_fraction: Ratio<i64>,
    pub maxmin_value: Score,
    pub subset_sizes: Vec<usize>,
}

impl Report {
    pub fn new(instance: &Instance, assignment: &Assignment, partition: Option<&Partition>, opt: Score) -> Result<Self> {
        let total = total_similarity(instance, assignment)?;
        Ok(Report {
            total_similarity: total,
            opt_similarity: opt,
            loss_fraction: loss_fraction(total, opt),
            maxmin_value: maxmin_value(instance, assignment)?,
            subset_sizes: partition.map(Partition::sizes).unwrap_or_default(),
        })
    }
}

/// `1 - total/opt` when `opt > 0`, else `0`.
pub fn loss_fraction(total: Score, opt: Score) -> Ratio<i64> {
    if opt.units() > 0 {
        Ratio::from_integer(1) - total.ratio(opt)
    } else {
        Ratio::from_integer(0)
    }
}

pub(crate) mod ratio_text {
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::score::{format_ratio, parse_ratio};

    pub fn serialize<S: Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_ratio(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<i64>, D::Error> {
        let text = String::deserialize(d)?;
        parse_ratio(&text).ok_or_else(|| serde::de::Error::custom(format!("bad fraction {text:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Loads;

    fn two_agent() -> Instance {
        Instance::one_to_one_from_rows(&[vec![0.0, 0.4], vec![0.7, 0.0]], 1).unwrap()
    }

    #[test]
    fn total_of_empty_assignment_is_zero() {
        assert_eq!(total_similarity(&two_agent(), &Assignment::empty()).unwrap(), Score::ZERO);
    }

    #[test]
    fn total_of_two_pairs() {
        let m = Assignment::from_pairs(vec![(0, 1), (1, 0)]);
        assert_eq!(total_similarity(&two_agent(), &m).unwrap(), Score(1_100_000));
    }

    #[test]
    fn out_of_range_pair_is_an_error() {
        let m = Assignment::from_pairs(vec![(0, 5)]);
        assert!(matches!(total_similarity(&two_agent(), &m), Err(Error::InvalidAssignment(_))));
    }

    #[test]
    fn maxmin_all_ones() {
        let inst = Instance::one_to_one_from_rows(&vec![vec![1.0; 3]; 3], 1).unwrap();
        let m = Assignment::from_pairs(vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(maxmin_value(&inst, &m).unwrap(), Score::ONE);
    }

    #[test]
    fn feasible_assignment_has_no_violations() {
        let m = Assignment::from_pairs(vec![(0, 1), (1, 0)]);
        assert!(validate(&two_agent(), &m, None).is_valid());
    }

    #[test]
    fn self_review_is_reported() {
        let inst = Instance::one_to_one_from_rows(&vec![vec![0.5; 3]; 3], 1).unwrap();
        let m = Assignment::from_pairs(vec![(0, 0), (1, 2), (2, 1)]);
        let v = validate(&inst, &m, None);
        assert_eq!(v.violations, vec![Violation::SelfReview { agent: 0, paper: 0 }]);
    }

    #[test]
    fn same_subset_pair_is_reported() {
        let inst = Instance::one_to_one_from_rows(&vec![vec![0.5; 4]; 4], 1).unwrap();
        let m = Assignment::from_pairs(vec![(0, 1), (1, 0), (2, 3), (3, 2)]);
        let part = Partition::bipartition(vec![0, 1], vec![2, 3]);
        let v = validate(&inst, &m, Some(&part));
        assert!(v.violations.contains(&Violation::SameSubset {
            agent: 0,
            paper: 1,
            subset: 0
        }));
        assert_eq!(v.violations.len(), 4);
    }

    #[test]
    fn partition_structure_violations() {
        let inst = Instance::one_to_one_from_rows(&vec![vec![0.5; 4]; 4], 1).unwrap();
        let m = Assignment::from_pairs(vec![(0, 2), (2, 0), (1, 3), (3, 1)]);
        let part = Partition::bipartition(vec![0, 1, 3], vec![2, 3]);
        let v = validate(&inst, &m, Some(&part));
        assert!(v.violations.contains(&Violation::AgentInTwoSubsets { agent: 3 }));
        assert!(v.violations.contains(&Violation::Imbalance { sizes: vec![3, 2] }));
    }

    #[test]
    fn load_violations() {
        let inst = Instance::one_to_one_from_rows(&vec![vec![0.5; 3]; 3], 1).unwrap();
        let m = Assignment::from_pairs(vec![(0, 1), (0, 2), (1, 2)]);
        let v = validate(&inst, &m, None);
        assert!(v.violations.contains(&Violation::PaperLoad {
            paper: 2,
            assigned: 2,
            required: 1
        }));
        assert!(v.violations.contains(&Violation::AgentLoad {
            agent: 2,
            assigned: 0,
            limit: 1,
            exact: true
        }));
    }

    #[test]
    fn general_mode_agent_load_is_a_maximum() {
        let sim = vec![Score::ONE; 6];
        let inst = Instance::general(3, 2, &sim, &[(0, 0), (1, 1)], Loads { agent: 2, paper: 1 }).unwrap();
        let m = Assignment::from_pairs(vec![(2, 0), (2, 1)]);
        assert!(validate(&inst, &m, None).is_valid());
    }

    #[test]
    fn split_authorship_is_reported() {
        let sim = vec![Score::ONE; 6];
        let inst = Instance::general(3, 2, &sim, &[(0, 0), (1, 0), (2, 1)], Loads { agent: 1, paper: 1 }).unwrap();
        let m = Assignment::from_pairs(vec![(2, 0), (0, 1)]);
        let part = Partition::bipartition(vec![0, 2], vec![1]);
        let v = validate(&inst, &m, Some(&part));
        assert!(v.violations.contains(&Violation::SplitAuthorship { paper: 0 }));
    }

    #[test]
    fn report_loss_fraction() {
        let inst = two_agent();
        let m = Assignment::from_pairs(vec![(0, 1), (1, 0)]);
        let r = Report::new(&inst, &m, None, Score(2_200_000)).unwrap();
        assert_eq!(r.loss_fraction, Ratio::new(1, 2));
        assert_eq!(loss_fraction(Score::ZERO, Score::ZERO), Ratio::from_integer(0));
    }
}
