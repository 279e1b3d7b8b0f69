//! Partitioning heuristic for arbitrary authorship.
//!
//! Agents and papers joined by authorship must end up on the same side, so
//! the connected components of the authorship graph are contracted into
//! single fake agents and the cycle-breaking idea is applied to those.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::{Assignment, Partition};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::partition::{Algorithm, PartitionResult};
use crate::score::Score;
use crate::solver::{max_weight_derangement, optimum, solve_max_similarity, AssignmentProblem};

/// A maximal set of agents and papers connected through authorship.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub agents: Vec<usize>,
    pub papers: Vec<usize>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = x;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

/// Connected components of the authorship graph, ordered by smallest member
/// (agents come before papers). Authorship of agents who are not eligible
/// reviewers is ignored, so they form singleton components.
pub fn connected_components(instance: &Instance) -> Vec<Component> {
    let n = instance.n_agents();
    let m = instance.n_papers();
    let mut parent: Vec<usize> = (0..n + m).collect();
    for (a, p) in instance.authorship_pairs() {
        if !instance.is_eligible_reviewer(a) {
            continue;
        }
        let (ra, rp) = (find(&mut parent, a), find(&mut parent, n + p));
        if ra != rp {
            let (lo, hi) = (ra.min(rp), ra.max(rp));
            parent[hi] = lo;
        }
    }
    // roots are the smallest members because unions keep the lower root
    let mut index = vec![usize::MAX; n + m];
    let mut comps: Vec<Component> = Vec::new();
    for v in 0..n + m {
        let root = find(&mut parent, v);
        if index[root] == usize::MAX {
            index[root] = comps.len();
            comps.push(Component {
                agents: Vec::new(),
                papers: Vec::new(),
            });
        }
        let c = &mut comps[index[root]];
        if v < n {
            c.agents.push(v);
        } else {
            c.papers.push(v - n);
        }
    }
    comps
}

/// Components as fake agents, with the optimum's similarity between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractedInstance {
    pub components: Vec<Component>,
    /// Symmetric `N x N`; entry `(i, j)` sums optimum pairs between
    /// components `i` and `j` in either direction. The diagonal is zero.
    pub sim: Vec<Vec<Score>>,
    /// Papers per component.
    pub weights: Vec<usize>,
    pub opt_assignment: Assignment,
    pub opt: Score,
}

impl ContractedInstance {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Total optimum similarity between distinct components.
    pub fn crossing_total(&self) -> Score {
        let mut t = Score::ZERO;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                t += self.sim[i][j];
            }
        }
        t
    }
}

fn component_index(instance: &Instance, comps: &[Component]) -> (Vec<usize>, Vec<usize>) {
    let mut of_agent = vec![0; instance.n_agents()];
    let mut of_paper = vec![0; instance.n_papers()];
    for (i, c) in comps.iter().enumerate() {
        for &a in &c.agents {
            of_agent[a] = i;
        }
        for &p in &c.papers {
            of_paper[p] = i;
        }
    }
    (of_agent, of_paper)
}

/// Solves the unconstrained optimum and sums its similarity between every
/// pair of components.
pub fn contract(instance: &Instance) -> Result<ContractedInstance> {
    if instance.is_one_to_one() {
        return Err(Error::Precondition("contraction expects a general-authorship instance".into()));
    }
    let components = connected_components(instance);
    let (opt_assignment, opt) = optimum(instance)?;
    let (of_agent, of_paper) = component_index(instance, &components);
    let nc = components.len();
    let mut sim = vec![vec![Score::ZERO; nc]; nc];
    for &(a, p) in opt_assignment.pairs() {
        let (i, j) = (of_agent[a], of_paper[p]);
        if i != j {
            let s = instance.sim(a, p);
            sim[i][j] += s;
            sim[j][i] += s;
        }
    }
    let weights = components.iter().map(|c| c.papers.len()).collect();
    Ok(ContractedInstance {
        components,
        sim,
        weights,
        opt_assignment,
        opt,
    })
}

/// Intermediate state of [`heuristic_partition_traced`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralTrace {
    pub contracted: ContractedInstance,
    /// Zero-weight components appended to make the count even.
    pub dummy_components: usize,
    /// Successor of each (possibly dummy) component in the load-one matching.
    pub matching: Vec<usize>,
    pub cycles: Vec<Vec<usize>>,
    /// Paper-count gap `|T1| - |T2|` (signed) after each merge.
    pub gaps: Vec<i64>,
    /// Side (0 or 1) of every real component.
    pub sides: Vec<usize>,
}

fn check_giant(instance: &Instance, comps: &[Component]) -> Result<()> {
    let m = instance.n_papers();
    if let Some((i, c)) = comps.iter().enumerate().find(|(_, c)| 2 * c.papers.len() > m) {
        return Err(Error::Precondition(format!(
            "component {i} ({} agents, {} of {m} papers) holds more than half of all papers; \
             remove reviewers with many authored papers to split it",
            c.agents.len(),
            c.papers.len()
        )));
    }
    Ok(())
}

fn finish(
    instance: &Instance,
    comps: &[Component],
    sides: &[usize],
    algorithm: Algorithm,
    seed: Option<u64>,
) -> Result<PartitionResult> {
    let mut agents = [Vec::new(), Vec::new()];
    let mut papers = [Vec::new(), Vec::new()];
    for (c, &s) in comps.iter().zip(sides) {
        agents[s].extend(&c.agents);
        papers[s].extend(&c.papers);
    }
    let [a1, a2] = agents;
    let [p1, p2] = papers;
    let partition = Partition::bipartition(a1, a2).with_paper_subsets(vec![p1, p2]);
    let (assignment, value) = solve_max_similarity(&AssignmentProblem::new(instance).with_partition(partition.clone()))?;
    Ok(PartitionResult {
        algorithm,
        seed,
        assignment,
        partition,
        dummy_agents: 0,
        value,
    })
}

/// Cycle-breaking on the contracted instance with paper-count balancing,
/// then the best assignment for the resulting component bipartition.
pub fn heuristic_partition(instance: &Instance) -> Result<PartitionResult> {
    heuristic_partition_traced(instance).map(|(r, _)| r)
}

pub fn heuristic_partition_traced(instance: &Instance) -> Result<(PartitionResult, GeneralTrace)> {
    let contracted = contract(instance)?;
    check_giant(instance, &contracted.components)?;
    let real = contracted.len();
    let dummy_components = usize::from(real % 2 == 1 || real == 1);
    let nc = real + dummy_components;
    let weight = |c: usize| if c < real { contracted.weights[c] } else { 0 };
    let mut w = vec![0i64; nc * nc];
    for i in 0..real {
        for j in 0..real {
            w[i * nc + j] = contracted.sim[i][j].units();
        }
    }
    let matching = max_weight_derangement(nc, &w)?;

    let mut starts: Vec<usize> = (0..nc).collect();
    starts.sort_by_key(|&c| (std::cmp::Reverse(weight(c)), c));
    let mut seen = vec![false; nc];
    let mut cycles = Vec::new();
    for &s in &starts {
        if seen[s] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut v = s;
        while !seen[v] {
            seen[v] = true;
            cycle.push(v);
            v = matching[v];
        }
        cycles.push(cycle);
    }

    let mut side = vec![0usize; nc];
    let mut load = [0i64; 2];
    let mut gaps = Vec::new();
    for cycle in &cycles {
        let l = cycle.len();
        let y = (0..l)
            .min_by_key(|&i| (w[cycle[i] * nc + cycle[(i + 1) % l]], i))
            .unwrap_or(0);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for i in 1..=l {
            let c = cycle[(y + i) % l];
            if i % 2 == 1 {
                a.push(c);
            } else {
                b.push(c);
            }
        }
        let wa: usize = a.iter().map(|&c| weight(c)).sum();
        let wb: usize = b.iter().map(|&c| weight(c)).sum();
        let (heavy, light) = if wa >= wb { (a, b) } else { (b, a) };
        let small = if load[0] <= load[1] { 0 } else { 1 };
        for &c in &heavy {
            side[c] = small;
            load[small] += weight(c) as i64;
        }
        for &c in &light {
            side[c] = 1 - small;
            load[1 - small] += weight(c) as i64;
        }
        gaps.push(load[0] - load[1]);
    }

    side.truncate(real);
    let result = finish(instance, &contracted.components, &side, Algorithm::General, None)?;
    let trace = GeneralTrace {
        contracted,
        dummy_components,
        matching,
        cycles,
        gaps,
        sides: side,
    };
    Ok((result, trace))
}

/// Baseline: a uniformly random half of the components on each side.
pub fn random_component_partition(instance: &Instance, seed: u64) -> Result<PartitionResult> {
    if instance.is_one_to_one() {
        return Err(Error::Precondition("the component baseline expects a general-authorship instance".into()));
    }
    let comps = connected_components(instance);
    let mut order: Vec<usize> = (0..comps.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut side = vec![1usize; comps.len()];
    for &c in &order[..comps.len() / 2] {
        side[c] = 0;
    }
    finish(instance, &comps, &side, Algorithm::RandomComponents, Some(seed))
}

/// Marks agents who author more than `threshold` papers as ineligible
/// reviewers. Their papers stay in the instance.
pub fn remove_heavy_authors(instance: &Instance, threshold: usize) -> Result<Instance> {
    if threshold == 0 {
        return Err(Error::Precondition("the paper threshold must be at least 1".into()));
    }
    let heavy: Vec<usize> = (0..instance.n_agents())
        .filter(|&a| instance.papers_of(a).len() > threshold)
        .collect();
    let out = instance.with_ineligible_reviewers(&heavy);
    let loads = out.loads();
    let reviewers = out.eligible_reviewers();
    if reviewers * loads.agent < out.n_papers() * loads.paper {
        return Err(Error::Infeasible(format!(
            "{reviewers} remaining reviewers x load {} cannot cover {} papers x load {}",
            loads.agent,
            out.n_papers(),
            loads.paper
        )));
    }
    Ok(out)
}
