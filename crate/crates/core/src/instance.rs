use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::score::{Score, SCALE};

/// Authorship regime of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// `n = m` and agent `i` authors exactly submission `i`.
    OneToOne,
    /// Arbitrary bipartite authorship relation.
    General,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-to-one" => Ok(Mode::OneToOne),
            "general" => Ok(Mode::General),
            _ => Err(Error::InvalidInstance(format!("unknown mode {s:?}"))),
        }
    }
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::OneToOne => "one-to-one",
            Mode::General => "general",
        }
    }
}

/// Review loads. In one-to-one mode both are the same `k` and are exact; in
/// general mode `paper` is exact and `agent` is a maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Loads {
    pub agent: usize,
    pub paper: usize,
}

impl Loads {
    pub fn uniform(k: usize) -> Self {
        Loads { agent: k, paper: k }
    }
}

/// Agents, submissions, similarities and authorship. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n_agents: usize,
    n_papers: usize,
    /// Row-major `n_agents x n_papers`, in millionths.
    sim: Vec<u32>,
    mode: Mode,
    paper_authors: Vec<Vec<usize>>,
    agent_papers: Vec<Vec<usize>>,
    loads: Loads,
    reviewer_eligible: Vec<bool>,
    dummy_agents: usize,
}

fn check_similarities(sim: &[Score]) -> Result<Vec<u32>> {
    sim.iter()
        .enumerate()
        .map(|(idx, s)| {
            if (0..=SCALE).contains(&s.units()) {
                Ok(s.units() as u32)
            } else {
                Err(Error::InvalidInstance(format!(
                    "similarity #{idx} = {s} lies outside [0, 1]"
                )))
            }
        })
        .collect()
}

impl Instance {
    /// One-to-one instance with load `k`; `sim` is row-major `n x n`.
    pub fn one_to_one(n: usize, sim: &[Score], k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("an instance needs at least one agent".into()));
        }
        if sim.len() != n * n {
            return Err(Error::InvalidInstance(format!(
                "expected {} similarities for {n} agents, got {}",
                n * n,
                sim.len()
            )));
        }
        if k == 0 {
            return Err(Error::InvalidInstance("load k must be positive".into()));
        }
        let sim = check_similarities(sim)?;
        let identity: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        Ok(Instance {
            n_agents: n,
            n_papers: n,
            sim,
            mode: Mode::OneToOne,
            paper_authors: identity.clone(),
            agent_papers: identity,
            loads: Loads::uniform(k),
            reviewer_eligible: vec![true; n],
            dummy_agents: 0,
        })
    }

    /// Convenience constructor from rows of floating-point similarities,
    /// rounded to the nearest millionth.
    pub fn one_to_one_from_rows(rows: &[Vec<f64>], k: usize) -> Result<Self> {
        let n = rows.len();
        let mut sim = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            sim.extend(row.iter().map(|&x| Score::from_f64(x)));
        }
        Self::one_to_one(n, &sim, k)
    }

    /// General-authorship instance. `authorship` lists `(agent, paper)` pairs.
    pub fn general(
        n_agents: usize,
        n_papers: usize,
        sim: &[Score],
        authorship: &[(usize, usize)],
        loads: Loads,
    ) -> Result<Self> {
        if sim.len() != n_agents * n_papers {
            return Err(Error::InvalidInstance(format!(
                "expected {} similarities for {n_agents} agents x {n_papers} papers, got {}",
                n_agents * n_papers,
                sim.len()
            )));
        }
        if loads.agent == 0 || loads.paper == 0 {
            return Err(Error::InvalidInstance("loads must be positive".into()));
        }
        let sim = check_similarities(sim)?;
        let mut paper_authors = vec![Vec::new(); n_papers];
        let mut agent_papers = vec![Vec::new(); n_agents];
        for &(a, p) in authorship {
            if a >= n_agents || p >= n_papers {
                return Err(Error::InvalidInstance(format!("authorship pair ({a}, {p}) out of range")));
            }
            if !paper_authors[p].contains(&a) {
                paper_authors[p].push(a);
                agent_papers[a].push(p);
            }
        }
        for list in paper_authors.iter_mut().chain(agent_papers.iter_mut()) {
            list.sort_unstable();
        }
        if let Some(p) = paper_authors.iter().position(|a| a.is_empty()) {
            return Err(Error::InvalidInstance(format!("paper {p} has no author")));
        }
        if n_agents * loads.agent < n_papers * loads.paper {
            return Err(Error::Infeasible(format!(
                "{n_agents} agents x load {} cannot cover {n_papers} papers x load {}",
                loads.agent, loads.paper
            )));
        }
        Ok(Instance {
            n_agents,
            n_papers,
            sim,
            mode: Mode::General,
            paper_authors,
            agent_papers,
            loads,
            reviewer_eligible: vec![true; n_agents],
            dummy_agents: 0,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_papers(&self) -> usize {
        self.n_papers
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_one_to_one(&self) -> bool {
        self.mode == Mode::OneToOne
    }

    pub fn loads(&self) -> Loads {
        self.loads
    }

    /// Load `k` of a one-to-one instance.
    pub fn k(&self) -> usize {
        self.loads.paper
    }

    #[inline]
    pub fn sim(&self, agent: usize, paper: usize) -> Score {
        Score(self.sim[agent * self.n_papers + paper] as i64)
    }

    pub fn authors_of(&self, paper: usize) -> &[usize] {
        &self.paper_authors[paper]
    }

    pub fn papers_of(&self, agent: usize) -> &[usize] {
        &self.agent_papers[agent]
    }

    pub fn is_author(&self, agent: usize, paper: usize) -> bool {
        match self.mode {
            Mode::OneToOne => agent == paper,
            Mode::General => self.agent_papers[agent].binary_search(&paper).is_ok(),
        }
    }

    /// All `(agent, paper)` authorship pairs in lexicographic order.
    pub fn authorship_pairs(&self) -> Vec<(usize, usize)> {
        self.agent_papers
            .iter()
            .enumerate()
            .flat_map(|(a, ps)| ps.iter().map(move |&p| (a, p)))
            .collect()
    }

    pub fn is_eligible_reviewer(&self, agent: usize) -> bool {
        self.reviewer_eligible[agent]
    }

    pub fn eligible_reviewers(&self) -> usize {
        self.reviewer_eligible.iter().filter(|&&e| e).count()
    }

    /// Number of trailing zero-similarity agents added as padding.
    pub fn dummy_agents(&self) -> usize {
        self.dummy_agents
    }

    /// Agents that are not padding.
    pub fn real_agents(&self) -> usize {
        self.n_agents - self.dummy_agents
    }

    pub fn is_dummy_agent(&self, agent: usize) -> bool {
        agent >= self.real_agents()
    }

    /// Same instance with different loads.
    pub fn with_loads(&self, loads: Loads) -> Result<Self> {
        if loads.agent == 0 || loads.paper == 0 {
            return Err(Error::InvalidInstance("loads must be positive".into()));
        }
        if self.is_one_to_one() && loads.agent != loads.paper {
            return Err(Error::InvalidInstance(
                "one-to-one instances use a single load k for agents and papers".into(),
            ));
        }
        let mut out = self.clone();
        out.loads = loads;
        Ok(out)
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        self.with_loads(Loads::uniform(k))
    }

    /// Appends `extra` agents (and their submissions) whose similarities are
    /// all zero. One-to-one mode only.
    pub fn padded(&self, extra: usize) -> Result<Self> {
        if !self.is_one_to_one() {
            return Err(Error::Precondition("padding is defined for one-to-one instances".into()));
        }
        if extra == 0 {
            return Ok(self.clone());
        }
        let n = self.n_agents;
        let n2 = n + extra;
        let mut sim = vec![0u32; n2 * n2];
        for a in 0..n {
            sim[a * n2..a * n2 + n].copy_from_slice(&self.sim[a * n..(a + 1) * n]);
        }
        let identity: Vec<Vec<usize>> = (0..n2).map(|i| vec![i]).collect();
        let mut eligible = self.reviewer_eligible.clone();
        eligible.resize(n2, true);
        Ok(Instance {
            n_agents: n2,
            n_papers: n2,
            sim,
            mode: Mode::OneToOne,
            paper_authors: identity.clone(),
            agent_papers: identity,
            loads: self.loads,
            reviewer_eligible: eligible,
            dummy_agents: self.dummy_agents + extra,
        })
    }

    pub(crate) fn with_ineligible_reviewers(&self, agents: &[usize]) -> Self {
        let mut out = self.clone();
        for &a in agents {
            out.reviewer_eligible[a] = false;
        }
        out
    }

    /// Full similarity matrix as rows of exact values.
    pub fn similarity_rows(&self) -> Vec<Vec<Score>> {
        (0..self.n_agents)
            .map(|a| (0..self.n_papers).map(|p| self.sim(a, p)).collect())
            .collect()
    }
}
