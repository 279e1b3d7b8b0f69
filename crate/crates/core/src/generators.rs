//! Instance generators: the worst-case families and seeded random instances.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Loads};
use crate::score::{Score, SCALE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Circulant groups of `2k + 1` agents, each liking the next `k` papers.
    Theorem2,
    /// Two odd similarity-one review cycles covering all agents.
    Theorem6,
    UniformRandom,
    BinaryRandom,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Theorem2, Family::Theorem6, Family::UniformRandom, Family::BinaryRandom];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Theorem2 => "theorem2",
            Family::Theorem6 => "theorem6",
            Family::UniformRandom => "uniform-random",
            Family::BinaryRandom => "binary-random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidInstance(format!("unknown instance family {s:?}")))
    }
}

/// Everything needed to regenerate an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Instance> {
        match self.family {
            Family::Theorem2 => gen_theorem2(self.n, self.k),
            Family::Theorem6 => gen_theorem6(self.n, self.k),
            f => gen_random(self.n, self.k, self.seed, f),
        }
    }
}

fn check_load(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::Precondition(format!("load {k} needs 1 <= k < n = {n}")));
    }
    Ok(())
}

/// Agents split into `n / (2k + 1)` groups; inside a group agent `i` has
/// similarity one to the papers of the next `k` members cyclically. Leftover
/// agents keep all-zero similarities.
pub fn gen_theorem2(n: usize, k: usize) -> Result<Instance> {
    let size = 2 * k + 1;
    if k == 0 || n < size {
        return Err(Error::Precondition(format!("need k >= 1 and n >= 2k + 1 = {size}, got n = {n}")));
    }
    let mut sim = vec![Score::ZERO; n * n];
    for g in 0..n / size {
        let base = g * size;
        for i in 0..size {
            for j in 1..=k {
                sim[(base + i) * n + base + (i + j) % size] = Score::ONE;
            }
        }
    }
    Instance::one_to_one(n, &sim, k)
}

/// Sizes of the two odd cycles used by [`gen_theorem6`].
pub fn theorem6_cycle_sizes(n: usize) -> (usize, usize) {
    let half = n / 2;
    let first = if half % 2 == 1 { half } else { half - 1 };
    (first, n - first)
}

/// Two directed cycles of odd length (at least three) covering all agents,
/// with similarity one along each cycle and zero elsewhere.
pub fn gen_theorem6(n: usize, k: usize) -> Result<Instance> {
    if n < 6 || n % 2 == 1 {
        return Err(Error::Precondition(format!("need an even n >= 6, got {n}")));
    }
    check_load(n, k)?;
    let (a, b) = theorem6_cycle_sizes(n);
    let mut sim = vec![Score::ZERO; n * n];
    for (base, len) in [(0, a), (a, b)] {
        for i in 0..len {
            sim[(base + i) * n + base + (i + 1) % len] = Score::ONE;
        }
    }
    Instance::one_to_one(n, &sim, k)
}

fn draw(rng: &mut ChaCha8Rng, family: Family) -> Score {
    match family {
        Family::BinaryRandom => {
            if rng.random_bool(0.5) {
                Score::ONE
            } else {
                Score::ZERO
            }
        }
        _ => Score(rng.random_range(0..=SCALE)),
    }
}

/// One-to-one instance with seeded random similarities: uniform millionths
/// in `[0, 1]` or fair coin flips. Own-paper entries are zero.
pub fn gen_random(n: usize, k: usize, seed: u64, family: Family) -> Result<Instance> {
    if !matches!(family, Family::UniformRandom | Family::BinaryRandom) {
        return Err(Error::Precondition(format!("{family} is not a random family")));
    }
    if n % 2 == 1 {
        return Err(Error::Precondition(format!("random one-to-one instances need an even n, got {n}")));
    }
    check_load(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sim = Vec::with_capacity(n * n);
    for a in 0..n {
        for p in 0..n {
            let s = draw(&mut rng, family);
            sim.push(if a == p { Score::ZERO } else { s });
        }
    }
    Instance::one_to_one(n, &sim, k)
}

/// General-authorship instance: each paper gets between one and
/// `max_authors` distinct authors, similarities as in [`gen_random`].
pub fn gen_random_general(
    n_agents: usize,
    n_papers: usize,
    loads: Loads,
    max_authors: usize,
    seed: u64,
    family: Family,
) -> Result<Instance> {
    if !matches!(family, Family::UniformRandom | Family::BinaryRandom) {
        return Err(Error::Precondition(format!("{family} is not a random family")));
    }
    if n_agents == 0 || max_authors == 0 {
        return Err(Error::Precondition("need at least one agent and one author per paper".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut authorship = Vec::new();
    for p in 0..n_papers {
        let count = rng.random_range(1..=max_authors.min(n_agents));
        for a in sample(&mut rng, n_agents, count).into_vec() {
            authorship.push((a, p));
        }
    }
    let mut sim = Vec::with_capacity(n_agents * n_papers);
    for _ in 0..n_agents * n_papers {
        sim.push(draw(&mut rng, family));
    }
    for &(a, p) in &authorship {
        sim[a * n_papers + p] = Score::ZERO;
    }
    Instance::general(n_agents, n_papers, &sim, &authorship, loads)
}
