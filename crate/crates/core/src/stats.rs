//! Per-subset outcome statistics and the two-sample Kolmogorov–Smirnov test.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::assignment::Partition;
use crate::error::{Error, Result};
use crate::score::Score;

pub const UNKNOWN_DECISION: &str = "unknown";

/// Final decision and mean review score of a paper.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub decision: String,
    pub mean_score: Score,
}

/// Outcomes keyed by paper index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeTable {
    pub outcomes: BTreeMap<usize, Outcome>,
}

impl OutcomeTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fails if the paper already has an outcome.
    pub fn insert(&mut self, paper: usize, decision: impl Into<String>, mean_score: Score) -> Result<()> {
        if self.outcomes.contains_key(&paper) {
            return Err(Error::InvalidInstance(format!("paper {paper} has two outcomes")));
        }
        self.outcomes.insert(
            paper,
            Outcome {
                decision: decision.into(),
                mean_score,
            },
        );
        Ok(())
    }

    pub fn get(&self, paper: usize) -> Option<&Outcome> {
        self.outcomes.get(&paper)
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// Papers of each subset: the explicit paper subsets when present, otherwise
/// the agent subsets (paper `i` belongs to agent `i`).
pub fn paper_groups(partition: &Partition) -> Vec<Vec<usize>> {
    partition
        .paper_subsets()
        .map(<[Vec<usize>]>::to_vec)
        .unwrap_or_else(|| partition.subsets().to_vec())
}

/// Decision histogram of every subset. Papers without an outcome are counted
/// under [`UNKNOWN_DECISION`].
pub fn subset_outcome_counts(partition: &Partition, outcomes: &OutcomeTable) -> Vec<BTreeMap<String, usize>> {
    paper_groups(partition)
        .iter()
        .map(|papers| {
            let mut hist = BTreeMap::new();
            for &p in papers {
                let d = outcomes.get(p).map_or(UNKNOWN_DECISION, |o| o.decision.as_str());
                *hist.entry(d.to_string()).or_insert(0) += 1;
            }
            hist
        })
        .collect()
}

/// Mean scores of the papers of each subset that have an outcome.
pub fn subset_scores(partition: &Partition, outcomes: &OutcomeTable) -> Vec<Vec<Score>> {
    paper_groups(partition)
        .iter()
        .map(|papers| papers.iter().filter_map(|&p| outcomes.get(p).map(|o| o.mean_score)).collect())
        .collect()
}

/// Two-sample test result. `d` is exact; `p` is asymptotic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    #[serde(with = "crate::metrics::ratio_text")]
    pub d_exact: Ratio<i64>,
    pub d: f64,
    pub p: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// Largest gap between the empirical distribution functions of two samples,
/// as an exact fraction. Tied values move both functions at once.
pub fn ks_statistic(sample_a: &[Score], sample_b: &[Score]) -> Result<Ratio<i64>> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(Error::Precondition("both samples must be non-empty".into()));
    }
    let mut a = sample_a.to_vec();
    let mut b = sample_b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let (na, nb) = (a.len() as i64, b.len() as i64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut best = 0i64;
    while i < a.len() || j < b.len() {
        let v = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        best = best.max((i as i64 * nb - j as i64 * na).abs());
    }
    Ok(Ratio::new(best, na * nb))
}

/// Survival function of the Kolmogorov distribution, `P(K > x)`.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let p = if x < 1.18 {
        // theta-function form, fast for small arguments
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * x * x);
        let mut sum = 0.0;
        for j in 1..=20 {
            let m = (2 * j - 1) as f64;
            let term = (-m * m * c).exp();
            sum += term;
            if term < 1e-17 {
                break;
            }
        }
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * sum
    } else {
        let mut sum = 0.0;
        for j in 1..=100 {
            let jf = j as f64;
            let term = (-2.0 * jf * jf * x * x).exp();
            sum += if j % 2 == 1 { term } else { -term };
            if term < 1e-17 {
                break;
            }
        }
        2.0 * sum
    };
    p.clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value at
/// effective size `n_a n_b / (n_a + n_b)`.
pub fn ks_two_sample(sample_a: &[Score], sample_b: &[Score]) -> Result<KsResult> {
    let d_exact = ks_statistic(sample_a, sample_b)?;
    let (na, nb) = (sample_a.len(), sample_b.len());
    let d = *d_exact.numer() as f64 / *d_exact.denom() as f64;
    let en = (na as f64 * nb as f64 / (na + nb) as f64).sqrt();
    Ok(KsResult {
        d_exact,
        d,
        p: kolmogorov_survival(en * d),
        n_a: na,
        n_b: nb,
    })
}

/// The pairwise test with the largest statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsMulti {
    pub pair: (usize, usize),
    pub result: KsResult,
}

/// Tests every pair of non-empty subsets and keeps the pair with the
/// largest statistic (first pair on ties).
pub fn ks_multi(partition: &Partition, outcomes: &OutcomeTable) -> Result<KsMulti> {
    ks_multi_samples(&subset_scores(partition, outcomes))
}

pub fn ks_multi_samples(samples: &[Vec<Score>]) -> Result<KsMulti> {
    let nonempty: Vec<usize> = (0..samples.len()).filter(|&i| !samples[i].is_empty()).collect();
    if nonempty.len() < 2 {
        return Err(Error::Precondition("need at least two subsets with scores".into()));
    }
    let mut best: Option<KsMulti> = None;
    for (x, &i) in nonempty.iter().enumerate() {
        for &j in &nonempty[x + 1..] {
            let r = ks_two_sample(&samples[i], &samples[j])?;
            if best.as_ref().is_none_or(|b| r.d_exact > b.result.d_exact) {
                best = Some(KsMulti { pair: (i, j), result: r });
            }
        }
    }
    Ok(best.expect("at least one pair"))
}
