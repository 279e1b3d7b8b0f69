//! Exhaustive reference computations for small instances. The assignment
//! and max-min searches share no code with the solvers; the partition
//! search enumerates bipartitions and solves each one exactly.

use std::collections::HashMap;

use crate::assignment::{Assignment, Partition};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::partition::combinations;
use crate::score::Score;
use crate::solver::optimum_for_partition;

pub const ASSIGNMENT_ORACLE_MAX_N: usize = 8;
pub const ASSIGNMENT_ORACLE_MAX_K: usize = 2;
pub const PARTITION_ORACLE_MAX_N: usize = 14;
pub const MAXMIN_ORACLE_MAX_N: usize = 10;

fn guard(n: usize, limit: usize, what: &str) -> Result<()> {
    if n > limit {
        return Err(Error::SizeGuard(format!(
            "{what} enumerates exponentially many candidates and is limited to n <= {limit} (got {n}); \
             the exact partitioned optimum is NP-hard in general"
        )));
    }
    Ok(())
}

/// Every balanced bipartition of `0..n` with agent 0 in the first subset.
pub fn enumerate_balanced_bipartitions(n: usize) -> Vec<Partition> {
    if n == 0 || n % 2 == 1 {
        return Vec::new();
    }
    combinations(n - 1, n / 2 - 1)
        .into_iter()
        .map(|rest| {
            let mut first = vec![0];
            first.extend(rest.iter().map(|&i| i + 1));
            let second = (0..n).filter(|v| !first.contains(v)).collect();
            Partition::bipartition(first, second)
        })
        .collect()
}

fn labels_of(n: usize, partition: &Partition) -> Vec<usize> {
    let mut l = vec![0; n];
    for (s, members) in partition.subsets().iter().enumerate() {
        for &a in members {
            l[a] = s;
        }
    }
    l
}

/// Exact optimum by dynamic programming over agents, tracking how many more
/// reviewers each paper can take. Every agent reviews exactly `k` papers.
pub fn brute_force_assignment_opt(instance: &Instance, k: usize) -> Result<Score> {
    brute_force_assignment_opt_with(instance, k, &|_, _| true)
}

/// As [`brute_force_assignment_opt`], restricted to pairs accepted by `allowed`
/// (self-review is always excluded).
pub fn brute_force_assignment_opt_with(
    instance: &Instance,
    k: usize,
    allowed: &dyn Fn(usize, usize) -> bool,
) -> Result<Score> {
    if !instance.is_one_to_one() {
        return Err(Error::Precondition("the assignment oracle expects a one-to-one instance".into()));
    }
    let n = instance.n_agents();
    guard(n, ASSIGNMENT_ORACLE_MAX_N, "the assignment oracle")?;
    if k == 0 || k > ASSIGNMENT_ORACLE_MAX_K {
        return Err(Error::SizeGuard(format!(
            "the assignment oracle supports 1 <= k <= {ASSIGNMENT_ORACLE_MAX_K}, got {k}"
        )));
    }
    let base = k + 1;
    let pow: Vec<usize> = (0..n).map(|p| base.pow(p as u32)).collect();
    let full: usize = (0..n).map(|p| k * pow[p]).sum();
    let choices: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|a| {
            let ok: Vec<usize> = (0..n).filter(|&p| p != a && allowed(a, p)).collect();
            combinations(ok.len(), k)
                .into_iter()
                .map(|c| c.into_iter().map(|i| ok[i]).collect())
                .collect()
        })
        .collect();

    #[allow(clippy::too_many_arguments)]
    fn best(
        a: usize,
        state: usize,
        n: usize,
        inst: &Instance,
        pow: &[usize],
        base: usize,
        choices: &[Vec<Vec<usize>>],
        memo: &mut HashMap<(usize, usize), Option<i64>>,
    ) -> Option<i64> {
        if a == n {
            return (state == 0).then_some(0);
        }
        if let Some(&v) = memo.get(&(a, state)) {
            return v;
        }
        let mut out: Option<i64> = None;
        for set in &choices[a] {
            if set.iter().all(|&p| !(state / pow[p]).is_multiple_of(base)) {
                let next = state - set.iter().map(|&p| pow[p]).sum::<usize>();
                if let Some(rest) = best(a + 1, next, n, inst, pow, base, choices, memo) {
                    let gain: i64 = set.iter().map(|&p| inst.sim(a, p).units()).sum();
                    out = Some(out.map_or(rest + gain, |o| o.max(rest + gain)));
                }
            }
        }
        memo.insert((a, state), out);
        out
    }

    let mut memo = HashMap::new();
    best(0, full, n, instance, &pow, base, &choices, &mut memo)
        .map(Score)
        .ok_or_else(|| Error::Infeasible(format!("no load-{k} assignment exists for {n} agents")))
}

/// Best balanced bipartition by exhaustive enumeration, solving the
/// constrained optimum for each candidate. Ties keep the first candidate.
pub fn brute_force_partition_opt(instance: &Instance, k: usize) -> Result<(Partition, Assignment, Score)> {
    if !instance.is_one_to_one() {
        return Err(Error::Precondition("the partition oracle expects a one-to-one instance".into()));
    }
    let n = instance.n_agents();
    guard(n, PARTITION_ORACLE_MAX_N, "the partition oracle")?;
    if n % 2 == 1 {
        return Err(Error::Precondition(format!(
            "balanced bipartitions need an even number of agents, got {n}; pad with a zero agent first"
        )));
    }
    let inst = instance.with_k(k)?;
    let mut best: Option<(Partition, Assignment, Score)> = None;
    for part in enumerate_balanced_bipartitions(n) {
        match optimum_for_partition(&inst, &part) {
            Ok((m, v)) => {
                if best.as_ref().is_none_or(|b| v > b.2) {
                    best = Some((part, m, v));
                }
            }
            Err(Error::Infeasible(_)) => {}
            Err(e) => return Err(e),
        }
    }
    best.ok_or_else(|| Error::Infeasible(format!("no balanced bipartition of {n} agents supports load {k}")))
}

/// Largest achievable minimum per-paper similarity, optionally under a
/// partition. `None` when no feasible assignment exists.
pub fn brute_force_maxmin(instance: &Instance, k: usize, partition: Option<&Partition>) -> Result<Option<Score>> {
    if !instance.is_one_to_one() {
        return Err(Error::Precondition("the max-min oracle expects a one-to-one instance".into()));
    }
    let n = instance.n_agents();
    guard(n, MAXMIN_ORACLE_MAX_N, "the max-min oracle")?;
    let labels = partition.map(|p| labels_of(n, p));
    let allowed = |a: usize, p: usize| a != p && labels.as_ref().is_none_or(|l| l[a] != l[p]);
    let options: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|p| {
            let ok: Vec<usize> = (0..n).filter(|&a| allowed(a, p)).collect();
            combinations(ok.len(), k)
                .into_iter()
                .map(|c| c.into_iter().map(|i| ok[i]).collect())
                .collect()
        })
        .collect();

    struct Search<'a> {
        inst: &'a Instance,
        options: &'a [Vec<Vec<usize>>],
        cap: Vec<usize>,
        best: Option<i64>,
    }
    impl Search<'_> {
        fn go(&mut self, p: usize, cur_min: i64) {
            if self.best.is_some_and(|b| cur_min <= b) {
                return;
            }
            if p == self.options.len() {
                if self.cap.iter().all(|&c| c == 0) {
                    self.best = Some(cur_min);
                }
                return;
            }
            for set in &self.options[p] {
                if set.iter().all(|&a| self.cap[a] > 0) {
                    let v: i64 = set.iter().map(|&a| self.inst.sim(a, p).units()).sum();
                    for &a in set {
                        self.cap[a] -= 1;
                    }
                    self.go(p + 1, cur_min.min(v));
                    for &a in set {
                        self.cap[a] += 1;
                    }
                }
            }
        }
    }
    let mut s = Search {
        inst: instance,
        options: &options,
        cap: vec![k; n],
        best: None,
    };
    s.go(0, i64::MAX);
    Ok(s.best.map(Score))
}

/// Maximum over balanced bipartitions of the constrained max-min value.
pub fn brute_force_partition_maxmin(instance: &Instance, k: usize) -> Result<Score> {
    let n = instance.n_agents();
    let mut best: Option<Score> = None;
    for part in enumerate_balanced_bipartitions(n) {
        if let Some(v) = brute_force_maxmin(instance, k, Some(&part))? {
            best = Some(best.map_or(v, |b| b.max(v)));
        }
    }
    best.ok_or_else(|| Error::Infeasible(format!("no balanced bipartition of {n} agents supports load {k}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipartition_count() {
        assert_eq!(enumerate_balanced_bipartitions(6).len(), 10);
        assert_eq!(enumerate_balanced_bipartitions(14).len(), 1716);
        assert!(enumerate_balanced_bipartitions(2)[0].subsets()[0] == vec![0]);
    }

    #[test]
    fn three_cycle_oracle() {
        let mut rows = vec![vec![0.0; 3]; 3];
        for i in 0..3 {
            rows[i][(i + 1) % 3] = 1.0;
        }
        let inst = Instance::one_to_one_from_rows(&rows, 1).unwrap();
        assert_eq!(brute_force_assignment_opt(&inst, 1).unwrap(), Score(3 * Score::ONE.units()));
    }

    #[test]
    fn uniform_half_oracle() {
        let inst = Instance::one_to_one_from_rows(&vec![vec![0.5; 4]; 4], 1).unwrap();
        assert_eq!(brute_force_assignment_opt(&inst, 1).unwrap(), Score(2 * Score::ONE.units()));
    }

    #[test]
    fn size_guards() {
        let inst = Instance::one_to_one_from_rows(&vec![vec![0.5; 16]; 16], 1).unwrap();
        assert!(matches!(brute_force_partition_opt(&inst, 1), Err(Error::SizeGuard(_))));
        assert!(matches!(brute_force_assignment_opt(&inst, 1), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn two_agents_partition() {
        let inst = Instance::one_to_one_from_rows(&[vec![0.0, 0.4], vec![0.7, 0.0]], 1).unwrap();
        let (p, _, v) = brute_force_partition_opt(&inst, 1).unwrap();
        assert_eq!(p.subsets(), &[vec![0], vec![1]]);
        assert_eq!(v, Score(1_100_000));
    }
}
