use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{require_even, require_one_to_one, Algorithm, PartitionResult};
use crate::assignment::Partition;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::solver::optimum_for_partition;

/// Uniformly random split of `0..n` into two halves, determined by `seed`.
pub fn random_bipartition(n: usize, seed: u64) -> Partition {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let second = order.split_off(n / 2);
    Partition::bipartition(order, second)
}

/// Random balanced bipartition, then the best assignment respecting it.
pub fn random_partition(instance: &Instance, k: usize, seed: u64) -> Result<PartitionResult> {
    require_one_to_one(instance, "random partitioning")?;
    require_even(instance, "random partitioning")?;
    let n = instance.n_agents();
    if k > n / 2 {
        return Err(Error::Precondition(format!(
            "load {k} exceeds half of the {n} agents; each half must review the other"
        )));
    }
    let inst = instance.with_k(k)?;
    let partition = random_bipartition(n, seed);
    let (assignment, value) = optimum_for_partition(&inst, &partition)?;
    Ok(PartitionResult {
        algorithm: Algorithm::Random,
        seed: Some(seed),
        assignment,
        partition,
        dummy_agents: 0,
        value,
    })
}
