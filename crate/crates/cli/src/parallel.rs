use erasure_ft::montecarlo::{shard_plan, simulate_shard, McEstimate, ShardTally};
use erasure_ft::Procedure;
use rayon::prelude::*;

/// Same estimate as the sequential simulator, with shards spread over the
/// rayon pool and folded in shard order.
pub fn simulate_parallel(
    proc: &Procedure,
    eps: f64,
    delta: f64,
    trials: u64,
    seed: u64,
) -> McEstimate {
    let tallies: Vec<ShardTally> = shard_plan(trials)
        .into_par_iter()
        .map(|(k, n)| simulate_shard(proc, eps, delta, seed, k, n))
        .collect();
    McEstimate::from_tally(
        seed,
        tallies
            .into_iter()
            .fold(ShardTally::default(), ShardTally::merge),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use erasure_ft::montecarlo::{simulate, SHARD_TRIALS};
    use erasure_ft::ErrorModel;

    #[test]
    fn matches_sequential_run() {
        let proc = Procedure::with_defaults(ErrorModel::Ideal);
        let trials = SHARD_TRIALS + 1000;
        assert_eq!(
            simulate_parallel(&proc, 0.1, 0.0, trials, 5),
            simulate(&proc, 0.1, 0.0, trials, 5)
        );
    }
}
