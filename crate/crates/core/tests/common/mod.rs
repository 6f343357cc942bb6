#![allow(dead_code)]

use paging_sim::instances::zipf_trace;
use paging_sim::{build_trace, QueryLog, QueryRecord, Trace};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random trace of length `1..=max_len` over a universe of `1..=max_universe`
/// pages, drawn uniformly.
pub fn fuzz_trace(seed: u64, max_len: usize, max_universe: u64) -> Trace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.gen_range(1..=max_len);
    let universe = rng.gen_range(1..=max_universe);
    build_trace((0..len).map(|_| rng.gen_range(0..universe))).unwrap()
}

/// Cache size in `1..=max_k`, derived from the same seed.
pub fn fuzz_k(seed: u64, max_k: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0FFEE);
    rng.gen_range(1..=max_k)
}

/// The small fuzz set used for exact comparisons against brute force.
pub fn small_fuzz_set() -> Vec<(Trace, usize)> {
    (0..500u64)
        .map(|seed| (fuzz_trace(seed, 12, 6), fuzz_k(seed, 3)))
        .collect()
}

/// Medium traces with enough structure to exercise phases and evictions.
pub fn medium_fuzz_set(count: u64) -> Vec<(Trace, usize)> {
    (0..count)
        .map(|seed| (fuzz_trace(10_000 + seed, 200, 24), 1 + fuzz_k(seed, 7)))
        .collect()
}

pub fn zipf_set(count: u64, length: usize, universe: usize) -> Vec<Trace> {
    (0..count)
        .map(|seed| zipf_trace(length, universe, 0.8, seed).unwrap())
        .collect()
}

/// Query log with integer-valued predictions, as exact arithmetic needs,
/// and pairwise distinct actual arrivals.
pub fn fuzz_log(seed: u64, max_len: usize) -> QueryLog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(0..=max_len);
    let span = n + rng.gen_range(1..=3 * n + 1);
    let mut actuals: Vec<usize> = (1..=span).collect();
    actuals.shuffle(&mut rng);
    let records = actuals[..n]
        .iter()
        .enumerate()
        .map(|(i, &actual)| QueryRecord {
            page: paging_sim::PageId(rng.gen_range(0..20)),
            time: i + 1,
            predicted: rng.gen_range(0..=span + 5) as f64,
            actual,
        })
        .collect();
    QueryLog::from_records(records)
}

/// O(n^2) inversion count: pairs with `actual_p < actual_q` but
/// `predicted_p >= predicted_q`.
pub fn naive_inversions(log: &QueryLog) -> u64 {
    let r = log.records();
    let mut count = 0;
    for i in 0..r.len() {
        for j in i + 1..r.len() {
            let (a, b) = (&r[i], &r[j]);
            // ties in prediction count against a strict actual order
            if (a.actual < b.actual && a.predicted >= b.predicted)
                || (a.actual > b.actual && a.predicted <= b.predicted)
            {
                count += 1;
            }
        }
    }
    count
}

/// Exact `sum |predicted - actual|` for integer-valued logs.
pub fn exact_error(log: &QueryLog) -> u64 {
    log.records()
        .iter()
        .map(|r| {
            assert_eq!(r.predicted.fract(), 0.0, "non-integer prediction");
            (r.predicted as i64 - r.actual as i64).unsigned_abs()
        })
        .sum()
}

/// The log restricted to the first query for each distinct actual arrival.
pub fn distinct_arrival_log(log: &QueryLog) -> QueryLog {
    let mut seen = std::collections::HashSet::new();
    QueryLog::from_records(
        log.records()
            .iter()
            .filter(|r| seen.insert(r.actual))
            .copied()
            .collect(),
    )
}
