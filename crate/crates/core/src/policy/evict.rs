//! Eviction rules. Pages are dense trace slots, whose order matches
//! `PageId` order, so "smallest slot" is the smallest-id tie-break.

use crate::oracle::Oracle;
use crate::policy::cache::CacheState;
use crate::sampling::{sample_indices, uniform_index, PolicyRng};
use crate::trace::Trace;

/// Argmax of `score` over `candidates`; ties go to the smallest slot.
pub fn argmax_by_score(candidates: &[u32], score: impl Fn(u32) -> f64) -> u32 {
    let mut best = candidates[0];
    let mut best_score = score(best);
    for &s in &candidates[1..] {
        let sc = score(s);
        match sc.total_cmp(&best_score) {
            std::cmp::Ordering::Greater => {
                best = s;
                best_score = sc;
            }
            std::cmp::Ordering::Equal if s < best => best = s,
            _ => {}
        }
    }
    best
}

/// Belady: the resident page requested furthest in the future after `t`.
pub fn fif_evict(cache: &CacheState, trace: &Trace, t: usize) -> u32 {
    argmax_by_score(cache.resident(), |s| trace.next_request_after(s, t) as f64)
}

pub fn random_marker_evict(unmarked: &[u32], rng: &mut PolicyRng) -> u32 {
    unmarked[uniform_index(rng, unmarked.len())]
}

/// Least recently used resident page. Ignores marks.
pub fn lru_evict(cache: &CacheState, last_access: &[usize]) -> u32 {
    argmax_by_score(cache.resident(), |s| -(last_access[s as usize] as f64))
}

/// Resident page with the latest predicted arrival.
pub fn blind_oracle_evict(cache: &CacheState, predictions: &[f64]) -> u32 {
    argmax_by_score(cache.resident(), |s| predictions[s as usize])
}

/// Predictions gathered for the current phase; reused until the phase ends.
#[derive(Debug, Clone)]
pub struct PhaseMemo {
    values: Vec<Option<f64>>,
    filled: Vec<u32>,
}

impl PhaseMemo {
    pub fn new(universe: usize) -> Self {
        PhaseMemo {
            values: vec![None; universe],
            filled: Vec::new(),
        }
    }

    pub fn get(&self, slot: u32) -> Option<f64> {
        self.values[slot as usize]
    }

    fn set(&mut self, slot: u32, value: f64) {
        if self.values[slot as usize].replace(value).is_none() {
            self.filled.push(slot);
        }
    }

    pub fn clear(&mut self) {
        for s in self.filled.drain(..) {
            self.values[s as usize] = None;
        }
    }
}

/// Random unmarked page while at least `min_unmarked` remain; otherwise
/// Belady on predictions, querying each unmarked page at most once per phase.
#[allow(clippy::too_many_arguments)]
pub fn naive_evict(
    unmarked: &[u32],
    oracle: &mut Oracle,
    trace: &Trace,
    t: usize,
    min_unmarked: usize,
    memo: &mut PhaseMemo,
    rng: &mut PolicyRng,
) -> u32 {
    if unmarked.len() >= min_unmarked {
        return random_marker_evict(unmarked, rng);
    }
    for &s in unmarked {
        if memo.get(s).is_none() {
            let tau = oracle.query_slot(trace, s, t);
            memo.set(s, tau);
        }
    }
    argmax_by_score(unmarked, |s| memo.get(s).expect("queried above"))
}

/// Samples `min(b, |unmarked|)` pages without replacement, queries them, and
/// evicts the one predicted furthest out.
pub fn adaptive_query_evict(
    unmarked: &[u32],
    oracle: &mut Oracle,
    trace: &Trace,
    t: usize,
    b: usize,
    rng: &mut PolicyRng,
) -> u32 {
    let sampled: Vec<u32> = sample_indices(rng, unmarked.len(), b)
        .into_iter()
        .map(|i| unmarked[i])
        .collect();
    let predictions: Vec<(u32, f64)> = sampled.iter().map(|&s| (s, oracle.query_slot(trace, s, t))).collect();
    let lookup = |slot: u32| {
        predictions
            .iter()
            .find(|&&(s, _)| s == slot)
            .map(|&(_, v)| v)
            .expect("sampled slot")
    };
    argmax_by_score(&sampled, lookup)
}

/// [`adaptive_query_evict`] while the chain depth is within `threshold`,
/// a uniform unmarked page (no queries) beyond it. The flag reports whether
/// the fallback was taken.
#[allow(clippy::too_many_arguments)]
pub fn adaptive_with_fallback(
    unmarked: &[u32],
    oracle: &mut Oracle,
    trace: &Trace,
    t: usize,
    b: usize,
    chain_depth: u32,
    threshold: f64,
    rng: &mut PolicyRng,
) -> (u32, bool) {
    if f64::from(chain_depth) > threshold {
        (random_marker_evict(unmarked, rng), true)
    } else {
        (adaptive_query_evict(unmarked, oracle, trace, t, b, rng), false)
    }
}

/// Greedy on the per-request predictions while the chain depth is within
/// `threshold`, uniform random beyond it.
pub fn lv_marker_evict(
    unmarked: &[u32],
    predictions: &[f64],
    chain_depth: u32,
    threshold: f64,
    rng: &mut PolicyRng,
) -> u32 {
    if f64::from(chain_depth) > threshold {
        random_marker_evict(unmarked, rng)
    } else {
        argmax_by_score(unmarked, |s| predictions[s as usize])
    }
}

pub fn rohatgi_marker_evict(unmarked: &[u32], predictions: &[f64], chain_depth: u32, rng: &mut PolicyRng) -> u32 {
    lv_marker_evict(unmarked, predictions, chain_depth, 1.0, rng)
}
