//! Follow-the-leader combination of a prediction-greedy cache and a
//! randomized marking cache.
//!
//! Both shadows serve every request. The leader starts as the prediction
//! shadow and is handed over only when its miss count exceeds `gamma`
//! times the other's. The real cache copies the leader lazily: on a miss
//! it drops a page the leader does not hold.

use serde::{Deserialize, Serialize};

use crate::policy::cache::CacheState;
use crate::policy::evict::{blind_oracle_evict, random_marker_evict};
use crate::sampling::PolicyRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Leader {
    BlindOracle,
    RandomMarker,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinerSummary {
    pub final_leader: Leader,
    pub switches: u64,
    pub blind_misses: u64,
    pub marker_misses: u64,
}

#[derive(Debug, Clone)]
pub struct Combiner {
    gamma: f64,
    blind: CacheState,
    marker: CacheState,
    marker_rng: PolicyRng,
    blind_misses: u64,
    marker_misses: u64,
    blind_last_evicted: Option<u32>,
    marker_last_evicted: Option<u32>,
    leader: Leader,
    switches: u64,
}

impl Combiner {
    pub fn new(k: usize, universe: usize, gamma: f64, marker_rng: PolicyRng) -> Self {
        Combiner {
            gamma,
            blind: CacheState::new(k, universe),
            marker: CacheState::new(k, universe),
            marker_rng,
            blind_misses: 0,
            marker_misses: 0,
            blind_last_evicted: None,
            marker_last_evicted: None,
            leader: Leader::BlindOracle,
            switches: 0,
        }
    }

    pub fn leader(&self) -> Leader {
        self.leader
    }

    /// Advances both shadows by one request, then re-evaluates leadership.
    pub fn step(&mut self, slot: u32, predictions: &[f64]) {
        if !self.blind.contains(slot) {
            self.blind_misses += 1;
            if self.blind.is_full() {
                let victim = blind_oracle_evict(&self.blind, predictions);
                self.blind.evict(victim);
                self.blind_last_evicted = Some(victim);
            }
            self.blind.insert_marked(slot);
        }

        if self.marker.contains(slot) {
            self.marker.mark(slot);
        } else {
            self.marker_misses += 1;
            if self.marker.is_full() {
                if self.marker.all_marked() {
                    self.marker.unmark_all();
                }
                let victim = random_marker_evict(self.marker.unmarked(), &mut self.marker_rng);
                self.marker.evict(victim);
                self.marker_last_evicted = Some(victim);
            }
            self.marker.insert_marked(slot);
        }

        let (mine, theirs) = match self.leader {
            Leader::BlindOracle => (self.blind_misses, self.marker_misses),
            Leader::RandomMarker => (self.marker_misses, self.blind_misses),
        };
        if mine as f64 > self.gamma * theirs as f64 {
            self.leader = match self.leader {
                Leader::BlindOracle => Leader::RandomMarker,
                Leader::RandomMarker => Leader::BlindOracle,
            };
            self.switches += 1;
        }
    }

    /// Victim for the real cache once the shadows have served the request.
    pub fn robust_combiner_evict(&self, real: &CacheState) -> u32 {
        let (shadow, last) = match self.leader {
            Leader::BlindOracle => (&self.blind, self.blind_last_evicted),
            Leader::RandomMarker => (&self.marker, self.marker_last_evicted),
        };
        if let Some(&victim) = real.resident().iter().filter(|&&s| !shadow.contains(s)).min() {
            return victim;
        }
        match last {
            Some(s) if real.contains(s) => s,
            _ => *real.resident().iter().min().expect("real cache is full"),
        }
    }

    pub fn summary(&self) -> CombinerSummary {
        CombinerSummary {
            final_leader: self.leader,
            switches: self.switches,
            blind_misses: self.blind_misses,
            marker_misses: self.marker_misses,
        }
    }
}
