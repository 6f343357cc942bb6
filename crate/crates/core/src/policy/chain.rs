//! Per-phase eviction chains and page ranks.
//!
//! A chain starts at a clean page. Serving it evicts a page at depth 1,
//! serving that page evicts one at depth 2, and so on.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::trace::PageId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainInfo {
    /// Deepest recorded eviction, i.e. the misses attributed to the chain.
    pub length: u32,
    /// Not rooted at a clean page, or re-evicted a page; excluded from stats.
    pub synthetic: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ChainTracker {
    chain_of: HashMap<PageId, (usize, u32)>,
    chains: Vec<ChainInfo>,
}

impl ChainTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Forget all chains; called at every phase boundary.
    pub fn reset(&mut self) {
        self.chain_of.clear();
        self.chains.clear();
    }

    /// `(chain, depth)` of a page evicted in the current phase.
    pub fn position(&self, page: PageId) -> Option<(usize, u32)> {
        self.chain_of.get(&page).copied()
    }

    /// Depth of the chain position a request continues: 0 for pages that were
    /// not evicted this phase.
    pub fn depth_of(&self, page: PageId) -> u32 {
        self.chain_of.get(&page).map_or(0, |&(_, d)| d)
    }

    pub fn chains(&self) -> &[ChainInfo] {
        &self.chains
    }

    /// Length histogram over the non-synthetic chains.
    pub fn histogram(&self) -> BTreeMap<u32, u32> {
        let mut hist = BTreeMap::new();
        for c in self.chains.iter().filter(|c| !c.synthetic) {
            *hist.entry(c.length).or_insert(0) += 1;
        }
        hist
    }

    /// Records that serving `requested` evicted `evicted`; returns the chain
    /// id and the depth assigned to `evicted`.
    pub fn extend_chain(&mut self, requested: PageId, evicted: PageId, is_clean: bool) -> (usize, u32) {
        let (chain, depth) = match self.chain_of.get(&requested) {
            Some(&(chain, depth)) => (chain, depth + 1),
            None => {
                self.chains.push(ChainInfo {
                    length: 0,
                    synthetic: !is_clean,
                });
                (self.chains.len() - 1, 1)
            }
        };
        if let Some(&(old, _)) = self.chain_of.get(&evicted) {
            self.chains[old].synthetic = true;
            self.chains[chain].synthetic = true;
        }
        let info = &mut self.chains[chain];
        info.length = info.length.max(depth);
        self.chain_of.insert(evicted, (chain, depth));
        (chain, depth)
    }
}

/// Number of pages after `evicted` in `stale_order` that are not in
/// `already_evicted`. `None` when `evicted` is not stale.
pub fn rank_of(evicted: PageId, stale_order: &[PageId], already_evicted: &HashSet<PageId>) -> Option<usize> {
    let pos = stale_order.iter().position(|&p| p == evicted)?;
    Some(
        stale_order[pos + 1..]
            .iter()
            .filter(|p| !already_evicted.contains(p))
            .count(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: u64) -> PageId {
        PageId(x)
    }

    #[test]
    fn chain_birth_and_growth() {
        let mut t = ChainTracker::new();
        assert_eq!(t.extend_chain(p(10), p(1), true), (0, 1));
        assert_eq!(t.chains()[0].length, 1);
        assert_eq!(t.depth_of(p(1)), 1);
        assert_eq!(t.extend_chain(p(1), p(2), false), (0, 2));
        assert_eq!(t.chains()[0].length, 2);
        assert_eq!(t.extend_chain(p(11), p(3), true), (1, 1));
        assert_eq!(t.histogram(), BTreeMap::from([(1, 1), (2, 1)]));
    }

    #[test]
    fn unknown_stale_request_is_synthetic() {
        let mut t = ChainTracker::new();
        assert_eq!(t.extend_chain(p(4), p(5), false), (0, 1));
        assert!(t.chains()[0].synthetic);
        assert!(t.histogram().is_empty());
    }

    #[test]
    fn re_eviction_poisons_both_chains() {
        let mut t = ChainTracker::new();
        t.extend_chain(p(10), p(1), true);
        t.extend_chain(p(11), p(1), true);
        assert!(t.chains().iter().all(|c| c.synthetic));
    }

    #[test]
    fn reset_clears() {
        let mut t = ChainTracker::new();
        t.extend_chain(p(10), p(1), true);
        t.reset();
        assert!(t.chains().is_empty());
        assert_eq!(t.depth_of(p(1)), 0);
    }

    #[test]
    fn rank_examples() {
        let order = [p(0), p(1), p(2), p(3)];
        let none = HashSet::new();
        assert_eq!(rank_of(p(0), &order, &none), Some(3));
        let a_gone = HashSet::from([p(0)]);
        assert_eq!(rank_of(p(2), &order, &a_gone), Some(1));
        assert_eq!(rank_of(p(3), &order, &none), Some(0));
        assert_eq!(rank_of(p(9), &order, &none), None);
        let later_gone = HashSet::from([p(2)]);
        assert_eq!(rank_of(p(0), &order, &later_gone), Some(2));
    }
}
