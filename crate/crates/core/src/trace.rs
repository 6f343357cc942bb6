//! Request traces and their marking-phase decomposition.
//!
//! Positions are 1-indexed. A page that is never requested again after
//! position `t` has next arrival `len + 1`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a page in the universe. Ordering is only used for
/// deterministic tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PageId(pub u64);

impl fmt::Display for PageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for PageId {
    fn from(id: u64) -> Self {
        PageId(id)
    }
}

/// An immutable request sequence with its next-arrival index.
///
/// Pages are also assigned dense slots `0..universe_size()` in ascending
/// `PageId` order, so comparing slots is the same as comparing ids.
#[derive(Debug, Clone)]
pub struct Trace {
    requests: Vec<PageId>,
    slots: Vec<u32>,
    pages: Vec<PageId>,
    next: Vec<usize>,
    occurrences: Vec<Vec<usize>>,
}

/// Builds a [`Trace`] from a non-empty request sequence.
pub fn build_trace<I>(requests: I) -> Result<Trace>
where
    I: IntoIterator,
    I::Item: Into<PageId>,
{
    let requests: Vec<PageId> = requests.into_iter().map(Into::into).collect();
    if requests.is_empty() {
        return Err(Error::EmptyTrace);
    }

    let pages: Vec<PageId> = requests.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let slot_of: HashMap<PageId, u32> = pages
        .iter()
        .enumerate()
        .map(|(slot, &page)| (page, slot as u32))
        .collect();
    let slots: Vec<u32> = requests.iter().map(|p| slot_of[p]).collect();

    let len = requests.len();
    let sentinel = len + 1;
    let mut next = vec![sentinel; len];
    let mut last_seen = vec![sentinel; pages.len()];
    for idx in (0..len).rev() {
        let slot = slots[idx] as usize;
        next[idx] = last_seen[slot];
        last_seen[slot] = idx + 1;
    }

    let mut occurrences = vec![Vec::new(); pages.len()];
    for (idx, &slot) in slots.iter().enumerate() {
        occurrences[slot as usize].push(idx + 1);
    }

    Ok(Trace {
        requests,
        slots,
        pages,
        next,
        occurrences,
    })
}

impl Trace {
    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    /// `len() + 1`, the arrival time reported for "never again".
    pub fn sentinel(&self) -> usize {
        self.requests.len() + 1
    }

    pub fn requests(&self) -> &[PageId] {
        &self.requests
    }

    pub fn universe_size(&self) -> usize {
        self.pages.len()
    }

    /// Page requested at 1-indexed position `t`.
    pub fn page_at(&self, t: usize) -> PageId {
        self.requests[t - 1]
    }

    /// Time of the next request to the page requested at `t`, or the sentinel.
    pub fn next_arrival(&self, t: usize) -> usize {
        self.next[t - 1]
    }

    /// Dense slot of the page requested at `t`.
    pub fn slot_at(&self, t: usize) -> u32 {
        self.slots[t - 1]
    }

    pub fn slot_of(&self, page: PageId) -> Option<u32> {
        self.pages.binary_search(&page).ok().map(|s| s as u32)
    }

    pub fn page_of_slot(&self, slot: u32) -> PageId {
        self.pages[slot as usize]
    }

    /// Sorted request times of the page in `slot`.
    pub fn occurrences(&self, slot: u32) -> &[usize] {
        &self.occurrences[slot as usize]
    }

    /// First request to `slot` strictly after time `t`, or the sentinel.
    pub fn next_request_after(&self, slot: u32, t: usize) -> usize {
        let occ = self.occurrences(slot);
        let idx = occ.partition_point(|&x| x <= t);
        occ.get(idx).copied().unwrap_or_else(|| self.sentinel())
    }
}

/// Algorithm-independent decomposition of a trace into marking phases.
///
/// Phase indices are 0-based here; phase 0 is the cold-start phase whose
/// pages are all clean.
#[derive(Debug, Clone)]
pub struct PhaseStructure {
    k: usize,
    boundaries: Vec<(usize, usize)>,
    distinct: Vec<Vec<(PageId, usize)>>,
    clean_pages: Vec<BTreeSet<PageId>>,
    stale_order: Vec<Vec<PageId>>,
    phase_of: Vec<usize>,
}

/// Greedy left-to-right partition of the trace into maximal segments that
/// touch at most `k` distinct pages.
pub fn decompose_phases(trace: &Trace, k: usize) -> Result<PhaseStructure> {
    if k == 0 {
        return Err(Error::ZeroCacheSize);
    }

    let mut boundaries = Vec::new();
    let mut distinct: Vec<Vec<(PageId, usize)>> = Vec::new();
    let mut phase_of = Vec::with_capacity(trace.len());

    let mut start = 1;
    let mut current: Vec<(PageId, usize)> = Vec::new();
    let mut seen: BTreeSet<PageId> = BTreeSet::new();
    for t in 1..=trace.len() {
        let page = trace.page_at(t);
        if !seen.contains(&page) {
            if seen.len() == k {
                boundaries.push((start, t - 1));
                distinct.push(std::mem::take(&mut current));
                seen.clear();
                start = t;
            }
            seen.insert(page);
            current.push((page, t));
        }
        phase_of.push(boundaries.len());
    }
    boundaries.push((start, trace.len()));
    distinct.push(current);

    let mut clean_pages = Vec::with_capacity(distinct.len());
    let mut stale_order = Vec::with_capacity(distinct.len());
    for h in 0..distinct.len() {
        let previous: BTreeSet<PageId> = if h == 0 {
            BTreeSet::new()
        } else {
            distinct[h - 1].iter().map(|&(p, _)| p).collect()
        };
        let clean: BTreeSet<PageId> = distinct[h]
            .iter()
            .map(|&(p, _)| p)
            .filter(|p| !previous.contains(p))
            .collect();

        let mut order: Vec<PageId> = distinct[h]
            .iter()
            .map(|&(p, _)| p)
            .filter(|p| previous.contains(p))
            .collect();
        let requested: BTreeSet<PageId> = order.iter().copied().collect();
        // BTreeSet iteration is ascending, which is the tail order we want.
        order.extend(previous.iter().filter(|p| !requested.contains(p)));

        clean_pages.push(clean);
        stale_order.push(order);
    }

    Ok(PhaseStructure {
        k,
        boundaries,
        distinct,
        clean_pages,
        stale_order,
        phase_of,
    })
}

impl PhaseStructure {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_phases(&self) -> usize {
        self.boundaries.len()
    }

    /// Inclusive `(start, end)` positions of every phase.
    pub fn boundaries(&self) -> &[(usize, usize)] {
        &self.boundaries
    }

    /// Phase containing position `t`.
    pub fn phase_of(&self, t: usize) -> usize {
        self.phase_of[t - 1]
    }

    pub fn clean_pages(&self, h: usize) -> &BTreeSet<PageId> {
        &self.clean_pages[h]
    }

    /// Number of distinct clean pages in phase `h`.
    pub fn ell(&self, h: usize) -> usize {
        self.clean_pages[h].len()
    }

    pub fn ell_total(&self) -> usize {
        self.clean_pages.iter().map(BTreeSet::len).sum()
    }

    /// Distinct pages of phase `h` with the time of their first request.
    pub fn first_requests(&self, h: usize) -> &[(PageId, usize)] {
        &self.distinct[h]
    }

    pub fn distinct_pages(&self, h: usize) -> BTreeSet<PageId> {
        self.distinct[h].iter().map(|&(p, _)| p).collect()
    }

    pub fn is_clean(&self, h: usize, page: PageId) -> bool {
        self.clean_pages[h].contains(&page)
    }

    /// Stale pages of phase `h`: requested ones by first request, then the
    /// unrequested ones by ascending id.
    pub fn stale_rank_order(&self, h: usize) -> Result<&[PageId]> {
        self.stale_order.get(h).map(Vec::as_slice).ok_or(Error::InvalidPhase {
            index: h,
            phases: self.num_phases(),
        })
    }
}
