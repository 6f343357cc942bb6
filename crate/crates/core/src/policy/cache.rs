//! Resident set with marking bits, indexed by dense page slot.

const ABSENT: u32 = u32::MAX;

/// Set of slots with O(1) insert, remove, membership and indexed access.
/// Iteration order depends only on the operation history.
#[derive(Debug, Clone)]
pub(crate) struct IndexedSet {
    items: Vec<u32>,
    pos: Vec<u32>,
}

impl IndexedSet {
    pub(crate) fn new(universe: usize) -> Self {
        IndexedSet {
            items: Vec::new(),
            pos: vec![ABSENT; universe],
        }
    }

    pub(crate) fn contains(&self, slot: u32) -> bool {
        self.pos[slot as usize] != ABSENT
    }

    pub(crate) fn insert(&mut self, slot: u32) {
        if !self.contains(slot) {
            self.pos[slot as usize] = self.items.len() as u32;
            self.items.push(slot);
        }
    }

    pub(crate) fn remove(&mut self, slot: u32) {
        let idx = self.pos[slot as usize];
        if idx == ABSENT {
            return;
        }
        let last = *self.items.last().expect("non-empty");
        self.items.swap_remove(idx as usize);
        if last != slot {
            self.pos[last as usize] = idx;
        }
        self.pos[slot as usize] = ABSENT;
    }

    pub(crate) fn len(&self) -> usize {
        self.items.len()
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub(crate) fn as_slice(&self) -> &[u32] {
        &self.items
    }
}

/// Set of slots kept in ascending order, so indexed access depends only on
/// the set's contents.
#[derive(Debug, Clone)]
pub(crate) struct SortedSet {
    items: Vec<u32>,
    member: Vec<bool>,
}

impl SortedSet {
    pub(crate) fn new(universe: usize) -> Self {
        SortedSet {
            items: Vec::new(),
            member: vec![false; universe],
        }
    }

    pub(crate) fn contains(&self, slot: u32) -> bool {
        self.member[slot as usize]
    }

    pub(crate) fn remove(&mut self, slot: u32) {
        if self.member[slot as usize] {
            let idx = self.items.binary_search(&slot).expect("member is stored");
            self.items.remove(idx);
            self.member[slot as usize] = false;
        }
    }

    /// Replaces the contents with `slots`.
    pub(crate) fn reset_to(&mut self, slots: &[u32]) {
        for &s in &self.items {
            self.member[s as usize] = false;
        }
        self.items.clear();
        self.items.extend_from_slice(slots);
        self.items.sort_unstable();
        for &s in &self.items {
            self.member[s as usize] = true;
        }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub(crate) fn as_slice(&self) -> &[u32] {
        &self.items
    }
}

/// Resident pages of a size-`k` cache and the marked subset.
#[derive(Debug, Clone)]
pub struct CacheState {
    k: usize,
    resident: IndexedSet,
    unmarked: SortedSet,
}

impl CacheState {
    pub fn new(k: usize, universe: usize) -> Self {
        CacheState {
            k,
            resident: IndexedSet::new(universe),
            unmarked: SortedSet::new(universe),
        }
    }

    pub fn capacity(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.resident.len()
    }

    pub fn is_empty(&self) -> bool {
        self.resident.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.resident.len() >= self.k
    }

    pub fn contains(&self, slot: u32) -> bool {
        self.resident.contains(slot)
    }

    pub fn is_marked(&self, slot: u32) -> bool {
        self.contains(slot) && !self.unmarked.contains(slot)
    }

    pub fn resident(&self) -> &[u32] {
        self.resident.as_slice()
    }

    /// Unmarked resident slots in ascending order. Random draws index into
    /// this slice, so they depend only on the set, not on how it was built.
    pub fn unmarked(&self) -> &[u32] {
        self.unmarked.as_slice()
    }

    pub fn all_marked(&self) -> bool {
        self.unmarked.is_empty()
    }

    pub fn mark(&mut self, slot: u32) {
        self.unmarked.remove(slot);
    }

    /// Fetches `slot` and marks it.
    pub fn insert_marked(&mut self, slot: u32) {
        debug_assert!(!self.is_full());
        self.resident.insert(slot);
    }

    pub fn evict(&mut self, slot: u32) {
        self.resident.remove(slot);
        self.unmarked.remove(slot);
    }

    pub fn unmark_all(&mut self) {
        self.unmarked.reset_to(self.resident.as_slice());
    }
}
