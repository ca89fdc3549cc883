//! Ordered multiset catalog backed by a randomized leveled list.
//!
//! Elements are addressed through stable handles that stay valid until the
//! element is deleted. Predecessor queries run in expected `O(log n)`;
//! forward finger searches run in expected `O(log d)` where `d` is the rank
//! distance traveled, delivered by climbing towers while the next pointer
//! still undershoots the target and descending once it overshoots.

use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;
use thiserror::Error;

use crate::key::{FiniteKey, Key};

const NIL: u32 = u32::MAX;
const MAX_HEIGHT: usize = 32;

/// Empirical step-budget coefficient for finger searches: over random
/// workloads the mean of `steps / (1 + log2(d + 2))` stays below this, with
/// the 99th percentile below three times it. The verification suites assert
/// against it; see `tests/catalog_props.rs`.
pub const FINGER_COST_COEFF: f64 = 5.0;

static NEXT_CATALOG_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum CatalogError {
    #[error("sentinel keys cannot be stored in a catalog")]
    SentinelInsert,
    #[error("handle does not belong to this catalog")]
    ForeignHandle,
    #[error("handle refers to a deleted element")]
    DeadHandle,
    #[error("finger start lies beyond the search key")]
    FingerBeyondKey,
}

/// Stable reference to one catalog element. Dereferencing after the element
/// was deleted reports [`CatalogError::DeadHandle`] instead of resolving to
/// an unrelated element; using it against another catalog reports
/// [`CatalogError::ForeignHandle`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ElementHandle {
    catalog: u64,
    slot: u32,
    generation: u32,
}

impl ElementHandle {
    pub(crate) fn slot(self) -> u32 {
        self.slot
    }

    /// Packs slot and generation into one word; the owning catalog id is
    /// implied by context (used by bridge maps).
    pub(crate) fn pack_local(self) -> u64 {
        ((self.slot as u64) << 32) | self.generation as u64
    }

    pub(crate) fn unpack_local(catalog: u64, raw: u64) -> Self {
        ElementHandle {
            catalog,
            slot: (raw >> 32) as u32,
            generation: raw as u32,
        }
    }
}

/// Which keys a search treats as "not yet past the target".
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum SearchMode {
    /// Stop at the last element with key <= x.
    Closed,
    /// Stop at the last element with key < x.
    Strict,
}

impl SearchMode {
    fn admits(self, key: FiniteKey, x: Key) -> bool {
        match self {
            SearchMode::Closed => Key::Finite(key) <= x,
            SearchMode::Strict => Key::Finite(key) < x,
        }
    }
}

struct Node {
    key: FiniteKey,
    next: SmallVec<[u32; 4]>,
}

impl Node {
    fn height(&self) -> usize {
        self.next.len()
    }
}

pub struct Catalog {
    id: u64,
    nodes: Vec<Option<Node>>,
    generations: Vec<u32>,
    free: Vec<u32>,
    head: [u32; MAX_HEIGHT],
    level: usize,
    len: usize,
    rng: ChaCha8Rng,
}

impl Catalog {
    /// Creates an empty catalog. Tower heights come from a deterministic
    /// generator seeded here, so identically seeded catalogs built by the
    /// same operation sequence are identical.
    pub fn with_seed(seed: u64) -> Self {
        Catalog {
            id: NEXT_CATALOG_ID.fetch_add(1, AtomicOrdering::Relaxed),
            nodes: Vec::new(),
            generations: Vec::new(),
            free: Vec::new(),
            head: [NIL; MAX_HEIGHT],
            level: 1,
            len: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Bulk-builds a catalog from keys already in non-decreasing order.
    pub fn from_sorted(seed: u64, keys: impl IntoIterator<Item = FiniteKey>) -> Self {
        let mut c = Catalog::with_seed(seed);
        let mut tail: [u32; MAX_HEIGHT] = [NIL; MAX_HEIGHT];
        let mut prev: Option<FiniteKey> = None;
        for key in keys {
            debug_assert!(prev.is_none_or(|p| p <= key), "keys must be sorted");
            prev = Some(key);
            let height = c.random_height();
            let slot = c.alloc(Node {
                key,
                next: SmallVec::from_elem(NIL, height),
            });
            if height > c.level {
                c.level = height;
            }
            for (lvl, t) in tail.iter_mut().enumerate().take(height) {
                if *t == NIL {
                    c.head[lvl] = slot;
                } else {
                    c.node_mut(*t).next[lvl] = slot;
                }
                *t = slot;
            }
            c.len += 1;
        }
        c
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub(crate) fn id(&self) -> u64 {
        self.id
    }

    fn node(&self, slot: u32) -> &Node {
        self.nodes[slot as usize].as_ref().expect("live slot")
    }

    fn node_mut(&mut self, slot: u32) -> &mut Node {
        self.nodes[slot as usize].as_mut().expect("live slot")
    }

    fn alloc(&mut self, node: Node) -> u32 {
        if let Some(slot) = self.free.pop() {
            self.nodes[slot as usize] = Some(node);
            slot
        } else {
            self.nodes.push(Some(node));
            self.generations.push(0);
            (self.nodes.len() - 1) as u32
        }
    }

    fn random_height(&mut self) -> usize {
        // Geometric with p = 1/2.
        (self.rng.next_u32().trailing_zeros() as usize + 1).min(MAX_HEIGHT)
    }

    fn handle(&self, slot: u32) -> ElementHandle {
        ElementHandle {
            catalog: self.id,
            slot,
            generation: self.generations[slot as usize],
        }
    }

    fn make_pos(&self, slot: u32) -> Option<ElementHandle> {
        if slot == NIL {
            None
        } else {
            Some(self.handle(slot))
        }
    }

    fn check(&self, h: ElementHandle) -> Result<u32, CatalogError> {
        if h.catalog != self.id {
            return Err(CatalogError::ForeignHandle);
        }
        let s = h.slot as usize;
        if s >= self.nodes.len() || self.generations[s] != h.generation || self.nodes[s].is_none() {
            return Err(CatalogError::DeadHandle);
        }
        Ok(h.slot)
    }

    fn next_slot(&self, at: u32, lvl: usize) -> u32 {
        if at == NIL {
            self.head[lvl]
        } else {
            self.node(at).next[lvl]
        }
    }

    fn admits(&self, slot: u32, x: Key, mode: SearchMode) -> bool {
        slot != NIL && mode.admits(self.node(slot).key, x)
    }

    /// Per-level predecessors of the search position, plus the level-0 one.
    fn search_frontier(&self, x: Key, mode: SearchMode) -> ([u32; MAX_HEIGHT], u32) {
        let mut frontier = [NIL; MAX_HEIGHT];
        let mut cur = NIL;
        for lvl in (0..self.level).rev() {
            loop {
                let nxt = self.next_slot(cur, lvl);
                if self.admits(nxt, x, mode) {
                    cur = nxt;
                } else {
                    break;
                }
            }
            frontier[lvl] = cur;
        }
        (frontier, cur)
    }

    /// Inserts a finite key; equal keys land after the existing ones.
    /// Returns a stable handle to the new element. Expected `O(log n)`.
    pub fn insert(&mut self, k: Key) -> Result<ElementHandle, CatalogError> {
        let key = k.as_finite().ok_or(CatalogError::SentinelInsert)?;
        let (mut frontier, _) = self.search_frontier(k, SearchMode::Closed);
        let height = self.random_height();
        if height > self.level {
            for item in frontier.iter_mut().take(height).skip(self.level) {
                *item = NIL;
            }
            self.level = height;
        }
        let mut next = SmallVec::with_capacity(height);
        for (lvl, &at) in frontier.iter().enumerate().take(height) {
            next.push(self.next_slot(at, lvl));
        }
        let slot = self.alloc(Node { key, next });
        for (lvl, &at) in frontier.iter().enumerate().take(height) {
            if at == NIL {
                self.head[lvl] = slot;
            } else {
                self.node_mut(at).next[lvl] = slot;
            }
        }
        self.len += 1;
        Ok(self.handle(slot))
    }

    /// Removes the element behind `h` and returns its key. Other handles
    /// stay valid. Expected `O(log n)`.
    pub fn remove(&mut self, h: ElementHandle) -> Result<Key, CatalogError> {
        self.remove_with_prev(h).map(|(k, _)| Key::Finite(k))
    }

    /// Removal that also reports the element's in-order predecessor, which
    /// is exactly what bridges targeting the removed element must fall back
    /// to.
    pub(crate) fn remove_with_prev(
        &mut self,
        h: ElementHandle,
    ) -> Result<(FiniteKey, Option<ElementHandle>), CatalogError> {
        let target = self.check(h)?;
        let key = self.node(target).key;
        let height = self.node(target).height();
        let mut frontier = [NIL; MAX_HEIGHT];
        let mut cur = NIL;
        for lvl in (0..self.level).rev() {
            if lvl >= height {
                // The target is not on this level; stop strictly below its
                // key so we cannot pass equal-key elements that follow it.
                loop {
                    let nxt = self.next_slot(cur, lvl);
                    if self.admits(nxt, Key::Finite(key), SearchMode::Strict) {
                        cur = nxt;
                    } else {
                        break;
                    }
                }
            } else {
                // The target is linked at this level; walk right up to it.
                loop {
                    let nxt = self.next_slot(cur, lvl);
                    if nxt == target {
                        break;
                    }
                    debug_assert_ne!(nxt, NIL, "live element is linked at its levels");
                    cur = nxt;
                }
            }
            frontier[lvl] = cur;
        }
        for (lvl, &at) in frontier.iter().enumerate().take(height) {
            let after = self.node(target).next[lvl];
            if at == NIL {
                self.head[lvl] = after;
            } else {
                self.node_mut(at).next[lvl] = after;
            }
        }
        let prev = self.make_pos(frontier[0]);
        self.nodes[target as usize] = None;
        self.generations[target as usize] = self.generations[target as usize].wrapping_add(1);
        self.free.push(target);
        self.len -= 1;
        Ok((key, prev))
    }

    /// Closed predecessor: the last element with key <= x, or `None` when
    /// every element lies above x. Expected `O(log n)`.
    pub fn pred(&self, x: Key) -> Option<ElementHandle> {
        let (_, slot) = self.search_frontier(x, SearchMode::Closed);
        self.make_pos(slot)
    }

    /// Last element with key strictly below x.
    pub fn pred_strict(&self, x: Key) -> Option<ElementHandle> {
        let (_, slot) = self.search_frontier(x, SearchMode::Strict);
        self.make_pos(slot)
    }

    /// First element with key >= x.
    pub fn succ(&self, x: Key) -> Option<ElementHandle> {
        let (_, slot) = self.search_frontier(x, SearchMode::Strict);
        self.make_pos(self.next_slot(slot, 0))
    }

    /// Forward finger search: starting from `from` (or from the catalog
    /// floor when `None`), returns the closed predecessor of `x` together
    /// with the number of element/level steps taken. Requires the finger's
    /// key to be at or below `x`; expected `O(log (d + 2))` steps where `d`
    /// is the rank distance from finger to answer.
    pub fn finger_search(
        &self,
        from: Option<ElementHandle>,
        x: Key,
    ) -> Result<(Option<ElementHandle>, u32), CatalogError> {
        self.finger_search_mode(from, x, SearchMode::Closed)
    }

    pub(crate) fn finger_search_mode(
        &self,
        from: Option<ElementHandle>,
        x: Key,
        mode: SearchMode,
    ) -> Result<(Option<ElementHandle>, u32), CatalogError> {
        let mut steps = 0u32;
        let mut cur;
        let mut lvl;
        match from {
            None => {
                cur = NIL;
                lvl = self.level - 1;
            }
            Some(h) => {
                let slot = self.check(h)?;
                if !mode.admits(self.node(slot).key, x) {
                    return Err(CatalogError::FingerBeyondKey);
                }
                cur = slot;
                lvl = 0;
                // Gallop: climb the current tower while the pointer one
                // level up still undershoots x, otherwise advance; taller
                // towers encountered on the way let us keep climbing.
                loop {
                    if lvl + 1 < self.node(cur).height()
                        && self.admits(self.node(cur).next[lvl + 1], x, mode)
                    {
                        lvl += 1;
                        steps += 1;
                    } else if self.admits(self.next_slot(cur, lvl), x, mode) {
                        cur = self.next_slot(cur, lvl);
                        steps += 1;
                    } else {
                        break;
                    }
                }
            }
        }
        loop {
            loop {
                let nxt = self.next_slot(cur, lvl);
                if self.admits(nxt, x, mode) {
                    cur = nxt;
                    steps += 1;
                } else {
                    break;
                }
            }
            if lvl == 0 {
                break;
            }
            lvl -= 1;
            steps += 1;
        }
        Ok((self.make_pos(cur), steps))
    }

    pub fn key_of(&self, h: ElementHandle) -> Result<FiniteKey, CatalogError> {
        Ok(self.node(self.check(h)?).key)
    }

    /// In-order successor element, `None` at the back.
    pub fn next_of(&self, h: ElementHandle) -> Result<Option<ElementHandle>, CatalogError> {
        let slot = self.check(h)?;
        Ok(self.make_pos(self.node(slot).next[0]))
    }

    pub fn first(&self) -> Option<ElementHandle> {
        self.make_pos(self.head[0])
    }

    pub fn last(&self) -> Option<ElementHandle> {
        self.pred(Key::PlusInf)
    }

    /// Number of elements with key in `[lo, hi)`.
    pub fn count_range(&self, lo: Key, hi: Key) -> usize {
        let mut cur = match lo {
            Key::MinusInf => self.head[0],
            _ => {
                let (_, below) = self.search_frontier(lo, SearchMode::Strict);
                self.next_slot(below, 0)
            }
        };
        let mut count = 0;
        while cur != NIL && Key::Finite(self.node(cur).key) < hi {
            count += 1;
            cur = self.node(cur).next[0];
        }
        count
    }

    /// In-order traversal of `(handle, key)` pairs.
    pub fn iter(&self) -> CatalogIter<'_> {
        CatalogIter {
            catalog: self,
            cur: self.head[0],
        }
    }
}

pub struct CatalogIter<'a> {
    catalog: &'a Catalog,
    cur: u32,
}

impl Iterator for CatalogIter<'_> {
    type Item = (ElementHandle, FiniteKey);

    fn next(&mut self) -> Option<Self::Item> {
        if self.cur == NIL {
            return None;
        }
        let slot = self.cur;
        let node = self.catalog.node(slot);
        self.cur = node.next[0];
        Some((self.catalog.handle(slot), node.key))
    }
}
