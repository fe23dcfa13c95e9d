//! Exact subset searches: synchronization test, reset thresholds (forward
//! over images, backward over preimages), shortest extending words, and
//! backward level profiles.
//!
//! All searches are breadth-first with deterministic tie-breaking: letters
//! are tried in declared order and frontiers are FIFO, so returned witnesses
//! are stable across runs and platforms.

use std::collections::HashMap;
use std::collections::VecDeque;

use crate::automaton::{BitIter, Dfa, StateSet, Word};
use crate::{Error, Result, DIRECT_INDEX_MAX_STATES, MAX_SUBSET_STATES};

/// Result of an exact reset-threshold search: the threshold, one witness of
/// exactly that length, and the state the witness maps everything onto.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RtResult {
    pub threshold: usize,
    pub witness: Word,
    pub q0: usize,
}

/// Layer widths of the backward BFS from a singleton: `widths[i]` counts the
/// distinct subsets at backward distance `i` from `{q0}`, and `depth_to_full`
/// is the distance at which the full state set appears, if it does.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelProfile {
    pub q0: usize,
    pub widths: Vec<usize>,
    pub depth_to_full: Option<usize>,
}

const ROOT: u8 = u8::MAX;

/// Per-subset parent links for witness reconstruction. Direct-indexed below
/// `DIRECT_INDEX_MAX_STATES` states (one slot per possible mask), a hash map
/// above that.
enum ParentTable {
    Direct(Vec<u64>),
    Hashed(HashMap<u64, (u64, u8)>),
}

impl ParentTable {
    fn new(n: usize) -> ParentTable {
        if n <= DIRECT_INDEX_MAX_STATES {
            ParentTable::Direct(vec![u64::MAX; 1usize << n])
        } else {
            ParentTable::Hashed(HashMap::new())
        }
    }

    /// Records `mask` with its BFS parent; returns false if already seen.
    fn insert_if_new(&mut self, mask: u64, parent: u64, letter: u8) -> bool {
        match self {
            ParentTable::Direct(slots) => {
                let slot = &mut slots[mask as usize];
                if *slot != u64::MAX {
                    return false;
                }
                *slot = parent << 8 | letter as u64;
                true
            }
            ParentTable::Hashed(map) => {
                if map.contains_key(&mask) {
                    return false;
                }
                map.insert(mask, (parent, letter));
                true
            }
        }
    }

    fn get(&self, mask: u64) -> (u64, u8) {
        match self {
            ParentTable::Direct(slots) => {
                let packed = slots[mask as usize];
                debug_assert_ne!(packed, u64::MAX);
                (packed >> 8, (packed & 0xff) as u8)
            }
            ParentTable::Hashed(map) => map[&mask],
        }
    }

    /// Letters along the parent chain from `mask` back to the BFS root, in
    /// walk order.
    fn letters_to_root(&self, mut mask: u64) -> Vec<usize> {
        let mut letters = Vec::new();
        loop {
            let (parent, letter) = self.get(mask);
            if letter == ROOT {
                return letters;
            }
            letters.push(letter as usize);
            mask = parent;
        }
    }
}

fn check_size(dfa: &Dfa, max: usize) -> Result<()> {
    if dfa.n() > max {
        return Err(Error::TooManyStates { n: dfa.n(), max });
    }
    Ok(())
}

fn full_mask(n: usize) -> u64 {
    StateSet::full(n).bits()
}

/// True iff every pair of states is merged by some word (BFS over the pair
/// graph, backwards from the diagonal).
pub fn is_synchronizing(dfa: &Dfa) -> Result<bool> {
    check_size(dfa, MAX_SUBSET_STATES)?;
    let n = dfa.n();
    if n == 1 {
        return Ok(true);
    }
    let k = dfa.alphabet_len();
    let mut merged = vec![false; n * n];
    let mut queue: VecDeque<(usize, usize)> = (0..n).map(|r| (r, r)).collect();
    let mut remaining = n * (n - 1) / 2;
    while let Some((r, s)) = queue.pop_front() {
        for a in 0..k {
            let pre_r = dfa.preimage_mask(1 << r, a);
            let pre_s = dfa.preimage_mask(1 << s, a);
            for p in BitIter(pre_r) {
                for q in BitIter(pre_s) {
                    if p == q {
                        continue;
                    }
                    let (lo, hi) = (p.min(q), p.max(q));
                    if !merged[lo * n + hi] {
                        merged[lo * n + hi] = true;
                        remaining -= 1;
                        if remaining == 0 {
                            return Ok(true);
                        }
                        queue.push_back((lo, hi));
                    }
                }
            }
        }
    }
    Ok(remaining == 0)
}

/// Exact reset threshold by forward BFS over image subsets from the full
/// state set; the first singleton reached yields a shortest witness.
pub fn reset_threshold(dfa: &Dfa) -> Result<RtResult> {
    check_size(dfa, MAX_SUBSET_STATES)?;
    let n = dfa.n();
    if n == 1 {
        return Ok(RtResult {
            threshold: 0,
            witness: Word::empty(),
            q0: 0,
        });
    }
    let k = dfa.alphabet_len();
    let start = full_mask(n);
    let mut parents = ParentTable::new(n);
    parents.insert_if_new(start, 0, ROOT);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for a in 0..k {
            let t = dfa.image_mask(s, a);
            if parents.insert_if_new(t, s, a as u8) {
                if t.count_ones() == 1 {
                    let mut letters = parents.letters_to_root(t);
                    letters.reverse();
                    return Ok(RtResult {
                        threshold: letters.len(),
                        witness: Word::new(letters),
                        q0: t.trailing_zeros() as usize,
                    });
                }
                queue.push_back(t);
            }
        }
    }
    Err(Error::NotSynchronizing)
}

/// Exact reset threshold by backward BFS: the minimum over target states
/// `q0` of the shortest word whose inverse action grows `{q0}` to the full
/// set. Agrees with [`reset_threshold`] on every input and serves as its
/// independent oracle.
pub fn reset_threshold_backward(dfa: &Dfa) -> Result<RtResult> {
    check_size(dfa, MAX_SUBSET_STATES)?;
    let n = dfa.n();
    if n == 1 {
        return Ok(RtResult {
            threshold: 0,
            witness: Word::empty(),
            q0: 0,
        });
    }
    let k = dfa.alphabet_len();
    let full = full_mask(n);
    let mut best: Option<RtResult> = None;
    for q0 in 0..n {
        let start = 1u64 << q0;
        let mut parents = ParentTable::new(n);
        parents.insert_if_new(start, 0, ROOT);
        let mut layer = vec![start];
        let mut depth = 0usize;
        'search: while !layer.is_empty() {
            // a find at this point would have length depth+1
            if let Some(b) = &best {
                if depth + 1 >= b.threshold {
                    break;
                }
            }
            let mut next = Vec::new();
            for &s in &layer {
                for a in 0..k {
                    let t = dfa.preimage_mask(s, a);
                    if parents.insert_if_new(t, s, a as u8) {
                        if t == full {
                            // letters walk from the full set back to {q0};
                            // each BFS step prepends its letter, so the walk
                            // order already is word order
                            let letters = parents.letters_to_root(t);
                            best = Some(RtResult {
                                threshold: letters.len(),
                                witness: Word::new(letters),
                                q0,
                            });
                            break 'search;
                        }
                        next.push(t);
                    }
                }
            }
            layer = next;
            depth += 1;
        }
    }
    best.ok_or(Error::NotSynchronizing)
}

/// Shortest word `w` with `|s · w⁻¹| > |s|`, by BFS over preimage-reachable
/// subsets, stopping at the first strictly larger one. The grown set is not
/// required to be forward-reachable.
pub fn shortest_extending_word(dfa: &Dfa, s: StateSet) -> Result<Word> {
    dfa.check_set(&s)?;
    if s.is_empty() || s.is_full() {
        return Err(Error::ImproperSubset);
    }
    let k = dfa.alphabet_len();
    let base = s.len();
    let start = s.bits();
    let mut parents = ParentTable::new(dfa.n());
    parents.insert_if_new(start, 0, ROOT);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for a in 0..k {
            let t = dfa.preimage_mask(cur, a);
            if parents.insert_if_new(t, cur, a as u8) {
                if t.count_ones() as usize > base {
                    return Ok(Word::new(parents.letters_to_root(t)));
                }
                queue.push_back(t);
            }
        }
    }
    Err(Error::NotExtensible)
}

/// Backward BFS layers from `{q0}`, truncated at `max_depth` or at the layer
/// where the full set appears.
pub fn backward_level_profile(dfa: &Dfa, q0: usize, max_depth: usize) -> Result<LevelProfile> {
    check_size(dfa, DIRECT_INDEX_MAX_STATES)?;
    let n = dfa.n();
    let start = dfa.singleton(q0)?.bits();
    let full = full_mask(n);
    let k = dfa.alphabet_len();
    let mut visited = vec![0u64; (1usize << n).div_ceil(64)];
    visited[(start >> 6) as usize] |= 1 << (start & 63);
    let mut widths = vec![1usize];
    let mut depth_to_full = (start == full).then_some(0);
    let mut layer = vec![start];
    let mut depth = 0usize;
    while !layer.is_empty() && depth < max_depth && depth_to_full.is_none() {
        let mut next = Vec::new();
        for &s in &layer {
            for a in 0..k {
                let t = dfa.preimage_mask(s, a);
                let (slot, bit) = ((t >> 6) as usize, t & 63);
                if visited[slot] >> bit & 1 == 0 {
                    visited[slot] |= 1 << bit;
                    if t == full {
                        depth_to_full = Some(depth + 1);
                    }
                    next.push(t);
                }
            }
        }
        depth += 1;
        if !next.is_empty() {
            widths.push(next.len());
        }
        layer = next;
    }
    Ok(LevelProfile {
        q0,
        widths,
        depth_to_full,
    })
}
