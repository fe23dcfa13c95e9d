//! Complete deterministic automata and the subset algebra over them.
//!
//! States are `0..n`, letters are indices into an ordered list of names, and
//! subsets of states are single machine words ([`StateSet`]). A [`Dfa`]
//! precomputes, for every letter, the preimage mask of every state, because
//! preimages are the hot operation of every backward search in this crate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, MAX_SUBSET_STATES};

/// A subset of `0..universe` stored as a bit mask. `universe` is at most 64.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateSet {
    bits: u64,
    universe: usize,
}

impl StateSet {
    fn mask(universe: usize) -> u64 {
        if universe == 64 {
            u64::MAX
        } else {
            (1u64 << universe) - 1
        }
    }

    /// The empty subset of `0..universe`. Panics if `universe > 64`.
    pub fn empty(universe: usize) -> Self {
        assert!(
            universe <= MAX_SUBSET_STATES,
            "StateSet supports at most {MAX_SUBSET_STATES} states"
        );
        StateSet { bits: 0, universe }
    }

    /// The full set `{0, .., universe-1}`.
    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        s.bits = Self::mask(universe);
        s
    }

    /// The singleton `{q}`. Panics if `q >= universe`.
    pub fn singleton(q: usize, universe: usize) -> Self {
        let mut s = Self::empty(universe);
        assert!(q < universe, "state {q} outside universe {universe}");
        s.bits = 1 << q;
        s
    }

    pub fn from_states<I: IntoIterator<Item = usize>>(states: I, universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for q in states {
            assert!(q < universe, "state {q} outside universe {universe}");
            s.bits |= 1 << q;
        }
        s
    }

    /// Builds a set from a raw mask; bits beyond the universe are dropped.
    pub fn from_bits(bits: u64, universe: usize) -> Self {
        let mut s = Self::empty(universe);
        s.bits = bits & Self::mask(universe);
        s
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == Self::mask(self.universe)
    }

    pub fn contains(&self, q: usize) -> bool {
        q < self.universe && self.bits >> q & 1 == 1
    }

    pub fn insert(&mut self, q: usize) {
        assert!(q < self.universe, "state {q} outside universe");
        self.bits |= 1 << q;
    }

    pub fn remove(&mut self, q: usize) {
        if q < self.universe {
            self.bits &= !(1 << q);
        }
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        debug_assert_eq!(self.universe, other.universe);
        StateSet {
            bits: self.bits | other.bits,
            universe: self.universe,
        }
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        debug_assert_eq!(self.universe, other.universe);
        StateSet {
            bits: self.bits & other.bits,
            universe: self.universe,
        }
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        debug_assert_eq!(self.universe, other.universe);
        StateSet {
            bits: self.bits & !other.bits,
            universe: self.universe,
        }
    }

    pub fn is_subset_of(&self, other: &StateSet) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.bits & !other.bits == 0
    }

    /// States of the set in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        BitIter(self.bits)
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, q) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.universe)
    }
}

pub(crate) struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let q = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(q)
    }
}

/// A word over a DFA's alphabet, kept as letter indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<usize>,
}

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word { letters }
    }

    pub fn empty() -> Self {
        Word::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn push(&mut self, letter: usize) {
        self.letters.push(letter);
    }

    pub fn reversed(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().copied().collect(),
        }
    }

    pub fn is_palindrome(&self) -> bool {
        self.letters
            .iter()
            .zip(self.letters.iter().rev())
            .all(|(a, b)| a == b)
    }

    /// Parses a whitespace-separated sequence of letter names.
    pub fn parse(text: &str, dfa: &Dfa) -> Result<Word> {
        text.split_whitespace()
            .map(|name| {
                dfa.letter_index(name)
                    .ok_or_else(|| Error::UnknownLetter(name.to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word::new)
    }

    /// Parses a word written without separators, one character per letter.
    /// Only valid when every letter name is a single character.
    pub fn parse_compact(text: &str, dfa: &Dfa) -> Result<Word> {
        if let Some(long) = dfa.letters().iter().find(|name| name.chars().count() != 1) {
            return Err(Error::Parameter(format!(
                "compact words need single-character letter names, found {long:?}"
            )));
        }
        text.trim()
            .chars()
            .map(|c| {
                let name = c.to_string();
                dfa.letter_index(&name).ok_or(Error::UnknownLetter(name))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word::new)
    }

    /// Renders the word as whitespace-separated letter names of `dfa`.
    pub fn to_text(&self, dfa: &Dfa) -> Result<String> {
        let names = self
            .letters
            .iter()
            .map(|&a| dfa.letter_name(a))
            .collect::<Result<Vec<_>>>()?;
        Ok(names.join(" "))
    }
}

impl From<Vec<usize>> for Word {
    fn from(letters: Vec<usize>) -> Self {
        Word { letters }
    }
}

/// How a single letter acts on the state set.
///
/// `permutational`: the letter is a bijection on states. `involutory`:
/// applying it twice is the identity (this implies permutational).
/// `unitary`: exactly one state moves; `moved_state` then holds that state
/// and its target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LetterProfile {
    pub permutational: bool,
    pub involutory: bool,
    pub unitary: bool,
    pub moved_state: Option<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct DfaFile {
    n: usize,
    letters: Vec<String>,
    delta: Vec<Vec<usize>>,
}

/// A complete DFA: `n` states, an ordered alphabet, and a total transition
/// table. Immutable after construction; all operations are pure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    n: usize,
    letters: Vec<String>,
    /// Row-major table: `delta[q * k + a]`.
    delta: Vec<usize>,
    /// Per letter, per target state: the mask of states mapped onto it.
    /// `preimages[a * n + q] = { p : delta(p, a) = q }`. Empty when `n > 64`.
    preimages: Vec<u64>,
}

impl Dfa {
    /// Builds a DFA from the row-major table `delta[q][a]`.
    pub fn new(letters: Vec<String>, delta: Vec<Vec<usize>>) -> Result<Dfa> {
        let n = delta.len();
        if n == 0 {
            return Err(Error::NoStates);
        }
        let k = letters.len();
        if k == 0 {
            return Err(Error::NoLetters);
        }
        for (i, name) in letters.iter().enumerate() {
            if name.is_empty() || letters[..i].contains(name) {
                return Err(Error::BadLetterName(name.clone()));
            }
        }
        let mut flat = Vec::with_capacity(n * k);
        for (q, row) in delta.iter().enumerate() {
            if row.len() != k {
                return Err(Error::BadRowLength {
                    state: q,
                    got: row.len(),
                    expected: k,
                });
            }
            for (a, &target) in row.iter().enumerate() {
                if target >= n {
                    return Err(Error::TransitionOutOfRange {
                        state: q,
                        letter: a,
                        target,
                        n,
                    });
                }
                flat.push(target);
            }
        }
        let mut preimages = Vec::new();
        if n <= MAX_SUBSET_STATES {
            preimages = vec![0u64; k * n];
            for q in 0..n {
                for a in 0..k {
                    preimages[a * n + flat[q * k + a]] |= 1 << q;
                }
            }
        }
        Ok(Dfa {
            n,
            letters,
            delta: flat,
            preimages,
        })
    }

    /// Crate-internal fast path for the census: the generator guarantees
    /// every entry is below `n`, and `n <= 64`.
    pub(crate) fn from_flat_unchecked(letters: Vec<String>, n: usize, delta: Vec<usize>) -> Dfa {
        let k = letters.len();
        debug_assert_eq!(delta.len(), n * k);
        let mut preimages = vec![0u64; k * n];
        for q in 0..n {
            for a in 0..k {
                preimages[a * n + delta[q * k + a]] |= 1 << q;
            }
        }
        Dfa {
            n,
            letters,
            delta,
            preimages,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet_len(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn letter_name(&self, a: usize) -> Result<&str> {
        self.letters
            .get(a)
            .map(|s| s.as_str())
            .ok_or(Error::InvalidLetter {
                letter: a,
                alphabet: self.letters.len(),
            })
    }

    pub fn letter_index(&self, name: &str) -> Option<usize> {
        self.letters.iter().position(|l| l == name)
    }

    /// `delta(q, a)`; panics on out-of-range indices.
    pub fn step(&self, q: usize, a: usize) -> usize {
        self.delta[q * self.letters.len() + a]
    }

    /// The transition table as rows `delta[q][a]`.
    pub fn delta_rows(&self) -> Vec<Vec<usize>> {
        let k = self.letters.len();
        (0..self.n)
            .map(|q| self.delta[q * k..(q + 1) * k].to_vec())
            .collect()
    }

    pub(crate) fn delta_flat(&self) -> &[usize] {
        &self.delta
    }

    fn check_letter(&self, a: usize) -> Result<()> {
        if a >= self.letters.len() {
            return Err(Error::InvalidLetter {
                letter: a,
                alphabet: self.letters.len(),
            });
        }
        Ok(())
    }

    fn check_state(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::InvalidState {
                state: q,
                n: self.n,
            });
        }
        Ok(())
    }

    pub(crate) fn check_set(&self, s: &StateSet) -> Result<()> {
        if s.universe() != self.n {
            return Err(Error::UniverseMismatch {
                set: s.universe(),
                n: self.n,
            });
        }
        Ok(())
    }

    pub(crate) fn check_word(&self, w: &Word) -> Result<()> {
        for &a in w.letters() {
            self.check_letter(a)?;
        }
        Ok(())
    }

    /// Image of a raw subset mask under one letter. The caller guarantees
    /// `a < k` and `n <= 64`.
    #[inline]
    pub fn image_mask(&self, mask: u64, a: usize) -> u64 {
        let k = self.letters.len();
        let mut out = 0u64;
        let mut rest = mask;
        while rest != 0 {
            let q = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1 << self.delta[q * k + a];
        }
        out
    }

    /// Preimage of a raw subset mask under one letter, via the precomputed
    /// per-letter tables. The caller guarantees `a < k` and `n <= 64`.
    #[inline]
    pub fn preimage_mask(&self, mask: u64, a: usize) -> u64 {
        let base = a * self.n;
        let mut out = 0u64;
        let mut rest = mask;
        while rest != 0 {
            let q = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= self.preimages[base + q];
        }
        out
    }

    /// `{ delta(q, a) : q in s }`.
    pub fn image(&self, s: StateSet, a: usize) -> Result<StateSet> {
        self.check_letter(a)?;
        self.check_set(&s)?;
        Ok(StateSet::from_bits(self.image_mask(s.bits(), a), self.n))
    }

    /// `{ q : delta(q, a) in s }`. The empty set is a legal result.
    pub fn preimage(&self, s: StateSet, a: usize) -> Result<StateSet> {
        self.check_letter(a)?;
        self.check_set(&s)?;
        Ok(StateSet::from_bits(self.preimage_mask(s.bits(), a), self.n))
    }

    /// Applies the letters of `w` left to right: `s · w`.
    pub fn apply_word(&self, s: StateSet, w: &Word) -> Result<StateSet> {
        self.check_word(w)?;
        self.check_set(&s)?;
        let mut mask = s.bits();
        for &a in w.letters() {
            mask = self.image_mask(mask, a);
        }
        Ok(StateSet::from_bits(mask, self.n))
    }

    /// Inverse action `s · w⁻¹ = { q : q · w in s }`: preimages composed so
    /// that `s · (xv)⁻¹ = (s · v⁻¹) · x⁻¹`.
    pub fn apply_word_inverse(&self, s: StateSet, w: &Word) -> Result<StateSet> {
        self.check_word(w)?;
        self.check_set(&s)?;
        let mut mask = s.bits();
        for &a in w.letters().iter().rev() {
            mask = self.preimage_mask(mask, a);
        }
        Ok(StateSet::from_bits(mask, self.n))
    }

    /// Whether `a` strictly grows `s` backwards: `|s · a⁻¹| > |s|`.
    pub fn is_extensible(&self, s: StateSet, a: usize) -> Result<bool> {
        Ok(self.preimage(s, a)?.len() > s.len())
    }

    /// Classifies one letter as permutational / involutory / unitary.
    pub fn classify_letter(&self, a: usize) -> Result<LetterProfile> {
        self.check_letter(a)?;
        let k = self.letters.len();
        let mut seen = vec![false; self.n];
        let mut moved = None;
        let mut moved_count = 0usize;
        let mut involutory = true;
        for q in 0..self.n {
            let t = self.delta[q * k + a];
            seen[t] = true;
            if t != q {
                moved_count += 1;
                if moved.is_none() {
                    moved = Some((q, t));
                }
            }
            if self.delta[t * k + a] != q {
                involutory = false;
            }
        }
        let permutational = seen.iter().all(|&b| b);
        let unitary = moved_count == 1;
        Ok(LetterProfile {
            permutational,
            involutory,
            unitary,
            moved_state: if unitary { moved } else { None },
        })
    }

    /// True iff the underlying multidigraph is strongly connected and every
    /// state has in-degree (with multiplicity over letters) exactly `k`.
    pub fn is_eulerian(&self) -> bool {
        let k = self.letters.len();
        let mut indeg = vec![0usize; self.n];
        for q in 0..self.n {
            for a in 0..k {
                indeg[self.delta[q * k + a]] += 1;
            }
        }
        if indeg.iter().any(|&d| d != k) {
            return false;
        }
        self.is_strongly_connected()
    }

    /// Strong connectivity of the support digraph, decided by reachability
    /// from state 0 along the edges and along their reversal.
    pub fn is_strongly_connected(&self) -> bool {
        let k = self.letters.len();
        let mut fwd = vec![Vec::new(); self.n];
        let mut bwd = vec![Vec::new(); self.n];
        for (q, targets) in self.delta.chunks(k).enumerate() {
            for &t in targets {
                fwd[q].push(t);
                bwd[t].push(q);
            }
        }
        for adj in [&fwd, &bwd] {
            let mut seen = vec![false; self.n];
            let mut stack = vec![0usize];
            seen[0] = true;
            let mut count = 1;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        count += 1;
                        stack.push(v);
                    }
                }
            }
            if count != self.n {
                return false;
            }
        }
        true
    }

    /// The subset of all states, for seeding forward searches.
    pub fn full_set(&self) -> Result<StateSet> {
        if self.n > MAX_SUBSET_STATES {
            return Err(Error::TooManyStates {
                n: self.n,
                max: MAX_SUBSET_STATES,
            });
        }
        Ok(StateSet::full(self.n))
    }

    /// The singleton `{q}` over this automaton's states.
    pub fn singleton(&self, q: usize) -> Result<StateSet> {
        if self.n > MAX_SUBSET_STATES {
            return Err(Error::TooManyStates {
                n: self.n,
                max: MAX_SUBSET_STATES,
            });
        }
        self.check_state(q)?;
        Ok(StateSet::singleton(q, self.n))
    }

    /// Serializes to the canonical JSON file format: fixed field order
    /// (`n`, `letters`, `delta`), no extra whitespace.
    pub fn to_json(&self) -> String {
        let file = DfaFile {
            n: self.n,
            letters: self.letters.clone(),
            delta: self.delta_rows(),
        };
        serde_json::to_string(&file).expect("DFA serialization cannot fail")
    }

    /// Parses the JSON file format and validates all invariants.
    pub fn from_json(text: &str) -> Result<Dfa> {
        let file: DfaFile = serde_json::from_str(text)?;
        if file.delta.len() != file.n {
            return Err(Error::RowCountMismatch {
                rows: file.delta.len(),
                n: file.n,
            });
        }
        Dfa::new(file.letters, file.delta)
    }
}
