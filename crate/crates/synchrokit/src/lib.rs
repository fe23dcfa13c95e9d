//! Synchronization analysis for small complete DFAs.
//!
//! The crate is built around a bit-vector subset algebra: every state set is a
//! machine word, letter preimages are precomputed tables, and everything from
//! reset-threshold search to the exhaustive census is a breadth-first walk over
//! that algebra. The main entry points are:
//!
//! * [`automaton`]: [`Dfa`], [`StateSet`], [`Word`] and the forward/backward
//!   subset operations, plus the canonical JSON file format;
//! * [`words`]: checks on individual words: reset verification, preimage
//!   chains, straightness, greediness, factor reports;
//! * [`series`]: constructors for the extremal quaternary Eulerian series and
//!   the Černý series, together with their distinguished words and subsets;
//! * [`algorithms`]: exact subset-BFS searches: reset thresholds (forward and
//!   backward), shortest extending words, backward level profiles;
//! * [`census`]: exhaustive enumeration of small automata with in-degree and
//!   isomorphism reduction, parallel over search-tree shards.

pub mod algorithms;
pub mod automaton;
pub mod census;
pub mod series;
pub mod words;

pub use automaton::{Dfa, LetterProfile, StateSet, Word};

/// Largest state count supported by the bit-vector subset representation.
pub const MAX_SUBSET_STATES: usize = 64;

/// Largest state count for which reset-threshold searches use a
/// direct-indexed visited table (a hash table is used above, up to
/// [`MAX_SUBSET_STATES`]).
pub const DIRECT_INDEX_MAX_STATES: usize = 25;

/// Errors produced by construction, parsing, and search entry points.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("automaton must have at least one state")]
    NoStates,
    #[error("automaton must have at least one letter")]
    NoLetters,
    #[error("letter names must be nonempty and unique (offender: {0:?})")]
    BadLetterName(String),
    #[error("delta row {state} has {got} entries, expected {expected}")]
    BadRowLength {
        state: usize,
        got: usize,
        expected: usize,
    },
    #[error("delta has {rows} rows but the file declares n = {n}")]
    RowCountMismatch { rows: usize, n: usize },
    #[error("delta[{state}][{letter}] = {target} is outside 0..{n}")]
    TransitionOutOfRange {
        state: usize,
        letter: usize,
        target: usize,
        n: usize,
    },
    #[error("letter index {letter} is outside 0..{alphabet}")]
    InvalidLetter { letter: usize, alphabet: usize },
    #[error("state {state} is outside 0..{n}")]
    InvalidState { state: usize, n: usize },
    #[error("unknown letter name {0:?}")]
    UnknownLetter(String),
    #[error("state set over {set} states used with an automaton of {n} states")]
    UniverseMismatch { set: usize, n: usize },
    #[error("operation supports at most {max} states, automaton has {n}")]
    TooManyStates { n: usize, max: usize },
    #[error("automaton is not synchronizing")]
    NotSynchronizing,
    #[error("no word extends the given subset")]
    NotExtensible,
    #[error("subset must be a proper nonempty subset of the states")]
    ImproperSubset,
    #[error("word contains non-involutory letter index {0}")]
    NonInvolutoryLetter(usize),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("census would enumerate ~{estimate} tables, over the ceiling of {ceiling}")]
    BudgetExceeded { estimate: u128, ceiling: u128 },
    #[error("malformed DFA file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
