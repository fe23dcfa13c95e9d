//! Constructors for the automata series studied by this crate.
//!
//! The main family is a quaternary Eulerian series on `n = 4m+1` states whose
//! shortest reset words have length `(n²-3)/2`. Its alphabet is, in file
//! order: two involutions `a`, `b` acting as reflections of the cyclic state
//! set, and two unitary letters `w0 = (1→0)`, `w1 = (0→1)`. The Černý series
//! is provided as an independent cross-check oracle for the exact solvers.

use crate::automaton::{Dfa, StateSet, Word};
use crate::{Error, Result};

/// Letter indices of the quaternary series, in declared order.
pub const LETTER_A: usize = 0;
pub const LETTER_B: usize = 1;
pub const LETTER_W0: usize = 2;
pub const LETTER_W1: usize = 3;

/// Parameters of the quaternary Eulerian series: member index `m >= 1` and
/// derived state count `n = 4m + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesParams {
    pub m: usize,
    pub n: usize,
}

impl SeriesParams {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Parameter("series index m must be at least 1".into()));
        }
        Ok(SeriesParams { m, n: 4 * m + 1 })
    }
}

fn check_series_size(n: usize) -> Result<()> {
    if n < 5 || n % 4 != 1 {
        return Err(Error::Parameter(format!(
            "state count {n} is not of the form 4m+1 with m >= 1"
        )));
    }
    Ok(())
}

/// Builds the `m`-th member of the quaternary Eulerian series.
///
/// On `n = 4m+1` states, letter `a` maps `q` to `(-q-1) mod n`, letter `b`
/// maps `q` to `(-q+1) mod n`, `w0` moves only `1` to `0`, and `w1` moves
/// only `0` to `1`. The result is always Eulerian.
pub fn eulerian(m: usize) -> Result<Dfa> {
    let params = SeriesParams::new(m)?;
    let n = params.n;
    let delta = (0..n)
        .map(|q| {
            vec![
                (2 * n - q - 1) % n,        // a: (-q-1) mod n
                (2 * n - q + 1) % n,        // b: (-q+1) mod n
                if q == 1 { 0 } else { q }, // w0
                if q == 0 { 1 } else { q }, // w1
            ]
        })
        .collect();
    let dfa = Dfa::new(
        vec!["a".into(), "b".into(), "w0".into(), "w1".into()],
        delta,
    )?;
    debug_assert!(dfa.is_eulerian());
    Ok(dfa)
}

/// Builds the classic Černý automaton on `n >= 2` states.
///
/// Convention fixed here: letter `a` moves state 0 to state 1 and fixes the
/// rest; letter `b` is the cycle `q -> q+1 mod n`. Any convention with reset
/// threshold `(n-1)²` would do; this one is pinned for golden tests.
pub fn cerny(n: usize) -> Result<Dfa> {
    if n < 2 {
        return Err(Error::Parameter(
            "Černý automaton needs at least 2 states".into(),
        ));
    }
    let delta = (0..n)
        .map(|q| vec![if q == 0 { 1 } else { q }, (q + 1) % n])
        .collect();
    Dfa::new(vec!["a".into(), "b".into()], delta)
}

/// The odd-length alternating word `a (b a)^((i-1)/2)`.
///
/// It is a palindrome and acts as the reflection `q -> (-q-i) mod n`, hence
/// is involutory as a word.
pub fn reflection_word(i: usize) -> Result<Word> {
    if i == 0 || i.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "reflection word length must be odd and positive, got {i}"
        )));
    }
    let mut letters = Vec::with_capacity(i);
    letters.push(LETTER_A);
    for _ in 0..(i - 1) / 2 {
        letters.push(LETTER_B);
        letters.push(LETTER_A);
    }
    Ok(Word::new(letters))
}

/// The `j`-th stage of the reset-word construction, `2 <= j <= n-1`:
/// `w1` followed by the reflection of length `n-j` for even `j`, and
/// `w0` followed by the reflection of length `j-2` for odd `j`.
pub fn stage_word(n: usize, j: usize) -> Result<Word> {
    check_series_size(n)?;
    if j < 2 || j > n - 1 {
        return Err(Error::Parameter(format!(
            "stage index {j} outside 2..={}",
            n - 1
        )));
    }
    let (head, tail_len) = if j.is_multiple_of(2) {
        (LETTER_W1, n - j)
    } else {
        (LETTER_W0, j - 2)
    };
    let mut letters = vec![head];
    letters.extend_from_slice(reflection_word(tail_len)?.letters());
    Ok(Word::new(letters))
}

/// The full expansion word: stages `n-1` down to `2` joined by `b`. Its
/// inverse action grows `{0,1}` to the full state set; its length is
/// `(n²-5)/2`.
pub fn expansion_word(m: usize) -> Result<Word> {
    let params = SeriesParams::new(m)?;
    let n = params.n;
    let mut letters = Vec::with_capacity((n * n - 5) / 2);
    for j in (2..n).rev() {
        letters.extend_from_slice(stage_word(n, j)?.letters());
        if j > 2 {
            letters.push(LETTER_B);
        }
    }
    debug_assert_eq!(letters.len(), (n * n - 5) / 2);
    Ok(Word::new(letters))
}

/// The expansion word followed by `w0`: a shortest reset word of the `m`-th
/// series member, of length `(n²-3)/2`.
pub fn reset_word(m: usize) -> Result<Word> {
    let mut word = expansion_word(m)?;
    word.push(LETTER_W0);
    Ok(word)
}

/// The reset threshold `(n²-3)/2` of the `m`-th series member.
pub fn predicted_reset_threshold(m: usize) -> Result<usize> {
    let params = SeriesParams::new(m)?;
    Ok((params.n * params.n - 3) / 2)
}

/// The subset families the reset-word analysis walks through.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// The initial segment `{0, .., j-1}`.
    Segment,
    /// The segment mapped through letter `b`.
    MirroredSegment,
    /// The segment minus state 0, `{1, .., j-1}`.
    PuncturedSegment,
    /// The mirrored segment minus state 1.
    PuncturedMirror,
}

/// A named member of one of the four subset families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubsetFamily {
    pub kind: FamilyKind,
    pub j: usize,
    pub members: StateSet,
}

impl SubsetFamily {
    pub fn new(n: usize, kind: FamilyKind, j: usize) -> Result<Self> {
        Ok(SubsetFamily {
            kind,
            j,
            members: subset_family(n, kind, j)?,
        })
    }
}

/// The `j`-th member (`0 <= j <= n`) of a subset family over `n = 4m+1`
/// states.
pub fn subset_family(n: usize, kind: FamilyKind, j: usize) -> Result<StateSet> {
    check_series_size(n)?;
    if j > n {
        return Err(Error::Parameter(format!(
            "family index {j} outside 0..={n}"
        )));
    }
    let segment = StateSet::from_states(0..j, n);
    let mirror = || StateSet::from_states((0..j).map(|q| (2 * n - q + 1) % n), n);
    Ok(match kind {
        FamilyKind::Segment => segment,
        FamilyKind::MirroredSegment => mirror(),
        FamilyKind::PuncturedSegment => {
            let mut s = segment;
            s.remove(0);
            s
        }
        FamilyKind::PuncturedMirror => {
            let mut s = mirror();
            s.remove(1);
            s
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_member_table() {
        let dfa = eulerian(1).unwrap();
        assert_eq!(dfa.n(), 5);
        assert_eq!(dfa.letters(), &["a", "b", "w0", "w1"]);
        let rows = dfa.delta_rows();
        let col = |a: usize| rows.iter().map(|r| r[a]).collect::<Vec<_>>();
        assert_eq!(col(LETTER_A), vec![4, 3, 2, 1, 0]);
        assert_eq!(col(LETTER_B), vec![1, 0, 4, 3, 2]);
        assert_eq!(col(LETTER_W0), vec![0, 0, 2, 3, 4]);
        assert_eq!(col(LETTER_W1), vec![1, 1, 2, 3, 4]);
    }

    #[test]
    fn every_member_is_eulerian() {
        for m in 1..=6 {
            assert!(eulerian(m).unwrap().is_eulerian(), "m = {m}");
        }
        assert!(matches!(eulerian(0), Err(Error::Parameter(_))));
    }

    #[test]
    fn reflection_words() {
        let dfa = eulerian(1).unwrap();
        assert_eq!(reflection_word(1).unwrap().to_text(&dfa).unwrap(), "a");
        assert_eq!(reflection_word(3).unwrap().to_text(&dfa).unwrap(), "a b a");
        let t5 = reflection_word(5).unwrap();
        assert_eq!(t5.to_text(&dfa).unwrap(), "a b a b a");
        assert_eq!(t5.len(), 5);
        assert!(t5.is_palindrome());
        assert!(matches!(reflection_word(4), Err(Error::Parameter(_))));
        assert!(matches!(reflection_word(0), Err(Error::Parameter(_))));
    }

    #[test]
    fn stage_words_at_five_states() {
        let dfa = eulerian(1).unwrap();
        let text = |j: usize| stage_word(5, j).unwrap().to_text(&dfa).unwrap();
        assert_eq!(text(2), "w1 a b a");
        assert_eq!(text(3), "w0 a");
        assert_eq!(text(4), "w1 a");
        assert!(stage_word(5, 1).is_err());
        assert!(stage_word(5, 5).is_err());
        assert!(stage_word(6, 2).is_err());
    }

    #[test]
    fn expansion_and_reset_words() {
        let dfa = eulerian(1).unwrap();
        let w = expansion_word(1).unwrap();
        assert_eq!(w.to_text(&dfa).unwrap(), "w1 a b w0 a b w1 a b a");
        assert_eq!(w.len(), 10);
        assert_eq!(reset_word(1).unwrap().len(), 11);
        assert_eq!(reset_word(2).unwrap().len(), 39);
        for m in 1..=6 {
            let n = 4 * m + 1;
            assert_eq!(expansion_word(m).unwrap().len(), (n * n - 5) / 2);
            assert_eq!(
                reset_word(m).unwrap().len(),
                predicted_reset_threshold(m).unwrap()
            );
        }
    }

    #[test]
    fn predicted_thresholds() {
        assert_eq!(predicted_reset_threshold(1).unwrap(), 11);
        assert_eq!(predicted_reset_threshold(2).unwrap(), 39);
        assert_eq!(predicted_reset_threshold(3).unwrap(), 83);
    }

    #[test]
    fn families_at_five_states() {
        let s = |states: &[usize]| StateSet::from_states(states.iter().copied(), 5);
        assert_eq!(
            subset_family(5, FamilyKind::Segment, 3).unwrap(),
            s(&[0, 1, 2])
        );
        assert_eq!(
            subset_family(5, FamilyKind::MirroredSegment, 3).unwrap(),
            s(&[0, 1, 4])
        );
        assert_eq!(
            subset_family(5, FamilyKind::PuncturedSegment, 3).unwrap(),
            s(&[1, 2])
        );
        assert_eq!(
            subset_family(5, FamilyKind::PuncturedMirror, 3).unwrap(),
            s(&[0, 4])
        );
        assert_eq!(
            subset_family(5, FamilyKind::Segment, 0).unwrap(),
            StateSet::empty(5)
        );
        assert_eq!(
            subset_family(5, FamilyKind::Segment, 5).unwrap(),
            StateSet::full(5)
        );
        assert!(subset_family(5, FamilyKind::Segment, 6).is_err());
    }

    #[test]
    fn mirrored_family_matches_letter_action() {
        // MirroredSegment must equal the image of Segment under letter b,
        // and PuncturedMirror the image of PuncturedSegment.
        for m in [1usize, 2] {
            let dfa = eulerian(m).unwrap();
            let n = dfa.n();
            for j in 0..=n {
                let seg = subset_family(n, FamilyKind::Segment, j).unwrap();
                let mir = subset_family(n, FamilyKind::MirroredSegment, j).unwrap();
                assert_eq!(dfa.image(seg, LETTER_B).unwrap(), mir);
                let pseg = subset_family(n, FamilyKind::PuncturedSegment, j).unwrap();
                let pmir = subset_family(n, FamilyKind::PuncturedMirror, j).unwrap();
                assert_eq!(dfa.image(pseg, LETTER_B).unwrap(), pmir);
            }
        }
    }

    #[test]
    fn cerny_shape() {
        let dfa = cerny(4).unwrap();
        assert_eq!(
            dfa.delta_rows(),
            vec![vec![1, 1], vec![1, 2], vec![2, 3], vec![3, 0],]
        );
        assert!(cerny(1).is_err());
    }
}
