//! Word-level checks: reset verification, suffix preimage chains, and the
//! straight / greedy properties that pin down shortest reset words.

use serde::Serialize;

use crate::automaton::{Dfa, StateSet, Word};
use crate::{Error, Result};

/// One row of a backward trace: the preimage of the traced singleton under
/// the suffix of length `suffix_len`, and the letters that extend it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub suffix_len: usize,
    pub subset: StateSet,
    pub extender_letters: Vec<usize>,
}

/// The full suffix-preimage chain of a word from a target state `q0`:
/// `rows[i].subset = {q0} · (suffix of length i)⁻¹` for `i = 0..=|w|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreimageChain {
    pub q0: usize,
    pub rows: Vec<TraceRow>,
}

/// Returns the unique target state when `w` maps all states to one, and
/// `None` otherwise.
pub fn verify_reset(dfa: &Dfa, w: &Word) -> Result<Option<usize>> {
    let image = dfa.apply_word(dfa.full_set()?, w)?;
    Ok(if image.len() == 1 {
        image.iter().next()
    } else {
        None
    })
}

/// Computes the suffix-preimage chain of `w` from `q0`, annotating each row
/// with the letters that extend it.
pub fn preimage_chain(dfa: &Dfa, w: &Word, q0: usize) -> Result<PreimageChain> {
    dfa.check_word(w)?;
    let k = dfa.alphabet_len();
    let mut subset = dfa.singleton(q0)?;
    let mut rows = Vec::with_capacity(w.len() + 1);
    let row = |suffix_len: usize, subset: StateSet| -> Result<TraceRow> {
        let mut extenders = Vec::new();
        for a in 0..k {
            if dfa.is_extensible(subset, a)? {
                extenders.push(a);
            }
        }
        Ok(TraceRow {
            suffix_len,
            subset,
            extender_letters: extenders,
        })
    };
    rows.push(row(0, subset)?);
    for (i, &a) in w.letters().iter().rev().enumerate() {
        subset = dfa.preimage(subset, a)?;
        rows.push(row(i + 1, subset)?);
    }
    Ok(PreimageChain { q0, rows })
}

/// Straightness: no suffix preimage is contained in a shorter-suffix
/// preimage. Containment includes equality, and the middle factor is
/// required nonempty, so the check runs over all pairs `i < j` of suffix
/// lengths.
pub fn is_straight(dfa: &Dfa, w: &Word, q0: usize) -> Result<bool> {
    let chain = preimage_chain(dfa, w, q0)?;
    let rows = &chain.rows;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if rows[j].subset.is_subset_of(&rows[i].subset) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Greediness: whenever the preimage of `{q0}` under a proper suffix is
/// extensible by some letter, the letter actually preceding that suffix in
/// `w` must extend it.
pub fn is_greedy(dfa: &Dfa, w: &Word, q0: usize) -> Result<bool> {
    let chain = preimage_chain(dfa, w, q0)?;
    for i in 0..w.len() {
        let row = &chain.rows[i];
        if !row.extender_letters.is_empty() {
            let preceding = w.letters()[w.len() - 1 - i];
            if !row.extender_letters.contains(&preceding) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// For words of involutory letters, checks the reversal law
/// `s · w⁻¹ = s · reverse(w)`. Errs if any letter of `w` is not involutory;
/// the result is always true and is exposed as a test oracle.
pub fn involutory_reversal_holds(dfa: &Dfa, s: StateSet, w: &Word) -> Result<bool> {
    dfa.check_word(w)?;
    for &a in w.letters() {
        if !dfa.classify_letter(a)?.involutory {
            return Err(Error::NonInvolutoryLetter(a));
        }
    }
    Ok(dfa.apply_word_inverse(s, w)? == dfa.apply_word(s, &w.reversed())?)
}

/// Presence of the factors that never occur in the series' expansion word,
/// plus the final letter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorReport {
    pub alpha_alpha: bool,
    pub beta_beta: bool,
    pub omega0_beta: bool,
    pub omega1_beta: bool,
    pub final_letter: Option<String>,
}

/// Scans `w` for the factors `aa`, `bb`, `w0 b`, `w1 b` and records the
/// final letter. The automaton must name letters `a`, `b`, `w0`, `w1`.
pub fn forbidden_factors(dfa: &Dfa, w: &Word) -> Result<FactorReport> {
    dfa.check_word(w)?;
    let resolve = |name: &str| {
        dfa.letter_index(name)
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    };
    let a = resolve("a")?;
    let b = resolve("b")?;
    let w0 = resolve("w0")?;
    let w1 = resolve("w1")?;
    let mut report = FactorReport {
        alpha_alpha: false,
        beta_beta: false,
        omega0_beta: false,
        omega1_beta: false,
        final_letter: None,
    };
    for pair in w.letters().windows(2) {
        let (x, y) = (pair[0], pair[1]);
        report.alpha_alpha |= x == a && y == a;
        report.beta_beta |= x == b && y == b;
        report.omega0_beta |= x == w0 && y == b;
        report.omega1_beta |= x == w1 && y == b;
    }
    if let Some(&last) = w.letters().last() {
        report.final_letter = Some(dfa.letter_name(last)?.to_string());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{self, LETTER_W0};

    fn a1() -> Dfa {
        series::eulerian(1).unwrap()
    }

    fn set(states: &[usize], n: usize) -> StateSet {
        StateSet::from_states(states.iter().copied(), n)
    }

    #[test]
    fn reset_verification() {
        let dfa = a1();
        let rw = series::reset_word(1).unwrap();
        assert_eq!(verify_reset(&dfa, &rw).unwrap(), Some(0));
        assert_eq!(verify_reset(&dfa, &Word::empty()).unwrap(), None);
        assert_eq!(
            verify_reset(&dfa, &Word::new(vec![LETTER_W0])).unwrap(),
            None
        );
    }

    #[test]
    fn chain_of_short_word() {
        let dfa = a1();
        let w = Word::parse("w0", &dfa).unwrap();
        let chain = preimage_chain(&dfa, &w, 0).unwrap();
        assert_eq!(chain.rows.len(), 2);
        assert_eq!(chain.rows[0].subset, set(&[0], 5));
        assert_eq!(chain.rows[1].subset, set(&[0, 1], 5));
        assert_eq!(chain.rows[0].extender_letters, vec![LETTER_W0]);
        assert_eq!(chain.rows[0].suffix_len, 0);
        assert_eq!(chain.rows[1].suffix_len, 1);
    }

    #[test]
    fn chain_of_mixed_word() {
        let dfa = a1();
        let w = Word::parse("a b a w0", &dfa).unwrap();
        let chain = preimage_chain(&dfa, &w, 0).unwrap();
        let subsets: Vec<_> = chain.rows.iter().map(|r| r.subset).collect();
        assert_eq!(
            subsets,
            vec![
                set(&[0], 5),
                set(&[0, 1], 5),
                set(&[3, 4], 5),
                set(&[2, 3], 5),
                set(&[1, 2], 5),
            ]
        );
    }

    #[test]
    fn chain_of_reset_word_hits_the_segment_families() {
        let dfa = a1();
        let rw = series::reset_word(1).unwrap();
        let chain = preimage_chain(&dfa, &rw, 0).unwrap();
        // after w0 and the length-4 stage: {0,1,2}
        assert_eq!(chain.rows[5].subset, set(&[0, 1, 2], 5));
        assert_eq!(chain.rows[11].subset, StateSet::full(5));
    }

    #[test]
    fn straightness() {
        let dfa = a1();
        let rw = series::reset_word(1).unwrap();
        assert!(is_straight(&dfa, &rw, 0).unwrap());
        let doubled = Word::parse("w0 w0", &dfa).unwrap();
        assert!(!is_straight(&dfa, &doubled, 0).unwrap());
        // a single letter whose preimage is bigger than the singleton
        let single = Word::parse("w0", &dfa).unwrap();
        assert!(is_straight(&dfa, &single, 0).unwrap());
    }

    #[test]
    fn greediness() {
        let dfa = a1();
        let rw = series::reset_word(1).unwrap();
        assert!(is_greedy(&dfa, &rw, 0).unwrap());
        let bad = Word::parse("w0 a b a w0", &dfa).unwrap();
        assert!(!is_greedy(&dfa, &bad, 0).unwrap());
        let single = Word::parse("w0", &dfa).unwrap();
        assert!(is_greedy(&dfa, &single, 0).unwrap());
    }

    #[test]
    fn reversal_law() {
        let dfa = a1();
        let w = Word::parse("a b b a", &dfa).unwrap();
        assert!(involutory_reversal_holds(&dfa, set(&[0, 2], 5), &w).unwrap());
        assert!(involutory_reversal_holds(&dfa, StateSet::empty(5), &w).unwrap());
        let with_w0 = Word::parse("a w0", &dfa).unwrap();
        assert!(matches!(
            involutory_reversal_holds(&dfa, set(&[1], 5), &with_w0),
            Err(Error::NonInvolutoryLetter(2))
        ));
    }

    #[test]
    fn chain_sizes_grow_only_at_extensible_unitary_steps() {
        // Along the constructed reset word, subset sizes never shrink and
        // increase exactly when a unitary letter hits an extensible subset;
        // the number of strict increases is n - 1.
        for m in 1..=3usize {
            let n = 4 * m + 1;
            let dfa = series::eulerian(m).unwrap();
            let word = series::reset_word(m).unwrap();
            let chain = preimage_chain(&dfa, &word, 0).unwrap();
            let mut increases = 0;
            for i in 1..chain.rows.len() {
                let prev = &chain.rows[i - 1];
                let cur = &chain.rows[i];
                assert!(cur.subset.len() >= prev.subset.len(), "m={m}, step {i}");
                let letter = word.letters()[word.len() - i];
                let grew = cur.subset.len() > prev.subset.len();
                let unitary_on_extensible = dfa.classify_letter(letter).unwrap().unitary
                    && prev.extender_letters.contains(&letter);
                assert_eq!(grew, unitary_on_extensible, "m={m}, step {i}");
                increases += grew as usize;
            }
            assert_eq!(increases, n - 1, "m={m}");
        }
    }

    #[test]
    fn factor_reports() {
        let dfa = a1();
        let w = series::expansion_word(1).unwrap();
        let report = forbidden_factors(&dfa, &w).unwrap();
        assert!(!report.alpha_alpha && !report.beta_beta);
        assert!(!report.omega0_beta && !report.omega1_beta);
        assert_eq!(report.final_letter.as_deref(), Some("a"));

        let bad = Word::parse("w0 b", &dfa).unwrap();
        assert!(forbidden_factors(&dfa, &bad).unwrap().omega0_beta);
        let aa = Word::parse("a a", &dfa).unwrap();
        assert!(forbidden_factors(&dfa, &aa).unwrap().alpha_alpha);
        assert_eq!(
            forbidden_factors(&dfa, &Word::empty())
                .unwrap()
                .final_letter,
            None
        );

        let cerny = series::cerny(3).unwrap();
        assert!(matches!(
            forbidden_factors(&cerny, &Word::empty()),
            Err(Error::UnknownLetter(_))
        ));
    }
}
