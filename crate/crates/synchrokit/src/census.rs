//! Exhaustive enumeration of small complete DFAs.
//!
//! In Eulerian mode, transition tables are generated letter-column by
//! letter-column with in-degree pruning (a state may never receive more than
//! `k` incoming edges), which collapses the raw `n^(nk)` space to the
//! multinomial family `(nk)!/(k!)^n`; strong connectivity is checked last.
//! Isomorphism reduction keeps exactly the tables that equal their canonical
//! form under all state and letter relabelings.
//!
//! A census is parallelized by partitioning the search tree on a fixed-depth
//! prefix of the first letter's column. Shards are independent and the
//! aggregation (sums, max, set union of canonical witnesses) is associative
//! and commutative, so the outcome is identical for any worker count,
//! including the sequential fallback used when the `parallel` feature is off.

use std::collections::BTreeSet;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::algorithms::reset_threshold;
use crate::automaton::{BitIter, Dfa};
use crate::{Error, Result};

/// Default ceiling on the number of tables a census may enumerate.
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

/// Largest state/letter count for which canonical forms are computed by the
/// factorial relabeling scan.
pub const CANONICAL_MAX: usize = 8;

const SHARD_PREFIX_DEPTH: usize = 3;

/// What to enumerate and what to check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusSpec {
    pub n: usize,
    pub k: usize,
    /// Restrict to Eulerian automata (in-degree `k` everywhere, strongly
    /// connected). When false, every complete table is visited.
    pub eulerian_only: bool,
    /// Visit exactly one representative per isomorphism class (state and
    /// letter relabelings).
    pub up_to_iso: bool,
    /// Upper bound to verify against the maximal reset threshold.
    pub bound_to_check: Option<usize>,
}

/// Aggregate outcome of a census run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusRecord {
    pub spec: CensusSpec,
    /// Tables generated before the strong-connectivity and isomorphism
    /// filters (all in-degree-valid tables in Eulerian mode).
    pub total_enumerated: u64,
    /// Tables that passed every filter and were examined.
    pub visited: u64,
    pub synchronizing_count: u64,
    pub max_rt: Option<usize>,
    /// Canonical forms of the automata attaining `max_rt`.
    pub witnesses: Vec<Dfa>,
    pub bound_holds: Option<bool>,
}

/// Counts reported by [`enumerate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationStats {
    pub generated: u64,
    pub visited: u64,
}

/// Number of tables the generator will produce for this shape:
/// `(nk)!/(k!)^n` in Eulerian mode (computed as a product of binomials),
/// `n^(nk)` otherwise. Saturates at `u128::MAX`.
pub fn estimated_tables(n: usize, k: usize, eulerian_only: bool) -> u128 {
    if n == 0 || k == 0 {
        return 0;
    }
    if eulerian_only {
        let mut total: u128 = 1;
        for i in 1..=n {
            total = total.saturating_mul(binomial(i * k, k));
        }
        total
    } else {
        let exp = match u32::try_from(n * k) {
            Ok(e) => e,
            Err(_) => return u128::MAX,
        };
        if n == 1 {
            1
        } else {
            (n as u128).checked_pow(exp).unwrap_or(u128::MAX)
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = match acc.checked_mul((n - k + i) as u128) {
            Some(v) => v / i as u128,
            None => return u128::MAX,
        };
    }
    acc
}

fn letter_names(k: usize) -> Vec<String> {
    (0..k)
        .map(|a| ((b'a' + a as u8) as char).to_string())
        .collect()
}

fn validate(spec: &CensusSpec) -> Result<()> {
    if spec.n == 0 {
        return Err(Error::NoStates);
    }
    if spec.k == 0 {
        return Err(Error::NoLetters);
    }
    if spec.n > CANONICAL_MAX || spec.k > CANONICAL_MAX {
        return Err(Error::Parameter(format!(
            "census supports at most {CANONICAL_MAX} states and {CANONICAL_MAX} letters, got n={}, k={}",
            spec.n, spec.k
        )));
    }
    Ok(())
}

fn check_budget(spec: &CensusSpec, budget: u128) -> Result<()> {
    let estimate = estimated_tables(spec.n, spec.k, spec.eulerian_only);
    if estimate > budget {
        return Err(Error::BudgetExceeded {
            estimate,
            ceiling: budget,
        });
    }
    Ok(())
}

/// All simple permutations of `0..len`, in lexicographic order.
fn permutations_of(len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    let mut used = vec![false; len];
    fn rec(len: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        for v in 0..len {
            if !used[v] {
                used[v] = true;
                current.push(v);
                rec(len, current, used, out);
                current.pop();
                used[v] = false;
            }
        }
    }
    rec(len, &mut current, &mut used, &mut out);
    out
}

struct RelabelScan {
    state_perms: Vec<Vec<usize>>,
    letter_perms: Vec<Vec<usize>>,
}

impl RelabelScan {
    fn new(n: usize, k: usize) -> RelabelScan {
        RelabelScan {
            state_perms: permutations_of(n),
            letter_perms: permutations_of(k),
        }
    }

    fn fill(
        &self,
        n: usize,
        k: usize,
        flat: &[usize],
        sp: &[usize],
        lp: &[usize],
        out: &mut [usize],
    ) {
        for q in 0..n {
            for a in 0..k {
                out[sp[q] * k + lp[a]] = sp[flat[q * k + a]];
            }
        }
    }

    /// Lexicographically minimal relabeling of a row-major table.
    fn canonical(&self, n: usize, k: usize, flat: &[usize]) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        let mut scratch = vec![0usize; n * k];
        for sp in &self.state_perms {
            for lp in &self.letter_perms {
                self.fill(n, k, flat, sp, lp, &mut scratch);
                if best.as_ref().is_none_or(|b| scratch < *b) {
                    best = Some(scratch.clone());
                }
            }
        }
        best.expect("at least the identity relabeling exists")
    }

    /// Whether no relabeling is lexicographically smaller than the table
    /// itself, i.e. the table is its class representative.
    fn is_canonical(&self, n: usize, k: usize, flat: &[usize], scratch: &mut [usize]) -> bool {
        for sp in &self.state_perms {
            for lp in &self.letter_perms {
                self.fill(n, k, flat, sp, lp, scratch);
                if &*scratch < flat {
                    return false;
                }
            }
        }
        true
    }
}

/// Lexicographically minimal flattened (row-major) transition table over all
/// state and letter relabelings. Isomorphic inputs yield identical outputs.
pub fn canonical_form(dfa: &Dfa) -> Result<Vec<usize>> {
    let (n, k) = (dfa.n(), dfa.alphabet_len());
    if n > CANONICAL_MAX {
        return Err(Error::TooManyStates {
            n,
            max: CANONICAL_MAX,
        });
    }
    if k > CANONICAL_MAX {
        return Err(Error::Parameter(format!(
            "canonical form supports at most {CANONICAL_MAX} letters, got {k}"
        )));
    }
    Ok(RelabelScan::new(n, k).canonical(n, k, dfa.delta_flat()))
}

/// Applies a state and a letter permutation to the transition structure:
/// `new_delta[sp[q]][lp[a]] = sp[delta[q][a]]`. Letter names stay positional.
pub fn relabel(dfa: &Dfa, state_perm: &[usize], letter_perm: &[usize]) -> Result<Dfa> {
    let (n, k) = (dfa.n(), dfa.alphabet_len());
    let valid = |perm: &[usize], len: usize| {
        perm.len() == len && {
            let mut seen = vec![false; len];
            perm.iter()
                .all(|&v| v < len && !std::mem::replace(&mut seen[v], true))
        }
    };
    if !valid(state_perm, n) || !valid(letter_perm, k) {
        return Err(Error::Parameter(
            "relabeling requires permutations of the states and letters".into(),
        ));
    }
    let mut rows = vec![vec![0usize; k]; n];
    for q in 0..n {
        for a in 0..k {
            rows[state_perm[q]][letter_perm[a]] = state_perm[dfa.step(q, a)];
        }
    }
    Dfa::new(dfa.letters().to_vec(), rows)
}

/// Strong connectivity of the support digraph of a column-major table.
fn strongly_connected_cols(n: usize, k: usize, cols: &[usize]) -> bool {
    let mut fwd = vec![0u64; n];
    let mut bwd = vec![0u64; n];
    for a in 0..k {
        for q in 0..n {
            let t = cols[a * n + q];
            fwd[q] |= 1 << t;
            bwd[t] |= 1 << q;
        }
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    for adj in [&fwd, &bwd] {
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0u64;
            for q in BitIter(frontier) {
                next |= adj[q];
            }
            frontier = next & !seen;
            seen |= next;
        }
        if seen != full {
            return false;
        }
    }
    true
}

/// Cell-by-cell table filler. Cells are ordered column-major (letter column
/// by letter column): cell `i` is `delta(i mod n, i div n)`. In Eulerian
/// mode, assignments that push any in-degree past `k` are pruned.
struct TableFiller {
    n: usize,
    k: usize,
    eulerian: bool,
    cols: Vec<usize>,
    indeg: Vec<usize>,
    count: u64,
}

impl TableFiller {
    fn seeded(n: usize, k: usize, eulerian: bool, prefix: &[usize]) -> Option<TableFiller> {
        let mut cols = vec![0usize; n * k];
        let mut indeg = vec![0usize; n];
        for (i, &t) in prefix.iter().enumerate() {
            cols[i] = t;
            indeg[t] += 1;
        }
        if eulerian && indeg.iter().any(|&d| d > k) {
            return None;
        }
        Some(TableFiller {
            n,
            k,
            eulerian,
            cols,
            indeg,
            count: 0,
        })
    }

    fn fill_from(&mut self, idx: usize, emit: &mut dyn FnMut(&[usize])) {
        if idx == self.cols.len() {
            self.count += 1;
            emit(&self.cols);
            return;
        }
        for t in 0..self.n {
            if self.eulerian && self.indeg[t] == self.k {
                continue;
            }
            self.cols[idx] = t;
            self.indeg[t] += 1;
            self.fill_from(idx + 1, emit);
            self.indeg[t] -= 1;
        }
    }
}

/// Emits every completion of `prefix`, pruning in-degrees in Eulerian mode.
/// Returns the number of complete tables emitted.
fn complete_tables(
    n: usize,
    k: usize,
    eulerian: bool,
    prefix: &[usize],
    emit: &mut dyn FnMut(&[usize]),
) -> u64 {
    match TableFiller::seeded(n, k, eulerian, prefix) {
        Some(mut filler) => {
            filler.fill_from(prefix.len(), emit);
            filler.count
        }
        None => 0,
    }
}

/// Prefix assignments of the first letter's column that partition the search
/// tree into independent shards.
fn shard_prefixes(n: usize, k: usize, eulerian: bool) -> Vec<Vec<usize>> {
    let depth = n.min(SHARD_PREFIX_DEPTH);
    let mut shards = Vec::new();
    let mut stack = vec![Vec::new()];
    let mut indeg = vec![0usize; n];
    // iterative DFS over partial prefixes, emitting at the target depth
    while let Some(prefix) = stack.pop() {
        if prefix.len() == depth {
            shards.push(prefix);
            continue;
        }
        indeg.fill(0);
        for &t in &prefix {
            indeg[t] += 1;
        }
        for t in (0..n).rev() {
            if eulerian && indeg[t] == k {
                continue;
            }
            let mut next = prefix.clone();
            next.push(t);
            stack.push(next);
        }
    }
    shards
}

#[derive(Default)]
struct Tally {
    generated: u64,
    visited: u64,
    synchronizing: u64,
    max_rt: Option<usize>,
    witnesses: BTreeSet<Vec<usize>>,
}

impl Tally {
    /// Records one synchronizing automaton; the canonical form is computed
    /// only when the threshold ties or beats the current maximum.
    fn absorb(&mut self, threshold: usize, canonical: impl FnOnce() -> Vec<usize>) {
        self.synchronizing += 1;
        match self.max_rt {
            Some(best) if threshold < best => {}
            Some(best) if threshold == best => {
                self.witnesses.insert(canonical());
            }
            _ => {
                self.max_rt = Some(threshold);
                self.witnesses = BTreeSet::from([canonical()]);
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.generated += other.generated;
        self.visited += other.visited;
        self.synchronizing += other.synchronizing;
        match (self.max_rt, other.max_rt) {
            (_, None) => {}
            (None, Some(_)) => {
                self.max_rt = other.max_rt;
                self.witnesses = other.witnesses;
            }
            (Some(a), Some(b)) => {
                if b > a {
                    self.max_rt = other.max_rt;
                    self.witnesses = other.witnesses;
                } else if b == a {
                    self.witnesses.extend(other.witnesses);
                }
            }
        }
        self
    }
}

/// Shared per-run context; immutable while shards execute.
struct RunContext {
    spec: CensusSpec,
    scan: RelabelScan,
    names: Vec<String>,
    eulerian_rt_bound: usize,
}

fn run_shard(ctx: &RunContext, prefix: &[usize]) -> Tally {
    let CensusSpec {
        n,
        k,
        eulerian_only,
        up_to_iso,
        ..
    } = ctx.spec;
    let mut tally = Tally::default();
    let mut rowflat = vec![0usize; n * k];
    let mut scratch = vec![0usize; n * k];
    tally.generated = complete_tables(n, k, eulerian_only, prefix, &mut |cols| {
        if eulerian_only && !strongly_connected_cols(n, k, cols) {
            return;
        }
        for a in 0..k {
            for q in 0..n {
                rowflat[q * k + a] = cols[a * n + q];
            }
        }
        if up_to_iso && !ctx.scan.is_canonical(n, k, &rowflat, &mut scratch) {
            return;
        }
        tally.visited += 1;
        let dfa = Dfa::from_flat_unchecked(ctx.names.clone(), n, rowflat.clone());
        match reset_threshold(&dfa) {
            Ok(rt) => {
                // every Eulerian synchronizing automaton obeys the
                // (n-1)(n-2)+1 bound; a violation is an implementation bug
                assert!(
                    !eulerian_only || rt.threshold <= ctx.eulerian_rt_bound,
                    "reset threshold {} above {} on an Eulerian automaton",
                    rt.threshold,
                    ctx.eulerian_rt_bound
                );
                tally.absorb(rt.threshold, || ctx.scan.canonical(n, k, &rowflat));
            }
            Err(Error::NotSynchronizing) => {}
            Err(e) => panic!("census reset-threshold search failed: {e}"),
        }
    });
    tally
}

#[cfg(feature = "parallel")]
fn run_shards(ctx: &RunContext, shards: &[Vec<usize>], jobs: usize) -> Result<Tally> {
    let run = || {
        shards
            .par_iter()
            .map(|prefix| run_shard(ctx, prefix))
            .reduce(Tally::default, Tally::merge)
    };
    if jobs == 0 {
        Ok(run())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Parameter(format!("cannot build thread pool: {e}")))?;
        Ok(pool.install(run))
    }
}

#[cfg(not(feature = "parallel"))]
fn run_shards(ctx: &RunContext, shards: &[Vec<usize>], _jobs: usize) -> Result<Tally> {
    Ok(shards
        .iter()
        .map(|prefix| run_shard(ctx, prefix))
        .fold(Tally::default(), Tally::merge))
}

fn record_from(spec: &CensusSpec, tally: Tally) -> CensusRecord {
    let witnesses = tally
        .witnesses
        .into_iter()
        .map(|flat| Dfa::from_flat_unchecked(letter_names(spec.k), spec.n, flat))
        .collect();
    let bound_holds = spec
        .bound_to_check
        .map(|bound| tally.max_rt.is_none_or(|rt| rt <= bound));
    CensusRecord {
        spec: spec.clone(),
        total_enumerated: tally.generated,
        visited: tally.visited,
        synchronizing_count: tally.synchronizing,
        max_rt: tally.max_rt,
        witnesses,
        bound_holds,
    }
}

/// Runs a census with the default budget and parallelism.
pub fn census_run(spec: &CensusSpec) -> Result<CensusRecord> {
    census_run_with(spec, DEFAULT_BUDGET, 0)
}

/// Runs a census with an explicit table budget and worker count
/// (`jobs = 0` uses the default thread pool; without the `parallel` feature
/// the shard loop is sequential regardless).
pub fn census_run_with(spec: &CensusSpec, budget: u128, jobs: usize) -> Result<CensusRecord> {
    validate(spec)?;
    check_budget(spec, budget)?;
    let ctx = RunContext {
        spec: spec.clone(),
        scan: RelabelScan::new(spec.n, spec.k),
        names: letter_names(spec.k),
        eulerian_rt_bound: (spec.n.max(2) - 1) * (spec.n.max(2) - 2) + 1,
    };
    let shards = shard_prefixes(spec.n, spec.k, spec.eulerian_only);
    let tally = run_shards(&ctx, &shards, jobs)?;
    Ok(record_from(spec, tally))
}

/// Always-sequential census run, kept alongside the parallel path for
/// benchmarking and determinism checks.
pub fn census_run_serial(spec: &CensusSpec, budget: u128) -> Result<CensusRecord> {
    validate(spec)?;
    check_budget(spec, budget)?;
    let ctx = RunContext {
        spec: spec.clone(),
        scan: RelabelScan::new(spec.n, spec.k),
        names: letter_names(spec.k),
        eulerian_rt_bound: (spec.n.max(2) - 1) * (spec.n.max(2) - 2) + 1,
    };
    let shards = shard_prefixes(spec.n, spec.k, spec.eulerian_only);
    let tally = shards
        .iter()
        .map(|prefix| run_shard(&ctx, prefix))
        .fold(Tally::default(), Tally::merge);
    Ok(record_from(spec, tally))
}

/// Sequentially visits every automaton selected by `spec` (strong
/// connectivity and in-degree filters in Eulerian mode, one representative
/// per class when `up_to_iso`), with the default budget.
pub fn enumerate<F: FnMut(&Dfa)>(spec: &CensusSpec, visitor: F) -> Result<EnumerationStats> {
    enumerate_with(spec, DEFAULT_BUDGET, visitor)
}

/// [`enumerate`] with an explicit budget ceiling.
pub fn enumerate_with<F: FnMut(&Dfa)>(
    spec: &CensusSpec,
    budget: u128,
    mut visitor: F,
) -> Result<EnumerationStats> {
    validate(spec)?;
    check_budget(spec, budget)?;
    let CensusSpec {
        n,
        k,
        eulerian_only,
        up_to_iso,
        ..
    } = *spec;
    let scan = RelabelScan::new(n, k);
    let names = letter_names(k);
    let mut rowflat = vec![0usize; n * k];
    let mut scratch = vec![0usize; n * k];
    let mut visited = 0u64;
    let generated = complete_tables(n, k, eulerian_only, &[], &mut |cols| {
        if eulerian_only && !strongly_connected_cols(n, k, cols) {
            return;
        }
        for a in 0..k {
            for q in 0..n {
                rowflat[q * k + a] = cols[a * n + q];
            }
        }
        if up_to_iso && !scan.is_canonical(n, k, &rowflat, &mut scratch) {
            return;
        }
        visited += 1;
        visitor(&Dfa::from_flat_unchecked(names.clone(), n, rowflat.clone()));
    });
    Ok(EnumerationStats { generated, visited })
}

/// Checks the conjectured reset-threshold bound for Eulerian automata:
/// `floor((n²-3)/2)`, improved to `floor((n²-5)/2)` for binary alphabets.
/// The bound is stated for `n >= 3`. Eulerian mode is forced.
pub fn verify_conjecture(spec: &CensusSpec) -> Result<CensusRecord> {
    if spec.n < 3 {
        return Err(Error::Parameter(format!(
            "the conjectured bound applies to n >= 3, got n = {}",
            spec.n
        )));
    }
    let bound = if spec.k == 2 {
        (spec.n * spec.n - 5) / 2
    } else {
        (spec.n * spec.n - 3) / 2
    };
    let derived = CensusSpec {
        eulerian_only: true,
        bound_to_check: Some(bound),
        ..spec.clone()
    };
    census_run(&derived)
}
