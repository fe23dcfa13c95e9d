//! Command-line surface of the synchrokit library.
//!
//! Every command prints exactly one JSON (or CSV) payload on stdout and a
//! one-line report on stderr (command name, input digest, elapsed time).
//! Exit codes: 0 success, 1 census bound violation, 2 input error,
//! 3 domain error.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use synchrokit::algorithms::{
    backward_level_profile, reset_threshold, reset_threshold_backward, shortest_extending_word,
};
use synchrokit::census::{census_run_with, CensusRecord, CensusSpec, DEFAULT_BUDGET};
use synchrokit::series;
use synchrokit::words::{forbidden_factors, is_greedy, is_straight, preimage_chain, verify_reset};
use synchrokit::{Dfa, Error, StateSet, Word};

#[derive(Parser)]
#[command(name = "synchrokit", version, about = "Synchronizing-automata toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact reset threshold of a DFA file, with an optional backward cross-check.
    Rt {
        path: PathBuf,
        /// Re-derive the threshold with the independent backward search.
        #[arg(long)]
        verify: bool,
    },
    /// Check whether a word resets the DFA and report its properties.
    VerifyWord {
        path: PathBuf,
        /// Whitespace-separated letter names (may be empty).
        word: String,
        /// Parse the word one character per letter instead.
        #[arg(long)]
        compact: bool,
    },
    /// Emit members of the built-in automata series.
    Series {
        #[command(subcommand)]
        series: SeriesCommand,
    },
    /// Shortest word extending a subset of states backwards.
    Extend {
        path: PathBuf,
        /// Comma-separated state list, e.g. `0,1`.
        #[arg(long)]
        subset: String,
    },
    /// Suffix preimage chain of a word from a target state.
    Trace {
        path: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        q0: usize,
        #[arg(long)]
        compact: bool,
    },
    /// Backward BFS layer widths from a singleton.
    Levels {
        path: PathBuf,
        #[arg(long)]
        q0: usize,
        /// Truncate the profile at this depth (default: run to the full set).
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Exhaustive census of small automata.
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Restrict to Eulerian automata.
        #[arg(long)]
        eulerian: bool,
        /// Visit one representative per isomorphism class.
        #[arg(long)]
        iso: bool,
        /// Reset-threshold bound to verify: an integer, or `auto` for the
        /// conjectured Eulerian bound.
        #[arg(long)]
        bound: Option<String>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        out: OutputFormat,
        /// Write the extremal witnesses as JSON DFA files into this directory.
        #[arg(long)]
        witness_dir: Option<PathBuf>,
        /// Ignore the enumeration budget ceiling.
        #[arg(long)]
        force: bool,
    },
    /// Structural report: Eulerian check and letter classification.
    Check { path: PathBuf },
}

#[derive(Subcommand)]
enum SeriesCommand {
    /// The quaternary Eulerian series member on 4m+1 states.
    Am {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = Emit::Dfa)]
        emit: Emit,
    },
    /// The Černý automaton on n states.
    Cerny {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Emit::Dfa)]
        emit: Emit,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Dfa,
    Word,
    Resetword,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

enum CliError {
    Lib(Error),
    Io(PathBuf, std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

fn exit_code(err: &CliError) -> u8 {
    match err {
        CliError::Io(..) => 2,
        CliError::Lib(e) => match e {
            Error::NotSynchronizing
            | Error::NotExtensible
            | Error::ImproperSubset
            | Error::NonInvolutoryLetter(_)
            | Error::TooManyStates { .. } => 3,
            _ => 2,
        },
    }
}

/// One executed command: the stdout payload plus stderr diagnostics.
struct CommandReport {
    command: &'static str,
    input_digest: Option<String>,
    payload: String,
    elapsed_ms: u128,
}

impl CommandReport {
    fn emit(self) -> ExitCode {
        self.emit_with_code(0)
    }

    fn emit_with_code(self, code: u8) -> ExitCode {
        println!("{}", self.payload);
        eprintln!(
            "{}: input sha256={} elapsed={}ms",
            self.command,
            self.input_digest.as_deref().unwrap_or("-"),
            self.elapsed_ms
        );
        ExitCode::from(code)
    }
}

struct LoadedDfa {
    dfa: Dfa,
    digest: String,
}

fn load_dfa(path: &Path) -> Result<LoadedDfa, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let digest = hex_digest(&bytes);
    let text = String::from_utf8_lossy(&bytes);
    let dfa = Dfa::from_json(&text)?;
    Ok(LoadedDfa { dfa, digest })
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn parse_word(text: &str, dfa: &Dfa, compact: bool) -> Result<Word, Error> {
    if compact {
        Word::parse_compact(text, dfa)
    } else {
        Word::parse(text, dfa)
    }
}

fn parse_subset(text: &str, dfa: &Dfa) -> Result<StateSet, Error> {
    let mut set = StateSet::empty(dfa.n());
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let q: usize = item
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("bad state index {item:?}")))?;
        if q >= dfa.n() {
            return Err(Error::InvalidState {
                state: q,
                n: dfa.n(),
            });
        }
        set.insert(q);
    }
    Ok(set)
}

fn set_to_json(s: &StateSet) -> Value {
    Value::from(s.iter().collect::<Vec<_>>())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    let started = Instant::now();
    match command {
        Command::Rt { path, verify } => {
            let loaded = load_dfa(&path)?;
            let rt = reset_threshold(&loaded.dfa)?;
            let verified = if verify {
                let backward = reset_threshold_backward(&loaded.dfa)?;
                Value::from(backward.threshold == rt.threshold)
            } else {
                Value::Null
            };
            let payload = json!({
                "threshold": rt.threshold,
                "word": rt.witness.to_text(&loaded.dfa)?,
                "q0": rt.q0,
                "verified": verified,
            });
            Ok(report("rt", Some(loaded.digest), payload.to_string(), started).emit())
        }
        Command::VerifyWord {
            path,
            word,
            compact,
        } => {
            let loaded = load_dfa(&path)?;
            let word = parse_word(&word, &loaded.dfa, compact)?;
            let reset_to = verify_reset(&loaded.dfa, &word)?;
            let (straight, greedy) = match reset_to {
                Some(q0) => (
                    is_straight(&loaded.dfa, &word, q0)?,
                    is_greedy(&loaded.dfa, &word, q0)?,
                ),
                None => (false, false),
            };
            // the factor report only exists for the quaternary letter names
            let factors = match forbidden_factors(&loaded.dfa, &word) {
                Ok(report) => serde_json::to_value(&report).expect("report serializes"),
                Err(Error::UnknownLetter(_)) => Value::Null,
                Err(e) => return Err(e.into()),
            };
            let payload = json!({
                "reset": reset_to.is_some(),
                "q0": reset_to,
                "length": word.len(),
                "straight": straight,
                "greedy": greedy,
                "factors": factors,
            });
            Ok(report(
                "verify-word",
                Some(loaded.digest),
                payload.to_string(),
                started,
            )
            .emit())
        }
        Command::Series { series } => {
            let (payload, command) = match series {
                SeriesCommand::Am { m, emit } => {
                    let dfa = series::eulerian(m)?;
                    let text = match emit {
                        Emit::Dfa => dfa.to_json(),
                        Emit::Word => series::expansion_word(m)?.to_text(&dfa)?,
                        Emit::Resetword => series::reset_word(m)?.to_text(&dfa)?,
                    };
                    (text, "series am")
                }
                SeriesCommand::Cerny { n, emit } => {
                    let dfa = series::cerny(n)?;
                    match emit {
                        Emit::Dfa => (dfa.to_json(), "series cerny"),
                        _ => return Err(Error::Parameter(
                            "the Černý series has no constructed word; emit the DFA and use `rt`"
                                .into(),
                        )
                        .into()),
                    }
                }
            };
            Ok(report(command, None, payload, started).emit())
        }
        Command::Extend { path, subset } => {
            let loaded = load_dfa(&path)?;
            let set = parse_subset(&subset, &loaded.dfa)?;
            let word = shortest_extending_word(&loaded.dfa, set)?;
            let payload = json!({
                "length": word.len(),
                "word": word.to_text(&loaded.dfa)?,
            });
            Ok(report("extend", Some(loaded.digest), payload.to_string(), started).emit())
        }
        Command::Trace {
            path,
            word,
            q0,
            compact,
        } => {
            let loaded = load_dfa(&path)?;
            let word = parse_word(&word, &loaded.dfa, compact)?;
            let chain = preimage_chain(&loaded.dfa, &word, q0)?;
            let rows: Vec<Value> = chain
                .rows
                .iter()
                .map(|row| {
                    let extenders: Vec<&str> = row
                        .extender_letters
                        .iter()
                        .map(|&a| loaded.dfa.letter_name(a).expect("letter from chain"))
                        .collect();
                    json!({
                        "suffix_len": row.suffix_len,
                        "subset": set_to_json(&row.subset),
                        "extenders": extenders,
                    })
                })
                .collect();
            let payload = json!({ "q0": chain.q0, "rows": rows });
            Ok(report("trace", Some(loaded.digest), payload.to_string(), started).emit())
        }
        Command::Levels {
            path,
            q0,
            max_depth,
        } => {
            let loaded = load_dfa(&path)?;
            let profile = backward_level_profile(&loaded.dfa, q0, max_depth.unwrap_or(usize::MAX))?;
            let payload = json!({
                "q0": profile.q0,
                "widths": profile.widths,
                "depth_to_full": profile.depth_to_full,
            });
            Ok(report("levels", Some(loaded.digest), payload.to_string(), started).emit())
        }
        Command::Census {
            n,
            k,
            eulerian,
            iso,
            bound,
            jobs,
            out,
            witness_dir,
            force,
        } => {
            let bound_to_check = match bound.as_deref() {
                None => None,
                Some("auto") => {
                    if n < 3 {
                        return Err(Error::Parameter(
                            "the conjectured bound applies to n >= 3".into(),
                        )
                        .into());
                    }
                    Some(if k == 2 {
                        (n * n - 5) / 2
                    } else {
                        (n * n - 3) / 2
                    })
                }
                Some(text) => Some(text.parse::<usize>().map_err(|_| {
                    Error::Parameter(format!(
                        "--bound expects an integer or `auto`, got {text:?}"
                    ))
                })?),
            };
            let spec = CensusSpec {
                n,
                k,
                eulerian_only: eulerian,
                up_to_iso: iso,
                bound_to_check,
            };
            let budget = if force { u128::MAX } else { budget_from_env()? };
            let record = census_run_with(&spec, budget, jobs.unwrap_or(0))?;
            if let Some(dir) = witness_dir {
                fs::create_dir_all(&dir).map_err(|e| CliError::Io(dir.clone(), e))?;
                for (i, witness) in record.witnesses.iter().enumerate() {
                    let path = dir.join(format!("witness_{i:03}.json"));
                    fs::write(&path, witness.to_json())
                        .map_err(|e| CliError::Io(path.clone(), e))?;
                }
            }
            let payload = match out {
                OutputFormat::Csv => census_csv(&record),
                OutputFormat::Json => census_json(&record).to_string(),
            };
            let violated = record.bound_holds == Some(false);
            let report = report("census", None, payload, started);
            Ok(report.emit_with_code(if violated { 1 } else { 0 }))
        }
        Command::Check { path } => {
            let loaded = load_dfa(&path)?;
            let classes: Vec<Value> = (0..loaded.dfa.alphabet_len())
                .map(|a| {
                    let profile = loaded.dfa.classify_letter(a)?;
                    Ok(json!({
                        "letter": loaded.dfa.letter_name(a)?,
                        "permutational": profile.permutational,
                        "involutory": profile.involutory,
                        "unitary": profile.unitary,
                        "moved": profile.moved_state.map(|(p, r)| vec![p, r]),
                    }))
                })
                .collect::<Result<_, Error>>()?;
            let payload = json!({
                "n": loaded.dfa.n(),
                "letters": loaded.dfa.letters(),
                "eulerian": loaded.dfa.is_eulerian(),
                "classes": classes,
            });
            Ok(report("check", Some(loaded.digest), payload.to_string(), started).emit())
        }
    }
}

fn report(
    command: &'static str,
    input_digest: Option<String>,
    payload: String,
    started: Instant,
) -> CommandReport {
    CommandReport {
        command,
        input_digest,
        payload,
        elapsed_ms: started.elapsed().as_millis(),
    }
}

fn budget_from_env() -> Result<u128, CliError> {
    match std::env::var("SYNCHROKIT_BUDGET") {
        Ok(text) => text.parse::<u128>().map_err(|_| {
            CliError::Lib(Error::Parameter(format!(
                "SYNCHROKIT_BUDGET must be an integer, got {text:?}"
            )))
        }),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn census_csv(record: &CensusRecord) -> String {
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    let holds = record
        .bound_holds
        .map(|b| b.to_string())
        .unwrap_or_default();
    format!(
        "n,k,total,synchronizing,max_rt,bound,bound_holds\n{},{},{},{},{},{},{}",
        record.spec.n,
        record.spec.k,
        record.total_enumerated,
        record.synchronizing_count,
        opt(record.max_rt),
        opt(record.spec.bound_to_check),
        holds
    )
}

fn census_json(record: &CensusRecord) -> Value {
    json!({
        "n": record.spec.n,
        "k": record.spec.k,
        "eulerian": record.spec.eulerian_only,
        "iso": record.spec.up_to_iso,
        "total": record.total_enumerated,
        "visited": record.visited,
        "synchronizing": record.synchronizing_count,
        "max_rt": record.max_rt,
        "bound": record.spec.bound_to_check,
        "bound_holds": record.bound_holds,
        "witness_classes": record.witnesses.len(),
    })
}
