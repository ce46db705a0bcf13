//! `synchro`: batch front end for random-automaton synchronization.
//!
//! JSON goes to standard output (or `--out`), diagnostics to standard error.
//! Exit codes: 0 success, 1 domain failure, 2 usage error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use synchro_core::experiments::{exact_small_n, run_experiment, ExperimentSpec, Metric, Sampling};
use synchro_core::fast::{fast_decide, BudgetPolicy};
use synchro_core::funcgraph::analyze_letter;
use synchro_core::sync::{decide_exact, enumerate_all, greedy_reset_word, shortest_reset_word};
use synchro_core::{Dfa, Error, Rng};

#[derive(Parser)]
#[command(name = "synchro", version, about = "Synchronization of random complete automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate uniform random automata, one JSON document per line.
    Gen {
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'k', default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose the functional graph of each letter (or of one letter).
    Analyze {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        letter: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide synchronizability and print a certified verdict.
    Decide {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Use the budgeted pipeline instead of the exact decider.
        #[arg(long)]
        fast: bool,
        /// Multiplier applied to every budget of the fast pipeline.
        #[arg(long, default_value_t = 1.0)]
        budget_scale: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a reset word as an array of letter indices.
    Reset {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Minimum-length word by subset search (n <= 16).
        #[arg(long)]
        shortest: bool,
        /// Print null instead of failing on a non-synchronizing input.
        #[arg(long)]
        allow_none: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count over every automaton with the given dimensions.
    Enumerate {
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'k', default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Stat::All)]
        stat: Stat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo experiment.
    Experiment {
        #[arg(long)]
        metric: String,
        /// Comma-separated, strictly increasing state counts.
        #[arg(long, value_delimiter = ',', required = true)]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Enumerate every automaton instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 1.0)]
        budget_scale: f64,
        /// Output file; `.csv` selects CSV, anything else JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Stat {
    Sync,
    DisconnectedOne,
    All,
}

enum Failure {
    Domain(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_dfa(input: Option<&Path>) -> CliResult<Dfa> {
    let text = match input {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("--in {}: {e}", path.display())))?,
        None => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    Ok(Dfa::from_json(&text)?)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("--out {}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn budget(scale: f64) -> CliResult<BudgetPolicy> {
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Failure::Usage(format!("--budget-scale must be a finite non-negative number, got {scale}")));
    }
    Ok(BudgetPolicy::default().scaled(scale))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen { n, k, seed, count, out } => {
            let mut rng = Rng::new(seed);
            let mut text = String::new();
            for _ in 0..count {
                text.push_str(&Dfa::random(n, k, &mut rng)?.to_json());
                text.push('\n');
            }
            emit(out.as_deref(), &text)
        }
        Command::Analyze { input, letter, out } => {
            let d = read_dfa(input.as_deref())?;
            let letters: Vec<usize> = match letter {
                Some(x) => vec![x],
                None => (0..d.k()).collect(),
            };
            let summaries = letters
                .into_iter()
                .map(|x| analyze_letter(&d, x).map(|lg| lg.summary()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Usage(format!("--letter: {e}")))?;
            let value = json!({ "n": d.n(), "k": d.k(), "letters": summaries });
            emit(out.as_deref(), &format!("{value}\n"))
        }
        Command::Decide { input, fast, budget_scale, out } => {
            let policy = budget(budget_scale)?;
            let d = read_dfa(input.as_deref())?;
            let verdict = if fast { fast_decide(&d, policy)? } else { decide_exact(&d)? };
            log::info!("{} via {:?}, {} steps", verdict.synchronizing, verdict.method, verdict.diagnostics.steps);
            emit(out.as_deref(), &format!("{}\n", verdict.to_json()))
        }
        Command::Reset { input, shortest, allow_none, out } => {
            let d = read_dfa(input.as_deref())?;
            let word = if shortest {
                shortest_reset_word(&d).map_err(|e| Failure::Usage(format!("--shortest: {e}")))?
            } else {
                greedy_reset_word(&d)?
            };
            match word {
                Some(w) => emit(out.as_deref(), &format!("{}\n", json!(w))),
                None if allow_none => emit(out.as_deref(), "null\n"),
                None => Err(Failure::Domain("not synchronizing".into())),
            }
        }
        Command::Enumerate { n, k, stat, out } => {
            let value = match stat {
                Stat::All => serde_json::to_value(exact_small_n(n, k)?).expect("table serializes"),
                Stat::Sync => {
                    let mut sync = 0u64;
                    let mut failure = None;
                    let s = enumerate_all(n, k, |d| match decide_exact(d) {
                        Ok(v) => sync += u64::from(v.synchronizing),
                        Err(e) => failure = Some(e),
                    })?;
                    if let Some(e) = failure {
                        return Err(e.into());
                    }
                    json!({ "n": n, "k": k, "total": s.automata, "synchronizing": sync })
                }
                Stat::DisconnectedOne => {
                    let mut hits = 0u64;
                    let s = enumerate_all(n, k, |d| {
                        hits += u64::from(synchro_core::automaton::has_exactly_one_disconnected_state(d))
                    })?;
                    json!({ "n": n, "k": k, "total": s.automata, "one_disconnected": hits })
                }
            };
            emit(out.as_deref(), &format!("{value}\n"))
        }
        Command::Experiment { metric, n_grid, samples, seed, k, workers, exhaustive, budget_scale, out } => {
            let metric: Metric = metric.parse().map_err(|e: Error| Failure::Usage(format!("--metric: {e}")))?;
            let mut spec = ExperimentSpec::new(metric, n_grid, samples, seed);
            spec.k = k;
            spec.workers = workers;
            spec.params.budget = budget(budget_scale)?;
            if exhaustive {
                spec.sampling = Sampling::Exhaustive;
            }
            spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let report = run_experiment(&spec)?;
            log::info!("{} finished in {:.2} s", metric.name(), report.wall_time_s);
            if let Some(e) = &report.error {
                log::error!("run aborted: {e}");
            }
            let csv = out.as_deref().and_then(Path::extension).is_some_and(|ext| ext.eq_ignore_ascii_case("csv"));
            let text = if csv { report.to_csv() } else { report.to_json() + "\n" };
            emit(out.as_deref(), &text)?;
            if report.valid {
                Ok(())
            } else {
                Err(Failure::Domain("experiment aborted; partial report written".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
