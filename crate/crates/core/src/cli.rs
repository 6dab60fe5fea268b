//! Command-line front end. Exit status 0 on success, 1 on a semantic
//! failure (oracle mismatch, unmet expectation), 2 on usage or input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::alphabet::{parse_alphabet, random_alphabet, WeightedAlphabet};
use crate::bench::{emit_csv, emit_plot_script, run_bench_with, total_unions, UNIFORM_LABEL, WEIGHTED_LABEL};
use crate::enumerator::{brute_force_oracle, Enumerator};
use crate::maxwell::{check_expected, discover, standard_alphabet, DiscoveryConfig, EvalMode, Tolerances};
use crate::validation::{prune_supersets, trivial_validator};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "compactenum", version, about = "Enumerate theories by compactness and validate them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate all theories level by level and print per-level counts.
    Enumerate(EnumerateArgs),
    /// Rediscover the vacuum Maxwell equations from synthetic field data.
    Discover(DiscoverArgs),
    /// Compare the weighted and uniform alphabets; write CSV and a plot script.
    Bench(BenchArgs),
    /// Cross-check the level-wise enumeration against exhaustive powerset enumeration.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    /// A..L weighted 1,1,4,4,4,4,7,7,7,7,7,7
    #[value(alias = "paper")]
    Weighted,
    /// Twelve letters A..L of weight 1
    Uniform12,
    /// The operator-term alphabet (same weights as `weighted`)
    Maxwell,
}

impl Builtin {
    pub fn alphabet(self) -> WeightedAlphabet {
        match self {
            Builtin::Weighted => WeightedAlphabet::weighted(),
            Builtin::Uniform12 => WeightedAlphabet::uniform(12),
            Builtin::Maxwell => standard_alphabet().alphabet,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AlphabetArgs {
    /// Builtin alphabet.
    #[arg(long, value_enum, conflicts_with = "alphabet_file")]
    pub alphabet: Option<Builtin>,
    /// Alphabet file: one `<symbol> <weight>` per line.
    #[arg(long, value_name = "PATH")]
    pub alphabet_file: Option<PathBuf>,
}

impl AlphabetArgs {
    fn resolve(&self, default: Builtin) -> Result<WeightedAlphabet, String> {
        if let Some(path) = &self.alphabet_file {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            return parse_alphabet(&text).map_err(|e| format!("{}: {e}", path.display()));
        }
        Ok(self.alphabet.unwrap_or(default).alphabet())
    }
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub alphabet: AlphabetArgs,
    #[arg(long, default_value_t = 14)]
    pub max_comp: u32,
    /// Print every theory of every level.
    #[arg(long)]
    pub list: bool,
    /// Report only minimal accepted theories.
    #[arg(long)]
    pub prune: bool,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Analytic,
    Fd,
}

#[derive(Debug, Args)]
pub struct DiscoverArgs {
    #[command(flatten)]
    pub alphabet: AlphabetArgs,
    #[arg(long, default_value_t = 14)]
    pub max_comp: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Analytic)]
    pub mode: ModeArg,
    /// Finite-difference step.
    #[arg(long, default_value_t = EvalMode::DEFAULT_STEP)]
    pub h: f64,
    #[arg(long, default_value_t = 3)]
    pub waves: usize,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// Use waves of a single frequency (admits spurious Helmholtz relations).
    #[arg(long)]
    pub monochromatic: bool,
    #[arg(long)]
    pub tol_rank: Option<f64>,
    #[arg(long)]
    pub tol_support: Option<f64>,
    #[arg(long)]
    pub tol_zero: Option<f64>,
    #[arg(long)]
    pub tol_coef: Option<f64>,
    /// Report every accepted theory, not only minimal ones.
    #[arg(long)]
    pub no_prune: bool,
    /// Exit 1 unless exactly the six vacuum equations are found.
    #[arg(long)]
    pub expect_maxwell: bool,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 14)]
    pub max_comp: u32,
    /// Timed runs per alphabet after one discarded warm-up run.
    #[arg(long, default_value_t = 3)]
    pub repetitions: usize,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Write a matplotlib script here.
    #[arg(long, value_name = "PATH")]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub alphabet: AlphabetArgs,
    /// Defaults to 14, or to the total weight for random alphabets.
    #[arg(long)]
    pub max_comp: Option<u32>,
    /// Check this many random alphabets instead of a fixed one.
    #[arg(long, value_name = "COUNT")]
    pub random: Option<usize>,
    /// Symbols per random alphabet.
    #[arg(long, default_value_t = 10)]
    pub symbols: usize,
    /// Random weights are drawn from 1..=max-weight.
    #[arg(long, default_value_t = 5)]
    pub max_weight: u32,
    /// First seed for random alphabets.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Enumerate(a) => cmd_enumerate(&a, out),
        Command::Discover(a) => cmd_discover(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
        Command::Oracle(a) => cmd_oracle(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

#[derive(Debug)]
pub struct CliError(pub i32, pub String);

fn usage(msg: impl ToString) -> CliError {
    CliError(EXIT_USAGE, msg.to_string())
}

fn io(e: std::io::Error) -> CliError {
    CliError(EXIT_USAGE, e.to_string())
}

pub fn cmd_enumerate(args: &EnumerateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let alphabet = args.alphabet.resolve(Builtin::Weighted).map_err(usage)?;
    let enumerator = Enumerator::with_workers(args.workers).map_err(usage)?;
    let result = enumerator
        .march(&alphabet, args.max_comp, &trivial_validator())
        .map_err(usage)?;
    let records = if args.prune {
        prune_supersets(&result.records)
    } else {
        result.records
    };
    for q in 1..=result.levels.max_q() {
        let count = result.levels.level_len(q);
        if args.list {
            let theories: Vec<String> = result
                .levels
                .sorted_theories(q)
                .iter()
                .map(ToString::to_string)
                .collect();
            writeln!(out, "q={q} count={count} [{}]", theories.join(",")).map_err(io)?;
        } else {
            writeln!(out, "q={q} count={count}").map_err(io)?;
        }
    }
    writeln!(out, "total={} valid={}", result.levels.total(), records.len()).map_err(io)?;
    Ok(EXIT_OK)
}

pub fn discovery_config(args: &DiscoverArgs) -> Result<DiscoveryConfig, CliError> {
    let mode = match args.mode {
        ModeArg::Analytic => EvalMode::Analytic,
        ModeArg::Fd => {
            if !(args.h > 0.0 && args.h.is_finite()) {
                return Err(usage(format!("--h must be a positive step, got {}", args.h)));
            }
            EvalMode::FiniteDifference { h: args.h }
        }
    };
    let mut tolerances = Tolerances::for_mode(mode);
    let overrides = [
        (&mut tolerances.tol_rank, args.tol_rank),
        (&mut tolerances.tol_support, args.tol_support),
        (&mut tolerances.tol_zero, args.tol_zero),
        (&mut tolerances.tol_coef, args.tol_coef),
    ];
    for (slot, value) in overrides {
        if let Some(v) = value {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(usage(format!("tolerances must be non-negative, got {v}")));
            }
            *slot = v;
        }
    }
    let alphabet = match (&args.alphabet.alphabet, &args.alphabet.alphabet_file) {
        (None, None) => None,
        _ => Some(args.alphabet.resolve(Builtin::Maxwell).map_err(usage)?),
    };
    Ok(DiscoveryConfig {
        alphabet,
        max_comp: args.max_comp,
        wave_count: args.waves,
        sample_count: args.samples,
        seed: args.seed,
        mode,
        tolerances,
        prune: !args.no_prune,
        monochromatic: args.monochromatic,
        workers: args.workers,
    })
}

pub fn cmd_discover(args: &DiscoverArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let config = discovery_config(args)?;
    let report = discover(&config).map_err(usage)?;
    write!(out, "{}", report.table()).map_err(io)?;
    write!(out, "{report}").map_err(io)?;
    if args.expect_maxwell {
        return match check_expected(&report, config.tolerances.tol_coef) {
            Ok(()) => {
                writeln!(out, "EXPECTED: vacuum Maxwell equations recovered").map_err(io)?;
                Ok(EXIT_OK)
            }
            Err(why) => {
                writeln!(out, "UNEXPECTED: {why}").map_err(io)?;
                Ok(EXIT_FAILURE)
            }
        };
    }
    Ok(EXIT_OK)
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if args.repetitions == 0 {
        return Err(usage("--repetitions must be at least 1"));
    }
    let rows = run_bench_with(args.max_comp, args.repetitions, args.workers).map_err(usage)?;
    let csv = emit_csv(&rows);
    match &args.csv {
        Some(path) => fs::write(path, &csv).map_err(io)?,
        None => write!(out, "{csv}").map_err(io)?,
    }
    if let Some(path) = &args.plot {
        fs::write(path, emit_plot_script(&rows)).map_err(io)?;
    }
    if args.csv.is_some() {
        let weighted = total_unions(&rows, WEIGHTED_LABEL);
        let uniform = total_unions(&rows, UNIFORM_LABEL);
        writeln!(
            out,
            "rows={} unions_attempted weighted={weighted} uniform12={uniform} ratio={:.1}",
            rows.len(),
            uniform as f64 / weighted.max(1) as f64
        )
        .map_err(io)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_oracle(args: &OracleArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let enumerator = Enumerator::with_workers(args.workers).map_err(usage)?;
    let cases: Vec<(String, WeightedAlphabet, u32)> = match args.random {
        Some(count) => {
            if args.symbols == 0 || args.max_weight == 0 {
                return Err(usage("--symbols and --max-weight must be at least 1"));
            }
            (0..count as u64)
                .map(|i| {
                    let seed = args.seed + i;
                    let a = random_alphabet(args.symbols, args.max_weight, seed);
                    let cap = args.max_comp.unwrap_or(a.total_weight() as u32);
                    (format!("random seed={seed}"), a, cap)
                })
                .collect()
        }
        None => {
            let a = args.alphabet.resolve(Builtin::Weighted).map_err(usage)?;
            vec![("alphabet".to_string(), a, args.max_comp.unwrap_or(14))]
        }
    };
    let mut mismatches = 0;
    for (label, alphabet, cap) in cases {
        let oracle = brute_force_oracle(&alphabet, cap).map_err(usage)?;
        let marched = enumerator
            .march(&alphabet, cap, &trivial_validator())
            .map_err(usage)?;
        match marched.levels.first_difference(&oracle) {
            None => writeln!(out, "{label} max_comp={cap} theories={} EQUIVALENT", oracle.total()),
            Some(diff) => {
                mismatches += 1;
                writeln!(out, "{label} max_comp={cap} MISMATCH {diff}")
            }
        }
        .map_err(io)?;
    }
    Ok(if mismatches == 0 { EXIT_OK } else { EXIT_FAILURE })
}
