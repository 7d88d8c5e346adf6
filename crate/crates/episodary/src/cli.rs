//! Command-line front end: mine sequences, generate synthetic data and run
//! coverage/subepisode checks.
//!
//! Exit codes: `0` success (for `check`: the answer is *true*), `1` a
//! `check` answered *false*, `2` bad flags, `3` malformed input files,
//! `4` resource abort, `5` I/O failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::episode::Episode;
use crate::miner::{self, MinerConfig, MinerError, MinerStats};
use crate::oracle;
use crate::sequence::{self, PlantedConfig, Sequence};
use crate::subepisode;

const EXIT_OK: i32 = 0;
const EXIT_FALSE: i32 = 1;
const EXIT_FLAGS: i32 = 2;
const EXIT_PARSE: i32 = 3;
const EXIT_RESOURCE: i32 = 4;
const EXIT_IO: i32 = 5;

#[derive(Parser)]
#[command(name = "episodary", version, about = "Mine frequent closed episodes from event sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine the frequent closed episodes of a sequence file.
    Mine {
        /// Sequence file (one `<ts> <label>` per line).
        #[arg(long)]
        input: PathBuf,
        /// Sliding window size in time units.
        #[arg(long)]
        window: u64,
        /// Minimum number of covering windows.
        #[arg(long = "min-support")]
        min_support: u64,
        /// Write the episodes here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        /// Write a one-row stats CSV here.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Abort when a branch materialises more instances than this.
        #[arg(long = "instance-abort", default_value_t = MinerConfig::DEFAULT_INSTANCE_ABORT)]
        instance_abort: usize,
    },
    /// Generate a synthetic sequence with a planted pattern.
    Gen {
        /// Number of two-event simultaneous groups in the pattern.
        #[arg(long)]
        nodes: u32,
        /// How often the pattern is planted.
        #[arg(long)]
        reps: u32,
        /// Time units between consecutive repetitions.
        #[arg(long)]
        gap: u32,
        /// Number of uniform noise events.
        #[arg(long)]
        noise: u32,
        /// Number of distinct noise labels.
        #[arg(long = "noise-alphabet")]
        noise_alphabet: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Decision procedures over sequences and episodes.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Does the sequence cover the episode?
    Cover {
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long)]
        episode: PathBuf,
    },
    /// Is the left episode a subepisode of the right one?
    Sub {
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        /// Use the brute-force witness oracle instead of the recursion.
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// `<support><TAB><canonical episode text>` per line.
    Text,
    /// Tab-separated machine records.
    Records,
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    init_logging();
    let cli = Cli::parse();
    match cli.command {
        Command::Mine {
            input,
            window,
            min_support,
            output,
            format,
            stats,
            instance_abort,
        } => cmd_mine(&input, window, min_support, output.as_deref(), format, stats.as_deref(), instance_abort),
        Command::Gen {
            nodes,
            reps,
            gap,
            noise,
            noise_alphabet,
            seed,
            output,
        } => cmd_gen(
            &PlantedConfig {
                nodes,
                reps,
                gap,
                noise_count: noise,
                noise_alphabet,
                seed,
            },
            &output,
        ),
        Command::Check { what } => match what {
            CheckCommand::Cover { sequence, episode } => cmd_check_cover(&sequence, &episode),
            CheckCommand::Sub { lhs, rhs, oracle } => cmd_check_sub(&lhs, &rhs, oracle),
        },
    }
}

/// `EPISODARY_LOG=debug|info|off` controls diagnostics on stderr.
fn init_logging() {
    let level = match std::env::var("EPISODARY_LOG").as_deref() {
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        _ => log::LevelFilter::Off,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
}

fn read_to_string(path: &Path) -> Result<String, i32> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_IO
    })
}

fn write_file(path: &Path, content: &str) -> Result<(), i32> {
    std::fs::write(path, content).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        EXIT_IO
    })
}

fn load_sequence(path: &Path) -> Result<Sequence, i32> {
    let text = read_to_string(path)?;
    Sequence::parse(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_PARSE
    })
}

/// Episode files hold one canonical episode text line; `#` comments and
/// blank lines are ignored.
fn load_episode(path: &Path) -> Result<Episode, i32> {
    let text = read_to_string(path)?;
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let Some(line) = lines.next() else {
        eprintln!("error: {}: no episode found", path.display());
        return Err(EXIT_PARSE);
    };
    if lines.next().is_some() {
        eprintln!("error: {}: more than one episode line", path.display());
        return Err(EXIT_PARSE);
    }
    Episode::parse(line).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_PARSE
    })
}

fn render_episodes(episodes: &[Episode], format: OutputFormat) -> String {
    let mut out = String::new();
    for ep in episodes {
        match format {
            OutputFormat::Text => {
                let _ = writeln!(out, "{}\t{}", ep.support().unwrap_or(0), ep.canonical_text());
            }
            OutputFormat::Records => {
                let _ = writeln!(out, "{}", record_line(ep));
            }
        }
    }
    out
}

/// One tab-separated record: support, node count, `;`-joined node label
/// lists (labels comma-joined), `;`-joined proper edges `i>j` and weak edges
/// `i~j` over canonical node numbering, `-` for empty fields.
fn record_line(ep: &Episode) -> String {
    let text = ep.canonical_text();
    // reuse the canonical form to avoid a second node-ordering pass
    let canonical = Episode::parse(&text).expect("canonical text round-trips");
    let nodes = (0..canonical.node_count())
        .map(|n| {
            canonical
                .node_labels(n)
                .labels()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";");
    let edges = |set: &std::collections::BTreeSet<(usize, usize)>, sep: char| {
        if set.is_empty() {
            "-".to_string()
        } else {
            set.iter()
                .map(|(a, b)| format!("{}{sep}{}", a + 1, b + 1))
                .collect::<Vec<_>>()
                .join(";")
        }
    };
    format!(
        "{}\t{}\t{}\t{}\t{}",
        ep.support().unwrap_or(0),
        canonical.node_count(),
        if nodes.is_empty() { "-".to_string() } else { nodes },
        edges(canonical.proper_edges(), '>'),
        edges(canonical.weak_edges(), '~'),
    )
}

fn report_lines(
    input: &Path,
    cfg: &MinerConfig,
    stats: &MinerStats,
    wall_ms: u128,
    output: Option<&Path>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "input={}", input.display());
    let _ = writeln!(s, "window={}", cfg.window);
    let _ = writeln!(s, "min_support={}", cfg.min_support);
    let _ = writeln!(s, "closed={}", stats.closed);
    let _ = writeln!(s, "i_closed={}", stats.i_closed);
    let _ = writeln!(s, "frequent_estimate={}", stats.frequent_estimate);
    let _ = writeln!(s, "scans={}", stats.scans);
    let _ = writeln!(s, "wall_ms={wall_ms}");
    let _ = writeln!(
        s,
        "output={}",
        output.map_or("-".to_string(), |p| p.display().to_string())
    );
    s
}

fn stats_csv(cfg: &MinerConfig, stats: &MinerStats) -> String {
    format!(
        "window,sigma,closed,i_closed,frequent_estimate,scans\n{},{},{},{},{},{}\n",
        cfg.window, cfg.min_support, stats.closed, stats.i_closed, stats.frequent_estimate, stats.scans
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_mine(
    input: &Path,
    window: u64,
    min_support: u64,
    output: Option<&Path>,
    format: OutputFormat,
    stats_path: Option<&Path>,
    instance_abort: usize,
) -> i32 {
    let seq = match load_sequence(input) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let cfg = MinerConfig {
        window,
        min_support,
        instance_abort,
    };
    let started = Instant::now();
    let outcome = match miner::mine(&seq, &cfg) {
        Ok(o) => o,
        Err(e @ MinerError::InvalidConfig(_)) => {
            eprintln!("error: {e}");
            return EXIT_FLAGS;
        }
        Err(e @ MinerError::ResourceAbort { .. }) => {
            eprintln!("error: {e}");
            return EXIT_RESOURCE;
        }
    };
    let wall_ms = started.elapsed().as_millis();
    let rendered = render_episodes(&outcome.closed, format);
    match output {
        Some(path) => {
            if let Err(code) = write_file(path, &rendered) {
                return code;
            }
        }
        None => print!("{rendered}"),
    }
    if let Some(path) = stats_path {
        if let Err(code) = write_file(path, &stats_csv(&cfg, &outcome.stats)) {
            return code;
        }
    }
    eprint!("{}", report_lines(input, &cfg, &outcome.stats, wall_ms, output));
    EXIT_OK
}

fn cmd_gen(cfg: &PlantedConfig, output: &Path) -> i32 {
    let seq = match sequence::gen_planted(cfg) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FLAGS;
        }
    };
    match write_file(output, &seq.serialize()) {
        Ok(()) => EXIT_OK,
        Err(code) => code,
    }
}

fn cmd_check_cover(sequence: &Path, episode: &Path) -> i32 {
    let seq = match load_sequence(sequence) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let ep = match load_episode(episode) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let answer = oracle::covers(&seq, &ep);
    println!("{answer}");
    if answer {
        EXIT_OK
    } else {
        EXIT_FALSE
    }
}

fn cmd_check_sub(lhs: &Path, rhs: &Path, use_oracle: bool) -> i32 {
    let (g, h) = match (load_episode(lhs), load_episode(rhs)) {
        (Ok(g), Ok(h)) => (g, h),
        (Err(code), _) | (_, Err(code)) => return code,
    };
    let answer = if use_oracle {
        match (g.transitive_closure(), h.transitive_closure()) {
            (Ok(g), Ok(h)) => oracle::brute_subepisode(&g, &h),
            _ => {
                eprintln!("error: cyclic episode graph");
                return EXIT_PARSE;
            }
        }
    } else {
        match subepisode::subepisode(&g, &h) {
            Ok(b) => b,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_PARSE;
            }
        }
    };
    println!("{answer}");
    if answer {
        EXIT_OK
    } else {
        EXIT_FALSE
    }
}
