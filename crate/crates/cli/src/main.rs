use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use delnim_core::sweep::canonical_positions;
use delnim_core::{
    canonicalize, classify, delete_nim_grundy, sweep, winning_move, Class, Family, Oracle,
    OracleConfig, Position, Ruleset,
};

const EXIT_P: u8 = 0;
const EXIT_USAGE: u8 = 2;
const EXIT_FALSIFIED: u8 = 3;
const EXIT_N: u8 = 10;

#[derive(Parser)]
#[command(name = "delnim", version, about = "Delete-and-split Nim: classify, solve, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the outcome class and certificate. Exit 0 on P, 10 on N.
    Classify(PositionArgs),
    /// Print a winning move and its successor.
    BestMove(PositionArgs),
    /// Sweep every position up to --max-heap against the exhaustive solver.
    Verify {
        #[arg(long)]
        ruleset: Ruleset,
        #[arg(long)]
        max_heap: u64,
        /// Report destination; omitted means summary only.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Worker threads, 0 for one per core.
        #[arg(long, env = "DELNIM_JOBS", default_value_t = 0)]
        jobs: usize,
    },
    /// Grundy values: a square table for two-heap rulesets, a list otherwise.
    GrundyTable {
        #[arg(long)]
        ruleset: Ruleset,
        #[arg(long)]
        max_heap: u64,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
}

#[derive(Args)]
struct PositionArgs {
    #[arg(long)]
    ruleset: Ruleset,
    /// Heap sizes, comma or space separated.
    #[arg(long, num_args = 1.., required = true, allow_hyphen_values = true)]
    heaps: Vec<String>,
}

impl PositionArgs {
    fn position(&self) -> Result<Position> {
        let mut heaps = Vec::new();
        for token in self.heaps.iter().flat_map(|s| s.split(|c: char| c == ',' || c.is_whitespace())) {
            if token.is_empty() {
                continue;
            }
            heaps.push(token.parse::<i64>().with_context(|| format!("bad heap size `{token}`"))?);
        }
        Ok(canonicalize(&heaps, self.ruleset)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Classify(args) => {
            let p = args.position()?;
            let outcome = classify(args.ruleset, &p)?;
            write!(out, "{outcome}")?;
            if args.ruleset.family() == Family::DeleteNim {
                write!(out, " grundy={}", delete_nim_grundy(p.heaps()[0], p.heaps()[1]))?;
            }
            writeln!(out, " {p}")?;
            Ok(if outcome.class == Class::P { EXIT_P } else { EXIT_N })
        }
        Command::BestMove(args) => {
            let p = args.position()?;
            match winning_move(args.ruleset, &p)? {
                Some(m) => {
                    writeln!(out, "{}", m.record.describe(&p))?;
                    writeln!(out, "{p} -> {}", m.result)?;
                }
                None => writeln!(out, "position is P: no winning move {p}")?,
            }
            Ok(EXIT_P)
        }
        Command::Verify { ruleset, max_heap, out: path, format, jobs } => {
            let tokens = ruleset.heap_count() as u64 * max_heap;
            let config = OracleConfig { max_tokens: tokens.max(OracleConfig::default().max_tokens), ..Default::default() };
            let oracle = Oracle::with_config(ruleset, config);
            let report = sweep(&oracle, max_heap, jobs)?;
            if let Some(path) = path {
                let file = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
                match format {
                    Format::Csv => report.write_csv(file)?,
                    Format::Jsonl => report.write_jsonl(file)?,
                }
            }
            let s = &report.summary;
            writeln!(
                out,
                "{ruleset} max-heap {max_heap}: {} positions, {} P, {} mismatches, {} strategy failures",
                s.positions, s.p_positions, s.mismatches, s.strategy_failures
            )?;
            for row in report.mismatches() {
                writeln!(out, "mismatch {:?}: closed {} oracle {}", row.heaps, row.closed, row.oracle)?;
            }
            for (row, why) in report.strategy_failures() {
                writeln!(out, "strategy {:?}: {why}", row.heaps)?;
            }
            Ok(if report.is_clean() { EXIT_P } else { EXIT_FALSIFIED })
        }
        Command::GrundyTable { ruleset, max_heap } => {
            grundy_table(&mut out, ruleset, max_heap)?;
            Ok(EXIT_P)
        }
        Command::Serve { port, host } => {
            let addr = SocketAddr::new(host, port);
            let rt = tokio::runtime::Runtime::new()?;
            eprintln!("listening on http://{addr}");
            rt.block_on(delnim_service::serve(addr, delnim_service::DEFAULT_SESSION_TTL))?;
            Ok(EXIT_P)
        }
    }
}

fn grundy_table(out: &mut impl Write, ruleset: Ruleset, max_heap: u64) -> Result<()> {
    let tokens = ruleset.heap_count() as u64 * max_heap;
    let config = OracleConfig { max_tokens: tokens.max(OracleConfig::default().max_tokens), ..Default::default() };
    let oracle = Oracle::with_config(ruleset, config);
    if ruleset.heap_count() != 2 {
        for p in canonical_positions(ruleset, max_heap) {
            writeln!(out, "{p} {}", oracle.solve_grundy(&p)?)?;
        }
        return Ok(());
    }

    let lo = ruleset.min_heap();
    let width = max_heap.to_string().len().max(3);
    let cell = |x: u64, y: u64| -> Result<u32> {
        if ruleset.family() == Family::DeleteNim {
            return Ok(delete_nim_grundy(x, y));
        }
        let p = canonicalize(&[x as i64, y as i64], ruleset)?;
        Ok(oracle.solve_grundy(&p)?)
    };
    write!(out, "{:>width$}", "x\\y")?;
    for y in lo..=max_heap {
        write!(out, " {y:>width$}")?;
    }
    writeln!(out)?;
    for x in lo..=max_heap {
        write!(out, "{x:>width$}")?;
        for y in lo..=max_heap {
            write!(out, " {:>width$}", cell(x, y)?)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
