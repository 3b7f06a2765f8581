//! Command line for generating puzzle datasets, solving them with the
//! hypervector reasoner, and reproducing the accuracy tables.
//!
//! Exit codes: 0 success, 1 data error (malformed puzzles), 2 I/O error.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use vsar::codebook::CodebookSet;
use vsar::dataset::{
    evaluate, generate_records, read_records, solve_report, write_records, PuzzleRecord,
    RunConfig, Seeds, DEFAULT_BETA, DEFAULT_DIMENSION, SEED_ENV_VAR,
};
use vsar::raven::Configuration;

#[derive(Parser)]
#[command(name = "vsar", version, about = "Vector-symbolic solver for matrix reasoning puzzles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Hypervector dimension.
    #[arg(long, default_value_t = DEFAULT_DIMENSION)]
    d: usize,
    /// Softmax inverse temperature for existence weights.
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    /// Base seed; codebook/generator/noise streams derive from it.
    /// Defaults to the VSAR_SEED environment variable, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

impl CommonOpts {
    fn seeds(&self) -> Seeds {
        let base = self.seed.unwrap_or_else(default_seed);
        Seeds::from_base(base)
    }
}

fn default_seed() -> u64 {
    std::env::var(SEED_ENV_VAR)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

#[derive(Subcommand)]
enum Command {
    /// Generate a JSON-lines puzzle dataset.
    Gen {
        #[command(flatten)]
        common: CommonOpts,
        /// Configurations to generate; repeat the flag or pass "all".
        #[arg(long = "config", default_value = "all")]
        configs: Vec<String>,
        /// Puzzles per configuration.
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Output path; "-" writes to stdout.
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Solve each puzzle in a dataset and print per-puzzle reports.
    Solve {
        #[command(flatten)]
        common: CommonOpts,
        /// Dataset path; "-" reads from stdin.
        #[arg(long)]
        input: String,
        /// Label-noise mixing weight in [0, 1].
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
        /// Emit one JSON report per puzzle instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Solve a dataset and print per-configuration accuracy.
    Eval {
        #[command(flatten)]
        common: CommonOpts,
        /// Dataset path; "-" reads from stdin.
        #[arg(long)]
        input: String,
        /// Label-noise mixing weight in [0, 1].
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
        /// Emit the report as JSON.
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// Emit the report as CSV.
        #[arg(long)]
        csv: bool,
    },
}

fn parse_configs(raw: &[String]) -> Result<Vec<Configuration>, String> {
    let mut out = Vec::new();
    for item in raw.iter().flat_map(|s| s.split(',')) {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        if item.eq_ignore_ascii_case("all") {
            for c in Configuration::ALL {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
            continue;
        }
        let c: Configuration = item.parse().map_err(|e| format!("{e}"))?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    if out.is_empty() {
        return Err("no configurations selected".into());
    }
    Ok(out)
}

const EXIT_DATA: u8 = 1;
const EXIT_IO: u8 = 2;

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn read_input(path: &str) -> io::Result<Vec<(usize, anyhow::Result<PuzzleRecord>)>> {
    if path == "-" {
        read_records(io::stdin().lock()).map_err(io_from_anyhow)
    } else {
        let file = File::open(path)?;
        read_records(BufReader::new(file)).map_err(io_from_anyhow)
    }
}

fn io_from_anyhow(e: anyhow::Error) -> io::Error {
    io::Error::other(e.to_string())
}

#[derive(Serialize)]
struct GenManifest {
    seed: u64,
    configurations: Vec<Configuration>,
    per_config: usize,
    total: usize,
    output: String,
}

fn run_gen(common: CommonOpts, configs: Vec<String>, n: usize, out: String) -> ExitCode {
    let configurations = match parse_configs(&configs) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_DATA, &e),
    };
    let run = RunConfig {
        d: common.d,
        seeds: common.seeds(),
        beta: common.beta,
        eta: 0.0,
        configurations: configurations.clone(),
        n_puzzles: n,
        output: Some(out.clone()),
    };
    if let Err(e) = run.validate() {
        return fail(EXIT_DATA, &e.to_string());
    }
    let records = generate_records(&run);
    let write_result = if out == "-" {
        write_records(io::stdout().lock(), &records)
    } else {
        File::create(&out)
            .map_err(anyhow::Error::from)
            .and_then(|f| write_records(BufWriter::new(f), &records))
    };
    if let Err(e) = write_result {
        return fail(EXIT_IO, &format!("writing {out}: {e}"));
    }
    let manifest = GenManifest {
        seed: run.seeds.generator,
        configurations,
        per_config: n,
        total: records.len(),
        output: out,
    };
    eprintln!("{}", serde_json::to_string(&manifest).expect("manifest serializes"));
    ExitCode::SUCCESS
}

fn run_solve(common: CommonOpts, input: String, eta: f64, json: bool) -> ExitCode {
    if !(0.0..=1.0).contains(&eta) {
        return fail(EXIT_DATA, &format!("eta {eta} must lie in [0, 1]"));
    }
    let lines = match read_input(&input) {
        Ok(l) => l,
        Err(e) => return fail(EXIT_IO, &format!("reading {input}: {e}")),
    };
    let seeds = common.seeds();
    let books = match CodebookSet::build(common.d, seeds.codebook, common.beta) {
        Ok(b) => b,
        Err(e) => return fail(EXIT_DATA, &e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seeds.noise);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut had_errors = false;
    for (line, parsed) in &lines {
        let record = match parsed {
            Ok(r) => r,
            Err(e) => {
                eprintln!("line {line}: {e}");
                had_errors = true;
                continue;
            }
        };
        match solve_report(*line, record, &books, eta, &mut rng) {
            Ok(report) => {
                let rendered = if json {
                    serde_json::to_string(&report).expect("report serializes")
                } else {
                    render_solve_text(&report, eta)
                };
                if writeln!(out, "{rendered}").is_err() {
                    return ExitCode::from(EXIT_IO);
                }
            }
            Err(e) => {
                eprintln!("line {line}: {e}");
                had_errors = true;
            }
        }
    }
    if had_errors {
        ExitCode::from(EXIT_DATA)
    } else {
        ExitCode::SUCCESS
    }
}

fn render_solve_text(report: &vsar::dataset::SolveReport, eta: f64) -> String {
    let mut s = format!(
        "line {} [{}] eta={eta} chosen={} answer={} {}{}",
        report.line,
        report.config,
        report.chosen,
        report.answer,
        if report.correct { "correct" } else { "wrong" },
        if report.flagged { " (flagged)" } else { "" },
    );
    for (ci, comp) in report.rules.iter().enumerate() {
        s.push_str(&format!("\n  component {ci}:"));
        for r in comp {
            match (&r.label, r.score) {
                (Some(label), Some(score)) => {
                    s.push_str(&format!(" {}={label}(s={score:.3})", r.attribute))
                }
                _ => s.push_str(&format!(" {}=none", r.attribute)),
            }
        }
    }
    s.push_str(&format!(
        "\n  candidate totals: [{}]",
        report
            .candidate_scores
            .iter()
            .map(|v| format!("{v:.3}"))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    s
}

fn run_eval(common: CommonOpts, input: String, eta: f64, json: bool, csv: bool) -> ExitCode {
    let lines = match read_input(&input) {
        Ok(l) => l,
        Err(e) => return fail(EXIT_IO, &format!("reading {input}: {e}")),
    };
    let mut records = Vec::new();
    for (line, parsed) in lines {
        match parsed {
            Ok(r) => records.push(r),
            Err(e) => return fail(EXIT_DATA, &format!("line {line}: {e}")),
        }
    }
    let seeds = common.seeds();
    let mut configurations: Vec<Configuration> = Vec::new();
    for r in &records {
        if !configurations.contains(&r.config) {
            configurations.push(r.config);
        }
    }
    if configurations.is_empty() {
        configurations.push(Configuration::Center);
    }
    let run = RunConfig {
        d: common.d,
        seeds,
        beta: common.beta,
        eta,
        configurations,
        n_puzzles: records.len(),
        output: None,
    };
    if let Err(e) = run.validate() {
        return fail(EXIT_DATA, &e.to_string());
    }
    let books = match CodebookSet::build(run.d, run.seeds.codebook, run.beta) {
        Ok(b) => b,
        Err(e) => return fail(EXIT_DATA, &e.to_string()),
    };
    let report = match evaluate(&run, &records, &books) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_DATA, &e.to_string()),
    };
    let rendered = if json {
        serde_json::to_string_pretty(&report).expect("report serializes")
    } else if csv {
        report.to_csv()
    } else {
        report.to_table()
    };
    print!("{rendered}");
    if !rendered.ends_with('\n') {
        println!();
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen { common, configs, n, out } => run_gen(common, configs, n, out),
        Command::Solve { common, input, eta, json } => run_solve(common, input, eta, json),
        Command::Eval { common, input, eta, json, csv } => run_eval(common, input, eta, json, csv),
    }
}
