use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use permgen::{
    alphabet_of, generate, oracle, parse, ConstraintSet, ParseError, PermittedMatrix,
    StatsSnapshot, ValidationReport,
};

#[derive(Parser)]
#[command(name = "permgen", version)]
#[command(about = "Enumerate the distinct permutations of a string under per-position constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every permitted permutation, one per line
    Gen {
        #[command(flatten)]
        input: Input,
        /// Stop after this many permutations
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        limit: Option<u64>,
    },
    /// Print the number of permitted permutations
    Count {
        #[command(flatten)]
        input: Input,
    },
    /// Check the generator against brute-force enumeration
    Verify {
        #[command(flatten)]
        input: Input,
    },
    /// Time the generator and brute-force enumeration on one instance
    Bench {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Args)]
struct Input {
    /// The string to permute
    #[arg(short, long = "string", allow_hyphen_values = true)]
    string: String,
    /// One constraint clause, e.g. "pos 1 in {a,b}" (repeatable)
    #[arg(short = 'c', long = "constraint", allow_hyphen_values = true)]
    constraints: Vec<String>,
    /// File with one constraint clause per line
    #[arg(long)]
    constraints_file: Option<PathBuf>,
    /// Keep the input order instead of sorting it (output is no longer lexicographic)
    #[arg(long)]
    no_sort: bool,
    /// Report search counters on standard error
    #[arg(long)]
    stats: bool,
}

enum Failure {
    Constraint(ValidationReport),
    Parse { source: String, error: ParseError },
    Usage(String),
    Mismatch,
    Io(io::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Constraint(_) => 1,
            Failure::Parse { .. } => 2,
            Failure::Usage(_) => 3,
            Failure::Mismatch => 4,
            Failure::Io(_) => 5,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

struct Instance {
    string: String,
    matrix: PermittedMatrix,
    sort: bool,
    stats: bool,
}

impl Input {
    fn load(&self) -> Result<Instance, Failure> {
        let len = self.string.chars().count();
        let mut constraints = ConstraintSet::new(len);
        if let Some(path) = &self.constraints_file {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let parsed = parse(&text, len).map_err(|error| Failure::Parse {
                source: path.display().to_string(),
                error,
            })?;
            constraints.extend(parsed);
        }
        for (i, clause) in self.constraints.iter().enumerate() {
            let parsed = parse(clause, len).map_err(|error| Failure::Parse {
                source: format!("--constraint #{}", i + 1),
                error,
            })?;
            constraints.extend(parsed);
        }

        let alphabet = alphabet_of(&self.string);
        let matrix = constraints
            .normalize(&alphabet)
            .map_err(Failure::Constraint)?;
        for (position, symbol) in constraints.allowed_outside(&alphabet) {
            eprintln!(
                "warning: position {position} allows `{symbol}`, which does not occur in the input string"
            );
        }
        Ok(Instance {
            string: self.string.clone(),
            matrix,
            sort: !self.no_sort,
            stats: self.stats,
        })
    }
}

fn report_stats(snapshot: StatsSnapshot) {
    let suffix = if snapshot.complete { "" } else { " (partial)" };
    eprintln!("stats: {}{suffix}", snapshot.stats);
}

fn run(command: Command) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match command {
        Command::Gen { input, limit } => {
            let inst = input.load()?;
            let mut stream = generate(&inst.string, &inst.matrix, inst.sort)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let limit = limit.unwrap_or(u64::MAX);
            let mut written = 0;
            while written < limit {
                let Some(perm) = stream.next() else { break };
                writeln!(out, "{perm}")?;
                written += 1;
            }
            out.flush()?;
            if inst.stats {
                report_stats(stream.stats());
            }
        }
        Command::Count { input } => {
            let inst = input.load()?;
            let mut stream = generate(&inst.string, &inst.matrix, inst.sort)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let n = stream.count_remaining();
            writeln!(out, "{n}")?;
            out.flush()?;
            if inst.stats {
                report_stats(stream.stats());
            }
        }
        Command::Verify { input } => {
            let inst = input.load()?;
            let mut stream = generate(&inst.string, &inst.matrix, inst.sort)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let mut produced: Vec<String> = stream.by_ref().collect();
            if !inst.sort {
                produced.sort();
            }
            let expected = oracle::solve(&inst.string, &inst.matrix)
                .map_err(|e| Failure::Usage(e.to_string()))?
                .outputs;
            if inst.stats {
                report_stats(stream.stats());
            }
            match first_divergence(&produced, &expected) {
                None => {
                    writeln!(out, "OK {}", produced.len())?;
                    out.flush()?;
                }
                Some(index) => {
                    let show =
                        |v: &[String]| v.get(index).map_or("<end>".to_string(), Clone::clone);
                    writeln!(out, "MISMATCH at index {index}")?;
                    writeln!(out, "- oracle:    {}", show(&expected))?;
                    writeln!(out, "+ generator: {}", show(&produced))?;
                    out.flush()?;
                    return Err(Failure::Mismatch);
                }
            }
        }
        Command::Bench { input } => {
            let inst = input.load()?;
            let started = Instant::now();
            let mut stream = generate(&inst.string, &inst.matrix, inst.sort)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            stream.by_ref().for_each(drop);
            let gen_ms = started.elapsed().as_secs_f64() * 1e3;
            let stats = stream.stats().stats;

            let started = Instant::now();
            let result = oracle::solve(&inst.string, &inst.matrix)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let oracle_ms = started.elapsed().as_secs_f64() * 1e3;

            writeln!(
                out,
                "n={} emitted={} calls={} dead_ends={} oracle_total={} gen_ms={gen_ms:.3} oracle_ms={oracle_ms:.3}",
                inst.matrix.len(),
                stats.emitted,
                stats.calls,
                stats.dead_ends,
                result.total_distinct,
            )?;
            out.flush()?;
        }
    }
    Ok(())
}

fn first_divergence(a: &[String], b: &[String]) -> Option<usize> {
    match a.iter().zip(b).position(|(x, y)| x != y) {
        Some(i) => Some(i),
        None if a.len() != b.len() => Some(a.len().min(b.len())),
        None => None,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Constraint(report) => {
                    for issue in &report.issues {
                        eprintln!("error: {issue}");
                    }
                }
                Failure::Parse { source, error } => {
                    eprintln!("error: {source}:{}", error.render_caret());
                }
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Mismatch => eprintln!("error: generator and oracle disagree"),
                Failure::Io(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
