use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use invsat_core::harness::{
    bench_scaling, differential_run, sampled_specs, write_csv, BenchConfig, CampaignConfig,
    InstanceSpec,
};
use invsat_core::report::{decision_text, oracle_text};
use invsat_core::{
    candidate_formula, closed_candidate_formula, decide, oracle_decide, prefix_cover, Answer,
    DecideOptions, Error, ModelSet, DEFAULT_ENUMERATION_CAP, PAPER_KMIN,
};

const EXIT_INPUT: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;
const EXIT_OTHER: u8 = 1;

/// Inverse 3-SAT: is a set of models exactly the model set of some 3-CNF?
#[derive(Parser, Debug)]
#[command(name = "invsat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the candidate formula (every 3-clause all models satisfy) as DIMACS.
    Candidate(InputArgs),
    /// Print the 3-limited closure of the candidate formula as DIMACS.
    Closure(InputArgs),
    /// List the prefix cover of the non-models, shortest prefixes first.
    Phibar(PipelineArgs),
    /// Run the polynomial decision pipeline.
    Decide(PipelineArgs),
    /// Decide by enumerating every assignment.
    Oracle(OracleArgs),
    /// Run a differential campaign of the pipeline against the oracle.
    Fuzz(FuzzArgs),
    /// Time the pipeline over growing instance sizes and print CSV.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Model-set file, one 0/1 string per line; `-` reads stdin.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Shortest prefix length in the cover.
    #[arg(long, default_value_t = 1, conflicts_with = "paper_mode")]
    kmin: usize,
    /// Only consider prefixes of length at least 4.
    #[arg(long)]
    paper_mode: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

impl PipelineArgs {
    fn kmin(&self) -> usize {
        if self.paper_mode {
            PAPER_KMIN
        } else {
            self.kmin
        }
    }
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Largest variable count the oracle will enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    oracle_cap: usize,
}

#[derive(Args, Debug)]
struct FuzzArgs {
    /// Run every nonempty model set over N variables instead of sampling.
    #[arg(long, value_name = "N")]
    exhaustive: Option<usize>,
    #[arg(long, default_value_t = 5)]
    n_min: usize,
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1, conflicts_with = "paper_mode")]
    kmin: usize,
    #[arg(long)]
    paper_mode: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    oracle_cap: usize,
    /// Also write the JSON summary to this file.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Print the whole campaign report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value_t = 5)]
    n_min: usize,
    #[arg(long, default_value_t = 30)]
    n_max: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1, conflicts_with = "paper_mode")]
    kmin: usize,
    #[arg(long)]
    paper_mode: bool,
    /// Per-instance limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Inconsistent(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            e if e.is_inconsistency() => Failure::Inconsistent(e.to_string()),
            Error::InputTooSmall { .. }
            | Error::TooManyVariables { .. }
            | Error::KminOutOfRange { .. }
            | Error::PrefixLengthOutOfRange { .. }
            | Error::CapExceeded { .. }
            | Error::EmptyModelSet
            | Error::ModelLength { .. }
            | Error::DuplicateModel { .. }
            | Error::GeneratorExhausted { .. }
            | Error::GeneratorRange(_)
            | Error::Io(_) => Failure::Input(e.to_string()),
            Error::Timeout { .. } => Failure::Other(e.to_string()),
            e => Failure::Inconsistent(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn read_models(path: &PathBuf) -> CliResult<ModelSet> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
    };
    ModelSet::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn timeout(secs: Option<f64>) -> CliResult<Option<Duration>> {
    secs.map(|s| {
        Duration::try_from_secs_f64(s).map_err(|e| Failure::Input(format!("--timeout: {e}")))
    })
    .transpose()
}

fn pretty(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn with_answer(source: &str, answer: Answer, value: Value) -> Value {
    let mut object = json!({
        "source": source,
        "extra_model_exists": answer.extra_model_exists(),
        "exact_model_set_of_3cnf": !answer.extra_model_exists(),
    });
    if let (Some(target), Value::Object(fields)) = (object.as_object_mut(), value) {
        target.extend(fields);
    }
    object
}

fn run(command: Command) -> CliResult<String> {
    Ok(match command {
        Command::Candidate(args) => {
            let f = candidate_formula(&read_models(&args.input)?)?;
            if args.json {
                pretty(&f)
            } else {
                f.to_dimacs()
            }
        }
        Command::Closure(args) => {
            let f = closed_candidate_formula(&read_models(&args.input)?)?;
            if args.json {
                pretty(&f)
            } else {
                f.to_dimacs()
            }
        }
        Command::Phibar(args) => {
            let phi = read_models(&args.input.input)?;
            let cover = prefix_cover(&phi, args.kmin())?;
            if args.input.json {
                pretty(&json!({
                    "n": cover.n(),
                    "kmin": cover.kmin(),
                    "entries": cover.sorted(),
                }))
            } else {
                cover.to_text()
            }
        }
        Command::Decide(args) => {
            let phi = read_models(&args.input.input)?;
            let options = DecideOptions {
                kmin: args.kmin(),
                jobs: args.jobs.max(1),
                timeout: timeout(args.timeout)?,
            };
            let report = decide(&phi, &options)?;
            if args.input.json {
                let value = serde_json::to_value(&report).expect("serializable");
                pretty(&with_answer("decide", report.answer, value))
            } else {
                decision_text(&report)
            }
        }
        Command::Oracle(args) => {
            let verdict = oracle_decide(&read_models(&args.input.input)?, args.oracle_cap)?;
            if args.input.json {
                let value = serde_json::to_value(&verdict).expect("serializable");
                pretty(&with_answer("oracle", verdict.answer(), value))
            } else {
                oracle_text(&verdict)
            }
        }
        Command::Fuzz(args) => {
            let specs: Vec<InstanceSpec> = match args.exhaustive {
                Some(n) if (1..=4).contains(&n) => InstanceSpec::exhaustive(n).collect(),
                Some(n) => {
                    return Err(Failure::Input(format!(
                        "--exhaustive {n}: supported for 1..=4"
                    )))
                }
                None => {
                    if args.n_min < 3 || args.n_min > args.n_max {
                        return Err(Failure::Input("need 3 <= --n-min <= --n-max".into()));
                    }
                    sampled_specs(args.n_min, args.n_max, args.count, args.seed)
                }
            };
            let config = CampaignConfig {
                kmin: if args.paper_mode {
                    PAPER_KMIN
                } else {
                    args.kmin
                },
                oracle_cap: args.oracle_cap,
                jobs: args.jobs.max(1),
            };
            let report = differential_run(&specs, &config)?;
            if let Some(path) = &args.summary {
                fs::write(path, report.summary_json() + "\n")
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            }
            if args.json {
                pretty(&report)
            } else {
                report.to_text()
            }
        }
        Command::Bench(args) => {
            let config = BenchConfig {
                n_values: (args.n_min..=args.n_max).collect(),
                trials: args.trials,
                seed: args.seed,
                kmin: if args.paper_mode {
                    PAPER_KMIN
                } else {
                    args.kmin
                },
                timeout: timeout(Some(args.timeout))?,
            };
            let rows = bench_scaling(&config)?;
            match &args.output {
                Some(path) => {
                    let file = fs::File::create(path)
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    write_csv(&rows, file)?;
                    String::new()
                }
                None => invsat_core::harness::to_csv(&rows),
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|()| stdout.flush())
                .is_err()
            {
                return ExitCode::from(EXIT_OTHER);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("invsat: input error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Inconsistent(msg)) => {
            eprintln!("invsat: internal inconsistency: {msg}");
            ExitCode::from(EXIT_INCONSISTENT)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("invsat: {msg}");
            ExitCode::from(EXIT_OTHER)
        }
    }
}
