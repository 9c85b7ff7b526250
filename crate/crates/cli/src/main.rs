use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use cyclorient::analysis::{self, SweepOptions};
use cyclorient::blowup;
use cyclorient::constructions;
use cyclorient::io;
use cyclorient::orient;
use cyclorient::solver;
use cyclorient::{Budget, DefiningSequence, Error, SolveStatus, VertexOrdering};

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "cyclorient",
    version,
    about = "Cyclic partitions of K_n and their transitive orientations"
)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// Search node limit per solver call
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_nodes: Option<u64>,
    /// Wall-clock limit per solver call, in seconds
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_secs: Option<u64>,
    /// Write the data stream here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweep and conjecture
    #[arg(long, short, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit normalized defining sequences
    Gen {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Emit only the sequence with this enumeration index
        #[arg(long)]
        index: Option<u128>,
    },
    /// Print the label of one edge or the full label matrix
    Label {
        partition: String,
        #[arg(long, requires = "v")]
        u: Option<usize>,
        #[arg(long, requires = "u")]
        v: Option<usize>,
    },
    /// Check an ordering against a partition
    Check { partition: String, ordering: String },
    /// Build the standard orientation when it exists
    Standard { partition: String },
    /// Search for an accepted ordering
    Solve {
        partition: String,
        /// List every accepted ordering
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = usize::MAX)]
        cap: usize,
    },
    /// List accepted orderings
    Enumerate {
        partition: String,
        #[arg(long, default_value_t = usize::MAX)]
        cap: usize,
    },
    #[command(subcommand)]
    Blowup(BlowupCommand),
    /// Print the dual partition
    Dual { partition: String },
    /// Full classification record of one partition
    Classify { partition: String },
    /// Evaluate the necessary conditions
    Necessary { partition: String },
    #[command(subcommand)]
    Hamiltonian(HamiltonianCommand),
    /// Classify every normalized sequence for one (k, n)
    Sweep {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Same as the global --output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve every normalized sequence for odd orders
    Conjecture {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        odd_n: Vec<usize>,
    },
    /// Render a partition, optionally oriented, as DOT
    ExportDot {
        partition: String,
        ordering: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum BlowupCommand {
    /// Build a blow-up from a base partition
    Make {
        #[arg(long)]
        base: String,
        #[arg(long)]
        n: usize,
        /// Free labels as index=label pairs, e.g. 6=1,12=0
        #[arg(long, value_delimiter = ',')]
        free: Vec<String>,
    },
    /// Lift an accepted base ordering to a blow-up
    Lift {
        #[arg(long)]
        base: String,
        #[arg(long)]
        base_order: String,
        #[arg(long)]
        target: String,
    },
    /// Find blow-up witnesses
    Detect { partition: String },
}

#[derive(Subcommand, Debug)]
enum HamiltonianCommand {
    /// Alternating Hamiltonian paths for even n
    Paths {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Isomorphic Hamiltonian cycles for odd n
    Cycles {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct ToolConfig {
    budget: Budget,
    output: Option<PathBuf>,
    format: Option<Format>,
    jobs: usize,
}

impl ToolConfig {
    fn from_args(args: &ConfigArgs) -> Self {
        let default = Budget::default();
        ToolConfig {
            budget: Budget {
                max_nodes: args.budget_nodes.or(default.max_nodes),
                max_time: args
                    .budget_secs
                    .map(Duration::from_secs)
                    .or(default.max_time),
            },
            output: args.output.clone(),
            format: args.format,
            jobs: args.jobs.map_or_else(
                || std::thread::available_parallelism().map_or(1, |n| n.get()),
                |j| j as usize,
            ),
        }
    }

    fn format(&self, allowed: &[Format]) -> anyhow::Result<Format> {
        match self.format {
            None => Ok(allowed[0]),
            Some(f) if allowed.contains(&f) => Ok(f),
            Some(f) => Err(anyhow!("format {f:?} not supported here")),
        }
    }

    fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            budget: self.budget,
            parallel: self.jobs > 1,
            ..SweepOptions::default()
        }
    }

    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.output {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> anyhow::Result<()> {
        self.format(&[Format::Json])?;
        self.emit(&(io::to_json(value) + "\n"))
    }
}

fn read_arg(arg: &str) -> anyhow::Result<Option<String>> {
    let path = Path::new(arg);
    if path.is_file() {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(Some(text))
    } else {
        Ok(None)
    }
}

/// A JSON file or the canonical `k3n12:000121` form.
fn load_partition(arg: &str) -> anyhow::Result<DefiningSequence> {
    match read_arg(arg)? {
        Some(text) => io::from_json(&text).with_context(|| format!("in {arg}")),
        None => arg
            .parse()
            .with_context(|| format!("{arg:?} is neither a file nor a sequence string")),
    }
}

/// A JSON file or a comma-separated vertex list.
fn load_ordering(arg: &str) -> anyhow::Result<VertexOrdering> {
    match read_arg(arg)? {
        Some(text) => io::from_json(&text).with_context(|| format!("in {arg}")),
        None => {
            let tau = arg
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .with_context(|| format!("{arg:?} is neither a file nor a vertex list"))?;
            Ok(VertexOrdering::new(tau)?)
        }
    }
}

fn parse_free(pairs: &[String]) -> anyhow::Result<BTreeMap<usize, usize>> {
    pairs
        .iter()
        .map(|p| {
            let (i, l) = p
                .split_once('=')
                .ok_or_else(|| anyhow!("free value {p:?} is not index=label"))?;
            Ok((i.trim().parse()?, l.trim().parse()?))
        })
        .collect()
}

fn status_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Sat => EXIT_OK,
        SolveStatus::Unsat => EXIT_NEGATIVE,
        SolveStatus::BudgetExceeded => EXIT_RESOURCE,
    }
}

fn negative_unless(ok: bool) -> u8 {
    if ok {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let cfg = ToolConfig::from_args(&cli.config);
    match cli.command {
        Command::Gen { k, n, index } => {
            cyclorient::sequence::partition_exists(k, n)?;
            match index {
                Some(i) => {
                    let s = DefiningSequence::normalized_from_index(k, n, i)?;
                    cfg.emit_json(&s)?;
                }
                None => {
                    let total = DefiningSequence::normalized_count(k, n);
                    let limit = SweepOptions::default().max_space;
                    if total > limit {
                        return Err(Error::SpaceTooLarge { size: total, limit }.into());
                    }
                    let all: Vec<_> = (0..total)
                        .map(|i| {
                            DefiningSequence::normalized_from_index(k, n, i).expect("in range")
                        })
                        .collect();
                    cfg.emit_json(&all)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Label { partition, u, v } => {
            let p = load_partition(&partition)?.labeling();
            match (u, v) {
                (Some(u), Some(v)) => {
                    if u >= p.n() || v >= p.n() {
                        bail!("vertices must be below {}", p.n());
                    }
                    let label = p.edge_label(u, v)?;
                    cfg.emit_json(&json!({ "u": u, "v": v, "label": label }))?;
                }
                _ => {
                    let n = p.n();
                    let matrix: Vec<Vec<Option<usize>>> = (0..n)
                        .map(|u| (0..n).map(|v| (u != v).then(|| p.label(u, v))).collect())
                        .collect();
                    cfg.emit_json(&json!({ "k": p.k(), "n": n, "labels": matrix }))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Check {
            partition,
            ordering,
        } => {
            let p = load_partition(&partition)?.labeling();
            let o = load_ordering(&ordering)?;
            let report = orient::reversal_report(&p, &o)?;
            cfg.emit_json(&report)?;
            Ok(negative_unless(report.accepted()))
        }
        Command::Standard { partition } => {
            let s = load_partition(&partition)?;
            let o = orient::standard_orientation(&s)?;
            cfg.emit_json(&o)?;
            Ok(negative_unless(o.is_some()))
        }
        Command::Solve {
            partition,
            all,
            cap,
        } => {
            let s = load_partition(&partition)?;
            if all {
                let found = solver::enumerate(&s, cap);
                cfg.emit_json(&found)?;
                return Ok(negative_unless(!found.is_empty()));
            }
            let outcome = solver::solve(&s, cfg.budget);
            eprintln!(
                "cyclorient: {} after {} nodes in {:.3?}",
                outcome.status.as_str(),
                outcome.stats.nodes,
                outcome.stats.elapsed
            );
            cfg.emit_json(&outcome)?;
            Ok(status_code(outcome.status))
        }
        Command::Enumerate { partition, cap } => {
            let s = load_partition(&partition)?;
            let found = solver::enumerate(&s, cap);
            cfg.emit_json(&found)?;
            Ok(negative_unless(!found.is_empty()))
        }
        Command::Blowup(cmd) => match cmd {
            BlowupCommand::Make { base, n, free } => {
                let base = load_partition(&base)?;
                let s = blowup::blow_up_sequence(&base, n, &parse_free(&free)?)?;
                cfg.emit_json(&s)?;
                Ok(EXIT_OK)
            }
            BlowupCommand::Lift {
                base,
                base_order,
                target,
            } => {
                let base = load_partition(&base)?;
                let base_order = load_ordering(&base_order)?;
                let target = load_partition(&target)?;
                match blowup::lift_orientation(&base, &base_order, &target) {
                    Ok(o) => {
                        cfg.emit_json(&o)?;
                        Ok(EXIT_OK)
                    }
                    Err(e @ (Error::NotABlowUp { .. } | Error::BaseOrderRejected)) => {
                        eprintln!("cyclorient: {e}");
                        cfg.emit_json(&Option::<VertexOrdering>::None)?;
                        Ok(EXIT_NEGATIVE)
                    }
                    Err(e) => Err(e.into()),
                }
            }
            BlowupCommand::Detect { partition } => {
                let s = load_partition(&partition)?;
                let found = blowup::detect_blow_up(&s, cfg.budget);
                cfg.emit_json(&found)?;
                Ok(negative_unless(!found.is_empty()))
            }
        },
        Command::Dual { partition } => {
            cfg.emit_json(&load_partition(&partition)?.dual())?;
            Ok(EXIT_OK)
        }
        Command::Classify { partition } => {
            let record = analysis::classify(&load_partition(&partition)?, cfg.budget)?;
            cfg.emit_json(&record)?;
            Ok(status_code(record.status))
        }
        Command::Necessary { partition } => {
            let s = load_partition(&partition)?;
            let pass = analysis::necessary_all(&s);
            cfg.emit_json(&json!({
                "sequence": s,
                "necessary_prefix": analysis::necessary_prefix(&s),
                "necessary_jump": analysis::necessary_jump(&s),
                "size_filter": analysis::size_filter(&s),
                "pass": pass,
            }))?;
            Ok(negative_unless(pass))
        }
        Command::Hamiltonian(cmd) => {
            let (dec, dot) = match cmd {
                HamiltonianCommand::Paths { n, dot } => (constructions::walecki_paths(n)?.1, dot),
                HamiltonianCommand::Cycles { n, dot } => {
                    (constructions::hamiltonian_cycles(n)?, dot)
                }
            };
            dec.verify()?;
            if let Some(path) = dot {
                fs::write(&path, io::decomposition_dot(&dec))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            match cfg.format(&[Format::Json, Format::Dot])? {
                Format::Dot => cfg.emit(&io::decomposition_dot(&dec))?,
                _ => cfg.emit_json(&dec)?,
            }
            Ok(EXIT_OK)
        }
        Command::Sweep { k, n, out } => {
            let format = cfg.format(&[Format::Csv, Format::Json])?;
            let records = with_pool(cfg.jobs, || analysis::sweep(k, n, &cfg.sweep_options()))?;
            let text = match format {
                Format::Json => io::to_json(&records) + "\n",
                _ => io::sweep_to_csv(&records),
            };
            match out {
                Some(path) => {
                    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
                }
                None => cfg.emit(&text)?,
            }
            let exceeded = records
                .iter()
                .filter(|r| r.status == SolveStatus::BudgetExceeded)
                .count();
            if exceeded > 0 {
                eprintln!("cyclorient: {exceeded} instances exceeded the budget");
                return Ok(EXIT_RESOURCE);
            }
            Ok(EXIT_OK)
        }
        Command::Conjecture { k, odd_n } => {
            let report = with_pool(cfg.jobs, || {
                analysis::conjecture_scan(k, &odd_n, &cfg.sweep_options())
            })?;
            cfg.emit_json(&report)?;
            for (s, o) in report.counterexamples() {
                eprintln!("cyclorient: COUNTEREXAMPLE {s} accepts {:?}", o.as_slice());
            }
            if report.rows.iter().any(|r| r.budget_exceeded > 0) {
                return Ok(EXIT_RESOURCE);
            }
            Ok(EXIT_OK)
        }
        Command::ExportDot {
            partition,
            ordering,
        } => {
            cfg.format(&[Format::Dot])?;
            let p = load_partition(&partition)?.labeling();
            let o = ordering.as_deref().map(load_ordering).transpose()?;
            cfg.emit(&io::export_dot(&p, o.as_ref()))?;
            Ok(EXIT_OK)
        }
    }
}

fn with_pool<T: Send>(
    jobs: usize,
    f: impl FnOnce() -> cyclorient::Result<T> + Send,
) -> anyhow::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    Ok(pool.install(f)?)
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::TooLarge { .. } | Error::SpaceTooLarge { .. }) => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::from(EXIT_OK)
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(EXIT_USAGE)
                }
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("cyclorient: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
