use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dn_core::harness::{run_free, teach_table, verify_error_free, TeachingSchedule};
use dn_core::metrics::{emit_run_metrics, emit_verification_metrics};
use dn_core::{
    fixtures, GroundingMap64, MaintenanceConfig, Network64, NetworkConfig64, Snapshot64,
    TableDocument, TransitionTable,
};

/// Teach, check and run a Developmental Network on finite-automaton tables.
#[derive(Debug, Parser)]
#[command(name = "dn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a built-in table fixture as JSON.
    BuildTable {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(fixtures::NAMES))]
        name: String,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Teach a fresh network every transition of a table.
    Teach(TeachArgs),
    /// Check a taught network against its table.
    Verify {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        snapshot: PathBuf,
        /// Full verification report (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary metrics; written with a .json extension.
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Drive a taught network with an input word and print the decoded states.
    Run {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        snapshot: PathBuf,
        /// Start state; the table's first state when omitted.
        #[arg(long)]
        start: Option<String>,
        /// Input symbols, concatenated or space separated. `AND` stands for `∧`.
        word: Vec<String>,
    },
    /// Summarize a snapshot.
    Inspect {
        #[arg(long)]
        snapshot: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Args)]
struct TeachArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    snapshot: PathBuf,
    /// Number of Y neurons; one per transition when omitted.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    capacity: Option<u64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    epochs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Teaching metrics; written as .csv and .json next to each other.
    #[arg(long)]
    metrics: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    maintenance: Switch,
    #[arg(long, requires = "maintenance")]
    grow_thresh: Option<f64>,
    #[arg(long, requires = "maintenance")]
    trim_thresh: Option<f64>,
}

const ALIASES: [(&str, &str); 1] = [("AND", "∧")];

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("DN_LOG", "warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::BuildTable { name, out } => {
            let doc = fixtures::document(&name).context("unknown table")?;
            match out {
                Some(path) => doc.write(&path)?,
                None => print!("{}", doc.to_json()),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Teach(args) => teach(args),
        Command::Verify {
            table,
            snapshot,
            out,
            metrics,
        } => {
            let (table, map) = load_table(&table)?;
            let net = load_network(&snapshot)?;
            let report = verify_error_free(&net, &table, &map)?;
            println!(
                "{}/{} transitions correct (agreement {})",
                report.total_queries - report.mismatches.len(),
                report.total_queries,
                report.agreement_rate
            );
            for m in &report.mismatches {
                println!(
                    "  ({}, {}): expected {} got {}",
                    m.state, m.input, m.expected, m.got
                );
            }
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&report)? + "\n";
                std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = metrics {
                emit_verification_metrics(&report, &path)?;
            }
            Ok(if report.is_error_free() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Run {
            table,
            snapshot,
            start,
            word,
        } => {
            let (table, map) = load_table(&table)?;
            let net = load_network(&snapshot)?;
            let start = match start {
                Some(s) => s,
                None => table.states().token(0)?.to_string(),
            };
            let inputs: Vec<&str> = table.inputs().tokens().collect();
            let symbols = tokenize(&word.join(" "), &inputs)?;
            let steps = run_free(&net, &map, &start, &symbols)?;
            if !steps.is_empty() {
                let line: Vec<String> = steps
                    .into_iter()
                    .map(|s| s.state.unwrap_or_else(|_| "?".to_string()))
                    .collect();
                println!("{}", line.join(" "));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Inspect { snapshot } => {
            let snap = Snapshot64::load(&snapshot)?;
            let net = Network64::from_snapshot(snap.clone())?;
            let c = net.config();
            println!(
                "format      {} v{} ({})",
                snap.format, snap.version, snap.scalar
            );
            println!("dims        z={} x={}", c.z_dim, c.x_dim);
            println!(
                "neurons     {}/{} initialized, k={}",
                net.initialized_count(),
                c.capacity,
                c.k
            );
            println!("epsilon     {:e}", c.epsilon);
            println!("seed        {}", c.seed);
            println!("time        {}", net.time());
            match &c.maintenance {
                Some(m) => println!(
                    "maintenance on (grow < {}, trim > {})",
                    m.grow_threshold, m.trim_threshold
                ),
                None => println!("maintenance off"),
            }
            for (k, v) in &snap.labels {
                println!("label       {k}: {v}");
            }
            for (j, n) in net
                .neurons()
                .iter()
                .enumerate()
                .filter(|(_, n)| n.is_initialized())
            {
                println!(
                    "  y{j:<4} age {:<6} top {:?} bottom {:?}",
                    n.age(),
                    n.top(),
                    n.bottom()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn teach(args: TeachArgs) -> Result<ExitCode> {
    let (table, map) = load_table(&args.table)?;
    let transitions = table.num_states() * table.num_inputs();
    let capacity = args.capacity.map_or(transitions, |c| c as usize);
    let k = args.k as usize;
    if k > capacity {
        bail!("--k {k} exceeds capacity {capacity}");
    }
    let maintenance = (args.maintenance == Switch::On).then(|| {
        let d = MaintenanceConfig::<f64>::default();
        MaintenanceConfig {
            grow_threshold: args.grow_thresh.unwrap_or(d.grow_threshold),
            trim_threshold: args.trim_thresh.unwrap_or(d.trim_threshold),
        }
    });
    let config = NetworkConfig64::new(map.z_dim(), map.x_dim(), capacity)
        .with_k(k)
        .with_seed(args.seed)
        .with_maintenance(maintenance);
    let mut net = Network64::new(config)?;
    let schedule = TeachingSchedule::table_sweep(args.epochs as usize);
    let report = teach_table(&mut net, &table, &map, &schedule)?;

    let mut labels = BTreeMap::new();
    labels.insert("table".to_string(), args.table.display().to_string());
    if capacity < transitions {
        labels.insert(
            "provisioning".to_string(),
            format!("under-provisioned: capacity {capacity} < {transitions} transitions"),
        );
        log::warn!("capacity {capacity} is below the {transitions} table transitions");
    }
    net.snapshot_with_labels(labels).save(&args.snapshot)?;
    if let Some(path) = &args.metrics {
        emit_run_metrics(&report, path)?;
    }
    println!(
        "taught {} steps, {} recruits, {}/{} neurons initialized",
        report.steps.len(),
        report.recruit_count,
        net.initialized_count(),
        capacity
    );
    Ok(ExitCode::SUCCESS)
}

fn load_table(path: &Path) -> Result<(TransitionTable, GroundingMap64)> {
    let doc = TableDocument::read(path)?;
    Ok(doc.load_grounded()?)
}

fn load_network(path: &Path) -> Result<Network64> {
    Ok(Network64::from_snapshot(Snapshot64::load(path)?)?)
}

/// Splits a word into input symbols by greedy longest match; whitespace
/// separates but is otherwise ignored.
fn tokenize(word: &str, inputs: &[&str]) -> Result<Vec<String>> {
    let mut vocab: Vec<(&str, &str)> = inputs.iter().map(|&s| (s, s)).collect();
    vocab.extend(ALIASES.iter().filter(|(_, t)| inputs.contains(t)).copied());
    vocab.sort_by_key(|(spelling, _)| std::cmp::Reverse(spelling.len()));
    let mut out = Vec::new();
    let mut rest = word.trim_start();
    while !rest.is_empty() {
        let Some((spelling, token)) = vocab.iter().find(|(s, _)| rest.starts_with(s)) else {
            let bad: String = rest.chars().take_while(|c| !c.is_whitespace()).collect();
            bail!("unknown input symbol in {bad:?}");
        };
        out.push(token.to_string());
        rest = rest[spelling.len()..].trim_start();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TASK1: [&str; 3] = ["T", "F", "∧"];

    #[test]
    fn tokenize_glued_and_spaced() {
        let want = ["T", "∧", "F", "∧", "T", "∧", "T"];
        assert_eq!(tokenize("T∧F∧T∧T", &TASK1).unwrap(), want);
        assert_eq!(tokenize("T AND F AND T AND T", &TASK1).unwrap(), want);
        assert_eq!(tokenize("TANDF", &TASK1).unwrap(), ["T", "∧", "F"]);
        assert!(tokenize("", &TASK1).unwrap().is_empty());
        assert!(tokenize("T X", &TASK1).is_err());
    }

    #[test]
    fn tokenize_prefers_longest_symbol() {
        assert_eq!(tokenize("s3T", &["s", "s3", "T"]).unwrap(), ["s3", "T"]);
        assert_eq!(tokenize("s s3", &["s", "s3"]).unwrap(), ["s", "s3"]);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
