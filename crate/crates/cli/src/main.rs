use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use unispec_cli::config::{ExperimentConfig, GroupConfig, Kind, WordMetricSection};
use unispec_cli::report::Record;
use unispec_cli::{run, verify_bundle, CliError};

#[derive(Parser)]
#[command(
    name = "unispec",
    version,
    about = "Entropy, specification and chaos experiments for group actions"
)]
struct Cli {
    /// worker threads for the engines
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// node budget of the exact entropy solvers
    #[arg(long, global = true)]
    budget_nodes: Option<u64>,
    /// seed for drawn samples; overrides the config
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write its report bundle
    Run {
        config: PathBuf,
        /// bundle directory; defaults to the config's output.dir, then out/<name>
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in gallery system
    Gallery {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check every witness in a bundle; exits 1 if any check fails
    Verify { bundle: PathBuf },
    /// Word distance between two elements of a named group
    WordMetric { group: String, a: String, b: String },
}

fn apply_flags(cfg: &mut ExperimentConfig, cli: &Cli) -> Result<(), CliError> {
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(b) = cli.budget_nodes {
        if let Some(e) = cfg.entropy.as_mut() {
            e.budget_nodes = Some(b);
        }
        if let Some(g) = cfg.gallery.as_mut() {
            g.budget_nodes = Some(b);
        }
    }
    cfg.validate()
}

fn out_dir(cfg: &ExperimentConfig, flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| cfg.output.as_ref().map(|o| PathBuf::from(&o.dir)))
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name))
}

fn run_and_write(mut cfg: ExperimentConfig, cli: &Cli, out: &Option<PathBuf>) -> Result<(), CliError> {
    apply_flags(&mut cfg, cli)?;
    let dir = out_dir(&cfg, out);
    let bundle = run(&cfg)?;
    let header = bundle.write(&dir)?;
    for line in &bundle.log {
        println!("{line}");
    }
    println!("bundle {} digest {}", dir.display(), header.digest);
    Ok(())
}

fn main_inner(cli: &Cli) -> Result<ExitCode, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Run { config, out } => run_and_write(ExperimentConfig::load(config)?, cli, out)?,
        Command::Gallery { name, out } => run_and_write(ExperimentConfig::gallery(name), cli, out)?,
        Command::Verify { bundle } => {
            let report = verify_bundle(bundle)?;
            for f in &report.failures {
                match f.record {
                    Some(i) => eprintln!("FAIL record {i} ({}): {}", f.kind, f.detail),
                    None => eprintln!("FAIL {}: {}", f.kind, f.detail),
                }
                if let Some(t) = &f.text {
                    eprintln!("  {t}");
                }
            }
            println!("{} ({} records checked)", report.ok(), report.checked);
            if !report.ok() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::WordMetric { group, a, b } => {
            let mut cfg = ExperimentConfig {
                kind: Kind::WordMetric,
                group: Some(GroupConfig {
                    name: Some(group.clone()),
                    table: None,
                    generators: None,
                }),
                word_metric: Some(WordMetricSection {
                    a: a.clone(),
                    b: b.clone(),
                }),
                ..ExperimentConfig::gallery("word-metric")
            };
            cfg.gallery = None;
            cfg.validate()?;
            let bundle = run(&cfg)?;
            for r in &bundle.records {
                if let Record::WordMetric(w) = r {
                    match &w.word {
                        Some(word) => println!("{} (via {})", w.distance, word.join(" ")),
                        None => println!("{}", w.distance),
                    }
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
