//! `hereditary`: batch experiments over hereditary properties of decorated
//! set sequences.

mod config;
mod numbers;
mod run;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hereditary_core::properties::PropertyDescriptor;
use hereditary_core::Family;
use serde_json::{json, Value};

use config::{Command, ExperimentConfig, Format};
use numbers::{parse_count, parse_levels, parse_pattern, parse_real};
use run::{Output, RunError};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "hereditary", version, about = "Extremal entropy, volume, graphon and container experiments")]
struct Cli {
    /// JSON file with one experiment or a list; its fields override flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for sampling; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Record wall-clock time where a report has a column for it.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Subcommand)]
enum Sub {
    /// Goodness and homogeneity counts of a set sequence.
    SseeAudit(SseeAuditArgs),
    /// Extremal entropy by grid search, closed form or across levels.
    Extremal(ExtremalArgs),
    /// Volume of a property at one level.
    Volume(VolumeArgs),
    /// Normalised entropy across levels.
    Trend(TrendArgs),
    /// [k]-graphon entropy, cut distances, sampling and growth rates.
    Graphon(GraphonArgs),
    /// Desk-scale container family and its verification.
    Containers(ContainerArgs),
    /// Pattern-avoiding permutation counts from volumes.
    StanleyWilf(StanleyWilfArgs),
}

#[derive(Args)]
struct PropertyArgs {
    /// lipschitz, metric, weighted, pattern or forb (forb needs --property-json).
    #[arg(long)]
    property: Option<String>,
    /// Full property descriptor as JSON, e.g. '{"kind":"metric"}'.
    #[arg(long)]
    property_json: Option<String>,
    #[arg(long, value_parser = parse_real)]
    c: Option<f64>,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long, value_parser = parse_real)]
    r: Option<f64>,
    /// Pattern for the pattern property, e.g. 132.
    #[arg(long, value_parser = parse_pattern)]
    pi: Option<::std::vec::Vec<u32>>,
}

impl PropertyArgs {
    fn descriptor(&self) -> Result<Option<PropertyDescriptor>, RunError> {
        if let Some(text) = &self.property_json {
            return serde_json::from_str(text)
                .map(Some)
                .map_err(|e| RunError::Usage(format!("--property-json: {e}")));
        }
        let Some(kind) = self.property.as_deref() else {
            return Ok(None);
        };
        let missing = |flag: &str| RunError::Usage(format!("property {kind} needs --{flag}"));
        Ok(Some(match kind {
            "lipschitz" => PropertyDescriptor::Lipschitz {
                c: self.c.ok_or_else(|| missing("c"))?,
            },
            "metric" => PropertyDescriptor::Metric,
            "weighted" => PropertyDescriptor::Weighted {
                s: self.s.ok_or_else(|| missing("s"))?,
                r: self.r.ok_or_else(|| missing("r"))?,
            },
            "pattern" => PropertyDescriptor::Pattern {
                pi: self.pi.clone().ok_or_else(|| missing("pi"))?,
            },
            "forb" => return Err(RunError::Usage("forb properties are given with --property-json".into())),
            other => return Err(RunError::Usage(format!("unknown property '{other}'"))),
        }))
    }
}

#[derive(Args)]
struct Sampling {
    #[arg(long, value_parser = parse_count)]
    samples: Option<u64>,
    #[arg(long, value_parser = parse_count)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SseeAuditArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// Source level N.
    #[arg(long)]
    source: u32,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_parser = parse_levels)]
    levels: Option<::std::vec::Vec<u32>>,
}

#[derive(Args)]
struct ExtremalArgs {
    #[command(flatten)]
    property: PropertyArgs,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    grid_k: Option<u32>,
    /// grid, analytic or monotonicity.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, value_parser = parse_levels)]
    levels: Option<::std::vec::Vec<u32>>,
    /// Search-node budget.
    #[arg(long, value_parser = parse_count)]
    budget: Option<u64>,
}

#[derive(Args)]
struct VolumeArgs {
    #[command(flatten)]
    property: PropertyArgs,
    #[arg(long)]
    n: Option<u32>,
    /// mc or grid-bracket.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    grid_k: Option<u32>,
    #[arg(long, value_parser = parse_count)]
    budget: Option<u64>,
    #[command(flatten)]
    sampling: Sampling,
}

#[derive(Args)]
struct TrendArgs {
    #[command(flatten)]
    property: PropertyArgs,
    #[arg(long, value_parser = parse_levels)]
    levels: Option<::std::vec::Vec<u32>>,
    #[command(flatten)]
    sampling: Sampling,
}

#[derive(Args)]
struct GraphonArgs {
    /// entropy, cut, delta-cut, identity, growth, sample-template or
    /// sample-colouring.
    #[arg(long)]
    op: Option<String>,
    /// Step graphon or coloured graph JSON; the candidate limit for growth.
    #[arg(long)]
    graphon: Option<PathBuf>,
    #[arg(long)]
    other: Option<PathBuf>,
    /// Template JSON over complete-graph edges.
    #[arg(long)]
    template: Option<PathBuf>,
    /// exact or local-search, for cut.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, value_parser = parse_levels)]
    levels: Option<::std::vec::Vec<u32>>,
    /// all or triangle-free.
    #[arg(long)]
    colour_property: Option<String>,
    #[arg(long)]
    colour: Option<u32>,
    #[command(flatten)]
    sampling: Sampling,
}

#[derive(Args)]
struct ContainerArgs {
    #[command(flatten)]
    property: PropertyArgs,
    /// Level N of the forbidden configurations.
    #[arg(long)]
    source: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    grid_k: Option<u32>,
    #[arg(long, value_parser = parse_real)]
    epsilon: Option<f64>,
    /// Badness probes per container.
    #[arg(long, value_parser = parse_count)]
    probes: Option<u64>,
    #[arg(long, value_parser = parse_count)]
    budget: Option<u64>,
    #[arg(long, value_parser = parse_count)]
    seed: Option<u64>,
}

#[derive(Args)]
struct StanleyWilfArgs {
    #[arg(long, value_parser = parse_pattern)]
    pattern: ::std::vec::Vec<u32>,
    #[arg(long, value_parser = parse_levels)]
    levels: ::std::vec::Vec<u32>,
    #[command(flatten)]
    sampling: Sampling,
}

impl Sub {
    fn into_config(self) -> Result<ExperimentConfig, RunError> {
        Ok(match self {
            Sub::SseeAudit(a) => {
                let mut c = ExperimentConfig::new(Command::SseeAudit);
                c.family = Some(a.family);
                c.source = Some(a.source);
                c.n = a.n;
                c.levels = a.levels;
                c
            }
            Sub::Extremal(a) => {
                let mut c = ExperimentConfig::new(Command::Extremal);
                c.property = a.property.descriptor()?;
                c.n = a.n;
                c.grid_k = a.grid_k;
                c.mode = a.mode;
                c.levels = a.levels;
                c.budget = a.budget;
                c
            }
            Sub::Volume(a) => {
                let mut c = ExperimentConfig::new(Command::Volume);
                c.property = a.property.descriptor()?;
                c.n = a.n;
                c.mode = a.mode;
                c.grid_k = a.grid_k;
                c.budget = a.budget;
                c.samples = a.sampling.samples;
                c.seed = a.sampling.seed;
                c
            }
            Sub::Trend(a) => {
                let mut c = ExperimentConfig::new(Command::Trend);
                c.property = a.property.descriptor()?;
                c.levels = a.levels;
                c.samples = a.sampling.samples;
                c.seed = a.sampling.seed;
                c
            }
            Sub::Graphon(a) => {
                let mut c = ExperimentConfig::new(Command::Graphon);
                c.op = a.op;
                c.graphon = a.graphon;
                c.other = a.other;
                c.template = a.template;
                c.mode = a.mode;
                c.n = a.n;
                c.k = a.k;
                c.levels = a.levels;
                c.colour_property = a.colour_property;
                c.colour = a.colour;
                c.samples = a.sampling.samples;
                c.seed = a.sampling.seed;
                c
            }
            Sub::Containers(a) => {
                let mut c = ExperimentConfig::new(Command::Containers);
                c.property = a.property.descriptor()?;
                c.source = a.source;
                c.n = a.n;
                c.grid_k = a.grid_k;
                c.epsilon = a.epsilon;
                c.probes = a.probes;
                c.budget = a.budget;
                c.seed = a.seed;
                c
            }
            Sub::StanleyWilf(a) => {
                let mut c = ExperimentConfig::new(Command::StanleyWilf);
                c.pattern = Some(a.pattern);
                c.levels = Some(a.levels);
                c.samples = a.sampling.samples;
                c.seed = a.sampling.seed;
                c
            }
        })
    }
}

/// Canonical family names, plus `complete-graph`, `hypercube`, `ap` and
/// `order`.
fn parse_family(s: &str) -> Result<Family, String> {
    let canonical = match s {
        "complete-graph" => "complete-graph-edges",
        "hypercube" => "hypercube-vertices",
        "ap" => "arithmetic-progressions",
        "order" => "order-injections",
        other => other,
    };
    Family::ALL
        .into_iter()
        .find(|f| f.name() == canonical)
        .ok_or_else(|| format!("unknown family '{s}'"))
}

fn parse_config(text: &str) -> Result<Vec<ExperimentConfig>, RunError> {
    let bad = |e: serde_json::Error| RunError::Usage(format!("config: {e}"));
    let value: Value = serde_json::from_str(text).map_err(bad)?;
    match value {
        Value::Array(items) => items
            .into_iter()
            .enumerate()
            .map(|(i, v)| serde_json::from_value(v).map_err(|e| RunError::Usage(format!("config entry {}: {e}", i + 1))))
            .collect(),
        v => Ok(vec![serde_json::from_value(v).map_err(bad)?]),
    }
}

/// Builds the CSV or JSON document for a batch of finished runs.
fn render(runs: &[(String, ExperimentConfig, Output)], format: Format, batch: bool) -> Result<Vec<u8>, RunError> {
    match format {
        Format::Json => {
            let items: Vec<Value> = runs
                .iter()
                .map(|(id, cfg, out)| json!({"run_id": id, "config": cfg, "result": out.json}))
                .collect();
            let doc = json!({"tool": "hereditary", "version": VERSION, "runs": items});
            let mut bytes = serde_json::to_vec_pretty(&doc).expect("serialise");
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
            let mut last: Option<&Vec<String>> = None;
            let io = |e: csv::Error| RunError::Io(e.to_string());
            for (id, _, out) in runs {
                if last != Some(&out.header) {
                    let mut header = Vec::new();
                    if batch {
                        header.push("run_id".to_string());
                    }
                    header.extend(out.header.iter().cloned());
                    header.push("version".into());
                    w.write_record(&header).map_err(io)?;
                    last = Some(&out.header);
                }
                for row in &out.rows {
                    let mut record = Vec::new();
                    if batch {
                        record.push(id.clone());
                    }
                    record.extend(row.iter().cloned());
                    record.push(VERSION.into());
                    w.write_record(&record).map_err(io)?;
                }
            }
            w.into_inner().map_err(|e| RunError::Io(e.to_string()))
        }
    }
}

fn execute(cli: Cli) -> Result<(), RunError> {
    let (experiments, batch) = match (&cli.config, cli.command) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
            (parse_config(&text)?, true)
        }
        (None, Some(sub)) => (vec![sub.into_config()?], false),
        (None, None) => return Err(RunError::Usage("give a subcommand or --config (see --help)".into())),
    };
    if experiments.is_empty() {
        return Err(RunError::Usage("config holds no experiments".into()));
    }
    let first = &experiments[0];
    let output = first.output.clone().or(cli.output);
    let format = first.format.or(cli.format).unwrap_or_default();
    let default_workers = std::thread::available_parallelism().map_or(1, |n| n.get());

    let mut runs = Vec::with_capacity(experiments.len());
    for (i, mut cfg) in experiments.into_iter().enumerate() {
        if cli.timing && cfg.timing.is_none() {
            cfg.timing = Some(true);
        }
        let workers = cfg.workers.or(cli.workers).unwrap_or(default_workers).max(1);
        let id = cfg.run_id.clone().unwrap_or_else(|| (i + 1).to_string());
        eprintln!("run {id}: {}", cfg.command.name());
        let out = run::run(&cfg, workers)?;
        runs.push((id, cfg, out));
    }

    let bytes = render(&runs, format, batch)?;
    match output {
        Some(path) => fs::write(&path, bytes).map_err(|e| RunError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(&bytes).map_err(|e| RunError::Io(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match &e {
                RunError::Core(err) if err.is_refusal() => 3,
                RunError::Io(_) => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
