//! Command-line driver: configuration bootstrap, dataset generation,
//! validation and summaries.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use venuesim::config::ConfigTree;
use venuesim::dynamics::FormulaMode;
use venuesim::events::executor::build_plan;
use venuesim::generate::generate_to_dir;
use venuesim::pipeline::read_csv;
use venuesim::profile::{EventSelection, GenOptions, Profile};
use venuesim::routing::GridGraph;
use venuesim::timebase::wallclock;
use venuesim::validate::{validate_all, DetectorParams, Waivers, EVENT_IDS};

#[derive(Parser)]
#[command(name = "venuesim", version, about = "Indoor crowd movement trajectory dataset generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the default configuration tree (map, schedule, event scripts).
    Init {
        /// Target directory for the configuration files.
        #[arg(long)]
        out: PathBuf,
        /// Overwrite an existing non-empty directory.
        #[arg(long)]
        force: bool,
    },
    /// Generate a dataset: CSV, ground truth and profile.
    Generate(GenerateArgs),
    /// Check a dataset for physical consistency and event fingerprints.
    Validate(ValidateArgs),
    /// Summarize a dataset.
    Stats(StatsArgs),
    /// Inspect event scripts.
    Events {
        #[command(subcommand)]
        command: EventsCommand,
    },
}

#[derive(Subcommand)]
enum EventsCommand {
    /// List the scripts of a configuration.
    List {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// Configuration directory (see `init`).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for dataset.csv, ground_truth.json and profile.json.
    #[arg(long)]
    out: PathBuf,
    /// Master seed; everything is a pure function of (config, seed, scale, days, events).
    #[arg(long, default_value_t = 20190422)]
    seed: u64,
    /// Roster scale factor (1.0 = full size).
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Days to simulate, comma separated.
    #[arg(long, default_value = "1,2,3", value_delimiter = ',')]
    days: Vec<u8>,
    /// Enabled event scripts: "all", "none", or comma-separated ids.
    #[arg(long, default_value = "all")]
    events: String,
    /// Render the time column as `day hh:mm:ss` instead of absolute seconds.
    #[arg(long)]
    wallclock: bool,
    /// Run the published update recurrences literally (audit mode).
    #[arg(long)]
    literal_formulas: bool,
    /// Also write the movement-intent log as CSV.
    #[arg(long)]
    intent_log: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Configuration directory the dataset was generated from.
    #[arg(long)]
    config: PathBuf,
    /// Output directory of `generate` (or an explicit CSV path).
    #[arg(long)]
    data: PathBuf,
    /// Profile file; defaults to profile.json next to the dataset.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Exit nonzero unless findings match the enabled events exactly.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct StatsArgs {
    /// Dataset CSV or the output directory of `generate`.
    #[arg(long)]
    data: PathBuf,
    /// Profile file for per-type breakdowns; defaults to profile.json next to
    /// the dataset.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Also write the per-zone occupancy series as CSV.
    #[arg(long)]
    zones_out: Option<PathBuf>,
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Init { out, force } => {
            let tree = venuesim::config::default_tree();
            tree.save(&out, force)
                .with_context(|| format!("writing config to {}", out.display()))?;
            tree.validate().context("validating the written config")?;
            println!(
                "wrote default configuration to {} ({} activities, {} event scripts)",
                out.display(),
                tree.schedule.activities.len(),
                tree.scripts.len()
            );
            Ok(())
        }
        Command::Generate(args) => cmd_generate(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Events {
            command: EventsCommand::List { config },
        } => {
            let tree = ConfigTree::load(&config)?;
            for s in &tree.scripts {
                println!("{}: {} ({} directives, {} patches)", s.id, s.name, s.directives.len(), s.patches.len());
                println!("    {}", s.narrative);
            }
            Ok(())
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> anyhow::Result<()> {
    let tree = ConfigTree::load(&args.config)
        .with_context(|| format!("loading config from {}", args.config.display()))?;
    let opts = GenOptions {
        seed: args.seed,
        scale: args.scale,
        days: args.days.clone(),
        events: EventSelection::parse(&args.events),
        formula_mode: args.literal_formulas.then_some(FormulaMode::Literal),
    };
    let out = generate_to_dir(&tree, &opts, &args.out, args.wallclock)?;
    if let Some(path) = &args.intent_log {
        write_intents(&out.intents, path)?;
    }
    let s = &out.summary;
    println!("people: {}", s.people);
    println!("activities: {}", s.activities);
    println!("enabled events: {}", s.enabled_events.join(","));
    println!("background records: {}", s.background_records);
    println!("abnormal records: {}", s.abnormal_records);
    println!("final records: {}", s.final_records);
    println!("unique pids: {}", s.unique_pids);
    println!("person-seconds inside: {}", s.person_seconds);
    println!("dataset: {}", args.out.join("dataset.csv").display());
    Ok(())
}

fn write_intents(intents: &[venuesim::sim::MoveIntent], path: &Path) -> anyhow::Result<()> {
    use std::io::Write;
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "t,pid,kind,target,reason")?;
    for i in intents {
        writeln!(
            w,
            "{},{},{},{},{}",
            i.issued_at,
            i.pid,
            serde_json::to_value(i.kind)?.as_str().unwrap_or_default(),
            i.target.map(|t| t.to_string()).unwrap_or_default(),
            serde_json::to_value(i.reason)?.as_str().unwrap_or_default(),
        )?;
    }
    Ok(())
}

fn locate(data: &Path, default_name: &str, explicit: Option<&Path>) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None if data.is_dir() => data.join(default_name),
        None => data
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(default_name),
    }
}

fn cmd_validate(args: ValidateArgs) -> anyhow::Result<()> {
    let tree = ConfigTree::load(&args.config)?;
    let csv = if args.data.is_dir() {
        args.data.join("dataset.csv")
    } else {
        args.data.clone()
    };
    let profile_path = locate(&args.data, "profile.json", args.profile.as_deref());
    let profile = Profile::load(&profile_path)
        .with_context(|| format!("loading profile {}", profile_path.display()))?;
    let records = read_csv(&csv).with_context(|| format!("reading {}", csv.display()))?;

    let map = profile.build_map()?;
    let graph = GridGraph::build(&map);
    let enabled: Vec<_> = tree
        .scripts
        .iter()
        .filter(|s| profile.enabled_events.contains(&s.id))
        .collect();
    let plan = build_plan(&profile, &map, &graph, &enabled)?;
    let waivers = Waivers::from_plan(&plan);
    let report = validate_all(
        &records,
        &profile,
        &map,
        &graph,
        &waivers,
        &DetectorParams::default(),
    )?;

    println!("records: {}", records.len());
    println!("physical findings: {}", report.physical.len());
    for f in &report.physical {
        println!(
            "  [{}] {} pids={:?} {}",
            f.check,
            wallclock(f.window.start),
            f.pids,
            f.message
        );
    }
    let mut unexpected = report.physical.len();
    let mut missing = Vec::new();
    for id in EVENT_IDS {
        let findings = &report.events[id];
        let enabled = profile.enabled_events.iter().any(|e| e == id);
        let status = match (enabled, findings.is_empty()) {
            (true, false) => "detected",
            (true, true) => {
                missing.push(id);
                "MISSING"
            }
            (false, true) => "quiet",
            (false, false) => {
                unexpected += findings.len();
                "UNEXPECTED"
            }
        };
        println!("{id}: {} findings [{status}]", findings.len());
        for f in findings {
            let pids: Vec<u32> = f.pids.iter().take(10).copied().collect();
            println!(
                "    {} .. {} pids({})={:?} {}",
                wallclock(f.window.start),
                wallclock(f.window.end),
                f.pids.len(),
                pids,
                f.message
            );
        }
    }
    if args.strict && (unexpected > 0 || !missing.is_empty()) {
        bail!(
            "strict validation failed: {unexpected} unexpected findings, missing detections: {missing:?}"
        );
    }
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> anyhow::Result<()> {
    let csv = if args.data.is_dir() {
        args.data.join("dataset.csv")
    } else {
        args.data.clone()
    };
    let records = read_csv(&csv)?;
    let profile_path = locate(&args.data, "profile.json", args.profile.as_deref());
    let profile = Profile::load(&profile_path).ok();
    let map = match &profile {
        Some(p) => p.build_map()?,
        None => venuesim::config::build_map(&venuesim::config::default_map_file())?,
    };
    let stats = venuesim::stats::summarize(&records, &map, profile.as_ref());
    println!("{}", serde_json::to_string_pretty(&stats)?);
    if let Some(path) = &args.zones_out {
        use std::io::Write;
        let rows = venuesim::stats::zone_series(&records, &map);
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "t,zone,occupancy")?;
        for r in rows {
            writeln!(w, "{},{},{}", r.t, r.zone, r.occupancy)?;
        }
        println!("zone series: {}", path.display());
    }
    Ok(())
}
