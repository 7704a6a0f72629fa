//! `rhea-bench` — run agent tournaments, regenerate reports from saved
//! results, and replay single episodes with a per-tick trace.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rhea_bench::config::{parse_agents, parse_games, parse_levels, RunSpec};
use rhea_bench::matrix::run_matrix;
use rhea_bench::persist::{canonical_csv, read_results, write_results, OutputFormat};
use rhea_bench::report::{render_report, summarize};
use rhea_bench::episode::run_episode_with;
use rhea_core::agents::AgentVariant;
use rhea_core::games::GameId;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "rhea-bench",
    version,
    about = "Budget-bounded planning tournaments on small grid games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a tournament matrix and write records plus a report.
    Run(RunArgs),
    /// Rebuild the report from previously saved records.
    Report(ReportArgs),
    /// Play one episode, optionally tracing every tick.
    Play(PlayArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> OutputFormat {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated agent ids (e.g. vanilla,stat-tree-seeding).
    #[arg(long)]
    agents: Option<String>,
    /// Comma-separated game ids (e.g. d-escape,s-zombies).
    #[arg(long)]
    games: Option<String>,
    /// Level indices: single, list, or range (e.g. 0-4 or 0,2).
    #[arg(long)]
    levels: Option<String>,
    /// Repetitions per (agent, game, level) cell.
    #[arg(long)]
    reps: Option<u32>,
    /// Base seed; every episode derives its own stream from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Forward-model calls allowed per decision.
    #[arg(long)]
    budget: Option<u32>,
    /// Override every level's tick limit.
    #[arg(long)]
    max_ticks: Option<u32>,
    /// Output directory for records and report.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Format of the records file.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
}

#[derive(Args)]
struct ReportArgs {
    /// Records file written by `run` (.csv or .json).
    #[arg(long = "in")]
    input: PathBuf,
    /// Directory the report is written into.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct PlayArgs {
    #[arg(long)]
    agent: AgentVariant,
    #[arg(long)]
    game: GameId,
    #[arg(long, default_value_t = 0)]
    level: u8,
    /// Episode seed; used directly, not derived.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = rhea_core::budget::DEFAULT_BUDGET)]
    budget: u32,
    /// Override the level's tick limit.
    #[arg(long)]
    max_ticks: Option<u32>,
    /// Print one line per tick: action, budget spent, score, status.
    #[arg(long)]
    trace: bool,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Report(args) => report(args),
        Command::Play(args) => play(args),
    }
}

fn build_spec(args: &RunArgs) -> Result<RunSpec> {
    let mut spec = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            RunSpec::from_config_text(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
        }
        None => RunSpec::default(),
    };
    if let Some(agents) = &args.agents {
        spec.agents = parse_agents(agents)?;
    }
    if let Some(games) = &args.games {
        spec.games = parse_games(games)?;
    }
    if let Some(levels) = &args.levels {
        spec.levels = parse_levels(levels)?;
    }
    if let Some(reps) = args.reps {
        spec.repetitions = reps;
    }
    if let Some(seed) = args.seed {
        spec.base_seed = seed;
    }
    if let Some(budget) = args.budget {
        spec.budget = budget;
    }
    if args.max_ticks.is_some() {
        spec.max_ticks = args.max_ticks;
    }
    spec.validate()?;
    Ok(spec)
}

fn run(args: RunArgs) -> Result<()> {
    let spec = build_spec(&args)?;
    let episodes = spec.episode_count();
    eprintln!(
        "running {episodes} episodes: {} agents x {} games x {} levels x {} reps (budget {}, seed {}, {} thread{})",
        spec.agents.len(),
        spec.games.len(),
        spec.levels.len(),
        spec.repetitions,
        spec.budget,
        spec.base_seed,
        args.parallel.max(1),
        if args.parallel.max(1) == 1 { "" } else { "s" },
    );

    let started = Instant::now();
    let output = run_matrix(&spec, args.parallel);
    let elapsed = started.elapsed();
    eprintln!(
        "finished {} episodes in {:.1}s ({} failed)",
        output.records.len(),
        elapsed.as_secs_f64(),
        output.failures.len()
    );

    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating output dir {}", args.out.display()))?;
    let format: OutputFormat = args.format.into();
    let records_path = args.out.join(format!("results.{}", format.extension()));
    write_results(&output.records, &records_path, format)?;
    let canonical_path = args.out.join("canonical.csv");
    fs::write(&canonical_path, canonical_csv(&output.records))
        .with_context(|| format!("writing {}", canonical_path.display()))?;
    eprintln!("records:   {}", records_path.display());
    eprintln!("canonical: {}", canonical_path.display());

    if !output.failures.is_empty() {
        let failures_path = args.out.join("failures.txt");
        let mut text = String::new();
        for f in &output.failures {
            text.push_str(&format!(
                "{} {} level {} rep {}: {}\n",
                f.agent, f.game, f.level, f.rep, f.message
            ));
        }
        fs::write(&failures_path, text)
            .with_context(|| format!("writing {}", failures_path.display()))?;
        eprintln!("failures:  {}", failures_path.display());
    }

    match summarize(&output.records) {
        Ok(bundle) => {
            let text = render_report(&bundle);
            let report_path = args.out.join("report.txt");
            fs::write(&report_path, &text)
                .with_context(|| format!("writing {}", report_path.display()))?;
            eprintln!("report:    {}\n", report_path.display());
            print!("{text}");
        }
        Err(e) => eprintln!("records saved, but no report: {e}"),
    }

    if output.failures.is_empty() {
        Ok(())
    } else {
        bail!("{} of {episodes} episodes failed", output.failures.len());
    }
}

fn report(args: ReportArgs) -> Result<()> {
    let records = read_results(&args.input)?;
    let bundle = summarize(&records)
        .with_context(|| format!("summarizing {}", args.input.display()))?;
    let text = render_report(&bundle);
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating output dir {}", args.out.display()))?;
    let report_path = args.out.join("report.txt");
    fs::write(&report_path, &text)
        .with_context(|| format!("writing {}", report_path.display()))?;
    eprintln!("report: {}\n", report_path.display());
    print!("{text}");
    Ok(())
}

fn play(args: PlayArgs) -> Result<()> {
    let trace = args.trace;
    let record = run_episode_with(
        args.agent,
        args.game,
        args.level,
        args.seed,
        args.budget,
        args.max_ticks,
        |t| {
            if trace {
                println!(
                    "tick {:>4}  {:<6}  used {:>4}  score {:>8.2}  {:?}",
                    t.tick,
                    t.action.to_string(),
                    t.used,
                    t.score,
                    t.status
                );
            }
        },
    )?;
    println!(
        "{} on {} level {} (seed {}): {} | score {} | {} ticks | {} forward-model calls | {} ms",
        record.agent,
        record.game,
        record.level,
        record.seed,
        if record.win == 1 { "WIN" } else { "LOSS" },
        record.score,
        record.ticks,
        record.fm_calls,
        record.wall_ms
    );
    Ok(())
}
