//! `insertion`: generate, compile, check, simulate and analyze insertion
//! systems.
//!
//! Exit status is 0 on success, 1 when a check fails and 2 on usage, parse
//! or I/O errors.

mod manifest;

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use insertion_core::analyzer::{event_stats, events_from_steps, SequenceReport, SiteClass};
use insertion_core::constructions::{
    gen_counter_system, gen_doubling_system, gen_doubling_system_biased, gen_fast_system,
};
use insertion_core::enumerator::{
    check_deterministic_leftmost, check_deterministic_sites, check_growth_deterministic,
    enumerate, enumerate_leftmost, Bounds, DeterminismVerdict, Witness,
};
use insertion_core::format::{parse_system, write_system};
use insertion_core::grammar::{parse_grammar, to_cnf, to_insertion_system, to_integer_pair};
use insertion_core::kinetics::{
    simulate, trial_seed, trials, SimConfig, Stop, TrialStats, DEFAULT_MAX_EVENTS,
};
use insertion_core::{InsertionSystem, MonomerId, Polymer};

use manifest::RunManifest;

#[derive(Parser)]
#[command(name = "insertion", version, about = "Insertion systems: generate, check, simulate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one of the built-in systems.
    Generate(GenerateArgs),
    /// Compile a context-free grammar into an insertion system.
    CompileGrammar(CompileArgs),
    /// List reachable polymers up to a length bound.
    Enumerate(EnumerateArgs),
    /// Determinism checks.
    Check {
        #[command(subcommand)]
        check: CheckCommand,
    },
    /// One seeded Gillespie run, written as a trace.
    Simulate(SimulateArgs),
    /// Many seeded runs, written as per-trial rows.
    Bench(BenchArgs),
    /// Site classes and lineage statistics of traces.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Counter,
    Fast,
    Doubling,
}

#[derive(Args)]
struct GenerateArgs {
    kind: Kind,
    #[arg(long)]
    r: Option<u32>,
    /// Concentration of the growing doubling type.
    #[arg(long)]
    growth: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    grammar: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    system: PathBuf,
    #[arg(long, default_value_t = 20)]
    max_len: usize,
    #[arg(long, default_value_t = 1_000_000)]
    max_count: usize,
    /// Only expand the leftmost live site (still finds every terminal).
    #[arg(long)]
    leftmost: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Is there exactly one terminal polymer that every run reaches?
    Det(DetArgs),
    /// Does at most one type per branching site allow further growth?
    GrowthDet(GrowthArgs),
}

#[derive(Args)]
struct DetArgs {
    system: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    max_sites: usize,
    /// Also run the polymer-level check.
    #[arg(long)]
    full: bool,
    #[arg(long, default_value_t = 10_000)]
    max_len: usize,
    #[arg(long, default_value_t = 1_000_000)]
    max_count: usize,
}

#[derive(Args)]
struct GrowthArgs {
    system: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    max_sites: usize,
}

#[derive(Args)]
struct SeedArg {
    /// Master seed; falls back to INSERTION_SEED, then 0.
    #[arg(long, env = "INSERTION_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    system: PathBuf,
    #[command(flatten)]
    seed: SeedArg,
    /// Stop once the polymer has this many monomers; default is to run
    /// until terminal.
    #[arg(long)]
    target_length: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MAX_EVENTS)]
    max_events: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    system: PathBuf,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// May be repeated; each target gets its own set of trials.
    #[arg(long)]
    target_length: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_MAX_EVENTS)]
    max_events: u64,
    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Per-trial rows.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-target summary rows.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    system: PathBuf,
    /// A trace written by `simulate`; without it, fresh traces are simulated.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long)]
    target_length: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MAX_EVENTS)]
    max_events: u64,
    /// `class,count` rows.
    #[arg(long)]
    out: Option<PathBuf>,
    /// One row per lineage.
    #[arg(long)]
    lineages: Option<PathBuf>,
}

enum Status {
    Ok,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<Status> {
    match command {
        Command::Generate(a) => generate(a),
        Command::CompileGrammar(a) => compile_grammar(a),
        Command::Enumerate(a) => enumerate_cmd(a),
        Command::Check {
            check: CheckCommand::Det(a),
        } => check_det(a),
        Command::Check {
            check: CheckCommand::GrowthDet(a),
        } => check_growth(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Bench(a) => bench(a),
        Command::Analyze(a) => analyze(a),
    }
}

fn read_input(path: &Path, manifest: &mut RunManifest) -> Result<String> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    manifest.add_input(path, text.as_bytes());
    Ok(text)
}

fn load_system(path: &Path, manifest: &mut RunManifest) -> Result<InsertionSystem> {
    let text = read_input(path, manifest)?;
    parse_system(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Writes to `out` plus its manifest, or to stdout.
fn emit(out: Option<&Path>, bytes: &[u8], manifest: &RunManifest) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
            manifest.write_beside(path)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| anyhow!("{e}"))
}

fn time(t: f64) -> String {
    format!("{t:.9}")
}

fn ids(p: &Polymer) -> String {
    p.ids()
        .iter()
        .map(|m| m.0.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn generate(a: GenerateArgs) -> Result<Status> {
    let manifest = RunManifest::new("generate", None);
    let sys = match a.kind {
        Kind::Counter => gen_counter_system(a.r.context("--r is required")?)?,
        Kind::Fast => gen_fast_system(a.r.context("--r is required")?)?,
        Kind::Doubling => match a.growth {
            Some(g) => gen_doubling_system_biased(g)?,
            None => gen_doubling_system(),
        },
    };
    emit(a.out.as_deref(), write_system(&sys).as_bytes(), &manifest)?;
    Ok(Status::Ok)
}

fn compile_grammar(a: CompileArgs) -> Result<Status> {
    let mut manifest = RunManifest::new("compile-grammar", None);
    let text = read_input(&a.grammar, &mut manifest)?;
    let g = parse_grammar(&text).with_context(|| format!("parsing {}", a.grammar.display()))?;
    let cnf = to_cnf(&g)?;
    let pair = to_integer_pair(&cnf)?;
    let compiled = to_insertion_system(&pair);
    let mut out = String::new();
    out.push_str(&format!(
        "# {} nonterminals after CNF; {} pair rules\n",
        pair.modulus,
        pair.size()
    ));
    out.push_str(&format!("# kappa {}\n", compiled.expression.kappa));
    for (sym, t) in &compiled.expression.per_symbol {
        out.push_str(&format!("# g {sym} {t}\n"));
    }
    out.push_str(&write_system(&compiled.system));
    emit(a.out.as_deref(), out.as_bytes(), &manifest)?;
    Ok(Status::Ok)
}

fn enumerate_cmd(a: EnumerateArgs) -> Result<Status> {
    let mut manifest = RunManifest::new("enumerate", None);
    let sys = load_system(&a.system, &mut manifest)?;
    let bounds = Bounds::new(a.max_len, a.max_count);
    let reach = if a.leftmost {
        enumerate_leftmost(&sys, bounds)
    } else {
        enumerate(&sys, bounds)
    };
    let rows = reach
        .polymers
        .iter()
        .zip(&reach.terminal)
        .map(|(p, &t)| vec![p.len().to_string(), t.to_string(), ids(p)]);
    let bytes = csv_bytes(&["length", "terminal", "monomers"], rows)?;
    emit(a.out.as_deref(), &bytes, &manifest)?;
    eprintln!(
        "polymers={} terminal={} truncated={}",
        reach.len(),
        reach.terminal_count(),
        reach.truncated
    );
    Ok(Status::Ok)
}

fn describe(sys: &InsertionSystem, v: &DeterminismVerdict) -> String {
    match v {
        DeterminismVerdict::Deterministic { length, .. } => format!("deterministic length={length}"),
        DeterminismVerdict::NotDeterministic(Witness::AmbiguousSite { site, types }) => {
            let list: Vec<String> = types
                .iter()
                .map(|&m| format!("{} {}", m, sys.monomer(m)))
                .collect();
            format!("not deterministic: site {site} accepts {}", list.join(", "))
        }
        DeterminismVerdict::NotDeterministic(Witness::TwoTerminals(p, q)) => format!(
            "not deterministic: terminal polymers [{}] and [{}]",
            ids(p),
            ids(q)
        ),
        DeterminismVerdict::Inconclusive(why) => format!("inconclusive: {why}"),
    }
}

fn check_det(a: DetArgs) -> Result<Status> {
    let mut manifest = RunManifest::new("check det", None);
    let sys = load_system(&a.system, &mut manifest)?;
    let sites = check_deterministic_sites(&sys, a.max_sites);
    println!("site-level: {}", describe(&sys, &sites));
    let mut ok = sites.is_deterministic();
    if a.full {
        let full = check_deterministic_leftmost(&sys, Bounds::new(a.max_len, a.max_count), a.max_sites);
        println!("polymer-level: {}", describe(&sys, &full));
        ok &= full.is_deterministic();
        if let (
            DeterminismVerdict::Deterministic { length: x, .. },
            DeterminismVerdict::Deterministic { length: y, .. },
        ) = (&sites, &full)
        {
            if x != y {
                println!("length mismatch: {x} vs {y}");
                ok = false;
            }
        }
    }
    Ok(if ok { Status::Ok } else { Status::CheckFailed })
}

fn check_growth(a: GrowthArgs) -> Result<Status> {
    let mut manifest = RunManifest::new("check growth-det", None);
    let sys = load_system(&a.system, &mut manifest)?;
    let v = check_growth_deterministic(&sys, a.max_sites);
    println!(
        "sites={} branching={} violations={} truncated={} finite={}",
        v.sites_checked,
        v.branching_sites,
        v.violations.len(),
        v.truncated,
        v.is_finite()
    );
    for viol in &v.violations {
        let growing: Vec<String> = viol.growing.iter().map(MonomerId::to_string).collect();
        println!("violation: site {} growing types {}", viol.site, growing.join(" "));
    }
    Ok(if v.is_growth_deterministic() {
        Status::Ok
    } else {
        Status::CheckFailed
    })
}

fn stop_for(target: Option<usize>) -> Stop {
    target.map_or(Stop::Terminal, Stop::TargetLength)
}

fn simulate_cmd(a: SimulateArgs) -> Result<Status> {
    let mut manifest = RunManifest::new("simulate", Some(a.seed.seed));
    let sys = load_system(&a.system, &mut manifest)?;
    let cfg = SimConfig::new(a.seed.seed, stop_for(a.target_length)).with_max_events(a.max_events);
    let trace = simulate(&sys, &cfg)?;
    let rows = trace.events.iter().enumerate().map(|(k, e)| {
        vec![
            k.to_string(),
            time(e.time),
            e.site_index.to_string(),
            e.monomer.0.to_string(),
        ]
    });
    let bytes = csv_bytes(&["event", "time", "site_index", "monomer_id"], rows)?;
    emit(a.out.as_deref(), &bytes, &manifest)?;
    eprintln!(
        "outcome={} events={} time={} length={}",
        trace.outcome.as_str(),
        trace.events.len(),
        time(trace.final_time),
        trace.final_polymer.len()
    );
    Ok(Status::Ok)
}

fn target_label(stop: Stop) -> String {
    match stop {
        Stop::TargetLength(n) => n.to_string(),
        _ => "terminal".to_string(),
    }
}

fn summary_row(system: &Path, label: &str, stats: &TrialStats) -> Vec<String> {
    let mut row = vec![
        system.display().to_string(),
        label.to_string(),
        stats.n.to_string(),
        stats.completed.to_string(),
    ];
    match &stats.times {
        Some(t) => {
            row.push(time(t.mean));
            row.push(t.variance.map(time).unwrap_or_default());
            row.push(time(t.median));
            for &(_, q) in &t.quantiles {
                row.push(time(q));
            }
            row.push(time(t.min));
            row.push(time(t.max));
        }
        None => row.extend(std::iter::repeat_n(String::new(), 11)),
    }
    row
}

fn bench(a: BenchArgs) -> Result<Status> {
    let mut manifest = RunManifest::new("bench", Some(a.seed.seed));
    let sys = load_system(&a.system, &mut manifest)?;
    if a.trials == 0 {
        bail!("--trials must be positive");
    }
    let stops: Vec<Stop> = if a.target_length.is_empty() {
        vec![Stop::Terminal]
    } else {
        a.target_length.iter().map(|&n| Stop::TargetLength(n)).collect()
    };
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for stop in stops {
        let cfg = SimConfig::new(a.seed.seed, stop).with_max_events(a.max_events);
        let stats = trials(&sys, &cfg, a.trials, a.jobs)?;
        let label = target_label(stop);
        for (i, s) in stats.samples.iter().enumerate() {
            rows.push(vec![
                label.clone(),
                i.to_string(),
                trial_seed(a.seed.seed, i as u64).to_string(),
                time(s.time),
                s.length.to_string(),
                s.events.to_string(),
                s.outcome.as_str().to_string(),
            ]);
        }
        match &stats.times {
            Some(t) => eprintln!(
                "target={label} completed={}/{} mean={} median={}",
                stats.completed,
                stats.n,
                time(t.mean),
                time(t.median)
            ),
            None => eprintln!("target={label} completed=0/{}", stats.n),
        }
        summaries.push(summary_row(&a.system, &label, &stats));
    }
    let bytes = csv_bytes(
        &["target", "trial", "seed", "time", "length", "events", "outcome"],
        rows,
    )?;
    emit(a.out.as_deref(), &bytes, &manifest)?;
    if let Some(path) = &a.summary {
        let header = [
            "system", "target", "n", "completed", "mean", "variance", "median", "q05", "q25", "q50", "q75",
            "q95", "q99", "min", "max",
        ];
        let bytes = csv_bytes(&header, summaries)?;
        emit(Some(path), &bytes, &manifest)?;
    }
    Ok(Status::Ok)
}

fn read_trace(path: &Path, manifest: &mut RunManifest) -> Result<Vec<(f64, usize, MonomerId)>> {
    let text = read_input(path, manifest)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut steps = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| {
            record
                .get(i)
                .ok_or_else(|| anyhow!("row {}: missing column {i}", k + 1))
        };
        let t: f64 = field(1)?.parse().with_context(|| format!("row {}: time", k + 1))?;
        let site: usize = field(2)?.parse().with_context(|| format!("row {}: site_index", k + 1))?;
        let m: u32 = field(3)?.parse().with_context(|| format!("row {}: monomer_id", k + 1))?;
        steps.push((t, site, MonomerId(m)));
    }
    Ok(steps)
}

fn analyze(a: AnalyzeArgs) -> Result<Status> {
    let mut manifest = RunManifest::new("analyze", a.trace.is_none().then_some(a.seed.seed));
    let sys = load_system(&a.system, &mut manifest)?;
    let mut reports: Vec<SequenceReport> = Vec::new();
    match &a.trace {
        Some(path) => {
            let steps = read_trace(path, &mut manifest)?;
            let events = events_from_steps(&sys, &steps)?;
            reports.push(event_stats(&sys, &events)?);
        }
        None => {
            for i in 0..a.trials {
                let cfg = SimConfig::new(trial_seed(a.seed.seed, i as u64), stop_for(a.target_length))
                    .with_max_events(a.max_events);
                let trace = simulate(&sys, &cfg)?;
                reports.push(event_stats(&sys, &trace.events)?);
            }
        }
    }
    let mut totals: BTreeMap<SiteClass, usize> = BTreeMap::new();
    for r in &reports {
        for (&c, &n) in &r.class_counts {
            *totals.entry(c).or_insert(0) += n;
        }
    }
    let rows = [SiteClass::Positive, SiteClass::Mixed, SiteClass::Negative]
        .into_iter()
        .map(|c| vec![c.to_string(), totals.get(&c).copied().unwrap_or(0).to_string()]);
    let bytes = csv_bytes(&["class", "count"], rows)?;
    emit(a.out.as_deref(), &bytes, &manifest)?;
    if let Some(path) = &a.lineages {
        let rows = reports.iter().enumerate().flat_map(|(i, r)| {
            r.lineages.iter().map(move |l| {
                vec![
                    i.to_string(),
                    l.leaf_event.to_string(),
                    l.length.to_string(),
                    l.max_nonpositive_run.to_string(),
                    l.repeated_sites.to_string(),
                ]
            })
        });
        let bytes = csv_bytes(
            &["trace", "leaf_event", "length", "max_nonpositive_run", "repeated_sites"],
            rows,
        )?;
        emit(Some(path), &bytes, &manifest)?;
    }
    let lineages: usize = reports.iter().map(|r| r.lineages.len()).sum();
    let repeats: usize = reports.iter().map(|r| r.lineages_with_repeats()).sum();
    let max_run = reports.iter().map(|r| r.max_run_without_repeats()).max().unwrap_or(0);
    eprintln!("lineages={lineages} with_repeats={repeats} max_run_without_repeats={max_run}");
    Ok(Status::Ok)
}
