//! One function per subcommand. Everything here returns anyhow errors; main
//! maps them to exit code 1 with the message on stderr.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Serialize;

use xlc_core::corpus::{load_corpus, save_corpus, Corpus, Task};
use xlc_core::gateway::{
    ChatProvider, HashEmbedder, RecordingProvider, RemoteHttpProvider, ReplayProvider,
    RuleStubProvider,
};
use xlc_core::pipelines::{
    append_records, read_records, run_monitor_batch, run_rca_batch, summarize_corpus,
    write_records, MonitorRunRecord, RcaRunRecord, RunOptions, SummarizeCache,
};
use xlc_core::prompt::{MonitorCase, RcaStrategy};
use xlc_core::report::{
    build_report, render_report_text, Report, REPORT_JSON_FILE, REPORT_TEXT_FILE,
};
use xlc_core::retrieval::build_index;
use xlc_core::sanitize::{clean_text_with, CleanReport, SanitizeOptions};
use xlc_core::synth::{generate_to_dir, SynthSpec};
use xlc_core::{Index, Score};

use crate::config::{Config, ProviderChoice};

pub const RCA_RUNS_FILE: &str = "rca_runs.jsonl";
pub const MONITOR_RUNS_FILE: &str = "monitor_runs.jsonl";

fn make_provider(config: &Config) -> anyhow::Result<Box<dyn ChatProvider>> {
    let base: Box<dyn ChatProvider> = match config.provider {
        ProviderChoice::RuleStub => Box::new(RuleStubProvider::new()),
        ProviderChoice::Replay => Box::new(ReplayProvider::new(&config.fixtures)),
        ProviderChoice::Remote => {
            let endpoint = config.endpoint.clone().with_context(|| {
                format!(
                    "the remote provider needs an endpoint; pass --endpoint or set {}",
                    crate::config::ENDPOINT_ENV
                )
            })?;
            Box::new(
                RemoteHttpProvider::new(endpoint, config.api_key.clone())
                    .with_max_inflight(config.concurrency),
            )
        }
    };
    Ok(if config.record {
        Box::new(RecordingProvider::new(base, &config.fixtures))
    } else {
        base
    })
}

fn load(config: &Config) -> anyhow::Result<Corpus> {
    load_corpus(&config.corpus)
        .with_context(|| format!("loading corpus from {}", config.corpus.display()))
}

fn run_options(config: &Config) -> RunOptions {
    RunOptions {
        model: config.model.clone(),
        k: config.k,
        concurrency: config.concurrency,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut raw = serde_json::to_string_pretty(value)?;
    raw.push('\n');
    fs::write(path, raw).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Clone, clap::Args)]
pub struct SynthArgs {
    /// TOML file with generator parameters; flags below override it.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub services: Option<usize>,
    #[arg(long)]
    pub incidents: Option<usize>,
    /// Fraction of incidents planted as dependency failures.
    #[arg(long)]
    pub fraction: Option<f64>,
    #[arg(long)]
    pub monitors: Option<usize>,
    /// Probability of each candidate dependency edge.
    #[arg(long)]
    pub density: Option<f64>,
}

pub fn synth_gen(config: &Config, args: &SynthArgs) -> anyhow::Result<()> {
    let mut spec = match &args.spec {
        Some(path) => {
            let raw = fs::read_to_string(path)
                .with_context(|| format!("reading spec file {}", path.display()))?;
            toml::from_str::<SynthSpec>(&raw)
                .with_context(|| format!("parsing spec file {}", path.display()))?
        }
        None => SynthSpec::default(),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(services) = args.services {
        spec.n_services = services;
    }
    if let Some(incidents) = args.incidents {
        spec.n_incidents = incidents;
    }
    if let Some(fraction) = args.fraction {
        spec.dependency_failure_fraction = fraction;
    }
    if let Some(monitors) = args.monitors {
        spec.n_monitors = monitors;
    }
    if let Some(density) = args.density {
        spec.edge_density = density;
    }
    let corpus = generate_to_dir(&spec, &config.corpus)
        .with_context(|| format!("generating corpus into {}", config.corpus.display()))?;
    eprintln!(
        "generated {} services, {} incidents ({} planted dependency failures), {} edges, {} monitors in {}",
        corpus.services.len(),
        corpus.incidents.len(),
        corpus
            .incidents
            .values()
            .filter(|i| i.is_dependency_failure == Some(true))
            .count(),
        corpus.edges.len(),
        corpus.monitors.len(),
        config.corpus.display(),
    );
    Ok(())
}

pub fn ingest(config: &Config) -> anyhow::Result<()> {
    let corpus = load(config)?;
    eprintln!(
        "corpus ok: {} services, {} incidents, {} dependency edges, {} monitors \
         ({} resource-labeled, {} SLO-labeled)",
        corpus.services.len(),
        corpus.incidents.len(),
        corpus.edges.len(),
        corpus.monitors.len(),
        corpus.labeled_monitors(Task::Resource).len(),
        corpus.labeled_monitors(Task::Slo).len(),
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct SanitizeLine<'a> {
    incident_id: &'a str,
    summary: CleanReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    root_cause: Option<CleanReport>,
}

/// Dry run of the cleaning pass: reports what sanitation would remove from
/// each incident without touching the corpus.
pub fn sanitize(config: &Config) -> anyhow::Result<()> {
    let corpus = load(config)?;
    let opts = SanitizeOptions { stack_trace_limit: config.stack_trace_limit };
    fs::create_dir_all(&config.out)?;
    let path = config.out.join("sanitize_report.jsonl");
    let mut lines = Vec::new();
    let mut touched = 0usize;
    for incident in corpus.incidents.values() {
        let (_, summary) = clean_text_with(&incident.raw_summary, &opts);
        let root_cause = incident
            .ground_truth_root_cause
            .as_deref()
            .map(|raw| clean_text_with(raw, &opts).1);
        let removed = summary.removed;
        if removed.html_tags + removed.image_tags + removed.table_blocks
            + removed.stack_trace_lines
            > 0
        {
            touched += 1;
        }
        lines.push(serde_json::to_string(&SanitizeLine {
            incident_id: &incident.id,
            summary,
            root_cause,
        })?);
    }
    fs::write(&path, lines.join("\n") + "\n")?;
    eprintln!(
        "sanitize report for {} incidents ({} had removable markup) written to {}",
        corpus.incidents.len(),
        touched,
        path.display()
    );
    Ok(())
}

pub fn summarize(config: &Config) -> anyhow::Result<()> {
    let mut corpus = load(config)?;
    let provider = make_provider(config)?;
    fs::create_dir_all(&config.out)?;
    let mut cache = SummarizeCache::load(&config.out)?;
    let stats = summarize_corpus(&mut corpus, &provider, &config.model, &mut cache)?;
    save_corpus(&corpus, &config.corpus)?;
    cache.save(&config.out)?;
    eprintln!(
        "summarized {} services and {} incidents, reused {} cached entries",
        stats.services_summarized, stats.incidents_summarized, stats.reused
    );
    Ok(())
}

pub fn index_build(config: &Config) -> anyhow::Result<()> {
    let corpus = load(config)?;
    let embedder = HashEmbedder::default();
    let index = build_index::<Score>(&corpus, &embedder)?;
    fs::create_dir_all(&config.out)?;
    index.save(&config.out)?;
    eprintln!(
        "indexed {} incidents at dimension {} into {}",
        index.len(),
        index.dim(),
        config.out.display()
    );
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StrategyArg {
    Nodep,
    Dep,
    IncNodep,
    IncDep,
}

impl From<StrategyArg> for RcaStrategy {
    fn from(arg: StrategyArg) -> Self {
        match arg {
            StrategyArg::Nodep => RcaStrategy::NoDep,
            StrategyArg::Dep => RcaStrategy::Dep,
            StrategyArg::IncNodep => RcaStrategy::InCNoDep,
            StrategyArg::IncDep => RcaStrategy::InCDep,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TaskArg {
    Resource,
    Slo,
}

impl From<TaskArg> for Task {
    fn from(arg: TaskArg) -> Self {
        match arg {
            TaskArg::Resource => Task::Resource,
            TaskArg::Slo => Task::Slo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CaseArg {
    C1,
    C2,
    C3,
    C4,
}

impl From<CaseArg> for MonitorCase {
    fn from(arg: CaseArg) -> Self {
        match arg {
            CaseArg::C1 => MonitorCase::C1,
            CaseArg::C2 => MonitorCase::C2,
            CaseArg::C3 => MonitorCase::C3,
            CaseArg::C4 => MonitorCase::C4,
        }
    }
}

fn read_ids_file(path: &Path) -> anyhow::Result<Vec<String>> {
    let raw =
        fs::read_to_string(path).with_context(|| format!("reading ids file {}", path.display()))?;
    Ok(raw
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .map(String::from)
        .collect())
}

fn read_existing<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<Vec<T>> {
    if path.exists() {
        Ok(read_records(path)?)
    } else {
        Ok(Vec::new())
    }
}

pub fn rca_run(
    config: &Config,
    strategy: RcaStrategy,
    ids: Option<&Path>,
    resume: bool,
) -> anyhow::Result<()> {
    let corpus = load(config)?;
    let provider = make_provider(config)?;
    let embedder = HashEmbedder::default();
    let index = if strategy.uses_examples() {
        Some(Index::load(&config.out).with_context(|| {
            format!(
                "loading retrieval index from {}; run `xlc index build` first",
                config.out.display()
            )
        })?)
    } else {
        None
    };

    let mut eval_ids = match ids {
        Some(path) => read_ids_file(path)?,
        None => corpus.incidents.keys().cloned().collect(),
    };

    fs::create_dir_all(&config.out)?;
    let path = config.out.join(RCA_RUNS_FILE);
    let existing: Vec<RcaRunRecord> = read_existing(&path)?;
    if resume {
        let done: BTreeSet<&str> = existing
            .iter()
            .filter(|r| r.strategy == strategy)
            .map(|r| r.incident_id.as_str())
            .collect();
        eval_ids.retain(|id| !done.contains(id.as_str()));
        eprintln!("resume: {} incidents already recorded, {} to run", done.len(), eval_ids.len());
    }

    let records = run_rca_batch(
        &corpus,
        index.as_ref(),
        &embedder,
        &provider,
        strategy,
        &eval_ids,
        &run_options(config),
    )?;
    let failed = records.iter().filter(|r| r.error.is_some()).count();

    if resume {
        append_records(&path, &records)?;
    } else {
        let mut kept: Vec<RcaRunRecord> =
            existing.into_iter().filter(|r| r.strategy != strategy).collect();
        kept.extend(records.iter().cloned());
        write_records(&path, &kept)?;
    }
    eprintln!(
        "{strategy}: wrote {} records ({failed} failed) to {}",
        records.len(),
        path.display()
    );
    Ok(())
}

pub fn monitor_run(
    config: &Config,
    task: Task,
    case: MonitorCase,
    resume: bool,
) -> anyhow::Result<()> {
    let corpus = load(config)?;
    let provider = make_provider(config)?;
    fs::create_dir_all(&config.out)?;
    let path = config.out.join(MONITOR_RUNS_FILE);
    let existing: Vec<MonitorRunRecord> = read_existing(&path)?;

    if resume {
        let done: BTreeSet<&str> = existing
            .iter()
            .filter(|r| r.task == task && r.case == case)
            .map(|r| r.monitor_id.as_str())
            .collect();
        let missing = corpus
            .labeled_monitors(task)
            .iter()
            .filter(|m| !done.contains(m.id.as_str()))
            .count();
        if missing == 0 {
            eprintln!("resume: all {} monitors already recorded for {task} {case}", done.len());
            return Ok(());
        }
        // The batch runs every labeled monitor; replace the combo instead of
        // appending duplicates.
    }

    let records = run_monitor_batch(&corpus, &provider, task, case, &run_options(config))?;
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    let mut kept: Vec<MonitorRunRecord> = existing
        .into_iter()
        .filter(|r| !(r.task == task && r.case == case))
        .collect();
    kept.extend(records.iter().cloned());
    write_records(&path, &kept)?;
    eprintln!(
        "{task} {case}: wrote {} records ({failed} failed) to {}",
        records.len(),
        path.display()
    );
    Ok(())
}

pub fn eval_rca(config: &Config, runs: &Path) -> anyhow::Result<()> {
    let corpus = load(config)?;
    let records: Vec<RcaRunRecord> = read_records(runs)?;
    if records.is_empty() {
        bail!("no records in {}", runs.display());
    }
    let report = build_report(&corpus, &records, &[], &HashEmbedder::default())?;
    fs::create_dir_all(&config.out)?;
    write_json(&config.out.join("eval_rca.json"), &report.rca)?;
    print!("{}", render_report_text(&report));
    Ok(())
}

pub fn eval_monitor(config: &Config, runs: &Path) -> anyhow::Result<()> {
    let corpus = load(config)?;
    let records: Vec<MonitorRunRecord> = read_records(runs)?;
    if records.is_empty() {
        bail!("no records in {}", runs.display());
    }
    let report = build_report(&corpus, &[], &records, &HashEmbedder::default())?;
    fs::create_dir_all(&config.out)?;
    write_json(&config.out.join("eval_monitor.json"), &report.monitors)?;
    print!("{}", render_report_text(&report));
    Ok(())
}

pub fn report(config: &Config) -> anyhow::Result<()> {
    let corpus = load(config)?;
    let rca_records: Vec<RcaRunRecord> = read_existing(&config.out.join(RCA_RUNS_FILE))?;
    let monitor_records: Vec<MonitorRunRecord> =
        read_existing(&config.out.join(MONITOR_RUNS_FILE))?;
    if rca_records.is_empty() && monitor_records.is_empty() {
        bail!(
            "no run records under {}; run `xlc rca run` or `xlc monitor run` first",
            config.out.display()
        );
    }
    let report: Report =
        build_report(&corpus, &rca_records, &monitor_records, &HashEmbedder::default())?;
    let text = render_report_text(&report);
    fs::create_dir_all(&config.out)?;
    write_json(&config.out.join(REPORT_JSON_FILE), &report)?;
    fs::write(config.out.join(REPORT_TEXT_FILE), &text)?;
    print!("{text}");
    Ok(())
}
