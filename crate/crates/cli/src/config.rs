//! Effective configuration, resolved as flags over environment variables
//! over the config file over defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use anyhow::Context;
use serde::Deserialize;

pub const CONFIG_FILE: &str = "xlc.toml";
pub const ENDPOINT_ENV: &str = "XLC_LLM_ENDPOINT";
pub const API_KEY_ENV: &str = "XLC_LLM_KEY";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProviderChoice {
    /// Deterministic offline stub that reads planted prompt markers.
    RuleStub,
    /// Replays recorded responses from the fixtures directory.
    Replay,
    /// OpenAI-compatible chat completions endpoint.
    Remote,
}

impl fmt::Display for ProviderChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProviderChoice::RuleStub => write!(f, "rule-stub"),
            ProviderChoice::Replay => write!(f, "replay"),
            ProviderChoice::Remote => write!(f, "remote"),
        }
    }
}

impl std::str::FromStr for ProviderChoice {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rule-stub" | "rule_stub" => Ok(ProviderChoice::RuleStub),
            "replay" => Ok(ProviderChoice::Replay),
            "remote" => Ok(ProviderChoice::Remote),
            other => anyhow::bail!("unknown provider {other:?} (rule-stub, replay, remote)"),
        }
    }
}

/// Shape of `xlc.toml`. Every key is optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub corpus: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub provider: Option<String>,
    pub endpoint: Option<String>,
    pub api_key: Option<String>,
    pub model: Option<String>,
    pub fixtures: Option<PathBuf>,
    pub k: Option<usize>,
    pub concurrency: Option<usize>,
    pub stack_trace_limit: Option<usize>,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct GlobalArgs {
    /// Config file to read (default: ./xlc.toml when present).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Corpus directory.
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Output directory for runs, the index, and reports.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Chat provider backing LLM calls.
    #[arg(long, global = true, value_enum)]
    pub provider: Option<ProviderChoice>,
    /// Chat completions endpoint for the remote provider.
    #[arg(long, global = true)]
    pub endpoint: Option<String>,
    /// Model name sent with each request.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Fixture directory for the replay provider and --record.
    #[arg(long, global = true)]
    pub fixtures: Option<PathBuf>,
    /// Retrieved examples per in-context prompt.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Concurrent provider calls.
    #[arg(long, global = true)]
    pub concurrency: Option<usize>,
    /// Stack-frame lines kept before elision when sanitizing.
    #[arg(long, global = true)]
    pub stack_trace_limit: Option<usize>,
    /// Record provider responses as replay fixtures.
    #[arg(long, global = true)]
    pub record: bool,
    /// Print the effective configuration (secrets redacted) to stderr.
    #[arg(long, short = 'v', global = true)]
    pub verbose: bool,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub corpus: PathBuf,
    pub out: PathBuf,
    pub provider: ProviderChoice,
    pub endpoint: Option<String>,
    pub api_key: Option<String>,
    pub model: String,
    pub fixtures: PathBuf,
    pub k: usize,
    pub concurrency: usize,
    pub stack_trace_limit: usize,
    pub record: bool,
    pub verbose: bool,
}

impl Config {
    pub fn resolve(
        args: &GlobalArgs,
        env: &BTreeMap<String, String>,
        file: FileConfig,
    ) -> anyhow::Result<Config> {
        let provider = match (&args.provider, &file.provider) {
            (Some(choice), _) => *choice,
            (None, Some(name)) => name.parse()?,
            (None, None) => ProviderChoice::RuleStub,
        };
        let config = Config {
            corpus: args.corpus.clone().or(file.corpus).unwrap_or_else(|| "corpus".into()),
            out: args.out.clone().or(file.out).unwrap_or_else(|| "out".into()),
            provider,
            endpoint: args
                .endpoint
                .clone()
                .or_else(|| env.get(ENDPOINT_ENV).cloned())
                .or(file.endpoint),
            api_key: env.get(API_KEY_ENV).cloned().or(file.api_key),
            model: args.model.clone().or(file.model).unwrap_or_else(|| "gpt-4".into()),
            fixtures: args
                .fixtures
                .clone()
                .or(file.fixtures)
                .unwrap_or_else(|| PathBuf::from("fixtures/replay")),
            k: args.k.or(file.k).unwrap_or(5),
            concurrency: args.concurrency.or(file.concurrency).unwrap_or(4),
            stack_trace_limit: args.stack_trace_limit.or(file.stack_trace_limit).unwrap_or(3),
            record: args.record,
            verbose: args.verbose,
        };
        if config.k == 0 {
            anyhow::bail!("k must be at least 1");
        }
        if config.concurrency == 0 {
            anyhow::bail!("concurrency must be at least 1");
        }
        Ok(config)
    }

    pub fn load(args: &GlobalArgs) -> anyhow::Result<Config> {
        let path = args.config.clone().unwrap_or_else(|| PathBuf::from(CONFIG_FILE));
        let file = match std::fs::read_to_string(&path) {
            Ok(raw) => toml::from_str(&raw)
                .with_context(|| format!("parsing config file {}", path.display()))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound && args.config.is_none() => {
                FileConfig::default()
            }
            Err(e) => {
                return Err(e).with_context(|| format!("reading config file {}", path.display()))
            }
        };
        let mut env = BTreeMap::new();
        for key in [ENDPOINT_ENV, API_KEY_ENV] {
            if let Ok(value) = std::env::var(key) {
                env.insert(key.to_string(), value);
            }
        }
        Config::resolve(args, &env, file)
    }

    /// One key per line, safe to print: the API key never appears.
    pub fn redacted(&self) -> String {
        format!(
            "corpus = {}\nout = {}\nprovider = {}\nendpoint = {}\napi_key = {}\nmodel = {}\n\
             fixtures = {}\nk = {}\nconcurrency = {}\nstack_trace_limit = {}\nrecord = {}",
            self.corpus.display(),
            self.out.display(),
            self.provider,
            self.endpoint.as_deref().unwrap_or("(unset)"),
            if self.api_key.is_some() { "[redacted]" } else { "(unset)" },
            self.model,
            self.fixtures.display(),
            self.k,
            self.concurrency,
            self.stack_trace_limit,
            self.record,
        )
    }
}
