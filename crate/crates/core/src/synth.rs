//! Deterministic synthetic-corpus generator with planted ground truth.
//! Dependency-failure incidents are constructed so the faulty upstream is
//! recoverable from the prompt alone: the upstream service's description
//! carries a "faulty: <name>" marker and no other text in the corpus does.

use std::path::Path;

use chrono::{DateTime, TimeDelta, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{
    normalize_label, save_corpus, Component, Corpus, CorpusError, DependencyEdge, Incident,
    Monitor, Provenance, Service,
};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    pub n_services: usize,
    pub n_incidents: usize,
    pub dependency_failure_fraction: f64,
    pub n_monitors: usize,
    pub edge_density: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 7,
            n_services: 40,
            n_incidents: 200,
            dependency_failure_fraction: 0.5,
            n_monitors: 130,
            edge_density: 0.15,
        }
    }
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("{field} must be positive")]
    ZeroCount { field: &'static str },
    #[error("{field} must be within {range}, got {value}")]
    OutOfRange { field: &'static str, range: &'static str, value: f64 },
    #[error("{0}")]
    Infeasible(String),
    #[error(transparent)]
    Save(#[from] CorpusError),
}

impl SynthSpec {
    pub fn planted_count(&self) -> usize {
        (self.dependency_failure_fraction * self.n_incidents as f64).round() as usize
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        for (field, value) in [
            ("n_services", self.n_services),
            ("n_incidents", self.n_incidents),
            ("n_monitors", self.n_monitors),
        ] {
            if value == 0 {
                return Err(SpecError::ZeroCount { field });
            }
        }
        let f = self.dependency_failure_fraction;
        if !(0.0..=1.0).contains(&f) {
            return Err(SpecError::OutOfRange {
                field: "dependency_failure_fraction",
                range: "[0, 1]",
                value: f,
            });
        }
        let d = self.edge_density;
        if !(d > 0.0 && d <= 1.0) {
            return Err(SpecError::OutOfRange {
                field: "edge_density",
                range: "(0, 1]",
                value: d,
            });
        }
        if self.n_services < 2 {
            return Err(SpecError::Infeasible(
                "n_services must be at least 2 to draw dependency edges".into(),
            ));
        }
        let planted = self.planted_count();
        if planted > 0 && planted < self.n_incidents && self.n_services < 3 {
            return Err(SpecError::Infeasible(
                "mixing planted and unplanted incidents needs at least 3 services \
                 (faulty upstream, its dependent, and a clean owner)"
                    .into(),
            ));
        }
        Ok(())
    }
}

const DOMAINS: [&str; 20] = [
    "Order", "Billing", "Search", "Auth", "Catalog", "Checkout", "Shipping", "Inventory",
    "Payment", "Profile", "Session", "Telemetry", "Media", "Notify", "Pricing", "Fraud",
    "Ledger", "Routing", "Archive", "Quota",
];

const ROLES: [&str; 10] = [
    "Gateway", "Engine", "Store", "Hub", "Broker", "Planner", "Indexer", "Resolver", "Tracker",
    "Relay",
];

const VERBS: [&str; 10] = [
    "Coordinates", "Aggregates", "Serves", "Validates", "Schedules", "Replicates", "Brokers",
    "Shards", "Audits", "Transforms",
];

const OBJECTS: [&str; 10] = [
    "order events",
    "billing statements",
    "search queries",
    "session tokens",
    "inventory snapshots",
    "payment authorizations",
    "shipment manifests",
    "telemetry batches",
    "pricing rules",
    "fraud signals",
];

const SCOPES: [&str; 6] = [
    "across regional deployments",
    "for partner integrations",
    "behind the public gateway",
    "for internal dashboards",
    "on the batch tier",
    "for the mobile clients",
];

const REGIONS: [&str; 5] = ["EMEA", "NA East", "NA West", "APAC", "LATAM"];

const COMPONENT_POOL: [(&str, &str); 8] = [
    ("request-router", "Splits traffic by tenant and retries idempotent calls."),
    ("state-journal", "Persists state transitions for replay."),
    ("scheduler", "Fires periodic reconciliation jobs."),
    ("quota-meter", "Accumulates usage counters per account."),
    ("feed-poller", "Pulls partner feeds on a fixed cadence."),
    ("snapshot-writer", "Emits hourly snapshots to the archive tier."),
    ("edge-node", "Keeps hot entries close to the gateway."),
    ("audit-log", "Records privileged operations."),
];

const SYMPTOMS: [&str; 10] = [
    "Elevated error rate",
    "Timeout spike",
    "Degraded throughput",
    "Stuck queue drains",
    "Checkout failures",
    "Intermittent 502 responses",
    "Slow page loads",
    "Failed batch exports",
    "Login failures",
    "Stale dashboards",
];

const LOCAL_CAUSES: [&str; 5] = [
    "A feature flag rollout misconfigured the retry budget.",
    "A schema migration locked a hot table.",
    "A certificate rotation job stalled the deploy pipeline.",
    "An autoscaler policy change starved the worker pool.",
    "A code regression double-counted usage metrics.",
];

const KNOBS: [&str; 5] = [
    "the connection pool ceiling",
    "the retry backoff curve",
    "the cache eviction window",
    "the request body limit",
    "the health probe interval",
];

const METRIC_SUFFIXES: [&str; 8] =
    ["pct", "rate_per_min", "p99_ms", "depth", "bytes", "count", "ratio", "per_sec"];

const PROVENANCES: [Provenance; 4] = [
    Provenance::Declared,
    Provenance::DnsLog,
    Provenance::SharedSubscription,
    Provenance::SharedResource,
];

fn pick<'a, T>(rng: &mut ChaCha8Rng, pool: &'a [T]) -> &'a T {
    &pool[rng.random_range(0..pool.len())]
}

/// "paging memory" -> "PagingMemory"
fn camel(normalized: &str) -> String {
    normalized
        .split_whitespace()
        .map(|w| {
            let mut chars = w.chars();
            match chars.next() {
                Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
                None => String::new(),
            }
        })
        .collect()
}

fn service_description(rng: &mut ChaCha8Rng, marker_name: Option<&str>) -> String {
    let mut sentences = Vec::new();
    if let Some(name) = marker_name {
        sentences.push(format!(
            "Triage review flagged this dependency as faulty: {name} pending a rollback."
        ));
    }
    sentences.push(format!(
        "{} {} {}.",
        pick(rng, &VERBS),
        pick(rng, &OBJECTS),
        pick(rng, &SCOPES)
    ));
    sentences.push(format!(
        "We run {} replicas and ship {} releases.",
        rng.random_range(2..24),
        pick(rng, &["weekly", "daily", "biweekly"])
    ));
    if rng.random_bool(0.5) {
        sentences.push(format!("Our on-call rotation covers {}.", pick(rng, &REGIONS)));
    }
    sentences.join(" ")
}

fn components_for(rng: &mut ChaCha8Rng, service_id: &str) -> Vec<Component> {
    let count = rng.random_range(1..=3);
    let start = rng.random_range(0..COMPONENT_POOL.len());
    (0..count)
        .map(|j| {
            let (name, description) = COMPONENT_POOL[(start + j) % COMPONENT_POOL.len()];
            Component {
                id: format!("{service_id}-comp-{}", j + 1),
                name: name.to_string(),
                description: description.to_string(),
            }
        })
        .collect()
}

fn incident_summary(
    rng: &mut ChaCha8Rng,
    symptom: &str,
    owner_name: &str,
    planted: bool,
) -> String {
    let mut sentences = vec![format!(
        "Operators observed {} starting at {:02}:{:02} UTC.",
        symptom.to_lowercase(),
        rng.random_range(0..24),
        rng.random_range(0..60)
    )];
    if planted {
        sentences.push(format!(
            "Calls from {owner_name} to an upstream dependency timed out at elevated rates."
        ));
    } else {
        sentences.push(format!(
            "A recent rollout of {owner_name} changed {}.",
            pick(rng, &KNOBS)
        ));
    }
    if rng.random_bool(0.4) {
        sentences.push(format!(
            "<b>Impact:</b> {} customers affected.",
            rng.random_range(10..5000)
        ));
    }
    sentences.push(format!(
        "Mitigation landed after {} minutes.",
        rng.random_range(8..240)
    ));
    sentences.join(" ")
}

pub fn generate(spec: &SynthSpec) -> Result<Corpus, SpecError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut corpus = Corpus::default();
    let n = spec.n_services;
    let planted_count = spec.planted_count();

    // Role partition: victims own planted incidents and depend on exactly one
    // faulty service; clean services never have a faulty upstream.
    let (faulty_count, victim_count) = if planted_count > 0 {
        ((n / 8).max(1), (n / 4).max(1))
    } else {
        (0, 0)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let faulty_pos = &order[..faulty_count];
    let victim_pos = &order[faulty_count..faulty_count + victim_count];
    let clean_pos = &order[faulty_count + victim_count..];

    let width = if n >= 100 { 3 } else { 2 };
    let names: Vec<String> = (0..n)
        .map(|i| {
            format!(
                "{}{}{:0width$}",
                pick(&mut rng, &DOMAINS),
                pick(&mut rng, &ROLES),
                i + 1
            )
        })
        .collect();
    let ids: Vec<String> = (0..n).map(|i| format!("svc-{:03}", i + 1)).collect();

    let mut marker_for = vec![None; n];
    for &i in faulty_pos {
        marker_for[i] = Some(names[i].clone());
    }
    for i in 0..n {
        let description = service_description(&mut rng, marker_for[i].as_deref());
        let components = components_for(&mut rng, &ids[i]);
        corpus.services.insert(
            ids[i].clone(),
            Service {
                id: ids[i].clone(),
                name: names[i].clone(),
                description,
                summarized_description: None,
                components,
            },
        );
    }

    // Each victim depends on exactly one faulty service.
    let mut faulty_upstream_of = vec![usize::MAX; n];
    for (k, &v) in victim_pos.iter().enumerate() {
        let f = faulty_pos[k % faulty_pos.len()];
        faulty_upstream_of[v] = f;
        corpus.edges.push(DependencyEdge {
            dependent_service_id: ids[v].clone(),
            upstream_service_id: ids[f].clone(),
            provenance: *pick(&mut rng, &PROVENANCES),
        });
    }

    // Extra edges sampled over the role order (faulty first), forward only,
    // never adding a faulty upstream outside the assigned pairs.
    for a in 0..n {
        for b in (a + 1)..n {
            let upstream_is_faulty = a < faulty_count;
            let dependent_is_faulty = b < faulty_count;
            if upstream_is_faulty && !dependent_is_faulty {
                continue;
            }
            if rng.random_bool(spec.edge_density) {
                corpus.edges.push(DependencyEdge {
                    dependent_service_id: ids[order[b]].clone(),
                    upstream_service_id: ids[order[a]].clone(),
                    provenance: *pick(&mut rng, &PROVENANCES),
                });
            }
        }
    }

    let mut planted_flags = vec![true; planted_count];
    planted_flags.resize(spec.n_incidents, false);
    planted_flags.shuffle(&mut rng);

    let base: DateTime<Utc> = DateTime::parse_from_rfc3339("2024-03-01T00:00:00Z")
        .expect("literal timestamp parses")
        .with_timezone(&Utc);
    let mut planted_seen = 0usize;
    let mut clean_seen = 0usize;
    for (i, &planted) in planted_flags.iter().enumerate() {
        let owner = if planted {
            let v = victim_pos[planted_seen % victim_pos.len()];
            planted_seen += 1;
            v
        } else {
            let c = clean_pos[clean_seen % clean_pos.len()];
            clean_seen += 1;
            c
        };
        let symptom = *pick(&mut rng, &SYMPTOMS);
        let root_cause = if planted {
            let f = faulty_upstream_of[owner];
            format!(
                "Upstream service {} degraded after a bad config push and {} inherited the \
                 failure.",
                names[f], names[owner]
            )
        } else {
            (*pick(&mut rng, &LOCAL_CAUSES)).to_string()
        };
        let id = format!("inc-{:04}", i + 1);
        let raw_summary = incident_summary(&mut rng, symptom, &names[owner], planted);
        let jitter = rng.random_range(0..300);
        corpus.incidents.insert(
            id.clone(),
            Incident {
                id,
                title: format!("{symptom} in {}", names[owner]),
                raw_summary,
                clean_summary: None,
                owning_service_id: ids[owner].clone(),
                created_at: base
                    + TimeDelta::hours(7 * i as i64)
                    + TimeDelta::minutes(jitter),
                ground_truth_root_cause: Some(root_cause),
                clean_root_cause: None,
                is_dependency_failure: Some(planted),
            },
        );
    }

    corpus.edges.sort_by(|a, b| {
        (&a.dependent_service_id, &a.upstream_service_id)
            .cmp(&(&b.dependent_service_id, &b.upstream_service_id))
    });

    let resource_classes = corpus.ontology.resource_classes.clone();
    let slo_classes = corpus.ontology.slo_classes.clone();
    for i in 0..spec.n_monitors {
        let resource = &resource_classes[i % resource_classes.len()];
        let slo = &slo_classes[i % slo_classes.len()];
        let vocab = normalize_label(resource).replace(' ', "_");
        let service_pos = i % n;
        let id = format!("mon-{:03}", i + 1);
        let metric_name = format!("{vocab}_{}", pick(&mut rng, &METRIC_SUFFIXES));
        corpus.monitors.insert(
            id.clone(),
            Monitor {
                id,
                monitor_name: format!("{}Probe{:03}", camel(&normalize_label(resource)), i + 1),
                metric_name: metric_name.clone(),
                service_id: ids[service_pos].clone(),
                alert_title: format!("{slo} objective breach for {}", names[service_pos]),
                alert_conditions: format!(
                    "{metric_name} above {} for {} consecutive minutes",
                    rng.random_range(50..100),
                    rng.random_range(3..16)
                ),
                resource_label: Some(resource.clone()),
                slo_label: Some(slo.clone()),
            },
        );
    }

    Ok(corpus)
}

pub fn generate_to_dir(spec: &SynthSpec, dir: &Path) -> Result<Corpus, SpecError> {
    let corpus = generate(spec)?;
    save_corpus(&corpus, dir)?;
    Ok(corpus)
}
