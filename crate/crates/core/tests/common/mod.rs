//! Fixed prompt inputs shared by the golden tests and the acceptance gate.
//! Everything here is literal so the rendered bytes only change when a
//! template changes.

#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use chrono::TimeZone;

use xlc_core::corpus::{Component, Incident, Monitor, Service};
use xlc_core::prompt::{parse_rca_response, RcaAnswer, RcaExample};

pub fn fixture_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Runs every recorded model response through the parser: files under
/// `responses/good/` must produce their sidecar `.expected.json` answer, and
/// files under `responses/bad/` must fail with the error kind named by the
/// file (everything before the trailing `_<n>`). Returns (good, bad) counts.
pub fn sweep_response_fixtures() -> (usize, usize) {
    let dir = fixture_root().join("responses");
    let mut good = 0usize;
    for entry in sorted_files(&dir.join("good")) {
        let name = entry.file_name().unwrap().to_str().unwrap().to_string();
        if !name.ends_with(".txt") {
            continue;
        }
        let text = fs::read_to_string(&entry).unwrap();
        let answer = parse_rca_response(&text)
            .unwrap_or_else(|e| panic!("good fixture {name} failed to parse: {e}"));
        let expected_path = entry.with_extension("expected.json");
        let expected: RcaAnswer =
            serde_json::from_str(&fs::read_to_string(&expected_path).unwrap()).unwrap();
        assert_eq!(answer, expected, "fixture {name} parsed to the wrong answer");
        good += 1;
    }
    let mut bad = 0usize;
    for entry in sorted_files(&dir.join("bad")) {
        let stem = entry.file_stem().unwrap().to_str().unwrap();
        let (kind, _) = stem.rsplit_once('_').unwrap();
        let text = fs::read_to_string(&entry).unwrap();
        let err = parse_rca_response(&text)
            .expect_err(&format!("malformed fixture {stem} unexpectedly parsed"));
        assert_eq!(err.kind(), kind, "fixture {stem} failed with the wrong kind");
        bad += 1;
    }
    (good, bad)
}

fn sorted_files(dir: &std::path::Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap_or_else(|e| panic!("reading {}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    files
}

pub fn golden_service() -> Service {
    Service {
        id: "svc-checkout".into(),
        name: "CheckoutFlow".into(),
        description: "CheckoutFlow turns carts into confirmed orders. It validates payment \
                      intents, reserves inventory, and emits order events for fulfillment. \
                      The service runs active-active in three regions."
            .into(),
        summarized_description: Some(
            "CheckoutFlow validates payments and reserves inventory to turn carts into \
             confirmed orders."
                .into(),
        ),
        components: vec![
            Component {
                id: "cmp-cart".into(),
                name: "CartSession".into(),
                description: "Keeps in-flight cart state in a regional cache.".into(),
            },
            Component {
                id: "cmp-payauth".into(),
                name: "PaymentAuthorizer".into(),
                description: "Requests and renews payment holds with the payments gateway."
                    .into(),
            },
        ],
    }
}

pub fn golden_incident() -> Incident {
    Incident {
        id: "inc-0042".into(),
        title: "Checkout confirmations failing in EU region".into(),
        raw_summary: "<b>Impact:</b> confirmations dropped to zero. Orders stuck in PENDING."
            .into(),
        clean_summary: Some(
            "Order confirmations in the EU region dropped to zero at 14:30 UTC. Carts \
             completed payment but orders stayed in PENDING and no fulfillment events were \
             emitted. Error logs show timeouts on every call to the ledger while writing \
             order records."
                .into(),
        ),
        owning_service_id: "svc-checkout".into(),
        created_at: chrono::Utc.with_ymd_and_hms(2024, 3, 7, 14, 30, 0).unwrap(),
        ground_truth_root_cause: Some(
            "LedgerStore lost its primary writer during a failed failover drill and rejected \
             all order writes until the drill was rolled back."
                .into(),
        ),
        clean_root_cause: None,
        is_dependency_failure: Some(true),
    }
}

pub fn golden_upstream() -> Vec<(String, String)> {
    vec![
        (
            "PaymentsGateway".into(),
            "PaymentsGateway authorizes and captures card payments for internal callers."
                .into(),
        ),
        (
            "LedgerStore".into(),
            "LedgerStore is the strongly consistent record of orders and balance movements."
                .into(),
        ),
        (
            "InventoryGrid".into(),
            "InventoryGrid tracks sellable stock per region and places short-lived holds."
                .into(),
        ),
    ]
}

pub fn golden_examples() -> Vec<RcaExample> {
    vec![
        RcaExample {
            title: "Order writes timing out globally".into(),
            summary: "All order writes began timing out after a schema migration locked the \
                      orders table. Checkout queued retries until the queue overflowed."
                .into(),
            root_cause: "A long-running migration held a table lock on the order store; \
                         writes resumed after the migration was killed."
                .into(),
        },
        RcaExample {
            title: "EU checkout errors after gateway deploy".into(),
            summary: "EU customers saw card declines for 40 minutes. The payments gateway had \
                      deployed a validation change that rejected well-formed expiry dates."
                .into(),
            root_cause: "An upstream payments gateway release broke expiry-date validation \
                         and declined valid cards until it was rolled back."
                .into(),
        },
        RcaExample {
            title: "Stale inventory holds blocking checkout".into(),
            summary: "Checkout rejected carts claiming items were out of stock. Inventory \
                      holds from a cancelled flash sale were never released."
                .into(),
            root_cause: "The hold-release job crashed mid-sale and left phantom inventory \
                         holds; replaying the release queue cleared them."
                .into(),
        },
        RcaExample {
            title: "Confirmation emails delayed two hours".into(),
            summary: "Order confirmations were delayed by up to two hours. The outbound event \
                      bus throttled the checkout topic after a quota misconfiguration."
                .into(),
            root_cause: "A quota change on the event bus throttled checkout events; raising \
                         the topic quota restored delivery."
                .into(),
        },
        RcaExample {
            title: "Checkout 500s from cache node loss".into(),
            summary: "A third of checkout requests returned 500 for 15 minutes when a cart \
                      cache node was replaced without draining."
                .into(),
            root_cause: "A cache node was rotated without draining, dropping live cart \
                         sessions; the balancer removed it after health checks failed."
                .into(),
        },
    ]
}

pub fn golden_monitor() -> Monitor {
    Monitor {
        id: "mon-017".into(),
        monitor_name: "CheckoutLedgerWriteLatency".into(),
        metric_name: "ledger_write_p99_ms".into(),
        service_id: "svc-checkout".into(),
        alert_title: "Latency objective breach for CheckoutFlow".into(),
        alert_conditions: "ledger_write_p99_ms above 800 for 5 consecutive minutes".into(),
        resource_label: Some("Storage".into()),
        slo_label: Some("Latency".into()),
    }
}
