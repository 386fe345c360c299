mod common;

use std::time::Duration;

use common::{headless_lines, hidden_config, seqs, start, start_default};
use netpulse_core::trace::{deserialize_event, validate_trace};
use netpulse_server::stream::{is_snapshot_frame, SnapshotFrame};
use netpulse_server::ServerConfig;
use proptest::prelude::*;
use serde_json::json;

fn iris_483(epochs: u32) -> serde_json::Value {
    json!({
        "layer_sizes": [4, 8, 3],
        "activation": "sigmoid",
        "learning_rate": 0.5,
        "epochs": epochs,
        "seed": 7,
    })
}

#[tokio::test]
async fn one_epoch_is_exactly_the_twelve_event_grammar() {
    let s = start_default().await;
    let id = s.session("iris", iris_483(1)).await;
    let mut sub = s.subscribe(&id, None).await;
    let first = sub.next_text().await.unwrap();
    assert!(is_snapshot_frame(&first));
    let snapshot: SnapshotFrame = serde_json::from_str(&first).unwrap();
    assert_eq!(snapshot.snapshot.next_seq, 0);
    assert_eq!(snapshot.snapshot.current_epoch, 0);
    assert!(snapshot.snapshot.history.is_empty());

    s.control(&id, "Play").await;
    let lines = sub.collect().await;
    assert_eq!(lines.len(), 12);
    assert_eq!(seqs(&lines), (0..12).collect::<Vec<_>>());
    let events: Vec<_> = lines.iter().map(|l| deserialize_event(l).unwrap()).collect();
    validate_trace(&events).unwrap();
    let tags: Vec<&str> = events.iter().map(|e| e.kind.tag()).collect();
    assert_eq!(
        tags,
        [
            "EPOCH_START",
            "FORWARD_PULSE",
            "ACTIVATIONS_COMPUTED",
            "FORWARD_PULSE",
            "ACTIVATIONS_COMPUTED",
            "OUTPUT_PRODUCED",
            "LOSS_COMPUTED",
            "BACKWARD_PULSE",
            "WEIGHTS_UPDATED",
            "BACKWARD_PULSE",
            "WEIGHTS_UPDATED",
            "EPOCH_END",
        ]
    );
}

#[tokio::test]
async fn resubscription_replays_from_the_next_seq() {
    let s = start_default().await;
    let id = s.session("iris", iris_483(2)).await;
    s.control(&id, "Play").await;
    s.wait_for(&id, "Completed").await;
    let full = s.subscribe(&id, Some(0)).await.collect().await;
    assert_eq!(seqs(&full), (1..24).collect::<Vec<_>>());

    let replay = s.subscribe(&id, Some(5)).await.collect().await;
    assert_eq!(seqs(&replay), (6..24).collect::<Vec<_>>());
    assert_eq!(replay[..], full[5..]);

    let late = s.subscribe(&id, None).await.collect().await;
    assert_eq!(late.len(), 1, "a finished session sends only its snapshot");
    let snap: SnapshotFrame = serde_json::from_str(&late[0]).unwrap();
    assert_eq!(snap.snapshot.next_seq, 24);
    assert_eq!(snap.snapshot.history.len(), 2);
}

#[tokio::test]
async fn unemitted_last_seq_is_refused() {
    let s = start_default().await;
    let id = s.session("iris", iris_483(1)).await;
    let (status, body) = s.get(&format!("/sessions/{id}/events?last_seq=3")).await;
    assert_eq!(status, 400);
    assert_eq!(body["code"], "INPUT_INVALID");
    let (status, body) = s.get("/sessions/nope/events").await;
    assert_eq!(status, 404);
    assert_eq!(body["code"], "NOT_FOUND");
}

#[tokio::test]
async fn two_subscribers_see_the_same_sequence() {
    let s = start(ServerConfig {
        event_delay: Duration::from_micros(200),
        ..ServerConfig::default()
    })
    .await;
    let id = s.session("iris", iris_483(3)).await;
    let mut a = s.subscribe(&id, None).await;
    let mut b = s.subscribe(&id, None).await;
    let snap_a = a.next_text().await.unwrap();
    let snap_b = b.next_text().await.unwrap();
    assert_eq!(snap_a, snap_b);
    s.control(&id, "Play").await;
    let (a, b) = tokio::join!(a.collect(), b.collect());
    assert_eq!(a.len(), 36);
    assert_eq!(a, b);
}

#[tokio::test]
async fn stream_equals_the_headless_trace() {
    let s = start_default().await;
    let id = s.session("iris", hidden_config(&[8], 0.5, 3, 7)).await;
    let sub = s.subscribe(&id, None).await;
    s.control(&id, "Play").await;
    let streamed: Vec<String> = sub.collect().await.into_iter().filter(|m| !is_snapshot_frame(m)).collect();
    assert_eq!(streamed, headless_lines("iris", &[8], 0.5, 3, 7));
}

#[tokio::test]
async fn mid_run_subscriber_gets_a_consistent_snapshot() {
    let s = start(ServerConfig {
        event_delay: Duration::from_millis(1),
        ..ServerConfig::default()
    })
    .await;
    let id = s.session("iris", iris_483(4)).await;
    s.control(&id, "Play").await;
    tokio::time::sleep(Duration::from_millis(25)).await;
    let lines = s.subscribe(&id, None).await.collect().await;
    let snap: SnapshotFrame = serde_json::from_str(&lines[0]).unwrap();
    let rest = &lines[1..];
    assert_eq!(seqs(rest), (snap.snapshot.next_seq..48).collect::<Vec<_>>());
    assert_eq!(snap.snapshot.history.len() as u32, snap.snapshot.current_epoch);
    // Parameters in the snapshot are those the next events start from.
    let headless = headless_lines("iris", &[8], 0.5, 4, 7);
    let expected_params = {
        let events: Vec<_> = headless.iter().map(|l| deserialize_event(l).unwrap()).collect();
        let mut data = netpulse_core::data::builtin("iris").unwrap();
        data = data.split(0.2, 7).unwrap();
        let config = netpulse_core::session::config_for_dataset(
            &data,
            &[8],
            netpulse_core::ActivationKind::Sigmoid,
            0.5,
            4,
            7,
        );
        let mut p = netpulse_core::nn::init_params(&config, 7).unwrap();
        for ev in &events[..snap.snapshot.next_seq as usize] {
            if let netpulse_core::EventKind::WeightsUpdated {
                layer, w_post, b_post, ..
            } = &ev.kind
            {
                p.layers[*layer as usize - 1].weights = w_post.clone();
                p.layers[*layer as usize - 1].biases = b_post.clone();
            }
        }
        p
    };
    assert_eq!(snap.snapshot.params, expected_params);
    assert_eq!(rest[..], headless[snap.snapshot.next_seq as usize..]);
}

#[tokio::test]
async fn pause_and_resume_keep_the_stream_intact() {
    let s = start(ServerConfig {
        event_delay: Duration::from_micros(500),
        ..ServerConfig::default()
    })
    .await;
    let id = s.session("iris", hidden_config(&[6], 0.3, 6, 11)).await;
    let sub = s.subscribe(&id, None).await;
    s.control(&id, "Play").await;
    for _ in 0..3 {
        tokio::time::sleep(Duration::from_millis(5)).await;
        s.control(&id, "Pause").await;
        tokio::time::sleep(Duration::from_millis(5)).await;
        s.control(&id, "Play").await;
    }
    let lines: Vec<String> = sub.collect().await.into_iter().skip(1).collect();
    assert_eq!(lines, headless_lines("iris", &[6], 0.3, 6, 11));
}

#[tokio::test]
async fn event_limit_stops_the_session_at_an_epoch_boundary() {
    let s = start(ServerConfig {
        event_limit: 30,
        ..ServerConfig::default()
    })
    .await;
    let id = s.session("iris", iris_483(5)).await;
    s.control(&id, "Play").await;
    let body = s.wait_for(&id, "Stopped").await;
    assert_eq!(body["session"]["next_seq"], 24);
    assert!(body["session"]["halted"].as_str().unwrap().contains("30"));
    let lines = s.subscribe(&id, Some(0)).await.collect().await;
    assert_eq!(seqs(&lines), (1..24).collect::<Vec<_>>());
}

#[tokio::test]
async fn deleting_a_session_ends_its_streams() {
    let s = start(ServerConfig {
        event_delay: Duration::from_millis(1),
        ..ServerConfig::default()
    })
    .await;
    let id = s.session("iris", iris_483(1000)).await;
    let sub = s.subscribe(&id, None).await;
    s.control(&id, "Play").await;
    tokio::time::sleep(Duration::from_millis(10)).await;
    s.http.delete(format!("{}/sessions/{id}", s.base)).send().await.unwrap();
    let lines = sub.collect().await;
    assert!(lines.len() < 1 + 12 * 1000);
}

fn isolation_case(specs: Vec<(usize, u64, u32)>) {
    let rt = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(4)
        .enable_all()
        .build()
        .unwrap();
    rt.block_on(async move {
        let s = start_default().await;
        let mut runs = Vec::new();
        for &(hidden, seed, epochs) in &specs {
            let id = s.session("iris", hidden_config(&[hidden], 0.4, epochs, seed)).await;
            let mut sub = s.subscribe(&id, None).await;
            sub.next_text().await.unwrap();
            runs.push((id, sub, hidden, seed, epochs));
        }
        // Start everything before reading anything so the workers interleave.
        for (id, ..) in &runs {
            s.control(id, "Play").await;
        }
        let mut streams = Vec::new();
        for (_, sub, hidden, seed, epochs) in runs {
            streams.push((tokio::spawn(sub.collect()), hidden, seed, epochs));
        }
        for (stream, hidden, seed, epochs) in streams {
            let lines = stream.await.unwrap();
            assert_eq!(lines, headless_lines("iris", &[hidden], 0.4, epochs, seed));
        }
    });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn sessions_never_see_each_others_events(
        specs in prop::collection::vec((1usize..6, 0u64..1000, 1u32..4), 2..5),
    ) {
        isolation_case(specs);
    }
}
