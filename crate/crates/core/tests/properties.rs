mod common;

use std::sync::Arc;

use netpulse_core::data::builtin_iris;
use netpulse_core::nn::{self, ActivationKind, Batch, TaskKind};
use netpulse_core::session::{transition, Command, Session, SessionError, SessionStatus};
use netpulse_core::trace::{self, deserialize_event, run_epoch, serialize_event, validate_trace, EventKind, TrainingEvent};
use proptest::prelude::*;

use common::config;

fn arb_config() -> impl Strategy<Value = netpulse_core::NetworkConfig> {
    (
        prop::collection::vec(1usize..6, 0..3),
        1usize..5,
        2usize..4,
        any::<bool>(),
        any::<bool>(),
        0.0f64..3.0,
        any::<u64>(),
    )
        .prop_map(|(hidden, inputs, classes, regression, relu, lr, seed)| {
            let task = if regression { TaskKind::Regression } else { TaskKind::Classification };
            let mut sizes = vec![inputs];
            sizes.extend(hidden);
            sizes.push(if regression { 1 } else { classes });
            let act = if relu { ActivationKind::Relu } else { ActivationKind::Sigmoid };
            // lr = 0 is legal for run_epoch even though sessions refuse it
            config(&sizes, act, task, lr, 1, seed)
        })
}

fn toy_rows(c: &netpulse_core::NetworkConfig, n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..n {
        let f = (seed as usize).wrapping_add(i * 7919);
        x.push((0..c.input_size()).map(|j| ((f + j * 31) % 97) as f64 / 96.0).collect());
        y.push(match c.task {
            TaskKind::Classification => {
                let mut row = vec![0.0; c.output_size()];
                row[f % c.output_size()] = 1.0;
                row
            }
            TaskKind::Regression => vec![(f % 13) as f64 / 12.0],
        });
    }
    (x, y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn traced_epochs_satisfy_the_grammar(c in arb_config(), epochs in 1u32..4, rows in 1usize..6) {
        let (x, y) = toy_rows(&c, rows, c.seed);
        let mut params = nn::init_params(&config(&c.layer_sizes, c.activation, c.task, 1.0, 1, c.seed), c.seed).unwrap();
        let mut events: Vec<TrainingEvent> = Vec::new();
        for e in 0..epochs {
            let run = run_epoch(&params, &c, Batch::new(&x, &y).unwrap(), None, e, events.len() as u64).unwrap();
            prop_assert_eq!(run.events.len(), trace::events_per_epoch(c.depth()));
            params = run.params;
            events.extend(run.events);
        }
        prop_assert_eq!(validate_trace(&events), Ok(()));
        for (i, e) in events.iter().enumerate() {
            prop_assert_eq!(e.seq, i as u64);
            let back = deserialize_event(&serialize_event(e)).unwrap();
            prop_assert_eq!(&back, e);
            if c.learning_rate == 0.0 {
                if let EventKind::WeightsUpdated { w_pre, w_post, .. } = &e.kind {
                    prop_assert_eq!(w_pre, w_post);
                }
            }
        }
    }

    #[test]
    fn random_command_streams_stay_in_the_table(ops in prop::collection::vec(0u8..5, 0..60)) {
        let ds = Arc::new(builtin_iris());
        let mut s = Session::create(ds, config(&[4, 3, 3], ActivationKind::Sigmoid, TaskKind::Classification, 0.5, 2, 1)).unwrap();
        for op in ops {
            let before = s.status();
            match op {
                0..=2 => {
                    let cmd = Command::ALL[op as usize];
                    match (s.control(cmd), transition(before, cmd)) {
                        (Ok(now), Some(want)) => prop_assert_eq!(now, want),
                        (Err(SessionError::IllegalTransition { status, .. }), None) => {
                            prop_assert_eq!(status, before);
                            prop_assert_eq!(s.status(), before);
                        }
                        (got, want) => prop_assert!(false, "{:?} {:?} -> {:?} vs {:?}", before, cmd, got, want),
                    }
                }
                _ => match s.advance() {
                    // in particular nothing is ever emitted after Stop
                    Ok(_) => prop_assert_eq!(before, SessionStatus::Running),
                    Err(SessionError::NotRunning { status }) => prop_assert_eq!(status, before),
                    Err(e) => prop_assert!(false, "unexpected {}", e),
                },
            }
            prop_assert!(s.current_epoch() <= s.config().epochs);
            prop_assert_eq!(s.metrics_history().len() as u32, s.current_epoch());
        }
    }

    #[test]
    fn pausing_anywhere_reproduces_the_uninterrupted_trace(cut in 0usize..36, probe in any::<bool>()) {
        let ds = Arc::new(builtin_iris().split(0.2, 5).unwrap());
        let c = config(&[4, 6, 3], ActivationKind::Relu, TaskKind::Classification, 0.4, 3, 9);
        let mut straight = Session::create(Arc::clone(&ds), c.clone()).unwrap();
        straight.control(Command::Play).unwrap();
        let want: Vec<String> = straight.run_to_end().unwrap().iter().map(serialize_event).collect();

        let mut s = Session::create(ds, c).unwrap();
        s.control(Command::Play).unwrap();
        let mut got = Vec::new();
        for _ in 0..cut {
            got.push(serialize_event(&s.advance().unwrap()));
        }
        s.control(Command::Pause).unwrap();
        if probe {
            // predictions while paused must not disturb the rest of the trace
            s.predict(&[5.0, 3.0, 1.5, 0.2]).unwrap();
            s.neuron_equation(1, 0).unwrap();
        }
        prop_assert!(s.advance().is_err());
        s.control(Command::Play).unwrap();
        got.extend(s.run_to_end().unwrap().iter().map(serialize_event));
        prop_assert_eq!(got, want);
    }
}

#[test]
fn stop_while_paused_ends_the_trace() {
    let mut s = Session::create(
        Arc::new(builtin_iris()),
        config(&[4, 3, 3], ActivationKind::Sigmoid, TaskKind::Classification, 0.5, 5, 1),
    )
    .unwrap();
    s.control(Command::Play).unwrap();
    s.advance().unwrap();
    s.control(Command::Pause).unwrap();
    assert_eq!(s.control(Command::Stop).unwrap(), SessionStatus::Stopped);
    for cmd in Command::ALL {
        assert!(s.control(cmd).is_err());
    }
    assert!(s.advance().is_err());
    assert_eq!(s.next_seq(), 1);
    // predict stays available
    assert!(s.predict(&[5.0, 3.0, 1.5, 0.2]).is_ok());
}
