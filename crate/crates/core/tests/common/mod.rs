#![allow(dead_code)]

use netpulse_core::data::{Dataset, DatasetSchema, RawTargets};
use netpulse_core::nn::{ActivationKind, NetworkConfig, TaskKind};

pub fn xor() -> Dataset {
    let schema = DatasetSchema {
        feature_names: vec!["x1".into(), "x2".into()],
        target_name: "y".into(),
        task: TaskKind::Regression,
        class_labels: Vec::new(),
    };
    let x = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
    Dataset::from_parts("xor", schema, x, RawTargets::Values(vec![0.0, 1.0, 1.0, 0.0])).unwrap()
}

pub fn config(sizes: &[usize], activation: ActivationKind, task: TaskKind, lr: f64, epochs: u32, seed: u64) -> NetworkConfig {
    NetworkConfig {
        layer_sizes: sizes.to_vec(),
        activation,
        learning_rate: lr,
        epochs,
        task,
        seed,
    }
}
