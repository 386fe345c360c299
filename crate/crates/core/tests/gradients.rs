mod common;

use netpulse_core::gradcheck::{finite_diff_gradients, max_relative_error, DEFAULT_EPS};
use netpulse_core::nn::{self, ActivationKind, Gradients, NetworkConfig, NetworkParams, TaskKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use common::config;

const KINK: f64 = 1e-3;

fn random_sample(c: &NetworkConfig, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed ^ 0x9e37_79b9);
    let x = (0..c.input_size()).map(|_| rng.random::<f64>()).collect();
    let t = match c.task {
        TaskKind::Classification => {
            let k = rng.random_range(0..c.output_size());
            (0..c.output_size()).map(|i| if i == k { 1.0 } else { 0.0 }).collect()
        }
        TaskKind::Regression => vec![rng.random::<f64>()],
    };
    (x, t)
}

/// For ReLU nets, skip every parameter feeding a hidden unit whose
/// pre-activation sits within `KINK` of zero, and every parameter upstream of it.
fn kink_mask(params: &NetworkParams, x: &[f64], c: &NetworkConfig) -> Vec<Option<usize>> {
    let trace = nn::forward(params, x, c).unwrap();
    let depth = params.layers.len();
    let mut lowest_clean: Vec<Option<usize>> = vec![None; depth];
    if c.activation == ActivationKind::Relu {
        for l in 0..depth - 1 {
            if trace.pre_activations[l].iter().any(|z| z.abs() < KINK) {
                // layers 0..=l are contaminated
                for slot in lowest_clean.iter_mut().take(l + 1) {
                    *slot = Some(l);
                }
            }
        }
    }
    lowest_clean
}

fn check(c: &NetworkConfig, seed: u64) -> f64 {
    let params = nn::init_params(c, seed).unwrap();
    let (x, t) = random_sample(c, seed);
    let trace = nn::forward(&params, &x, c).unwrap();
    let analytic: Gradients = nn::backward(&params, &trace, &t, c).unwrap();
    let numeric = finite_diff_gradients(&params, &x, &t, c, DEFAULT_EPS).unwrap();
    let mask = kink_mask(&params, &x, c);
    max_relative_error(&analytic, &numeric, |l, _, _| mask[l].is_some())
}

#[test]
fn backprop_matches_finite_differences_on_fixed_grid() {
    let shapes: [(&[usize], TaskKind); 3] = [
        (&[2, 3, 2], TaskKind::Classification),
        (&[4, 8, 3], TaskKind::Classification),
        (&[6, 4, 1], TaskKind::Regression),
    ];
    for seed in 0..10 {
        for (sizes, task) in shapes {
            for act in [ActivationKind::Sigmoid, ActivationKind::Relu] {
                let c = config(sizes, act, task, 0.1, 1, seed);
                let err = check(&c, seed);
                assert!(err <= 1e-4, "{sizes:?} {act} seed {seed}: {err}");
            }
        }
    }
}

#[test]
fn halving_eps_improves_the_estimate() {
    let c = config(&[3, 4, 2], ActivationKind::Sigmoid, TaskKind::Classification, 0.1, 1, 5);
    let params = nn::init_params(&c, 5).unwrap();
    let (x, t) = random_sample(&c, 5);
    let trace = nn::forward(&params, &x, &c).unwrap();
    let exact = nn::backward(&params, &trace, &t, &c).unwrap();
    let coarse = finite_diff_gradients(&params, &x, &t, &c, 1e-2).unwrap();
    let fine = finite_diff_gradients(&params, &x, &t, &c, 5e-3).unwrap();
    let err = |g: &Gradients| {
        g.layers
            .iter()
            .zip(&exact.layers)
            .flat_map(|(a, b)| a.weights.as_slice().iter().zip(b.weights.as_slice()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
    };
    let (e1, e2) = (err(&coarse), err(&fine));
    assert!(e2 < e1, "{e2} !< {e1}");
    // central differences are second order: halving eps should cut error ~4x
    assert!(e2 < e1 / 3.0, "{e2} vs {e1}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn backprop_matches_oracle_on_random_nets(
        hidden in prop::collection::vec(1usize..6, 0..3),
        inputs in 1usize..5,
        classes in 2usize..4,
        regression in any::<bool>(),
        relu in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let task = if regression { TaskKind::Regression } else { TaskKind::Classification };
        let mut sizes = vec![inputs];
        sizes.extend(hidden);
        sizes.push(if regression { 1 } else { classes });
        let act = if relu { ActivationKind::Relu } else { ActivationKind::Sigmoid };
        let c = config(&sizes, act, task, 0.1, 1, seed);
        let err = check(&c, seed);
        prop_assert!(err <= 1e-4, "{:?}: {}", sizes, err);
    }

    #[test]
    fn softmax_is_a_distribution(logits in prop::collection::vec(-500.0f64..500.0, 1..8)) {
        let p = nn::softmax(&logits);
        prop_assert!(p.iter().all(|&v| v >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn losses_are_nonnegative(
        logits in prop::collection::vec(-50.0f64..50.0, 2..6),
        k in 0usize..6,
        out in prop::collection::vec(-1e3f64..1e3, 1..4),
        tgt in prop::collection::vec(-1e3f64..1e3, 1..4),
    ) {
        let p = nn::softmax(&logits);
        let mut t = vec![0.0; p.len()];
        t[k % p.len()] = 1.0;
        prop_assert!(nn::loss(TaskKind::Classification, &p, &t).unwrap() >= 0.0);
        let n = out.len().min(tgt.len());
        prop_assert!(nn::loss(TaskKind::Regression, &out[..n], &tgt[..n]).unwrap() >= 0.0);
    }

    #[test]
    fn update_is_exactly_minus_lr_grad(seed in any::<u64>(), lr in 0.0f64..10.0) {
        let c = config(&[3, 4, 2], ActivationKind::Sigmoid, TaskKind::Classification, 0.1, 1, seed);
        let p = nn::init_params(&c, seed).unwrap();
        let (x, t) = random_sample(&c, seed);
        let g = nn::backward(&p, &nn::forward(&p, &x, &c).unwrap(), &t, &c).unwrap();
        let post = nn::sgd_update(&p, &g, lr).unwrap();
        for ((pre, post), g) in p.layers.iter().zip(&post.layers).zip(&g.layers) {
            for ((a, b), d) in pre.weights.as_slice().iter().zip(post.weights.as_slice()).zip(g.weights.as_slice()) {
                prop_assert_eq!(b.to_bits(), (a - lr * d).to_bits());
            }
            for ((a, b), d) in pre.biases.iter().zip(&post.biases).zip(&g.biases) {
                prop_assert_eq!(b.to_bits(), (a - lr * d).to_bits());
            }
        }
    }
}
