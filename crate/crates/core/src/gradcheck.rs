//! Central-difference gradient estimates, used to check [`crate::nn::backward`].
//!
//! This path only evaluates `forward` and `loss`; it shares no code with
//! backpropagation.

use crate::nn::{forward, loss, Gradients, Matrix, NetworkConfig, NetworkParams, Result};

pub const DEFAULT_EPS: f64 = 1e-5;

fn sample_loss(params: &NetworkParams, x: &[f64], target: &[f64], config: &NetworkConfig) -> Result<f64> {
    let trace = forward(params, x, config)?;
    loss(config.task, trace.output(), target)
}

/// `(L(θ + eps) − L(θ − eps)) / (2·eps)` for every weight and bias.
pub fn finite_diff_gradients(
    params: &NetworkParams,
    x: &[f64],
    target: &[f64],
    config: &NetworkConfig,
    eps: f64,
) -> Result<Gradients> {
    let mut probe = params.clone();
    let mut layers = Vec::with_capacity(params.layers.len());
    for l in 0..params.layers.len() {
        let (rows, cols) = params.layers[l].weights.shape();
        let mut dw = Vec::with_capacity(rows * cols);
        for k in 0..rows * cols {
            let orig = params.layers[l].weights.as_slice()[k];
            probe.layers[l].weights.as_mut_slice()[k] = orig + eps;
            let up = sample_loss(&probe, x, target, config)?;
            probe.layers[l].weights.as_mut_slice()[k] = orig - eps;
            let down = sample_loss(&probe, x, target, config)?;
            probe.layers[l].weights.as_mut_slice()[k] = orig;
            dw.push((up - down) / (2.0 * eps));
        }
        let mut db = Vec::with_capacity(rows);
        for k in 0..rows {
            let orig = params.layers[l].biases[k];
            probe.layers[l].biases[k] = orig + eps;
            let up = sample_loss(&probe, x, target, config)?;
            probe.layers[l].biases[k] = orig - eps;
            let down = sample_loss(&probe, x, target, config)?;
            probe.layers[l].biases[k] = orig;
            db.push((up - down) / (2.0 * eps));
        }
        layers.push(crate::nn::Layer {
            weights: Matrix::from_vec(rows, cols, dw)?,
            biases: db,
        });
    }
    Ok(Gradients {
        layers,
        deltas: Vec::new(),
    })
}

/// Relative error with a floor on the denominator so that two near-zero
/// estimates are not reported as wildly different.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let denom = analytic.abs().max(numeric.abs()).max(REL_ERR_FLOOR);
    (analytic - numeric).abs() / denom
}

pub const REL_ERR_FLOOR: f64 = 1e-6;

/// Largest relative error between two gradient sets, skipping coordinates for
/// which `skip(layer, is_bias, flat_index)` is true.
pub fn max_relative_error<F>(analytic: &Gradients, numeric: &Gradients, mut skip: F) -> f64
where
    F: FnMut(usize, bool, usize) -> bool,
{
    let mut worst: f64 = 0.0;
    for (l, (a, n)) in analytic.layers.iter().zip(&numeric.layers).enumerate() {
        for (k, (x, y)) in a.weights.as_slice().iter().zip(n.weights.as_slice()).enumerate() {
            if !skip(l, false, k) {
                worst = worst.max(relative_error(*x, *y));
            }
        }
        for (k, (x, y)) in a.biases.iter().zip(&n.biases).enumerate() {
            if !skip(l, true, k) {
                worst = worst.max(relative_error(*x, *y));
            }
        }
    }
    worst
}
