//! Adam optimizer with bias correction.

use crate::error::{Error, Result};
use crate::hybrid::train::TrainConfig;

/// First/second moment estimates and the step counter.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(n_params: usize) -> Self {
        AdamState { m: vec![0.0; n_params], v: vec![0.0; n_params], t: 0 }
    }

    /// One bias-corrected update: params -= lr * m_hat / (sqrt(v_hat) + eps).
    pub fn step(&mut self, params: &mut [f64], grads: &[f64], config: &TrainConfig) -> Result<()> {
        if params.len() != grads.len() || params.len() != self.m.len() {
            return Err(Error::LengthMismatch {
                what: "optimizer state",
                expected: self.m.len(),
                got: params.len().min(grads.len()),
            });
        }
        self.t += 1;
        let bc1 = 1.0 - config.beta1.powi(self.t as i32);
        let bc2 = 1.0 - config.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = config.beta1 * self.m[i] + (1.0 - config.beta1) * grads[i];
            self.v[i] = config.beta2 * self.v[i] + (1.0 - config.beta2) * grads[i] * grads[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= config.learning_rate * m_hat / (v_hat.sqrt() + config.epsilon);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(lr: f64) -> TrainConfig {
        TrainConfig { learning_rate: lr, ..TrainConfig::default() }
    }

    #[test]
    fn first_step_moves_by_lr_times_sign() {
        // at t = 1 the bias corrections cancel, so m_hat/sqrt(v_hat) = sign(g)
        let cfg = config(0.001);
        let mut state = AdamState::new(3);
        let mut params = vec![1.0, -2.0, 0.5];
        let grads = vec![0.3, -4.0, 1e-3];
        state.step(&mut params, &grads, &cfg).unwrap();
        for (i, (p, g)) in params.iter().zip(&grads).enumerate() {
            let expected = [1.0, -2.0, 0.5][i] - 0.001 * g.signum();
            assert!(
                (p - expected).abs() < 1e-5,
                "param {i}: {p} vs {expected}"
            );
        }
    }

    #[test]
    fn zero_gradient_leaves_params_unchanged() {
        let cfg = config(0.1);
        let mut state = AdamState::new(2);
        let mut params = vec![0.4, -0.9];
        state.step(&mut params, &[0.0, 0.0], &cfg).unwrap();
        assert_eq!(params, vec![0.4, -0.9]);
    }

    #[test]
    fn minimizes_quadratic_scalar() {
        // f(x) = x^2 from x = 1 with lr 0.1 should get below 0.05 in 200 steps
        let cfg = config(0.1);
        let mut state = AdamState::new(1);
        let mut x = vec![1.0];
        for _ in 0..200 {
            let g = vec![2.0 * x[0]];
            state.step(&mut x, &g, &cfg).unwrap();
        }
        assert!(x[0].abs() < 0.05, "x = {}", x[0]);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let cfg = config(0.1);
        let mut state = AdamState::new(2);
        let mut params = vec![0.0; 3];
        assert!(state.step(&mut params, &[0.0; 3], &cfg).is_err());
    }
}
