//! Fully connected layers with manual forward/backward passes.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    None,
}

/// Dense layer, weights stored row-major as out x in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub n_in: usize,
    pub n_out: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn zeros(n_in: usize, n_out: usize, activation: Activation) -> Self {
        DenseLayer {
            n_in,
            n_out,
            weights: vec![0.0; n_in * n_out],
            bias: vec![0.0; n_out],
            activation,
        }
    }

    pub fn n_trainable(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    /// Pre-activation z = W x + b and the activated output.
    pub fn forward_cached(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if x.len() != self.n_in {
            return Err(Error::LengthMismatch {
                what: "layer input",
                expected: self.n_in,
                got: x.len(),
            });
        }
        let mut pre = self.bias.clone();
        for (o, pre_o) in pre.iter_mut().enumerate() {
            let row = &self.weights[o * self.n_in..(o + 1) * self.n_in];
            *pre_o += row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>();
        }
        let post = match self.activation {
            Activation::Relu => pre.iter().map(|z| z.max(0.0)).collect(),
            Activation::None => pre.clone(),
        };
        Ok((pre, post))
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_cached(x)?.1)
    }

    /// Backpropagate d_post through the layer. Accumulates weight and bias
    /// gradients into `dw`/`db` and returns dL/dx.
    pub fn backward(
        &self,
        x: &[f64],
        pre: &[f64],
        d_post: &[f64],
        dw: &mut [f64],
        db: &mut [f64],
    ) -> Vec<f64> {
        let mut dx = vec![0.0; self.n_in];
        for o in 0..self.n_out {
            let dz = match self.activation {
                Activation::Relu if pre[o] <= 0.0 => 0.0,
                _ => d_post[o],
            };
            if dz == 0.0 {
                continue;
            }
            db[o] += dz;
            let row = &self.weights[o * self.n_in..(o + 1) * self.n_in];
            let drow = &mut dw[o * self.n_in..(o + 1) * self.n_in];
            for i in 0..self.n_in {
                drow[i] += dz * x[i];
                dx[i] += dz * row[i];
            }
        }
        dx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_two_by_two_forward() {
        let layer = DenseLayer {
            n_in: 2,
            n_out: 2,
            weights: vec![1.0, 2.0, -0.5, 0.25],
            bias: vec![0.1, -0.2],
            activation: Activation::None,
        };
        let y = layer.forward(&[3.0, -1.0]).unwrap();
        // row 0: 1*3 + 2*(-1) + 0.1 = 1.1; row 1: -0.5*3 + 0.25*(-1) - 0.2 = -1.95
        assert!((y[0] - 1.1).abs() < 1e-15);
        assert!((y[1] + 1.95).abs() < 1e-15);
    }

    #[test]
    fn zero_weights_pass_bias_through() {
        let mut layer = DenseLayer::zeros(3, 2, Activation::None);
        layer.bias = vec![0.7, -0.4];
        let y = layer.forward(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(y, vec![0.7, -0.4]);
    }

    #[test]
    fn relu_clips_and_gates_gradient() {
        let layer = DenseLayer {
            n_in: 1,
            n_out: 2,
            weights: vec![1.0, -1.0],
            bias: vec![0.0, 0.0],
            activation: Activation::Relu,
        };
        let (pre, post) = layer.forward_cached(&[2.0]).unwrap();
        assert_eq!(post, vec![2.0, 0.0]);
        let mut dw = vec![0.0; 2];
        let mut db = vec![0.0; 2];
        let dx = layer.backward(&[2.0], &pre, &[1.0, 1.0], &mut dw, &mut db);
        // the clipped unit contributes nothing
        assert_eq!(dw, vec![2.0, 0.0]);
        assert_eq!(db, vec![1.0, 0.0]);
        assert_eq!(dx, vec![1.0]);
    }

    #[test]
    fn backward_matches_finite_difference() {
        let layer = DenseLayer {
            n_in: 3,
            n_out: 2,
            weights: vec![0.3, -0.7, 0.2, 0.9, 0.1, -0.4],
            bias: vec![0.05, -0.15],
            activation: Activation::Relu,
        };
        let x = [0.4, -0.8, 1.2];
        let d_post = [0.7, -0.3];
        let scalar = |l: &DenseLayer| -> f64 {
            let y = l.forward(&x).unwrap();
            y.iter().zip(&d_post).map(|(a, b)| a * b).sum()
        };
        let (pre, _) = layer.forward_cached(&x).unwrap();
        let mut dw = vec![0.0; 6];
        let mut db = vec![0.0; 2];
        layer.backward(&x, &pre, &d_post, &mut dw, &mut db);
        let h = 1e-6;
        for idx in 0..6 {
            let mut plus = layer.clone();
            plus.weights[idx] += h;
            let mut minus = layer.clone();
            minus.weights[idx] -= h;
            let fd = (scalar(&plus) - scalar(&minus)) / (2.0 * h);
            assert!((dw[idx] - fd).abs() < 1e-8);
        }
    }
}
