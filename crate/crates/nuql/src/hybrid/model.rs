//! The hybrid model: dense extractor -> optional quantum layer -> dense head.

use crate::circuits::{layer_program, CircuitProgram, QuantumLayerSpec};
use crate::error::{Error, Result};
use crate::hybrid::dense::{Activation, DenseLayer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Architecture description. `bottleneck` is the extractor's output width;
/// with a quantum layer it must equal the layer's input-slot count (N for
/// angle embedding, 2N-1 for the IQP embedding).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArch {
    pub input_dim: usize,
    pub extractor_hidden: Vec<usize>,
    pub bottleneck: usize,
    pub quantum: Option<QuantumLayerSpec>,
    pub head_hidden: Vec<usize>,
    pub n_outputs: usize,
}

impl ModelArch {
    /// Quantum architecture; the bottleneck is sized from the layer spec.
    pub fn with_quantum(
        input_dim: usize,
        extractor_hidden: Vec<usize>,
        spec: QuantumLayerSpec,
        head_hidden: Vec<usize>,
        n_outputs: usize,
    ) -> Self {
        ModelArch {
            input_dim,
            extractor_hidden,
            bottleneck: spec.n_inputs(),
            quantum: Some(spec),
            head_hidden,
            n_outputs,
        }
    }

    /// Classical baseline: identical layout with the quantum layer skipped,
    /// features passing straight from the bottleneck into the head.
    pub fn classical(
        input_dim: usize,
        extractor_hidden: Vec<usize>,
        bottleneck: usize,
        head_hidden: Vec<usize>,
        n_outputs: usize,
    ) -> Self {
        ModelArch {
            input_dim,
            extractor_hidden,
            bottleneck,
            quantum: None,
            head_hidden,
            n_outputs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.bottleneck == 0 || self.n_outputs == 0 {
            return Err(Error::Config("zero-width model stage".into()));
        }
        if let Some(spec) = &self.quantum {
            if spec.n_inputs() != self.bottleneck {
                return Err(Error::Config(format!(
                    "bottleneck {} does not match the quantum layer's {} input slots",
                    self.bottleneck,
                    spec.n_inputs()
                )));
            }
        }
        Ok(())
    }

    /// Width of the vector entering the head.
    fn head_input_dim(&self) -> usize {
        match &self.quantum {
            Some(spec) => spec.n_qubits,
            None => self.bottleneck,
        }
    }
}

/// One forward pass outcome for a single sample.
#[derive(Debug, Clone)]
pub struct SampleForward {
    pub output: Vec<f64>,
    /// Ancilla acceptance probability; `None` for the classical baseline.
    pub success_prob: Option<f64>,
    /// True when post-selection annihilated the state and zero expectations
    /// were substituted.
    pub degenerate: bool,
}

/// Aggregate forward statistics over a batch.
#[derive(Debug, Clone, Default)]
pub struct ForwardStats {
    pub success_sum: f64,
    pub success_count: usize,
    pub degenerate_count: usize,
}

impl ForwardStats {
    pub fn record(&mut self, sample: &SampleForward) {
        if let Some(p) = sample.success_prob {
            self.success_sum += p;
            self.success_count += 1;
        }
        if sample.degenerate {
            self.degenerate_count += 1;
        }
    }

    pub fn mean_success(&self) -> Option<f64> {
        if self.success_count > 0 {
            Some(self.success_sum / self.success_count as f64)
        } else {
            None
        }
    }
}

/// Trainable hybrid model. The compiled circuit is cached on construction;
/// the quantum parameters are part of the trainable vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HybridModel {
    pub arch: ModelArch,
    pub extractor: Vec<DenseLayer>,
    pub quantum_params: Vec<f64>,
    pub head: Vec<DenseLayer>,
    #[serde(skip)]
    compiled: Option<CircuitProgram>,
}

impl HybridModel {
    /// Xavier-uniform weights (bound sqrt(6 / (n_in + n_out))), zero biases,
    /// quantum angles uniform in [0, 2 pi). Deterministic in the seed.
    pub fn init(arch: ModelArch, seed: u64) -> Result<Self> {
        arch.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let mut extractor = Vec::new();
        let mut dims = vec![arch.input_dim];
        dims.extend_from_slice(&arch.extractor_hidden);
        dims.push(arch.bottleneck);
        for w in dims.windows(2) {
            // hidden layers ReLU, the bottleneck projection linear
            let activation = if w[1] == arch.bottleneck && extractor.len() == dims.len() - 2 {
                Activation::None
            } else {
                Activation::Relu
            };
            extractor.push(xavier_layer(w[0], w[1], activation, &mut rng));
        }

        let quantum_params: Vec<f64> = match &arch.quantum {
            Some(spec) => (0..spec.n_params())
                .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
                .collect(),
            None => Vec::new(),
        };

        let mut head = Vec::new();
        let mut dims = vec![arch.head_input_dim()];
        dims.extend_from_slice(&arch.head_hidden);
        dims.push(arch.n_outputs);
        for (i, w) in dims.windows(2).enumerate() {
            let activation = if i + 2 == dims.len() { Activation::None } else { Activation::Relu };
            head.push(xavier_layer(w[0], w[1], activation, &mut rng));
        }

        let compiled = arch.quantum.as_ref().map(layer_program);
        Ok(HybridModel { arch, extractor, quantum_params, head, compiled })
    }

    /// The cached circuit, compiled on demand after deserialization.
    pub fn program(&mut self) -> Option<&CircuitProgram> {
        if self.compiled.is_none() {
            self.compiled = self.arch.quantum.as_ref().map(layer_program);
        }
        self.compiled.as_ref()
    }

    pub fn extractor_forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut v = x.to_vec();
        for layer in &self.extractor {
            v = layer.forward(&v)?;
        }
        Ok(v)
    }

    fn head_forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut v = x.to_vec();
        for layer in &self.head {
            v = layer.forward(&v)?;
        }
        Ok(v)
    }

    /// Quantum layer outputs for a bottleneck vector; zero expectations with
    /// `degenerate = true` when post-selection annihilates the state.
    pub fn quantum_forward(&mut self, q_in: &[f64]) -> Result<(Vec<f64>, Option<f64>, bool)> {
        let spec = match self.arch.quantum {
            Some(spec) => spec,
            None => return Ok((q_in.to_vec(), None, false)),
        };
        let thetas = self.quantum_params.clone();
        let program = self.program().expect("quantum arch compiles");
        let values = crate::statevec::Bindings::new(&thetas, q_in);
        if spec.variant.is_wrapped() {
            match crate::circuits::run_postselected(program, &values) {
                Ok((post, p)) => {
                    let expectations: Result<Vec<f64>> =
                        (0..spec.n_qubits).map(|q| post.expectation_z(q)).collect();
                    Ok((expectations?, Some(p), false))
                }
                Err(Error::DegeneratePostselection(_)) => {
                    Ok((vec![0.0; spec.n_qubits], Some(0.0), true))
                }
                Err(e) => Err(e),
            }
        } else {
            let state = program.run(&values)?;
            let expectations: Result<Vec<f64>> =
                (0..spec.n_qubits).map(|q| state.expectation_z(q)).collect();
            Ok((expectations?, Some(1.0), false))
        }
    }

    /// Shot-sampled quantum pass: estimates expectations and acceptance from
    /// `shots` simulated measurements instead of exact probabilities.
    pub fn quantum_forward_sampled(
        &mut self,
        q_in: &[f64],
        shots: u64,
        rng: &mut impl rand::Rng,
    ) -> Result<(Vec<f64>, Option<f64>, bool)> {
        let spec = match self.arch.quantum {
            Some(spec) => spec,
            None => return Ok((q_in.to_vec(), None, false)),
        };
        let thetas = self.quantum_params.clone();
        match crate::circuits::forward_nonunitary_sampled(&spec, &thetas, q_in, shots, rng) {
            Ok((expectations, p)) => Ok((expectations, Some(p), false)),
            Err(Error::DegeneratePostselection(_)) => {
                Ok((vec![0.0; spec.n_qubits], Some(0.0), true))
            }
            Err(e) => Err(e),
        }
    }

    /// End-to-end forward pass for one sample.
    pub fn forward(&mut self, x: &[f64]) -> Result<SampleForward> {
        let bottleneck = self.extractor_forward(x)?;
        let (head_in, success_prob, degenerate) = self.quantum_forward(&bottleneck)?;
        let output = self.head_forward(&head_in)?;
        Ok(SampleForward { output, success_prob, degenerate })
    }

    /// Forward a whole batch, collecting success statistics.
    pub fn forward_batch(&mut self, xs: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, ForwardStats)> {
        let mut outputs = Vec::with_capacity(xs.len());
        let mut stats = ForwardStats::default();
        for x in xs {
            let sample = self.forward(x)?;
            stats.record(&sample);
            outputs.push(sample.output);
        }
        Ok((outputs, stats))
    }

    pub fn n_trainable(&self) -> usize {
        self.extractor.iter().map(DenseLayer::n_trainable).sum::<usize>()
            + self.quantum_params.len()
            + self.head.iter().map(DenseLayer::n_trainable).sum::<usize>()
    }

    /// Flatten all trainable parameters in a stable order: extractor layers
    /// (weights then bias), quantum angles, head layers.
    pub fn params_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.n_trainable());
        for layer in &self.extractor {
            flat.extend_from_slice(&layer.weights);
            flat.extend_from_slice(&layer.bias);
        }
        flat.extend_from_slice(&self.quantum_params);
        for layer in &self.head {
            flat.extend_from_slice(&layer.weights);
            flat.extend_from_slice(&layer.bias);
        }
        flat
    }

    pub fn set_params_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.n_trainable() {
            return Err(Error::LengthMismatch {
                what: "flat parameters",
                expected: self.n_trainable(),
                got: flat.len(),
            });
        }
        let mut cursor = 0;
        let mut take = |n: usize| {
            let slice = &flat[cursor..cursor + n];
            cursor += n;
            slice.to_vec()
        };
        for layer in &mut self.extractor {
            layer.weights = take(layer.weights.len());
            layer.bias = take(layer.bias.len());
        }
        self.quantum_params = take(self.quantum_params.len());
        for layer in &mut self.head {
            layer.weights = take(layer.weights.len());
            layer.bias = take(layer.bias.len());
        }
        Ok(())
    }
}

fn xavier_layer(n_in: usize, n_out: usize, activation: Activation, rng: &mut ChaCha8Rng) -> DenseLayer {
    let bound = (6.0 / (n_in + n_out) as f64).sqrt();
    let weights = (0..n_in * n_out).map(|_| rng.gen_range(-bound..bound)).collect();
    DenseLayer { n_in, n_out, weights, bias: vec![0.0; n_out], activation }
}
