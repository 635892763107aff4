//! Differentiation of quantum-layer outputs.
//!
//! Three routes with very different trust profiles:
//!
//! * [`grad_reverse`] — adjoint-mode sweeps over the amplitudes, exact for
//!   both the unitary pass and the post-selected pass. Post-selected
//!   expectations are Rayleigh quotients u_i / p over the unnormalized
//!   branch, so their derivative carries the quotient rule; ignoring the
//!   normalization's parameter dependence would bias every gradient.
//! * [`grad_unitary_parameter_shift`] — the two-point shift rule, valid for
//!   the unitary baseline where every parametric gate has a single-frequency
//!   spectrum.
//! * [`grad_finite_difference`] — central differences, the slow oracle the
//!   other two are tested against.

use crate::circuits::{layer_program, CircuitProgram, QuantumLayerSpec};
use crate::error::{Error, Result};
use crate::statevec::{Bindings, ParamRef, StateVector};
use num_complex::Complex64;

/// Jacobians of the layer outputs with respect to trainable parameters and
/// input features, plus the success probability and its gradient.
#[derive(Debug, Clone)]
pub struct GradientRecord {
    /// Forward expectations <Z_i>, one per main qubit.
    pub expectations: Vec<f64>,
    /// d<Z_i>/d theta_k, shape N x P.
    pub d_expectations_d_params: Vec<Vec<f64>>,
    /// d<Z_i>/d x_m, shape N x M.
    pub d_expectations_d_inputs: Vec<Vec<f64>>,
    /// Ancilla-0 acceptance probability (1 for the unitary baseline).
    pub success_prob: f64,
    pub d_success_d_params: Vec<f64>,
    pub d_success_d_inputs: Vec<f64>,
}

impl GradientRecord {
    pub fn all_finite(&self) -> bool {
        self.expectations.iter().all(|v| v.is_finite())
            && self.d_expectations_d_params.iter().flatten().all(|v| v.is_finite())
            && self.d_expectations_d_inputs.iter().flatten().all(|v| v.is_finite())
            && self.success_prob.is_finite()
            && self.d_success_d_params.iter().all(|v| v.is_finite())
            && self.d_success_d_inputs.iter().all(|v| v.is_finite())
    }
}

/// Value and gradient of one quadratic form <psi|A|psi> for a diagonal real
/// observable, obtained by a single adjoint sweep.
struct QuadraticForm {
    value: f64,
    d_thetas: Vec<f64>,
    d_inputs: Vec<f64>,
}

/// Adjoint sweep for L = <psi|diag(obs)|psi> where |psi> = program(|0>).
///
/// Walks the circuit backwards once, accumulating
/// dL/d theta = 2 Re <lambda| dU_g |phi_{g-1}> for every parametric gate.
fn quadratic_form_adjoint(
    program: &CircuitProgram,
    values: &Bindings,
    final_state: &StateVector,
    obs: &[f64],
) -> Result<QuadraticForm> {
    let mut lambda_amps: Vec<Complex64> = final_state
        .amplitudes()
        .iter()
        .zip(obs)
        .map(|(a, o)| a * *o)
        .collect();
    let value = final_state
        .amplitudes()
        .iter()
        .zip(&lambda_amps)
        .map(|(a, l)| (a.conj() * l).re)
        .sum();

    let mut lambda = StateVector::from_amplitudes(program.n_qubits, lambda_amps.drain(..).collect())?;
    let mut phi = final_state.clone();
    let mut d_thetas = vec![0.0; values.thetas.len()];
    let mut d_inputs = vec![0.0; values.inputs.len()];

    for gate in program.gates.iter().rev() {
        phi.apply_gate_adjoint(gate, values)?;
        if let Some(slot) = gate.slot {
            let mut dphi = phi.clone();
            dphi.apply_gate_deriv(gate, values)?;
            let overlap = lambda.inner(&dphi);
            let contribution = 2.0 * overlap.re;
            match slot {
                ParamRef::Theta(i) => d_thetas[i] += contribution,
                ParamRef::Input(i) => d_inputs[i] += contribution,
            }
        }
        lambda.apply_gate_adjoint(gate, values)?;
    }
    Ok(QuadraticForm { value, d_thetas, d_inputs })
}

/// Diagonal of Z on `qubit` over an n-qubit register (+1 / -1 by bit value).
fn z_diagonal(n_qubits: usize, qubit: usize) -> Vec<f64> {
    let dim = 1usize << n_qubits;
    (0..dim)
        .map(|i| if (i >> (n_qubits - 1 - qubit)) & 1 == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// Diagonal of the ancilla-0 projector (ancilla = qubit 0).
fn ancilla_projector_diagonal(n_qubits: usize) -> Vec<f64> {
    let dim = 1usize << n_qubits;
    let half = dim / 2;
    (0..dim).map(|i| if i < half { 1.0 } else { 0.0 }).collect()
}

/// Reverse-mode Jacobians for a layer spec. Works on every variant; the
/// wrapped ones differentiate through the post-selection renormalization.
pub fn grad_reverse(
    spec: &QuantumLayerSpec,
    thetas: &[f64],
    inputs: &[f64],
) -> Result<GradientRecord> {
    let program = layer_program(spec);
    grad_reverse_program(&program, spec.n_qubits, spec.variant.is_wrapped(), thetas, inputs)
}

/// Reverse-mode on an explicit program. `wrapped` marks an ancilla at qubit 0
/// whose 0-outcome is post-selected; `n_main` main qubits are measured.
pub fn grad_reverse_program(
    program: &CircuitProgram,
    n_main: usize,
    wrapped: bool,
    thetas: &[f64],
    inputs: &[f64],
) -> Result<GradientRecord> {
    let values = Bindings::new(thetas, inputs);
    let final_state = program.run(&values)?;
    let p = thetas.len();
    let m = inputs.len();

    if !wrapped {
        let mut expectations = Vec::with_capacity(n_main);
        let mut d_params = Vec::with_capacity(n_main);
        let mut d_inputs = Vec::with_capacity(n_main);
        for q in 0..n_main {
            let obs = z_diagonal(program.n_qubits, q);
            let form = quadratic_form_adjoint(program, &values, &final_state, &obs)?;
            expectations.push(form.value);
            d_params.push(form.d_thetas);
            d_inputs.push(form.d_inputs);
        }
        return Ok(GradientRecord {
            expectations,
            d_expectations_d_params: d_params,
            d_expectations_d_inputs: d_inputs,
            success_prob: 1.0,
            d_success_d_params: vec![0.0; p],
            d_success_d_inputs: vec![0.0; m],
        });
    }

    // success probability p = <psi|Pi|psi>
    let projector = ancilla_projector_diagonal(program.n_qubits);
    let success = quadratic_form_adjoint(program, &values, &final_state, &projector)?;
    if success.value < 1e-12 {
        return Err(Error::DegeneratePostselection(success.value));
    }

    // each expectation is u_i / p with u_i = <psi|Z_i Pi|psi>; Z_i acts on
    // main qubit i (absolute index i+1) and commutes with the projector
    let mut expectations = Vec::with_capacity(n_main);
    let mut d_params = Vec::with_capacity(n_main);
    let mut d_inputs = Vec::with_capacity(n_main);
    for q in 0..n_main {
        let obs: Vec<f64> = z_diagonal(program.n_qubits, q + 1)
            .iter()
            .zip(&projector)
            .map(|(z, pi)| z * pi)
            .collect();
        let numerator = quadratic_form_adjoint(program, &values, &final_state, &obs)?;
        let e = numerator.value / success.value;
        let quotient = |du: &[f64], dp: &[f64]| -> Vec<f64> {
            du.iter()
                .zip(dp)
                .map(|(du_k, dp_k)| (du_k * success.value - numerator.value * dp_k)
                    / (success.value * success.value))
                .collect()
        };
        d_params.push(quotient(&numerator.d_thetas, &success.d_thetas));
        d_inputs.push(quotient(&numerator.d_inputs, &success.d_inputs));
        expectations.push(e);
    }
    Ok(GradientRecord {
        expectations,
        d_expectations_d_params: d_params,
        d_expectations_d_inputs: d_inputs,
        success_prob: success.value,
        d_success_d_params: success.d_thetas,
        d_success_d_inputs: success.d_inputs,
    })
}

/// Gradient of a weighted sum of layer outputs, sum_i w_i <Z_i>, in two
/// adjoint sweeps instead of N+1. This is the training-time path: the chain
/// rule hands the layer exactly such a weight vector per sample.
pub struct WeightedGrad {
    pub value: f64,
    pub d_thetas: Vec<f64>,
    pub d_inputs: Vec<f64>,
    pub success_prob: f64,
}

pub fn grad_reverse_weighted(
    program: &CircuitProgram,
    n_main: usize,
    wrapped: bool,
    thetas: &[f64],
    inputs: &[f64],
    weights: &[f64],
) -> Result<WeightedGrad> {
    if weights.len() != n_main {
        return Err(Error::LengthMismatch {
            what: "output weights",
            expected: n_main,
            got: weights.len(),
        });
    }
    let values = Bindings::new(thetas, inputs);
    let final_state = program.run(&values)?;

    if !wrapped {
        let mut obs = vec![0.0; 1 << program.n_qubits];
        for (q, w) in weights.iter().enumerate() {
            for (o, z) in obs.iter_mut().zip(z_diagonal(program.n_qubits, q)) {
                *o += w * z;
            }
        }
        let form = quadratic_form_adjoint(program, &values, &final_state, &obs)?;
        return Ok(WeightedGrad {
            value: form.value,
            d_thetas: form.d_thetas,
            d_inputs: form.d_inputs,
            success_prob: 1.0,
        });
    }

    let projector = ancilla_projector_diagonal(program.n_qubits);
    let success = quadratic_form_adjoint(program, &values, &final_state, &projector)?;
    if success.value < 1e-12 {
        return Err(Error::DegeneratePostselection(success.value));
    }
    let mut obs = vec![0.0; 1 << program.n_qubits];
    for (q, w) in weights.iter().enumerate() {
        for ((o, z), pi) in obs
            .iter_mut()
            .zip(z_diagonal(program.n_qubits, q + 1))
            .zip(&projector)
        {
            *o += w * z * pi;
        }
    }
    let numerator = quadratic_form_adjoint(program, &values, &final_state, &obs)?;
    let value = numerator.value / success.value;
    let quotient = |du: &[f64], dp: &[f64]| -> Vec<f64> {
        du.iter()
            .zip(dp)
            .map(|(du_k, dp_k)| {
                (du_k * success.value - numerator.value * dp_k) / (success.value * success.value)
            })
            .collect()
    };
    Ok(WeightedGrad {
        value,
        d_thetas: quotient(&numerator.d_thetas, &success.d_thetas),
        d_inputs: quotient(&numerator.d_inputs, &success.d_inputs),
        success_prob: success.value,
    })
}

/// Two-point parameter-shift derivative of every output expectation with
/// respect to one trainable parameter: [f(theta + pi/2) - f(theta - pi/2)]/2.
/// Only the unitary baseline qualifies; post-selected outputs are not
/// single-frequency in theta.
pub fn grad_unitary_parameter_shift(
    spec: &QuantumLayerSpec,
    thetas: &[f64],
    inputs: &[f64],
    param_index: usize,
) -> Result<Vec<f64>> {
    if spec.variant.is_wrapped() {
        return Err(Error::UnsupportedVariant(spec.variant.name()));
    }
    if param_index >= thetas.len() {
        return Err(Error::UnresolvedSlot { slot: param_index, available: thetas.len() });
    }
    let shift = std::f64::consts::FRAC_PI_2;
    let mut plus = thetas.to_vec();
    plus[param_index] += shift;
    let mut minus = thetas.to_vec();
    minus[param_index] -= shift;
    let f_plus = crate::circuits::forward_unitary(spec, &plus, inputs)?;
    let f_minus = crate::circuits::forward_unitary(spec, &minus, inputs)?;
    Ok(f_plus
        .iter()
        .zip(&f_minus)
        .map(|(p, m)| (p - m) / 2.0)
        .collect())
}

/// Central finite differences over every parameter and input slot. The step
/// must lie in [1e-7, 1e-3].
pub fn grad_finite_difference(
    spec: &QuantumLayerSpec,
    thetas: &[f64],
    inputs: &[f64],
    step: f64,
) -> Result<GradientRecord> {
    if !(1e-7..=1e-3).contains(&step) {
        return Err(Error::StepOutOfRange(step));
    }
    let n = spec.n_qubits;
    let (expectations, success_prob) = crate::circuits::forward_nonunitary(spec, thetas, inputs)?;

    let eval = |thetas: &[f64], inputs: &[f64]| -> Result<(Vec<f64>, f64)> {
        crate::circuits::forward_nonunitary(spec, thetas, inputs)
    };

    let mut d_params = vec![vec![0.0; thetas.len()]; n];
    let mut d_success_params = vec![0.0; thetas.len()];
    for k in 0..thetas.len() {
        let mut plus = thetas.to_vec();
        plus[k] += step;
        let mut minus = thetas.to_vec();
        minus[k] -= step;
        let (ep, sp) = eval(&plus, inputs)?;
        let (em, sm) = eval(&minus, inputs)?;
        for i in 0..n {
            d_params[i][k] = (ep[i] - em[i]) / (2.0 * step);
        }
        d_success_params[k] = (sp - sm) / (2.0 * step);
    }

    let mut d_inputs = vec![vec![0.0; inputs.len()]; n];
    let mut d_success_inputs = vec![0.0; inputs.len()];
    for k in 0..inputs.len() {
        let mut plus = inputs.to_vec();
        plus[k] += step;
        let mut minus = inputs.to_vec();
        minus[k] -= step;
        let (ep, sp) = eval(thetas, &plus)?;
        let (em, sm) = eval(thetas, &minus)?;
        for i in 0..n {
            d_inputs[i][k] = (ep[i] - em[i]) / (2.0 * step);
        }
        d_success_inputs[k] = (sp - sm) / (2.0 * step);
    }

    Ok(GradientRecord {
        expectations,
        d_expectations_d_params: d_params,
        d_expectations_d_inputs: d_inputs,
        success_prob,
        d_success_d_params: d_success_params,
        d_success_d_inputs: d_success_inputs,
    })
}

/// Final state and its exact derivative vectors |d psi / d theta_k> for every
/// trainable parameter, by forward accumulation. Input slots are treated as
/// constants. Shared slots accumulate by the product rule.
pub fn state_derivatives(
    program: &CircuitProgram,
    thetas: &[f64],
    inputs: &[f64],
) -> Result<(StateVector, Vec<StateVector>)> {
    let values = Bindings::new(thetas, inputs);
    let dim = 1usize << program.n_qubits;
    let zero = || StateVector::from_amplitudes(program.n_qubits, vec![Complex64::new(0.0, 0.0); dim]);
    let mut phi = StateVector::new_zero_state(program.n_qubits)?;
    let mut derivs: Vec<StateVector> = (0..thetas.len())
        .map(|_| zero())
        .collect::<Result<_>>()?;

    for gate in &program.gates {
        let tangent = if let Some(ParamRef::Theta(k)) = gate.slot {
            let mut t = phi.clone();
            t.apply_gate_deriv(gate, &values)?;
            Some((k, t))
        } else {
            None
        };
        for d in &mut derivs {
            d.apply_gate(gate, &values)?;
        }
        if let Some((k, t)) = tangent {
            for (a, b) in derivs[k].amplitudes_mut().iter_mut().zip(t.amplitudes()) {
                *a += b;
            }
        }
        phi.apply_gate(gate, &values)?;
    }
    Ok((phi, derivs))
}
