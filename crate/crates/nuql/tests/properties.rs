//! Property suites: the module-level invariants, mostly as proptest
//! strategies over random states, programs, and sample groups.

use nuql::circuits::{
    build_iqp_block, forward_nonunitary, forward_unitary, layer_program, main_program,
    CircuitProgram, LayerVariant, QuantumLayerSpec,
};
use nuql::grad::{grad_finite_difference, grad_reverse};
use nuql::harness::stats::welch_t_test;
use nuql::oracle::dense::{program_unitary, run_dense};
use nuql::statevec::{Bindings, Gate, GateKind, ParamRef, StateVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn arb_gate(n_qubits: usize) -> impl Strategy<Value = (Gate, f64)> {
    let q = 0..n_qubits;
    let q2 = (0..n_qubits, 0..n_qubits).prop_filter("distinct", |(a, b)| a != b);
    let angle = -6.3f64..6.3;
    prop_oneof![
        q.clone().prop_map(|t| (Gate::h(t), 0.0)),
        (q.clone(), angle.clone()).prop_map(|(t, a)| (Gate::rx(t, ParamRef::Theta(0)), a)),
        (q.clone(), angle.clone()).prop_map(|(t, a)| (Gate::ry(t, ParamRef::Theta(0)), a)),
        (q, angle.clone()).prop_map(|(t, a)| (Gate::rz(t, ParamRef::Theta(0)), a)),
        q2.clone().prop_map(|(c, t)| (Gate::cnot(c, t), 0.0)),
        (q2, angle).prop_map(|((a, b), theta)| (Gate::cz_phase(a, b, ParamRef::Theta(0)), theta)),
    ]
}

fn arb_state(n_qubits: usize) -> impl Strategy<Value = StateVector> {
    let dim = 1usize << n_qubits;
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_map(move |parts| {
        let mut amps: Vec<Complex64> =
            parts.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        if amps.iter().all(|a| a.norm_sqr() < 1e-12) {
            amps[0] = Complex64::new(1.0, 0.0);
        }
        let mut state = StateVector::from_amplitudes(n_qubits, amps).unwrap();
        state.normalize();
        state
    })
}

proptest! {
    #[test]
    fn norm_preserved_by_any_gate_sequence(
        state in arb_state(3),
        gates in proptest::collection::vec(arb_gate(3), 1..20),
    ) {
        let mut state = state;
        for (gate, angle) in &gates {
            let thetas = [*angle];
            state.apply_gate(gate, &Bindings::new(&thetas, &[])).unwrap();
            prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn postselect_mass_is_subspace_probability(
        state in arb_state(3),
        qubit in 0usize..3,
        outcome in 0usize..2,
    ) {
        let direct: f64 = state
            .probabilities()
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> (2 - qubit)) & 1 == outcome)
            .map(|(_, p)| p)
            .sum();
        match state.postselect(qubit, outcome) {
            Ok((post, mass)) => {
                prop_assert!((mass - direct).abs() < 1e-12);
                prop_assert!((post.norm_sqr() - 1.0).abs() < 1e-10);
            }
            Err(nuql::Error::DegeneratePostselection(_)) => {
                prop_assert!(direct < 1e-12);
            }
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e}"))),
        }
    }

    #[test]
    fn involutions_return_to_start(state in arb_state(3), qubit in 0usize..3) {
        let mut moved = state.clone();
        let h = Gate::h(qubit);
        moved.apply_gate(&h, &Bindings::new(&[], &[])).unwrap();
        moved.apply_gate(&h, &Bindings::new(&[], &[])).unwrap();
        prop_assert!((moved.fidelity(&state) - 1.0).abs() < 1e-10);
        let cnot = Gate::cnot(qubit, (qubit + 1) % 3);
        moved.apply_gate(&cnot, &Bindings::new(&[], &[])).unwrap();
        moved.apply_gate(&cnot, &Bindings::new(&[], &[])).unwrap();
        prop_assert!((moved.fidelity(&state) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn program_json_round_trips(
        n in 2usize..5,
        blocks in 0usize..4,
        variant_idx in 0usize..4,
    ) {
        let variant = [
            LayerVariant::NoLcu,
            LayerVariant::Lcu,
            LayerVariant::IqpLayer,
            LayerVariant::IqpEmbedding,
        ][variant_idx];
        let program = layer_program(&QuantumLayerSpec::new(variant, n).with_blocks(blocks));
        let text = program.to_json().unwrap();
        let back = CircuitProgram::from_json(&text).unwrap();
        prop_assert_eq!(program, back);
    }

    #[test]
    fn welch_is_antisymmetric(
        a in proptest::collection::vec(-10.0f64..10.0, 2..12),
        b in proptest::collection::vec(-10.0f64..10.0, 2..12),
    ) {
        let ab = welch_t_test(&a, &b).unwrap();
        let ba = welch_t_test(&b, &a).unwrap();
        prop_assert!((ab.t + ba.t).abs() < 1e-12);
        prop_assert!((ab.df - ba.df).abs() < 1e-12);
        prop_assert!((ab.p - ba.p).abs() < 1e-12);
    }

    #[test]
    fn dense_oracle_matches_fast_path_on_random_layers(
        n in 2usize..5,
        variant_idx in 0usize..4,
        seed in 0u64..1000,
    ) {
        use rand::{Rng, SeedableRng};
        let variant = [
            LayerVariant::NoLcu,
            LayerVariant::Lcu,
            LayerVariant::IqpLayer,
            LayerVariant::IqpEmbedding,
        ][variant_idx];
        let spec = QuantumLayerSpec::new(variant, n).with_blocks(2);
        let program = layer_program(&spec);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let thetas: Vec<f64> =
            (0..spec.n_params()).map(|_| rng.gen_range(0.0..6.28)).collect();
        let inputs: Vec<f64> =
            (0..spec.n_inputs()).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let values = Bindings::new(&thetas, &inputs);
        let fast = program.run(&values).unwrap();
        let dense = run_dense(&program, &values).unwrap();
        let mut worst = 0.0f64;
        for (x, y) in fast.amplitudes().iter().zip(dense.amplitudes()) {
            worst = worst.max((x - y).norm());
        }
        prop_assert!(worst < 1e-9, "max deviation {}", worst);
    }
}

/// Stripping the Hadamard sandwich off an IQP block leaves a circuit whose
/// dense matrix is diagonal.
#[test]
fn iqp_core_is_diagonal() {
    for n in 1..=4usize {
        let block = build_iqp_block(n, 0);
        let core_gates: Vec<Gate> = block
            .gates
            .iter()
            .filter(|g| g.kind != GateKind::H)
            .cloned()
            .collect();
        assert_eq!(core_gates.len(), block.gate_count() - 2 * n);
        let core = CircuitProgram {
            n_qubits: n,
            gates: core_gates,
            n_params: block.n_params,
            n_inputs: 0,
            n_encoding_gates: 0,
        };
        let thetas: Vec<f64> = (0..core.n_params).map(|i| 0.4 + 0.3 * i as f64).collect();
        let u = program_unitary(&core, &Bindings::new(&thetas, &[])).unwrap();
        for i in 0..u.dim {
            for j in 0..u.dim {
                if i != j {
                    assert!(
                        u[(i, j)].norm() < 1e-12,
                        "off-diagonal ({i},{j}) = {}",
                        u[(i, j)]
                    );
                }
            }
        }
    }
}

/// With W = I the post-selected pass agrees with the unitary pass
/// elementwise, for both the blocked ansatz and the IQP family.
#[test]
fn wrapped_and_unitary_agree_at_identity_w() {
    // zero blocks: W literally empty
    let spec = QuantumLayerSpec::new(LayerVariant::Lcu, 3).with_blocks(0);
    let inputs = [0.7, -0.4, 1.2];
    let (wrapped, mass) = forward_nonunitary(&spec, &[], &inputs).unwrap();
    let unitary = forward_unitary(&spec, &[], &inputs).unwrap();
    assert!((mass - 1.0).abs() < 1e-12);
    for (a, b) in wrapped.iter().zip(&unitary) {
        assert!((a - b).abs() < 1e-12);
    }
    // IQP block at zero angles: diagonal core is the identity
    let spec = QuantumLayerSpec::new(LayerVariant::IqpLayer, 3);
    let thetas = vec![0.0; spec.n_params()];
    let (wrapped, mass) = forward_nonunitary(&spec, &thetas, &inputs).unwrap();
    let unitary = forward_unitary(&spec, &thetas, &inputs).unwrap();
    assert!((mass - 1.0).abs() < 1e-12);
    for (a, b) in wrapped.iter().zip(&unitary) {
        assert!((a - b).abs() < 1e-12);
    }
}

/// Reverse-mode gradients stay within 1e-5 of central finite differences up
/// to N = 6 (the acceptance suite covers N <= 4 at higher draw counts).
#[test]
fn gradient_consistency_extends_to_six_qubits() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(606);
    for n in [5usize, 6] {
        for variant in [LayerVariant::NoLcu, LayerVariant::Lcu] {
            let spec = QuantumLayerSpec::new(variant, n);
            let thetas: Vec<f64> =
                (0..spec.n_params()).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
            let inputs: Vec<f64> =
                (0..spec.n_inputs()).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let rev = grad_reverse(&spec, &thetas, &inputs).unwrap();
            let fd = grad_finite_difference(&spec, &thetas, &inputs, 1e-5).unwrap();
            for i in 0..n {
                for k in 0..thetas.len() {
                    let gap = (rev.d_expectations_d_params[i][k]
                        - fd.d_expectations_d_params[i][k])
                        .abs();
                    assert!(gap < 1e-5, "{variant:?} N={n} param ({i},{k}): {gap:.3e}");
                }
            }
        }
    }
}

/// The embedding slots of every layer program sit inside the encoding
/// prefix, and wrapped programs keep exactly the prefix uncontrolled.
#[test]
fn encoding_prefix_structure() {
    for variant in [
        LayerVariant::NoLcu,
        LayerVariant::Lcu,
        LayerVariant::IqpLayer,
        LayerVariant::IqpEmbedding,
    ] {
        for n in 2..=4 {
            let spec = QuantumLayerSpec::new(variant, n);
            let main = main_program(&spec);
            for (i, gate) in main.gates.iter().enumerate() {
                if let Some(ParamRef::Input(_)) = gate.slot {
                    assert!(i < main.n_encoding_gates, "{variant:?} input slot outside prefix");
                }
            }
            if variant.is_wrapped() {
                let wrapped = layer_program(&spec);
                for (i, gate) in wrapped.gates.iter().enumerate() {
                    let inside_prefix = i < wrapped.n_encoding_gates;
                    let is_closing_h = i == wrapped.gate_count() - 1;
                    if inside_prefix || is_closing_h {
                        assert_eq!(gate.control, None);
                    } else {
                        assert_eq!(gate.control, Some(0));
                    }
                }
            }
        }
    }
}
