//! Runtime verification suites for the `verify` CLI command.
//!
//! Each suite replays one of the oracle/property checks the test suite also
//! runs: fast path vs dense matrices, the post-selection law, the general
//! LCU construction, structural count formulas, gradient route agreement,
//! the QFI oracles, and the two-route Welch statistics. All randomness is
//! seeded, so `verify` is deterministic.

use crate::circuits::{
    build_angle_embedding, build_lcu_wrapped, build_variational_ansatz, iqp_param_count,
    layer_program, lcu_wrapped_gate_tally, main_program, run_postselected, standard_gate_count,
    LayerVariant, QuantumLayerSpec,
};
use crate::error::Result;
use crate::grad::{grad_finite_difference, grad_reverse, grad_unitary_parameter_shift};
use crate::harness::stats::{std_bessel, student_t_two_tailed_p, variance_reduction, welch_t_test};
use crate::lcu::{lcu_apply_general, LcuDecomposition};
use crate::oracle::dense::{apply_matrix, program_unitary, run_dense};
use crate::oracle::fidelity::{layer_state_fn, qfi_fidelity_estimate};
use crate::oracle::stats::{student_t_two_tailed_p_cf, welch_reference};
use crate::statevec::Bindings;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one verification suite.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl SuiteResult {
    fn from(name: &'static str, outcome: Result<String>) -> Self {
        match outcome {
            Ok(detail) => SuiteResult { name, passed: true, detail },
            Err(e) => SuiteResult { name, passed: false, detail: e.to_string() },
        }
    }
}

fn check(condition: bool, message: String) -> Result<()> {
    if condition {
        Ok(())
    } else {
        Err(crate::error::Error::Numerical(message))
    }
}

/// Run every oracle/property suite and collect one result per suite.
pub fn run_all() -> Vec<SuiteResult> {
    vec![
        SuiteResult::from("dense_program_oracle", dense_program_oracle()),
        SuiteResult::from("lcu_postselection_law", lcu_postselection_law()),
        SuiteResult::from("general_lcu_construction", general_lcu_construction()),
        SuiteResult::from("structural_counts", structural_counts()),
        SuiteResult::from("gradient_routes", gradient_routes()),
        SuiteResult::from("qfi_oracles", qfi_oracles()),
        SuiteResult::from("welch_statistics", welch_statistics()),
    ]
}

fn random_angles(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect()
}

fn random_features(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.gen_range(-1.5..1.5)).collect()
}

/// Fast stride-based evaluation equals the dense matrix product on every
/// variant's program.
fn dense_program_oracle() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for variant in [
        LayerVariant::NoLcu,
        LayerVariant::Lcu,
        LayerVariant::IqpLayer,
        LayerVariant::IqpEmbedding,
    ] {
        for n in 2..=3 {
            let spec = QuantumLayerSpec::new(variant, n).with_blocks(2);
            let program = layer_program(&spec);
            let thetas = random_angles(&mut rng, spec.n_params());
            let inputs = random_features(&mut rng, spec.n_inputs());
            let values = Bindings::new(&thetas, &inputs);
            let fast = program.run(&values)?;
            let dense = run_dense(&program, &values)?;
            for (a, b) in fast.amplitudes().iter().zip(dense.amplitudes()) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    check(worst < 1e-9, format!("max amplitude deviation {worst:.3e}"))?;
    Ok(format!("max amplitude deviation {worst:.3e}"))
}

/// Post-selected wrapper state equals normalize((I + W)|psi_main>) and the
/// accepted mass equals ||(I + W)|psi>||^2 / 4.
fn lcu_postselection_law() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut worst_fidelity_gap: f64 = 0.0;
    let mut worst_mass_gap: f64 = 0.0;
    for n in 1..=3 {
        for _ in 0..20 {
            let embedding = build_angle_embedding(n);
            let ansatz = build_variational_ansatz(n, 2);
            let main = embedding.compose(&ansatz)?;
            let wrapped = build_lcu_wrapped(&main);
            let thetas = random_angles(&mut rng, main.n_params);
            let inputs = random_features(&mut rng, main.n_inputs);
            let values = Bindings::new(&thetas, &inputs);

            let (post, mass) = run_postselected(&wrapped, &values)?;

            let psi_main = run_dense(&embedding, &Bindings::new(&[], &inputs))?;
            let w = program_unitary(&ansatz, &Bindings::new(&thetas, &[]))?;
            let identity = crate::linalg::CMatrix::identity(w.dim);
            let mut reference = apply_matrix(&identity.add(&w), &psi_main)?;
            let mass_reference = reference.norm_sqr() / 4.0;
            reference.normalize();

            worst_fidelity_gap = worst_fidelity_gap.max(1.0 - post.fidelity(&reference));
            worst_mass_gap = worst_mass_gap.max((mass - mass_reference).abs());
        }
    }
    check(
        worst_fidelity_gap < 1e-9 && worst_mass_gap < 1e-12,
        format!("fidelity gap {worst_fidelity_gap:.3e}, mass gap {worst_mass_gap:.3e}"),
    )?;
    Ok(format!(
        "fidelity gap {worst_fidelity_gap:.3e}, mass gap {worst_mass_gap:.3e}"
    ))
}

/// Random unitary from a random two-block circuit (exactly unitary by
/// construction).
fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> Result<crate::linalg::CMatrix> {
    let mut program = build_variational_ansatz(n, 2);
    // sprinkle extra phases so the family covers more of U(2^n)
    program.gates.push(crate::statevec::Gate::h(0));
    if n > 1 {
        program.gates.push(crate::statevec::Gate::cz_phase(
            0,
            1,
            crate::statevec::ParamRef::Theta(program.n_params),
        ));
        program.n_params += 1;
    }
    let thetas = random_angles(rng, program.n_params);
    program_unitary(&program, &Bindings::new(&thetas, &[]))
}

/// prepare/select/unprepare output equals normalize(sum alpha_k U_k |psi>)
/// and the two-term unit-coefficient case reproduces the simplified wrapper.
fn general_lcu_construction() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let mut worst: f64 = 0.0;
    for n in 1..=2 {
        for &k_terms in &[1usize, 2, 4] {
            let coefficients: Vec<f64> =
                (0..k_terms).map(|_| rng.gen_range(0.2..2.0)).collect();
            let unitaries: Vec<crate::linalg::CMatrix> = (0..k_terms)
                .map(|_| random_unitary(&mut rng, n))
                .collect::<Result<_>>()?;
            let embedding = build_angle_embedding(n);
            let inputs = random_features(&mut rng, n);
            let input_state = run_dense(&embedding, &Bindings::new(&[], &inputs))?;

            let decomp = LcuDecomposition::new(coefficients.clone(), unitaries.clone());
            let (out, _mass) = lcu_apply_general(&decomp, &input_state)?;

            let dim = 1 << n;
            let mut target = crate::linalg::CMatrix::zeros(dim);
            for (alpha, u) in coefficients.iter().zip(&unitaries) {
                target = target.add(&u.scale(num_complex::Complex64::new(*alpha, 0.0)));
            }
            let mut reference = apply_matrix(&target, &input_state)?;
            reference.normalize();
            worst = worst.max(1.0 - out.fidelity(&reference));
        }
    }

    // two unit terms [I, W] against the single-ancilla wrapper
    let n = 2;
    let embedding = build_angle_embedding(n);
    let ansatz = build_variational_ansatz(n, 2);
    let main = embedding.compose(&ansatz)?;
    let wrapped = build_lcu_wrapped(&main);
    let thetas = random_angles(&mut rng, main.n_params);
    let inputs = random_features(&mut rng, main.n_inputs);
    let (simplified, simplified_mass) =
        run_postselected(&wrapped, &Bindings::new(&thetas, &inputs))?;
    let w = program_unitary(&ansatz, &Bindings::new(&thetas, &[]))?;
    let decomp = LcuDecomposition::new(
        vec![1.0, 1.0],
        vec![crate::linalg::CMatrix::identity(w.dim), w],
    );
    let input_state = run_dense(&embedding, &Bindings::new(&[], &inputs))?;
    let (general, general_mass) = lcu_apply_general(&decomp, &input_state)?;
    let path_gap = (1.0 - general.fidelity(&simplified)).abs();
    let mass_gap = (general_mass - simplified_mass).abs();
    worst = worst.max(path_gap).max(mass_gap);

    check(worst < 1e-9, format!("worst deviation {worst:.3e}"))?;
    Ok(format!("worst deviation {worst:.3e}"))
}

/// Parameter and gate count formulas for every N in 2..=12.
fn structural_counts() -> Result<String> {
    for n in 2..=12 {
        let ansatz = QuantumLayerSpec::new(LayerVariant::NoLcu, n);
        check(ansatz.n_params() == 4 * n, format!("ansatz params at N={n}"))?;
        check(
            main_program(&ansatz).gate_count() == 9 * n - 4
                && standard_gate_count(n, 4) == 9 * n - 4,
            format!("9N-4 gate count at N={n}"),
        )?;
        check(
            lcu_wrapped_gate_tally(n) == 11 * n - 3,
            format!("11N-3 tally at N={n} (quoted rounded as about 11N-2)"),
        )?;
        let expected_iqp = if n > 2 { 2 * n } else { 2 * n - 1 };
        check(iqp_param_count(n) == expected_iqp, format!("IQP params at N={n}"))?;
        let embedding = QuantumLayerSpec::new(LayerVariant::IqpEmbedding, n);
        check(
            embedding.n_inputs() == 2 * n - 1,
            format!("IQP embedding inputs at N={n}"),
        )?;
    }
    Ok("counts 4N, 9N-4, 11N-3, 2N/2N-1, 2N-1 hold for N in 2..=12".into())
}

/// Reverse mode vs finite differences on all variants, and vs the shift rule
/// on the unitary baseline.
fn gradient_routes() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let mut worst_fd: f64 = 0.0;
    let mut worst_shift: f64 = 0.0;
    for variant in [
        LayerVariant::NoLcu,
        LayerVariant::Lcu,
        LayerVariant::IqpLayer,
        LayerVariant::IqpEmbedding,
    ] {
        let spec = QuantumLayerSpec::new(variant, 3);
        for _ in 0..3 {
            let thetas = random_angles(&mut rng, spec.n_params());
            let inputs = random_features(&mut rng, spec.n_inputs());
            let rev = grad_reverse(&spec, &thetas, &inputs)?;
            let fd = grad_finite_difference(&spec, &thetas, &inputs, 1e-5)?;
            for i in 0..spec.n_qubits {
                for k in 0..thetas.len() {
                    worst_fd = worst_fd.max(
                        (rev.d_expectations_d_params[i][k] - fd.d_expectations_d_params[i][k])
                            .abs(),
                    );
                }
                for k in 0..inputs.len() {
                    worst_fd = worst_fd.max(
                        (rev.d_expectations_d_inputs[i][k] - fd.d_expectations_d_inputs[i][k])
                            .abs(),
                    );
                }
            }
            if variant == LayerVariant::NoLcu {
                for k in 0..thetas.len() {
                    let shift = grad_unitary_parameter_shift(&spec, &thetas, &inputs, k)?;
                    for i in 0..spec.n_qubits {
                        worst_shift = worst_shift
                            .max((rev.d_expectations_d_params[i][k] - shift[i]).abs());
                    }
                }
            }
        }
    }
    check(
        worst_fd < 1e-5 && worst_shift < 1e-9,
        format!("fd gap {worst_fd:.3e}, shift gap {worst_shift:.3e}"),
    )?;
    Ok(format!("fd gap {worst_fd:.3e}, shift gap {worst_shift:.3e}"))
}

/// Analytic single-parameter value, fidelity oracle agreement, symmetry, and
/// positive semidefiniteness.
fn qfi_oracles() -> Result<String> {
    // RY(theta)|0> carries exactly one unit of information
    let single = crate::circuits::CircuitProgram {
        n_qubits: 1,
        gates: vec![crate::statevec::Gate::ry(0, crate::statevec::ParamRef::Theta(0))],
        n_params: 1,
        n_inputs: 0,
        n_encoding_gates: 0,
    };
    for theta in [0.3, 1.2, 2.8] {
        let qfi = crate::fisher::qfi_matrix_program(&single, &[theta], &[])?;
        check((qfi.matrix[0][0] - 1.0).abs() < 1e-10, format!("RY case at {theta}"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    for variant in [LayerVariant::NoLcu, LayerVariant::Lcu] {
        for n in 2..=3 {
            let spec = QuantumLayerSpec::new(variant, n).with_blocks(1);
            let thetas = random_angles(&mut rng, spec.n_params());
            let inputs = random_features(&mut rng, spec.n_inputs());
            let exact = crate::fisher::qfi_matrix(&spec, &thetas, &inputs)?;
            check(exact.max_asymmetry() < 1e-9, "QFI symmetry".into())?;
            check(exact.min_eigenvalue() > -1e-8, "QFI positive semidefinite".into())?;
            let estimate =
                qfi_fidelity_estimate(&layer_state_fn(&spec, &inputs), &thetas, 1e-3)?;
            for i in 0..thetas.len() {
                for j in 0..thetas.len() {
                    let scale = exact.matrix[i][j].abs().max(1.0);
                    worst = worst.max((estimate[i][j] - exact.matrix[i][j]).abs() / scale);
                }
            }
        }
    }
    check(worst < 1e-4, format!("fidelity oracle relative gap {worst:.3e}"))?;
    Ok(format!("fidelity oracle relative gap {worst:.3e}"))
}

/// Quadrature and continued-fraction p-values agree to 1e-9 relative on 100
/// random group pairs; the Bessel and variance-reduction hand values hold.
fn welch_statistics() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let na = rng.gen_range(2..30);
        let nb = rng.gen_range(2..30);
        let mu_a: f64 = rng.gen_range(-5.0..5.0);
        let mu_b: f64 = rng.gen_range(-5.0..5.0);
        let sd_a: f64 = rng.gen_range(0.1..3.0);
        let sd_b: f64 = rng.gen_range(0.1..3.0);
        let gauss = |rng: &mut ChaCha8Rng| {
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        let a: Vec<f64> = (0..na).map(|_| mu_a + sd_a * gauss(&mut rng)).collect();
        let b: Vec<f64> = (0..nb).map(|_| mu_b + sd_b * gauss(&mut rng)).collect();
        let ours = welch_t_test(&a, &b)?;
        let reference = welch_reference(&a, &b)?;
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1e-300);
        worst = worst
            .max(rel(ours.t, reference.t))
            .max(rel(ours.df, reference.df))
            .max(rel(ours.p, reference.p));
    }
    // direct two-route grid on the t CDF as well
    for &t in &[0.2, 1.0, 2.5, 8.0, 30.0] {
        for &df in &[1.5, 4.0, 12.0, 40.0] {
            let rel = (student_t_two_tailed_p(t, df) - student_t_two_tailed_p_cf(t, df)).abs()
                / student_t_two_tailed_p_cf(t, df);
            worst = worst.max(rel);
        }
    }
    check(worst < 1e-9, format!("worst relative gap {worst:.3e}"))?;

    check(std_bessel(&[1.0, 1.0])? == 0.0, "Bessel of equal pair".into())?;
    check(
        (std_bessel(&[0.0, 2.0])? - 2f64.sqrt()).abs() < 1e-15,
        "Bessel of {0,2}".into(),
    )?;
    let reduction = variance_reduction(0.43, 0.63).unwrap();
    check(
        (reduction - (1.0 - 0.43 / 0.63)).abs() < 1e-15 && (reduction - 0.317).abs() < 1e-3,
        format!("variance reduction worked example: {reduction}"),
    )?;
    Ok(format!("worst relative gap {worst:.3e}; variance reduction {reduction:.4}"))
}
