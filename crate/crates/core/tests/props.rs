//! Randomized invariants over the gate set and sampling paths.

use proptest::prelude::*;
use qms_core::gates::{run_circuit, Circuit, Gate, NoiseMode};
use qms_core::{RngSeed, StateVector};

/// Instruction picked from raw draws; requires `n >= 3` so that three
/// distinct qubits always exist for the Toffoli arm.
fn make_gate(kind: u8, a: usize, b: usize, c: usize, angle: f64, n: usize) -> Gate {
    assert!(n >= 3);
    let q0 = a % n;
    let mut q1 = b % n;
    if q1 == q0 {
        q1 = (q1 + 1) % n;
    }
    let mut q2 = c % n;
    while q2 == q0 || q2 == q1 {
        q2 = (q2 + 1) % n;
    }
    match kind % 7 {
        0 => Gate::H { qubit: q0 },
        1 => Gate::X { qubit: q0 },
        2 => Gate::Ry {
            qubit: q0,
            theta: angle,
        },
        3 => Gate::XRot {
            qubit: q0,
            beta: angle,
        },
        4 => Gate::Zz {
            qubits: (q0, q1),
            gamma: angle,
        },
        5 => Gate::Cnot {
            control: q0,
            target: q1,
        },
        _ => Gate::Toffoli {
            controls: [q0, q1],
            target: q2,
        },
    }
}

proptest! {
    #[test]
    fn circuits_preserve_the_norm(
        n in 3usize..6,
        raw in prop::collection::vec((any::<u8>(), any::<usize>(), any::<usize>(), any::<usize>(), -3.2..3.2f64), 1..24),
    ) {
        let mut circuit = Circuit::new(n).unwrap();
        for (kind, a, b, c, angle) in raw {
            circuit.push(make_gate(kind, a, b, c, angle, n)).unwrap();
        }
        let out = run_circuit(&circuit, StateVector::new_zero(n).unwrap(), NoiseMode::Ideal).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exact_probabilities_sum_to_one(
        n in 3usize..5,
        raw in prop::collection::vec((any::<u8>(), any::<usize>(), any::<usize>(), any::<usize>(), -3.2..3.2f64), 1..16),
    ) {
        let mut circuit = Circuit::new(n).unwrap();
        for (kind, a, b, c, angle) in raw {
            circuit.push(make_gate(kind, a, b, c, angle, n)).unwrap();
        }
        let out = run_circuit(&circuit, StateVector::new_zero(n).unwrap(), NoiseMode::Ideal).unwrap();
        let dist = out.probabilities(0.0).unwrap();
        prop_assert!((dist.total() - 1.0).abs() < 1e-9);
        for (_, p) in dist.iter() {
            prop_assert!(p > 0.0 && p <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn ry_amplitudes_follow_the_half_angle_convention(theta in 0.0..std::f64::consts::PI) {
        let mut circuit = Circuit::new(1).unwrap();
        circuit.push(Gate::Ry { qubit: 0, theta }).unwrap();
        let out = run_circuit(&circuit, StateVector::new_zero(1).unwrap(), NoiseMode::Ideal).unwrap();
        // real and non-negative on [0, pi] — directly the target-state coefficients
        prop_assert!(out.amplitude(0).im == 0.0 && out.amplitude(1).im == 0.0);
        prop_assert!((out.amplitude(0).re - (theta / 2.0).cos()).abs() < 1e-15);
        prop_assert!((out.amplitude(1).re - (theta / 2.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn sample_counts_sum_to_shots_and_reproduce(seed in any::<u64>(), shots in 1u64..4000) {
        let mut circuit = Circuit::new(3).unwrap();
        circuit.push(Gate::H { qubit: 0 }).unwrap();
        circuit.push(Gate::Cnot { control: 0, target: 2 }).unwrap();
        circuit.push(Gate::Ry { qubit: 1, theta: 0.7 }).unwrap();
        let out = run_circuit(&circuit, StateVector::new_zero(3).unwrap(), NoiseMode::Ideal).unwrap();
        let counts = out.sample(shots, RngSeed(seed)).unwrap();
        prop_assert_eq!(counts.values().sum::<u64>(), shots);
        let again = out.sample(shots, RngSeed(seed)).unwrap();
        prop_assert_eq!(counts, again);
    }

    #[test]
    fn trajectory_with_zero_probability_flips_equals_ideal(
        seed in any::<u64>(),
        theta in -3.0..3.0f64,
    ) {
        let mut circuit = Circuit::new(2).unwrap();
        circuit.push(Gate::Ry { qubit: 0, theta }).unwrap();
        circuit.push(Gate::FlipSite { qubit: 1, prob: 0.0 }).unwrap();
        circuit.push(Gate::Cnot { control: 0, target: 1 }).unwrap();
        circuit.push(Gate::FlipSite { qubit: 0, prob: 0.0 }).unwrap();
        let ideal = run_circuit(&circuit, StateVector::new_zero(2).unwrap(), NoiseMode::Ideal).unwrap();
        let traj = run_circuit(
            &circuit,
            StateVector::new_zero(2).unwrap(),
            NoiseMode::Trajectory(RngSeed(seed)),
        )
        .unwrap();
        prop_assert_eq!(ideal.amplitudes(), traj.amplitudes());
    }
}
