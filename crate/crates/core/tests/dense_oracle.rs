//! Brute-force oracle for the amplitude kernels.
//!
//! Every operator here is rebuilt as an explicit `2^n x 2^n` matrix
//! straight from its textbook definition — no code shared with the
//! library kernels — and applied by dense matrix-vector multiplication.
//! The fast per-gate kernels must agree elementwise to 1e-12.

// The matrices are written with explicit row/column index loops on purpose:
// the oracle's value is that each entry formula reads exactly like the
// definition it checks.
#![allow(clippy::needless_range_loop)]

use qms_core::gates::{circuit_unitary_check, gate_matrix, run_circuit, Circuit, Gate, NoiseMode};
use qms_core::statevector::Mat2;
use qms_core::{Complex64, StateVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Matrix = Vec<Vec<Complex64>>;

/// Bit position of qubit `q` in a basis index (qubit 0 is the MSB).
fn mask(q: usize, n: usize) -> usize {
    1 << (n - 1 - q)
}

fn zeros(dim: usize) -> Matrix {
    vec![vec![Complex64::ZERO; dim]; dim]
}

/// Full-register matrix of one instruction, entry by entry.
fn full_matrix(gate: &Gate, n: usize) -> Matrix {
    let dim = 1usize << n;
    let mut m = zeros(dim);
    let embed_1q = |m: &mut Matrix, q: usize, u: [[Complex64; 2]; 2]| {
        for col in 0..dim {
            let in_bit = usize::from(col & mask(q, n) != 0);
            for out_bit in 0..2 {
                let row = (col & !mask(q, n)) | (out_bit * mask(q, n));
                m[row][col] += u[out_bit][in_bit];
            }
        }
    };
    let c = |x: f64| Complex64::new(x, 0.0);
    match *gate {
        Gate::H { qubit } => {
            let r = c(std::f64::consts::FRAC_1_SQRT_2);
            embed_1q(&mut m, qubit, [[r, r], [r, -r]]);
        }
        Gate::X { qubit } => {
            embed_1q(&mut m, qubit, [[c(0.0), c(1.0)], [c(1.0), c(0.0)]]);
        }
        Gate::Ry { qubit, theta } => {
            let (s, co) = (theta / 2.0).sin_cos();
            embed_1q(&mut m, qubit, [[c(co), c(-s)], [c(s), c(co)]]);
        }
        Gate::XRot { qubit, beta } => {
            let (s, co) = beta.sin_cos();
            let is = Complex64::new(0.0, s);
            embed_1q(&mut m, qubit, [[c(co), is], [is, c(co)]]);
        }
        Gate::Cnot { control, target } => {
            for col in 0..dim {
                let row = if col & mask(control, n) != 0 {
                    col ^ mask(target, n)
                } else {
                    col
                };
                m[row][col] = c(1.0);
            }
        }
        Gate::Toffoli { controls, target } => {
            let both = mask(controls[0], n) | mask(controls[1], n);
            for col in 0..dim {
                let row = if col & both == both {
                    col ^ mask(target, n)
                } else {
                    col
                };
                m[row][col] = c(1.0);
            }
        }
        Gate::Zz { qubits, gamma } => {
            for col in 0..dim {
                let a = col & mask(qubits.0, n) != 0;
                let b = col & mask(qubits.1, n) != 0;
                let sign = if a == b { gamma } else { -gamma };
                m[col][col] = Complex64::from_polar(1.0, sign);
            }
        }
        // ideal execution treats a flip site as the identity
        Gate::FlipSite { .. } => {
            for col in 0..dim {
                m[col][col] = c(1.0);
            }
        }
    }
    m
}

fn matvec(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    amps
}

fn pick(n: usize, rng: &mut ChaCha8Rng) -> usize {
    rng.random::<u32>() as usize % n
}

fn distinct2(n: usize, rng: &mut ChaCha8Rng) -> (usize, usize) {
    let a = pick(n, rng);
    let mut b = pick(n, rng);
    while b == a {
        b = pick(n, rng);
    }
    (a, b)
}

/// Draw a random instruction over `n >= 2` qubits (never a flip site).
fn random_gate(n: usize, rng: &mut ChaCha8Rng) -> Gate {
    match rng.random::<u32>() % if n >= 3 { 7 } else { 6 } {
        0 => Gate::H {
            qubit: pick(n, rng),
        },
        1 => Gate::X {
            qubit: pick(n, rng),
        },
        2 => Gate::Ry {
            qubit: pick(n, rng),
            theta: rng.random::<f64>() * 6.0 - 3.0,
        },
        3 => Gate::XRot {
            qubit: pick(n, rng),
            beta: rng.random::<f64>() * 6.0 - 3.0,
        },
        4 => {
            let (a, b) = distinct2(n, rng);
            Gate::Zz {
                qubits: (a, b),
                gamma: rng.random::<f64>() * 6.0 - 3.0,
            }
        }
        5 => {
            let (control, target) = distinct2(n, rng);
            Gate::Cnot { control, target }
        }
        _ => {
            let (c0, target) = distinct2(n, rng);
            let mut c1 = pick(n, rng);
            while c1 == c0 || c1 == target {
                c1 = pick(n, rng);
            }
            Gate::Toffoli {
                controls: [c0, c1],
                target,
            }
        }
    }
}

fn max_amp_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn random_circuits_match_dense_matrix_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 1..=4 {
        for _ in 0..40 {
            let mut circuit = Circuit::new(n).unwrap();
            let mut reference = random_state(n, &mut rng);
            let input = StateVector::from_amplitudes(n, reference.clone()).unwrap();
            for _ in 0..12 {
                let gate = if n >= 2 {
                    random_gate(n, &mut rng)
                } else {
                    // single-qubit register: only 1q gates apply
                    match rng.random::<u32>() % 4 {
                        0 => Gate::H { qubit: 0 },
                        1 => Gate::X { qubit: 0 },
                        2 => Gate::Ry {
                            qubit: 0,
                            theta: rng.random::<f64>() * 6.0 - 3.0,
                        },
                        _ => Gate::XRot {
                            qubit: 0,
                            beta: rng.random::<f64>() * 6.0 - 3.0,
                        },
                    }
                };
                circuit.push(gate).unwrap();
                reference = matvec(&full_matrix(&gate, n), &reference);
            }
            let fast = run_circuit(&circuit, input, NoiseMode::Ideal).unwrap();
            let dev = max_amp_deviation(fast.amplitudes(), &reference);
            assert!(dev < 1e-12, "n={n} deviation {dev}");
        }
    }
}

#[test]
fn generic_kernels_match_dense_matrices() {
    // The raw public kernels (arbitrary 1q unitary, controlled-U, diagonal)
    // against the same entrywise construction.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for n in 2..=4 {
        for _ in 0..25 {
            // random 2x2 unitary from three angles
            let (a, p1, p2) = (
                rng.random::<f64>() * std::f64::consts::PI,
                rng.random::<f64>() * std::f64::consts::TAU,
                rng.random::<f64>() * std::f64::consts::TAU,
            );
            let (s, co) = a.sin_cos();
            let u: Mat2 = [
                [Complex64::from_polar(co, p1), Complex64::from_polar(s, p2)],
                [
                    Complex64::from_polar(-s, -p2),
                    Complex64::from_polar(co, -p1),
                ],
            ];
            let dim = 1usize << n;
            let target = rng.random::<u32>() as usize % n;
            let amps = random_state(n, &mut rng);

            // plain 1q
            let mut state = StateVector::from_amplitudes(n, amps.clone()).unwrap();
            state.apply_1q(target, &u).unwrap();
            let mut dense = zeros(dim);
            for col in 0..dim {
                let in_bit = usize::from(col & mask(target, n) != 0);
                for out_bit in 0..2 {
                    let row = (col & !mask(target, n)) | (out_bit * mask(target, n));
                    dense[row][col] += u[out_bit][in_bit];
                }
            }
            let expect = matvec(&dense, &amps);
            assert!(max_amp_deviation(state.amplitudes(), &expect) < 1e-12);

            // controlled-U with one or two controls
            let mut controls = vec![(target + 1) % n];
            if n >= 3 && rng.random::<f64>() < 0.5 {
                controls.push((target + 2) % n);
            }
            let mut state = StateVector::from_amplitudes(n, amps.clone()).unwrap();
            state.apply_controlled(&controls, target, &u).unwrap();
            let all = controls.iter().fold(0, |acc, &q| acc | mask(q, n));
            let mut dense = zeros(dim);
            for col in 0..dim {
                if col & all == all {
                    let in_bit = usize::from(col & mask(target, n) != 0);
                    for out_bit in 0..2 {
                        let row = (col & !mask(target, n)) | (out_bit * mask(target, n));
                        dense[row][col] += u[out_bit][in_bit];
                    }
                } else {
                    dense[col][col] = Complex64::ONE;
                }
            }
            let expect = matvec(&dense, &amps);
            assert!(max_amp_deviation(state.amplitudes(), &expect) < 1e-12);

            // two-qubit diagonal with four random unit phases
            let other = (target + 1) % n;
            let phases: [Complex64; 4] = [
                Complex64::from_polar(1.0, rng.random::<f64>() * 6.0),
                Complex64::from_polar(1.0, rng.random::<f64>() * 6.0),
                Complex64::from_polar(1.0, rng.random::<f64>() * 6.0),
                Complex64::from_polar(1.0, rng.random::<f64>() * 6.0),
            ];
            let mut state = StateVector::from_amplitudes(n, amps.clone()).unwrap();
            state.apply_2q_diagonal(target, other, &phases).unwrap();
            let mut expect = amps.clone();
            for (col, amp) in expect.iter_mut().enumerate() {
                let hi = usize::from(col & mask(target, n) != 0);
                let lo = usize::from(col & mask(other, n) != 0);
                *amp *= phases[(hi << 1) | lo];
            }
            assert!(max_amp_deviation(state.amplitudes(), &expect) < 1e-12);
        }
    }
}

#[test]
fn gate_matrix_follows_the_documented_conventions() {
    let ry = gate_matrix(&Gate::Ry {
        qubit: 0,
        theta: 1.0,
    })
    .unwrap();
    let (s, c) = 0.5_f64.sin_cos();
    assert!((ry[(0, 0)].re - c).abs() < 1e-15 && ry[(0, 0)].im == 0.0);
    assert!((ry[(0, 1)].re + s).abs() < 1e-15);
    assert!((ry[(1, 0)].re - s).abs() < 1e-15);

    // XRot(pi/2) = i X
    let xr = gate_matrix(&Gate::XRot {
        qubit: 0,
        beta: std::f64::consts::FRAC_PI_2,
    })
    .unwrap();
    assert!((xr[(0, 1)] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    assert!((xr[(1, 0)] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    assert!(xr[(0, 0)].norm() < 1e-15);

    let zz = gate_matrix(&Gate::Zz {
        qubits: (0, 1),
        gamma: 0.25,
    })
    .unwrap();
    for (k, sign) in [(0, 1.0), (1, -1.0), (2, -1.0), (3, 1.0)] {
        let want = Complex64::from_polar(1.0, sign * 0.25);
        assert!((zz[(k, k)] - want).norm() < 1e-15);
    }

    // first listed qubit is the most significant bit: |10> -> |11>
    let cnot = gate_matrix(&Gate::Cnot {
        control: 5,
        target: 2,
    })
    .unwrap();
    assert_eq!(cnot[(3, 2)], Complex64::ONE);
    assert_eq!(cnot[(2, 3)], Complex64::ONE);
    assert_eq!(cnot[(0, 0)], Complex64::ONE);
    assert_eq!(cnot[(2, 2)], Complex64::ZERO);

    let toffoli = gate_matrix(&Gate::Toffoli {
        controls: [0, 1],
        target: 2,
    })
    .unwrap();
    assert_eq!(toffoli[(7, 6)], Complex64::ONE);
    assert_eq!(toffoli[(6, 7)], Complex64::ONE);
    assert_eq!(toffoli[(5, 5)], Complex64::ONE);
}

#[test]
fn diagonal_gates_commute_in_either_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..20 {
        let n = 4;
        let amps = random_state(n, &mut rng);
        let g1 = Gate::Zz {
            qubits: (0, 2),
            gamma: rng.random::<f64>() * 3.0,
        };
        let g2 = Gate::Zz {
            qubits: (2, 3),
            gamma: rng.random::<f64>() * 3.0,
        };
        let run = |first: Gate, second: Gate| {
            let mut c = Circuit::new(n).unwrap();
            c.push(first).unwrap();
            c.push(second).unwrap();
            run_circuit(
                &c,
                StateVector::from_amplitudes(n, amps.clone()).unwrap(),
                NoiseMode::Ideal,
            )
            .unwrap()
        };
        let ab = run(g1, g2);
        let ba = run(g2, g1);
        assert!(max_amp_deviation(ab.amplitudes(), ba.amplitudes()) < 1e-12);
    }
}

#[test]
fn random_circuits_are_unitary_up_to_six_qubits() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 2..=6 {
        for _ in 0..6 {
            let mut circuit = Circuit::new(n).unwrap();
            for _ in 0..10 {
                circuit.push(random_gate(n, &mut rng)).unwrap();
            }
            let dev = circuit_unitary_check(&circuit).unwrap();
            assert!(dev < 1e-12, "n={n} deviation {dev}");
        }
    }
}

#[test]
fn unitary_check_handles_the_ten_qubit_cap() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut circuit = Circuit::new(10).unwrap();
    for _ in 0..8 {
        circuit.push(random_gate(10, &mut rng)).unwrap();
    }
    assert!(circuit_unitary_check(&circuit).unwrap() < 1e-12);
}
