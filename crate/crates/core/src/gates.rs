//! Gate instructions, circuits, and the circuit runner.
//!
//! The instruction set is intentionally small: exactly the gates the two
//! measurement models need (`H`, `X`, `Ry`, `CNOT`, `Toffoli`, `ZZ`,
//! `XRot`) plus a probabilistic bit-flip marker (`FlipSite`) for noise
//! studies. Conventions:
//!
//! * `Ry(theta)` = `[[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]`
//! * `XRot(beta)` = `cos(beta) I + i sin(beta) X` (full angle, not half)
//! * `ZZ(gamma)` = `diag(e^{i g}, e^{-i g}, e^{-i g}, e^{i g})`
//!
//! `FlipSite(p, q)` is not a unitary: in ideal execution it is skipped, in
//! trajectory execution it applies `X` to `q` with probability `p`, and the
//! exact-noise path enumerates both choices. Circuits serialize to a JSON
//! array of `{"gate", "qubits", "param"}` objects.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Mat2, RngSeed, StateVector, MAX_QUBITS};

/// One circuit instruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H {
        qubit: usize,
    },
    X {
        qubit: usize,
    },
    Ry {
        qubit: usize,
        theta: f64,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Toffoli {
        controls: [usize; 2],
        target: usize,
    },
    Zz {
        qubits: (usize, usize),
        gamma: f64,
    },
    XRot {
        qubit: usize,
        beta: f64,
    },
    /// Bit-flip noise site: applies `X` with probability `prob` when the
    /// runner resolves noise, otherwise the identity.
    FlipSite {
        qubit: usize,
        prob: f64,
    },
}

impl Gate {
    /// Qubits the instruction touches, in declaration order.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H { qubit }
            | Gate::X { qubit }
            | Gate::Ry { qubit, .. }
            | Gate::XRot { qubit, .. }
            | Gate::FlipSite { qubit, .. } => vec![qubit],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Toffoli { controls, target } => vec![controls[0], controls[1], target],
            Gate::Zz { qubits, .. } => vec![qubits.0, qubits.1],
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Gate::H { .. } => "h",
            Gate::X { .. } => "x",
            Gate::Ry { .. } => "ry",
            Gate::Cnot { .. } => "cnot",
            Gate::Toffoli { .. } => "toffoli",
            Gate::Zz { .. } => "zz",
            Gate::XRot { .. } => "xrot",
            Gate::FlipSite { .. } => "flip",
        }
    }

    fn param(&self) -> Option<f64> {
        match *self {
            Gate::Ry { theta, .. } => Some(theta),
            Gate::Zz { gamma, .. } => Some(gamma),
            Gate::XRot { beta, .. } => Some(beta),
            Gate::FlipSite { prob, .. } => Some(prob),
            _ => None,
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n_qubits {
                return Err(Error::QubitIndex { index: q, n_qubits });
            }
        }
        let mut sorted = qs.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicateQubits(qs));
        }
        if let Gate::FlipSite { prob, .. } = *self {
            if !(0.0..=1.0).contains(&prob) {
                return Err(Error::FlipProbability { p: prob });
            }
        }
        if let Some(p) = self.param() {
            if !p.is_finite() {
                return Err(Error::Parameter {
                    name: "gate parameter",
                    value: p,
                    reason: "must be finite",
                });
            }
        }
        Ok(())
    }
}

/// An ordered list of instructions over a fixed-width register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    instructions: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount {
                n: n_qubits,
                max: MAX_QUBITS,
            });
        }
        Ok(Circuit {
            n_qubits,
            instructions: Vec::new(),
        })
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.instructions.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn instructions(&self) -> &[Gate] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Number of `FlipSite` instructions (the length a flip pattern must have).
    pub fn flip_site_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|g| matches!(g, Gate::FlipSite { .. }))
            .count()
    }
}

/// How the runner resolves `FlipSite` instructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    /// Skip every flip site (noise-free execution).
    Ideal,
    /// Draw each flip independently with its site probability, using a
    /// ChaCha stream seeded from the given seed.
    Trajectory(RngSeed),
}

enum FlipResolution<'a> {
    Ideal,
    Rng(Box<ChaCha8Rng>),
    Pattern(&'a [bool], usize),
}

fn execute(
    circuit: &Circuit,
    mut state: StateVector,
    mut flips: FlipResolution,
    validate: bool,
) -> Result<StateVector> {
    if circuit.n_qubits() != state.n_qubits() {
        return Err(Error::QubitMismatch {
            circuit: circuit.n_qubits(),
            state: state.n_qubits(),
        });
    }
    const X: Mat2 = [
        [Complex64::ZERO, Complex64::ONE],
        [Complex64::ONE, Complex64::ZERO],
    ];
    for gate in circuit.instructions() {
        match *gate {
            Gate::H { qubit } => state.apply_h(qubit)?,
            Gate::X { qubit } => state.apply_x(qubit)?,
            Gate::Ry { qubit, theta } => state.apply_ry(qubit, theta)?,
            Gate::Cnot { control, target } => state.apply_controlled(&[control], target, &X)?,
            Gate::Toffoli { controls, target } => state.apply_controlled(&controls, target, &X)?,
            Gate::Zz { qubits, gamma } => state.apply_zz(qubits.0, qubits.1, gamma)?,
            Gate::XRot { qubit, beta } => state.apply_xrot(qubit, beta)?,
            Gate::FlipSite { qubit, prob } => {
                let flip = match &mut flips {
                    FlipResolution::Ideal => false,
                    FlipResolution::Rng(rng) => rng.random::<f64>() < prob,
                    FlipResolution::Pattern(bits, next) => {
                        let bit = bits[*next];
                        *next += 1;
                        bit
                    }
                };
                if flip {
                    state.apply_x(qubit)?;
                }
            }
        }
        if validate {
            state.check_norm(1e-9)?;
        }
    }
    Ok(state)
}

/// Run `circuit` on `input`, resolving flip sites per `mode`.
pub fn run_circuit(circuit: &Circuit, input: StateVector, mode: NoiseMode) -> Result<StateVector> {
    let flips = match mode {
        NoiseMode::Ideal => FlipResolution::Ideal,
        NoiseMode::Trajectory(seed) => {
            FlipResolution::Rng(Box::new(ChaCha8Rng::seed_from_u64(seed.0)))
        }
    };
    execute(circuit, input, flips, false)
}

/// As [`run_circuit`], additionally checking the state norm after every
/// instruction (opt-in validation; roughly doubles memory traffic).
pub fn run_circuit_validated(
    circuit: &Circuit,
    input: StateVector,
    mode: NoiseMode,
) -> Result<StateVector> {
    let flips = match mode {
        NoiseMode::Ideal => FlipResolution::Ideal,
        NoiseMode::Trajectory(seed) => {
            FlipResolution::Rng(Box::new(ChaCha8Rng::seed_from_u64(seed.0)))
        }
    };
    execute(circuit, input, flips, true)
}

/// Run with every flip site resolved up front: `pattern[i]` decides the
/// i-th `FlipSite` in instruction order. Used by exact noise enumeration.
pub fn run_with_flip_pattern(
    circuit: &Circuit,
    input: StateVector,
    pattern: &[bool],
) -> Result<StateVector> {
    let expected = circuit.flip_site_count();
    if pattern.len() != expected {
        return Err(Error::FlipPattern {
            expected,
            actual: pattern.len(),
        });
    }
    execute(circuit, input, FlipResolution::Pattern(pattern, 0), false)
}

/// Dense unitary of a single instruction, over its own qubits in listed
/// order (first listed qubit = leftmost bit of the row/column index).
/// `FlipSite` has no matrix form and is refused.
pub fn gate_matrix(gate: &Gate) -> Result<nalgebra::DMatrix<Complex64>> {
    use nalgebra::DMatrix;
    let c = |x: f64| Complex64::new(x, 0.0);
    Ok(match *gate {
        Gate::H { .. } => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            DMatrix::from_row_slice(2, 2, &[c(r), c(r), c(r), c(-r)])
        }
        Gate::X { .. } => DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        Gate::Ry { theta, .. } => {
            let (s, co) = (theta / 2.0).sin_cos();
            DMatrix::from_row_slice(2, 2, &[c(co), c(-s), c(s), c(co)])
        }
        Gate::XRot { beta, .. } => {
            let (s, co) = beta.sin_cos();
            DMatrix::from_row_slice(
                2,
                2,
                &[c(co), Complex64::new(0.0, s), Complex64::new(0.0, s), c(co)],
            )
        }
        Gate::Cnot { .. } => {
            let mut m = DMatrix::identity(4, 4);
            m[(2, 2)] = c(0.0);
            m[(3, 3)] = c(0.0);
            m[(2, 3)] = c(1.0);
            m[(3, 2)] = c(1.0);
            m
        }
        Gate::Toffoli { .. } => {
            let mut m = DMatrix::identity(8, 8);
            m[(6, 6)] = c(0.0);
            m[(7, 7)] = c(0.0);
            m[(6, 7)] = c(1.0);
            m[(7, 6)] = c(1.0);
            m
        }
        Gate::Zz { gamma, .. } => {
            let plus = Complex64::from_polar(1.0, gamma);
            let minus = Complex64::from_polar(1.0, -gamma);
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![plus, minus, minus, plus]))
        }
        Gate::FlipSite { .. } => return Err(Error::NoMatrixForm("flip site")),
    })
}

/// Maximum cap on [`circuit_unitary_check`]; the check is O(8^n).
pub const UNITARY_CHECK_MAX_QUBITS: usize = 10;

/// Build the circuit's full unitary column by column (flip sites count as
/// identity, matching ideal execution) and return `max |U^H U - I|`.
pub fn circuit_unitary_check(circuit: &Circuit) -> Result<f64> {
    let n = circuit.n_qubits();
    if n > UNITARY_CHECK_MAX_QUBITS {
        return Err(Error::UnitaryCheckTooLarge {
            n,
            max: UNITARY_CHECK_MAX_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut u = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let mut amps = vec![Complex64::ZERO; dim];
        amps[col] = Complex64::ONE;
        let input = StateVector::from_amplitudes(n, amps)?;
        let output = run_circuit(circuit, input, NoiseMode::Ideal)?;
        for (row, a) in output.amplitudes().iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    let gram = u.adjoint() * &u;
    let mut max_dev: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let expect = if i == j {
                Complex64::ONE
            } else {
                Complex64::ZERO
            };
            max_dev = max_dev.max((gram[(i, j)] - expect).norm());
        }
    }
    Ok(max_dev)
}

/// Serde image of one instruction: `{"gate": "cnot", "qubits": [0, 1],
/// "param": null}`.
#[derive(Debug, Serialize, Deserialize)]
struct GateRecord {
    gate: String,
    qubits: Vec<usize>,
    param: Option<f64>,
}

impl From<&Gate> for GateRecord {
    fn from(g: &Gate) -> Self {
        GateRecord {
            gate: g.name().to_string(),
            qubits: g.qubits(),
            param: g.param(),
        }
    }
}

impl GateRecord {
    fn into_gate(self) -> Result<Gate> {
        let bad = |reason: String| Error::Config(reason);
        let arity = |want: usize| -> Result<()> {
            if self.qubits.len() != want {
                return Err(bad(format!(
                    "gate '{}' expects {} qubit(s), got {}",
                    self.gate,
                    want,
                    self.qubits.len()
                )));
            }
            Ok(())
        };
        let param = |name: &str| -> Result<f64> {
            self.param
                .ok_or_else(|| bad(format!("gate '{name}' requires a param")))
        };
        let no_param = |name: &str| -> Result<()> {
            if self.param.is_some() {
                return Err(bad(format!("gate '{name}' takes no param")));
            }
            Ok(())
        };
        Ok(match self.gate.as_str() {
            "h" => {
                arity(1)?;
                no_param("h")?;
                Gate::H {
                    qubit: self.qubits[0],
                }
            }
            "x" => {
                arity(1)?;
                no_param("x")?;
                Gate::X {
                    qubit: self.qubits[0],
                }
            }
            "ry" => {
                arity(1)?;
                Gate::Ry {
                    qubit: self.qubits[0],
                    theta: param("ry")?,
                }
            }
            "cnot" => {
                arity(2)?;
                no_param("cnot")?;
                Gate::Cnot {
                    control: self.qubits[0],
                    target: self.qubits[1],
                }
            }
            "toffoli" => {
                arity(3)?;
                no_param("toffoli")?;
                Gate::Toffoli {
                    controls: [self.qubits[0], self.qubits[1]],
                    target: self.qubits[2],
                }
            }
            "zz" => {
                arity(2)?;
                Gate::Zz {
                    qubits: (self.qubits[0], self.qubits[1]),
                    gamma: param("zz")?,
                }
            }
            "xrot" => {
                arity(1)?;
                Gate::XRot {
                    qubit: self.qubits[0],
                    beta: param("xrot")?,
                }
            }
            "flip" => {
                arity(1)?;
                Gate::FlipSite {
                    qubit: self.qubits[0],
                    prob: param("flip")?,
                }
            }
            other => return Err(bad(format!("unknown gate '{other}'"))),
        })
    }
}

/// Serialize the instruction list as a JSON array of gate records.
pub fn instructions_to_json(circuit: &Circuit) -> String {
    let records: Vec<GateRecord> = circuit
        .instructions()
        .iter()
        .map(GateRecord::from)
        .collect();
    serde_json::to_string_pretty(&records).expect("gate records always serialize")
}

/// Parse a JSON instruction array into a circuit over `n_qubits` qubits.
pub fn circuit_from_json(n_qubits: usize, json: &str) -> Result<Circuit> {
    let records: Vec<GateRecord> =
        serde_json::from_str(json).map_err(|e| Error::Config(format!("circuit JSON: {e}")))?;
    let mut circuit = Circuit::new(n_qubits)?;
    for record in records {
        circuit.push(record.into_gate()?)?;
    }
    Ok(circuit)
}
