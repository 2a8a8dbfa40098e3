//! Continuous-time cross-check for the tree cascade.
//!
//! The three-qubit blocks of the tree circuit are the pulsed limit of a
//! layered transfer Hamiltonian: each internal node `A` with children
//! `B1`, `B2` carries a term
//!
//! ```text
//! g ( sigma-_A sigma+_B1 sigma+_B2  +  h.c. )
//! ```
//!
//! which de-excites the parent while exciting both children (plus optional
//! on-site `omega_i/2 sigma_Z` detunings; `sigma_Z |0> = +|0>`). Driving
//! layer 1 for `tau = pi/(2g)`, then layer 2 for `tau`, and so on — a
//! square-pulse schedule — performs the same root-to-leaves transfer as
//! the gate cascade up to per-transfer phases of `-i`, which square away in
//! the outcome populations.
//!
//! Evolution is dense and exact: each segment Hamiltonian is Hermitian, so
//! `exp(-i H t)` comes from its eigendecomposition with no step-size error.
//! That limits the dense path to three layers (dimension 128), which is all
//! the cross-check needs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statevector::StateVector;
use crate::tree::{self, TreeConfig};

/// Dense-evolution cap: `2^3 - 1 = 7` qubits, dimension 128.
pub const MAX_DENSE_LAYERS: usize = 3;

/// Layered transfer Hamiltonian over a `2^L - 1`-qubit tree register.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeHamiltonianSpec {
    /// Tree depth `L` (matches [`TreeConfig::n_layers`]).
    pub n_layers: usize,
    /// Transfer coupling rate `g`.
    pub g: f64,
    /// Per-qubit detunings; `omega_i / 2 sigma_Z` on each qubit.
    pub omegas: Vec<f64>,
}

impl TreeHamiltonianSpec {
    /// Resonant spec (all detunings zero).
    pub fn resonant(n_layers: usize, g: f64) -> Result<Self> {
        let n_qubits = (1usize << n_layers) - 1;
        let spec = TreeHamiltonianSpec {
            n_layers,
            g,
            omegas: vec![0.0; n_qubits],
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=tree::MAX_ENUMERATION_LAYERS).contains(&self.n_layers) {
            return Err(Error::Config(format!(
                "tree depth must lie in 2..={} (got {})",
                tree::MAX_ENUMERATION_LAYERS,
                self.n_layers
            )));
        }
        if !self.g.is_finite() || self.g <= 0.0 {
            return Err(Error::Parameter {
                name: "g",
                value: self.g,
                reason: "coupling must be finite and positive",
            });
        }
        if self.omegas.len() != self.n_qubits() {
            return Err(Error::Config(format!(
                "expected {} detunings, got {}",
                self.n_qubits(),
                self.omegas.len()
            )));
        }
        if self.omegas.iter().any(|w| !w.is_finite()) {
            return Err(Error::Config("detunings must be finite".into()));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        (1 << self.n_layers) - 1
    }

    /// Number of block layers (pulse segments): `L - 1`.
    pub fn n_block_layers(&self) -> usize {
        self.n_layers - 1
    }

    /// Parent nodes whose blocks make up block layer `d` (1-based).
    fn layer_parents(&self, d: usize) -> Result<std::ops::Range<usize>> {
        if d == 0 || d > self.n_block_layers() {
            return Err(Error::Config(format!(
                "active layer must lie in 1..={} (got {d})",
                self.n_block_layers()
            )));
        }
        Ok(((1 << (d - 1)) - 1)..((1 << d) - 1))
    }

    /// Half the duration of a complete population transfer: `pi / (2g)`.
    pub fn pi_pulse_duration(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 / self.g
    }
}

/// A sequence of constant-Hamiltonian segments: drive one block layer for
/// a fixed duration each.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pub segments: Vec<PulseSegment>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSegment {
    /// Block layer driven during this segment (1 = root block).
    pub layer: usize,
    /// Segment duration.
    pub duration: f64,
}

impl PulseSchedule {
    /// The square-pulse transfer schedule: each layer in order, `pi/(2g)`
    /// each — exactly one complete transfer per layer.
    pub fn pi_pulses(spec: &TreeHamiltonianSpec) -> Self {
        let tau = spec.pi_pulse_duration();
        PulseSchedule {
            segments: (1..=spec.n_block_layers())
                .map(|layer| PulseSegment {
                    layer,
                    duration: tau,
                })
                .collect(),
        }
    }

    fn validate(&self, spec: &TreeHamiltonianSpec) -> Result<()> {
        for seg in &self.segments {
            spec.layer_parents(seg.layer)?;
            if !seg.duration.is_finite() || seg.duration < 0.0 {
                return Err(Error::Parameter {
                    name: "duration",
                    value: seg.duration,
                    reason: "must be finite and non-negative",
                });
            }
        }
        Ok(())
    }
}

/// Apply the Hamiltonian with block layer `active_layer` driven (plus all
/// detuning terms) to `state`, returning `H |psi>`.
pub fn apply_hamiltonian(
    spec: &TreeHamiltonianSpec,
    active_layer: usize,
    state: &StateVector,
) -> Result<StateVector> {
    spec.validate()?;
    let parents = spec.layer_parents(active_layer)?;
    let n = spec.n_qubits();
    if state.n_qubits() != n {
        return Err(Error::QubitMismatch {
            circuit: n,
            state: state.n_qubits(),
        });
    }
    let mask = |q: usize| 1usize << (n - 1 - q);
    let amps = state.amplitudes();
    let mut out = vec![Complex64::ZERO; amps.len()];

    let any_detuning = spec.omegas.iter().any(|&w| w != 0.0);
    for (k, &a) in amps.iter().enumerate() {
        if a == Complex64::ZERO {
            continue;
        }
        if any_detuning {
            // sum_i omega_i/2 * z_i with z = +1 for bit 0, -1 for bit 1
            let mut diag = 0.0;
            for (q, &w) in spec.omegas.iter().enumerate() {
                let z = if k & mask(q) == 0 { 1.0 } else { -1.0 };
                diag += 0.5 * w * z;
            }
            out[k] += diag * a;
        }
        for p in parents.clone() {
            let (mp, ml, mr) = (mask(p), mask(2 * p + 1), mask(2 * p + 2));
            let block = mp | ml | mr;
            let parent_set = k & mp != 0;
            let children_set = k & ml != 0 && k & mr != 0;
            // sigma-_p sigma+_l sigma+_r : |1 0 0> -> |0 1 1>, plus h.c.
            if (parent_set && k & (ml | mr) == 0) || (!parent_set && children_set) {
                out[k ^ block] += spec.g * a;
            }
        }
    }
    StateVector::from_amplitudes(n, out)
}

/// Dense Hamiltonian matrix for one driven layer, built column-by-column
/// from [`apply_hamiltonian`] so both paths share the same definition.
fn dense_hamiltonian(spec: &TreeHamiltonianSpec, layer: usize) -> Result<DMatrix<Complex64>> {
    let n = spec.n_qubits();
    let dim = 1usize << n;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let mut amps = vec![Complex64::ZERO; dim];
        amps[col] = Complex64::ONE;
        let basis = StateVector::from_amplitudes(n, amps)?;
        let image = apply_hamiltonian(spec, layer, &basis)?;
        for (row, &a) in image.amplitudes().iter().enumerate() {
            h[(row, col)] = a;
        }
    }
    Ok(h)
}

/// Evolve `input` through the pulse schedule: for each segment apply
/// `exp(-i H_layer * duration)` exactly, via eigendecomposition of the
/// (Hermitian) segment Hamiltonian.
pub fn evolve_pulsed(
    spec: &TreeHamiltonianSpec,
    schedule: &PulseSchedule,
    input: StateVector,
) -> Result<StateVector> {
    spec.validate()?;
    schedule.validate(spec)?;
    if spec.n_layers > MAX_DENSE_LAYERS {
        return Err(Error::DenseLayerCap {
            layers: spec.n_layers,
            max: MAX_DENSE_LAYERS,
        });
    }
    let n = spec.n_qubits();
    if input.n_qubits() != n {
        return Err(Error::QubitMismatch {
            circuit: n,
            state: input.n_qubits(),
        });
    }
    let mut psi = DVector::from_column_slice(input.amplitudes());
    for seg in &schedule.segments {
        let h = dense_hamiltonian(spec, seg.layer)?;
        let eig = h.symmetric_eigen();
        // exp(-i H t) psi = V diag(e^{-i lambda t}) V^H psi
        let mut w = eig.eigenvectors.adjoint() * &psi;
        for (i, lambda) in eig.eigenvalues.iter().enumerate() {
            w[i] *= Complex64::from_polar(1.0, -lambda * seg.duration);
        }
        psi = &eig.eigenvectors * w;
    }
    StateVector::from_amplitudes(n, psi.as_slice().to_vec())
}

/// Run the gate cascade and the pulsed evolution from the same
/// `Ry(theta)`-prepared input and return the largest difference in basis
/// populations, `max_k | |a_gate|^2 - |a_pulse|^2 |`.
pub fn compare_with_circuit(
    spec: &TreeHamiltonianSpec,
    schedule: &PulseSchedule,
    theta: f64,
) -> Result<f64> {
    let cfg = TreeConfig::new(spec.n_layers, theta, 0.0)?;
    let gate_state = tree::ideal_state(&cfg)?;

    let mut prepared = StateVector::new_zero(spec.n_qubits())?;
    prepared.apply_ry(0, theta)?;
    let pulsed = evolve_pulsed(spec, schedule, prepared)?;

    Ok(gate_state
        .amplitudes()
        .iter()
        .zip(pulsed.amplitudes())
        .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
        .fold(0.0, f64::max))
}
