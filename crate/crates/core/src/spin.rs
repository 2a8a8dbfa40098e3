//! Spin-register measurement model: a system qubit Ising-coupled to a
//! register of measurement spins, steered toward the degenerate
//! ferromagnetic ground manifold by an alternating-layer variational
//! circuit.
//!
//! The circuit prepares the system qubit with `Ry(θ)` and the register in
//! the uniform superposition, then alternates diagonal `ZZ(γ_k)` layers
//! over the coupling graph with `XRot(β_k)` mixer layers masked off the
//! system qubit. Because nothing ever rotates the system qubit after its
//! preparation, its Z-marginal is conserved — measuring the register
//! reads the qubit without destroying it. Minimizing the Ising energy of
//! the output concentrates weight on the two aligned configurations,
//! producing the cat-like state `cos(θ/2)|0,0…0⟩ + sin(θ/2)|1,1…1⟩`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{run_circuit, Circuit, Gate, NoiseMode};
use crate::optimizer::{multi_start, OptimizerConfig};
use crate::statevector::{bitstring_to_index, Distribution, RngSeed, StateVector, MAX_QUBITS};

/// Ferromagnetic coupling graph for `H = −Σ J_ij Z_i Z_j`.
///
/// Qubit 0 is the system qubit; the remaining indices are register spins.
/// The graph must be connected — a disconnected graph has extra ground
/// states beyond the all-0/all-1 pair and the readout scheme breaks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsingTopology {
    n_qubits: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl IsingTopology {
    /// Open chain `0–1–…–(n−1)` with uniform coupling `J = 1`.
    pub fn chain(n_qubits: usize) -> Result<Self> {
        Self::custom(n_qubits, (1..n_qubits).map(|q| (q - 1, q, 1.0)).collect())
    }

    /// Star with the system qubit at the hub, uniform `J = 1`.
    pub fn star(n_qubits: usize) -> Result<Self> {
        Self::custom(n_qubits, (1..n_qubits).map(|q| (0, q, 1.0)).collect())
    }

    /// Closed ring, uniform `J = 1`. Needs at least three sites.
    pub fn ring(n_qubits: usize) -> Result<Self> {
        if n_qubits < 3 {
            return Err(Error::Topology(format!(
                "ring needs at least 3 qubits, got {n_qubits}"
            )));
        }
        let mut edges: Vec<(usize, usize, f64)> = (1..n_qubits).map(|q| (q - 1, q, 1.0)).collect();
        edges.push((n_qubits - 1, 0, 1.0));
        Self::custom(n_qubits, edges)
    }

    /// Arbitrary weighted graph; validates indices, weights, duplicates,
    /// and connectivity.
    pub fn custom(n_qubits: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if !(2..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCount {
                n: n_qubits,
                max: MAX_QUBITS,
            });
        }
        if edges.is_empty() {
            return Err(Error::Topology("edge list is empty".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(i, j, w) in &edges {
            if i >= n_qubits || j >= n_qubits {
                return Err(Error::Topology(format!(
                    "edge ({i}, {j}) out of range for {n_qubits} qubits"
                )));
            }
            if i == j {
                return Err(Error::Topology(format!("self-loop on qubit {i}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Topology(format!(
                    "coupling J({i},{j}) = {w} must be positive"
                )));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::Topology(format!("duplicate edge ({i}, {j})")));
            }
        }
        // Breadth-first reachability from qubit 0.
        let mut adjacency = vec![Vec::new(); n_qubits];
        for &(i, j, _) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        let mut reached = vec![false; n_qubits];
        let mut queue = std::collections::VecDeque::from([0usize]);
        reached[0] = true;
        while let Some(q) = queue.pop_front() {
            for &r in &adjacency[q] {
                if !reached[r] {
                    reached[r] = true;
                    queue.push_back(r);
                }
            }
        }
        if let Some(isolated) = reached.iter().position(|&r| !r) {
            return Err(Error::Topology(format!(
                "graph is disconnected: qubit {isolated} unreachable from qubit 0"
            )));
        }
        Ok(Self { n_qubits, edges })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Exact ground energy `−Σ J_ij`, attained by the two aligned states.
    pub fn ground_energy(&self) -> f64 {
        -self.edges.iter().map(|&(_, _, w)| w).sum::<f64>()
    }

    /// Per-edge `(bit mask, J)` pairs; a basis index has `Z_iZ_j = +1`
    /// exactly when it has an even number of set bits under the mask.
    fn edge_masks(&self) -> Vec<(usize, f64)> {
        let n = self.n_qubits;
        self.edges
            .iter()
            .map(|&(i, j, w)| ((1 << (n - 1 - i)) | (1 << (n - 1 - j)), w))
            .collect()
    }

    fn index_energy(masks: &[(usize, f64)], index: usize) -> f64 {
        let mut energy = 0.0;
        for &(mask, w) in masks {
            energy += if (index & mask).count_ones() % 2 == 0 {
                -w
            } else {
                w
            };
        }
        energy
    }

    /// Classical Ising energy of one basis state.
    pub fn basis_energy(&self, bitstring: &str) -> Result<f64> {
        let index = bitstring_to_index(bitstring, self.n_qubits)?;
        Ok(Self::index_energy(&self.edge_masks(), index))
    }
}

/// Layer angles of the alternating ansatz, `gammas` for the diagonal
/// coupling layers and `betas` for the register mixers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl VariationalParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        let params = Self { gammas, betas };
        params.validate()?;
        Ok(params)
    }

    /// Linear ramp start point: coupling angles grow with depth while
    /// mixing angles shrink, an annealing-like schedule sampled at layer
    /// midpoints `(k - 1/2)/p` so that every angle is strictly interior —
    /// endpoint sampling would zero out the last mixing angle and park the
    /// start on a flat slice of the landscape.
    pub fn ramp(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Parameter {
                name: "p",
                value: 0.0,
                reason: "depth must be at least 1",
            });
        }
        let scale = 0.4 * PI;
        let mid = |k: usize| (k as f64 - 0.5) / p as f64;
        Ok(Self {
            gammas: (1..=p).map(|k| mid(k) * scale).collect(),
            betas: (1..=p).map(|k| (1.0 - mid(k)) * scale).collect(),
        })
    }

    pub fn depth(&self) -> usize {
        self.gammas.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.gammas.is_empty() || self.gammas.len() != self.betas.len() {
            return Err(Error::Config(format!(
                "need equal nonzero layer counts, got {} gammas and {} betas",
                self.gammas.len(),
                self.betas.len()
            )));
        }
        for &a in self.gammas.iter().chain(&self.betas) {
            if !a.is_finite() {
                return Err(Error::Parameter {
                    name: "angle",
                    value: a,
                    reason: "must be finite",
                });
            }
        }
        Ok(())
    }

    /// Flat `[γ_1…γ_p, β_1…β_p]` layout used by the optimizer.
    fn to_vec(&self) -> Vec<f64> {
        let mut x = self.gammas.clone();
        x.extend_from_slice(&self.betas);
        x
    }

    fn from_slice(x: &[f64]) -> Self {
        let p = x.len() / 2;
        Self {
            gammas: x[..p].to_vec(),
            betas: x[p..].to_vec(),
        }
    }
}

/// Builds the variational circuit: `Ry(θ)` on the system qubit, Hadamards
/// on the register, then `p` alternating layers of `ZZ(γ_k)` over every
/// edge and `XRot(β_k)` on every qubit except the system qubit.
pub fn build_spin_circuit(
    topo: &IsingTopology,
    params: &VariationalParams,
    theta: f64,
) -> Result<Circuit> {
    params.validate()?;
    if !theta.is_finite() {
        return Err(Error::Parameter {
            name: "theta",
            value: theta,
            reason: "must be finite",
        });
    }
    let n = topo.n_qubits;
    let mut circuit = Circuit::new(n)?;
    circuit.push(Gate::Ry { qubit: 0, theta })?;
    for q in 1..n {
        circuit.push(Gate::H { qubit: q })?;
    }
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        for &(i, j, _) in &topo.edges {
            circuit.push(Gate::Zz {
                qubits: (i, j),
                gamma,
            })?;
        }
        for q in 1..n {
            circuit.push(Gate::XRot { qubit: q, beta })?;
        }
    }
    Ok(circuit)
}

/// Exact Ising energy `−Σ J_ij ⟨Z_i Z_j⟩` in one pass over amplitudes.
pub fn ising_energy(state: &StateVector, topo: &IsingTopology) -> Result<f64> {
    if state.n_qubits() != topo.n_qubits {
        return Err(Error::QubitMismatch {
            circuit: topo.n_qubits,
            state: state.n_qubits(),
        });
    }
    let masks = topo.edge_masks();
    let mut energy = 0.0;
    for (index, amp) in state.amplitudes().iter().enumerate() {
        let weight = amp.norm_sqr();
        if weight > 0.0 {
            energy += weight * IsingTopology::index_energy(&masks, index);
        }
    }
    Ok(energy)
}

/// Probability weight per Ising energy level, sorted by energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralWeights {
    levels: Vec<(f64, f64)>,
}

impl SpectralWeights {
    /// `(energy, weight)` pairs in ascending energy order.
    pub fn levels(&self) -> &[(f64, f64)] {
        &self.levels
    }

    /// Weight on the lowest level — the ground manifold.
    pub fn ground_weight(&self) -> f64 {
        self.levels.first().map_or(0.0, |&(_, w)| w)
    }

    pub fn ground_energy(&self) -> f64 {
        self.levels.first().map_or(f64::NAN, |&(e, _)| e)
    }

    pub fn total(&self) -> f64 {
        self.levels.iter().map(|&(_, w)| w).sum()
    }
}

/// Classifies every basis state by its classical Ising energy and sums
/// the probability per level. Energies closer than 1e-9 are merged.
pub fn spectral_weights(state: &StateVector, topo: &IsingTopology) -> Result<SpectralWeights> {
    if state.n_qubits() != topo.n_qubits {
        return Err(Error::QubitMismatch {
            circuit: topo.n_qubits,
            state: state.n_qubits(),
        });
    }
    const MERGE_TOL: f64 = 1e-9;
    let masks = topo.edge_masks();
    let mut grouped: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for (index, amp) in state.amplitudes().iter().enumerate() {
        let energy = IsingTopology::index_energy(&masks, index);
        let key = (energy / MERGE_TOL).round() as i64;
        let slot = grouped.entry(key).or_insert((energy, 0.0));
        slot.1 += amp.norm_sqr();
    }
    Ok(SpectralWeights {
        levels: grouped.into_values().collect(),
    })
}

/// Overlap probability with the target cat state
/// `cos(θ/2)|0…0⟩ + sin(θ/2)|1…1⟩` (global phase absorbed).
pub fn cat_fidelity(state: &StateVector, theta: f64) -> f64 {
    let amps = state.amplitudes();
    let overlap = amps[0] * (theta / 2.0).cos() + amps[amps.len() - 1] * (theta / 2.0).sin();
    overlap.norm_sqr()
}

/// Exact variational energy: build the circuit, run it noise-free from
/// the all-zeros state, and evaluate the Ising expectation. Deterministic
/// — no shot noise enters the optimization.
pub fn energy_objective(
    topo: &IsingTopology,
    theta: f64,
    params: &VariationalParams,
) -> Result<f64> {
    let circuit = build_spin_circuit(topo, params, theta)?;
    let input = StateVector::new_zero(topo.n_qubits)?;
    let state = run_circuit(&circuit, input, NoiseMode::Ideal)?;
    ising_energy(&state, topo)
}

/// Search knobs for [`optimize`]. `max_evals` is the total objective
/// budget shared across all restarts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeOptions {
    pub max_evals: usize,
    pub f_tol: f64,
    pub restarts: usize,
    pub seed: RngSeed,
}

impl OptimizeOptions {
    /// Defaults scaled to circuit depth: `1000·p` total evaluations over
    /// 8 restarts with function tolerance 1e-6.
    pub fn for_depth(p: usize) -> Self {
        Self {
            max_evals: 1000 * p.max(1),
            f_tol: 1e-6,
            restarts: 8,
            seed: RngSeed(0),
        }
    }
}

/// Outcome of a variational search, sufficient to re-run the circuit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerResult {
    pub params: VariationalParams,
    pub energy: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Qubit count the parameters were optimized for; guards transfers.
    pub n_qubits: usize,
}

/// Multi-start minimization of [`energy_objective`] over the `2p` layer
/// angles, boxed to `[0, π]` per angle (the gates are π-periodic up to
/// global phase). Restart 0 starts from the linear ramp, the others from
/// seeded uniform draws; identical inputs give identical results.
pub fn optimize(
    topo: &IsingTopology,
    p: usize,
    theta: f64,
    opts: &OptimizeOptions,
) -> Result<OptimizerResult> {
    let ramp = VariationalParams::ramp(p)?;
    let cfg = OptimizerConfig {
        max_evals: opts.max_evals,
        f_tol: opts.f_tol,
        restarts: opts.restarts,
        bounds: vec![(0.0, PI); 2 * p],
        seed: opts.seed,
    };
    let objective = |x: &[f64]| energy_objective(topo, theta, &VariationalParams::from_slice(x));
    let found = multi_start(&objective, &ramp.to_vec(), &cfg)?;
    Ok(OptimizerResult {
        params: VariationalParams::from_slice(&found.x),
        energy: found.f,
        evaluations: found.evaluations,
        converged: found.converged,
        n_qubits: topo.n_qubits,
    })
}

/// Re-runs the circuit with previously optimized parameters at a new
/// preparation angle and returns the exact outcome distribution — the
/// readout workflow: calibrate once, then measure arbitrary inputs.
pub fn transfer_params(
    result: &OptimizerResult,
    topo: &IsingTopology,
    theta_new: f64,
) -> Result<Distribution> {
    if result.n_qubits != topo.n_qubits {
        return Err(Error::Config(format!(
            "parameters were optimized for {} qubits but the topology has {}",
            result.n_qubits, topo.n_qubits
        )));
    }
    let circuit = build_spin_circuit(topo, &result.params, theta_new)?;
    let input = StateVector::new_zero(topo.n_qubits)?;
    let state = run_circuit(&circuit, input, NoiseMode::Ideal)?;
    state.probabilities(0.0)
}
