//! Tree-network measurement model.
//!
//! A register of `2^L - 1` qubits arranged as a complete binary tree with
//! the system qubit at the root (index 0; children of node `i` are
//! `2i + 1` and `2i + 2`). Each internal node `i` contributes a
//! *three-qubit block*
//!
//! ```text
//! CNOT(i -> 2i+1), CNOT(i -> 2i+2), Toffoli(2i+1, 2i+2 -> i)
//! ```
//!
//! which copies the node's excitation onto both children and then erases
//! it, so an excitation cascades from the root to the leaf (measurement)
//! layer. Starting from `Ry(theta)|0...0>` the ideal final state is
//!
//! ```text
//! cos(t/2) |0...0>  +  sin(t/2) |0..0 1..1>      (all leaves excited)
//! ```
//!
//! with every internal qubit returned to `|0>` — the register behaves as a
//! single amplified detector for the system qubit.
//!
//! Noise: a [`Gate::FlipSite`] on both targets immediately after each block
//! models independent bit flips (dark counts / losses). The exact outcome
//! mixture is obtained by enumerating all flip patterns; a trajectory
//! sampler provides the matching Monte-Carlo path.
//!
//! Mirror symmetry: swapping the role of the two branch amplitudes
//! (`theta -> pi - theta`) maps the outcome distribution onto itself under
//! complementation of the *leaf* bits, pattern by pattern, including noise.
//! [`mirror_image`] applies that involution and [`mirror_check`] verifies
//! the symmetry numerically.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gates::{run_circuit, run_with_flip_pattern, Circuit, Gate, NoiseMode};
use crate::statevector::{
    bitstring_to_index, index_to_bitstring, Distribution, RngSeed, StateVector,
};

/// Exact noise enumeration cap: `2 * (2^(L-1) - 1)` flip sites at `L = 4`
/// means 16384 patterns, which is the largest practical sweep.
pub const MAX_ENUMERATION_LAYERS: usize = 4;

/// Configuration of one tree-network run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    /// Tree depth `L`; the register holds `2^L - 1` qubits.
    pub n_layers: usize,
    /// System-qubit preparation angle for `Ry(theta)`.
    pub theta: f64,
    /// Bit-flip probability at each noise site (0 disables noise sites).
    pub flip_prob: f64,
}

impl TreeConfig {
    pub fn new(n_layers: usize, theta: f64, flip_prob: f64) -> Result<Self> {
        let cfg = TreeConfig {
            n_layers,
            theta,
            flip_prob,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_ENUMERATION_LAYERS).contains(&self.n_layers) {
            return Err(Error::Config(format!(
                "tree depth must lie in 2..={} (got {}); deeper trees exceed the register cap",
                MAX_ENUMERATION_LAYERS, self.n_layers
            )));
        }
        if !self.theta.is_finite() {
            return Err(Error::Parameter {
                name: "theta",
                value: self.theta,
                reason: "must be finite",
            });
        }
        if !(0.0..=1.0).contains(&self.flip_prob) {
            return Err(Error::FlipProbability { p: self.flip_prob });
        }
        Ok(())
    }

    /// Total register size `2^L - 1`.
    pub fn n_qubits(&self) -> usize {
        (1 << self.n_layers) - 1
    }

    /// Indices of the leaf (measurement) qubits.
    pub fn leaf_qubits(&self) -> std::ops::Range<usize> {
        let first = (1 << (self.n_layers - 1)) - 1;
        first..self.n_qubits()
    }

    /// Indices of internal non-root qubits (the intermediate layer(s)).
    pub fn intermediate_qubits(&self) -> std::ops::Range<usize> {
        1..(1 << (self.n_layers - 1)) - 1
    }

    /// Number of flip sites the built circuit contains (two per block).
    pub fn flip_sites(&self) -> usize {
        if self.flip_prob > 0.0 {
            2 * ((1 << (self.n_layers - 1)) - 1)
        } else {
            0
        }
    }
}

/// Build the preparation-plus-cascade circuit for `cfg`.
///
/// Blocks run in heap order (root first, then each deeper layer), so every
/// node's flip sites sit after the block that wrote it and before the block
/// that reads it.
pub fn build_tree_circuit(cfg: &TreeConfig) -> Result<Circuit> {
    cfg.validate()?;
    let mut circuit = Circuit::new(cfg.n_qubits())?;
    circuit.push(Gate::Ry {
        qubit: 0,
        theta: cfg.theta,
    })?;
    let internal = (1 << (cfg.n_layers - 1)) - 1;
    for i in 0..internal {
        let (l, r) = (2 * i + 1, 2 * i + 2);
        circuit.push(Gate::Cnot {
            control: i,
            target: l,
        })?;
        circuit.push(Gate::Cnot {
            control: i,
            target: r,
        })?;
        circuit.push(Gate::Toffoli {
            controls: [l, r],
            target: i,
        })?;
        if cfg.flip_prob > 0.0 {
            circuit.push(Gate::FlipSite {
                qubit: l,
                prob: cfg.flip_prob,
            })?;
            circuit.push(Gate::FlipSite {
                qubit: r,
                prob: cfg.flip_prob,
            })?;
        }
    }
    Ok(circuit)
}

/// Final state of the noise-free cascade.
pub fn ideal_state(cfg: &TreeConfig) -> Result<StateVector> {
    let circuit = build_tree_circuit(&TreeConfig {
        flip_prob: 0.0,
        ..*cfg
    })?;
    run_circuit(
        &circuit,
        StateVector::new_zero(cfg.n_qubits())?,
        NoiseMode::Ideal,
    )
}

/// Outcome distribution of the noise-free cascade (exactly two outcomes).
pub fn ideal_distribution(cfg: &TreeConfig) -> Result<Distribution> {
    ideal_state(cfg)?.probabilities(0.0)
}

/// Exact outcome mixture under bit-flip noise, by enumerating every flip
/// pattern: `sum_patterns Pr(pattern) * |amplitudes|^2`.
pub fn exact_noisy_distribution(cfg: &TreeConfig) -> Result<Distribution> {
    cfg.validate()?;
    let circuit = build_tree_circuit(cfg)?;
    let sites = circuit.flip_site_count();
    let max_sites = 2 * ((1 << (MAX_ENUMERATION_LAYERS - 1)) - 1);
    if sites > max_sites {
        return Err(Error::EnumerationTooLarge {
            sites,
            max: max_sites,
        });
    }
    let dim = 1usize << cfg.n_qubits();
    let n_patterns = 1usize << sites;
    let p = cfg.flip_prob;

    // Accumulate per-pattern probability vectors chunk by chunk; chunks are
    // summed in index order so the result does not depend on scheduling.
    let chunk_size = 512;
    let chunks: Vec<Vec<f64>> = (0..n_patterns)
        .collect::<Vec<_>>()
        .par_chunks(chunk_size)
        .map(|patterns| {
            let mut acc = vec![0.0f64; dim];
            let mut pattern_bits = vec![false; sites];
            for &pattern in patterns {
                for (bit, flag) in pattern_bits.iter_mut().enumerate() {
                    *flag = pattern >> bit & 1 == 1;
                }
                let flips = pattern_bits.iter().filter(|&&b| b).count() as i32;
                let weight = p.powi(flips) * (1.0 - p).powi(sites as i32 - flips);
                if weight == 0.0 {
                    continue;
                }
                let state = StateVector::new_zero(cfg.n_qubits())
                    .and_then(|s| run_with_flip_pattern(&circuit, s, &pattern_bits))
                    .expect("validated configuration");
                for (a, b) in acc.iter_mut().zip(state.amplitudes()) {
                    *a += weight * b.norm_sqr();
                }
            }
            acc
        })
        .collect();

    let mut dense = vec![0.0f64; dim];
    for chunk in chunks {
        for (a, b) in dense.iter_mut().zip(chunk) {
            *a += b;
        }
    }

    let mut entries = BTreeMap::new();
    for (k, &prob) in dense.iter().enumerate() {
        if prob > 0.0 {
            entries.insert(index_to_bitstring(k, cfg.n_qubits()), prob);
        }
    }
    if entries.is_empty() {
        return Err(Error::EmptyDistribution { cutoff: 0.0 });
    }
    Ok(Distribution::from_entries(entries))
}

/// Monte-Carlo counterpart of [`exact_noisy_distribution`]: for each shot,
/// draw one flip pattern and one measurement outcome. Deterministic per
/// seed; all draws come from a single ChaCha stream.
pub fn sample_trajectories(
    cfg: &TreeConfig,
    shots: u64,
    seed: RngSeed,
) -> Result<BTreeMap<String, u64>> {
    cfg.validate()?;
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let circuit = build_tree_circuit(cfg)?;
    let sites = circuit.flip_site_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut pattern = vec![false; sites];
    for _ in 0..shots {
        for flag in pattern.iter_mut() {
            *flag = rng.random::<f64>() < cfg.flip_prob;
        }
        let state =
            run_with_flip_pattern(&circuit, StateVector::new_zero(cfg.n_qubits())?, &pattern)?;
        // Born draw via a single uniform against the cumulative weight.
        let u = rng.random::<f64>();
        let mut cum = 0.0;
        let mut outcome = 0usize;
        let mut last_nonzero = 0usize;
        let mut hit = false;
        for (k, a) in state.amplitudes().iter().enumerate() {
            let w = a.norm_sqr();
            if w == 0.0 {
                continue;
            }
            last_nonzero = k;
            cum += w;
            if u < cum {
                outcome = k;
                hit = true;
                break;
            }
        }
        if !hit {
            outcome = last_nonzero;
        }
        *counts
            .entry(index_to_bitstring(outcome, cfg.n_qubits()))
            .or_insert(0) += 1;
    }
    Ok(counts)
}

/// The mirror involution on outcome indices: complement every leaf bit,
/// leave the system and intermediate bits alone.
///
/// The cascade sends basis inputs to basis outputs, and for any fixed flip
/// pattern the two branches of the prepared superposition differ exactly by
/// an excitation that reaches every leaf; intermediate nodes are always
/// erased by their own block downstream. Complementing the leaf bits hence
/// exchanges the branch outcomes, which exchanges the roles of
/// `cos(theta/2)` and `sin(theta/2)` — i.e. maps the distribution at
/// `theta` onto the one at `pi - theta`. The brute-force pattern sweep in
/// the test suite establishes this map empirically.
pub fn mirror_image(cfg: &TreeConfig, index: usize) -> usize {
    let n = cfg.n_qubits();
    let mut leaf_mask = 0usize;
    for q in cfg.leaf_qubits() {
        leaf_mask |= 1 << (n - 1 - q);
    }
    index ^ leaf_mask
}

/// Largest deviation `|P_theta(s) - P_(pi-theta)(mirror(s))|` across the
/// union of both supports, using exact noisy distributions.
pub fn mirror_check(cfg: &TreeConfig) -> Result<f64> {
    let direct = exact_noisy_distribution(cfg)?;
    let reflected = exact_noisy_distribution(&TreeConfig {
        theta: std::f64::consts::PI - cfg.theta,
        ..*cfg
    })?;
    let n = cfg.n_qubits();
    let mut support = std::collections::BTreeSet::new();
    for (s, _) in direct.iter() {
        support.insert(bitstring_to_index(s, n)?);
    }
    for (s, _) in reflected.iter() {
        // pull the reflected support back through the involution
        support.insert(mirror_image(cfg, bitstring_to_index(s, n)?));
    }
    let mut max_dev: f64 = 0.0;
    for k in support {
        let here = index_to_bitstring(k, n);
        let there = index_to_bitstring(mirror_image(cfg, k), n);
        max_dev = max_dev.max((direct.probability(&here) - reflected.probability(&there)).abs());
    }
    Ok(max_dev)
}
