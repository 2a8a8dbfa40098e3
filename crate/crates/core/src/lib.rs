//! Simulation and optimization toolkit for entanglement-based qubit
//! measurement models.
//!
//! Two models of dispersing a qubit's state onto a many-qubit measurement
//! register are covered, both at full state-vector fidelity on desk-scale
//! registers (up to [`statevector::MAX_QUBITS`] qubits):
//!
//! * **Tree network** ([`tree`]): a binary tree of CNOT-CNOT-Toffoli
//!   blocks copies the system qubit's excitation onto the leaf layer,
//!   optionally with independent bit-flip noise after every block. An
//!   independent Hamiltonian pulse evolution ([`hamiltonian`]) cross-checks
//!   the circuit picture.
//! * **Spin register** ([`spin`]): a variational circuit of `ZZ` phase
//!   layers and `X` rotations steers a transverse-field register toward the
//!   degenerate ground manifold of a ferromagnetic Ising coupling graph,
//!   amplifying the system qubit's state into a macroscopic pointer state.
//!   A derivative-free optimizer ([`optimizer`]) trains the layer angles.
//!
//! [`statevector`] holds the amplitude representation and gate kernels;
//! [`gates`] the instruction set and circuit runner.

pub mod error;
pub mod gates;
pub mod hamiltonian;
pub mod optimizer;
pub mod spin;
pub mod statevector;
pub mod tree;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use statevector::{Distribution, RngSeed, StateVector};
