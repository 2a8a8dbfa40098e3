//! Dense state-vector representation and the gate kernels that act on it.
//!
//! A register of `n` qubits is stored as `2^n` complex amplitudes. Qubit 0
//! is the *system* qubit and is rendered leftmost in bitstrings, so basis
//! index `k` encodes qubit `i` in bit position `n - 1 - i`:
//!
//! ```text
//! |b0 b1 .. b(n-1)>   <->   k = b0 * 2^(n-1) + b1 * 2^(n-2) + .. + b(n-1)
//! ```
//!
//! e.g. `"100"` on three qubits is index 4. All public kernels take logical
//! qubit indices and perform the bit translation internally.
//!
//! Kernels update amplitudes in place. The generic entry points
//! ([`StateVector::apply_1q`], [`StateVector::apply_controlled`],
//! [`StateVector::apply_2q_diagonal`]) accept arbitrary matrices/phases;
//! the crate-internal specialized kernels (`apply_ry`, `apply_h`, ...) are
//! algebraically identical but shaped for the compiler's vectorizer, since
//! deep variational circuits stream the full vector hundreds of times per
//! energy evaluation.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest supported register; 2^24 amplitudes = 256 MiB of f64 pairs.
pub const MAX_QUBITS: usize = 24;

/// A 2x2 complex matrix in row-major order: `u[row][col]`.
pub type Mat2 = [[Complex64; 2]; 2];

/// Seed for every reproducible random choice in the crate.
///
/// The same seed with the same inputs always yields bit-identical results;
/// all randomness flows through counter-based ChaCha streams seeded from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed(seed)
    }
}

/// Sparse probability-by-bitstring view of a state, sorted by bitstring.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct Distribution {
    entries: BTreeMap<String, f64>,
}

impl Distribution {
    pub(crate) fn from_entries(entries: BTreeMap<String, f64>) -> Self {
        Distribution { entries }
    }

    /// Probability of `bitstring`, zero when absent.
    pub fn probability(&self, bitstring: &str) -> f64 {
        self.entries.get(bitstring).copied().unwrap_or(0.0)
    }

    /// Sum of all retained probabilities (1 up to cutoff truncation).
    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Outcome with the largest probability.
    pub fn dominant(&self) -> Option<(&str, f64)> {
        self.entries
            .iter()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(s, &p)| (s.as_str(), p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(s, &p)| (s.as_str(), p))
    }

    pub fn entries(&self) -> &BTreeMap<String, f64> {
        &self.entries
    }
}

/// Dense `2^n`-amplitude state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Render basis index `index` as a bitstring with qubit 0 leftmost.
pub fn index_to_bitstring(index: usize, n_qubits: usize) -> String {
    format!("{index:0n_qubits$b}")
}

/// Parse a bitstring (qubit 0 leftmost) into a basis index.
pub fn bitstring_to_index(bits: &str, n_qubits: usize) -> Result<usize> {
    let malformed = || Error::Bitstring {
        s: bits.to_string(),
        n: n_qubits,
    };
    if bits.len() != n_qubits || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(malformed());
    }
    usize::from_str_radix(bits, 2).map_err(|_| malformed())
}

fn check_qubit_count(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::QubitCount {
            n: n_qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn new_zero(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[0] = Complex64::ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// Basis state for a bitstring such as `"0001111"`.
    pub fn new_basis_state(n_qubits: usize, bits: &str) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let index = bitstring_to_index(bits, n_qubits)?;
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[index] = Complex64::ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// Wrap raw amplitudes; the caller owns normalization.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::AmplitudeCount {
                expected: 1 << n_qubits,
                actual: amps.len(),
            });
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// Squared norm `<psi|psi>`.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Fail when `|<psi|psi> - 1|` exceeds `tol`.
    pub fn check_norm(&self, tol: f64) -> Result<()> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > tol {
            return Err(Error::NormDrift { norm, tol });
        }
        Ok(())
    }

    /// `<self|other>` (conjugate-linear in `self`).
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                circuit: self.n_qubits,
                state: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Marginal probability that `qubit` reads 1.
    pub fn prob_of_one(&self, qubit: usize) -> Result<f64> {
        let mask = self.mask(qubit)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(k, _)| k & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Index bit mask of a logical qubit (qubit 0 is the top bit).
    fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(1 << (self.n_qubits - 1 - qubit))
    }

    /// Apply an arbitrary one-qubit matrix `u` to `qubit`.
    pub fn apply_1q(&mut self, qubit: usize, u: &Mat2) -> Result<()> {
        let step = self.mask(qubit)?;
        let [[u00, u01], [u10, u11]] = *u;
        for block in self.amps.chunks_exact_mut(step << 1) {
            let (lo, hi) = block.split_at_mut(step);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = u00 * x + u01 * y;
                *b = u10 * x + u11 * y;
            }
        }
        Ok(())
    }

    /// Apply `u` to `target` on the subspace where every qubit in
    /// `controls` reads 1 (CNOT/Toffoli with `u = X`, and generalizations).
    pub fn apply_controlled(&mut self, controls: &[usize], target: usize, u: &Mat2) -> Result<()> {
        let tmask = self.mask(target)?;
        let mut cmask = 0usize;
        for &c in controls {
            cmask |= self.mask(c)?;
        }
        let mut seen: Vec<usize> = controls.to_vec();
        seen.push(target);
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicateQubits(seen));
        }
        let [[u00, u01], [u10, u11]] = *u;
        for k in 0..self.amps.len() {
            if k & cmask == cmask && k & tmask == 0 {
                let (x, y) = (self.amps[k], self.amps[k | tmask]);
                self.amps[k] = u00 * x + u01 * y;
                self.amps[k | tmask] = u10 * x + u11 * y;
            }
        }
        Ok(())
    }

    /// Multiply each amplitude by `phases[(b_a << 1) | b_b]` where `b_a`,
    /// `b_b` are the values of `qubit_a` and `qubit_b` in that basis state.
    pub fn apply_2q_diagonal(
        &mut self,
        qubit_a: usize,
        qubit_b: usize,
        phases: &[Complex64; 4],
    ) -> Result<()> {
        let ma = self.mask(qubit_a)?;
        let mb = self.mask(qubit_b)?;
        if qubit_a == qubit_b {
            return Err(Error::DuplicateQubits(vec![qubit_a, qubit_b]));
        }
        for (k, a) in self.amps.iter_mut().enumerate() {
            let idx = usize::from(k & ma != 0) << 1 | usize::from(k & mb != 0);
            *a *= phases[idx];
        }
        Ok(())
    }

    // --- specialized in-place kernels used by the circuit runner ---
    //
    // Each is the generic kernel above with the matrix structure folded in;
    // plain-f64 component arithmetic with mul_add keeps the loops vector-
    // friendly. Equivalence with the generic path is pinned by unit tests.

    /// Real rotation `[[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]`.
    pub(crate) fn apply_ry(&mut self, qubit: usize, theta: f64) -> Result<()> {
        let step = self.mask(qubit)?;
        let (s, c) = (theta / 2.0).sin_cos();
        for block in self.amps.chunks_exact_mut(step << 1) {
            let (lo, hi) = block.split_at_mut(step);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = Complex64::new(c.mul_add(x.re, -s * y.re), c.mul_add(x.im, -s * y.im));
                *b = Complex64::new(s.mul_add(x.re, c * y.re), s.mul_add(x.im, c * y.im));
            }
        }
        Ok(())
    }

    pub(crate) fn apply_h(&mut self, qubit: usize) -> Result<()> {
        let step = self.mask(qubit)?;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for block in self.amps.chunks_exact_mut(step << 1) {
            let (lo, hi) = block.split_at_mut(step);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = Complex64::new(r * (x.re + y.re), r * (x.im + y.im));
                *b = Complex64::new(r * (x.re - y.re), r * (x.im - y.im));
            }
        }
        Ok(())
    }

    pub(crate) fn apply_x(&mut self, qubit: usize) -> Result<()> {
        let step = self.mask(qubit)?;
        for block in self.amps.chunks_exact_mut(step << 1) {
            let (lo, hi) = block.split_at_mut(step);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                std::mem::swap(a, b);
            }
        }
        Ok(())
    }

    /// `cos(beta) I + i sin(beta) X` — a full-angle X rotation.
    pub(crate) fn apply_xrot(&mut self, qubit: usize, beta: f64) -> Result<()> {
        let step = self.mask(qubit)?;
        let (s, c) = beta.sin_cos();
        for block in self.amps.chunks_exact_mut(step << 1) {
            let (lo, hi) = block.split_at_mut(step);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = Complex64::new(c.mul_add(x.re, -s * y.im), c.mul_add(x.im, s * y.re));
                *b = Complex64::new(c.mul_add(y.re, -s * x.im), c.mul_add(y.im, s * x.re));
            }
        }
        Ok(())
    }

    /// `exp(i gamma Z.Z)`: phase `e^{+i gamma}` where the two bits agree,
    /// `e^{-i gamma}` where they differ.
    pub(crate) fn apply_zz(&mut self, qubit_a: usize, qubit_b: usize, gamma: f64) -> Result<()> {
        let ma = self.mask(qubit_a)?;
        let mb = self.mask(qubit_b)?;
        if qubit_a == qubit_b {
            return Err(Error::DuplicateQubits(vec![qubit_a, qubit_b]));
        }
        let (s, c) = gamma.sin_cos();
        let (blo, bhi) = (ma.min(mb), ma.max(mb));
        let n = self.amps.len();
        // Walk aligned blocks of `bhi` amplitudes (constant high bit), and
        // within them runs of `blo` amplitudes (constant low bit); inside a
        // run the phase is fixed and the loop is a plain complex scale.
        let mut base = 0;
        while base < n {
            let hi_bit = base & bhi != 0;
            let block_end = base + bhi;
            let mut run = base;
            while run < block_end {
                let lo_bit = run & blo != 0;
                let sg = if hi_bit == lo_bit { s } else { -s };
                for a in &mut self.amps[run..run + blo] {
                    let x = *a;
                    *a = Complex64::new(c.mul_add(x.re, -sg * x.im), c.mul_add(x.im, sg * x.re));
                }
                run += blo;
            }
            base = block_end;
        }
        Ok(())
    }

    /// Probabilities of every basis state whose weight is nonzero and at
    /// least `cutoff`, keyed by bitstring.
    pub fn probabilities(&self, cutoff: f64) -> Result<Distribution> {
        if !(0.0..=1.0).contains(&cutoff) {
            return Err(Error::Parameter {
                name: "cutoff",
                value: cutoff,
                reason: "must lie in [0, 1]",
            });
        }
        let mut entries = BTreeMap::new();
        for (k, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 && p >= cutoff {
                entries.insert(index_to_bitstring(k, self.n_qubits), p);
            }
        }
        if entries.is_empty() {
            return Err(Error::EmptyDistribution { cutoff });
        }
        Ok(Distribution::from_entries(entries))
    }

    /// Draw `shots` independent measurement outcomes in the computational
    /// basis. Deterministic for a given seed.
    pub fn sample(&self, shots: u64, seed: RngSeed) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
        // Sort the uniform draws once, then sweep the cumulative weight in a
        // single pass: O(dim + shots log shots) and no dim-sized scratch.
        let mut draws: Vec<f64> = (0..shots).map(|_| rng.random::<f64>()).collect();
        draws.sort_by(f64::total_cmp);

        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        let mut cum = 0.0;
        let mut next = 0usize;
        let mut last_nonzero = None;
        for (k, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            last_nonzero = Some(k);
            cum += p;
            let start = next;
            while next < draws.len() && draws[next] < cum {
                next += 1;
            }
            if next > start {
                *counts
                    .entry(index_to_bitstring(k, self.n_qubits))
                    .or_insert(0) += (next - start) as u64;
            }
        }
        // Roundoff can leave cum marginally below the final draws; those
        // shots belong to the last outcome with support.
        if next < draws.len() {
            if let Some(k) = last_nonzero {
                *counts
                    .entry(index_to_bitstring(k, self.n_qubits))
                    .or_insert(0) += (draws.len() - next) as u64;
            }
        }
        Ok(counts)
    }
}
