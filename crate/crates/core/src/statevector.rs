//! Dense statevector over `n` qubits.
//!
//! Qubit 0 is the most significant bit of a basis index: for three qubits,
//! index 5 = 0b101 is |101⟩ with qubit 0 and qubit 2 set.

use num::complex::Complex64;
use num::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Mat4, Matrix};

pub const MAX_QUBITS: usize = 24;

/// Guards the collapse renormalisation against division by zero.
const PROBABILITY_FLOOR: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|basis_index⟩`.
    pub fn basis(num_qubits: usize, basis_index: usize) -> Result<Self> {
        if num_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "{num_qubits} qubits exceeds the supported maximum of {MAX_QUBITS}"
            )));
        }
        let dim = 1usize << num_qubits;
        if basis_index >= dim {
            return Err(Error::invalid(format!(
                "basis index {basis_index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::zero(); dim];
        amplitudes[basis_index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amplitudes })
    }

    /// Builds a state from raw amplitudes, normalising them.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::invalid(format!("amplitude count {len} is not a power of two")));
        }
        let num_qubits = len.trailing_zeros() as usize;
        let mut sv = StateVector { num_qubits, amplitudes };
        let norm = sv.norm();
        if norm == 0.0 {
            return Err(Error::invalid("zero vector is not a state"));
        }
        sv.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(sv)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::invalid(format!(
                "qubit {qubit} out of range for a {}-qubit state",
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// Applies a one- or two-qubit unitary to the given targets. For two
    /// qubits the first target is the more significant index of `u`.
    pub fn apply_unitary(&mut self, u: &Matrix, targets: &[usize]) -> Result<()> {
        if targets.len() != u.arity() {
            return Err(Error::invalid(format!(
                "{}-qubit matrix applied to {} targets",
                u.arity(),
                targets.len()
            )));
        }
        for &t in targets {
            self.check_qubit(t)?;
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::invalid("duplicate target qubits"));
        }
        if !u.is_unitary() {
            return Err(Error::ContractViolation(format!(
                "matrix is not unitary (defect {:.3e})",
                u.unitarity_defect()
            )));
        }
        match u {
            Matrix::One(m) => self.apply_1q(m, targets[0]),
            Matrix::Two(m) => self.apply_2q(m, targets[0], targets[1]),
        }
        Ok(())
    }

    /// Unchecked single-qubit application; the caller guarantees range and
    /// unitarity.
    pub(crate) fn apply_1q(&mut self, m: &Mat2, qubit: usize) {
        let mask = self.mask(qubit);
        let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let dim = self.amplitudes.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + mask {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | mask];
                self.amplitudes[i] = m00 * a0 + m01 * a1;
                self.amplitudes[i | mask] = m10 * a0 + m11 * a1;
            }
            base += mask << 1;
        }
    }

    pub(crate) fn apply_2q(&mut self, m: &Mat4, first: usize, second: usize) {
        let zero = Complex64::zero();
        let block_diagonal = (0..2).all(|r| (2..4).all(|c| m[(r, c)] == zero && m[(c, r)] == zero));
        if block_diagonal {
            // controlled form: independent 2×2 blocks on `second` for each
            // value of `first`
            let m1 = self.mask(first);
            let m2 = self.mask(second);
            let blocks = [
                [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]],
                [m[(2, 2)], m[(2, 3)], m[(3, 2)], m[(3, 3)]],
            ];
            let dim = self.amplitudes.len();
            let mut base = 0;
            while base < dim {
                for i in base..base + m2 {
                    let [b00, b01, b10, b11] = blocks[(i & m1 != 0) as usize];
                    let a0 = self.amplitudes[i];
                    let a1 = self.amplitudes[i | m2];
                    self.amplitudes[i] = b00 * a0 + b01 * a1;
                    self.amplitudes[i | m2] = b10 * a0 + b11 * a1;
                }
                base += m2 << 1;
            }
            return;
        }
        let (m1, m2) = (self.mask(first), self.mask(second));
        for i in 0..self.amplitudes.len() {
            if i & (m1 | m2) != 0 {
                continue;
            }
            let idx = [i, i | m2, i | m1, i | m1 | m2];
            let a = idx.map(|k| self.amplitudes[k]);
            for (r, &k) in idx.iter().enumerate() {
                self.amplitudes[k] = m[(r, 0)] * a[0] + m[(r, 1)] * a[1] + m[(r, 2)] * a[2] + m[(r, 3)] * a[3];
            }
        }
    }

    /// Ideal Pauli X, used for channel errors and resets.
    pub(crate) fn flip(&mut self, qubit: usize) {
        let mask = self.mask(qubit);
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                self.amplitudes.swap(i, i | mask);
            }
        }
    }

    /// Probability of reading 1 on `qubit`.
    pub fn probability_one(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// `⟨Z⟩` on one qubit.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        let (mut p0, mut p1) = (0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            if i & mask == 0 {
                p0 += a.norm_sqr();
            } else {
                p1 += a.norm_sqr();
            }
        }
        Ok((p0 - p1) / (p0 + p1))
    }

    /// Projective Z measurement with Born-rule sampling.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<bool> {
        self.measure_z_with(qubit, |p1| rng.random::<f64>() < p1)
    }

    /// Projective Z measurement where `choose` receives the Born
    /// probability of outcome 1 and picks the outcome. Choosing an outcome
    /// of zero probability is an internal error.
    pub fn measure_z_with(&mut self, qubit: usize, choose: impl FnOnce(f64) -> bool) -> Result<bool> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        let (mut p0, mut p1) = (0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            if i & mask == 0 {
                p0 += a.norm_sqr();
            } else {
                p1 += a.norm_sqr();
            }
        }
        let total = p0 + p1;
        if total <= PROBABILITY_FLOOR {
            return Err(Error::Internal("measurement on a zero-norm state".into()));
        }
        let prob_one = (p1 / total).clamp(0.0, 1.0);
        let outcome = choose(prob_one);
        let p = if outcome { p1 } else { p0 };
        if p <= 0.0 {
            return Err(Error::Internal(format!(
                "selected measurement outcome {} has zero probability",
                outcome as u8
            )));
        }
        let scale = 1.0 / p.max(PROBABILITY_FLOOR).sqrt();
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if ((i & mask) != 0) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::zero();
            }
        }
        Ok(outcome)
    }

    /// Appends a fresh qubit in |0⟩ as the new least significant qubit.
    pub fn push_qubit(&mut self) -> Result<usize> {
        if self.num_qubits >= MAX_QUBITS {
            return Err(Error::invalid(format!("cannot grow past {MAX_QUBITS} qubits")));
        }
        let len = self.amplitudes.len();
        self.amplitudes.resize(len * 2, Complex64::zero());
        for i in (0..len).rev() {
            self.amplitudes[i << 1] = self.amplitudes[i];
            self.amplitudes[(i << 1) | 1] = Complex64::zero();
        }
        self.num_qubits += 1;
        Ok(self.num_qubits - 1)
    }

    /// Removes a qubit that is in a product state with the rest. Qubits
    /// after it shift down by one. The remaining state is renormalised;
    /// its global phase is arbitrary.
    pub fn remove_product_qubit(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        if self.num_qubits == 1 {
            return Err(Error::invalid("cannot remove the last qubit"));
        }
        let shift = self.num_qubits - 1 - qubit;
        let low_mask = (1usize << shift) - 1;
        let half = self.amplitudes.len() / 2;
        let index = |j: usize, bit: usize| ((j & !low_mask) << 1) | (bit << shift) | (j & low_mask);
        let (mut n0, mut n1) = (0.0, 0.0);
        for j in 0..half {
            n0 += self.amplitudes[index(j, 0)].norm_sqr();
            n1 += self.amplitudes[index(j, 1)].norm_sqr();
        }
        let (bit, n) = if n0 >= n1 { (0, n0) } else { (1, n1) };
        if n <= PROBABILITY_FLOOR {
            return Err(Error::Internal("removing a qubit from a zero-norm state".into()));
        }
        let scale = 1.0 / n.sqrt();
        // index(j, bit) >= j, so compacting in increasing j never
        // overwrites an unread entry
        for j in 0..half {
            self.amplitudes[j] = self.amplitudes[index(j, bit)] * scale;
        }
        self.amplitudes.truncate(half);
        self.num_qubits -= 1;
        Ok(())
    }
}
