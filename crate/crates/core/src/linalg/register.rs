//! Qubit registers for `n` copies of a two-qubit state and the permutation
//! operators that act on them.
//!
//! Qubits are ordered copy-major, `a₁, b₁, a₂, b₂, …`, so that the register
//! of `n` copies is the literal tensor power `ρ ⊗ ρ ⊗ …`. Qubit 0 is the most
//! significant bit of a basis index.

use super::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    n_copies: usize,
}

impl RegisterLayout {
    pub fn new(n_copies: usize) -> Result<Self> {
        if !(1..=4).contains(&n_copies) {
            return Err(Error::UnsupportedCopies(n_copies));
        }
        Ok(Self { n_copies })
    }

    pub fn n_copies(&self) -> usize {
        self.n_copies
    }

    pub fn num_qubits(&self) -> usize {
        2 * self.n_copies
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits()
    }

    /// Qubit index of `a_m`, with copies labelled from 1.
    pub fn a(&self, copy: usize) -> usize {
        assert!(copy >= 1, "copies are labelled from 1");
        2 * (copy - 1)
    }

    /// Qubit index of `b_m`, with copies labelled from 1.
    pub fn b(&self, copy: usize) -> usize {
        assert!(copy >= 1, "copies are labelled from 1");
        2 * (copy - 1) + 1
    }
}

/// A permutation of computational basis states induced by permuting qubits.
///
/// `image[k]` is the basis index that `|k⟩` is sent to, so the operator has
/// a single 1 at `(image[k], k)` in every column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitPermutation {
    num_qubits: usize,
    image: Vec<usize>,
}

impl QubitPermutation {
    pub fn identity(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            image: (0..1usize << num_qubits).collect(),
        }
    }

    /// Exchanges qubits `i` and `j`.
    pub fn swap(num_qubits: usize, i: usize, j: usize) -> Result<Self> {
        for index in [i, j] {
            if index >= num_qubits {
                return Err(Error::QubitOutOfRange { index, num_qubits });
            }
        }
        if i == j {
            return Err(Error::SameQubit(i));
        }
        let bi = num_qubits - 1 - i;
        let bj = num_qubits - 1 - j;
        let image = (0..1usize << num_qubits)
            .map(|k| {
                let (vi, vj) = ((k >> bi) & 1, (k >> bj) & 1);
                if vi == vj {
                    k
                } else {
                    k ^ (1 << bi) ^ (1 << bj)
                }
            })
            .collect();
        Ok(Self { num_qubits, image })
    }

    /// Product of swaps, each given as a pair of qubit indices.
    pub fn swaps(num_qubits: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        pairs.iter().try_fold(Self::identity(num_qubits), |acc, &(i, j)| {
            Ok(acc.compose(&Self::swap(num_qubits, i, j)?))
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// Operator product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "compose dimension mismatch");
        Self {
            num_qubits: self.num_qubits,
            image: other.image.iter().map(|&k| self.image[k]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut image = vec![0; self.dim()];
        for (k, &to) in self.image.iter().enumerate() {
            image[to] = k;
        }
        Self {
            num_qubits: self.num_qubits,
            image,
        }
    }

    pub fn is_involution(&self) -> bool {
        self.image.iter().enumerate().all(|(k, &to)| self.image[to] == k)
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim());
        for (k, &to) in self.image.iter().enumerate() {
            m[(to, k)] = ONE;
        }
        m
    }

    /// `P · m`
    pub fn apply_left(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.check(m);
        let n = m.dim();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &to) in self.image.iter().enumerate() {
            for j in 0..n {
                out[(to, j)] = m[(k, j)];
            }
        }
        out
    }

    /// `m · P`
    pub fn apply_right(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.check(m);
        ComplexMatrix::from_fn(m.dim(), |i, j| m[(i, self.image[j])])
    }

    /// `P · m · P†`
    pub fn conjugate(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.check(m);
        let n = m.dim();
        let mut out = ComplexMatrix::zeros(n);
        for k in 0..n {
            for l in 0..n {
                out[(self.image[k], self.image[l])] = m[(k, l)];
            }
        }
        out
    }

    /// `tr(P · m)`
    pub fn trace_with(&self, m: &ComplexMatrix) -> num_complex::Complex64 {
        self.check(m);
        self.image
            .iter()
            .enumerate()
            .map(|(k, &to)| m[(k, to)])
            .fold(ZERO, |acc, z| acc + z)
    }

    fn check(&self, m: &ComplexMatrix) {
        assert_eq!(m.dim(), self.dim(), "permutation dimension mismatch");
    }
}

/// Dense matrix of the swap of qubits `i` and `j` on the given register.
pub fn swap_qubits(layout: RegisterLayout, i: usize, j: usize) -> Result<ComplexMatrix> {
    Ok(QubitPermutation::swap(layout.num_qubits(), i, j)?.to_matrix())
}
