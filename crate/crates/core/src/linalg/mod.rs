//! Dense complex matrices sized for up to eight qubits (dimension 256).
//!
//! Storage is row-major. Nothing here enforces Hermiticity or unitarity;
//! callers check those properties where they matter.

mod eigen;
mod register;

pub use eigen::{eig4_general, hermitian_eig, hermitian_eigh, singular_values, HermitianEigen};
pub use register::{swap_qubits, QubitPermutation, RegisterLayout};

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Entry tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

/// Dimensions of the two factors of a bipartite space, `A ⊗ B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bipartition {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl Bipartition {
    pub const TWO_QUBITS: Bipartition = Bipartition { dim_a: 2, dim_b: 2 };

    pub fn new(dim_a: usize, dim_b: usize) -> Self {
        Self { dim_a, dim_b }
    }

    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::EntryCount {
                dim,
                len: entries.len(),
                expected: dim * dim,
            });
        }
        Ok(Self { dim, entries })
    }

    /// Builds a matrix from separate real and imaginary row-major parts.
    pub fn from_parts(dim: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch {
                expected: re.len(),
                actual: im.len(),
            });
        }
        let entries = re
            .iter()
            .zip(im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        Self::new(dim, entries)
    }

    pub fn from_real(dim: usize, re: &[f64]) -> Result<Self> {
        Self::new(dim, re.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// `|v⟩⟨v|`
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.re).collect()
    }

    pub fn imag_parts(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.im).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.entries[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Self {
            dim: n,
            entries: out,
        }
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim, "trace_of_product dimension mismatch");
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.entries[i * n + k] * other.entries[k * n + i];
            }
        }
        acc
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut out = Self::identity(self.dim);
        for _ in 0..exponent {
            out = out.matmul(self);
        }
        out
    }

    /// `[self, other] = self·other − other·self`
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry deviation `|m_ij − conj(m_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Tensor product `self ⊗ other`; the first factor holds the more
    /// significant index.
    pub fn kron(&self, other: &Self) -> Self {
        let (m, n) = (self.dim, other.dim);
        let dim = m * n;
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..m {
            for j in 0..m {
                let a = self.entries[i * m + j];
                if a == ZERO {
                    continue;
                }
                for k in 0..n {
                    let row = (i * n + k) * dim + j * n;
                    for l in 0..n {
                        entries[row + l] = a * other.entries[k * n + l];
                    }
                }
            }
        }
        Self { dim, entries }
    }

    /// `self^{⊗n}`
    pub fn tensor_power(&self, n: usize) -> Self {
        assert!(n >= 1, "tensor power needs at least one factor");
        let mut out = self.clone();
        for _ in 1..n {
            out = out.kron(self);
        }
        out
    }

    /// Transposes the indices of the second factor of `parts`.
    pub fn partial_transpose(&self, parts: Bipartition) -> Result<Self> {
        self.check_bipartition(parts)?;
        let db = parts.dim_b;
        Ok(Self::from_fn(self.dim, |row, col| {
            let (i, k) = (row / db, row % db);
            let (j, l) = (col / db, col % db);
            self[(i * db + l, j * db + k)]
        }))
    }

    /// Traces out the second factor, leaving an operator on the first.
    pub fn partial_trace_second(&self, parts: Bipartition) -> Result<Self> {
        self.check_bipartition(parts)?;
        let db = parts.dim_b;
        Ok(Self::from_fn(parts.dim_a, |i, j| {
            (0..db).map(|k| self[(i * db + k, j * db + k)]).sum()
        }))
    }

    /// Traces out the first factor, leaving an operator on the second.
    pub fn partial_trace_first(&self, parts: Bipartition) -> Result<Self> {
        self.check_bipartition(parts)?;
        let db = parts.dim_b;
        Ok(Self::from_fn(db, |k, l| {
            (0..parts.dim_a).map(|i| self[(i * db + k, i * db + l)]).sum()
        }))
    }

    fn check_bipartition(&self, parts: Bipartition) -> Result<()> {
        if parts.total() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: parts.total(),
                actual: self.dim,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// The Pauli matrices `σ₀ = I, σ₁ = X, σ₂ = Y, σ₃ = Z`.
pub fn pauli(index: usize) -> ComplexMatrix {
    let i = Complex64::i();
    let e = match index {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -i, i, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => panic!("Pauli index {index} out of range"),
    };
    ComplexMatrix {
        dim: 2,
        entries: e.to_vec(),
    }
}
