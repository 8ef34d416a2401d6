//! Eigensolvers for small dense matrices.
//!
//! * Hermitian: cyclic Jacobi rotations, run independently on each block of
//!   the sparsity pattern (permutation-built operators split into many tiny
//!   blocks).
//! * General 4×4: Householder reduction to Hessenberg form followed by
//!   Wilkinson-shifted QR sweeps. Eigenvalue sums match the trace to 1e-8.
//! * Singular values: one-sided (Hestenes) Jacobi, which keeps small singular
//!   values accurate in absolute terms.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use super::{ComplexMatrix, HERMITIAN_TOL, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.dim()).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigh(m)?.values)
}

pub fn hermitian_eigh(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian(deviation));
    }
    let n = m.dim();
    let half = Complex64::new(0.5, 0.0);
    let sym = ComplexMatrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * half);

    let mut pairs: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(n);
    for block in connected_blocks(&sym) {
        let k = block.len();
        let mut a: Vec<Complex64> = Vec::with_capacity(k * k);
        for &i in &block {
            for &j in &block {
                a.push(sym[(i, j)]);
            }
        }
        let (values, vectors) = jacobi(k, a)?;
        for (col, value) in values.into_iter().enumerate() {
            let mut v = vec![ZERO; n];
            for (row, &i) in block.iter().enumerate() {
                v[i] = vectors[row * k + col];
            }
            pairs.push((value, v));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut vectors = ComplexMatrix::zeros(n);
    for (col, (_, v)) in pairs.iter().enumerate() {
        for (row, z) in v.iter().enumerate() {
            vectors[(row, col)] = *z;
        }
    }
    Ok(HermitianEigen {
        values: pairs.into_iter().map(|(value, _)| value).collect(),
        vectors,
    })
}

/// Index sets of the connected components of the nonzero pattern.
fn connected_blocks(m: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = m.dim();
    let mut seen = vec![false; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut block = vec![start];
        let mut cursor = 0;
        while cursor < block.len() {
            let i = block[cursor];
            cursor += 1;
            for j in 0..n {
                if !seen[j] && (m[(i, j)] != ZERO || m[(j, i)] != ZERO) {
                    seen[j] = true;
                    block.push(j);
                }
            }
        }
        block.sort_unstable();
        blocks.push(block);
    }
    blocks
}

/// Cyclic Jacobi on a row-major Hermitian `n×n` block. Returns eigenvalues and
/// row-major eigenvector columns.
fn jacobi(n: usize, mut a: Vec<Complex64>) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = ONE;
    }
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let off = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > 1e-15 * scale {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[p * n + q];
                let r = g.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = (g / r).conj();
                let alpha = a[p * n + p].re;
                let beta = a[q * n + q].re;
                let theta = (beta - alpha) / (2.0 * r);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let (vpp, vpq) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
                let (vqp, vqq) = (phase * -s, phase * c);

                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = akp * vpp + akq * vqp;
                    a[k * n + q] = akp * vpq + akq * vqq;
                    let (wkp, wkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = wkp * vpp + wkq * vqp;
                    v[k * n + q] = wkp * vpq + wkq * vqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = vpp.conj() * apk + vqp.conj() * aqk;
                    a[q * n + k] = vpq.conj() * apk + vqq.conj() * aqk;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
            }
        }
    }
    Ok(((0..n).map(|i| a[i * n + i].re).collect(), v))
}

/// Eigenvalues of a general (non-Hermitian) 4×4 matrix, sorted by real part
/// then imaginary part.
pub fn eig4_general(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: m.dim(),
        });
    }
    let mut values = general_eigenvalues(m)?;
    values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(values)
}

fn general_eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = m.dim();
    let mut h: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect();
    hessenberg(&mut h);

    let norm = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut values = Vec::with_capacity(n);
    let mut hi = n as isize - 1;
    let mut iterations = 0;
    while hi >= 0 {
        let top = hi as usize;
        if top == 0 {
            values.push(h[0][0]);
            break;
        }
        // Start of the unreduced block ending at `top`.
        let mut lo = top;
        while lo > 0 {
            let sub = h[lo][lo - 1].norm();
            let diag = h[lo][lo].norm() + h[lo - 1][lo - 1].norm();
            let reference = if diag == 0.0 { norm } else { diag };
            if sub <= f64::EPSILON * reference {
                h[lo][lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == top {
            values.push(h[top][top]);
            hi -= 1;
            iterations = 0;
            continue;
        }
        if lo + 1 == top {
            let (l1, l2) = eig2(h[lo][lo], h[lo][top], h[top][lo], h[top][top]);
            values.push(l1);
            values.push(l2);
            hi -= 2;
            iterations = 0;
            continue;
        }

        iterations += 1;
        if iterations > 200 {
            return Err(Error::NoConvergence(iterations));
        }
        let shift = if iterations % 11 == 0 {
            // exceptional shift to break cycles
            h[top][top] + Complex64::new(0.75 * h[top][top - 1].norm(), 0.0)
        } else {
            let (l1, l2) = eig2(h[top - 1][top - 1], h[top - 1][top], h[top][top - 1], h[top][top]);
            if (l1 - h[top][top]).norm() <= (l2 - h[top][top]).norm() {
                l1
            } else {
                l2
            }
        };
        qr_step(&mut h, lo, top, shift);
    }
    Ok(values)
}

fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half_trace = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let root = (half_diff * half_diff + b * c).sqrt();
    (half_trace + root, half_trace - root)
}

fn hessenberg(h: &mut [Vec<Complex64>]) {
    let n = h.len();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[i][k]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0] == ZERO { ONE } else { x[0] / x[0].norm() };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        for col in 0..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi.conj() * h[k + 1 + i][col])
                .sum();
            for (i, vi) in v.iter().enumerate() {
                h[k + 1 + i][col] -= vi * s * 2.0;
            }
        }
        for row in h.iter_mut() {
            let s: Complex64 = v.iter().enumerate().map(|(j, vj)| row[k + 1 + j] * vj).sum();
            for (j, vj) in v.iter().enumerate() {
                row[k + 1 + j] -= s * vj.conj() * 2.0;
            }
        }
    }
}

/// One shifted QR sweep on the Hessenberg window `lo..=hi`.
fn qr_step(h: &mut [Vec<Complex64>], lo: usize, hi: usize, shift: Complex64) {
    for k in lo..=hi {
        h[k][k] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[k][k], h[k + 1][k]);
        for col in k..=hi {
            let (x, y) = (h[k][col], h[k + 1][col]);
            h[k][col] = x * c + s * y;
            h[k + 1][col] = -s.conj() * x + y * c;
        }
        rotations.push((c, s));
    }
    for (offset, (c, s)) in rotations.into_iter().enumerate() {
        let k = lo + offset;
        for row in h.iter_mut().take((k + 2).min(hi) + 1).skip(lo) {
            let (x, y) = (row[k], row[k + 1]);
            row[k] = x * c + y * s.conj();
            row[k + 1] = -x * s + y * c;
        }
    }
    for k in lo..=hi {
        h[k][k] += shift;
    }
}

/// Rotation `[[c, s], [−s̄, c]]` with real `c` that zeroes `b` in `(a, b)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| m[(i, j)]).collect()).collect();
    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[i].iter().zip(&cols[j]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let x = cols[i][k];
                    let y = cols[j][k] * phase;
                    cols[i][k] = x * c - y * s;
                    cols[j][k] = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
    }
    let mut values: Vec<f64> = cols
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}
