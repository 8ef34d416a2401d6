//! Local-unitary invariants of a two-qubit state and the moments they fix.
//!
//! The state is expanded as
//! `ρ = ¼(σ₀⊗σ₀ + Σ sᵢ σᵢ⊗σ₀ + Σ pⱼ σ₀⊗σⱼ + Σ βᵢⱼ σᵢ⊗σⱼ)` with
//! `sᵢ = tr[(σᵢ⊗σ₀)ρ]`, `pⱼ = tr[(σ₀⊗σⱼ)ρ]` and `βᵢⱼ = tr[(σᵢ⊗σⱼ)ρ]`.
//! Nine polynomial invariants of `(s, p, β)` determine every moment of `ρ^Γ`,
//! but only through six combinations `y₁ … y₆`.

use serde::{Deserialize, Serialize};

use crate::linalg::{pauli, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::witness::{MomentSet, MomentSource};

type Vec3 = [f64; 3];
type Mat3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochDecomposition {
    /// Local Bloch vector of subsystem `a`.
    pub s: Vec3,
    /// Local Bloch vector of subsystem `b`.
    pub p: Vec3,
    /// Correlation matrix.
    pub beta: Mat3,
}

pub fn decompose(rho: &DensityMatrix) -> BlochDecomposition {
    let m = rho.matrix();
    let expect = |i: usize, j: usize| pauli(i).kron(&pauli(j)).trace_of_product(m).re;
    let mut out = BlochDecomposition {
        s: [0.0; 3],
        p: [0.0; 3],
        beta: [[0.0; 3]; 3],
    };
    for i in 0..3 {
        out.s[i] = expect(i + 1, 0);
        out.p[i] = expect(0, i + 1);
        for j in 0..3 {
            out.beta[i][j] = expect(i + 1, j + 1);
        }
    }
    out
}

impl BlochDecomposition {
    /// Rebuilds `ρ` from the Pauli expansion.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut acc = pauli(0).kron(&pauli(0));
        for i in 0..3 {
            acc = &acc + &pauli(i + 1).kron(&pauli(0)).scale_real(self.s[i]);
            acc = &acc + &pauli(0).kron(&pauli(i + 1)).scale_real(self.p[i]);
            for j in 0..3 {
                acc = &acc + &pauli(i + 1).kron(&pauli(j + 1)).scale_real(self.beta[i][j]);
            }
        }
        acc.scale_real(0.25)
    }
}

/// The nine invariants `I₁ … I₁₄` with the derived `x` and `y` combinations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantSet {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub i5: f64,
    pub i7: f64,
    pub i8: f64,
    pub i12: f64,
    pub i14: f64,
    /// `x₁ = I₂+I₄+I₇`, `x₂ = I₁+I₁₂`, `x₃ = I₂²−I₃`, `x₄ = I₅+I₈+I₁₄+I₄I₇`
    pub x: [f64; 4],
    /// `y = (I₂, I₃, I₄, I₇, I₁+I₁₂, I₅+I₈+I₁₄)`
    pub y: [f64; 6],
}

impl InvariantSet {
    pub fn nine(&self) -> [f64; 9] {
        [
            self.i1, self.i2, self.i3, self.i4, self.i5, self.i7, self.i8, self.i12, self.i14,
        ]
    }
}

fn dot(u: &Vec3, v: &Vec3) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

pub fn makhlin(b: &BlochDecomposition) -> InvariantSet {
    let beta = &b.beta;
    // βᵀβ
    let mut btb = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            btb[i][j] = (0..3).map(|k| beta[k][i] * beta[k][j]).sum();
        }
    }
    let s_beta: Vec3 = std::array::from_fn(|j| (0..3).map(|i| b.s[i] * beta[i][j]).sum());
    let beta_p: Vec3 = std::array::from_fn(|i| (0..3).map(|j| beta[i][j] * b.p[j]).sum());

    let i1 = det3(beta);
    let i2 = (0..3).map(|i| btb[i][i]).sum();
    let i3 = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| btb[i][j] * btb[j][i])
        .sum();
    let i4 = dot(&b.s, &b.s);
    let i5 = dot(&s_beta, &s_beta);
    let i7 = dot(&b.p, &b.p);
    let i8 = dot(&beta_p, &beta_p);
    let i12 = dot(&b.s, &beta_p);

    let mut i14 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let eijk = levi_civita(i, j, k);
                if eijk == 0.0 {
                    continue;
                }
                for l in 0..3 {
                    for m in 0..3 {
                        for n in 0..3 {
                            let elmn = levi_civita(l, m, n);
                            if elmn != 0.0 {
                                i14 += eijk * elmn * b.s[i] * b.p[l] * beta[j][m] * beta[k][n];
                            }
                        }
                    }
                }
            }
        }
    }

    let x = [i2 + i4 + i7, i1 + i12, i2 * i2 - i3, i5 + i8 + i14 + i4 * i7];
    let y = [i2, i3, i4, i7, i1 + i12, i5 + i8 + i14];
    InvariantSet {
        i1,
        i2,
        i3,
        i4,
        i5,
        i7,
        i8,
        i12,
        i14,
        x,
        y,
    }
}

/// Moments of `ρ^Γ` from the six combinations alone:
///
/// ```text
/// 4Π₂  = 1 + x₁
/// 16Π₃ = 1 + 3x₁ + 6x₂
/// 64Π₄ = 1 + 6x₁ + 24x₂ + x₁² + 2x₃ + 4x₄
/// ```
///
/// with the `x` rebuilt from `y`.
pub fn moments_from_invariants(inv: &InvariantSet) -> MomentSet {
    moments_from_y(&inv.y)
}

pub fn moments_from_y(y: &[f64; 6]) -> MomentSet {
    let [y1, y2, y3, y4, y5, y6] = *y;
    let x1 = y1 + y3 + y4;
    let x2 = y5;
    let x3 = y1 * y1 - y2;
    let x4 = y6 + y3 * y4;
    MomentSet::new(
        (1.0 + x1) / 4.0,
        (1.0 + 3.0 * x1 + 6.0 * x2) / 16.0,
        (1.0 + 6.0 * x1 + 24.0 * x2 + x1 * x1 + 2.0 * x3 + 4.0 * x4) / 64.0,
        MomentSource::Invariants,
    )
}

/// `moments_from_invariants(makhlin(decompose(ρ)))`
pub fn moments_via_invariants(rho: &DensityMatrix) -> MomentSet {
    moments_from_invariants(&makhlin(&decompose(rho)))
}
