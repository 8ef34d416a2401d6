//! Moments of the partial transpose, the four-copy witness, negativity,
//! concurrence, and the bounds that tie them together.
//!
//! With `Π_n = tr[(ρ^Γ)^n]` the witness is
//!
//! ```text
//! ⟨W⟩ = det ρ^Γ = (1 − 6Π₄ + 8Π₃ + 3Π₂² − 6Π₂) / 24
//! ```
//!
//! and a two-qubit state is entangled exactly when it is negative. The
//! rescaled value `w = max(0, −16⟨W⟩)` brackets both entanglement measures:
//! `f(w) ≤ N ≤ C ≤ w^{1/4}`, where `f` inverts `w(C) = C(C + 2)³/27` on `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, hermitian_eigh, singular_values, ComplexMatrix};
use crate::states::{sigma_y_sigma_y, DensityMatrix};

/// Witness values below `-ENTANGLED_TOL` count as entangled.
pub const ENTANGLED_TOL: f64 = 1e-12;

/// Slack allowed above `w = 1` before `bounds` rejects its input.
const W_SLACK: f64 = 1e-9;

/// Spectral weights of `ρ` at or below this are treated as exactly zero when
/// factoring `ρ = F F†` for the concurrence.
const RANK_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentSource {
    Direct,
    Collective,
    Invariants,
}

/// `(Π₂, Π₃, Π₄)`; `Π₁ = 1` is implicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub pi2: f64,
    pub pi3: f64,
    pub pi4: f64,
    pub source: MomentSource,
}

impl MomentSet {
    pub fn new(pi2: f64, pi3: f64, pi4: f64, source: MomentSource) -> Self {
        Self {
            pi2,
            pi3,
            pi4,
            source,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.pi2, self.pi3, self.pi4]
    }

    /// Moment of order `n ∈ {2, 3, 4}`.
    pub fn get(&self, n: usize) -> Option<f64> {
        match n {
            2 => Some(self.pi2),
            3 => Some(self.pi3),
            4 => Some(self.pi4),
            _ => None,
        }
    }

    /// Whether the moments could come from a unit-trace Hermitian `ρ^Γ` with
    /// spectrum in `[−1/2, 1]`: `1/4 ≤ Π₂ ≤ 1`, `|Π₃| ≤ Π₂`, `Π₄ ≤ Π₂²`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.pi2 >= 0.25 - tol
            && self.pi2 <= 1.0 + tol
            && self.pi3.abs() <= self.pi2 + tol
            && self.pi4 <= self.pi2 * self.pi2 + tol
    }

    pub fn max_deviation(&self, other: &MomentSet) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn moments_direct(rho: &DensityMatrix) -> MomentSet {
    let g = rho.partial_transpose();
    let g2 = g.matmul(&g);
    MomentSet::new(
        g2.trace().re,
        g2.trace_of_product(&g).re,
        g2.trace_of_product(&g2).re,
        MomentSource::Direct,
    )
}

/// `(1 − 6Π₄ + 8Π₃ + 3Π₂² − 6Π₂) / 24`
pub fn witness_value(m: &MomentSet) -> f64 {
    witness_from_moments(m.pi2, m.pi3, m.pi4)
}

pub fn witness_from_moments(pi2: f64, pi3: f64, pi4: f64) -> f64 {
    (1.0 - 6.0 * pi4 + 8.0 * pi3 + 3.0 * pi2 * pi2 - 6.0 * pi2) / 24.0
}

/// `det ρ^Γ` as the product of its Hermitian eigenvalues.
pub fn det_partial_transpose(rho: &DensityMatrix) -> f64 {
    partial_transpose_spectrum(rho).iter().product()
}

/// Ascending eigenvalues of `ρ^Γ`.
pub fn partial_transpose_spectrum(rho: &DensityMatrix) -> Vec<f64> {
    hermitian_eig(&rho.partial_transpose()).expect("ρ^Γ of a valid state is Hermitian")
}

/// `w = max(0, −16⟨W⟩)`
pub fn rescaled_witness(witness: f64) -> f64 {
    (-16.0 * witness).max(0.0)
}

/// `N = 2 max(0, −λ_min(ρ^Γ))`
pub fn negativity(rho: &DensityMatrix) -> f64 {
    2.0 * (-partial_transpose_spectrum(rho)[0]).max(0.0)
}

/// The spin-flip matrix `ρ (σ₂⊗σ₂) ρ* (σ₂⊗σ₂)`.
pub fn wootters_matrix(rho: &DensityMatrix) -> ComplexMatrix {
    let yy = sigma_y_sigma_y();
    let m = rho.matrix();
    m.matmul(&yy).matmul(&m.conj()).matmul(&yy)
}

/// Square roots `λ_j` of the eigenvalues of the spin-flip matrix, descending.
///
/// With `ρ = F F†` the spin-flip matrix is similar to `L† L` for the complex
/// symmetric `L = Fᵀ (σ₂⊗σ₂) F`, so the `λ_j` are the singular values of `L`.
/// Taking them directly avoids square roots of rounding noise in the zero
/// eigenvalues of low-rank states.
pub fn wootters_lambdas(rho: &DensityMatrix) -> Vec<f64> {
    let eig = hermitian_eigh(rho.matrix()).expect("density matrices are Hermitian");
    let weights: Vec<f64> = eig
        .values
        .iter()
        .map(|&mu| if mu > RANK_TOL { mu.sqrt() } else { 0.0 })
        .collect();
    let factor = ComplexMatrix::from_fn(4, |i, k| eig.vectors[(i, k)] * weights[k]);
    let flip = factor.transpose().matmul(&sigma_y_sigma_y()).matmul(&factor);
    singular_values(&flip).expect("4×4 Jacobi SVD converges")
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)` with `λ₁` the largest.
pub fn concurrence(rho: &DensityMatrix) -> f64 {
    let l = wootters_lambdas(rho);
    (2.0 * l[0] - l.iter().sum::<f64>()).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

/// `(f(w), w^{1/4})` for `w ∈ [0, 1]`.
pub fn bounds(w: f64) -> Result<Bounds> {
    if !(0.0..=1.0 + W_SLACK).contains(&w) {
        return Err(Error::ParameterOutOfRange(format!("rescaled witness w = {w} not in [0, 1]")));
    }
    let w = w.min(1.0);
    Ok(Bounds {
        lower: lower_bound(w),
        upper: w.powf(0.25),
    })
}

/// Closed-form inverse of `C(C + 2)³/27`.
///
/// `x = 3∛(2√(w²(16w + 1)) − 2w)`, `z = 1 + x − 36w/x`,
/// `f = ½(−3 + √z + √(3 − z + 2/√z))`. The cube-root argument is rewritten as
/// `32w²/(√(16w + 1) + 1)` to avoid cancellation at small `w`.
fn lower_bound(w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let x = 3.0 * (32.0 * w * w / ((16.0 * w + 1.0).sqrt() + 1.0)).cbrt();
    let z = 1.0 + x - 36.0 * w / x;
    let root_z = z.sqrt();
    (0.5 * (-3.0 + root_z + (3.0 - z + 2.0 / root_z).sqrt())).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub witness: f64,
    pub w: f64,
    pub negativity: f64,
    pub concurrence: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub entangled: bool,
}

pub fn report(rho: &DensityMatrix) -> WitnessReport {
    let witness = witness_value(&moments_direct(rho));
    let w = rescaled_witness(witness);
    let b = bounds(w).expect("w ≤ 1 for every valid state");
    WitnessReport {
        witness,
        w,
        negativity: negativity(rho),
        concurrence: concurrence(rho),
        lower_bound: b.lower,
        upper_bound: b.upper,
        entangled: witness < -ENTANGLED_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{named_state, sample, EnsembleKind, NamedState, RandomEnsembleSpec, Sampler};
    use approx::assert_abs_diff_eq;

    fn mixed() -> DensityMatrix {
        named_state(NamedState::Werner(0.0)).unwrap()
    }

    fn singlet() -> DensityMatrix {
        named_state(NamedState::Singlet).unwrap()
    }

    fn werner(p: f64) -> DensityMatrix {
        named_state(NamedState::Werner(p)).unwrap()
    }

    fn assert_moments(m: MomentSet, expected: [f64; 3], tol: f64) {
        for (got, want) in m.as_array().iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = tol);
        }
    }

    #[test]
    fn direct_moments_of_fixtures() {
        assert_moments(moments_direct(&mixed()), [0.25, 1.0 / 16.0, 1.0 / 64.0], 1e-15);
        assert_moments(moments_direct(&singlet()), [1.0, 0.25, 0.25], 1e-15);
        // Γ-spectrum {3/8 ×3, −1/8}
        assert_moments(
            moments_direct(&werner(0.5)),
            [0.4375, 0.15625, 3.0 * (0.375f64).powi(4) + (0.125f64).powi(4)],
            1e-15,
        );
        assert_abs_diff_eq!(moments_direct(&werner(0.5)).pi4, 0.0595703, epsilon = 1e-7);
    }

    #[test]
    fn witness_polynomial_values() {
        let m = |a, b, c| MomentSet::new(a, b, c, MomentSource::Direct);
        assert_abs_diff_eq!(witness_value(&m(0.25, 1.0 / 16.0, 1.0 / 64.0)), 1.0 / 256.0, epsilon = 1e-17);
        assert_abs_diff_eq!(witness_value(&m(1.0, 0.25, 0.25)), -1.0 / 16.0, epsilon = 1e-17);
        assert_eq!(witness_value(&m(1.0, 1.0, 1.0)), 0.0);
    }

    #[test]
    fn negativity_of_fixtures() {
        assert_abs_diff_eq!(negativity(&mixed()), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(negativity(&singlet()), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(negativity(&werner(0.5)), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn concurrence_of_fixtures() {
        assert_abs_diff_eq!(concurrence(&mixed()), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(concurrence(&singlet()), 1.0, epsilon = 1e-14);
        for p in [0.0f64, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let want = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert_abs_diff_eq!(concurrence(&werner(p)), want, epsilon = 1e-13);
        }
    }

    #[test]
    fn concurrence_of_schmidt_states() {
        for k in 0..=20 {
            let l1 = k as f64 / 20.0;
            let l2 = (1.0 - l1 * l1).sqrt();
            let rho = named_state(NamedState::PureSchmidt(l1)).unwrap();
            assert_abs_diff_eq!(concurrence(&rho), 2.0 * l1 * l2, epsilon = 1e-14);
        }
    }

    #[test]
    fn wootters_spectrum_of_singlet() {
        let values = crate::linalg::eig4_general(&wootters_matrix(&singlet())).unwrap();
        let expected = [0.0, 0.0, 0.0, 1.0];
        for (got, want) in values.iter().zip(expected) {
            assert!((got.re - want).abs() < 1e-12 && got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn lambdas_agree_with_general_eigensolver() {
        let sampler = Sampler::new(RandomEnsembleSpec {
            kind: EnsembleKind::HilbertSchmidtMixed,
            seed: 19,
        });
        for rho in sampler.take(100) {
            let mut eig: Vec<f64> = crate::linalg::eig4_general(&wootters_matrix(&rho))
                .unwrap()
                .iter()
                .map(|z| {
                    assert!(z.re >= -1e-9 && z.im.abs() < 1e-9, "{z}");
                    z.re
                })
                .collect();
            eig.sort_by(|a, b| b.total_cmp(a));
            let lambdas = wootters_lambdas(&rho);
            for (l, e) in lambdas.iter().zip(&eig) {
                assert!((l * l - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bounds_fixed_points() {
        assert_eq!(bounds(0.0).unwrap(), Bounds { lower: 0.0, upper: 0.0 });
        let one = bounds(1.0).unwrap();
        assert_abs_diff_eq!(one.lower, 1.0, epsilon = 1e-12);
        assert_eq!(one.upper, 1.0);
        let b = bounds(27.0 / 256.0).unwrap();
        assert_abs_diff_eq!(b.lower, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(b.upper, 0.569876764, epsilon = 1e-9);
        assert_abs_diff_eq!(b.upper.powi(4), 27.0 / 256.0, epsilon = 1e-15);
    }

    #[test]
    fn bounds_reject_out_of_range() {
        assert!(bounds(-0.1).is_err());
        assert!(bounds(1.01).is_err());
        assert!(bounds(f64::NAN).is_err());
        assert_eq!(bounds(1.0 + 1e-12).unwrap().upper, 1.0);
    }

    #[test]
    fn lower_bound_inverts_polynomial() {
        for k in 0..=1000 {
            let c = k as f64 / 1000.0;
            let w = c * (c + 2.0).powi(3) / 27.0;
            assert_abs_diff_eq!(bounds(w).unwrap().lower, c, epsilon = 1e-9);
        }
    }

    #[test]
    fn reports() {
        let s = report(&singlet());
        assert!(s.entangled);
        assert_abs_diff_eq!(s.w, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.negativity, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.concurrence, 1.0, epsilon = 1e-14);

        let m = report(&mixed());
        assert!(!m.entangled);
        assert_eq!(m.w, 0.0);

        let edge = report(&werner(1.0 / 3.0));
        assert!(edge.witness.abs() < 1e-12);
        assert!(!edge.entangled);
    }

    #[test]
    fn witness_equals_determinant_and_moments_are_physical() {
        let sampler = Sampler::new(RandomEnsembleSpec {
            kind: EnsembleKind::HilbertSchmidtMixed,
            seed: 1,
        });
        for rho in sampler.take(300) {
            let m = moments_direct(&rho);
            assert!(m.is_physical(1e-12));
            assert_abs_diff_eq!(witness_value(&m), det_partial_transpose(&rho), epsilon = 1e-12);
        }
    }

    #[test]
    fn bound_chain_on_pure_states() {
        let sampler = Sampler::new(RandomEnsembleSpec {
            kind: EnsembleKind::HaarPure,
            seed: 2,
        });
        for rho in sampler.take(2000) {
            let r = report(&rho);
            assert!((r.concurrence - r.upper_bound).abs() < 1e-9, "{r:?}");
            assert!((r.negativity - r.concurrence).abs() < 1e-9, "{r:?}");
            assert!(r.lower_bound <= r.negativity + 1e-9);
        }
    }

    #[test]
    fn purity_is_invariant_under_partial_transpose() {
        for seed in 0..100 {
            let rho = sample(RandomEnsembleSpec {
                kind: EnsembleKind::HilbertSchmidtMixed,
                seed,
            });
            let g = rho.partial_transpose();
            assert_abs_diff_eq!(g.trace_of_product(&g).re, rho.purity(), epsilon = 1e-14);
        }
    }
}
