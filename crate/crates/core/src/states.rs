//! Two-qubit density matrices: validation, named fixtures, random ensembles
//! and the JSON state file format.
//!
//! Basis order is `|HH⟩, |HV⟩, |VH⟩, |VV⟩` (equivalently `|00⟩ … |11⟩`), with
//! subsystem `a` the more significant qubit.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, Bipartition, ComplexMatrix, HERMITIAN_TOL};

pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-9;

/// A validated two-qubit state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    label: Option<String>,
}

/// One broken density-matrix invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Dimension(usize),
    NotHermitian { deviation: f64 },
    Trace { trace: f64, imaginary: f64 },
    Negative { min_eigenvalue: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dimension(d) => write!(f, "dimension is {d}, expected 4"),
            Violation::NotHermitian { deviation } => {
                write!(f, "not Hermitian (max entry deviation {deviation:e})")
            }
            Violation::Trace { trace, imaginary } => {
                write!(f, "trace is {trace} (imaginary part {imaginary:e}), expected 1")
            }
            Violation::Negative { min_eigenvalue } => {
                write!(f, "not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")
            }
        }
    }
}

/// Every invariant a candidate density matrix failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Violations(pub Vec<Violation>);

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Violations {}

/// Checks Hermiticity, unit trace and positivity. All failures are reported
/// together.
pub fn validate(matrix: ComplexMatrix) -> Result<DensityMatrix> {
    if matrix.dim() != 4 {
        return Err(Violations(vec![Violation::Dimension(matrix.dim())]).into());
    }
    let mut found = Vec::new();

    let deviation = matrix.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        found.push(Violation::NotHermitian { deviation });
    }
    let trace = matrix.trace();
    if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
        found.push(Violation::Trace {
            trace: trace.re,
            imaginary: trace.im,
        });
    }
    let hermitian_part = (&matrix + &matrix.adjoint()).scale_real(0.5);
    let min_eigenvalue = hermitian_eig(&hermitian_part)?[0];
    if min_eigenvalue < -POSITIVITY_TOL {
        found.push(Violation::Negative { min_eigenvalue });
    }

    if found.is_empty() {
        Ok(DensityMatrix {
            matrix,
            label: None,
        })
    } else {
        Err(Violations(found).into())
    }
}

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// `ρ^Γ`, transposing subsystem `b`.
    pub fn partial_transpose(&self) -> ComplexMatrix {
        self.matrix
            .partial_transpose(Bipartition::TWO_QUBITS)
            .expect("density matrices are 4×4")
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_of_product(&self.matrix).re
    }

    /// Conjugation by a unitary, `U ρ U†`. The result is revalidated.
    pub fn transformed(&self, unitary: &ComplexMatrix) -> Result<DensityMatrix> {
        validate(unitary.matmul(&self.matrix).matmul(&unitary.adjoint()))
    }

    pub fn to_state_file(&self) -> StateFile {
        StateFile {
            dim: 4,
            re: self.matrix.real_parts(),
            im: self.matrix.imag_parts(),
        }
    }
}

/// Fixture states addressable by name, e.g. `werner:0.5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedState {
    /// `|Ψ⁻⟩ = (|HV⟩ − |VH⟩)/√2`
    Singlet,
    /// `|Φ⁺⟩ = (|HH⟩ + |VV⟩)/√2`
    PhiPlus,
    /// `p|Ψ⁻⟩⟨Ψ⁻| + (1 − p) I/4`, `p ∈ [0, 1]`
    Werner(f64),
    /// Both qubits in `cos θ|H⟩ + sin θ|V⟩`.
    Product(f64),
    /// `λ₁|HH⟩ + λ₂|VV⟩` with `λ₂ = √(1 − λ₁²)`, `λ₁ ∈ [0, 1]`
    PureSchmidt(f64),
}

impl NamedState {
    pub fn build(&self) -> Result<DensityMatrix> {
        named_state(*self)
    }

    /// Closed-form `det ρ^Γ` for the fixture.
    pub fn analytic_witness(&self) -> f64 {
        match *self {
            NamedState::Singlet | NamedState::PhiPlus => -1.0 / 16.0,
            NamedState::Werner(p) => (1.0 + p).powi(3) * (1.0 - 3.0 * p) / 256.0,
            NamedState::Product(_) => 0.0,
            NamedState::PureSchmidt(l1) => {
                let l2 = (1.0 - l1 * l1).max(0.0).sqrt();
                -(l1 * l2).powi(4)
            }
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedState::Singlet => f.write_str("singlet"),
            NamedState::PhiPlus => f.write_str("phi_plus"),
            NamedState::Werner(p) => write!(f, "werner:{p}"),
            NamedState::Product(t) => write!(f, "product:{t}"),
            NamedState::PureSchmidt(l) => write!(f, "pure_schmidt:{l}"),
        }
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let number = |p: Option<&str>| -> Result<f64> {
            let p = p.ok_or_else(|| Error::ParameterOutOfRange(format!("'{name}' needs a parameter, e.g. {name}:0.5")))?;
            p.parse::<f64>()
                .map_err(|_| Error::ParameterOutOfRange(format!("cannot parse '{p}' as a number")))
        };
        let no_param = |state: NamedState| match param {
            None => Ok(state),
            Some(_) => Err(Error::ParameterOutOfRange(format!("'{name}' takes no parameter"))),
        };
        match name.to_ascii_lowercase().as_str() {
            "singlet" => no_param(NamedState::Singlet),
            "phi_plus" | "phiplus" => no_param(NamedState::PhiPlus),
            "werner" => Ok(NamedState::Werner(number(param)?)),
            "product" => Ok(NamedState::Product(number(param)?)),
            "pure_schmidt" | "schmidt" => Ok(NamedState::PureSchmidt(number(param)?)),
            _ => Err(Error::UnknownState(s.to_string())),
        }
    }
}

fn ket(amplitudes: [f64; 4]) -> Vec<Complex64> {
    amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect()
}

pub fn named_state(state: NamedState) -> Result<DensityMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let matrix = match state {
        NamedState::Singlet => ComplexMatrix::outer(&ket([0.0, h, -h, 0.0])),
        NamedState::PhiPlus => ComplexMatrix::outer(&ket([h, 0.0, 0.0, h])),
        NamedState::Werner(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::ParameterOutOfRange(format!("werner mixing p = {p} not in [0, 1]")));
            }
            let singlet = ComplexMatrix::outer(&ket([0.0, h, -h, 0.0]));
            let noise = ComplexMatrix::identity(4).scale_real(0.25);
            &singlet.scale_real(p) + &noise.scale_real(1.0 - p)
        }
        NamedState::Product(theta) => {
            if !theta.is_finite() {
                return Err(Error::ParameterOutOfRange(format!("product angle {theta} is not finite")));
            }
            let (c, s) = (theta.cos(), theta.sin());
            ComplexMatrix::outer(&ket([c * c, c * s, s * c, s * s]))
        }
        NamedState::PureSchmidt(l1) => {
            if !(0.0..=1.0).contains(&l1) {
                return Err(Error::ParameterOutOfRange(format!("Schmidt coefficient {l1} not in [0, 1]")));
            }
            let l2 = (1.0 - l1 * l1).sqrt();
            ComplexMatrix::outer(&ket([l1, 0.0, 0.0, l2]))
        }
    };
    Ok(validate(matrix)?.with_label(state.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    /// `GG†/tr(GG†)` for a 4×4 complex Ginibre matrix `G`.
    HilbertSchmidtMixed,
    /// Normalised complex Gaussian 4-vector.
    HaarPure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomEnsembleSpec {
    pub kind: EnsembleKind,
    pub seed: u64,
}

/// Seeded source of random states.
///
/// The generator is ChaCha8 seeded with `seed_from_u64`; standard normals come
/// from the Box–Muller transform on pairs of uniforms, `u₁ ∈ (0, 1]`,
/// `u₂ ∈ [0, 1)`, using both the cosine and sine outputs in that order.
#[derive(Debug, Clone)]
pub struct Sampler {
    kind: EnsembleKind,
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Sampler {
    pub fn new(spec: RandomEnsembleSpec) -> Self {
        Self {
            kind: spec.kind,
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            spare: None,
        }
    }

    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1: f64 = 1.0 - self.rng.random::<f64>();
        let u2: f64 = self.rng.random::<f64>();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    pub fn complex_gaussian(&mut self) -> Complex64 {
        let re = self.gaussian();
        let im = self.gaussian();
        Complex64::new(re, im)
    }

    pub fn next_state(&mut self) -> DensityMatrix {
        let matrix = match self.kind {
            EnsembleKind::HilbertSchmidtMixed => {
                let g = ComplexMatrix::from_fn(4, |_, _| self.complex_gaussian());
                let ggd = g.matmul(&g.adjoint());
                let norm = ggd.trace().re;
                // exact Hermitian symmetry before normalising
                (&ggd + &ggd.adjoint()).scale_real(0.5 / norm)
            }
            EnsembleKind::HaarPure => {
                let v: Vec<Complex64> = (0..4).map(|_| self.complex_gaussian()).collect();
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let v: Vec<Complex64> = v.into_iter().map(|z| z / norm).collect();
                ComplexMatrix::outer(&v)
            }
        };
        validate(matrix).expect("sampled matrices are valid states")
    }

    /// Haar-random unitary by Gram–Schmidt on Gaussian columns.
    pub fn haar_unitary(&mut self, dim: usize) -> ComplexMatrix {
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        while cols.len() < dim {
            let mut v: Vec<Complex64> = (0..dim).map(|_| self.complex_gaussian()).collect();
            for u in &cols {
                let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= overlap * y;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                continue;
            }
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
        ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
    }
}

impl Iterator for Sampler {
    type Item = DensityMatrix;

    fn next(&mut self) -> Option<DensityMatrix> {
        Some(self.next_state())
    }
}

/// First state of the sequence determined by `spec`.
pub fn sample(spec: RandomEnsembleSpec) -> DensityMatrix {
    Sampler::new(spec).next_state()
}

/// On-disk JSON layout: `{ "dim": 4, "re": [16 numbers], "im": [16 numbers] }`,
/// both arrays row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::StateFile(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files always serialize")
    }

    /// Checks the array shapes; does not validate the state itself.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.dim != 4 {
            return Err(Error::StateFile(format!("dim is {}, expected 4", self.dim)));
        }
        for (name, values) in [("re", &self.re), ("im", &self.im)] {
            if values.len() != 16 {
                return Err(Error::StateFile(format!(
                    "'{name}' has {} entries, expected 16",
                    values.len()
                )));
            }
        }
        ComplexMatrix::from_parts(4, &self.re, &self.im)
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        validate(self.to_matrix()?)
    }
}

/// `σ₂ ⊗ σ₂` on two qubits.
pub(crate) fn sigma_y_sigma_y() -> ComplexMatrix {
    let y = crate::linalg::pauli(2);
    y.kron(&y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximally_mixed_is_valid() {
        assert!(validate(ComplexMatrix::identity(4).scale_real(0.25)).is_ok());
    }

    #[test]
    fn negative_diagonal_reports_positivity() {
        let err = validate(ComplexMatrix::diag(&[1.0, 1.0, -1.0, 0.0])).unwrap_err();
        let Error::InvalidState(Violations(found)) = err else {
            panic!("expected invalid state");
        };
        assert!(found
            .iter()
            .any(|v| matches!(v, Violation::Negative { min_eigenvalue } if (*min_eigenvalue + 1.0).abs() < 1e-12)));
    }

    #[test]
    fn reports_every_violation() {
        let mut m = ComplexMatrix::diag(&[0.5, 0.5, -0.3, 0.0]);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        let err = validate(m).unwrap_err();
        let Error::InvalidState(Violations(found)) = err else {
            panic!("expected invalid state");
        };
        assert_eq!(found.len(), 3, "{found:?}");
        let text = Error::InvalidState(Violations(found)).to_string();
        assert!(text.contains("trace") && text.contains("Hermitian") && text.contains("positive"));
    }

    #[test]
    fn rejects_wrong_dimension() {
        assert!(validate(ComplexMatrix::identity(2).scale_real(0.5)).is_err());
    }

    #[test]
    fn werner_endpoints() {
        let w0 = named_state(NamedState::Werner(0.0)).unwrap();
        assert!(w0.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.25)) < 1e-16);
        let w1 = named_state(NamedState::Werner(1.0)).unwrap();
        let singlet = named_state(NamedState::Singlet).unwrap();
        assert!(w1.matrix().max_abs_diff(singlet.matrix()) < 1e-16);
        assert!(named_state(NamedState::Werner(0.7)).is_ok());
    }

    #[test]
    fn parameters_out_of_range() {
        assert!(named_state(NamedState::Werner(1.2)).is_err());
        assert!(named_state(NamedState::Werner(-0.1)).is_err());
        assert!(named_state(NamedState::PureSchmidt(1.5)).is_err());
        assert!(named_state(NamedState::Product(f64::NAN)).is_err());
    }

    #[test]
    fn named_state_grammar() {
        assert_eq!("singlet".parse::<NamedState>().unwrap(), NamedState::Singlet);
        assert_eq!("werner:0.5".parse::<NamedState>().unwrap(), NamedState::Werner(0.5));
        assert_eq!(
            "pure_schmidt:0.6".parse::<NamedState>().unwrap(),
            NamedState::PureSchmidt(0.6)
        );
        assert!("werner".parse::<NamedState>().is_err());
        assert!("singlet:3".parse::<NamedState>().is_err());
        assert!(matches!("ghz".parse::<NamedState>(), Err(Error::UnknownState(_))));
        for s in ["singlet", "phi_plus", "werner:0.25", "product:0.3", "pure_schmidt:0.8"] {
            let parsed: NamedState = s.parse().unwrap();
            assert_eq!(parsed.to_string(), s);
        }
    }

    #[test]
    fn named_states_carry_labels() {
        let s = named_state(NamedState::Werner(0.5)).unwrap();
        assert_eq!(s.label(), Some("werner:0.5"));
    }

    #[test]
    fn sampling_is_deterministic() {
        for kind in [EnsembleKind::HilbertSchmidtMixed, EnsembleKind::HaarPure] {
            let spec = RandomEnsembleSpec { kind, seed: 42 };
            assert_eq!(sample(spec), sample(spec));
            let a: Vec<_> = Sampler::new(spec).take(5).collect();
            let b: Vec<_> = Sampler::new(spec).take(5).collect();
            assert_eq!(a, b);
            let other = sample(RandomEnsembleSpec { kind, seed: 43 });
            assert_ne!(sample(spec), other);
        }
    }

    #[test]
    fn pure_samples_have_unit_purity() {
        let sampler = Sampler::new(RandomEnsembleSpec {
            kind: EnsembleKind::HaarPure,
            seed: 7,
        });
        for rho in sampler.take(500) {
            assert!((rho.purity() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn box_muller_moments() {
        let mut sampler = Sampler::new(RandomEnsembleSpec {
            kind: EnsembleKind::HaarPure,
            seed: 3,
        });
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| sampler.gaussian()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 5.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 0.02);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut sampler = Sampler::new(RandomEnsembleSpec {
            kind: EnsembleKind::HaarPure,
            seed: 11,
        });
        for dim in [2, 4] {
            let u = sampler.haar_unitary(dim);
            let gram = u.adjoint().matmul(&u);
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-13);
        }
    }

    #[test]
    fn state_file_round_trip() {
        let rho = sample(RandomEnsembleSpec {
            kind: EnsembleKind::HilbertSchmidtMixed,
            seed: 5,
        });
        let text = rho.to_state_file().to_json();
        let back = StateFile::parse(&text).unwrap().to_state().unwrap();
        assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn state_file_shape_errors() {
        let bad = StateFile {
            dim: 4,
            re: vec![0.25; 15],
            im: vec![0.0; 16],
        };
        assert!(matches!(bad.to_matrix(), Err(Error::StateFile(_))));
        let bad_dim = StateFile {
            dim: 2,
            re: vec![0.5, 0.0, 0.0, 0.5],
            im: vec![0.0; 4],
        };
        assert!(bad_dim.to_matrix().is_err());
        assert!(StateFile::parse("{\"dim\": 4}").is_err());
        assert!(StateFile::parse("not json").is_err());
    }

    #[test]
    fn trace_violation_from_file() {
        let mut re = vec![0.0; 16];
        for k in 0..4 {
            re[k * 5] = 0.225;
        }
        let file = StateFile {
            dim: 4,
            re,
            im: vec![0.0; 16],
        };
        let err = file.to_state().unwrap_err().to_string();
        assert!(err.contains("trace"), "{err}");
    }
}
