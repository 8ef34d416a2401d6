//! Collective measurements on `n` copies of a two-qubit state.
//!
//! The `n`-cycle that gives `Π_n = tr(A_n B_n ρ^{⊗n})` splits into two
//! Hermitian involutions built from qubit swaps:
//!
//! ```text
//! A₂ = S(a₁a₂)                     B₂ = S(b₁b₂)
//! A₃ = S(a₁a₂) S(b₂b₃)             B₃ = S(a₂a₃) S(b₁b₂)
//! A₄ = S(a₁a₂) S(a₃a₄) S(b₂b₃)     B₄ = S(a₂a₃) S(b₁b₂) S(b₃b₄)
//! ```
//!
//! `P_n^±` and `P̄_n^±` project onto the ±1 eigenspaces of `A_n` and `B_n`.
//! Measuring `P` first and then `P̄` gives four outcomes whose signed
//! probabilities sum to `Π_n`.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, QubitPermutation, RegisterLayout};
use crate::states::DensityMatrix;
use crate::witness::{MomentSet, MomentSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    A,
    B,
    PPlus,
    PMinus,
    PbarPlus,
    PbarMinus,
    X,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 7] = [
        OperatorKind::A,
        OperatorKind::B,
        OperatorKind::PPlus,
        OperatorKind::PMinus,
        OperatorKind::PbarPlus,
        OperatorKind::PbarMinus,
        OperatorKind::X,
    ];
}

/// Outcome of a two-valued projective measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveOperator {
    pub n_copies: usize,
    pub kind: OperatorKind,
    pub matrix: ComplexMatrix,
}

/// Every operator for one copy count, built once.
#[derive(Debug)]
pub struct OperatorSet {
    layout: RegisterLayout,
    a_perm: QubitPermutation,
    b_perm: QubitPermutation,
    a: ComplexMatrix,
    b: ComplexMatrix,
    p_plus: ComplexMatrix,
    p_minus: ComplexMatrix,
    pbar_plus: ComplexMatrix,
    pbar_minus: ComplexMatrix,
    x: Option<ComplexMatrix>,
}

/// Swap pairs `(qubit, qubit)` whose product is `A_n`, in the order the
/// projector recursion consumes them.
fn a_swaps(layout: &RegisterLayout) -> Vec<(usize, usize)> {
    let (a, b) = (|m| layout.a(m), |m| layout.b(m));
    match layout.n_copies() {
        2 => vec![(a(1), a(2))],
        3 => vec![(a(1), a(2)), (b(2), b(3))],
        4 => vec![(a(1), a(2)), (b(2), b(3)), (a(3), a(4))],
        _ => unreachable!("checked by caller"),
    }
}

/// `B_n` is `A_n` with the roles of `a` and `b` exchanged.
fn b_swaps(layout: &RegisterLayout) -> Vec<(usize, usize)> {
    let (a, b) = (|m| layout.a(m), |m| layout.b(m));
    match layout.n_copies() {
        2 => vec![(b(1), b(2))],
        3 => vec![(b(1), b(2)), (a(2), a(3))],
        4 => vec![(b(1), b(2)), (a(2), a(3)), (b(3), b(4))],
        _ => unreachable!("checked by caller"),
    }
}

/// Projector onto the `sign` eigenspace of a product of commuting swaps.
///
/// For a single swap this is `(I ± S)/2`. Appending a swap `S_k` to a product
/// `A'` gives `P^±(A' S_k) = P^±(A') P^+_k + P^∓(A') P^-_k`, which for `n = 3`
/// and `n = 4` is exactly the pairwise-projector assembly of `P_n^±`.
fn parity_projector(num_qubits: usize, swaps: &[(usize, usize)], sign: Sign) -> Result<ComplexMatrix> {
    let (&(i, j), rest) = swaps.split_last().expect("at least one swap");
    let pair = |s: Sign| -> Result<ComplexMatrix> {
        let swap = QubitPermutation::swap(num_qubits, i, j)?.to_matrix();
        let id = ComplexMatrix::identity(swap.dim());
        Ok((&id + &swap.scale_real(s.value())).scale_real(0.5))
    };
    if rest.is_empty() {
        return pair(sign);
    }
    let same = parity_projector(num_qubits, rest, sign)?;
    let flipped = parity_projector(num_qubits, rest, sign.flip())?;
    Ok(&same.matmul(&pair(Sign::Plus)?) + &flipped.matmul(&pair(Sign::Minus)?))
}

impl OperatorSet {
    fn build(n_copies: usize) -> Result<Self> {
        if !(2..=4).contains(&n_copies) {
            return Err(Error::UnsupportedCopies(n_copies));
        }
        let layout = RegisterLayout::new(n_copies)?;
        let q = layout.num_qubits();
        let (sa, sb) = (a_swaps(&layout), b_swaps(&layout));
        let a_perm = QubitPermutation::swaps(q, &sa)?;
        let b_perm = QubitPermutation::swaps(q, &sb)?;
        let a = a_perm.to_matrix();
        let b = b_perm.to_matrix();
        let x = (n_copies >= 3).then(|| {
            let sum = &a + &b;
            sum.matmul(&sum)
        });
        Ok(Self {
            layout,
            p_plus: parity_projector(q, &sa, Sign::Plus)?,
            p_minus: parity_projector(q, &sa, Sign::Minus)?,
            pbar_plus: parity_projector(q, &sb, Sign::Plus)?,
            pbar_minus: parity_projector(q, &sb, Sign::Minus)?,
            a_perm,
            b_perm,
            a,
            b,
            x,
        })
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn a_permutation(&self) -> &QubitPermutation {
        &self.a_perm
    }

    pub fn b_permutation(&self) -> &QubitPermutation {
        &self.b_perm
    }

    pub fn get(&self, kind: OperatorKind) -> Option<&ComplexMatrix> {
        match kind {
            OperatorKind::A => Some(&self.a),
            OperatorKind::B => Some(&self.b),
            OperatorKind::PPlus => Some(&self.p_plus),
            OperatorKind::PMinus => Some(&self.p_minus),
            OperatorKind::PbarPlus => Some(&self.pbar_plus),
            OperatorKind::PbarMinus => Some(&self.pbar_minus),
            OperatorKind::X => self.x.as_ref(),
        }
    }

    pub fn projector(&self, sign: Sign) -> &ComplexMatrix {
        match sign {
            Sign::Plus => &self.p_plus,
            Sign::Minus => &self.p_minus,
        }
    }

    pub fn projector_bar(&self, sign: Sign) -> &ComplexMatrix {
        match sign {
            Sign::Plus => &self.pbar_plus,
            Sign::Minus => &self.pbar_minus,
        }
    }
}

/// Cached operator set for `n ∈ {2, 3, 4}` copies.
pub fn operators(n_copies: usize) -> Result<&'static OperatorSet> {
    static CACHE: [OnceLock<OperatorSet>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if !(2..=4).contains(&n_copies) {
        return Err(Error::UnsupportedCopies(n_copies));
    }
    let slot = &CACHE[n_copies - 2];
    if let Some(set) = slot.get() {
        return Ok(set);
    }
    let built = OperatorSet::build(n_copies)?;
    Ok(slot.get_or_init(|| built))
}

pub fn build(kind: OperatorKind, n_copies: usize) -> Result<CollectiveOperator> {
    let unsupported = || Error::UnsupportedOperator { kind, n_copies };
    let set = operators(n_copies).map_err(|_| unsupported())?;
    let matrix = set.get(kind).ok_or_else(unsupported)?.clone();
    Ok(CollectiveOperator {
        n_copies,
        kind,
        matrix,
    })
}

fn copies(rho: &DensityMatrix, n: usize) -> ComplexMatrix {
    rho.matrix().tensor_power(n)
}

/// `tr(A_n B_n ρ^{⊗n})` and `tr(B_n A_n ρ^{⊗n})`.
pub fn cycle_traces(rho: &DensityMatrix, n: usize) -> Result<(Complex64, Complex64)> {
    let set = operators(n)?;
    let r = copies(rho, n);
    let ab = set.a_perm.compose(&set.b_perm).trace_with(&r);
    let ba = set.b_perm.compose(&set.a_perm).trace_with(&r);
    Ok((ab, ba))
}

/// `Π_n = tr(A_n B_n ρ^{⊗n})`
pub fn moment_cycle(rho: &DensityMatrix, n: usize) -> Result<f64> {
    Ok(cycle_traces(rho, n)?.0.re)
}

/// `Π_n = ½ tr[X_n ρ^{⊗n}] − 1` with `X_n = (A_n + B_n)²`, for `n ∈ {3, 4}`.
pub fn moment_via_x(rho: &DensityMatrix, n: usize) -> Result<f64> {
    let x = operators(n)
        .ok()
        .and_then(|set| set.x.as_ref())
        .ok_or(Error::UnsupportedOperator {
            kind: OperatorKind::X,
            n_copies: n,
        })?;
    Ok(0.5 * x.trace_of_product(&copies(rho, n)).re - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralLevel {
    pub value: f64,
    pub multiplicity: usize,
}

/// Distinct eigenvalues of `X_n` (rounded to 1e-8) with multiplicities.
pub fn spectrum_x(n: usize) -> Result<Vec<SpectralLevel>> {
    let x = build(OperatorKind::X, n)?.matrix;
    let mut levels: Vec<SpectralLevel> = Vec::new();
    for value in hermitian_eig(&x)? {
        let rounded = (value * 1e8).round() / 1e8 + 0.0;
        match levels.last_mut() {
            Some(level) if level.value == rounded => level.multiplicity += 1,
            _ => levels.push(SpectralLevel {
                value: rounded,
                multiplicity: 1,
            }),
        }
    }
    Ok(levels)
}

/// Projections needed for the whole witness: one per eigenspace of `X₃` and
/// `X₄`, plus the two for `Π₂`.
pub fn projection_count() -> Result<usize> {
    Ok(spectrum_x(3)?.len() + spectrum_x(4)?.len() + 2)
}

/// Probabilities of the four outcomes of measuring `P_n^±` and then `P̄_n^±`.
///
/// `p(x, y) = tr[P̄^x P^y ρ^{⊗n} P^y P̄^x]`, where `y` is the `P` (first) outcome
/// and `x` the `P̄` (second) outcome. Stored in the order
/// `[p(+,+), p(+,−), p(−,+), p(−,−)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeTable {
    pub n_copies: usize,
    pub probabilities: [f64; 4],
}

impl OutcomeTable {
    pub fn index(x: Sign, y: Sign) -> usize {
        let bit = |s| match s {
            Sign::Plus => 0,
            Sign::Minus => 1,
        };
        2 * bit(x) + bit(y)
    }

    pub fn get(&self, x: Sign, y: Sign) -> f64 {
        self.probabilities[Self::index(x, y)]
    }

    /// `p₊₊ − p₊₋ − p₋₊ + p₋₋`
    pub fn moment(&self) -> f64 {
        let p = &self.probabilities;
        p[0] - p[1] - p[2] + p[3]
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// `P^y M P^y = ¼(M + y A M + y M A + A M A)` using the permutation form of `A`.
fn project_with(perm: &QubitPermutation, m: &ComplexMatrix, sign: Sign) -> ComplexMatrix {
    let s = sign.value();
    let am = perm.apply_left(m).scale_real(s);
    let ma = perm.apply_right(m).scale_real(s);
    let ama = perm.conjugate(m);
    (&(&(m + &am) + &ma) + &ama).scale_real(0.25)
}

pub fn outcome_probabilities(rho: &DensityMatrix, n: usize) -> Result<OutcomeTable> {
    let set = operators(n)?;
    let r = copies(rho, n);
    let mut probabilities = [0.0; 4];
    for y in Sign::BOTH {
        let projected = project_with(&set.a_perm, &r, y);
        let total = projected.trace().re;
        let with_b = set.b_perm.trace_with(&projected).re;
        for x in Sign::BOTH {
            // tr[P̄ˣ M P̄ˣ] = tr[P̄ˣ M] = ½(tr M ± tr(B M))
            probabilities[OutcomeTable::index(x, y)] = 0.5 * (total + x.value() * with_b);
        }
    }
    Ok(OutcomeTable {
        n_copies: n,
        probabilities,
    })
}

/// Same table evaluated with the dense projector matrices.
pub fn outcome_probabilities_dense(rho: &DensityMatrix, n: usize) -> Result<OutcomeTable> {
    let set = operators(n)?;
    let r = copies(rho, n);
    let mut probabilities = [0.0; 4];
    for y in Sign::BOTH {
        let p = set.projector(y);
        let inner = p.matmul(&r).matmul(p);
        for x in Sign::BOTH {
            let pbar = set.projector_bar(x);
            probabilities[OutcomeTable::index(x, y)] = pbar.matmul(&inner).matmul(pbar).trace().re;
        }
    }
    Ok(OutcomeTable {
        n_copies: n,
        probabilities,
    })
}

/// `(Π₂, Π₃, Π₄)` from the signed outcome probabilities.
pub fn moments_collective(rho: &DensityMatrix) -> Result<MomentSet> {
    let m = |n| outcome_probabilities(rho, n).map(|t| t.moment());
    Ok(MomentSet::new(m(2)?, m(3)?, m(4)?, MomentSource::Collective))
}

/// Largest entry-wise failure of the projector algebra for `n` copies:
/// `A² = B² = I`, and for both `P` and `P̄`: `P^±² = P^±`, `P^+ P^- = 0`,
/// `P^+ + P^- = I`, `P^+ − P^- =` the parent involution.
pub fn projector_algebra_defect(n: usize) -> Result<f64> {
    let set = operators(n)?;
    let id = ComplexMatrix::identity(set.layout.dim());
    let mut worst = set.a.matmul(&set.a).max_abs_diff(&id);
    worst = worst.max(set.b.matmul(&set.b).max_abs_diff(&id));
    for (plus, minus, parent) in [
        (&set.p_plus, &set.p_minus, &set.a),
        (&set.pbar_plus, &set.pbar_minus, &set.b),
    ] {
        worst = worst
            .max(plus.matmul(plus).max_abs_diff(plus))
            .max(minus.matmul(minus).max_abs_diff(minus))
            .max(plus.matmul(minus).max_abs())
            .max((plus + minus).max_abs_diff(&id))
            .max((plus - minus).max_abs_diff(parent));
    }
    Ok(worst)
}

/// `(ρ^{⊗n})′ = ½(ρ^{⊗n} + A_n ρ^{⊗n} A_n)`
pub fn symmetrized_state(rho: &DensityMatrix, n: usize) -> Result<ComplexMatrix> {
    let set = operators(n)?;
    let r = copies(rho, n);
    Ok((&r + &set.a_perm.conjugate(&r)).scale_real(0.5))
}

/// Largest entry of `[A_n, (ρ^{⊗n})′]`.
pub fn symmetrized_commutator_norm(rho: &DensityMatrix, n: usize) -> Result<f64> {
    let set = operators(n)?;
    let sym = symmetrized_state(rho, n)?;
    Ok((&set.a_perm.apply_left(&sym) - &set.a_perm.apply_right(&sym)).max_abs())
}

/// Largest entry of `P^± (ρ^{⊗n})′ P^± − P^± ρ^{⊗n} P^±` over both signs.
pub fn symmetrized_projection_gap(rho: &DensityMatrix, n: usize) -> Result<f64> {
    let set = operators(n)?;
    let r = copies(rho, n);
    let sym = symmetrized_state(rho, n)?;
    Ok(Sign::BOTH
        .iter()
        .map(|&s| project_with(&set.a_perm, &sym, s).max_abs_diff(&project_with(&set.a_perm, &r, s)))
        .fold(0.0, f64::max))
}
