//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use uwe::collective::{
    moment_cycle, moment_via_x, outcome_probabilities, projection_count, spectrum_x,
    symmetrized_commutator_norm, symmetrized_projection_gap,
};
use uwe::invariants::{decompose, makhlin, moments_from_invariants, InvariantSet};
use uwe::measurement::{simulate, DEFAULT_BOOTSTRAP_RESAMPLES};
use uwe::states::{named_state, sample, EnsembleKind, NamedState, RandomEnsembleSpec, Sampler};
use uwe::witness::{
    bounds, concurrence, det_partial_transpose, moments_direct, negativity, rescaled_witness,
    witness_value,
};
use uwe::DensityMatrix;

const BASE_SEED: u64 = 20_240_501;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn hs(index: u64) -> DensityMatrix {
    sample(RandomEnsembleSpec {
        kind: EnsembleKind::HilbertSchmidtMixed,
        seed: BASE_SEED + index,
    })
}

fn chain_violation(rho: &DensityMatrix) -> f64 {
    let w = rescaled_witness(witness_value(&moments_direct(rho)));
    let b = bounds(w).expect("w in range");
    let n = negativity(rho);
    let c = concurrence(rho);
    [b.lower - 1e-9 - n, n - c, c - b.upper - 1e-9]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

fn bound_chain() -> Outcome {
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..10_000 {
        let v = chain_violation(&hs(i));
        worst = worst.max(v);
        if v > 0.0 {
            violations += 1;
        }
    }
    Outcome {
        pass: violations == 0,
        detail: format!("10000 Hilbert-Schmidt states, {violations} violations, largest excess {worst:.3e}"),
    }
}

fn witness_is_determinant() -> Outcome {
    let worst = (0..1000)
        .map(|i| {
            let rho = hs(i);
            (witness_value(&moments_direct(&rho)) - det_partial_transpose(&rho)).abs()
        })
        .fold(0.0, f64::max);
    Outcome {
        pass: worst < 1e-10,
        detail: format!("1000 states, max |W - det| = {worst:.3e}"),
    }
}

fn moment_routes_agree() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let rho = hs(i);
        let direct = moments_direct(&rho);
        for n in 2..=4 {
            let mut values = vec![direct.get(n).unwrap()];
            values.push(moment_cycle(&rho, n).unwrap());
            if n >= 3 {
                values.push(moment_via_x(&rho, n).unwrap());
            }
            values.push(outcome_probabilities(&rho, n).unwrap().moment());
            for a in &values {
                for b in &values {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    Outcome {
        pass: worst < 1e-10,
        detail: format!("200 states, n = 2..4, max pairwise deviation {worst:.3e}"),
    }
}

fn x_spectra() -> Outcome {
    let values = |n| -> Vec<f64> { spectrum_x(n).unwrap().iter().map(|l| l.value).collect() };
    let (x3, x4) = (values(3), values(4));
    let count = projection_count().unwrap();
    Outcome {
        pass: x3 == [1.0, 4.0] && x4 == [0.0, 2.0, 4.0] && count == 7,
        detail: format!("X3 {x3:?}, X4 {x4:?}, projections {count}"),
    }
}

fn invariant_deviation(a: &InvariantSet, b: &InvariantSet) -> f64 {
    a.nine()
        .iter()
        .zip(b.nine())
        .chain(a.x.iter().zip(b.x))
        .chain(a.y.iter().zip(b.y))
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

fn makhlin_suite() -> Outcome {
    let identity = (0..1000)
        .map(|i| {
            let rho = hs(i);
            moments_from_invariants(&makhlin(&decompose(&rho))).max_deviation(&moments_direct(&rho))
        })
        .fold(0.0, f64::max);
    let mut sampler = Sampler::new(RandomEnsembleSpec {
        kind: EnsembleKind::HilbertSchmidtMixed,
        seed: BASE_SEED ^ 0x10ca1,
    });
    let mut invariance: f64 = 0.0;
    for i in 0..100 {
        let rho = hs(i);
        let local = sampler.haar_unitary(2).kron(&sampler.haar_unitary(2));
        let rotated = rho.transformed(&local).unwrap();
        invariance = invariance.max(invariant_deviation(&makhlin(&decompose(&rho)), &makhlin(&decompose(&rotated))));
    }
    Outcome {
        pass: identity < 1e-10 && invariance < 1e-9,
        detail: format!("moment identity {identity:.3e} over 1000 states, local-unitary drift {invariance:.3e} over 100 rotations"),
    }
}

fn symmetrization() -> Outcome {
    let (mut commutator, mut gap): (f64, f64) = (0.0, 0.0);
    for i in 0..50 {
        let rho = hs(i);
        for n in 2..=4 {
            commutator = commutator.max(symmetrized_commutator_norm(&rho, n).unwrap());
            gap = gap.max(symmetrized_projection_gap(&rho, n).unwrap());
        }
    }
    Outcome {
        pass: commutator < 1e-12 && gap < 1e-12,
        detail: format!("50 states, n = 2..4, commutator {commutator:.3e}, projection gap {gap:.3e}"),
    }
}

fn fixed_points() -> Outcome {
    let mut failures = Vec::new();
    let mut check = |name: &str, got: f64, want: f64, tol: f64| {
        if (got - want).abs() >= tol {
            failures.push(format!("{name}: {got} vs {want}"));
        }
    };

    let singlet = named_state(NamedState::Singlet).unwrap();
    check("singlet w", rescaled_witness(witness_value(&moments_direct(&singlet))), 1.0, 1e-12);
    check("singlet N", negativity(&singlet), 1.0, 1e-12);
    check("singlet C", concurrence(&singlet), 1.0, 1e-12);

    let half = named_state(NamedState::Werner(0.5)).unwrap();
    let w = rescaled_witness(witness_value(&moments_direct(&half)));
    check("werner(0.5) w", w, 27.0 / 256.0, 1e-12);
    check("werner(0.5) N", negativity(&half), 0.25, 1e-12);
    check("werner(0.5) C", concurrence(&half), 0.25, 1e-12);
    check("werner(0.5) f(w)", bounds(w).unwrap().lower, 0.25, 1e-8);

    let mut schmidt: f64 = 0.0;
    for k in 0..=100 {
        let l1 = (0.5 + 0.5 * k as f64 / 100.0).sqrt();
        let rho = named_state(NamedState::PureSchmidt(l1)).unwrap();
        let w = rescaled_witness(witness_value(&moments_direct(&rho)));
        schmidt = schmidt.max((concurrence(&rho) - bounds(w).unwrap().upper).abs());
    }
    check("schmidt C - w^1/4", schmidt, 0.0, 1e-9);

    let third = named_state(NamedState::Werner(1.0 / 3.0)).unwrap();
    check("werner(1/3) witness", witness_value(&moments_direct(&third)), 0.0, 1e-12);

    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("singlet, werner(0.5), 101 Schmidt states (max |C - w^1/4| {schmidt:.3e}), werner(1/3)")
        } else {
            failures.join("; ")
        },
    }
}

fn shot_estimation() -> Outcome {
    let rho = named_state(NamedState::Werner(0.8)).unwrap();
    let truth = det_partial_transpose(&rho);
    let seeds = 200u64;
    let mut covered = 0;
    let mut sq = [0.0, 0.0];
    for seed in 0..seeds {
        let (_, low) = simulate(&rho, [100_000; 3], BASE_SEED + seed, DEFAULT_BOOTSTRAP_RESAMPLES).unwrap();
        if low.ci_contains(truth) {
            covered += 1;
        }
        sq[0] += (low.witness_hat - truth).powi(2);
        let (_, high) = simulate(&rho, [400_000; 3], BASE_SEED + seeds + seed, 1).unwrap();
        sq[1] += (high.witness_hat - truth).powi(2);
    }
    let coverage = covered as f64 / seeds as f64;
    let ratio = (sq[0] / sq[1]).sqrt();
    Outcome {
        pass: coverage >= 0.9 && (1.6..=2.4).contains(&ratio),
        detail: format!("werner(0.8), 200 seeds: CI coverage {coverage:.3}, RMS ratio 1e5 -> 4e5 shots {ratio:.3}"),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("bound chain f(w) <= N <= C <= w^1/4", bound_chain),
        ("witness equals det of partial transpose", witness_is_determinant),
        ("direct, cycle, X and outcome-table moments agree", moment_routes_agree),
        ("X spectra and projection count", x_spectra),
        ("Makhlin identities and local invariance", makhlin_suite),
        ("symmetrized-state properties", symmetrization),
        ("analytic fixed points", fixed_points),
        ("finite-shot estimation", shot_estimation),
    ];
    let mut all = true;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        all &= outcome.pass;
        println!(
            "criterion {} {}: {} ({}) [{:.1}s]",
            k + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            name,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
