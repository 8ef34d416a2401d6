//! Finite-shot simulation of the sequential `P`-then-`P̄` measurement and
//! estimation of the witness from the resulting counts.
//!
//! Each moment `Π_n` is estimated from its own batch of `n`-copy shots as the
//! signed count average `(c₊₊ − c₊₋ − c₋₊ + c₋₋)/shots`. The witness estimate is
//! the plug-in of those three averages; its 95% interval comes from a
//! multinomial bootstrap over all three batches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::collective::{outcome_probabilities, OutcomeTable};
use crate::error::{Error, Result};
use crate::states::DensityMatrix;
use crate::witness::witness_from_moments;

pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 1000;

/// ChaCha stream reserved for bootstrap resampling; shot streams use `n`.
const BOOTSTRAP_STREAM: u64 = 0xB007;

/// Outcome counts for one copy count, in `OutcomeTable` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub n_copies: usize,
    pub shots: u64,
    pub counts: [u64; 4],
    pub seed: u64,
}

impl ShotRecord {
    pub fn moment(&self) -> f64 {
        signed_average(&self.counts, self.shots)
    }
}

fn signed_average(counts: &[u64; 4], shots: u64) -> f64 {
    (counts[0] as f64 - counts[1] as f64 - counts[2] as f64 + counts[3] as f64) / shots as f64
}

fn shot_rng(seed: u64, n_copies: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n_copies as u64);
    rng
}

/// Draws `shots` outcomes by inverse CDF over the four outcome probabilities.
pub fn sample_counts<R: Rng>(table: &OutcomeTable, shots: u64, rng: &mut R) -> [u64; 4] {
    let p = table.probabilities.map(|x| x.max(0.0));
    let total: f64 = p.iter().sum();
    let mut cumulative = [0.0; 3];
    let mut acc = 0.0;
    for k in 0..3 {
        acc += p[k] / total;
        cumulative[k] = acc;
    }
    let mut counts = [0u64; 4];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let k = cumulative.iter().position(|&c| u < c).unwrap_or(3);
        counts[k] += 1;
    }
    counts
}

/// Simulates `shots` runs of the `n`-copy measurement. The generator is
/// ChaCha8 seeded from `seed` on stream `n`, so the three moments can share a
/// seed without sharing draws.
pub fn sample_shots(rho: &DensityMatrix, n_copies: usize, shots: u64, seed: u64) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::ZeroShots { n_copies });
    }
    let table = outcome_probabilities(rho, n_copies)?;
    let counts = sample_counts(&table, shots, &mut shot_rng(seed, n_copies));
    Ok(ShotRecord {
        n_copies,
        shots,
        counts,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessEstimate {
    pub pi2_hat: f64,
    pub pi3_hat: f64,
    pub pi4_hat: f64,
    pub witness_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Shots spent on `Π₂`, `Π₃`, `Π₄`.
    pub shots_per_moment: [u64; 3],
    pub bootstrap_resamples: usize,
}

impl WitnessEstimate {
    pub fn ci_contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }

    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }
}

/// Witness from outcome frequencies `[Π₂ table, Π₃ table, Π₄ table]`. Exact
/// probabilities give the exact witness.
pub fn plug_in_witness(tables: &[OutcomeTable; 3]) -> f64 {
    witness_from_moments(tables[0].moment(), tables[1].moment(), tables[2].moment())
}

fn ordered_records(records: &[ShotRecord]) -> Result<[ShotRecord; 3]> {
    let find = |n: usize| -> Result<ShotRecord> {
        let record = *records
            .iter()
            .find(|r| r.n_copies == n)
            .ok_or(Error::MissingRecord(n))?;
        if record.shots == 0 {
            return Err(Error::ZeroShots { n_copies: n });
        }
        let total: u64 = record.counts.iter().sum();
        if total != record.shots {
            return Err(Error::ParameterOutOfRange(format!(
                "counts for {n} copies sum to {total}, expected {}",
                record.shots
            )));
        }
        Ok(record)
    };
    Ok([find(2)?, find(3)?, find(4)?])
}

fn resample_counts<R: Rng>(counts: &[u64; 4], shots: u64, rng: &mut R) -> [u64; 4] {
    let mut out = [0u64; 4];
    let mut remaining = shots;
    let mut mass_left = shots;
    for k in 0..3 {
        if remaining == 0 || mass_left == 0 {
            break;
        }
        let q = (counts[k] as f64 / mass_left as f64).min(1.0);
        let draw = Binomial::new(remaining, q).expect("q is a probability").sample(rng);
        out[k] = draw;
        remaining -= draw;
        mass_left -= counts[k];
    }
    out[3] = remaining;
    out
}

/// Percentile of sorted data with linear interpolation between order
/// statistics.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Combines one record per `n ∈ {2, 3, 4}` into a witness estimate with a
/// percentile bootstrap interval. The bootstrap generator is derived from the
/// record seeds, so the result is a pure function of its inputs.
pub fn estimate(records: &[ShotRecord], bootstrap_resamples: usize) -> Result<WitnessEstimate> {
    let recs = ordered_records(records)?;
    let [pi2, pi3, pi4] = recs.map(|r| r.moment());
    let witness_hat = witness_from_moments(pi2, pi3, pi4);

    let (ci_low, ci_high) = if bootstrap_resamples == 0 {
        (witness_hat, witness_hat)
    } else {
        let seed = recs
            .iter()
            .fold(0x5EED_u64, |h, r| h.rotate_left(21).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ r.seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(BOOTSTRAP_STREAM);
        let mut replicas: Vec<f64> = (0..bootstrap_resamples)
            .map(|_| {
                let m = recs.map(|r| signed_average(&resample_counts(&r.counts, r.shots, &mut rng), r.shots));
                witness_from_moments(m[0], m[1], m[2])
            })
            .collect();
        replicas.sort_by(f64::total_cmp);
        (percentile(&replicas, 0.025), percentile(&replicas, 0.975))
    };

    Ok(WitnessEstimate {
        pi2_hat: pi2,
        pi3_hat: pi3,
        pi4_hat: pi4,
        witness_hat,
        ci_low,
        ci_high,
        shots_per_moment: recs.map(|r| r.shots),
        bootstrap_resamples,
    })
}

/// Samples all three moments from one seed and estimates the witness.
pub fn simulate(
    rho: &DensityMatrix,
    shots_per_moment: [u64; 3],
    seed: u64,
    bootstrap_resamples: usize,
) -> Result<(Vec<ShotRecord>, WitnessEstimate)> {
    let records = (2..=4)
        .zip(shots_per_moment)
        .map(|(n, shots)| sample_shots(rho, n, shots, seed))
        .collect::<Result<Vec<_>>>()?;
    let est = estimate(&records, bootstrap_resamples)?;
    Ok((records, est))
}
