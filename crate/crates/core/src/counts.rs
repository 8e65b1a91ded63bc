//! Photon-counting simulation: multinomial draws from chain distributions,
//! probability estimators, and repetition statistics for error bars.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::circuit::{
    chain_distribution, Basis, ChainConfig, CircuitError, JointTable2, JointTable3, MarginalPair,
};
use crate::edr::{
    weak_probe_disturbance_with_window, weak_probe_error_with_window, EdrError, EdrPoint, Method,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum CountsError {
    #[error("total count must be at least 1")]
    ZeroTotal,
    #[error("repetition count must be at least 1")]
    ZeroReps,
    #[error("cell counts sum to {got}, expected total {expected}")]
    CountSumMismatch { expected: u64, got: u64 },
    #[error("cell probability {0} is not a finite number in [0, 1]")]
    BadProbability(f64),
    #[error("column {0} of the conditioning outcome has zero counts")]
    ZeroColumn(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Edr(#[from] EdrError),
}

/// How a joint table is estimated from counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    /// P(i, j) = sum_k N_ijk / total. The default; yields a true joint
    /// distribution.
    GrandTotal,
    /// P(i, j) = sum_k N_ijk / sum_{i', k} N_{i'jk}: each column of the
    /// second outcome is normalized separately, reproducing the published
    /// estimator verbatim. The result conditions on that outcome (columns
    /// each sum to 1), so it is not a joint distribution; kept for
    /// comparison.
    Paper,
}

impl std::fmt::Display for NormMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NormMode::GrandTotal => "grand_total",
            NormMode::Paper => "paper",
        })
    }
}

impl std::str::FromStr for NormMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "grand_total" => Ok(NormMode::GrandTotal),
            "paper" => Ok(NormMode::Paper),
            other => Err(format!(
                "unknown normalization `{other}` (expected grand_total or paper)"
            )),
        }
    }
}

/// The chain settings a counts record was sampled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSettings<T: Scalar> {
    pub wp_strength: T,
    pub ma_strength: T,
    pub wp_basis: Basis,
}

/// One simulated counting run: detector counts indexed (WP, MA, post).
#[derive(Debug, Clone, PartialEq)]
pub struct CountsRecord<T: Scalar> {
    n: [[[u64; 2]; 2]; 2],
    total: u64,
    seed: u64,
    settings: ChainSettings<T>,
}

impl<T: Scalar> CountsRecord<T> {
    pub const CSV_HEADER: &'static str = "seed,total,n000,n001,n010,n011,n100,n101,n110,n111";

    pub fn new(
        n: [[[u64; 2]; 2]; 2],
        total: u64,
        seed: u64,
        settings: ChainSettings<T>,
    ) -> Result<Self, CountsError> {
        if total == 0 {
            return Err(CountsError::ZeroTotal);
        }
        let sum: u64 = n.iter().flatten().flatten().sum();
        if sum != total {
            return Err(CountsError::CountSumMismatch {
                expected: total,
                got: sum,
            });
        }
        Ok(Self {
            n,
            total,
            seed,
            settings,
        })
    }

    pub fn counts(&self) -> &[[[u64; 2]; 2]; 2] {
        &self.n
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn settings(&self) -> &ChainSettings<T> {
        &self.settings
    }

    /// Flat row matching [`Self::CSV_HEADER`]: counts in index order with
    /// the post outcome fastest.
    pub fn csv_row(&self) -> String {
        let mut row = format!("{},{}", self.seed, self.total);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    row.push(',');
                    row.push_str(&self.n[i][j][k].to_string());
                }
            }
        }
        row
    }
}

/// splitmix64 finalizer; full-avalanche mix of one word.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic sub-stream seed from a root seed and index words
/// (grid point, repetition, chain tag, ...).
pub fn derive_seed(root: u64, indices: &[u64]) -> u64 {
    let mut z = mix64(root);
    for ix in indices {
        z = mix64(z ^ *ix);
    }
    z
}

/// Multinomial draw of `total` events over the 8 chain outcomes, by
/// sequential conditional binomials. Deterministic given the seed.
pub fn sample_counts<T: Scalar>(
    p: &JointTable3<T>,
    total: u64,
    seed: u64,
    settings: ChainSettings<T>,
) -> Result<CountsRecord<T>, CountsError> {
    if total == 0 {
        return Err(CountsError::ZeroTotal);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut n = [[[0u64; 2]; 2]; 2];
    let mut remaining = total;
    let mut weight_left = 1.0f64;
    for cell in 0..8 {
        let (i, j, k) = (cell >> 2, (cell >> 1) & 1, cell & 1);
        if cell == 7 {
            n[i][j][k] = remaining;
            break;
        }
        let p_cell = p.get(i, j, k).to_f64().filter(|v| v.is_finite());
        let p_cell = p_cell.ok_or(CountsError::BadProbability(f64::NAN))?;
        if remaining == 0 {
            continue;
        }
        let cond = if weight_left > 0.0 {
            (p_cell / weight_left).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let draw = Binomial::new(remaining, cond)
            .map_err(|_| CountsError::BadProbability(cond))?
            .sample(&mut rng);
        n[i][j][k] = draw;
        remaining -= draw;
        weight_left = (weight_left - p_cell).max(0.0);
    }
    CountsRecord::new(n, total, seed, settings)
}

fn pair_counts<T: Scalar>(record: &CountsRecord<T>, pair: MarginalPair) -> [[u64; 2]; 2] {
    let mut m = [[0u64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                match pair {
                    MarginalPair::WpMa => m[i][j] += record.n[i][j][k],
                    MarginalPair::WpPost => m[i][k] += record.n[i][j][k],
                }
            }
        }
    }
    m
}

/// Estimated pair probabilities as raw entries. In `Paper` mode the entries
/// are per-column conditionals and sum to 2, not 1.
pub fn estimate_entries<T: Scalar>(
    record: &CountsRecord<T>,
    pair: MarginalPair,
    mode: NormMode,
) -> Result<[[T; 2]; 2], CountsError> {
    let m = pair_counts(record, pair);
    let mut entries = [[T::zero(); 2]; 2];
    match mode {
        NormMode::GrandTotal => {
            let total = T::lit(record.total as f64);
            for i in 0..2 {
                for x in 0..2 {
                    entries[i][x] = T::lit(m[i][x] as f64) / total;
                }
            }
        }
        NormMode::Paper => {
            for x in 0..2 {
                let col = m[0][x] + m[1][x];
                if col == 0 {
                    return Err(CountsError::ZeroColumn(x));
                }
                let col = T::lit(col as f64);
                for i in 0..2 {
                    entries[i][x] = T::lit(m[i][x] as f64) / col;
                }
            }
        }
    }
    Ok(entries)
}

/// Estimated joint table for an outcome pair. `Paper` mode fails the joint
/// normalization check whenever the estimate is not a distribution (its
/// entries sum to 2 by construction); the error then carries the defect.
pub fn estimate_joint<T: Scalar>(
    record: &CountsRecord<T>,
    pair: MarginalPair,
    mode: NormMode,
) -> Result<JointTable2<T>, CountsError> {
    Ok(JointTable2::new(estimate_entries(record, pair, mode)?)?)
}

/// sum_{i,x} v_i v_x P(i, x) with v = (+1, -1) over the estimated entries.
pub fn estimate_correlator<T: Scalar>(
    record: &CountsRecord<T>,
    pair: MarginalPair,
    mode: NormMode,
) -> Result<T, CountsError> {
    let e = estimate_entries(record, pair, mode)?;
    Ok(e[0][0] - e[0][1] - e[1][0] + e[1][1])
}

/// Repetition statistics: per-repetition estimates, their means, and the
/// RMS spread used as error bars (absent for a single repetition).
#[derive(Debug, Clone, PartialEq)]
pub struct RunStats<T: Scalar> {
    pub points: Vec<EdrPoint<T>>,
    pub mean_eps: T,
    pub mean_eta: T,
    pub spread_eps: Option<T>,
    pub spread_eta: Option<T>,
}

/// The exact quantities a sampled point is judged against; copied into each
/// repetition's [`EdrPoint`] alongside the sampled error and disturbance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointContext<T: Scalar> {
    pub strength: T,
    pub sigma_a: T,
    pub sigma_b: T,
    pub c_bound: T,
}

/// Samples both chains `reps` times at `total` events each and extracts the
/// weak-probe error and disturbance per repetition. Sub-streams are derived
/// from (seed, repetition, chain), so a fixed seed reproduces the run
/// exactly and repetitions are independent.
///
/// The radicand clamp window scales with the shot noise of the correlator
/// estimate (8 standard deviations at gain `gain` and `total` events), so
/// near-zero quantities clamp to zero instead of failing.
#[allow(clippy::too_many_arguments)]
pub fn run_repetitions<T: Scalar>(
    error_chain: &ChainConfig<T>,
    disturbance_chain: &ChainConfig<T>,
    gain: T,
    total: u64,
    reps: u32,
    seed: u64,
    norm: NormMode,
    context: PointContext<T>,
) -> Result<RunStats<T>, CountsError> {
    if reps == 0 {
        return Err(CountsError::ZeroReps);
    }
    if total == 0 {
        return Err(CountsError::ZeroTotal);
    }
    let p_err = chain_distribution(error_chain)?;
    let p_dist = chain_distribution(disturbance_chain)?;
    let window = shot_noise_window(gain, total);

    let mut points = Vec::with_capacity(reps as usize);
    for rep in 0..reps {
        let eps = {
            let record = sample_counts(
                &p_err,
                total,
                derive_seed(seed, &[rep as u64, 0]),
                ChainSettings {
                    wp_strength: gain,
                    ma_strength: context.strength,
                    wp_basis: error_chain.wp().basis(),
                },
            )?;
            let corr = estimate_correlator(&record, MarginalPair::WpMa, norm)?;
            weak_probe_error_with_window(corr, gain, window)?
        };
        let eta = {
            let record = sample_counts(
                &p_dist,
                total,
                derive_seed(seed, &[rep as u64, 1]),
                ChainSettings {
                    wp_strength: gain,
                    ma_strength: context.strength,
                    wp_basis: disturbance_chain.wp().basis(),
                },
            )?;
            let corr = estimate_correlator(&record, MarginalPair::WpPost, norm)?;
            weak_probe_disturbance_with_window(corr, gain, window)?
        };
        points.push(EdrPoint::new(
            context.strength,
            eps,
            eta,
            context.sigma_a,
            context.sigma_b,
            context.c_bound,
            Method::WeakProbe,
        )?);
    }

    let n = T::lit(reps as f64);
    let mean_eps = points.iter().map(|p| p.eps).sum::<T>() / n;
    let mean_eta = points.iter().map(|p| p.eta).sum::<T>() / n;
    let rms = |pick: fn(&EdrPoint<T>) -> T, mean: T| -> Option<T> {
        if reps < 2 {
            return None;
        }
        let sum_sq = points
            .iter()
            .map(|p| {
                let d = pick(p) - mean;
                d * d
            })
            .sum::<T>();
        Some((sum_sq / n).sqrt())
    };
    Ok(RunStats {
        mean_eps,
        mean_eta,
        spread_eps: rms(|p| p.eps, mean_eps),
        spread_eta: rms(|p| p.eta, mean_eta),
        points,
    })
}

/// Radicand clamp window: 8 standard deviations of 2 corr_hat / gain at
/// `total` events (the correlator estimate has variance at most 1/total).
pub fn shot_noise_window<T: Scalar>(gain: T, total: u64) -> T {
    let shot = T::lit(16.0) / (gain.abs() * T::lit(total as f64).sqrt());
    shot.max(T::EPS_FLAG)
}
