use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::attacks::model::{sample_branch, Branch, PhotonClass, PhotonModel};
use crate::attacks::{AttackStrategy, StoreSpec};
use crate::error::{Error, Result};
use crate::gf2::PositionSet;
use crate::protocol::ProtocolParams;
use crate::rng::stream;

/// Test phase of one run under the per-photon model: returns the error count.
fn sample_test_errors<R: Rng + ?Sized>(model: &PhotonModel, branch: &Branch, rng: &mut R) -> usize {
    let mut errors = 0;
    for &class in &branch.classes {
        // theta_hat agrees with theta with probability 1/2 for every class
        let matching: bool = rng.random();
        let tested: bool = rng.random();
        if matching && tested && rng.random_bool(model.test_error(class)) {
            errors += 1;
        }
    }
    errors
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoreTestStats {
    pub n: usize,
    pub fraction: f64,
    pub stored: usize,
    pub noise_p: f64,
    /// `stored / 8 + (n - stored) p / 4`.
    pub expected: f64,
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

impl StoreTestStats {
    /// `|mean - expected|` in standard errors.
    pub fn z_score(&self) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == self.expected {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - self.expected).abs() / self.std_error
        }
    }
}

/// Test errors of a receiver storing `round(fraction n)` random photons.
pub fn store_attack_test_statistics(
    params: &ProtocolParams,
    fraction: f64,
    trials: usize,
    seed: u64,
) -> Result<StoreTestStats> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::domain(format!("store fraction {fraction} outside [0, 1]")));
    }
    if trials == 0 {
        return Err(Error::domain("at least one trial is needed"));
    }
    let n = params.n;
    let stored = (fraction * n as f64).round() as usize;
    let strategy = AttackStrategy::StoreSubset {
        store: StoreSpec::Count(stored),
        avoid_in_sets: false,
    };
    let model = PhotonModel::new(params.noise_p, &strategy);
    let counts = (0..trials)
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            let branch = sample_branch(&strategy, n, &mut rng)?;
            Ok(sample_test_errors(&model, &branch, &mut rng) as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    let (mean, std_error) = mean_and_se(&counts);
    Ok(StoreTestStats {
        n,
        fraction,
        stored,
        noise_p: params.noise_p,
        expected: stored as f64 / 8.0 + (n - stored) as f64 * params.noise_p / 4.0,
        mean,
        std_error,
        trials,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomOkReport {
    pub trials: usize,
    pub pr_pass: f64,
    pub pr_pass_honest: f64,
    pub pr_pass_store_all: f64,
    /// `(pr_pass_honest + pr_pass_store_all) / 2`.
    pub mixture: f64,
    /// Standard error of `pr_pass - mixture`.
    pub std_error: f64,
}

/// Pass rate of the random-OK receiver next to its two branches, each
/// sampled independently.
pub fn random_ok_decomposition(params: &ProtocolParams, trials: usize, seed: u64) -> Result<RandomOkReport> {
    if trials == 0 {
        return Err(Error::domain("at least one trial is needed"));
    }
    let n = params.n;
    let limit = params.max_test_errors();
    let model = PhotonModel::new(params.noise_p, &AttackStrategy::RandomOk);
    let rate = |offset: u64, pick: &dyn Fn(&mut crate::rng::Rng) -> Result<Branch>| -> Result<f64> {
        let mut passed = 0usize;
        for i in 0..trials {
            let mut rng = stream(seed, (offset << 32) | i as u64);
            let branch = pick(&mut rng)?;
            passed += usize::from(sample_test_errors(&model, &branch, &mut rng) <= limit);
        }
        Ok(passed as f64 / trials as f64)
    };
    let all = rate(0, &|r| sample_branch(&AttackStrategy::RandomOk, n, r))?;
    let honest = rate(1, &|r| sample_branch(&AttackStrategy::Honest, n, r))?;
    let store = rate(2, &|_| {
        Ok(Branch {
            weight: 1.0,
            classes: vec![PhotonClass::Stored; n],
            exclude: vec![false; n],
        })
    })?;
    let t = trials as f64;
    let var = all * (1.0 - all) / t + 0.25 * (honest * (1.0 - honest) / t + store * (1.0 - store) / t);
    Ok(RandomOkReport {
        trials,
        pr_pass: all,
        pr_pass_honest: honest,
        pr_pass_store_all: store,
        mixture: 0.5 * (honest + store),
        std_error: var.sqrt(),
    })
}

/// Joint frequencies of the two distance indicators under the alternative
/// sampling (photons prepared as `|alpha>` in the committed bases).
/// `counts[j_ec][j_test]`, where an indicator is 1 when the distance between
/// `alpha` and the committed bits on its set exceeds the radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JTable {
    pub trials: usize,
    pub shortage: usize,
    pub radius_ec: usize,
    pub radius_test: usize,
    pub counts: [[usize; 2]; 2],
}

impl JTable {
    /// Fraction of non-shortage runs with a small distance on `E_c` and a
    /// passing test.
    pub fn small_and_pass(&self) -> f64 {
        let used = self.trials - self.shortage;
        if used == 0 {
            return 0.0;
        }
        self.counts[0][0] as f64 / used as f64
    }
}

pub fn j_indicator_table(
    params: &ProtocolParams,
    strategy: &AttackStrategy,
    trials: usize,
    seed: u64,
) -> Result<JTable> {
    params.validate()?;
    let n = params.n;
    let big_n = params.big_n();
    let model = PhotonModel::new(0.0, strategy);
    let radius_ec = params.small_distance_radius();
    let radius_test = params.max_test_errors();
    let mut table = JTable {
        trials,
        shortage: 0,
        radius_ec,
        radius_test,
        counts: [[0; 2]; 2],
    };
    for i in 0..trials {
        let mut rng = stream(seed, i as u64);
        let branch = sample_branch(strategy, n, &mut rng)?;
        let mut t0 = vec![false; n];
        let mut tested = vec![false; n];
        let mut differs = vec![false; n];
        for (k, &class) in branch.classes.iter().enumerate() {
            t0[k] = rng.random();
            tested[k] = rng.random();
            differs[k] = rng.random_bool(model.commit_flip_rate(class));
        }
        let pool = |want: bool| {
            PositionSet::from_predicate(n, |k| t0[k] == want && !tested[k] && !branch.exclude[k])
        };
        let (pool0, pool1) = (pool(true), pool(false));
        if pool0.len() < big_n || pool1.len() < big_n {
            table.shortage += 1;
            continue;
        }
        let c: bool = rng.random();
        let e_c = PositionSet::random_subset(if c { &pool1 } else { &pool0 }, big_n, &mut rng)?;
        let d_ec = e_c.iter().filter(|&k| differs[k]).count();
        let d_test = (0..n).filter(|&k| t0[k] && tested[k] && differs[k]).count();
        table.counts[usize::from(d_ec > radius_ec)][usize::from(d_test > radius_test)] += 1;
    }
    Ok(table)
}
