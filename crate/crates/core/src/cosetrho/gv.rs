use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{binary_entropy_inverse, min_distance_of_rows, BitMatrix};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GvTrial {
    pub trial: usize,
    /// `None` when the span is `{0}` (distance +infinity).
    pub d_n: Option<usize>,
    /// `d_n / N`.
    pub ratio: Option<f64>,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GvReport {
    pub big_n: usize,
    pub rows: usize,
    pub eta: f64,
    pub threshold: f64,
    pub trials: Vec<GvTrial>,
}

impl GvReport {
    pub fn fraction(&self) -> f64 {
        let ok = self.trials.iter().filter(|t| t.satisfied).count();
        ok as f64 / self.trials.len() as f64
    }
}

/// `H^-1(1 - rows/N) - eta`.
pub fn gv_threshold(big_n: usize, rows: usize, eta: f64) -> Result<f64> {
    Ok(binary_entropy_inverse(1.0 - rows as f64 / big_n as f64)? - eta)
}

/// Samples `trials` uniform `rows x N` matrices, trial `i` on stream `i` of
/// `seed`, and checks each relative distance against the threshold.
pub fn gv_bound_trial(big_n: usize, rows: usize, eta: f64, trials: usize, seed: u64) -> Result<GvReport> {
    if rows >= big_n {
        return Err(Error::domain(format!("rows = {rows} must be below N = {big_n}")));
    }
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    if rows > crate::gf2::MIN_DISTANCE_ROW_CAP {
        return Err(Error::Resource {
            what: "min_distance span rows",
            requested: rows,
            limit: crate::gf2::MIN_DISTANCE_ROW_CAP,
        });
    }
    let threshold = gv_threshold(big_n, rows, eta)?;
    let trials = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let f = BitMatrix::random(rows, big_n, &mut r);
            let d_n = min_distance_of_rows(&f)?;
            let ratio = d_n.map(|d| d as f64 / big_n as f64);
            Ok(GvTrial {
                trial: i,
                d_n,
                ratio,
                satisfied: ratio.is_none_or(|q| q > threshold),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GvReport {
        big_n,
        rows,
        eta,
        threshold,
        trials,
    })
}
