//! Exact outcome law of honest runs at very small sizes.

use std::collections::BTreeMap;

use crate::error::{ensure_len, Error, Result};
use crate::gf2::{BitMatrix, BitVec, LinearCodeSpec, PositionSet};
use crate::protocol::steps::bob_decode;
use crate::protocol::{noisy_outcome_probability, CodeChoice, Mode, ProtocolParams};
use crate::quantum::{BasisString, PhotonFrame, StateVector};

pub const ENUMERATION_MAX_PHOTONS: usize = 4;

/// `(w_hat, pass, b_hat)`; `b_hat` is `None` on abort, on `c = 1` and on a
/// failed decode.
pub type HonestOutcome = (BitVec, bool, Option<BitVec>);

fn all_codes(params: &ProtocolParams) -> Result<Vec<LinearCodeSpec>> {
    let big_n = params.big_n();
    let rows = params.r + params.m;
    Ok(match &params.code {
        CodeChoice::Fixed(c) => vec![c.clone()],
        CodeChoice::Yao => vec![LinearCodeSpec::yao(big_n)],
        CodeChoice::Random | CodeChoice::RandomFullRank => {
            let full = params.code == CodeChoice::RandomFullRank;
            let mut out = Vec::new();
            for bits in 0..1usize << (rows * big_n) {
                let f = BitMatrix::from_rows(
                    big_n,
                    (0..rows)
                        .map(|i| BitVec::from_index(big_n, (bits >> (i * big_n)) & ((1 << big_n) - 1)))
                        .collect(),
                )?;
                if !full || f.rank() == rows {
                    out.push(LinearCodeSpec::new(f, params.r, params.m)?);
                }
            }
            out
        }
    })
}

fn subsets_of(pool: &PositionSet, k: usize) -> Vec<PositionSet> {
    let n = pool.universe();
    (0..1usize << n)
        .map(|m| PositionSet::from_mask(n, m))
        .filter(|s| s.len() == k && s.iter().all(|i| pool.contains(i)))
        .collect()
}

/// Law of `(w_hat, pass, b_hat)` for an honest receiver and input `b`,
/// computed by summing over every random choice of both parties. The
/// receiver's outcomes come from the state vector in exact mode and from the
/// per-photon rule in classical mode.
pub fn honest_joint_distribution(params: &ProtocolParams, b: &BitVec) -> Result<BTreeMap<HonestOutcome, f64>> {
    params.validate()?;
    ensure_len("secret", params.m, b.len())?;
    let n = params.n;
    if n > ENUMERATION_MAX_PHOTONS {
        return Err(Error::Resource {
            what: "enumerated photons",
            requested: n,
            limit: ENUMERATION_MAX_PHOTONS,
        });
    }
    let big_n = params.big_n();
    let p = params.noise_p;
    let limit = params.max_test_errors();
    let codes = all_codes(params)?;
    let space = 1usize << n;
    let base = 1.0 / (codes.len() as f64 * (space * space * space * space) as f64);
    let mut law = BTreeMap::new();
    for code in &codes {
        let (g, h) = (code.g(), code.h());
        for w in 0..space {
            let wv = BitVec::from_index(n, w);
            for th in 0..space {
                let theta = BasisString::from_index(n, th);
                for thh in 0..space {
                    let theta_hat = BasisString::from_index(n, thh);
                    let w_hat_law = outcome_law(&wv, &theta, &theta_hat, p, params.mode)?;
                    for r in 0..space {
                        let r_set = PositionSet::from_mask(n, r);
                        for (wh, &pw) in w_hat_law.iter().enumerate() {
                            if pw == 0.0 {
                                continue;
                            }
                            let whv = BitVec::from_index(n, wh);
                            let weight = base * pw;
                            let errors = r_set
                                .iter()
                                .filter(|&i| theta.get(i) == theta_hat.get(i) && wv.get(i) != whv.get(i))
                                .count();
                            let pass = errors <= limit;
                            let mut add = |bh: Option<BitVec>, x: f64| {
                                *law.entry((whv.clone(), pass, bh)).or_insert(0.0) += x;
                            };
                            if !pass {
                                add(None, weight);
                                continue;
                            }
                            let t0 = theta.matching(&theta_hat)?;
                            let pool0 = t0.difference(&r_set)?;
                            let pool1 = t0.complement().difference(&r_set)?;
                            if pool0.len() < big_n || pool1.len() < big_n {
                                add(None, weight);
                                continue;
                            }
                            let pc0 = match params.force_c {
                                Some(0) => 1.0,
                                Some(_) => 0.0,
                                None => 0.5,
                            };
                            if pc0 < 1.0 {
                                add(None, weight * (1.0 - pc0));
                            }
                            if pc0 == 0.0 {
                                continue;
                            }
                            let e0s = subsets_of(&pool0, big_n);
                            let each = weight * pc0 / e0s.len() as f64;
                            for e0 in &e0s {
                                let we = wv.restrict(e0)?;
                                let s = g.matvec(&we)?;
                                let a = b.xor(&h.matvec(&we)?)?;
                                let bh = bob_decode(&whv.restrict(e0)?, &s, &g, &a, &h)?.map(|d| d.b_hat);
                                add(bh, each);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(law)
}

fn outcome_law(w: &BitVec, theta: &BasisString, theta_hat: &BasisString, p: f64, mode: Mode) -> Result<Vec<f64>> {
    let n = w.len();
    let space = 1usize << n;
    match mode {
        Mode::ExactQuantum => {
            let mut law = vec![0.0; space];
            let frames = theta_hat.frames();
            for flips in 0..space {
                let k = flips.count_ones() as i32;
                let pf = p.powi(k) * (1.0 - p).powi(n as i32 - k);
                if pf == 0.0 {
                    continue;
                }
                let sent = BitVec::from_index(n, w.to_index() ^ flips);
                let dist = StateVector::<f64>::bb84(&sent, theta)?.outcome_distribution(&frames)?;
                for (x, d) in law.iter_mut().zip(dist) {
                    *x += pf * d;
                }
            }
            Ok(law)
        }
        Mode::ClassicalFast => Ok((0..space)
            .map(|o| {
                let ov = BitVec::from_index(n, o);
                (0..n)
                    .map(|i| {
                        noisy_outcome_probability(
                            w.get(i),
                            theta.get(i),
                            PhotonFrame::Basis(theta_hat.get(i)),
                            ov.get(i),
                            p,
                        )
                    })
                    .product()
            })
            .collect()),
    }
}

/// Largest absolute difference between two outcome laws.
pub fn law_distance(a: &BTreeMap<HonestOutcome, f64>, b: &BTreeMap<HonestOutcome, f64>) -> f64 {
    a.keys()
        .chain(b.keys())
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_sum_to_one() {
        let mut p = ProtocolParams::new(3, 1, 0, 1);
        p.noise_p = 0.1;
        p.delta = 0.34;
        let b: BitVec = "1".parse().unwrap();
        let classical = honest_joint_distribution(&p, &b).unwrap();
        p.mode = Mode::ExactQuantum;
        let exact = honest_joint_distribution(&p, &b).unwrap();
        assert!((classical.values().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(law_distance(&classical, &exact) < 1e-12);
    }

    #[test]
    fn noiseless_decodes_are_correct() {
        let mut p = ProtocolParams::new(3, 1, 0, 1);
        p.force_c = Some(0);
        let b: BitVec = "0".parse().unwrap();
        let law = honest_joint_distribution(&p, &b).unwrap();
        assert!(law.keys().all(|(_, pass, bh)| *pass && bh.as_ref().is_none_or(|x| *x == b)));
    }
}
