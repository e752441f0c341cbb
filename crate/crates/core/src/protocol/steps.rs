use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};
use crate::gf2::{BitMatrix, BitVec, LinearCodeSpec, PositionSet};
use crate::protocol::{CodeChoice, CommitId, CommitmentOracle, ProtocolParams};
use crate::quantum::{Basis, BasisString};

/// Largest coset `bob_decode` scans.
pub const DECODE_COSET_CAP: usize = 1 << 20;

/// Step 1 and 3: the code `f`, the string `w` and the bases `theta`.
pub fn alice_setup<R: Rng + ?Sized>(
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<(LinearCodeSpec, BitVec, BasisString)> {
    params.validate()?;
    let big_n = params.big_n();
    let code = match &params.code {
        CodeChoice::Random => LinearCodeSpec::random(big_n, params.r, params.m, rng)?,
        CodeChoice::RandomFullRank => loop {
            let c = LinearCodeSpec::random(big_n, params.r, params.m, rng)?;
            if c.is_full_rank() {
                break c;
            }
        },
        CodeChoice::Yao => LinearCodeSpec::yao(big_n),
        CodeChoice::Fixed(c) => c.clone(),
    };
    let w = BitVec::random(params.n, rng);
    let theta = BasisString::random(params.n, rng);
    Ok((code, w, theta))
}

/// Each position joins `R` independently with probability 1/2.
pub fn choose_test_set<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PositionSet {
    let coins: Vec<bool> = (0..n).map(|_| rng.random()).collect();
    PositionSet::from_predicate(n, |i| coins[i])
}

/// The receiver's committed strings, one commitment per position.
#[derive(Debug, Default)]
pub struct Commitments {
    pub bases: CommitmentOracle<Basis>,
    pub bits: CommitmentOracle<bool>,
    pub theta_hat_ids: Vec<CommitId>,
    pub w_hat_ids: Vec<CommitId>,
}

impl Commitments {
    pub fn commit(theta_hat: &BasisString, w_hat: &BitVec) -> Self {
        let mut c = Commitments::default();
        c.theta_hat_ids = c.bases.commit_all(theta_hat.iter());
        c.w_hat_ids = c.bits.commit_all(w_hat.iter());
        c
    }
}

/// What Alice learns in step 5.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub pass: bool,
    pub test_errors: usize,
    /// `theta_hat[R]` and `w_hat[R]` as opened.
    pub opened_theta_hat: BasisString,
    pub opened_w_hat: BitVec,
}

/// Step 5: opens the commitments at `R` and counts matching-basis errors.
pub fn alice_test(
    w: &BitVec,
    theta: &BasisString,
    commits: &mut Commitments,
    r_set: &PositionSet,
    max_errors: usize,
) -> Result<TestOutcome> {
    ensure_len("test bases", w.len(), theta.len())?;
    ensure_len("test set", w.len(), r_set.universe())?;
    let mut errors = 0;
    let mut bases = Vec::with_capacity(r_set.len());
    let mut bits = Vec::with_capacity(r_set.len());
    for i in r_set.iter() {
        let missing = || Error::ProtocolViolation(format!("no commitment for position {i}"));
        let tb = commits.bases.open(*commits.theta_hat_ids.get(i).ok_or_else(missing)?)?;
        let wb = commits.bits.open(*commits.w_hat_ids.get(i).ok_or_else(missing)?)?;
        if tb == theta.get(i) && wb != w.get(i) {
            errors += 1;
        }
        bases.push(tb);
        bits.push(wb);
    }
    Ok(TestOutcome {
        pass: errors <= max_errors,
        test_errors: errors,
        opened_theta_hat: BasisString::new(bases),
        opened_w_hat: BitVec::from_bools(&bits),
    })
}

/// `E_0`, `E_1` and the order in which the receiver announced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChosenSets {
    pub e0: PositionSet,
    /// Absent in QKD, where only `E_0` is built.
    pub e1: Option<PositionSet>,
    /// `true` when `E_1` was announced first.
    pub swapped: bool,
}

impl ChosenSets {
    pub fn announced(&self) -> Vec<PositionSet> {
        match (&self.e1, self.swapped) {
            (Some(e1), true) => vec![e1.clone(), self.e0.clone()],
            (Some(e1), false) => vec![self.e0.clone(), e1.clone()],
            (None, _) => vec![self.e0.clone()],
        }
    }

    pub fn get(&self, c: u8) -> Option<&PositionSet> {
        if c == 0 {
            Some(&self.e0)
        } else {
            self.e1.as_ref()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub t0: PositionSet,
    pub t1: PositionSet,
    /// `None` on a set shortage.
    pub sets: Option<ChosenSets>,
}

/// Step 6. `exclude` removes positions from both pools (a storing receiver
/// keeping its stored photons out of the sets). With `both = false` only
/// `E_0` is drawn, as in QKD.
pub fn partition_and_choose_sets<R: Rng + ?Sized>(
    theta: &BasisString,
    theta_hat: &BasisString,
    r_set: &PositionSet,
    big_n: usize,
    exclude: &PositionSet,
    both: bool,
    rng: &mut R,
) -> Result<Partition> {
    let t0 = theta.matching(theta_hat)?;
    let t1 = t0.complement();
    let pool0 = t0.difference(r_set)?.difference(exclude)?;
    let pool1 = t1.difference(r_set)?.difference(exclude)?;
    let short = pool0.len() < big_n || (both && pool1.len() < big_n);
    if short {
        return Ok(Partition { t0, t1, sets: None });
    }
    let e0 = PositionSet::random_subset(&pool0, big_n, rng)?;
    let (e1, swapped) = if both {
        let e1 = PositionSet::random_subset(&pool1, big_n, rng)?;
        (Some(e1), rng.random())
    } else {
        (None, false)
    };
    Ok(Partition {
        t0,
        t1,
        sets: Some(ChosenSets { e0, e1, swapped }),
    })
}

/// Step 7: `s = g w[E_c]`, `a = b + h w[E_c]`.
pub fn alice_announce_correction(
    b: &BitVec,
    w: &BitVec,
    e_c: &PositionSet,
    g: &BitMatrix,
    h: &BitMatrix,
) -> Result<(BitVec, BitVec)> {
    ensure_len("announced set", g.ncols(), e_c.len())?;
    ensure_len("secret length", h.nrows(), b.len())?;
    let we = w.restrict(e_c)?;
    let s = g.matvec(&we)?;
    let a = b.xor(&h.matvec(&we)?)?;
    Ok((s, a))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decoded {
    pub corrected: BitVec,
    pub b_hat: BitVec,
}

/// Step 8: nearest element of `{beta : g beta = s}` to `w_hat_ec` (ties to the
/// lexicographically smallest), then `b_hat = a + h corrected`. `None` when the
/// syndrome is unreachable.
pub fn bob_decode(
    w_hat_ec: &BitVec,
    s: &BitVec,
    g: &BitMatrix,
    a: &BitVec,
    h: &BitMatrix,
) -> Result<Option<Decoded>> {
    ensure_len("decode input", g.ncols(), w_hat_ec.len())?;
    ensure_len("decode syndrome", g.nrows(), s.len())?;
    ensure_len("decode mask", h.nrows(), a.len())?;
    let sol = g.solve_affine(s)?;
    let Some(base) = &sol.particular else {
        return Ok(None);
    };
    let dim = sol.kernel_basis.len();
    if dim >= usize::BITS as usize || 1usize << dim > DECODE_COSET_CAP {
        return Err(Error::Resource {
            what: "decode coset size",
            requested: 1usize.checked_shl(dim as u32).unwrap_or(usize::MAX),
            limit: DECODE_COSET_CAP,
        });
    }
    let mut best: Option<(usize, BitVec)> = None;
    for beta in crate::gf2::span_elements(base, &sol.kernel_basis) {
        let d = beta.hamming_distance(w_hat_ec)?;
        let better = match &best {
            None => true,
            Some((bd, bb)) => d < *bd || (d == *bd && beta < *bb),
        };
        if better {
            best = Some((d, beta));
        }
    }
    let (_, corrected) = best.expect("a consistent coset is non-empty");
    let b_hat = a.xor(&h.matvec(&corrected)?)?;
    Ok(Some(Decoded { corrected, b_hat }))
}
