//! Per-photon description of the strategy family, shared by the fast
//! test-phase samplers and the exact information accounting.

use rand::Rng;

use crate::attacks::{AttackStrategy, StoreSpec};
use crate::error::{Error, Result};
use crate::gf2::PositionSet;
use crate::protocol::noisy_outcome_probability;
use crate::quantum::{Basis, PhotonFrame};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum PhotonClass {
    /// Measured at once in the committed random basis.
    Honest,
    /// Kept until `theta` is announced; committed bit is random.
    Stored,
    /// Measured at once in the fixed angled frame.
    Angle,
}

/// One receiver behaviour with its probability (the random-OK coin gives two).
#[derive(Clone, Debug)]
pub(crate) struct Branch {
    pub weight: f64,
    pub classes: Vec<PhotonClass>,
    /// Positions the receiver keeps out of `E_0` and `E_1`.
    pub exclude: Vec<bool>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct PhotonModel {
    pub p: f64,
    pub angle: f64,
}

/// `|<meas_v | state_o>|^2` for single-photon frames.
fn overlap_sqr(state: PhotonFrame, o: usize, meas: PhotonFrame, v: usize) -> f64 {
    let s = state.matrix::<f64>();
    let m = meas.matrix::<f64>();
    let amp = s[0][o] * m[0][v] + s[1][o] * m[1][v];
    amp * amp
}

impl PhotonModel {
    pub fn new(p: f64, strategy: &AttackStrategy) -> Self {
        let angle = match strategy {
            AttackStrategy::FixedBasis { angle } => *angle,
            _ => 0.0,
        };
        PhotonModel { p, angle }
    }

    fn angle_frame(&self) -> PhotonFrame {
        PhotonFrame::Angle(self.angle)
    }

    /// Basis committed by an angled receiver.
    pub fn angle_basis(&self) -> Basis {
        self.angle_frame().nearest_basis()
    }

    /// Error probability at a tested position whose bases agree.
    pub fn test_error(&self, class: PhotonClass) -> f64 {
        match class {
            PhotonClass::Honest => self.p,
            PhotonClass::Stored => 0.5,
            PhotonClass::Angle => {
                let b = self.angle_basis();
                [false, true]
                    .iter()
                    .map(|&w| 0.5 * noisy_outcome_probability(w, b, self.angle_frame(), !w, self.p))
                    .sum()
            }
        }
    }

    /// `P(v | w)` for the receiver's final outcome at a position whose bases disagree.
    pub fn mismatched_channel(&self, class: PhotonClass) -> [[f64; 2]; 2] {
        let (enc, frame) = match class {
            PhotonClass::Honest => (Basis::Plus, PhotonFrame::Basis(Basis::Cross)),
            PhotonClass::Stored => (Basis::Plus, PhotonFrame::Basis(Basis::Plus)),
            PhotonClass::Angle => (self.angle_basis().opposite(), self.angle_frame()),
        };
        let mut ch = [[0.0; 2]; 2];
        for (w, row) in ch.iter_mut().enumerate() {
            for (v, x) in row.iter_mut().enumerate() {
                *x = noisy_outcome_probability(w == 1, enc, frame, v == 1, self.p);
            }
        }
        ch
    }

    /// Probability that the view's photon, read in the committed basis,
    /// differs from the committed bit, at a position whose bases disagree.
    pub fn mismatched_defect_rate(&self, class: PhotonClass) -> f64 {
        match class {
            PhotonClass::Honest => 0.0,
            PhotonClass::Stored => 0.5,
            PhotonClass::Angle => {
                let b = PhotonFrame::Basis(self.angle_basis());
                (0..2).map(|o| 0.5 * overlap_sqr(self.angle_frame(), o, b, 1 - o)).sum()
            }
        }
    }

    /// Same, for the alternative sampling where the photon is `|alpha>` in the
    /// committed basis and the receiver's processing yields the committed bit.
    pub fn commit_flip_rate(&self, class: PhotonClass) -> f64 {
        match class {
            PhotonClass::Honest => 0.0,
            PhotonClass::Stored => 0.5,
            PhotonClass::Angle => self.mismatched_defect_rate(PhotonClass::Angle),
        }
    }
}

fn uniform_classes(n: usize, class: PhotonClass) -> Branch {
    Branch {
        weight: 1.0,
        classes: vec![class; n],
        exclude: vec![false; n],
    }
}

fn stored_branch(n: usize, f: &PositionSet, avoid: bool, weight: f64) -> Branch {
    let classes = (0..n)
        .map(|i| if f.contains(i) { PhotonClass::Stored } else { PhotonClass::Honest })
        .collect();
    Branch {
        weight,
        classes,
        exclude: (0..n).map(|i| avoid && f.contains(i)).collect(),
    }
}

/// Every behaviour the strategy can take, with its probability. A random-size
/// store set enumerates all subsets of that size.
pub(crate) fn branches(strategy: &AttackStrategy, n: usize) -> Result<Vec<Branch>> {
    Ok(match strategy {
        AttackStrategy::Honest => vec![uniform_classes(n, PhotonClass::Honest)],
        AttackStrategy::FixedBasis { .. } => vec![uniform_classes(n, PhotonClass::Angle)],
        AttackStrategy::RandomOk => {
            let mut a = uniform_classes(n, PhotonClass::Honest);
            let mut b = uniform_classes(n, PhotonClass::Stored);
            a.weight = 0.5;
            b.weight = 0.5;
            vec![a, b]
        }
        AttackStrategy::StoreSubset { store, avoid_in_sets } => match store {
            StoreSpec::Positions(p) => vec![stored_branch(n, &PositionSet::new(n, p.clone())?, *avoid_in_sets, 1.0)],
            StoreSpec::Count(k) => {
                if *k > n {
                    return Err(Error::domain(format!("cannot store {k} of {n} photons")));
                }
                let subsets: Vec<usize> = (0..1usize << n).filter(|m| m.count_ones() as usize == *k).collect();
                let w = 1.0 / subsets.len() as f64;
                subsets
                    .into_iter()
                    .map(|m| stored_branch(n, &PositionSet::from_mask(n, m), *avoid_in_sets, w))
                    .collect()
            }
        },
        AttackStrategy::InterceptResend => {
            return Err(Error::domain("intercept-resend is an eavesdropper strategy, not a receiver"));
        }
    })
}

/// Draws one behaviour for a single run.
pub(crate) fn sample_branch<R: Rng + ?Sized>(strategy: &AttackStrategy, n: usize, rng: &mut R) -> Result<Branch> {
    Ok(match strategy {
        AttackStrategy::RandomOk => {
            if rng.random() {
                uniform_classes(n, PhotonClass::Stored)
            } else {
                uniform_classes(n, PhotonClass::Honest)
            }
        }
        AttackStrategy::StoreSubset {
            store: StoreSpec::Count(k),
            avoid_in_sets,
        } => {
            let f = PositionSet::random_subset(&PositionSet::full(n), *k, rng)?;
            stored_branch(n, &f, *avoid_in_sets, 1.0)
        }
        other => branches(other, n)?.remove(0),
    })
}

/// `P(sum of independent Bernoulli(probs) <= limit)`.
pub(crate) fn poisson_binomial_cdf(probs: impl IntoIterator<Item = f64>, limit: usize) -> f64 {
    // dist[j] = P(j successes), truncated at limit + 1 (the overflow bucket)
    let mut dist = vec![0.0; limit + 2];
    dist[0] = 1.0;
    for q in probs {
        for j in (0..dist.len()).rev() {
            let stay = dist[j] * (1.0 - q);
            let from = if j > 0 { dist[j - 1] * q } else { 0.0 };
            dist[j] = if j == limit + 1 { dist[j] + from } else { stay + from };
        }
    }
    dist[..=limit].iter().sum()
}
