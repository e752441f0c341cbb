use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVec, PositionSet};
use crate::protocol::channel::sample_classical_photon;
use crate::protocol::{Mode, Reception};
use crate::quantum::{Basis, BasisString, PhotonFrame, StateVector};

/// Which photons a storing receiver keeps unmeasured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoreSpec {
    Positions(Vec<usize>),
    /// A uniformly random subset of this size, drawn per run.
    Count(usize),
}

/// Receiver (or eavesdropper) behaviour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AttackStrategy {
    Honest,
    /// Keeps the photons in `store` until the bases are announced and commits
    /// random bits for them. With `avoid_in_sets` the stored positions are
    /// kept out of `E_0` and `E_1`.
    StoreSubset {
        store: StoreSpec,
        #[serde(default)]
        avoid_in_sets: bool,
    },
    /// Measures every photon in the frame rotated by `angle` radians from `+`.
    FixedBasis { angle: f64 },
    /// One fair coin: store everything on heads, behave honestly on tails.
    RandomOk,
    /// Eavesdropper measuring each photon in a random BB84 basis and resending.
    InterceptResend,
}

impl AttackStrategy {
    pub fn needs_storage(&self) -> bool {
        matches!(self, AttackStrategy::StoreSubset { .. } | AttackStrategy::RandomOk)
    }

    pub fn avoids_stored_in_sets(&self) -> bool {
        matches!(self, AttackStrategy::StoreSubset { avoid_in_sets: true, .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            AttackStrategy::Honest => "honest",
            AttackStrategy::StoreSubset { .. } => "store-subset",
            AttackStrategy::FixedBasis { .. } => "fixed-basis",
            AttackStrategy::RandomOk => "random-ok",
            AttackStrategy::InterceptResend => "intercept-resend",
        }
    }

    /// Rejects combinations the run's mode cannot realise.
    pub fn check_mode(&self, mode: Mode) -> Result<()> {
        if self.needs_storage() && mode != Mode::ExactQuantum {
            return Err(Error::Mode(format!(
                "{} keeps photons in quantum memory and needs exact_quantum mode",
                self.label()
            )));
        }
        Ok(())
    }
}

/// Receiver state after step 4: the committed strings plus any photons still held.
#[derive(Clone, Debug)]
pub struct BobState {
    pub theta_hat: BasisString,
    pub w_hat: BitVec,
    /// Frame used for each photon measured in step 4; `None` for stored ones.
    pub frames: Vec<Option<PhotonFrame>>,
    pub stored: PositionSet,
    /// The coin of the random-OK strategy.
    pub ok: Option<bool>,
    /// Measurement results known to the receiver (stored slots filled by [`BobState::finish`]).
    pub outcomes: BitVec,
    held: Held,
}

#[derive(Clone, Debug)]
enum Held {
    Nothing,
    Quantum(StateVector<f64>),
}

impl BobState {
    /// Measures the stored photons in the announced bases `theta`.
    pub fn finish<R: Rng + ?Sized>(&mut self, theta: &BasisString, rng: &mut R) -> Result<()> {
        if let Held::Quantum(state) = &mut self.held {
            for i in self.stored.iter() {
                let bit = state.measure_photon(i, PhotonFrame::Basis(theta.get(i)), rng);
                self.outcomes.set(i, bit);
            }
        }
        self.held = Held::Nothing;
        Ok(())
    }

    pub fn has_deferred(&self) -> bool {
        matches!(self.held, Held::Quantum(_)) && !self.stored.is_empty()
    }
}

/// Step 2 and 4 for the receiver: commits bases and bits according to the strategy.
/// `choices` drives the receiver's own coins, `measure` the Born sampling.
pub fn apply_strategy<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    strategy: &AttackStrategy,
    reception: &Reception,
    choices: &mut R1,
    measure: &mut R2,
) -> Result<BobState> {
    strategy.check_mode(reception.mode())?;
    let n = reception.n();
    let (theta_hat, frames, stored, ok) = match strategy {
        AttackStrategy::Honest => {
            let th = BasisString::random(n, choices);
            let frames = th.frames().into_iter().map(Some).collect();
            (th, frames, PositionSet::empty(n), None)
        }
        AttackStrategy::FixedBasis { angle } => {
            let fr = PhotonFrame::Angle(*angle);
            (BasisString::uniform(n, fr.nearest_basis()), vec![Some(fr); n], PositionSet::empty(n), None)
        }
        AttackStrategy::StoreSubset { store, .. } => {
            let th = BasisString::random(n, choices);
            let f = match store {
                StoreSpec::Positions(p) => PositionSet::new(n, p.clone())?,
                StoreSpec::Count(k) => PositionSet::random_subset(&PositionSet::full(n), *k, choices)?,
            };
            let frames = (0..n).map(|i| (!f.contains(i)).then(|| PhotonFrame::Basis(th.get(i)))).collect();
            (th, frames, f, None)
        }
        AttackStrategy::RandomOk => {
            let ok: bool = choices.random();
            let th = BasisString::random(n, choices);
            if ok {
                (th, vec![None; n], PositionSet::full(n), Some(true))
            } else {
                let frames = th.frames().into_iter().map(Some).collect();
                (th, frames, PositionSet::empty(n), Some(false))
            }
        }
        AttackStrategy::InterceptResend => {
            return Err(Error::domain("intercept-resend is an eavesdropper strategy, not a receiver"));
        }
    };
    // Random commitments for stored photons.
    let random_bits = BitVec::random(n, choices);
    let mut outcomes = BitVec::zeros(n);
    let held = match reception {
        Reception::Quantum { state } => {
            let mut work = state.clone();
            for (i, fr) in frames.iter().enumerate() {
                if let Some(fr) = fr {
                    outcomes.set(i, work.measure_photon(i, *fr, measure));
                }
            }
            Held::Quantum(work)
        }
        Reception::Classical { w, theta, p } => {
            for (i, fr) in frames.iter().enumerate() {
                if let Some(fr) = fr {
                    outcomes.set(i, sample_classical_photon(w.get(i), theta.get(i), *fr, *p, measure));
                }
            }
            Held::Nothing
        }
    };
    let mut w_hat = outcomes.clone();
    for i in stored.iter() {
        w_hat.set(i, random_bits.get(i));
    }
    Ok(BobState {
        theta_hat,
        w_hat,
        frames,
        stored,
        ok,
        outcomes,
        held,
    })
}

/// Eavesdropper measuring every photon of `|psi_{w, theta}>` in random bases.
/// Returns her outcomes and bases, which she re-encodes and forwards.
pub fn intercept_resend<R: Rng + ?Sized>(
    w: &BitVec,
    theta: &BasisString,
    mode: Mode,
    rng: &mut R,
) -> Result<(BitVec, BasisString)> {
    let eve = BasisString::random(w.len(), rng);
    let out = match mode {
        Mode::ExactQuantum => StateVector::<f64>::bb84(w, theta)?.measure_in_bases(&eve, rng)?.0,
        Mode::ClassicalFast => BitVec::from_bools(
            &(0..w.len())
                .map(|i| sample_classical_photon(w.get(i), theta.get(i), PhotonFrame::Basis(eve.get(i)), 0.0, rng))
                .collect::<Vec<_>>(),
        ),
    };
    Ok((out, eve))
}

/// Committed basis a fixed-angle receiver reports.
pub fn fixed_basis_commitment(angle: f64) -> Basis {
    PhotonFrame::Angle(angle).nearest_basis()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{transmit, ChannelModel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(mode: Mode, seed: u64) -> (BitVec, BasisString, Reception, ChaCha8Rng) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = BitVec::random(6, &mut rng);
        let th = BasisString::random(6, &mut rng);
        let rec = transmit(&w, &th, ChannelModel::Noiseless, mode, &mut rng).unwrap();
        (w, th, rec, rng)
    }

    #[test]
    fn honest_matches_on_agreeing_bases() {
        for mode in [Mode::ExactQuantum, Mode::ClassicalFast] {
            let (w, th, rec, mut rng) = setup(mode, 5);
            let mut m = ChaCha8Rng::seed_from_u64(6);
            let bob = apply_strategy(&AttackStrategy::Honest, &rec, &mut rng, &mut m).unwrap();
            for i in 0..6 {
                if bob.theta_hat.get(i) == th.get(i) {
                    assert_eq!(bob.w_hat.get(i), w.get(i));
                }
            }
            assert!(bob.stored.is_empty());
        }
    }

    #[test]
    fn stored_photons_recovered_after_announcement() {
        let (w, th, rec, mut rng) = setup(Mode::ExactQuantum, 8);
        let mut m = ChaCha8Rng::seed_from_u64(9);
        let s = AttackStrategy::StoreSubset {
            store: StoreSpec::Positions(vec![1, 4]),
            avoid_in_sets: false,
        };
        let mut bob = apply_strategy(&s, &rec, &mut rng, &mut m).unwrap();
        assert!(bob.has_deferred());
        bob.finish(&th, &mut m).unwrap();
        assert_eq!(bob.outcomes.get(1), w.get(1));
        assert_eq!(bob.outcomes.get(4), w.get(4));
    }

    #[test]
    fn storage_needs_exact_mode() {
        let (_, _, rec, mut rng) = setup(Mode::ClassicalFast, 1);
        let mut m = ChaCha8Rng::seed_from_u64(2);
        let err = apply_strategy(&AttackStrategy::RandomOk, &rec, &mut rng, &mut m).unwrap_err();
        assert!(matches!(err, Error::Mode(_)));
        let err = apply_strategy(&AttackStrategy::InterceptResend, &rec, &mut rng, &mut m).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn zero_angle_is_honest_in_plus() {
        let (w, th, rec, mut rng) = setup(Mode::ExactQuantum, 12);
        let mut m = ChaCha8Rng::seed_from_u64(13);
        let bob = apply_strategy(&AttackStrategy::FixedBasis { angle: 0.0 }, &rec, &mut rng, &mut m).unwrap();
        assert_eq!(bob.theta_hat, BasisString::uniform(6, Basis::Plus));
        for i in 0..6 {
            if th.get(i) == Basis::Plus {
                assert_eq!(bob.w_hat.get(i), w.get(i));
            }
        }
    }

    #[test]
    fn strategy_json() {
        let s = AttackStrategy::StoreSubset {
            store: StoreSpec::Count(3),
            avoid_in_sets: true,
        };
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<AttackStrategy>(&j).unwrap(), s);
        let h: AttackStrategy = serde_json::from_str(r#"{"kind":"fixed_basis","angle":0.1}"#).unwrap();
        assert_eq!(h, AttackStrategy::FixedBasis { angle: 0.1 });
    }
}
