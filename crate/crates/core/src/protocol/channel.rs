use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};
use crate::gf2::BitVec;
use crate::protocol::Mode;
use crate::quantum::{BasisString, PhotonFrame, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "p")]
pub enum ChannelModel {
    Noiseless,
    /// Independent flip of each encoded bit with probability `p`.
    BitFlip(f64),
}

impl ChannelModel {
    pub fn p(self) -> f64 {
        match self {
            ChannelModel::Noiseless => 0.0,
            ChannelModel::BitFlip(p) => p,
        }
    }

    pub fn validate(self) -> Result<()> {
        let p = self.p();
        if !(0.0..0.5).contains(&p) {
            return Err(Error::domain(format!("flip probability {p} outside [0, 1/2)")));
        }
        Ok(())
    }

    pub fn sample_flips<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> BitVec {
        let p = self.p();
        BitVec::from_bools(&(0..n).map(|_| p > 0.0 && rng.random_bool(p)).collect::<Vec<_>>())
    }
}

/// Photons as they reach the receiver.
#[derive(Clone, Debug)]
pub enum Reception {
    /// Noise already applied to the amplitudes.
    Quantum { state: StateVector<f64> },
    /// Encoded strings plus the flip probability still to be applied.
    Classical { w: BitVec, theta: BasisString, p: f64 },
}

impl Reception {
    pub fn n(&self) -> usize {
        match self {
            Reception::Quantum { state } => state.n(),
            Reception::Classical { w, .. } => w.len(),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Reception::Quantum { .. } => Mode::ExactQuantum,
            Reception::Classical { .. } => Mode::ClassicalFast,
        }
    }
}

/// Sends `|psi_{w, theta}>` through the channel.
pub fn transmit<R: Rng + ?Sized>(
    w: &BitVec,
    theta: &BasisString,
    channel: ChannelModel,
    mode: Mode,
    rng: &mut R,
) -> Result<Reception> {
    ensure_len("transmit bases", w.len(), theta.len())?;
    channel.validate()?;
    match mode {
        Mode::ExactQuantum => {
            let flips = channel.sample_flips(w.len(), rng);
            let state = StateVector::bb84(&w.xor(&flips)?, theta)?;
            Ok(Reception::Quantum { state })
        }
        Mode::ClassicalFast => Ok(Reception::Classical {
            w: w.clone(),
            theta: theta.clone(),
            p: channel.p(),
        }),
    }
}

/// Born probability that a photon encoding `bit` in `basis` reads `outcome` in `frame`.
pub fn photon_outcome_probability(bit: bool, basis: crate::quantum::Basis, frame: PhotonFrame, outcome: bool) -> f64 {
    let enc = basis.frame::<f64>();
    let col = usize::from(bit);
    let psi = [enc[0][col], enc[1][col]];
    let f = frame.matrix::<f64>();
    let o = usize::from(outcome);
    let amp = f[0][o] * psi[0] + f[1][o] * psi[1];
    amp * amp
}

/// As [`photon_outcome_probability`] after a flip with probability `p`.
pub fn noisy_outcome_probability(bit: bool, basis: crate::quantum::Basis, frame: PhotonFrame, outcome: bool, p: f64) -> f64 {
    (1.0 - p) * photon_outcome_probability(bit, basis, frame, outcome)
        + p * photon_outcome_probability(!bit, basis, frame, outcome)
}

/// Per-photon sampler for classical receptions: flip with `p`, then Born.
pub(crate) fn sample_classical_photon<R: Rng + ?Sized>(
    bit: bool,
    basis: crate::quantum::Basis,
    frame: PhotonFrame,
    p: f64,
    rng: &mut R,
) -> bool {
    let flipped = bit ^ (p > 0.0 && rng.random_bool(p));
    let p1 = photon_outcome_probability(flipped, basis, frame, true);
    rng.random::<f64>() < p1
}
