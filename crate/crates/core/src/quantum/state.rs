use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};
use crate::gf2::BitVec;
use crate::quantum::{apply_qubit_op, BasisString, PhotonFrame};
use crate::scalar::Real;

/// Largest photon count held as a dense amplitude vector.
pub const STATE_QUBIT_CAP: usize = 20;

/// Pure state of `n` two-level photons; amplitude `i` belongs to the
/// computational (`+`) string whose big-endian index is `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState<T>", into = "RawState<T>", bound = "T: Real")]
pub struct StateVector<T: Real> {
    n: usize,
    amps: Vec<Complex<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct RawState<T: Real> {
    n: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> TryFrom<RawState<T>> for StateVector<T> {
    type Error = Error;
    fn try_from(raw: RawState<T>) -> Result<Self> {
        StateVector::from_amplitudes(raw.n, raw.amplitudes)
    }
}

impl<T: Real> From<StateVector<T>> for RawState<T> {
    fn from(s: StateVector<T>) -> Self {
        RawState {
            n: s.n,
            amplitudes: s.amps,
        }
    }
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n > STATE_QUBIT_CAP {
        return Err(Error::Resource {
            what: "state vector photons",
            requested: n,
            limit: STATE_QUBIT_CAP,
        });
    }
    Ok(())
}

impl<T: Real> StateVector<T> {
    /// Wraps raw amplitudes; no normalisation check.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        check_qubits(n)?;
        ensure_len("state amplitudes", 1 << n, amps.len())?;
        Ok(StateVector { n, amps })
    }

    /// Tensor product of single-photon vectors, photon 0 leftmost.
    pub fn product(factors: &[[Complex<T>; 2]]) -> Result<Self> {
        let n = factors.len();
        check_qubits(n)?;
        let mut amps = vec![Complex::new(T::one(), T::zero())];
        for f in factors {
            amps = amps.iter().flat_map(|&a| [a * f[0], a * f[1]]).collect();
        }
        Ok(StateVector { n, amps })
    }

    /// `|psi_{w, frames}>`: photon `i` in the frame vector selected by `w_i`.
    pub fn in_frames(w: &BitVec, frames: &[PhotonFrame]) -> Result<Self> {
        ensure_len("frame count", w.len(), frames.len())?;
        let factors: Vec<[Complex<T>; 2]> = frames
            .iter()
            .zip(w.iter())
            .map(|(fr, bit)| {
                let m = fr.matrix::<T>();
                let col = usize::from(bit);
                [Complex::from(m[0][col]), Complex::from(m[1][col])]
            })
            .collect();
        StateVector::product(&factors)
    }

    /// BB84 product state `|psi_{w, theta}>`.
    pub fn bb84(w: &BitVec, theta: &BasisString) -> Result<Self> {
        ensure_len("bb84 bases", w.len(), theta.len())?;
        StateVector::in_frames(w, &theta.frames())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector<T>) -> Result<Complex<T>> {
        ensure_len("inner product", self.n, other.n)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn scaled(&self, k: T) -> StateVector<T> {
        StateVector {
            n: self.n,
            amps: self.amps.iter().map(|a| a * k).collect(),
        }
    }

    pub fn normalized(&self) -> Result<StateVector<T>> {
        let norm = self.norm_sqr().sqrt();
        if norm <= T::zero() {
            return Err(Error::domain("cannot normalise the zero vector"));
        }
        Ok(self.scaled(T::one() / norm))
    }

    /// Coefficients `<psi_{alpha, frames}|self>` for every `alpha`, indexed big-endian.
    pub fn coefficients_in(&self, frames: &[PhotonFrame]) -> Result<Vec<Complex<T>>> {
        ensure_len("frame count", self.n, frames.len())?;
        let mut c = self.amps.clone();
        for (p, fr) in frames.iter().enumerate() {
            apply_qubit_op(&mut c, self.n, p, transpose(fr.matrix()));
        }
        Ok(c)
    }

    /// Inverse of [`StateVector::coefficients_in`].
    pub fn from_coefficients(frames: &[PhotonFrame], coeffs: Vec<Complex<T>>) -> Result<Self> {
        let n = frames.len();
        let mut s = StateVector::from_amplitudes(n, coeffs)?;
        for (p, fr) in frames.iter().enumerate() {
            apply_qubit_op(&mut s.amps, n, p, fr.matrix());
        }
        Ok(s)
    }

    /// Born-rule distribution over all `2^n` outcomes in the given frames.
    pub fn outcome_distribution(&self, frames: &[PhotonFrame]) -> Result<Vec<T>> {
        Ok(self.coefficients_in(frames)?.iter().map(|c| c.norm_sqr()).collect())
    }

    /// Measures photon `p` in `frame`; collapses and renormalises in place.
    pub fn measure_photon<R: Rng + ?Sized>(&mut self, p: usize, frame: PhotonFrame, rng: &mut R) -> bool {
        let fm = frame.matrix::<T>();
        apply_qubit_op(&mut self.amps, self.n, p, transpose(fm));
        let bit = 1usize << (self.n - 1 - p);
        let p0: T = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        let total = self.norm_sqr();
        let u: f64 = rng.random();
        let outcome = u * total.to_f64_lossy() >= p0.to_f64_lossy();
        let kept = if outcome { total - p0 } else { p0 };
        let scale = T::one() / kept.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & bit != 0) == outcome {
                *a = *a * scale;
            } else {
                *a = Complex::new(T::zero(), T::zero());
            }
        }
        apply_qubit_op(&mut self.amps, self.n, p, fm);
        outcome
    }

    /// Sequential projective measurement of every photon; the post-state is
    /// the product state of the observed outcomes.
    pub fn measure_in_frames<R: Rng + ?Sized>(
        &self,
        frames: &[PhotonFrame],
        rng: &mut R,
    ) -> Result<(BitVec, StateVector<T>)> {
        ensure_len("frame count", self.n, frames.len())?;
        let mut work = self.clone();
        let bits: Vec<bool> = frames
            .iter()
            .enumerate()
            .map(|(p, &fr)| work.measure_photon(p, fr, rng))
            .collect();
        let outcome = BitVec::from_bools(&bits);
        let post = StateVector::in_frames(&outcome, frames)?;
        Ok((outcome, post))
    }

    pub fn measure_in_bases<R: Rng + ?Sized>(
        &self,
        theta_hat: &BasisString,
        rng: &mut R,
    ) -> Result<(BitVec, StateVector<T>)> {
        self.measure_in_frames(&theta_hat.frames(), rng)
    }
}

pub(crate) fn transpose<T: Copy>(m: [[T; 2]; 2]) -> [[T; 2]; 2] {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}
