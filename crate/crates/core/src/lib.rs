//! Simulation and verification toolkit for BB84-based String oblivious
//! transfer and the associated QKD protocol over noisy channels.
//!
//! * [`gf2`]: packed GF(2) vectors and matrices, cosets, minimum distance,
//!   binary entropy.
//! * [`quantum`]: BB84 product states, measurements, density operators,
//!   sign unitaries and distance-ball projectors.
//! * [`cosetrho`]: coset density operators, their closed form, the
//!   inductive construction and the indistinguishability certificate.
//! * [`protocol`]: the String-QOT and QKD state machines.
//! * [`attacks`]: dishonest-receiver strategies and information accounting.
//!
//! The quantum and coset modules are generic over the [`Real`] scalar; the
//! aliases below fix it to `f64` (and `f32` where single precision is useful).

pub mod attacks;
pub mod cosetrho;
pub mod error;
pub mod gf2;
pub mod protocol;
pub mod quantum;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub use gf2::{BitMatrix, BitVec, LinearCodeSpec, PositionSet};
pub use quantum::{Basis, BasisString, PhotonFrame, Projector, Side, UBeta};

pub type StateVector = quantum::StateVector<f64>;
pub type StateVector32 = quantum::StateVector<f32>;
pub type DensityMatrix = quantum::DensityMatrix<f64>;
pub type DensityMatrix32 = quantum::DensityMatrix<f32>;
pub type ComplexMatrix = quantum::ComplexMatrix<f64>;
pub type BasisRepresentation = quantum::BasisRepresentation<f64>;
pub type Complex = num_complex::Complex<f64>;
