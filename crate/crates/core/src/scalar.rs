//! Scalar abstraction shared by the quantum and density-operator code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar backing complex amplitudes: `f32` or `f64`.
///
/// Each implementation carries the two repo-wide tolerances: one for
/// physical invariants (normalisation, hermiticity, trace) and one for
/// algebraic identities that hold exactly up to rounding.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    const PHYSICAL_TOL: Self;
    const ALGEBRAIC_TOL: Self;

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to every Real")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }

    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("usize converts to every Real")
    }
}

impl Real for f64 {
    const PHYSICAL_TOL: f64 = 1e-10;
    const ALGEBRAIC_TOL: f64 = 1e-12;
}

impl Real for f32 {
    const PHYSICAL_TOL: f32 = 1e-5;
    const ALGEBRAIC_TOL: f32 = 1e-5;
}
