//! Dense finite-dimensional quantum mechanics for strings of photons.
//!
//! Photon `p` of an `n`-photon register is bit `n-1-p` of a basis index,
//! so index order matches the lexicographic order of bit strings.

mod basis;
mod density;
mod eigen;
mod projector;
mod state;
mod unitary;

use num_complex::Complex;

pub use basis::{Basis, BasisString, PhotonFrame};
pub use density::{BasisRepresentation, ComplexMatrix, DensityMatrix, DENSITY_QUBIT_CAP};
pub use eigen::{hermitian_eigen, HermitianEigen};
pub use projector::{ball_projector, small_distance_defect, Projector, Side};
pub use state::{StateVector, STATE_QUBIT_CAP};
pub use unitary::UBeta;

use crate::scalar::Real;

/// Applies the real 2x2 matrix `m` to photon `p` of an `n`-photon vector.
pub(crate) fn apply_qubit_op<T: Real>(v: &mut [Complex<T>], n: usize, p: usize, m: [[T; 2]; 2]) {
    let bit = 1usize << (n - 1 - p);
    for i in 0..v.len() {
        if i & bit == 0 {
            let (a, b) = (v[i], v[i | bit]);
            v[i] = a * m[0][0] + b * m[0][1];
            v[i | bit] = a * m[1][0] + b * m[1][1];
        }
    }
}
