use num_complex::Complex;

use crate::error::{ensure_len, Result};
use crate::gf2::BitVec;
use crate::quantum::{Basis, BasisString, ComplexMatrix, DensityMatrix, StateVector};
use crate::scalar::Real;

/// Shift-by-`beta` operator in the basis `theta`: a bit flip at each position
/// with `beta_i = 1, theta_i = +`, a phase flip where `theta_i = x`.
///
/// In computational coordinates `U|i> = (-1)^{|i & z|} |i ^ x|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UBeta {
    n: usize,
    xmask: usize,
    zmask: usize,
}

impl UBeta {
    pub fn new(beta: &BitVec, theta: &BasisString) -> Result<Self> {
        ensure_len("U_beta bases", beta.len(), theta.len())?;
        crate::quantum::state::check_qubits(beta.len())?;
        let n = beta.len();
        let (mut xmask, mut zmask) = (0usize, 0usize);
        for i in beta.support() {
            let bit = 1usize << (n - 1 - i);
            match theta.get(i) {
                Basis::Plus => xmask |= bit,
                Basis::Cross => zmask |= bit,
            }
        }
        Ok(UBeta { n, xmask, zmask })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn sign<T: Real>(&self, i: usize) -> T {
        if (i & self.zmask).count_ones() & 1 == 1 {
            -T::one()
        } else {
            T::one()
        }
    }

    pub fn apply<T: Real>(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        ensure_len("U_beta photons", self.n, psi.n())?;
        let a = psi.amplitudes();
        let mut out = vec![Complex::new(T::zero(), T::zero()); a.len()];
        for (i, &z) in a.iter().enumerate() {
            out[i ^ self.xmask] = z * self.sign::<T>(i);
        }
        StateVector::from_amplitudes(self.n, out)
    }

    /// `U M U` for a matrix in computational coordinates (`U` is self-adjoint).
    pub fn conjugate_matrix<T: Real>(&self, m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        ensure_len("U_beta dimension", 1 << self.n, m.dim())?;
        let x = self.xmask;
        Ok(ComplexMatrix::from_fn(m.dim(), |a, b| {
            m.get(a ^ x, b ^ x) * (self.sign::<T>(a ^ x) * self.sign::<T>(b ^ x))
        }))
    }

    pub fn conjugate<T: Real>(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        DensityMatrix::unchecked(rho.n(), self.conjugate_matrix(rho.matrix())?)
    }

    pub fn to_operator<T: Real>(&self) -> ComplexMatrix<T> {
        let x = self.xmask;
        ComplexMatrix::from_fn(1 << self.n, |a, b| {
            if a == b ^ x {
                Complex::from(self.sign::<T>(b))
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }
}
