use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};
use crate::gf2::{BitVec, PositionSet};
use crate::quantum::state::check_qubits;
use crate::quantum::{BasisString, ComplexMatrix, StateVector};
use crate::scalar::Real;

/// Which side of a distance ball a projector keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Strings within the radius (`P_1`).
    Low,
    /// Strings outside the radius (`P_0`).
    High,
}

/// Orthogonal projector diagonal in a product basis, stored as the set of
/// basis strings it keeps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projector {
    basis: BasisString,
    mask: Vec<bool>,
}

impl Projector {
    pub fn new(basis: BasisString, mask: Vec<bool>) -> Result<Self> {
        check_qubits(basis.len())?;
        ensure_len("projector mask", 1 << basis.len(), mask.len())?;
        Ok(Projector { basis, mask })
    }

    pub fn identity(basis: BasisString) -> Result<Self> {
        let d = 1usize << basis.len();
        Projector::new(basis, vec![true; d])
    }

    pub fn n(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &BasisString {
        &self.basis
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, alpha: usize) -> bool {
        self.mask[alpha]
    }

    /// Indices of kept basis strings, ascending.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &k)| k).map(|(i, _)| i)
    }

    pub fn rank(&self) -> usize {
        self.mask.iter().filter(|&&k| k).count()
    }

    pub fn is_identity(&self) -> bool {
        self.mask.iter().all(|&k| k)
    }

    pub fn is_zero(&self) -> bool {
        !self.mask.iter().any(|&k| k)
    }

    pub fn complement(&self) -> Projector {
        Projector {
            basis: self.basis.clone(),
            mask: self.mask.iter().map(|k| !k).collect(),
        }
    }

    fn same_basis(&self, other: &Projector) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::domain("projectors are diagonal in different bases"));
        }
        Ok(())
    }

    /// The product `P Q`, which is again a mask projector.
    pub fn intersection(&self, other: &Projector) -> Result<Projector> {
        self.same_basis(other)?;
        Ok(Projector {
            basis: self.basis.clone(),
            mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect(),
        })
    }

    /// `P + Q` when the ranges are orthogonal; errors otherwise.
    pub fn orthogonal_sum(&self, other: &Projector) -> Result<Projector> {
        self.same_basis(other)?;
        if !self.intersection(other)?.is_zero() {
            return Err(Error::domain("projectors overlap"));
        }
        Ok(Projector {
            basis: self.basis.clone(),
            mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect(),
        })
    }

    pub fn is_subspace_of(&self, other: &Projector) -> Result<bool> {
        self.same_basis(other)?;
        Ok(self.mask.iter().zip(&other.mask).all(|(a, b)| !a || *b))
    }

    /// `P|phi>`.
    pub fn apply<T: Real>(&self, phi: &StateVector<T>) -> Result<StateVector<T>> {
        ensure_len("projector photons", self.n(), phi.n())?;
        let frames = self.basis.frames();
        let mut c = phi.coefficients_in(&frames)?;
        for (z, &keep) in c.iter_mut().zip(&self.mask) {
            if !keep {
                *z = Complex::new(T::zero(), T::zero());
            }
        }
        StateVector::from_coefficients(&frames, c)
    }

    /// Dense operator in computational coordinates.
    pub fn to_operator<T: Real>(&self) -> Result<ComplexMatrix<T>> {
        let n = self.n();
        let frames = self.basis.frames();
        let mut op = ComplexMatrix::zeros(1 << n);
        for a in self.members() {
            let v = StateVector::<T>::in_frames(&BitVec::from_index(n, a), &frames)?;
            op = op.add(&ComplexMatrix::outer(v.amplitudes(), v.amplitudes())?)?;
        }
        Ok(op)
    }
}

/// `P_1[E, t]` (Low) or `P_0[E, t]` (High) around `center` in the basis `theta_hat`.
pub fn ball_projector(
    e: &PositionSet,
    center: &BitVec,
    t: usize,
    theta_hat: &BasisString,
    side: Side,
) -> Result<Projector> {
    let n = theta_hat.len();
    check_qubits(n)?;
    ensure_len("ball center", n, center.len())?;
    ensure_len("ball positions", n, e.universe())?;
    let emask = e.to_mask();
    let c = center.to_index();
    let mask = (0..1usize << n)
        .map(|a| {
            let low = ((a ^ c) & emask).count_ones() as usize <= t;
            low == (side == Side::Low)
        })
        .collect();
    Projector::new(theta_hat.clone(), mask)
}

/// `||P|phi>||^2`, read off the coefficients in the projector's basis.
pub fn small_distance_defect<T: Real>(phi: &StateVector<T>, p0: &Projector) -> Result<T> {
    ensure_len("projector photons", p0.n(), phi.n())?;
    let c = phi.coefficients_in(&p0.basis().frames())?;
    Ok(p0.members().map(|a| c[a].norm_sqr()).fold(T::zero(), |acc, x| acc + x))
}
