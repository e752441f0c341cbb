use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};
use crate::gf2::BitVec;
use crate::quantum::{apply_qubit_op, hermitian_eigen, BasisString, Projector, StateVector};
use crate::scalar::Real;

/// Largest photon count held as a dense density matrix.
pub const DENSITY_QUBIT_CAP: usize = 10;

fn c0<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix<T>", into = "RawMatrix<T>", bound = "T: Real")]
pub struct ComplexMatrix<T: Real> {
    dim: usize,
    data: Vec<Complex<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct RawMatrix<T: Real> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> TryFrom<RawMatrix<T>> for ComplexMatrix<T> {
    type Error = Error;
    fn try_from(raw: RawMatrix<T>) -> Result<Self> {
        ensure_len("matrix entries", raw.dim * raw.dim, raw.entries.len())?;
        Ok(ComplexMatrix {
            dim: raw.dim,
            data: raw.entries,
        })
    }
}

impl<T: Real> From<ComplexMatrix<T>> for RawMatrix<T> {
    fn from(m: ComplexMatrix<T>) -> Self {
        RawMatrix {
            dim: m.dim,
            entries: m.data,
        }
    }
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![c0(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { Complex::from(T::one()) } else { c0() })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let data = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        ComplexMatrix { dim, data }
    }

    /// `|u><v|`.
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Result<Self> {
        ensure_len("outer product", u.len(), v.len())?;
        Ok(Self::from_fn(u.len(), |i, j| u[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex<T>) {
        self.data[i * self.dim + j] = z;
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_len("matrix add", self.dim, other.dim)?;
        Ok(ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        ensure_len("matrix sub", self.dim, other.dim)?;
        Ok(ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, k: T) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        ensure_len("matmul", self.dim, other.dim)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == c0() {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] = out.data[i * d + j] + a * other.data[k * d + j];
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        ensure_len("matrix-vector", self.dim, v.len())?;
        Ok((0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .fold(c0(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(c0(), |acc, i| acc + self.get(i, i))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        ensure_len("matrix compare", self.dim, other.dim)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm())))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, a| acc.max(a.norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Principal submatrix on the given indices.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]))
    }

    /// Applies the real 2x2 `op` to photon `p` on both the row and column index
    /// (`A M A^T` for the single-photon factor `A`).
    pub(crate) fn apply_both(&mut self, n: usize, p: usize, op: [[T; 2]; 2]) {
        let d = self.dim;
        let bit = 1usize << (n - 1 - p);
        for i in 0..d {
            if i & bit == 0 {
                let (r0, r1) = (i * d, (i | bit) * d);
                for j in 0..d {
                    let (a, b) = (self.data[r0 + j], self.data[r1 + j]);
                    self.data[r0 + j] = a * op[0][0] + b * op[0][1];
                    self.data[r1 + j] = a * op[1][0] + b * op[1][1];
                }
            }
        }
        for row in self.data.chunks_mut(d) {
            apply_qubit_op(row, n, p, op);
        }
    }
}

/// Density operator on `n` photons, stored in the computational basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DensityMatrix<T: Real> {
    n: usize,
    matrix: ComplexMatrix<T>,
}

/// Matrix of an operator in the product basis `{|psi_{alpha, basis}>}`:
/// entry `(alpha, alpha')` is `<psi_alpha| O |psi_alpha'>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BasisRepresentation<T: Real> {
    pub basis: BasisString,
    pub matrix: ComplexMatrix<T>,
}

impl<T: Real> BasisRepresentation<T> {
    pub fn element(&self, alpha: &BitVec, alpha2: &BitVec) -> Result<Complex<T>> {
        ensure_len("representation row", self.basis.len(), alpha.len())?;
        ensure_len("representation column", self.basis.len(), alpha2.len())?;
        Ok(self.matrix.get(alpha.to_index(), alpha2.to_index()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.basis != other.basis {
            return Err(Error::domain("representations use different bases"));
        }
        Ok(BasisRepresentation {
            basis: self.basis.clone(),
            matrix: self.matrix.sub(&other.matrix)?,
        })
    }
}

pub(crate) fn check_density_qubits(n: usize) -> Result<()> {
    if n > DENSITY_QUBIT_CAP {
        return Err(Error::Resource {
            what: "density matrix photons",
            requested: n,
            limit: DENSITY_QUBIT_CAP,
        });
    }
    Ok(())
}

impl<T: Real> DensityMatrix<T> {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(n: usize, matrix: ComplexMatrix<T>) -> Result<Self> {
        let rho = Self::unchecked(n, matrix)?;
        rho.check_invariants()?;
        Ok(rho)
    }

    pub(crate) fn unchecked(n: usize, matrix: ComplexMatrix<T>) -> Result<Self> {
        check_density_qubits(n)?;
        ensure_len("density dimension", 1 << n, matrix.dim())?;
        Ok(DensityMatrix { n, matrix })
    }

    pub fn pure(state: &StateVector<T>) -> Result<Self> {
        check_density_qubits(state.n())?;
        let a = state.amplitudes();
        Self::unchecked(state.n(), ComplexMatrix::outer(a, a)?)
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_density_qubits(n)?;
        let k = T::one() / T::from_usize_lossy(1 << n);
        Self::unchecked(n, ComplexMatrix::identity(1 << n).scale(k))
    }

    /// `sum_a p_a |psi_a><psi_a|`.
    pub fn from_ensemble(states: &[StateVector<T>], probs: &[T]) -> Result<Self> {
        ensure_len("ensemble size", states.len(), probs.len())?;
        let Some(first) = states.first() else {
            return Err(Error::domain("empty ensemble"));
        };
        let n = first.n();
        check_density_qubits(n)?;
        if probs.iter().any(|&p| p < T::zero() || !p.is_finite()) {
            return Err(Error::domain("ensemble probabilities must be non-negative"));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::PHYSICAL_TOL {
            return Err(Error::domain(format!("ensemble probabilities sum to {total}")));
        }
        let d = 1usize << n;
        let mut m = ComplexMatrix::zeros(d);
        for (s, &p) in states.iter().zip(probs) {
            ensure_len("ensemble member photons", n, s.n())?;
            if p == T::zero() {
                continue;
            }
            let a = s.amplitudes();
            for i in 0..d {
                let ai = a[i] * p;
                if ai == c0() {
                    continue;
                }
                for (slot, aj) in m.data[i * d..(i + 1) * d].iter_mut().zip(a) {
                    *slot = *slot + ai * aj.conj();
                }
            }
        }
        Self::unchecked(n, m)
    }

    /// Inverse of [`DensityMatrix::represent`]; validated.
    pub fn from_representation(rep: &BasisRepresentation<T>) -> Result<Self> {
        let n = rep.basis.len();
        check_density_qubits(n)?;
        ensure_len("representation dimension", 1 << n, rep.matrix.dim())?;
        let mut m = rep.matrix.clone();
        for (p, b) in rep.basis.iter().enumerate() {
            m.apply_both(n, p, b.frame());
        }
        Self::new(n, m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    /// Matrix of `rho` in the `theta_hat` product basis.
    pub fn represent(&self, theta_hat: &BasisString) -> Result<BasisRepresentation<T>> {
        ensure_len("representation basis", self.n, theta_hat.len())?;
        let mut m = self.matrix.clone();
        for (p, b) in theta_hat.iter().enumerate() {
            let f = b.frame::<T>();
            m.apply_both(self.n, p, [[f[0][0], f[1][0]], [f[0][1], f[1][1]]]);
        }
        Ok(BasisRepresentation {
            basis: theta_hat.clone(),
            matrix: m,
        })
    }

    /// `<psi_{alpha, theta_hat}| rho |psi_{alpha', theta_hat}>`.
    pub fn matrix_element(&self, alpha: &BitVec, alpha2: &BitVec, theta_hat: &BasisString) -> Result<Complex<T>> {
        ensure_len("matrix element", self.n, alpha.len())?;
        let bra = StateVector::<T>::bb84(alpha, theta_hat)?;
        let ket = StateVector::<T>::bb84(alpha2, theta_hat)?;
        let rk = self.matrix.mul_vec(ket.amplitudes())?;
        Ok(bra
            .amplitudes()
            .iter()
            .zip(&rk)
            .fold(c0(), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// `Tr(P rho)` for a basis-mask projector.
    pub fn outcome_probability(&self, proj: &Projector) -> Result<T> {
        ensure_len("projector photons", self.n, proj.n())?;
        let rep = self.represent(proj.basis())?;
        Ok(proj
            .members()
            .map(|a| rep.matrix.get(a, a).re)
            .fold(T::zero(), |acc, x| acc + x))
    }

    /// `Tr(O rho)` for an arbitrary operator in computational coordinates.
    pub fn expectation(&self, op: &ComplexMatrix<T>) -> Result<Complex<T>> {
        Ok(op.matmul(&self.matrix)?.trace())
    }

    /// Hermitian, unit trace and positive semidefinite, at the physical tolerance.
    pub fn check_invariants(&self) -> Result<()> {
        let tol = T::PHYSICAL_TOL;
        let herm = self.matrix.hermiticity_defect();
        if herm > tol {
            return Err(Error::domain(format!("density matrix not Hermitian (defect {herm})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::domain(format!("density matrix trace {tr}")));
        }
        let min = hermitian_eigen(&self.matrix).min();
        if min < -tol.to_f64_lossy() {
            return Err(Error::domain(format!("density matrix eigenvalue {min}")));
        }
        Ok(())
    }
}
