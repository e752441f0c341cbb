use crate::error::{ensure_len, Error, Result};
use crate::gf2::{index_dot, BitMatrix, BitVec, LinearCodeSpec};
use crate::quantum::{BasisString, ComplexMatrix, DensityMatrix, StateVector, UBeta, DENSITY_QUBIT_CAP};
use crate::scalar::Real;

/// `rho^(0), ..., rho^(k)` built by `rho^(j+1) = (rho^(j) + U rho^(j) U) / 2`
/// with `U = U_{beta_{j+1}}`, starting from the pure state of the zero string.
#[derive(Clone, Debug)]
pub struct InductionTrace<T: Real> {
    pub theta: BasisString,
    pub kernel_basis: Vec<BitVec>,
    pub steps: Vec<DensityMatrix<T>>,
}

impl<T: Real> InductionTrace<T> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// True iff `gamma` is orthogonal to the first `j` basis vectors.
    pub fn claimed_support(&self, j: usize, gamma: usize) -> bool {
        self.kernel_basis[..j].iter().all(|b| !index_dot(gamma, b.to_index()))
    }

    /// Claimed matrix of `rho^(j)` in the opposite basis: `2^-N` on the
    /// annihilator of `span(beta_1..beta_j)`, zero elsewhere.
    pub fn claimed(&self, j: usize) -> ComplexMatrix<T> {
        let n = self.theta.len();
        let v = T::one() / T::from_usize_lossy(1 << n);
        ComplexMatrix::from_fn(1 << n, |a, b| {
            if self.claimed_support(j, a ^ b) {
                v.into()
            } else {
                T::zero().into()
            }
        })
    }

    /// Largest entrywise gap between `rho^(j)` and its claimed form.
    pub fn deviation(&self, j: usize) -> Result<T> {
        let rep = self.steps[j].represent(&self.theta.opposite())?;
        rep.matrix.max_abs_diff(&self.claimed(j))
    }
}

/// Runs the induction with a kernel basis of `f` from Gaussian elimination.
pub fn rho_zero_induction<T: Real>(code: &LinearCodeSpec, theta: &BasisString) -> Result<InductionTrace<T>> {
    rho_zero_induction_with_basis(code, theta, code.f().kernel_basis())
}

/// Runs the induction over a caller-supplied basis of the kernel of `f`.
pub fn rho_zero_induction_with_basis<T: Real>(
    code: &LinearCodeSpec,
    theta: &BasisString,
    basis: Vec<BitVec>,
) -> Result<InductionTrace<T>> {
    let n = code.big_n();
    ensure_len("induction bases", n, theta.len())?;
    if n > DENSITY_QUBIT_CAP {
        return Err(Error::Resource {
            what: "induction photons",
            requested: n,
            limit: DENSITY_QUBIT_CAP,
        });
    }
    for b in &basis {
        ensure_len("kernel vector", n, b.len())?;
        if !code.f().matvec(b)?.is_zero() {
            return Err(Error::domain(format!("{b} is not in the kernel of f")));
        }
    }
    if BitMatrix::from_rows(n, basis.clone())?.rank() != basis.len() {
        return Err(Error::domain("kernel vectors are not independent"));
    }
    if basis.len() != code.kernel_dim() {
        return Err(Error::domain(format!(
            "{} vectors do not span a kernel of dimension {}",
            basis.len(),
            code.kernel_dim()
        )));
    }
    let half = T::from_f64_lossy(0.5);
    let mut cur = DensityMatrix::pure(&StateVector::<T>::bb84(&BitVec::zeros(n), theta)?)?;
    let mut steps = vec![cur.clone()];
    for b in &basis {
        let u = UBeta::new(b, theta)?;
        let moved = u.conjugate_matrix(cur.matrix())?;
        cur = DensityMatrix::unchecked(n, cur.matrix().add(&moved)?.scale(half))?;
        steps.push(cur.clone());
    }
    Ok(InductionTrace {
        theta: theta.clone(),
        kernel_basis: basis,
        steps,
    })
}
