use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::cosetrho::{rho_closed_form, CosetEnsemble};
use crate::error::{ensure_len, Error, Result};
use crate::gf2::{span_elements, BitMatrix, BitVec, LinearCodeSpec, PositionSet};
use crate::quantum::{ball_projector, hermitian_eigen, BasisRepresentation, BasisString, Side, StateVector};

/// Outcome of checking that `P_1 (rho_x - rho_x') P_1` vanishes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma1Certificate {
    /// Minimum distance of the row span of `f`; `None` when the span is `{0}`.
    pub d_n: Option<usize>,
    /// Minimum weight inside `E` over nonzero span elements (equals `d_n` for `E` = everything).
    pub d_e: Option<usize>,
    pub t: usize,
    pub condition_met: bool,
    /// Operator norm of `P_1 Delta P_1`.
    pub operator_norm: f64,
    /// `max |<psi_alpha| Delta |psi_alpha>|` over the basis states spanning `L_1`.
    pub basis_defect: f64,
    pub max_defect: f64,
    pub witness: Option<Witness>,
}

/// Unit vector inside `L_1` attaining the operator norm.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    /// `<phi| Delta |phi>`.
    pub value: f64,
    /// The vector in computational coordinates.
    pub state: StateVector<f64>,
}

/// Minimum of `|c restricted to E|` over nonzero `c` in the row span of `f`.
pub fn restricted_min_distance(f: &BitMatrix, e: &PositionSet) -> Result<Option<usize>> {
    ensure_len("restricted distance universe", f.ncols(), e.universe())?;
    let basis = f.echelon().rows;
    if basis.is_empty() {
        return Ok(None);
    }
    if basis.len() > crate::gf2::MIN_DISTANCE_ROW_CAP {
        return Err(Error::Resource {
            what: "restricted distance span rows",
            requested: basis.len(),
            limit: crate::gf2::MIN_DISTANCE_ROW_CAP,
        });
    }
    let zero = BitVec::zeros(f.ncols());
    Ok(span_elements(&zero, &basis)
        .iter()
        .skip(1)
        .map(|c| e.iter().filter(|&i| c.get(i)).count())
        .min())
}

/// Certificate for `rho_x` against `rho_x'` using the closed form of both.
#[allow(clippy::too_many_arguments)]
pub fn lemma1_certificate(
    code: &LinearCodeSpec,
    theta: &BasisString,
    x: &BitVec,
    x2: &BitVec,
    e: &PositionSet,
    t: usize,
    w_hat: &BitVec,
) -> Result<Lemma1Certificate> {
    if x == x2 {
        return Err(Error::domain("certificate needs two distinct syndromes"));
    }
    let a = rho_closed_form::<f64>(&CosetEnsemble::new(code.clone(), x.clone(), theta.clone())?)?;
    let b = rho_closed_form::<f64>(&CosetEnsemble::new(code.clone(), x2.clone(), theta.clone())?)?;
    certify_delta(code, &a.sub(&b)?, e, t, w_hat)
}

/// Certificate for a precomputed difference `Delta`, given in the basis
/// opposite to the encoding basis.
pub fn certify_delta(
    code: &LinearCodeSpec,
    delta: &BasisRepresentation<f64>,
    e: &PositionSet,
    t: usize,
    w_hat: &BitVec,
) -> Result<Lemma1Certificate> {
    let n = code.big_n();
    ensure_len("delta basis", n, delta.basis.len())?;
    let d_n = code.min_distance()?;
    let d_e = restricted_min_distance(code.f(), e)?;
    let condition_met = d_e.is_none_or(|d| 2 * t < d);

    let p1 = ball_projector(e, w_hat, t, &delta.basis, Side::Low)?;
    let idx: Vec<usize> = p1.members().collect();
    let block = delta.matrix.principal_submatrix(&idx);
    let basis_defect = (0..idx.len()).fold(0.0f64, |acc, i| acc.max(block.get(i, i).norm()));

    let (operator_norm, witness) = if block.max_abs() == 0.0 {
        (0.0, None)
    } else {
        let eig = hermitian_eigen(&block);
        let k = eig.dominant().expect("nonempty block");
        let mut coeffs = vec![Complex::new(0.0, 0.0); 1 << n];
        for (slot, &a) in idx.iter().enumerate() {
            coeffs[a] = eig.vectors[k][slot];
        }
        let state = StateVector::from_coefficients(&delta.basis.frames(), coeffs)?;
        (
            eig.spectral_norm(),
            Some(Witness {
                value: eig.values[k],
                state,
            }),
        )
    };
    Ok(Lemma1Certificate {
        d_n,
        d_e,
        t,
        condition_met,
        operator_norm,
        basis_defect,
        max_defect: operator_norm.max(basis_defect),
        witness,
    })
}
