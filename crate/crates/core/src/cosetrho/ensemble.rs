use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};
use crate::gf2::{index_dot, span_elements, BitVec, LinearCodeSpec};
use crate::quantum::{BasisRepresentation, BasisString, ComplexMatrix, DensityMatrix, StateVector, DENSITY_QUBIT_CAP};
use crate::scalar::Real;

/// Largest coset dimension summed over explicitly.
pub const COSET_DIM_CAP: usize = 10;

/// Uniform mixture of `|psi_{beta, theta}>` over `C_x = {beta | f beta = x}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetEnsemble {
    pub code: LinearCodeSpec,
    pub x: BitVec,
    pub theta: BasisString,
    pub coset: Vec<BitVec>,
}

impl CosetEnsemble {
    /// Errors with a domain error when `x` is not in the image of `f`.
    pub fn new(code: LinearCodeSpec, x: BitVec, theta: BasisString) -> Result<Self> {
        let n = code.big_n();
        ensure_len("coset bases", n, theta.len())?;
        ensure_len("syndrome length", code.r() + code.m(), x.len())?;
        check_caps(&code)?;
        let sol = code.f().solve_affine(&x)?;
        if sol.particular.is_none() {
            return Err(Error::domain(format!("x = {x} is not in the image of f")));
        }
        let coset = sol.solutions();
        Ok(CosetEnsemble { code, x, theta, coset })
    }

    pub fn big_n(&self) -> usize {
        self.code.big_n()
    }

    /// Any coset member; the closed form does not depend on the choice.
    pub fn representative(&self) -> &BitVec {
        &self.coset[0]
    }

    /// The opposite basis `theta_hat`, in which the closed form is stated.
    pub fn theta_hat(&self) -> BasisString {
        self.theta.opposite()
    }
}

fn check_caps(code: &LinearCodeSpec) -> Result<()> {
    if code.big_n() > DENSITY_QUBIT_CAP {
        return Err(Error::Resource {
            what: "coset density photons",
            requested: code.big_n(),
            limit: DENSITY_QUBIT_CAP,
        });
    }
    if code.kernel_dim() > COSET_DIM_CAP {
        return Err(Error::Resource {
            what: "coset dimension",
            requested: code.kernel_dim(),
            limit: COSET_DIM_CAP,
        });
    }
    Ok(())
}

/// `2^-k sum_{beta in C_x} |psi_{beta,theta}><psi_{beta,theta}|`, by explicit summation.
pub fn rho_brute<T: Real>(ens: &CosetEnsemble) -> Result<DensityMatrix<T>> {
    let states = ens
        .coset
        .iter()
        .map(|b| StateVector::<T>::bb84(b, &ens.theta))
        .collect::<Result<Vec<_>>>()?;
    let p = T::one() / T::from_usize_lossy(states.len());
    DensityMatrix::from_ensemble(&states, &vec![p; states.len()])
}

/// Exact sign pattern of the closed form: entry `(a, a')` is `+-1` when
/// `a ^ a'` lies in the row span of `f` (sign `(-1)^{(a ^ a') . beta}`), else 0.
/// Row-major over big-endian indices.
pub fn closed_form_pattern(code: &LinearCodeSpec, beta: &BitVec) -> Result<Vec<i8>> {
    let n = code.big_n();
    ensure_len("representative length", n, beta.len())?;
    check_caps(code)?;
    let d = 1usize << n;
    let mut in_span = vec![false; d];
    for v in span_elements(&BitVec::zeros(n), &code.f().echelon().rows) {
        in_span[v.to_index()] = true;
    }
    let b = beta.to_index();
    let mut out = vec![0i8; d * d];
    for a in 0..d {
        for a2 in 0..d {
            let g = a ^ a2;
            if in_span[g] {
                out[a * d + a2] = if index_dot(g, b) { -1 } else { 1 };
            }
        }
    }
    Ok(out)
}

/// Matrix of `rho_x` in `theta_hat`, filled from the closed form using the
/// ensemble's representative.
pub fn rho_closed_form<T: Real>(ens: &CosetEnsemble) -> Result<BasisRepresentation<T>> {
    rho_closed_form_with(ens, ens.representative())
}

/// As [`rho_closed_form`] with an explicit coset member `beta`.
pub fn rho_closed_form_with<T: Real>(ens: &CosetEnsemble, beta: &BitVec) -> Result<BasisRepresentation<T>> {
    let n = ens.big_n();
    let pattern = closed_form_pattern(&ens.code, beta)?;
    let d = 1usize << n;
    let scale = T::one() / T::from_usize_lossy(d);
    let matrix = ComplexMatrix::from_fn(d, |a, b| Complex::from(T::from_f64_lossy(f64::from(pattern[a * d + b])) * scale));
    Ok(BasisRepresentation {
        basis: ens.theta_hat(),
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitMatrix;
    use crate::quantum::UBeta;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }
    fn bs(s: &str) -> BasisString {
        s.parse().unwrap()
    }
    fn code(cols: usize, rows: &[&str], r: usize) -> LinearCodeSpec {
        LinearCodeSpec::new(BitMatrix::parse_rows(cols, rows).unwrap(), r, rows.len() - r).unwrap()
    }

    #[test]
    fn singleton_coset_is_pure() {
        let c = LinearCodeSpec::new(BitMatrix::identity(3), 1, 2).unwrap();
        let ens = CosetEnsemble::new(c, bv("101"), bs("+x+")).unwrap();
        assert_eq!(ens.coset, vec![bv("101")]);
        let rho = rho_brute::<f64>(&ens).unwrap();
        let pure = DensityMatrix::pure(&StateVector::bb84(&bv("101"), &bs("+x+")).unwrap()).unwrap();
        assert!(rho.matrix().max_abs_diff(pure.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn two_element_coset() {
        let ens = CosetEnsemble::new(code(2, &["11"], 0), bv("0"), bs("x+")).unwrap();
        let mut members = ens.coset.clone();
        members.sort();
        assert_eq!(members, vec![bv("00"), bv("11")]);
        let brute = rho_brute::<f64>(&ens).unwrap();
        let th = bs("x+");
        let manual = DensityMatrix::from_ensemble(
            &[StateVector::bb84(&bv("00"), &th).unwrap(), StateVector::bb84(&bv("11"), &th).unwrap()],
            &[0.5, 0.5],
        )
        .unwrap();
        assert!(brute.matrix().max_abs_diff(manual.matrix()).unwrap() < 1e-12);

        let closed = rho_closed_form::<f64>(&ens).unwrap();
        for a in 0..4usize {
            for a2 in 0..4usize {
                let expected = if a ^ a2 == 0 || a ^ a2 == 3 { 0.25 } else { 0.0 };
                assert!((closed.matrix.get(a, a2).re - expected).abs() < 1e-15);
            }
        }
        let via_elements = brute.represent(&ens.theta_hat()).unwrap();
        assert!(via_elements.matrix.max_abs_diff(&closed.matrix).unwrap() < 1e-12);
    }

    #[test]
    fn empty_code_is_maximally_mixed() {
        let c = LinearCodeSpec::new(BitMatrix::zeros(0, 3), 0, 0).unwrap();
        let ens = CosetEnsemble::new(c, BitVec::zeros(0), bs("+x+")).unwrap();
        assert_eq!(ens.coset.len(), 8);
        let rho = rho_brute::<f64>(&ens).unwrap();
        let mixed = DensityMatrix::<f64>::maximally_mixed(3).unwrap();
        assert!(rho.matrix().max_abs_diff(mixed.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn unreachable_syndrome_is_domain_error() {
        let c = code(3, &["110", "110"], 1);
        assert!(matches!(
            CosetEnsemble::new(c, bv("10"), bs("+++")),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn caps_are_enforced() {
        let c = LinearCodeSpec::new(BitMatrix::zeros(1, 11), 0, 1).unwrap();
        assert!(CosetEnsemble::new(c, bv("0"), BasisString::uniform(11, crate::quantum::Basis::Plus))
            .unwrap_err()
            .is_resource());
    }

    #[test]
    fn diagonal_is_uniform_and_representative_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let n = rng.random_range(2..6);
            let rows = rng.random_range(1..n);
            let c = LinearCodeSpec::random(n, 0, rows, &mut rng).unwrap();
            let x = c.f().matvec(&BitVec::random(n, &mut rng)).unwrap();
            let ens = CosetEnsemble::new(c, x, BasisString::random(n, &mut rng)).unwrap();
            let base = rho_closed_form::<f64>(&ens).unwrap();
            for i in 0..1usize << n {
                assert!((base.matrix.get(i, i).re - 1.0 / (1 << n) as f64).abs() < 1e-15);
            }
            for beta in &ens.coset {
                assert_eq!(rho_closed_form_with::<f64>(&ens, beta).unwrap(), base);
            }
        }
    }

    #[test]
    fn conjugation_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let n = rng.random_range(2..7);
            let c = LinearCodeSpec::random(n, 1, 1, &mut rng).unwrap();
            let theta = BasisString::random(n, &mut rng);
            let zero = CosetEnsemble::new(c.clone(), BitVec::zeros(2), theta.clone()).unwrap();
            let rho0 = rho_brute::<f64>(&zero).unwrap();
            let x = c.f().matvec(&BitVec::random(n, &mut rng)).unwrap();
            let ens = CosetEnsemble::new(c, x, theta.clone()).unwrap();
            let rhox = rho_brute::<f64>(&ens).unwrap();
            for beta in &ens.coset {
                let u = UBeta::new(beta, &theta).unwrap();
                let moved = u.conjugate(&rho0).unwrap();
                assert!(moved.matrix().max_abs_diff(rhox.matrix()).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn single_precision_closed_form_agrees() {
        let ens = CosetEnsemble::new(code(3, &["111"], 0), bv("1"), bs("x+x")).unwrap();
        let brute = rho_brute::<f32>(&ens).unwrap().represent(&ens.theta_hat()).unwrap();
        let closed = rho_closed_form::<f32>(&ens).unwrap();
        assert!(brute.matrix.max_abs_diff(&closed.matrix).unwrap() < 1e-5);
    }
}
