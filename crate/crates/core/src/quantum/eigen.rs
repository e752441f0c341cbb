use nalgebra::DMatrix;
use num_complex::Complex;

use crate::quantum::ComplexMatrix;
use crate::scalar::Real;

/// Spectrum of a Hermitian matrix, computed in double precision.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: Vec<Vec<Complex<f64>>>,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Index of the eigenvalue of largest magnitude.
    pub fn dominant(&self) -> Option<usize> {
        (0..self.values.len()).max_by(|&a, &b| self.values[a].abs().total_cmp(&self.values[b].abs()))
    }

    /// Operator norm, i.e. the largest eigenvalue magnitude.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Eigendecomposition of the Hermitian part of `m`.
pub fn hermitian_eigen<T: Real>(m: &ComplexMatrix<T>) -> HermitianEigen {
    let d = m.dim();
    if d == 0 {
        return HermitianEigen {
            values: Vec::new(),
            vectors: Vec::new(),
        };
    }
    let mat = DMatrix::from_fn(d, d, |i, j| {
        let z = m.get(i, j);
        Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
    });
    let eig = mat.symmetric_eigen();
    let vectors = (0..d)
        .map(|k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();
    HermitianEigen {
        values: eig.eigenvalues.iter().copied().collect(),
        vectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_y_spectrum() {
        let mut m = ComplexMatrix::<f64>::zeros(2);
        m.set(0, 1, Complex::new(0.0, -1.0));
        m.set(1, 0, Complex::new(0.0, 1.0));
        let e = hermitian_eigen(&m);
        let mut v = e.values.clone();
        v.sort_by(f64::total_cmp);
        assert!((v[0] + 1.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
        let k = e.dominant().unwrap();
        // m x = lambda x for the returned vector.
        let x = &e.vectors[k];
        for i in 0..2 {
            let mx: Complex<f64> = (0..2).map(|j| m.get(i, j) * x[j]).sum();
            assert!((mx - x[i] * e.values[k]).norm() < 1e-12);
        }
    }
}
