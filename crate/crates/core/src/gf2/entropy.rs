use crate::error::{Error, Result};
use crate::scalar::Real;

const INVERSE_TOL: f64 = 1e-12;

/// `H(x) = -(x lg x + (1-x) lg(1-x))` with `0 lg 0 = 0`.
pub fn binary_entropy<T: Real>(x: T) -> Result<T> {
    let xf = x.to_f64_lossy();
    if !(0.0..=1.0).contains(&xf) {
        return Err(Error::domain(format!("entropy argument {xf} outside [0, 1]")));
    }
    Ok(T::from_f64_lossy(h(xf)))
}

fn h(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// Inverse of `H` restricted to `[0, 1/2]`, by bisection.
pub fn binary_entropy_inverse<T: Real>(y: T) -> Result<T> {
    let yf = y.to_f64_lossy();
    if !(0.0..=1.0).contains(&yf) {
        return Err(Error::domain(format!("entropy value {yf} outside [0, 1]")));
    }
    // Bisect on u = 1 - 2x, where 1 - H has an accurate form even near x = 1/2.
    let target = 1.0 - yf;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 2.0 * INVERSE_TOL {
        let mid = 0.5 * (lo + hi);
        if deficit(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(T::from_f64_lossy(0.5 * (1.0 - 0.5 * (lo + hi))))
}

/// `1 - H((1-u)/2)`.
fn deficit(u: f64) -> f64 {
    let plus = (1.0 + u) * u.ln_1p();
    let minus = if u >= 1.0 { 0.0 } else { (1.0 - u) * (-u).ln_1p() };
    (plus + minus) / (2.0 * std::f64::consts::LN_2)
}
