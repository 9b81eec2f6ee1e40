//! The generating function `F(x_1, .., x_k) = Σ_m ν(m)/Π m_i! · x^m`.
//!
//! Closed form: `F = √(1 + 2(x_2 + x_4 + ..)) · exp(∫_0^1 (x_1 + 3x_3μ² + 5x_5μ⁴ + ..) / s(μ) dμ)`
//! with `s(μ) = 1 + 2(x_2μ² + x_4μ⁴ + ..)`. Since `ln s(1) = ∫ s'/s`, this is
//! evaluated as the single exponential `exp(∫_0^1 Σ_j j x_j μ^{j-1} / s(μ) dμ)`,
//! which also fixes the branch of the square root for complex arguments.

use num_complex::Complex64;

use super::quadrature::integrate;
use crate::error::{invalid, Error, Result};
use crate::wick::{nu_f64, PartitionVector};

pub const DEFAULT_QUAD_TOL: f64 = 1e-11;
const POLE_TOL: f64 = 1e-8;
const POLE_GRID: usize = 2048;

fn denominator(x: &[Complex64], mu: f64) -> Complex64 {
    let mut s = Complex64::new(1.0, 0.0);
    let mut pow = 1.0;
    for (i, xi) in x.iter().enumerate() {
        pow *= mu;
        if (i + 1) % 2 == 0 {
            s += xi * (2.0 * pow);
        }
    }
    s
}

fn numerator(x: &[Complex64], mu: f64) -> Complex64 {
    let mut a = Complex64::new(0.0, 0.0);
    let mut pow = 1.0;
    for (i, xi) in x.iter().enumerate() {
        a += xi * ((i + 1) as f64 * pow);
        pow *= mu;
    }
    a
}

/// Errors when `s(μ)` vanishes (or changes sign, for real input) on `[0, 1]`.
fn check_poles(x: &[Complex64]) -> Result<()> {
    let real = x.iter().all(|z| z.im == 0.0);
    for i in 0..=POLE_GRID {
        let mu = i as f64 / POLE_GRID as f64;
        let s = denominator(x, mu);
        if s.norm() < POLE_TOL || (real && s.re <= 0.0) {
            return Err(Error::Singular(format!("1 + 2(x_2 μ² + x_4 μ⁴ + ..) vanishes near μ = {mu}")));
        }
    }
    Ok(())
}

/// Closed-form `F` at complex arguments, by quadrature with absolute tolerance `tol`.
pub fn f_closed_complex(x: &[Complex64], tol: f64) -> Result<Complex64> {
    check_poles(x)?;
    if x.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let exponent = integrate(|mu| numerator(x, mu) / denominator(x, mu), 0.0, 1.0, tol)?;
    Ok(exponent.exp())
}

/// Closed-form `F` at real arguments.
pub fn f_scalar(x: &[f64]) -> Result<f64> {
    let z: Vec<Complex64> = x.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    Ok(f_closed_complex(&z, DEFAULT_QUAD_TOL)?.re)
}

/// Taylor series of `F` truncated to `k·m ≤ max_weight`.
pub fn f_taylor(x: &[f64], max_weight: u32) -> f64 {
    PartitionVector::all_up_to(x.len(), max_weight)
        .iter()
        .map(|m| {
            let mono: f64 = m.entries().iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product();
            nu_f64(m) / m.factorial_product() as f64 * mono
        })
        .sum()
}

/// Taylor coefficient of `x^m` in the closed form, by a discrete Fourier
/// transform over circles `|x_j| = r_j` in the variables with `m_j > 0`.
///
/// Odd variables enter `F` through an exponential and are sampled on the unit
/// circle; even ones sit inside the square root and use `r = 0.1`.
pub fn taylor_coefficient(m: &PartitionVector, points: usize, tol: f64) -> Result<f64> {
    if points < 2 {
        return invalid("need at least two sample points per variable");
    }
    let k = m.entries().len();
    let active: Vec<usize> = (0..k).filter(|&i| m.entries()[i] > 0).collect();
    if active.is_empty() {
        return Ok(f_closed_complex(&[], tol)?.re);
    }
    let radius = |i: usize| if (i + 1) % 2 == 1 { 1.0 } else { 0.1 };
    let total = points.pow(active.len() as u32);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut x = vec![Complex64::new(0.0, 0.0); k];
    for code in 0..total {
        let mut c = code;
        let mut phase = 0.0;
        for &i in &active {
            let j = c % points;
            c /= points;
            let ang = 2.0 * std::f64::consts::PI * j as f64 / points as f64;
            x[i] = Complex64::from_polar(radius(i), ang);
            phase -= ang * m.entries()[i] as f64;
        }
        acc += f_closed_complex(&x, tol)? * Complex64::from_polar(1.0, phase);
    }
    let scale: f64 = active.iter().map(|&i| radius(i).powi(m.entries()[i] as i32)).product();
    Ok(acc.re / (total as f64 * scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_special_cases() {
        assert_eq!(f_scalar(&[0.0, 0.0, 0.0]).unwrap(), 1.0);
        for x1 in [-0.7, 0.1, 1.3] {
            assert!((f_scalar(&[x1]).unwrap() - f64::exp(x1)).abs() < 1e-12);
        }
        for x2 in [-0.3, 0.2, 2.0] {
            assert!((f_scalar(&[0.0, x2]).unwrap() - (1.0 + 2.0 * x2).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn pole_detection() {
        assert!(matches!(f_scalar(&[0.1, -0.6]), Err(Error::Singular(_))));
        assert!(matches!(f_scalar(&[0.0, 0.1, 0.0, -0.8]), Err(Error::Singular(_))));
        assert!(f_scalar(&[0.0, -0.49]).is_ok());
    }

    #[test]
    fn taylor_matches_closed_form_at_small_arguments() {
        for x in [[0.05, -0.08, 0.03], [-0.1, 0.07, -0.02], [0.02, 0.01, 0.09]] {
            let closed = f_scalar(&x).unwrap();
            let series = f_taylor(&x, 24);
            assert!((closed - series).abs() < 1e-9, "{x:?}: {closed} vs {series}");
        }
    }

    #[test]
    fn fourier_coefficients_recover_nu() {
        for m in [[1u32, 1], [0, 2], [2, 0]] {
            let pv = PartitionVector::new(&m);
            let c = taylor_coefficient(&pv, 32, 1e-13).unwrap();
            assert!((c - nu_f64(&pv) / pv.factorial_product() as f64).abs() < 1e-10, "{m:?}");
        }
    }
}
