//! Numeric complex roots of square-free polynomials (Aberth iteration).

use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::poly::RatPoly;

fn eval_with_derivative(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All complex roots of a square-free polynomial, to roughly machine precision.
pub fn roots(p: &RatPoly) -> Vec<Complex64> {
    let n = p.deg();
    if n == 0 {
        return Vec::new();
    }
    let lead = p.coeff(n).to_f64().unwrap_or(1.0);
    let c: Vec<f64> = p
        .coeffs()
        .iter()
        .map(|x| x.to_f64().unwrap_or(f64::NAN) / lead)
        .collect();
    if n == 1 {
        return vec![Complex64::new(-c[0], 0.0)];
    }
    // Cauchy bound for the initial circle.
    let radius = 1.0 + c[..n].iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(radius * 0.5, theta)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (pv, dv) = eval_with_derivative(&c, z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dv;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            z[i] -= w;
            max_step = max_step.max(w.norm() / z[i].norm().max(1.0));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    // Newton polish
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (pv, dv) = eval_with_derivative(&c, *zi);
            if dv.norm() == 0.0 {
                break;
            }
            *zi -= pv / dv;
        }
        if zi.im.abs() < 1e-14 * zi.norm().max(1.0) {
            zi.im = 0.0;
        }
    }
    z
}
