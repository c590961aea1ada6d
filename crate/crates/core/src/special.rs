//! Gamma-family special functions.
//!
//! The gamma function uses the Lanczos approximation with `g = 7` and nine
//! coefficients, which is good to roughly `1e-15` relative on the real line
//! and for complex arguments with moderate imaginary part. The regularized
//! incomplete gamma functions use the power series below `x < a + 1` and a
//! modified Lentz continued fraction above it; both agree with reference
//! values to better than `1e-13` relative over the ranges exercised here.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Principal-ish `ln Γ(z)` for complex `z`; the imaginary part is only
/// meaningful modulo `2π`, which is all `exp` needs.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z) Γ(1 - z) = π / sin(π z)
        let s = (Complex64::new(PI, 0.0) * z).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_complex(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (z + 0.5) * t.ln() - t + acc.ln() + LN_SQRT_2PI
}

/// `Γ(z)` for complex `z`.
pub fn gamma_complex(z: Complex64) -> Complex64 {
    ln_gamma_complex(z).exp()
}

/// `ln |Γ(x)|` for real `x`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (PI * x).sin().abs();
        return PI.ln() - s.ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (z + 0.5) * t.ln() - t + acc.ln() + LN_SQRT_2PI
}

/// `Γ(x)` for real `x`.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x > 171.0 {
        return f64::INFINITY;
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}

const INC_EPS: f64 = 1e-16;
const INC_MAX_ITER: usize = 100_000;

fn prefactor(a: f64, x: f64) -> f64 {
    (a * x.ln() - x - ln_gamma(a)).exp()
}

fn lower_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..INC_MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * INC_EPS {
            break;
        }
    }
    sum * prefactor(a, x)
}

fn upper_fraction(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..INC_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < INC_EPS {
            break;
        }
    }
    prefactor(a, x) * h
}

/// Regularized lower incomplete gamma `P(a, x)`, `a > 0`, `x ≥ 0`.
/// `x = +∞` gives 1.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < a + 1.0 {
        lower_series(a, x)
    } else {
        1.0 - upper_fraction(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x < a + 1.0 {
        1.0 - lower_series(a, x)
    } else {
        upper_fraction(a, x)
    }
}

/// `P(a, x2) - P(a, x1)` for `x1 ≤ x2`, computed on whichever tail keeps the
/// subtraction well conditioned.
pub fn gamma_p_diff(a: f64, x1: f64, x2: f64) -> f64 {
    if x1 >= a + 1.0 {
        gamma_q(a, x1) - gamma_q(a, x2)
    } else {
        gamma_p(a, x2) - gamma_p(a, x1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_integers_and_half() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-15);
        assert!((gamma(5.0) - 24.0).abs() < 24.0 * 1e-14);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(10.0) - 362_880.0).abs() < 362_880.0 * 1e-14);
        assert!((ln_gamma(100.0) - 359.134_205_369_575_4).abs() < 1e-11);
    }

    #[test]
    fn complex_gamma_matches_real_axis_and_recurrence() {
        let z = Complex64::new(2.7, 0.0);
        assert!((gamma_complex(z).re - gamma(2.7)).abs() < 1e-14 * gamma(2.7));
        // Γ(z + 1) = z Γ(z)
        let z = Complex64::new(1.3, 4.0);
        let lhs = gamma_complex(z + 1.0);
        let rhs = z * gamma_complex(z);
        assert!((lhs - rhs).norm() < 1e-13 * lhs.norm());
        // |Γ(1 + iy)|^2 = π y / sinh(π y)
        let y = 5.0;
        let m2 = gamma_complex(Complex64::new(1.0, y)).norm_sqr();
        let expect = PI * y / (PI * y).sinh();
        assert!((m2 - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn incomplete_gamma_elementary_cases() {
        // P(1, x) = 1 - e^{-x}
        for &x in &[1e-3, 0.5, 1.0, 2.0, 7.0, 40.0] {
            assert!((gamma_p(1.0, x) - (1.0 - (-x as f64).exp())).abs() < 1e-15);
        }
        // Q(2, x) = (1 + x) e^{-x}
        for &x in &[0.1, 3.0, 12.0] {
            let q = (1.0 + x) * (-x as f64).exp();
            assert!((gamma_q(2.0, x) - q).abs() < 1e-14 * q.max(1e-300));
        }
        assert_eq!(gamma_p(1.5, f64::INFINITY), 1.0);
        assert_eq!(gamma_p(1.5, 0.0), 0.0);
    }

    #[test]
    fn incomplete_gamma_difference_far_tail() {
        let a = 2.7;
        let (x1, x2) = (30.0, 31.0);
        let d = gamma_p_diff(a, x1, x2);
        let direct = gamma_q(a, x1) - gamma_q(a, x2);
        assert!(d > 0.0);
        assert!((d - direct).abs() <= 1e-15 * d.abs().max(1e-300) + 1e-300);
    }
}
