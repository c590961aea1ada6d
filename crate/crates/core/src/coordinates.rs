//! Group-moment coordinates on `D_{n+1}`.
//!
//! `σ(r) = (0', i/r)` is a section of the height `H`, `κ(w', t, r) =
//! (w', t) . σ(r)` and `τ(z) = (z', Re z_{n+1}, H(z))` are mutually inverse,
//! and the weighted measure `v_λ` pulls back to
//! `ν_λ = c_λ / (4 r^{λ+2}) dw' dt dr`. The t-Fourier transform and the
//! Cauchy–Riemann system satisfied by images of holomorphic functions live
//! here too.

use crate::error::{check_dims, invalid, Error, Result};
use crate::fd;
use crate::heisenberg::{norm_sqr, HeisenbergElement};
use crate::siegel::{height, SiegelPoint};
use crate::special::ln_gamma;
use crate::C64;
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Smallest admissible weight parameter. The measure is finite for every
/// `λ > -1`, but `r^λ` becomes too singular for the quadratures close to -1.
pub const LAMBDA_MIN: f64 = -0.999;

/// A point `(w', t, r)` of `H_n x R_+`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMomentPoint {
    pub w_prime: Vec<C64>,
    pub t: f64,
    pub r: f64,
}

impl GroupMomentPoint {
    pub fn new(w_prime: Vec<C64>, t: f64, r: f64) -> Result<Self> {
        if w_prime.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if !(t.is_finite() && w_prime.iter().all(|w| w.re.is_finite() && w.im.is_finite())) {
            return Err(Error::NonFinite("group-moment point"));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid("r", format!("must be positive, got {r}")));
        }
        Ok(GroupMomentPoint { w_prime, t, r })
    }

    pub fn max_abs_diff(&self, other: &GroupMomentPoint) -> f64 {
        self.w_prime
            .iter()
            .zip(&other.w_prime)
            .map(|(a, b)| (a - b).norm())
            .fold((self.t - other.t).abs().max((self.r - other.r).abs()), f64::max)
    }
}

/// Weight `λ`, dimension `n` and normalizing constant
/// `c_λ = Γ(λ+n+2) / (π^{n+1} Γ(λ+1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightContext {
    pub lambda: f64,
    pub n: usize,
    pub c_lambda: f64,
}

impl WeightContext {
    pub fn new(lambda: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if !(lambda.is_finite() && lambda >= LAMBDA_MIN) {
            return Err(invalid("lambda", format!("must be finite and at least {LAMBDA_MIN}, got {lambda}")));
        }
        let c_lambda =
            (ln_gamma(lambda + n as f64 + 2.0) - ln_gamma(lambda + 1.0) - (n as f64 + 1.0) * PI.ln()).exp();
        Ok(WeightContext { lambda, n, c_lambda })
    }

    /// Exponent `λ + n + 2` of the Bergman kernel.
    pub fn kernel_exponent(&self) -> f64 {
        self.lambda + self.n as f64 + 2.0
    }
}

pub fn sigma_section(r: f64, n: usize) -> Result<SiegelPoint> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("r", format!("must be positive, got {r}")));
    }
    SiegelPoint::new(vec![C64::new(0.0, 0.0); n], C64::new(0.0, 1.0 / r))
}

/// `ρ(z) = (z', Re z_{n+1})`.
pub fn rho_coord(z: &SiegelPoint) -> HeisenbergElement {
    HeisenbergElement {
        w_prime: z.z_prime().to_vec(),
        t: z.z_last().re,
    }
}

/// `κ(w', t, r) = (w', t + i/r + i |w'|^2)`.
pub fn kappa(p: &GroupMomentPoint) -> Result<SiegelPoint> {
    SiegelPoint::new(p.w_prime.clone(), C64::new(p.t, 1.0 / p.r + norm_sqr(&p.w_prime)))
}

/// `τ(z) = (ρ(z), H(z))`.
pub fn tau(z: &SiegelPoint) -> GroupMomentPoint {
    GroupMomentPoint {
        w_prime: z.z_prime().to_vec(),
        t: z.z_last().re,
        r: height(z),
    }
}

/// Density of `ν_λ` with respect to `dw' dt dr`.
pub fn nu_lambda_density(ctx: &WeightContext, p: &GroupMomentPoint) -> Result<f64> {
    check_dims(ctx.n, p.w_prime.len())?;
    Ok(ctx.c_lambda / (4.0 * p.r.powf(ctx.lambda + 2.0)))
}

/// `U_0 f = f ∘ κ`.
pub fn u0_pullback<F>(f: F) -> impl Fn(&GroupMomentPoint) -> Result<C64>
where
    F: Fn(&SiegelPoint) -> C64,
{
    move |p| Ok(f(&kappa(p)?))
}

/// Inverse of [`u0_pullback`]: `g ↦ g ∘ τ`.
pub fn u0_pushforward<G>(g: G) -> impl Fn(&SiegelPoint) -> C64
where
    G: Fn(&GroupMomentPoint) -> C64,
{
    move |z| g(&tau(z))
}

/// Determinant of the finite-difference Jacobian of `τ` in real coordinates
/// `(Re z_1, Im z_1, ..., Re z_{n+1}, Im z_{n+1}) -> (Re w_1, Im w_1, ..., t, r)`.
pub fn tau_jacobian_fd(z: &SiegelPoint, step: f64) -> Result<f64> {
    let dim = 2 * (z.n() + 1);
    let base = z.coords();
    let flat = |p: &GroupMomentPoint| -> Vec<f64> {
        let mut v: Vec<f64> = p.w_prime.iter().flat_map(|w| [w.re, w.im]).collect();
        v.push(p.t);
        v.push(p.r);
        v
    };
    let mut h = step;
    while h > 0.25 * z.gap() {
        h *= 0.5;
    }
    let mut jac = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim {
        let shift = |s: f64| -> Result<Vec<f64>> {
            let mut c = base.clone();
            c[k / 2] += if k % 2 == 0 { C64::new(s, 0.0) } else { C64::new(0.0, s) };
            Ok(flat(&tau(&SiegelPoint::from_coords(&c)?)))
        };
        let (plus, minus) = (shift(h)?, shift(-h)?);
        for row in 0..dim {
            jac[(row, k)] = (plus[row] - minus[row]) / (2.0 * h);
        }
    }
    Ok(jac.determinant())
}

/// Windowed t-Fourier transform `(2π)^{-1/2} ∫ φ(t) e^{-iξt} dt`, computed
/// by the trapezoid rule on `m` equispaced nodes of `[-T, T)`. The samples are
/// stored so the transform can be queried at arbitrary `ξ`.
#[derive(Debug, Clone)]
pub struct FourierT {
    t_window: f64,
    nodes: Vec<f64>,
    samples: Vec<C64>,
}

pub fn fourier_t<F: FnMut(f64) -> C64>(mut phi: F, t_window: f64, m: usize) -> Result<FourierT> {
    if m < 2 {
        return Err(invalid("m", format!("need at least 2 nodes, got {m}")));
    }
    if !(t_window > 0.0 && t_window.is_finite()) {
        return Err(invalid("t_window", format!("must be positive, got {t_window}")));
    }
    let h = 2.0 * t_window / m as f64;
    let nodes: Vec<f64> = (0..m).map(|k| -t_window + h * k as f64).collect();
    let samples: Vec<C64> = nodes.iter().map(|&t| phi(t)).collect();
    if samples.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
        return Err(Error::NonFinite("t-Fourier samples"));
    }
    Ok(FourierT { t_window, nodes, samples })
}

impl FourierT {
    pub fn eval(&self, xi: f64) -> C64 {
        let h = 2.0 * self.t_window / self.nodes.len() as f64;
        let step = C64::new(0.0, -xi * h).exp();
        let mut phase = C64::new(0.0, xi * self.t_window).exp();
        let mut acc = C64::new(0.0, 0.0);
        for s in &self.samples {
            acc += s * phase;
            phase *= step;
        }
        acc * h / (2.0 * PI).sqrt()
    }

    /// Largest sample magnitude at the window edges relative to the largest
    /// sample overall; a proxy for the truncation error.
    pub fn edge_magnitude(&self) -> f64 {
        let peak = self.samples.iter().fold(0.0f64, |m, s| m.max(s.norm()));
        if peak == 0.0 {
            return 0.0;
        }
        let first = self.samples[0].norm();
        let last = self.samples[self.samples.len() - 1].norm();
        first.max(last) / peak
    }

    /// A warning when the edge magnitude exceeds `tol`.
    pub fn diagnostic(&self, tol: f64) -> Option<String> {
        let edge = self.edge_magnitude();
        (edge > tol).then(|| format!("window ±{} too small: relative edge magnitude {edge:e}", self.t_window))
    }
}

/// Residuals of the Cauchy–Riemann system at `(w', ξ, r)`:
/// `(∂/∂w̄_j + w_j r^2 ∂/∂r) φ` for each `j`, then `(r^2 ∂/∂r - ξ) φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrResidual {
    pub residuals: Vec<C64>,
    pub step_used: f64,
}

impl CrResidual {
    pub fn max_abs(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.norm()))
    }
}

pub fn cr_residual<F>(phi: F, w_prime: &[C64], xi: f64, r: f64, step: f64) -> Result<CrResidual>
where
    F: Fn(&[C64], f64, f64) -> C64,
{
    if !(r > 0.0 && step > 0.0) {
        return Err(invalid("r/step", "both must be positive"));
    }
    let mut h = step;
    while r - h <= 0.5 * r {
        h *= 0.5;
    }
    let dr = fd::central(|s| phi(w_prime, xi, r + s), h);
    let mut residuals = Vec::with_capacity(w_prime.len() + 1);
    for j in 0..w_prime.len() {
        let dbar = fd::wirtinger_bar(
            |d| {
                let mut w = w_prime.to_vec();
                w[j] += d;
                phi(&w, xi, r)
            },
            h,
        );
        residuals.push(dbar + w_prime[j] * r * r * dr);
    }
    residuals.push(dr * r * r - phi(w_prime, xi, r) * xi);
    Ok(CrResidual { residuals, step_used: h })
}

const HOLOMORPHY_TOL: f64 = 1e-6;

/// `φ(w', ξ, r) = e^{-ξ|w'|^2} e^{-ξ/r} ψ(w', ξ)`, after spot-checking that
/// `ψ(·, ξ)` is holomorphic on a few sample points around the origin.
pub fn cr_solution_form<P>(psi: P, n: usize, xi: f64) -> Result<impl Fn(&[C64], f64, f64) -> C64>
where
    P: Fn(&[C64], f64) -> C64,
{
    let samples = [C64::new(0.3, -0.2), C64::new(-0.7, 0.4), C64::new(0.1, 0.9)];
    for (k, s) in samples.iter().enumerate() {
        let w: Vec<C64> = (0..n).map(|j| s * (1.0 + 0.3 * (j + k) as f64)).collect();
        let scale = psi(&w, xi).norm().max(1.0);
        for j in 0..n {
            let dbar = fd::wirtinger_bar(
                |d| {
                    let mut v = w.clone();
                    v[j] += d;
                    psi(&v, xi)
                },
                fd::DEFAULT_STEP,
            );
            if dbar.norm() > HOLOMORPHY_TOL * scale {
                return Err(Error::NotHolomorphic { residue: dbar.norm() });
            }
        }
    }
    Ok(move |w: &[C64], xi: f64, r: f64| (-xi * norm_sqr(w) - xi / r).exp() * psi(w, xi))
}
