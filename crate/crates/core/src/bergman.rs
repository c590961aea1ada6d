//! Weighted Bergman spaces on `D_{n+1}`: kernel, measure, Toeplitz operators
//! with invariant symbols applied by quadrature, and a discretized version of
//! the chain `A^2_λ -> L^2(ν_λ) -> ∫⊕ F^2_{2ξ} dξ` that diagonalizes them.
//!
//! The direct integral is modelled by a finite [`XiGrid`] and polynomial
//! sections of total degree at most `d` in each Fock space. On the lattice
//! grid `ξ_k = kπ/T` (weights `π/T`) the periodic t-transform on `[-T, T)` is
//! exactly orthogonal across nodes, which makes `R R* = I` hold in the
//! discrete model up to the `r` and `w'` quadratures.

use crate::coordinates::{fourier_t, WeightContext};
use crate::error::{check_dims, invalid, Error, Result};
use crate::heisenberg::{hdot, norm_sqr};
use crate::quadrature::{composite_legendre, gauss_laguerre, integrate, integrate_to_infinity, Estimate, Tolerance};
use crate::siegel::SiegelPoint;
use crate::spectral::{Mode, RadialSymbol, SpectralFunction};
use crate::special::ln_gamma;
use crate::C64;
use std::cell::Cell;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use std::str::FromStr;

/// A function on `D_{n+1}` given by its values at `(z', z_{n+1})`.
///
/// Implementations must be safe to evaluate concurrently.
pub trait DomainFn: Sync {
    fn eval(&self, z_prime: &[C64], z_last: C64) -> C64;

    fn at(&self, z: &SiegelPoint) -> C64 {
        self.eval(z.z_prime(), z.z_last())
    }
}

impl<F> DomainFn for F
where
    F: Fn(&[C64], C64) -> C64 + Sync,
{
    fn eval(&self, z_prime: &[C64], z_last: C64) -> C64 {
        self(z_prime, z_last)
    }
}

/// Plane wave `f_b(z) = e^{i b z_{n+1}}`, a generalized eigenfunction of every
/// Toeplitz operator with invariant symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub b: f64,
}

impl PlaneWave {
    pub fn new(b: f64) -> Result<Self> {
        if b > 0.0 && b.is_finite() {
            Ok(PlaneWave { b })
        } else {
            Err(invalid("b", format!("must be positive, got {b}")))
        }
    }
}

impl DomainFn for PlaneWave {
    fn eval(&self, _z_prime: &[C64], z_last: C64) -> C64 {
        (C64::new(0.0, self.b) * z_last).exp()
    }
}

pub fn plane_wave(b: f64) -> Result<PlaneWave> {
    PlaneWave::new(b)
}

/// `K(z, w) = ((z_{n+1} - conj w_{n+1}) / 2i - z' . conj w')^{-(λ+n+2)}` on the
/// principal branch; errors if the base leaves the open right half-plane.
pub fn bergman_kernel(ctx: &WeightContext, z: &SiegelPoint, w: &SiegelPoint) -> Result<C64> {
    check_dims(ctx.n, z.n())?;
    check_dims(ctx.n, w.n())?;
    kernel_raw(ctx.kernel_exponent(), z.z_prime(), z.z_last(), w.z_prime(), w.z_last())
}

fn kernel_base(zp: &[C64], zl: C64, wp: &[C64], wl: C64) -> C64 {
    (zl - wl.conj()) / C64::new(0.0, 2.0) - hdot(zp, wp)
}

fn kernel_raw(exponent: f64, zp: &[C64], zl: C64, wp: &[C64], wl: C64) -> Result<C64> {
    let base = kernel_base(zp, zl, wp, wl);
    if !(base.re > 0.0) {
        return Err(Error::BranchViolation { re: base.re, im: base.im });
    }
    Ok((-exponent * base.ln()).exp())
}

/// Density `(c_λ / 4) (Im z_{n+1} - |z'|^2)^λ` of `v_λ` with respect to
/// Lebesgue measure on `C^{n+1}`.
pub fn v_lambda_density(ctx: &WeightContext, z: &SiegelPoint) -> Result<f64> {
    check_dims(ctx.n, z.n())?;
    Ok(ctx.c_lambda / 4.0 * z.gap().powf(ctx.lambda))
}

/// Value of the invariant symbol `a(z) = ã(Im z_{n+1} - |z'|^2)`.
pub fn symbol_on_domain(symbol: &RadialSymbol, z: &SiegelPoint) -> C64 {
    symbol.eval(z.gap())
}

/// Approximation parameters, serializable as `key = value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Half-width `T` of the t window.
    pub t_window: f64,
    /// Nodes across the t window (composite rules use panels of 16).
    pub t_nodes: usize,
    /// Gauss–Laguerre nodes for the `r` integral of `V*`.
    pub r_nodes: usize,
    /// Gauss–Laguerre nodes per `|w_j|^2` in the Fock projections.
    pub wprime_nodes: usize,
    /// Trapezoid nodes per angle `arg w_j`; one node is exact when the
    /// integrand does not depend on the angles.
    pub angular_nodes: usize,
    /// Relative tolerance of the adaptive pieces.
    pub tol: f64,
    /// Total degree of Fock sections.
    pub degree: usize,
    /// Number of lattice frequencies `ξ_k = kπ/T`.
    pub xi_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            t_window: 120.0,
            t_nodes: 960,
            r_nodes: 16,
            wprime_nodes: 8,
            angular_nodes: 8,
            tol: 1e-6,
            degree: 6,
            xi_nodes: 64,
        }
    }
}

const T_PANEL_ORDER: usize = 16;

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("t_nodes", self.t_nodes),
            ("r_nodes", self.r_nodes),
            ("wprime_nodes", self.wprime_nodes),
            ("xi_nodes", self.xi_nodes),
        ];
        for (name, c) in counts {
            if c < 2 {
                return Err(invalid(name, format!("needs at least 2 nodes, got {c}")));
            }
        }
        if self.angular_nodes < 1 {
            return Err(invalid("angular_nodes", "needs at least 1 node"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(invalid("tol", format!("must be positive, got {}", self.tol)));
        }
        if !(self.t_window > 0.0 && self.t_window.is_finite()) {
            return Err(invalid("t_window", format!("must be positive, got {}", self.t_window)));
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`; `#` starts a comment.
    pub fn merge_text(mut self, text: &str) -> Result<Self> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |reason: String| Error::Parse {
                what: "quadrature config",
                input: raw.to_string(),
                reason: format!("line {}: {reason}", lineno + 1),
            };
            let (key, value) = line.split_once('=').ok_or_else(|| perr("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let float = || value.parse::<f64>().map_err(|e| perr(e.to_string()));
            let int = || value.parse::<usize>().map_err(|e| perr(e.to_string()));
            match key {
                "t_window" => self.t_window = float()?,
                "t_nodes" => self.t_nodes = int()?,
                "r_nodes" => self.r_nodes = int()?,
                "wprime_nodes" => self.wprime_nodes = int()?,
                "angular_nodes" => self.angular_nodes = int()?,
                "tol" => self.tol = float()?,
                "degree" => self.degree = int()?,
                "xi_nodes" => self.xi_nodes = int()?,
                _ => return Err(perr(format!("unknown key {key:?}"))),
            }
        }
        self.validate()?;
        Ok(self)
    }

    fn t_panels(&self) -> usize {
        self.t_nodes.div_ceil(T_PANEL_ORDER).max(1)
    }
}

impl FromStr for QuadratureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        QuadratureSpec::default().merge_text(s)
    }
}

impl fmt::Display for QuadratureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "t_window = {}", self.t_window)?;
        writeln!(f, "t_nodes = {}", self.t_nodes)?;
        writeln!(f, "r_nodes = {}", self.r_nodes)?;
        writeln!(f, "wprime_nodes = {}", self.wprime_nodes)?;
        writeln!(f, "angular_nodes = {}", self.angular_nodes)?;
        writeln!(f, "tol = {}", self.tol)?;
        writeln!(f, "degree = {}", self.degree)?;
        writeln!(f, "xi_nodes = {}", self.xi_nodes)
    }
}

/// `∫_{C^n} f(w) dw` by nested adaptive integration over `ρ_j = |w_j|^2`
/// (with `dw_j = dρ_j dθ_j / 2`) and a trapezoid rule in each angle.
pub fn integrate_cn(f: &dyn Fn(&[C64]) -> C64, n: usize, angular: usize, tol: Tolerance) -> Estimate {
    let converged = Cell::new(true);
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut est = nested_cn(f, &mut w, 0, angular.max(1), tol, &converged);
    est.converged &= converged.get();
    est
}

fn nested_cn(
    f: &dyn Fn(&[C64]) -> C64,
    w: &mut Vec<C64>,
    j: usize,
    angular: usize,
    tol: Tolerance,
    converged: &Cell<bool>,
) -> Estimate {
    if j == w.len() {
        let mut e = Estimate::zero();
        e.value = f(w);
        return e;
    }
    let dtheta = 2.0 * PI / angular as f64;
    let est = integrate_to_infinity(
        |rho| {
            let radius = rho.sqrt();
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..angular {
                w[j] = C64::from_polar(radius, dtheta * k as f64);
                let inner = nested_cn(f, w, j + 1, angular, tol, converged);
                if !inner.converged {
                    converged.set(false);
                }
                acc += inner.value;
            }
            acc * (0.5 * dtheta)
        },
        0.0,
        tol,
    );
    if !est.converged {
        converged.set(false);
    }
    est
}

/// Result of [`toeplitz_apply`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToeplitzValue {
    pub value: C64,
    /// Adaptive error estimate plus the estimated t-window truncation.
    pub error: f64,
    /// Share of the t integrals carried by the outer halves of the windows.
    pub tail_fraction: f64,
}

/// `(T_a f)(z) = ∫ a(w) f(w) K(z, w) dv_λ(w)` in group-moment coordinates
/// with `s = 1/r`, where `a(κ(w', t, r)) = ã(s)` and `dv_λ` becomes
/// `(c_λ/4) s^λ ds dw' dt`.
///
/// The `s` integral is adaptive and split at the symbol's breakpoints, `w'`
/// uses [`integrate_cn`], and the oscillatory `t` integral uses composite
/// Gauss–Legendre panels on `[Re z_{n+1} - T, Re z_{n+1} + T]`.
pub fn toeplitz_apply(
    ctx: &WeightContext,
    symbol: &RadialSymbol,
    f: &dyn DomainFn,
    z: &SiegelPoint,
    q: &QuadratureSpec,
) -> Result<ToeplitzValue> {
    q.validate()?;
    check_dims(ctx.n, z.n())?;
    let n = ctx.n;
    let exponent = ctx.kernel_exponent();
    let x0 = z.z_last().re;
    let rule = composite_legendre(x0 - q.t_window, x0 + q.t_window, q.t_panels(), T_PANEL_ORDER);
    let outer_mark = 0.5 * q.t_window;
    let branch_error: Cell<Option<Error>> = Cell::new(None);
    let tail_mass = Cell::new(0.0f64);
    let total_mass = Cell::new(0.0f64);
    let inner_tol = Tolerance::relative(0.1 * q.tol);

    let t_integral = |w: &[C64], s: f64| -> C64 {
        let lift = s + norm_sqr(w);
        let mut acc = C64::new(0.0, 0.0);
        let mut tail = C64::new(0.0, 0.0);
        for (t, wt) in rule.iter() {
            let wl = C64::new(t, lift);
            let k = match kernel_raw(exponent, z.z_prime(), z.z_last(), w, wl) {
                Ok(k) => k,
                Err(e) => {
                    branch_error.set(Some(e));
                    return C64::new(0.0, 0.0);
                }
            };
            let term = f.eval(w, wl) * k * wt;
            acc += term;
            if (t - x0).abs() > outer_mark {
                tail += term;
            }
        }
        tail_mass.set(tail_mass.get() + tail.norm());
        total_mass.set(total_mass.get() + acc.norm());
        acc
    };
    let w_integral = |s: f64| -> C64 {
        let est = integrate_cn(&|w: &[C64]| t_integral(w, s), n, q.angular_nodes, inner_tol);
        est.value
    };
    let s_integrand = |s: f64| -> C64 {
        if s <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        symbol.eval(s) * s.powf(ctx.lambda) * w_integral(s)
    };

    let tol = Tolerance::relative(q.tol);
    let mut pts = vec![0.0];
    pts.extend(symbol.breakpoints());
    if pts.len() == 1 {
        pts.push(1.0);
    }
    let mut est = Estimate::zero();
    for w in pts.windows(2) {
        est = est.combine(integrate(s_integrand, w[0], w[1], tol));
    }
    est = est.combine(integrate_to_infinity(s_integrand, *pts.last().expect("nonempty"), tol));
    if let Some(e) = branch_error.take() {
        return Err(e);
    }
    let pref = ctx.c_lambda / 4.0;
    let value = est.value * pref;
    let tail_fraction = if total_mass.get() > 0.0 {
        tail_mass.get() / total_mass.get()
    } else {
        0.0
    };
    let error = est.error * pref + tail_fraction * value.norm();
    if error > q.tol.max(1e-3) * value.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::NonConvergence {
            estimate: error,
            tolerance: q.tol.max(1e-3) * value.norm(),
            detail: format!("Toeplitz quadrature for {symbol} (t tail fraction {tail_fraction:e})"),
        });
    }
    Ok(ToeplitzValue {
        value,
        error,
        tail_fraction,
    })
}

/// Report of [`verify_multiplier`].
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierReport {
    pub b: f64,
    pub gamma: C64,
    /// `T_a f_b(z) / f_b(z)` per sample.
    pub ratios: Vec<C64>,
    /// `max |ratio - γ(b)| / |γ(b)|`.
    pub max_rel_deviation: f64,
    /// `max |ratio_i - ratio_j| / |γ(b)|`.
    pub spread: f64,
}

/// Checks `T_a f_b = γ(b) f_b` at the sample points. When every sample has
/// `z' = 0` the integrand does not depend on the angles of `w'`, and a single
/// angular node is used.
pub fn verify_multiplier(
    ctx: &WeightContext,
    symbol: &RadialSymbol,
    b: f64,
    samples: &[SiegelPoint],
    q: &QuadratureSpec,
) -> Result<MultiplierReport> {
    let f = PlaneWave::new(b)?;
    let sf = SpectralFunction::new(symbol.clone(), ctx.lambda, Mode::ClosedForm)?;
    let gamma = sf.eval(b, 1e-12)?.value;
    let mut spec = q.clone();
    if samples.iter().all(|z| z.z_prime().iter().all(|w| *w == C64::new(0.0, 0.0))) {
        spec.angular_nodes = 1;
    }
    let ratios: Vec<C64> = samples
        .iter()
        .map(|z| Ok(toeplitz_apply(ctx, symbol, &f, z, &spec)?.value / f.at(z)))
        .collect::<Result<_>>()?;
    let scale = gamma.norm().max(f64::MIN_POSITIVE);
    let max_rel_deviation = ratios.iter().fold(0.0f64, |m, r| m.max((r - gamma).norm() / scale));
    let mut spread = 0.0f64;
    for (i, a) in ratios.iter().enumerate() {
        for b in &ratios[i + 1..] {
            spread = spread.max((a - b).norm() / scale);
        }
    }
    Ok(MultiplierReport {
        b,
        gamma,
        ratios,
        max_rel_deviation,
        spread,
    })
}

/// Multi-indices in `n` variables of total degree at most `d`, graded.
pub fn multi_indices(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for total in 0..=d {
        let mut cur = vec![0usize; n];
        compositions(total, 0, &mut cur, &mut out);
    }
    out
}

fn compositions(remaining: usize, j: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if j + 1 == cur.len() {
        cur[j] = remaining;
        out.push(cur.clone());
        return;
    }
    for k in (0..=remaining).rev() {
        cur[j] = k;
        compositions(remaining - k, j + 1, cur, out);
    }
    cur[j] = 0;
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// `‖w^α‖^2` in `F^2_{2ξ}`, i.e. `α! / (2ξ)^{|α|}`.
pub fn monomial_norm_sq(alpha: &[usize], xi: f64) -> f64 {
    let deg: usize = alpha.iter().sum();
    alpha.iter().map(|&a| factorial(a)).product::<f64>() / (2.0 * xi).powi(deg as i32)
}

fn monomial(alpha: &[usize], w: &[C64]) -> C64 {
    alpha
        .iter()
        .zip(w)
        .fold(C64::new(1.0, 0.0), |acc, (&a, &x)| acc * x.powu(a as u32))
}

/// Frequency nodes and weights discretizing `∫ ... dξ` over `R_+`.
#[derive(Debug, Clone, PartialEq)]
pub struct XiGrid {
    pub xi: Vec<f64>,
    pub weights: Vec<f64>,
}

impl XiGrid {
    /// `ξ_k = kπ/T`, `k = 1..=count`, weights `π/T`.
    pub fn lattice(t_window: f64, count: usize) -> Result<Self> {
        if !(t_window > 0.0) || count == 0 {
            return Err(invalid("lattice", "needs a positive window and at least one node"));
        }
        let h = PI / t_window;
        Ok(XiGrid {
            xi: (1..=count).map(|k| h * k as f64).collect(),
            weights: vec![h; count],
        })
    }

    pub fn single(xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(invalid("xi", "must be positive"));
        }
        Ok(XiGrid {
            xi: vec![xi],
            weights: vec![1.0],
        })
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }
}

/// One node of a [`FockSection`].
#[derive(Debug, Clone, PartialEq)]
pub struct FockNode {
    pub xi: f64,
    pub weight: f64,
    /// Coefficients in the order of [`multi_indices`].
    pub coeffs: Vec<C64>,
}

/// A section `ξ ↦ ψ(·, ξ) ∈ F^2_{2ξ}(C^n)` sampled on a frequency grid, each
/// value a polynomial of total degree at most `degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSection {
    pub n: usize,
    pub degree: usize,
    pub nodes: Vec<FockNode>,
    alphas: Arc<Vec<Vec<usize>>>,
}

impl FockSection {
    pub fn zero(n: usize, degree: usize, grid: &XiGrid) -> Self {
        let alphas = Arc::new(multi_indices(n, degree));
        let len = alphas.len();
        FockSection {
            n,
            degree,
            alphas,
            nodes: grid
                .xi
                .iter()
                .zip(&grid.weights)
                .map(|(&xi, &weight)| FockNode {
                    xi,
                    weight,
                    coeffs: vec![C64::new(0.0, 0.0); len],
                })
                .collect(),
        }
    }

    /// Sets the coefficient of `w^α` at node `k`.
    pub fn set(&mut self, k: usize, alpha: &[usize], value: C64) -> Result<()> {
        let idx = self
            .alphas
            .iter()
            .position(|a| a == alpha)
            .ok_or_else(|| invalid("alpha", format!("{alpha:?} is not a multi-index of degree <= {}", self.degree)))?;
        let node = self
            .nodes
            .get_mut(k)
            .ok_or_else(|| invalid("node", format!("index {k} out of range")))?;
        node.coeffs[idx] = value;
        Ok(())
    }

    /// `ψ(w', ξ_k)`.
    pub fn eval(&self, k: usize, w: &[C64]) -> C64 {
        self.alphas
            .iter()
            .zip(&self.nodes[k].coeffs)
            .map(|(a, c)| c * monomial(a, w))
            .sum()
    }

    /// Multi-indices labelling the coefficients.
    pub fn alphas(&self) -> &[Vec<usize>] {
        &self.alphas
    }

    pub fn grid(&self) -> XiGrid {
        XiGrid {
            xi: self.nodes.iter().map(|n| n.xi).collect(),
            weights: self.nodes.iter().map(|n| n.weight).collect(),
        }
    }

    /// Largest coefficient difference relative to the largest coefficient of
    /// `self`.
    pub fn rel_diff(&self, other: &FockSection) -> f64 {
        let mut scale = 0.0f64;
        let mut diff = 0.0f64;
        for (a, b) in self.nodes.iter().zip(&other.nodes) {
            for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
                scale = scale.max(x.norm());
                diff = diff.max((x - y).norm());
            }
        }
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

/// `‖ψ(·, ξ_k)‖^2` from monomial orthogonality.
pub fn fock_node_norm_sq(s: &FockSection, k: usize) -> f64 {
    s.alphas
        .iter()
        .zip(&s.nodes[k].coeffs)
        .map(|(a, c)| c.norm_sqr() * monomial_norm_sq(a, s.nodes[k].xi))
        .sum()
}

/// `(Σ_k weight_k ‖ψ(·, ξ_k)‖^2)^{1/2}`.
pub fn fock_norm(ctx: &WeightContext, s: &FockSection) -> Result<f64> {
    check_dims(ctx.n, s.n)?;
    Ok((0..s.nodes.len())
        .map(|k| s.nodes[k].weight * fock_node_norm_sq(s, k))
        .sum::<f64>()
        .sqrt())
}

/// Constant of `V_λ`: `2 √(π (2ξ)^{λ+n+1} / Γ(λ+n+2))`.
pub fn v_constant(ctx: &WeightContext, xi: f64) -> f64 {
    let n = ctx.n as f64;
    2.0 * (0.5 * (PI.ln() + (ctx.lambda + n + 1.0) * (2.0 * xi).ln() - ln_gamma(ctx.lambda + n + 2.0))).exp()
}

/// Constant of `V_λ*` multiplying `e^{ξ|w'|^2} ∫ φ e^{-ξ/r} r^{-λ-2} dr`
/// before the Fock projection.
fn v_adjoint_constant(ctx: &WeightContext, xi: f64) -> f64 {
    let n = ctx.n as f64;
    let ln = 0.5 * (PI.ln() + (ctx.lambda - n + 1.0) * (2.0 * xi).ln() + ln_gamma(ctx.lambda + n + 2.0))
        - (2.0 * PI).ln()
        - ln_gamma(ctx.lambda + 1.0);
    ln.exp()
}

/// `V_λ ψ` as a function of `(w', ξ, r)`, defined on the section's nodes.
#[derive(Debug, Clone)]
pub struct VImage {
    ctx: WeightContext,
    section: FockSection,
}

impl VImage {
    /// Value at node `k`.
    pub fn eval_node(&self, k: usize, w: &[C64], r: f64) -> C64 {
        let xi = self.section.nodes[k].xi;
        self.section.eval(k, w) * (v_constant(&self.ctx, xi) * (-xi * norm_sqr(w) - xi / r).exp())
    }

    /// Value at `(w', ξ, r)`; zero unless `ξ` is one of the nodes.
    pub fn eval(&self, w: &[C64], xi: f64, r: f64) -> C64 {
        match self.section.nodes.iter().position(|n| n.xi == xi) {
            Some(k) => self.eval_node(k, w, r),
            None => C64::new(0.0, 0.0),
        }
    }

    pub fn section(&self) -> &FockSection {
        &self.section
    }
}

/// `(V_λ ψ)(w', ξ, r) = C_V(ξ) e^{-ξ|w'|^2} e^{-ξ/r} ψ(w', ξ)`.
pub fn v_lambda_apply(ctx: &WeightContext, s: &FockSection) -> Result<VImage> {
    check_dims(ctx.n, s.n)?;
    Ok(VImage {
        ctx: *ctx,
        section: s.clone(),
    })
}

/// `‖V_λ ψ‖^2` in `L^2(ν_λ)` after the t-Fourier transform, by nested
/// adaptive quadrature over `s = 1/r` and `w'` independent of the
/// Gauss–Laguerre rules used by [`v_lambda_adjoint`].
pub fn v_image_norm_sq(v: &VImage, q: &QuadratureSpec) -> Result<f64> {
    let ctx = v.ctx;
    let tol = Tolerance::relative(0.1 * q.tol);
    let mut total = 0.0;
    for (k, node) in v.section.nodes.iter().enumerate() {
        let est = integrate_to_infinity(
            |s| {
                let r = 1.0 / s;
                let w_part = integrate_cn(&|w: &[C64]| C64::new(v.eval_node(k, w, r).norm_sqr(), 0.0), ctx.n, q.angular_nodes, tol);
                // ν_λ density c/(4 r^{λ+2}) and dr = ds / s^2
                w_part.value * (ctx.c_lambda / 4.0 * s.powf(ctx.lambda))
            },
            0.0,
            Tolerance::relative(q.tol),
        );
        if !est.converged {
            return Err(Error::NonConvergence {
                estimate: est.error,
                tolerance: q.tol * est.value.norm(),
                detail: format!("norm of V psi at xi = {}", node.xi),
            });
        }
        total += node.weight * est.value.re;
    }
    Ok(total)
}

/// `V_λ* φ` on the grid: for each `ξ_k`,
/// `ψ = P_d[ C*(ξ) e^{ξ|w'|^2} ∫ φ(w', ξ, r) e^{-ξ/r} r^{-λ-2} dr ]`, where
/// `P_d` is the Fock-orthogonal projection onto degree `<= d`. The `r`
/// integral uses generalized Gauss–Laguerre nodes in `u = 2ξ/r`, and the
/// projection a polar rule with Gauss–Laguerre radii and `2d + 2` angles.
pub fn v_lambda_adjoint<F>(ctx: &WeightContext, phi: F, grid: &XiGrid, q: &QuadratureSpec) -> Result<FockSection>
where
    F: Fn(&[C64], f64, f64) -> C64,
{
    q.validate()?;
    let n = ctx.n;
    let d = q.degree;
    let alphas = multi_indices(n, d);
    let r_rule = gauss_laguerre(q.r_nodes, ctx.lambda);
    let rho_rule = gauss_laguerre(q.wprime_nodes, 0.0);
    let angles = 2 * d + 2;
    let mut out = FockSection::zero(n, d, grid);
    for (k, node) in out.nodes.iter_mut().enumerate() {
        let xi = grid.xi[k];
        let x = 2.0 * xi;
        // ∫ φ e^{-ξ/r} r^{-λ-2} dr = x^{-λ-1} ∫ φ(2ξ/u) e^{u/2} u^λ e^{-u} du
        let r_integral = |w: &[C64]| -> C64 {
            r_rule.iter().map(|(u, wt)| phi(w, xi, x / u) * ((0.5 * u).exp() * wt)).sum::<C64>()
                * x.powf(-ctx.lambda - 1.0)
        };
        let pref = v_adjoint_constant(ctx, xi) * (x / PI).powi(n as i32);
        // tensor polar grid: ρ_j = u_j / 2ξ, dw_j = dρ_j dθ_j / 2
        let per_coord = rho_rule.len() * angles;
        let total = per_coord.pow(n as u32);
        let mut w = vec![C64::new(0.0, 0.0); n];
        let mut acc = vec![C64::new(0.0, 0.0); alphas.len()];
        for flat in 0..total {
            let mut rem = flat;
            let mut weight = 1.0;
            let mut rho_sum = 0.0;
            for wj in w.iter_mut() {
                let idx = rem % per_coord;
                rem /= per_coord;
                let (ri, ai) = (idx / angles, idx % angles);
                let rho = rho_rule.nodes[ri] / x;
                rho_sum += rho;
                *wj = C64::from_polar(rho.sqrt(), 2.0 * PI * ai as f64 / angles as f64);
                weight *= rho_rule.weights[ri] / x * 0.5 * (2.0 * PI / angles as f64);
            }
            // K Φ(w) conj(w^α) e^{-ξ|w|^2} against the Laguerre weight e^{-2ξ|w|^2}
            let g = r_integral(&w) * (weight * (xi * rho_sum).exp());
            for (slot, a) in acc.iter_mut().zip(&alphas) {
                *slot += g * monomial(a, &w).conj();
            }
        }
        for ((c, a), s) in node.coeffs.iter_mut().zip(&alphas).zip(&acc) {
            *c = s * pref / monomial_norm_sq(a, xi);
        }
    }
    Ok(out)
}

/// `R_λ f`: pull back by `κ`, Fourier transform in `t` at the grid
/// frequencies, then apply [`v_lambda_adjoint`]. The t transform uses
/// `q.t_window` and `q.t_nodes`; grids from [`XiGrid::lattice`] with the same
/// window make the discrete model exact on images of [`r_lambda_adjoint`].
pub fn r_lambda_apply(ctx: &WeightContext, f: &dyn DomainFn, grid: &XiGrid, q: &QuadratureSpec) -> Result<FockSection> {
    q.validate()?;
    let failure: Cell<Option<Error>> = Cell::new(None);
    let phi = |w: &[C64], xi: f64, r: f64| -> C64 {
        let lift = 1.0 / r + norm_sqr(w);
        match fourier_t(|t| f.eval(w, C64::new(t, lift)), q.t_window, q.t_nodes) {
            Ok(ft) => ft.eval(xi),
            Err(_) => {
                failure.set(Some(Error::Unsupported(
                    "input is not finite on the t window; outside the supported test class".into(),
                )));
                C64::new(0.0, 0.0)
            }
        }
    };
    let out = v_lambda_adjoint(ctx, phi, grid, q)?;
    match failure.take() {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// `R_λ* ψ`, the holomorphic function
/// `z ↦ (2π)^{-1/2} Σ_k weight_k C_V(ξ_k) e^{iξ_k z_{n+1}} ψ(z', ξ_k)`.
#[derive(Debug, Clone)]
pub struct RAdjoint {
    ctx: WeightContext,
    section: FockSection,
}

impl DomainFn for RAdjoint {
    fn eval(&self, z_prime: &[C64], z_last: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (k, node) in self.section.nodes.iter().enumerate() {
            if node.coeffs.iter().all(|c| *c == C64::new(0.0, 0.0)) {
                continue;
            }
            let c = node.weight * v_constant(&self.ctx, node.xi);
            acc += self.section.eval(k, z_prime) * (C64::new(0.0, node.xi) * z_last).exp() * c;
        }
        acc / (2.0 * PI).sqrt()
    }
}

pub fn r_lambda_adjoint(ctx: &WeightContext, s: &FockSection) -> Result<RAdjoint> {
    check_dims(ctx.n, s.n)?;
    Ok(RAdjoint {
        ctx: *ctx,
        section: s.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kernel_examples() {
        let ctx = WeightContext::new(0.0, 1).unwrap();
        let z = SiegelPoint::new(vec![c(0.0, 0.0)], c(0.0, 1.0)).unwrap();
        assert!((bergman_kernel(&ctx, &z, &z).unwrap() - 1.0).norm() < 1e-15);
        let z2 = SiegelPoint::new(vec![c(0.0, 0.0)], c(0.0, 2.0)).unwrap();
        let k = bergman_kernel(&ctx, &z2, &z2).unwrap();
        assert!((k.re - 2f64.powf(-3.0)).abs() < 1e-15);
    }

    #[test]
    fn kernel_branch_check() {
        let e = kernel_raw(3.0, &[c(0.0, 0.0)], c(0.0, -1.0), &[c(0.0, 0.0)], c(0.0, -1.0));
        assert!(matches!(e, Err(Error::BranchViolation { .. })));
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(1, 3), vec![vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(multi_indices(2, 2).len(), 6);
        assert_eq!(multi_indices(3, 4).len(), 35);
    }

    #[test]
    fn fock_norm_examples() {
        let ctx = WeightContext::new(0.0, 1).unwrap();
        let grid = XiGrid::single(1.0).unwrap();
        let mut s = FockSection::zero(1, 2, &grid);
        s.set(0, &[0], c(1.0, 0.0)).unwrap();
        assert!((fock_norm(&ctx, &s).unwrap() - 1.0).abs() < 1e-15);
        let mut s = FockSection::zero(1, 2, &grid);
        s.set(0, &[1], c(1.0, 0.0)).unwrap();
        assert!((fock_norm(&ctx, &s).unwrap().powi(2) - 0.5).abs() < 1e-15);
        let mut s = FockSection::zero(1, 2, &grid);
        s.set(0, &[2], c(1.0, 0.0)).unwrap();
        assert!((fock_norm(&ctx, &s).unwrap().powi(2) - 0.5).abs() < 1e-15);
        assert!(s.set(0, &[3], c(1.0, 0.0)).is_err());
    }

    #[test]
    fn spec_text_round_trip() {
        let q = QuadratureSpec {
            t_window: 12.5,
            degree: 3,
            ..QuadratureSpec::default()
        };
        let back: QuadratureSpec = q.to_string().parse().unwrap();
        assert_eq!(back, q);
        let partial: QuadratureSpec = "# comment\n tol = 1e-4 \n".parse().unwrap();
        assert_eq!(partial.tol, 1e-4);
        assert!("bogus = 1".parse::<QuadratureSpec>().is_err());
        assert!("t_nodes = 1".parse::<QuadratureSpec>().is_err());
        assert!("tol = 0".parse::<QuadratureSpec>().is_err());
    }

    #[test]
    fn adjoint_constants_invert_each_other() {
        for &(lambda, n) in &[(0.0, 1), (1.0, 1), (0.5, 2)] {
            let ctx = WeightContext::new(lambda, n).unwrap();
            for &xi in &[0.3, 1.0, 4.0] {
                let prod = v_constant(&ctx, xi) * v_adjoint_constant(&ctx, xi) * crate::special::gamma(lambda + 1.0)
                    / (2.0 * xi).powf(lambda + 1.0);
                assert!((prod - 1.0).abs() < 1e-13, "{prod}");
            }
        }
    }
}
