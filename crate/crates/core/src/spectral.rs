//! The spectral function of Toeplitz operators with Heisenberg-invariant
//! symbols,
//!
//! ```text
//! γ(ξ) = (2ξ)^{λ+1} / Γ(λ+1) ∫_0^∞ ã(r) e^{-2ξr} r^λ dr,
//! ```
//!
//! its closed forms on the symbol catalog, the equivalent
//! `(n+1)`-dimensional integral `γ̂` coming from the maximal abelian subgroup
//! `R^{n+1}`, and diagnostics for uniform continuity in the logarithmic
//! metric.
//!
//! After `s = 2ξr` the kernel becomes the fixed density
//! `s^λ e^{-s} / Γ(λ+1)`, so one family of rules covers every `ξ`.

use crate::coordinates::LAMBDA_MIN;
use crate::error::{invalid, Error, Result};
use crate::quadrature::{composite_legendre, gauss_laguerre, integrate, integrate_pieces, Estimate, Tolerance};
use crate::special::{gamma_p, gamma_p_diff, gamma_q, ln_gamma, ln_gamma_complex};
use crate::C64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

/// A user-supplied profile. Quadrature assumes it is continuous away from
/// the listed breakpoints.
#[derive(Clone)]
pub struct CustomProfile {
    pub name: String,
    pub profile: Arc<dyn Fn(f64) -> C64 + Send + Sync>,
    pub sup_bound: f64,
    pub breakpoints: Vec<f64>,
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("name", &self.name)
            .field("sup_bound", &self.sup_bound)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

/// Catalog of radial profiles `ã : R_+ -> C`.
#[derive(Debug, Clone)]
pub enum SymbolKind {
    Constant(f64),
    /// `e^{-βr}`.
    Exponential(f64),
    /// Indicator of `[a, b)`; `b` may be infinite.
    Indicator(f64, f64),
    /// `min(r^p, 1)`: `r^p` truncated to stay bounded, with a kink at `r = 1`.
    Power(f64),
    /// `e^{iω log r}`.
    OscLog(f64),
    Custom(CustomProfile),
}

/// A radial profile times a complex amplitude. The symbol on the domain is
/// `a(z) = ã(Im z_{n+1} - |z'|^2)`.
#[derive(Debug, Clone)]
pub struct RadialSymbol {
    pub kind: SymbolKind,
    pub scale: C64,
}

fn positive_or_zero(name: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(invalid(name, format!("must be finite and non-negative, got {x}")))
    }
}

impl RadialSymbol {
    fn of(kind: SymbolKind) -> Self {
        RadialSymbol {
            kind,
            scale: C64::new(1.0, 0.0),
        }
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(invalid("c", "must be finite"));
        }
        Ok(Self::of(SymbolKind::Constant(c)))
    }

    pub fn exponential(beta: f64) -> Result<Self> {
        Ok(Self::of(SymbolKind::Exponential(positive_or_zero("beta", beta)?)))
    }

    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        let a = positive_or_zero("a", a)?;
        if !(b > a) || b.is_nan() {
            return Err(invalid("b", format!("must exceed a = {a}, got {b}")));
        }
        Ok(Self::of(SymbolKind::Indicator(a, b)))
    }

    pub fn power(p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(invalid("p", "must be finite"));
        }
        Ok(Self::of(SymbolKind::Power(p)))
    }

    pub fn osc_log(omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(invalid("omega", "must be finite"));
        }
        Ok(Self::of(SymbolKind::OscLog(omega)))
    }

    pub fn custom<F>(name: &str, profile: F, sup_bound: f64, breakpoints: Vec<f64>) -> Result<Self>
    where
        F: Fn(f64) -> C64 + Send + Sync + 'static,
    {
        if !(sup_bound > 0.0 && sup_bound.is_finite()) {
            return Err(invalid("sup_bound", "must be positive and finite"));
        }
        Ok(Self::of(SymbolKind::Custom(CustomProfile {
            name: name.to_string(),
            profile: Arc::new(profile),
            sup_bound,
            breakpoints,
        })))
    }

    /// The same profile with amplitude multiplied by `c`.
    pub fn scaled(&self, c: C64) -> Self {
        RadialSymbol {
            kind: self.kind.clone(),
            scale: self.scale * c,
        }
    }

    /// Parses `const:c`, `exp:beta`, `ind:a,b` (`b` may be `inf`), `pow:p`
    /// or `osclog:omega`.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            what: "symbol",
            input: text.to_string(),
            reason: reason.to_string(),
        };
        let (tag, args) = text.trim().split_once(':').ok_or_else(|| err("expected tag:parameters"))?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| err(&e.to_string()))?;
        let one = |nums: &[f64]| -> Result<f64> {
            match nums {
                [x] => Ok(*x),
                _ => Err(err("expected exactly one parameter")),
            }
        };
        match tag {
            "const" => Self::constant(one(&nums)?),
            "exp" => Self::exponential(one(&nums)?),
            "ind" => match nums[..] {
                [a, b] => Self::indicator(a, b),
                _ => Err(err("expected two parameters a,b")),
            },
            "pow" => Self::power(one(&nums)?),
            "osclog" => Self::osc_log(one(&nums)?),
            _ => Err(err("unknown tag; expected const, exp, ind, pow or osclog")),
        }
    }

    fn base(&self, r: f64) -> C64 {
        match &self.kind {
            SymbolKind::Constant(c) => C64::new(*c, 0.0),
            SymbolKind::Exponential(beta) => C64::new((-beta * r).exp(), 0.0),
            SymbolKind::Indicator(a, b) => C64::new(if r >= *a && r < *b { 1.0 } else { 0.0 }, 0.0),
            SymbolKind::Power(p) => C64::new(r.powf(*p).min(1.0), 0.0),
            SymbolKind::OscLog(omega) => C64::new(0.0, omega * r.ln()).exp(),
            SymbolKind::Custom(c) => (c.profile)(r),
        }
    }

    pub fn eval(&self, r: f64) -> C64 {
        self.scale * self.base(r)
    }

    pub fn sup_bound(&self) -> f64 {
        let base = match &self.kind {
            SymbolKind::Constant(c) => c.abs(),
            SymbolKind::Custom(c) => c.sup_bound,
            _ => 1.0,
        };
        base * self.scale.norm()
    }

    /// Points of `R_+` where the profile may be discontinuous or kinked.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = match &self.kind {
            SymbolKind::Indicator(a, b) => [*a, *b].into_iter().filter(|x| *x > 0.0 && x.is_finite()).collect(),
            SymbolKind::Power(p) if *p != 0.0 => vec![1.0],
            SymbolKind::Custom(c) => c.breakpoints.iter().copied().filter(|x| *x > 0.0 && x.is_finite()).collect(),
            _ => Vec::new(),
        };
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// `|ã(r)| <= sup_bound` on the given sample points.
    pub fn spot_check(&self, samples: &[f64]) -> Result<()> {
        let bound = self.sup_bound();
        for &r in samples {
            let v = self.eval(r).norm();
            if v > bound * (1.0 + 1e-12) {
                return Err(Error::InvariantFailure(format!("|ã({r})| = {v} exceeds sup bound {bound}")));
            }
        }
        Ok(())
    }

    /// Whether, at frequency `ξ`, the profile varies slowly on the scale of
    /// the density `s^λ e^{-s}`, so a plain Gauss–Laguerre rule may be tried.
    fn laguerre_friendly(&self, xi: f64) -> bool {
        match self.kind {
            SymbolKind::Constant(_) => true,
            SymbolKind::Exponential(beta) => beta <= 2.0 * xi,
            _ => false,
        }
    }
}

impl fmt::Display for RadialSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match &self.kind {
            SymbolKind::Constant(c) => format!("const:{c}"),
            SymbolKind::Exponential(b) => format!("exp:{b}"),
            SymbolKind::Indicator(a, b) => format!("ind:{a},{b}"),
            SymbolKind::Power(p) => format!("pow:{p}"),
            SymbolKind::OscLog(w) => format!("osclog:{w}"),
            SymbolKind::Custom(c) => format!("custom:{}", c.name),
        };
        if self.scale == C64::new(1.0, 0.0) {
            write!(f, "{tag}")
        } else {
            write!(f, "({}{:+}i)*{tag}", self.scale.re, self.scale.im)
        }
    }
}

/// How a value of `γ` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    ClosedForm,
    Quadrature,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::ClosedForm => "closed",
            Mode::Quadrature => "quadrature",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaValue {
    pub value: C64,
    /// Absolute error estimate.
    pub error: f64,
    pub mode: Mode,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= LAMBDA_MIN {
        Ok(())
    } else {
        Err(invalid("lambda", format!("must be finite and at least {LAMBDA_MIN}, got {lambda}")))
    }
}

fn check_xi(xi: f64) -> Result<()> {
    if xi > 0.0 && xi.is_finite() {
        Ok(())
    } else {
        Err(invalid("xi", format!("must be positive and finite, got {xi}")))
    }
}

/// Relative accuracy claimed for closed-form values.
const CLOSED_FORM_REL_ERROR: f64 = 1e-13;

/// Closed forms of `γ` on the catalog; `Unsupported` for custom profiles (and
/// for `Power(p)` with `λ + 1 + p <= 0`).
pub fn gamma_closed_form(symbol: &RadialSymbol, lambda: f64, xi: f64) -> Result<C64> {
    check_lambda(lambda)?;
    check_xi(xi)?;
    let a = lambda + 1.0;
    let x = 2.0 * xi;
    let base = match &symbol.kind {
        SymbolKind::Constant(c) => C64::new(*c, 0.0),
        SymbolKind::Exponential(beta) => C64::new((a * (x.ln() - (x + beta).ln())).exp(), 0.0),
        SymbolKind::Indicator(lo, hi) => C64::new(gamma_p_diff(a, x * lo, x * hi), 0.0),
        SymbolKind::OscLog(omega) => {
            let ln = C64::new(0.0, -omega * x.ln()) + ln_gamma_complex(C64::new(a, *omega)) - ln_gamma(a);
            ln.exp()
        }
        SymbolKind::Power(p) => {
            let p = *p;
            if p == 0.0 {
                C64::new(1.0, 0.0)
            } else if a + p <= 0.0 {
                return Err(Error::Unsupported(format!("no closed form for pow:{p} at lambda = {lambda}")));
            } else {
                let ratio = (ln_gamma(a + p) - ln_gamma(a) - p * x.ln()).exp();
                let v = if p > 0.0 {
                    ratio * gamma_p(a + p, x) + gamma_q(a, x)
                } else {
                    gamma_p(a, x) + ratio * gamma_q(a + p, x)
                };
                C64::new(v, 0.0)
            }
        }
        SymbolKind::Custom(c) => {
            return Err(Error::Unsupported(format!("custom symbol {} has no closed form", c.name)))
        }
    };
    Ok(symbol.scale * base)
}

/// Tail level below which truncated pieces are dropped.
const TAIL: f64 = 1e-30;

/// `γ(ξ)` by quadrature after `s = 2ξr`, to relative tolerance `tol`.
pub fn gamma_quadrature(symbol: &RadialSymbol, lambda: f64, xi: f64, tol: f64) -> Result<(C64, f64)> {
    check_lambda(lambda)?;
    check_xi(xi)?;
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let a = lambda + 1.0;
    let x = 2.0 * xi;
    let norm = (-ln_gamma(a)).exp();
    let profile = |s: f64| symbol.eval(s / x);

    if symbol.laguerre_friendly(xi) {
        let quad = |m: usize| -> C64 {
            let rule = gauss_laguerre(m, lambda);
            rule.iter().map(|(u, w)| profile(u) * w).sum::<C64>() * norm
        };
        let (coarse, fine) = (quad(64), quad(96));
        let diff = (fine - coarse).norm();
        if diff <= tol * fine.norm() {
            return Ok((fine, diff));
        }
    }

    let sup = symbol.sup_bound().max(f64::MIN_POSITIVE);
    let breaks: Vec<f64> = symbol.breakpoints().into_iter().map(|r| x * r).collect();
    let c = breaks.first().copied().unwrap_or(1.0).min(1.0);
    // [0, c] through s = c e^{-u}; the remainder beyond u = U is below TAIL
    let u_max = ((sup * c.powf(a) / (a * TAIL)).ln() / a).max(1.0);
    let mut s_max = a.max(1.0);
    while gamma_q(a, s_max) * sup > TAIL {
        s_max *= 1.5;
    }
    let run = |q: Tolerance| {
        let head = integrate(
            |u| {
                let s = c * (-u).exp();
                profile(s) * (a * (c.ln() - u) - s).exp()
            },
            0.0,
            u_max,
            q,
        );
        let body = if s_max > c {
            integrate_pieces(|s| profile(s) * (lambda * s.ln() - s).exp(), c, s_max, &breaks, q)
        } else {
            Estimate::zero()
        };
        head.combine(body)
    };
    let mut total = run(Tolerance::relative(tol).with_abs(TAIL));
    // oscillatory symbols can cancel far below the size of the pieces; aim
    // the second pass at the size of the total
    if total.error > tol * total.value.norm() && total.value.norm() > 0.0 {
        total = run(Tolerance::relative(0.01 * tol).with_abs((0.25 * tol * total.value.norm()).max(TAIL)));
    }
    let value = total.value * norm;
    let error = total.error * norm + 2.0 * TAIL;
    if error > tol * value.norm() + 1e3 * TAIL {
        return Err(Error::NonConvergence {
            estimate: error,
            tolerance: tol * value.norm(),
            detail: format!("gamma quadrature for {symbol} at lambda = {lambda}, xi = {xi}"),
        });
    }
    Ok((value, error))
}

/// `γ` for a fixed symbol and weight with a per-`ξ` cache.
#[derive(Debug)]
pub struct SpectralFunction {
    pub lambda: f64,
    pub symbol: RadialSymbol,
    pub mode: Mode,
    cache: Mutex<HashMap<(u64, u64), GammaValue>>,
}

impl SpectralFunction {
    pub fn new(symbol: RadialSymbol, lambda: f64, mode: Mode) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(SpectralFunction {
            lambda,
            symbol,
            mode,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// `γ(ξ)` to relative tolerance `tol`. In closed-form mode symbols without
    /// a closed form fall back to quadrature, which the returned mode records.
    pub fn eval(&self, xi: f64, tol: f64) -> Result<GammaValue> {
        check_xi(xi)?;
        let key = (xi.to_bits(), tol.to_bits());
        if let Some(v) = self.cache.lock().expect("gamma cache poisoned").get(&key) {
            return Ok(*v);
        }
        let closed = match self.mode {
            Mode::ClosedForm => match gamma_closed_form(&self.symbol, self.lambda, xi) {
                Ok(v) => Some(v),
                Err(Error::Unsupported(_)) => None,
                Err(e) => return Err(e),
            },
            Mode::Quadrature => None,
        };
        let result = match closed {
            Some(value) => GammaValue {
                value,
                error: CLOSED_FORM_REL_ERROR * value.norm(),
                mode: Mode::ClosedForm,
            },
            None => {
                let (value, error) = gamma_quadrature(&self.symbol, self.lambda, xi, tol)?;
                GammaValue {
                    value,
                    error,
                    mode: Mode::Quadrature,
                }
            }
        };
        self.cache.lock().expect("gamma cache poisoned").insert(key, result);
        Ok(result)
    }
}

/// Convenience wrapper around [`SpectralFunction::eval`].
pub fn gamma_eval(sf: &SpectralFunction, xi: f64, tol: f64) -> Result<GammaValue> {
    sf.eval(xi, tol)
}

/// Panels of the `v = √ξ u' / (2t)` grid in each direction.
const HAT_PANEL_WIDTH: f64 = 2.0;
const HAT_PANEL_ORDER: usize = 20;
/// Half-width of the `v` box beyond the largest `|y'_j|`.
const HAT_MARGIN: f64 = 8.0;

/// `γ̂(ξ)` from the `(n+1)`-dimensional integral
///
/// ```text
/// ξ^{λ+n/2+1} / (2^n π^{n/2} Γ(λ+1)) ∫∫ ã(1/(2t)) e^{-ξ/t - |√ξ u'/(2t) - y'|^2} t^{-λ-n-2} du' dt,
/// ```
///
/// with a tensor Gauss–Legendre rule in `u'` nested inside adaptive
/// integration over `x = log t`. The `u'` nodes scale with `t` so the
/// Gaussian factor stays resolved. The dimension `n` is `y_prime.len()`.
pub fn gamma_hat_eval(symbol: &RadialSymbol, lambda: f64, xi: f64, y_prime: &[f64], tol: f64) -> Result<GammaValue> {
    check_lambda(lambda)?;
    check_xi(xi)?;
    if y_prime.is_empty() {
        return Err(Error::ZeroDimension);
    }
    if !y_prime.iter().all(|y| y.is_finite()) {
        return Err(Error::NonFinite("y'"));
    }
    let n = y_prime.len();
    let nf = n as f64;
    let a = lambda + 1.0;
    let ln_pref = (lambda + nf / 2.0 + 1.0) * xi.ln() - nf * 2f64.ln() - nf / 2.0 * PI.ln() - ln_gamma(a);
    let pref = ln_pref.exp();

    let half = y_prime.iter().fold(0.0f64, |m, y| m.max(y.abs())) + HAT_MARGIN;
    let panels = (2.0 * half / HAT_PANEL_WIDTH).ceil() as usize;
    let rule = composite_legendre(-half, half, panels, HAT_PANEL_ORDER);
    let m = rule.len();
    let total_nodes = m.pow(n as u32);
    let sqrt_xi = xi.sqrt();

    // ∫ e^{-|√ξ u'/(2t) - y'|^2} du' on the scaled tensor grid
    let inner = |t: f64| -> f64 {
        let scale = 2.0 * t / sqrt_xi;
        let mut acc = 0.0;
        let mut idx = vec![0usize; n];
        for _ in 0..total_nodes {
            let mut weight = 1.0;
            let mut dist = 0.0;
            for (j, &k) in idx.iter().enumerate() {
                let u = scale * rule.nodes[k];
                weight *= scale * rule.weights[k];
                let d = sqrt_xi * u / (2.0 * t) - y_prime[j];
                dist += d * d;
            }
            acc += weight * (-dist).exp();
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot < m {
                    break;
                }
                *slot = 0;
            }
        }
        acc
    };

    let sup = symbol.sup_bound().max(f64::MIN_POSITIVE);
    let x_lo = (xi / 800.0).ln();
    // beyond t = e^{x_hi} the integrand is below sup (2/√ξ)^n π^{n/2} t^{-λ-2}
    let tail_const = sup * pref * (2.0 / sqrt_xi).powf(nf) * PI.powf(nf / 2.0);
    let x_hi = ((tail_const / (a * TAIL)).ln() / a).max(x_lo + 1.0);
    let breaks: Vec<f64> = symbol.breakpoints().into_iter().map(|r| -(2.0 * r).ln()).collect();
    let est = integrate_pieces(
        |x| {
            let t = x.exp();
            symbol.eval(1.0 / (2.0 * t)) * ((-xi / t - (lambda + nf + 1.0) * x).exp() * inner(t))
        },
        x_lo,
        x_hi,
        &breaks,
        Tolerance::relative(tol).with_abs(TAIL),
    );
    let value = est.value * pref;
    let error = est.error * pref + TAIL;
    if !est.converged && error > tol * value.norm() + 1e3 * TAIL {
        return Err(Error::NonConvergence {
            estimate: error,
            tolerance: tol * value.norm(),
            detail: format!("gamma-hat for {symbol}, n = {n}, xi = {xi}"),
        });
    }
    Ok(GammaValue {
        value,
        error,
        mode: Mode::Quadrature,
    })
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 {
        return Err(invalid("grid", format!("need 0 < lo <= hi and count >= 1, got {lo}:{hi}:{count}")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == count - 1 {
                hi
            } else {
                (a + (b - a) * k as f64 / (count - 1) as f64).exp()
            }
        })
        .collect())
}

/// For each `δ`, the largest `|γ(x) - γ(y)|` over grid pairs with
/// `|log x - log y| <= δ`. The result is nondecreasing in `δ` by construction.
pub fn vso_modulus(sf: &SpectralFunction, deltas: &[f64], grid: &[f64], tol: f64) -> Result<Vec<f64>> {
    let mut pts: Vec<f64> = grid.to_vec();
    pts.sort_by(f64::total_cmp);
    let values: Vec<C64> = pts.iter().map(|&x| sf.eval(x, tol).map(|v| v.value)).collect::<Result<_>>()?;
    let logs: Vec<f64> = pts.iter().map(|x| x.ln()).collect();
    deltas
        .iter()
        .map(|&delta| {
            if !(delta > 0.0) {
                return Err(invalid("delta", "must be positive"));
            }
            let mut worst = 0.0f64;
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    if logs[j] - logs[i] > delta {
                        break;
                    }
                    worst = worst.max((values[j] - values[i]).norm());
                }
            }
            Ok(worst)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    /// `max |γ(ξ)| / sup|ã|` over the grid.
    pub max_ratio: f64,
    pub argmax: f64,
}

/// Checks `|γ(ξ)| <= sup|ã|` on the grid, allowing for the error estimates.
pub fn gamma_bound_check(sf: &SpectralFunction, grid: &[f64], tol: f64) -> Result<BoundReport> {
    let sup = sf.symbol.sup_bound();
    let mut report = BoundReport {
        max_ratio: 0.0,
        argmax: f64::NAN,
    };
    for &xi in grid {
        let v = sf.eval(xi, tol)?;
        let ratio = if sup > 0.0 { v.value.norm() / sup } else { 0.0 };
        if v.value.norm() > sup + v.error + 1e-14 * sup {
            return Err(Error::InvariantFailure(format!(
                "|gamma({xi})| = {} exceeds sup bound {sup}",
                v.value.norm()
            )));
        }
        if ratio > report.max_ratio || report.argmax.is_nan() {
            report = BoundReport {
                max_ratio: ratio,
                argmax: xi,
            };
        }
    }
    Ok(report)
}
