//! The Siegel domain `D_{n+1} = { Im z_{n+1} > |z'|^2 }`, its Kähler
//! structure, induced vector fields and the moment maps of `H_n` and its
//! connected subgroups.
//!
//! Tensors are evaluated with `dz_j(u) = u_j`, `dz̄_j(u) = conj(u_j)` and
//! `(α ⊗ β)(u, v) = α(u) β(v)`. With `h(u, v)` the evaluation of the
//! Hermitian tensor `Σ g_jk dz_j ⊗ dz̄_k`, the returned metric is
//! `g(u, v) = h(u, v) + h(v, u) = 2 Re h(u, v)` and the form is
//! `ω(u, v) = i (h(u, v) - h(v, u)) = -2 Im h(u, v)`. This is the
//! normalization under which both `ω(u, v) = g(iu, v)` and
//! `dμ_X = ω(X♯, ·)` hold for the moment map below.

use crate::error::{check_dims, Error, Result};
use crate::heisenberg::{
    act_raw, hdot, lie_inner, norm_sqr, subgroup_project, HeisenbergElement, LieElement, SubgroupKind,
    SubgroupSpec,
};
use crate::C64;

/// A point of `D_{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    z_prime: Vec<C64>,
    z_last: C64,
}

impl SiegelPoint {
    /// Rejects boundary, exterior and non-finite points.
    pub fn new(z_prime: Vec<C64>, z_last: C64) -> Result<Self> {
        if z_prime.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if !z_prime.iter().chain(std::iter::once(&z_last)).all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite("Siegel point"));
        }
        let gap = z_last.im - norm_sqr(&z_prime);
        if gap > 0.0 && gap.is_finite() {
            Ok(SiegelPoint { z_prime, z_last })
        } else {
            Err(Error::OutsideDomain { gap })
        }
    }

    pub fn from_coords(z: &[C64]) -> Result<Self> {
        match z.split_last() {
            Some((last, head)) => Self::new(head.to_vec(), *last),
            None => Err(Error::ZeroDimension),
        }
    }

    pub fn z_prime(&self) -> &[C64] {
        &self.z_prime
    }

    pub fn z_last(&self) -> C64 {
        self.z_last
    }

    pub fn n(&self) -> usize {
        self.z_prime.len()
    }

    /// Defining function `Im z_{n+1} - |z'|^2`.
    pub fn gap(&self) -> f64 {
        self.z_last.im - norm_sqr(&self.z_prime)
    }

    pub fn coords(&self) -> Vec<C64> {
        let mut v = self.z_prime.clone();
        v.push(self.z_last);
        v
    }

    pub fn act(&self, h: &HeisenbergElement) -> Result<SiegelPoint> {
        let (zp, last) = act_raw(h, &self.z_prime, self.z_last)?;
        SiegelPoint::new(zp, last)
    }

    pub fn max_abs_diff(&self, other: &SiegelPoint) -> f64 {
        self.z_prime
            .iter()
            .zip(&other.z_prime)
            .map(|(a, b)| (a - b).norm())
            .fold((self.z_last - other.z_last).norm(), f64::max)
    }
}

/// A tangent vector at a point of `D_{n+1}`, identified with `C^{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub components: Vec<C64>,
}

impl TangentVector {
    pub fn new(components: Vec<C64>) -> Result<Self> {
        if components.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Ok(TangentVector { components })
        } else {
            Err(Error::NonFinite("tangent vector"))
        }
    }

    /// The `k`-th real coordinate direction: `e_{k/2}` for even `k`,
    /// `i e_{k/2}` for odd `k`.
    pub fn real_direction(dim: usize, k: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); dim];
        c[k / 2] = if k % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) };
        TangentVector { components: c }
    }

    pub fn times_i(&self) -> Self {
        TangentVector {
            components: self.components.iter().map(|c| c * C64::new(0.0, 1.0)).collect(),
        }
    }
}

/// `H(z) = 1 / (Im z_{n+1} - |z'|^2)`.
pub fn height(z: &SiegelPoint) -> f64 {
    1.0 / z.gap()
}

/// Evaluation of the Hermitian tensor at `z` (see module docs).
fn hermitian(z: &SiegelPoint, u: &[C64], v: &[C64]) -> C64 {
    let n = z.n();
    let d = z.gap();
    let zp = z.z_prime();
    let (u1, un) = (&u[..n], u[n]);
    let (v1, vn) = (&v[..n], v[n]);
    // Σ conj(z_j) u_j and Σ z_k conj(v_k)
    let zu: C64 = zp.iter().zip(u1).map(|(a, b)| a.conj() * b).sum();
    let zv: C64 = zp.iter().zip(v1).map(|(a, b)| a * b.conj()).sum();
    let half_over_i = C64::new(0.0, -0.5);
    let bracket = hdot(u1, v1) * d + zu * zv + half_over_i * (zu * vn.conj() - un * zv) + un * vn.conj() * 0.25;
    bracket / (d * d)
}

const REALNESS_TOL: f64 = 1e-12;

/// Metric and symplectic form `(g(u, v), ω(u, v))` at `z`.
pub fn kahler_eval(z: &SiegelPoint, u: &TangentVector, v: &TangentVector) -> Result<(f64, f64)> {
    check_dims(z.n() + 1, u.components.len())?;
    check_dims(z.n() + 1, v.components.len())?;
    let huv = hermitian(z, &u.components, &v.components);
    let hvu = hermitian(z, &v.components, &u.components);
    let g = huv + hvu;
    let omega = C64::new(0.0, 1.0) * (huv - hvu);
    let scale = huv.norm().max(hvu.norm()).max(f64::MIN_POSITIVE);
    let residue = g.im.abs().max(omega.im.abs()) / scale;
    if residue > REALNESS_TOL {
        return Err(Error::ConventionViolation { residue });
    }
    Ok((g.re, omega.re))
}

/// Induced vector field `X♯(z) = (w', t + 2i z' . conj w')`.
pub fn sharp_field(x: &LieElement, z: &SiegelPoint) -> Result<TangentVector> {
    check_dims(z.n(), x.n())?;
    let mut c = x.w_prime.clone();
    c.push(x.t + C64::new(0.0, 2.0) * hdot(z.z_prime(), &x.w_prime));
    Ok(TangentVector { components: c })
}

/// `μ(z) = -(4i z', 1) / (2 (Im z_{n+1} - |z'|^2))`.
pub fn moment_map_hn(z: &SiegelPoint) -> LieElement {
    let h = height(z);
    LieElement {
        w_prime: z.z_prime().iter().map(|w| w * C64::new(0.0, -2.0 * h)).collect(),
        t: -0.5 * h,
    }
}

/// Moment map of a subgroup: the orthogonal projection of [`moment_map_hn`].
pub fn moment_map_subgroup(spec: &SubgroupSpec, z: &SiegelPoint) -> Result<LieElement> {
    subgroup_project(spec, &moment_map_hn(z))
}

/// Closed-form moment maps of the named subgroups, written directly in terms
/// of `z` rather than through a projection.
pub fn moment_map_closed_form(spec: &SubgroupSpec, z: &SiegelPoint) -> Result<LieElement> {
    spec.ensure_valid()?;
    check_dims(spec.n, z.n())?;
    let n = z.n();
    let two_d = 2.0 * z.gap();
    let zp = z.z_prime();
    let i = C64::new(0.0, 1.0);
    let complex_part = |w: &C64| -(i * 4.0 * w) / two_d;
    let real_part = |w: &C64| C64::new(-(-4.0 * w.im) / two_d, 0.0);
    let imag_part = |w: &C64| i * (-(4.0 * w.re) / two_d);
    let t = -1.0 / two_d;
    let w_prime: Vec<C64> = match spec.kind {
        SubgroupKind::Full => zp.iter().map(complex_part).collect(),
        SubgroupKind::Center => vec![C64::new(0.0, 0.0); n],
        SubgroupKind::HR => zp.iter().map(real_part).collect(),
        SubgroupKind::HiR => zp.iter().map(imag_part).collect(),
        SubgroupKind::HlR { ell } => zp
            .iter()
            .enumerate()
            .map(|(j, w)| if j < n - ell { complex_part(w) } else { real_part(w) })
            .collect(),
        SubgroupKind::HliR { ell } => zp
            .iter()
            .enumerate()
            .map(|(j, w)| if j < n - ell { complex_part(w) } else { imag_part(w) })
            .collect(),
        _ => {
            return Err(Error::Unsupported(
                "closed-form moment maps exist only for the named subgroups".into(),
            ))
        }
    };
    Ok(LieElement { w_prime, t })
}

/// Outcome of [`verify_moment_identity`].
#[derive(Debug, Clone, PartialEq)]
pub struct MomentResidual {
    /// `max |FD - ω(X♯, e)| / max(|ω|_∞, |FD|_∞)`, or 0 when both vanish.
    pub residual: f64,
    pub step_used: f64,
    pub shrunk: bool,
}

/// Checks `dμ_X = ω(X♯, ·)` along the `2(n+1)` real coordinate directions by
/// central differences of `μ_X = <μ, X>`.
pub fn verify_moment_identity(x: &LieElement, z: &SiegelPoint, step: f64) -> Result<MomentResidual> {
    if !(step > 0.0 && step <= 1e-3) {
        return Err(crate::error::invalid("step", format!("must lie in (0, 1e-3], got {step}")));
    }
    check_dims(z.n(), x.n())?;
    let dim = z.n() + 1;
    let sharp = sharp_field(x, z)?;
    let base = z.coords();
    let mu_x = |p: &[C64]| -> Result<f64> { lie_inner(&moment_map_hn(&SiegelPoint::from_coords(p)?), x) };
    let gap = z.gap();
    let mut fd = Vec::with_capacity(2 * dim);
    let mut exact = Vec::with_capacity(2 * dim);
    let mut step_used = step;
    let mut shrunk = false;
    for k in 0..2 * dim {
        let e = TangentVector::real_direction(dim, k);
        let shifted = |h: f64| -> Vec<C64> { base.iter().zip(&e.components).map(|(b, d)| b + d * h).collect() };
        let mut h = step;
        // the stencil must barely move the defining function, since μ scales
        // like 1/gap and the truncation error like (h/gap)^2
        let inside = |h: f64| {
            [h, -h].iter().all(|&s| {
                let p = shifted(s);
                let g = p[dim - 1].im - norm_sqr(&p[..dim - 1]);
                (g - gap).abs() <= MAX_GAP_CHANGE * gap
            })
        };
        while !inside(h) {
            h *= 0.5;
            shrunk = true;
        }
        step_used = step_used.min(h);
        fd.push((mu_x(&shifted(h))? - mu_x(&shifted(-h))?) / (2.0 * h));
        exact.push(kahler_eval(z, &sharp, &e)?.1);
    }
    let scale = exact.iter().chain(&fd).fold(0.0f64, |m, v| m.max(v.abs()));
    let worst = fd.iter().zip(&exact).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let residual = if scale == 0.0 { 0.0 } else { worst / scale };
    Ok(MomentResidual {
        residual,
        step_used,
        shrunk,
    })
}

const MAX_GAP_CHANGE: f64 = 1e-3;

const ORBIT_TOL: f64 = 1e-10;

/// An element `h` with `h . w = z` when `z` and `w` lie on the same orbit
/// (equal heights), otherwise `None`.
pub fn orbit_transporter(z: &SiegelPoint, w: &SiegelPoint) -> Result<Option<HeisenbergElement>> {
    check_dims(z.n(), w.n())?;
    let (hz, hw) = (height(z), height(w));
    if (hz - hw).abs() > ORBIT_TOL * hz.max(hw) {
        return Ok(None);
    }
    let zeta: Vec<C64> = z.z_prime().iter().zip(w.z_prime()).map(|(a, b)| a - b).collect();
    let t = z.z_last().re - w.z_last().re + 2.0 * hdot(w.z_prime(), &zeta).im;
    Ok(Some(HeisenbergElement { w_prime: zeta, t }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn domain_membership() {
        assert!(SiegelPoint::new(vec![c(0.0, 0.0)], c(0.0, 1.0)).is_ok());
        assert!(matches!(
            SiegelPoint::new(vec![c(1.0, 0.0)], c(0.0, 1.0)),
            Err(Error::OutsideDomain { .. })
        ));
        assert!(SiegelPoint::new(vec![c(0.0, 0.0)], c(0.0, -1.0)).is_err());
    }

    #[test]
    fn height_examples() {
        let z = SiegelPoint::new(vec![c(0.0, 0.0)], c(0.0, 4.0)).unwrap();
        assert_eq!(height(&z), 0.25);
    }

    #[test]
    fn metric_at_base_point_last_direction() {
        // at z' = 0, height 1 only the (1/4) dz_{n+1} ⊗ dz̄_{n+1} term survives
        let z = SiegelPoint::new(vec![c(0.0, 0.0)], c(0.0, 1.0)).unwrap();
        let e = TangentVector::real_direction(2, 2);
        let (g, w) = kahler_eval(&z, &e, &e).unwrap();
        assert!((g - 0.5).abs() < 1e-15);
        assert_eq!(w, 0.0);
    }

    #[test]
    fn moment_map_examples() {
        let z = SiegelPoint::new(vec![c(1.0, 0.0)], c(0.0, 2.0)).unwrap();
        let mu = moment_map_hn(&z);
        assert_eq!(mu.w_prime, vec![c(0.0, -2.0)]);
        assert_eq!(mu.t, -0.5);
        let z = SiegelPoint::new(vec![c(0.0, 1.0)], c(0.0, 2.0)).unwrap();
        let hr = moment_map_closed_form(&SubgroupSpec::new(1, SubgroupKind::HR), &z).unwrap();
        assert_eq!(hr.w_prime, vec![c(2.0, 0.0)]);
        assert_eq!(hr.t, -0.5);
    }

    #[test]
    fn moment_identity_zero_vector() {
        let z = SiegelPoint::new(vec![c(0.3, 0.1)], c(0.2, 1.5)).unwrap();
        let r = verify_moment_identity(&LieElement::zero(1), &z, 1e-5).unwrap();
        assert_eq!(r.residual, 0.0);
        assert!(verify_moment_identity(&LieElement::zero(1), &z, 1e-2).is_err());
    }

    #[test]
    fn moment_identity_shrinks_near_boundary() {
        let z = SiegelPoint::new(vec![c(0.0, 0.0)], c(0.0, 1e-5)).unwrap();
        let x = LieElement::new(vec![c(0.0, 0.0)], 1.0).unwrap();
        let r = verify_moment_identity(&x, &z, 1e-3).unwrap();
        assert!(r.shrunk);
        assert!(r.step_used < 1e-5);
        assert!(r.residual < 1e-6, "{r:?}");
    }

    #[test]
    fn orbit_transporter_translation() {
        let z = SiegelPoint::new(vec![c(0.0, 0.0)], c(1.0, 1.0)).unwrap();
        let w = SiegelPoint::new(vec![c(0.0, 0.0)], c(0.0, 1.0)).unwrap();
        let h = orbit_transporter(&z, &w).unwrap().unwrap();
        assert_eq!(h.w_prime, vec![c(0.0, 0.0)]);
        assert_eq!(h.t, 1.0);
        let far = SiegelPoint::new(vec![c(0.0, 0.0)], c(0.0, 2.0)).unwrap();
        assert_eq!(orbit_transporter(&far, &w).unwrap(), None);
    }
}
