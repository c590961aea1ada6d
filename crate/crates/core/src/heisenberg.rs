//! The Heisenberg group `H_n = C^n x R`, its Lie algebra, the adjoint and
//! transpose representations, connected subgroups and the holomorphic action
//! on `C^{n+1}`.
//!
//! Group law: `(z', s)(w', t) = (z' + w', s + t + 2 Im(z' . conj w'))`.
//! The exponential map is the identity, so group elements and Lie algebra
//! vectors share a carrier but are kept as separate types.

use crate::error::{check_dims, Error, Result};
use crate::C64;

/// `sum_j a_j conj(b_j)`.
pub fn hdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

fn check_finite(w: &[C64], t: f64, what: &'static str) -> Result<()> {
    if w.is_empty() {
        return Err(Error::ZeroDimension);
    }
    if t.is_finite() && w.iter().all(|x| x.re.is_finite() && x.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

macro_rules! carrier {
    ($name:ident, $what:literal) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            pub w_prime: Vec<C64>,
            pub t: f64,
        }

        impl $name {
            pub fn new(w_prime: Vec<C64>, t: f64) -> Result<Self> {
                check_finite(&w_prime, t, $what)?;
                Ok($name { w_prime, t })
            }

            pub fn zero(n: usize) -> Self {
                $name {
                    w_prime: vec![C64::new(0.0, 0.0); n],
                    t: 0.0,
                }
            }

            pub fn n(&self) -> usize {
                self.w_prime.len()
            }

            /// Real coordinates `(Re w_1, Im w_1, ..., Re w_n, Im w_n, t)`.
            pub fn to_real(&self) -> Vec<f64> {
                let mut out = Vec::with_capacity(2 * self.n() + 1);
                for w in &self.w_prime {
                    out.push(w.re);
                    out.push(w.im);
                }
                out.push(self.t);
                out
            }

            pub fn from_real(x: &[f64]) -> Result<Self> {
                if x.len() < 3 || x.len() % 2 == 0 {
                    return Err(Error::InvalidParameter {
                        name: "real coordinates",
                        reason: format!("length {} is not 2n + 1 with n >= 1", x.len()),
                    });
                }
                let n = (x.len() - 1) / 2;
                let w = (0..n).map(|j| C64::new(x[2 * j], x[2 * j + 1])).collect();
                Self::new(w, x[2 * n])
            }

            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                self.w_prime
                    .iter()
                    .zip(&other.w_prime)
                    .map(|(a, b)| (a - b).norm())
                    .fold((self.t - other.t).abs(), f64::max)
            }
        }
    };
}

carrier!(HeisenbergElement, "Heisenberg element");
carrier!(LieElement, "Lie algebra element");

impl From<HeisenbergElement> for LieElement {
    fn from(h: HeisenbergElement) -> Self {
        LieElement {
            w_prime: h.w_prime,
            t: h.t,
        }
    }
}

impl From<LieElement> for HeisenbergElement {
    fn from(x: LieElement) -> Self {
        HeisenbergElement {
            w_prime: x.w_prime,
            t: x.t,
        }
    }
}

impl LieElement {
    pub fn scale(&self, c: f64) -> LieElement {
        LieElement {
            w_prime: self.w_prime.iter().map(|w| w * c).collect(),
            t: self.t * c,
        }
    }

    pub fn add(&self, other: &LieElement) -> LieElement {
        LieElement {
            w_prime: self.w_prime.iter().zip(&other.w_prime).map(|(a, b)| a + b).collect(),
            t: self.t + other.t,
        }
    }
}

/// Exponential map; the identity on the shared carrier.
pub fn exp(x: &LieElement) -> HeisenbergElement {
    x.clone().into()
}

pub fn hn_mul(a: &HeisenbergElement, b: &HeisenbergElement) -> Result<HeisenbergElement> {
    check_dims(a.n(), b.n())?;
    Ok(HeisenbergElement {
        w_prime: a.w_prime.iter().zip(&b.w_prime).map(|(x, y)| x + y).collect(),
        t: a.t + b.t + 2.0 * hdot(&a.w_prime, &b.w_prime).im,
    })
}

pub fn hn_inv(a: &HeisenbergElement) -> HeisenbergElement {
    HeisenbergElement {
        w_prime: a.w_prime.iter().map(|w| -w).collect(),
        t: -a.t,
    }
}

/// `[(w', t), (z', s)] = (0, 4 Im(w' . conj z'))`.
pub fn lie_bracket(x: &LieElement, y: &LieElement) -> Result<LieElement> {
    check_dims(x.n(), y.n())?;
    Ok(LieElement {
        w_prime: vec![C64::new(0.0, 0.0); x.n()],
        t: 4.0 * hdot(&x.w_prime, &y.w_prime).im,
    })
}

/// `Ad(w', t)(z', s) = (z', s + 4 Im(w' . conj z'))`.
pub fn adjoint(h: &HeisenbergElement, x: &LieElement) -> Result<LieElement> {
    check_dims(h.n(), x.n())?;
    Ok(LieElement {
        w_prime: x.w_prime.clone(),
        t: x.t + 4.0 * hdot(&h.w_prime, &x.w_prime).im,
    })
}

/// Transpose of `Ad(h^{-1})` for [`lie_inner`]: `rho(w', t)(z', s) = (z' + 4 i s w', s)`.
pub fn rho_rep(h: &HeisenbergElement, x: &LieElement) -> Result<LieElement> {
    check_dims(h.n(), x.n())?;
    let shift = C64::new(0.0, 4.0 * x.t);
    Ok(LieElement {
        w_prime: x.w_prime.iter().zip(&h.w_prime).map(|(z, w)| z + shift * w).collect(),
        t: x.t,
    })
}

/// Canonical inner product of `R^{2n+1}`.
pub fn lie_inner(x: &LieElement, y: &LieElement) -> Result<f64> {
    check_dims(x.n(), y.n())?;
    Ok(hdot(&x.w_prime, &y.w_prime).re + x.t * y.t)
}

/// Action on `C^{n+1}`:
/// `(w', t) . z = (z' + w', z_{n+1} + t + 2i z' . conj w' + i |w'|^2)`.
pub fn act_raw(h: &HeisenbergElement, z_prime: &[C64], z_last: C64) -> Result<(Vec<C64>, C64)> {
    check_dims(h.n(), z_prime.len())?;
    let zp = z_prime.iter().zip(&h.w_prime).map(|(a, b)| a + b).collect();
    let i = C64::new(0.0, 1.0);
    let last = z_last + h.t + 2.0 * i * hdot(z_prime, &h.w_prime) + i * norm_sqr(&h.w_prime);
    Ok((zp, last))
}

/// Action on a full coordinate vector `z = (z', z_{n+1})` of length `n + 1`.
pub fn act(h: &HeisenbergElement, z: &[C64]) -> Result<Vec<C64>> {
    check_dims(h.n() + 1, z.len())?;
    let (mut zp, last) = act_raw(h, &z[..h.n()], z[h.n()])?;
    zp.push(last);
    Ok(zp)
}

/// Named and generic connected subgroups.
#[derive(Debug, Clone, PartialEq)]
pub enum SubgroupKind {
    Full,
    Center,
    /// `V x R` for a real subspace `V` spanned by `basis`.
    ProductVxR { basis: Vec<Vec<C64>> },
    /// Graph `{(v, f(v))}` of a real-linear functional on an isotropic `V`;
    /// `f_coeffs[k] = f(basis[k])`.
    GraphVf { basis: Vec<Vec<C64>>, f_coeffs: Vec<f64> },
    /// `R^n x R`.
    HR,
    /// `iR^n x R`.
    HiR,
    /// `C^{n-l} x R^l x R`.
    HlR { ell: usize },
    /// `C^{n-l} x iR^l x R`.
    HliR { ell: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgroupSpec {
    pub n: usize,
    pub kind: SubgroupKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

const ISOTROPY_TOL: f64 = 1e-12;
const INDEPENDENCE_TOL: f64 = 1e-12;

fn unit(n: usize, j: usize, c: C64) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[j] = c;
    v
}

fn real_vec(w: &[C64], t: f64) -> Vec<f64> {
    LieElement { w_prime: w.to_vec(), t }.to_real()
}

impl SubgroupSpec {
    pub fn new(n: usize, kind: SubgroupKind) -> Self {
        SubgroupSpec { n, kind }
    }

    /// Real spanning set of the subalgebra in the coordinates of
    /// [`LieElement::to_real`].
    fn spanning_set(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let center = real_vec(&vec![C64::new(0.0, 0.0); n], 1.0);
        let mut out = Vec::new();
        let complex_block = |out: &mut Vec<Vec<f64>>, range: std::ops::Range<usize>| {
            for j in range {
                out.push(real_vec(&unit(n, j, one), 0.0));
                out.push(real_vec(&unit(n, j, i), 0.0));
            }
        };
        match &self.kind {
            SubgroupKind::Full => {
                complex_block(&mut out, 0..n);
                out.push(center);
            }
            SubgroupKind::Center => out.push(center),
            SubgroupKind::ProductVxR { basis } => {
                out.extend(basis.iter().map(|v| real_vec(v, 0.0)));
                out.push(center);
            }
            SubgroupKind::GraphVf { basis, f_coeffs } => {
                out.extend(basis.iter().zip(f_coeffs).map(|(v, &f)| real_vec(v, f)));
            }
            SubgroupKind::HR => {
                out.extend((0..n).map(|j| real_vec(&unit(n, j, one), 0.0)));
                out.push(center);
            }
            SubgroupKind::HiR => {
                out.extend((0..n).map(|j| real_vec(&unit(n, j, i), 0.0)));
                out.push(center);
            }
            SubgroupKind::HlR { ell } | SubgroupKind::HliR { ell } => {
                let split = n.saturating_sub(*ell);
                complex_block(&mut out, 0..split);
                let dir = if matches!(self.kind, SubgroupKind::HlR { .. }) { one } else { i };
                out.extend((split..n).map(|j| real_vec(&unit(n, j, dir), 0.0)));
                out.push(center);
            }
        }
        out
    }

    fn basis_vectors(&self) -> Option<&Vec<Vec<C64>>> {
        match &self.kind {
            SubgroupKind::ProductVxR { basis } | SubgroupKind::GraphVf { basis, .. } => Some(basis),
            _ => None,
        }
    }

    /// Checks dimensions, real linear independence of `V`, isotropy for graph
    /// subgroups and the range of `l`.
    pub fn validate(&self) -> Validation {
        let mut diagnostics = Vec::new();
        let n = self.n;
        if n == 0 {
            diagnostics.push("n must be at least 1".to_string());
        }
        match &self.kind {
            SubgroupKind::HlR { ell } | SubgroupKind::HliR { ell } => {
                if *ell < 1 || *ell + 1 > n {
                    diagnostics.push(format!("l = {ell} must satisfy 1 <= l <= n - 1 = {}", n as i64 - 1));
                }
            }
            SubgroupKind::GraphVf { basis, f_coeffs } if f_coeffs.len() != basis.len() => {
                diagnostics.push(format!(
                    "f has {} coefficients for a {}-dimensional V",
                    f_coeffs.len(),
                    basis.len()
                ));
            }
            _ => {}
        }
        if let Some(basis) = self.basis_vectors() {
            if basis.iter().any(|v| v.len() != n) {
                diagnostics.push(format!("every basis vector of V must have {n} entries"));
            } else {
                let reals: Vec<Vec<f64>> = basis.iter().map(|v| real_vec(v, 0.0)).collect();
                if gram_schmidt(&reals).len() < reals.len() {
                    diagnostics.push("V basis is not linearly independent over R".to_string());
                }
                if matches!(self.kind, SubgroupKind::GraphVf { .. }) {
                    for (a, v) in basis.iter().enumerate() {
                        for (b, w) in basis.iter().enumerate().skip(a + 1) {
                            let form = hdot(v, w).im;
                            if form.abs() > ISOTROPY_TOL {
                                diagnostics.push(format!(
                                    "V is not isotropic: Im(v{a} . conj v{b}) = {form}"
                                ));
                            }
                        }
                    }
                }
            }
        }
        Validation {
            valid: diagnostics.is_empty(),
            diagnostics,
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.valid {
            Ok(())
        } else {
            Err(Error::InvalidSubgroup(v.diagnostics.join("; ")))
        }
    }

    /// Real dimension of the subgroup.
    pub fn dimension(&self) -> usize {
        gram_schmidt(&self.spanning_set()).len()
    }
}

fn gram_schmidt(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut u = v.clone();
        // two passes keep the basis orthogonal to working precision
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = u.iter().zip(b).map(|(x, y)| x * y).sum();
                u.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > INDEPENDENCE_TOL * scale.max(1.0) {
            basis.push(u.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

pub fn subgroup_validate(spec: &SubgroupSpec) -> Validation {
    spec.validate()
}

/// Orthogonal projection of `R^{2n+1}` onto the subalgebra of `spec`.
pub fn subgroup_project(spec: &SubgroupSpec, x: &LieElement) -> Result<LieElement> {
    spec.ensure_valid()?;
    check_dims(spec.n, x.n())?;
    let basis = gram_schmidt(&spec.spanning_set());
    let xr = x.to_real();
    let mut out = vec![0.0; xr.len()];
    for b in &basis {
        let c: f64 = xr.iter().zip(b).map(|(p, q)| p * q).sum();
        out.iter_mut().zip(b).for_each(|(o, q)| *o += c * q);
    }
    LieElement::from_real(&out)
}
