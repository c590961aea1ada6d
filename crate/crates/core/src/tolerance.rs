//! Pinned tolerances of the verification suites, overridable as
//! `key = value` text.

use crate::error::{invalid, Error, Result};
use std::fmt;

macro_rules! tolerances {
    ($($(#[$doc:meta])* $field:ident = $default:expr,)*) => {
        /// Tolerance ledger. Every entry must be positive and finite.
        #[derive(Debug, Clone, PartialEq)]
        pub struct Tolerances {
            $($(#[$doc])* pub $field: f64,)*
        }

        impl Default for Tolerances {
            fn default() -> Self {
                Tolerances { $($field: $default,)* }
            }
        }

        impl Tolerances {
            pub const KEYS: &'static [&'static str] = &[$(stringify!($field)),*];

            /// Sets one entry by name.
            pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(invalid("tolerance", format!("{key} must be positive and finite, got {value}")));
                }
                match key {
                    $(stringify!($field) => self.$field = value,)*
                    _ => return Err(invalid("tolerance", format!("unknown key {key:?}"))),
                }
                Ok(())
            }

            pub fn entries(&self) -> Vec<(&'static str, f64)> {
                vec![$((stringify!($field), self.$field)),*]
            }
        }
    };
}

tolerances! {
    /// Finite-difference step.
    fd_step = 1e-5,
    /// Group axioms, action invariance, freeness.
    group = 1e-12,
    /// Relative residual of `dμ_X = ω(X#, .)`.
    moment = 1e-6,
    /// `μ(hz) = ρ(h) μ(z)`.
    equivariance = 1e-12,
    /// Closed-form moment maps against projection.
    closed = 1e-14,
    /// `κ∘τ` and `τ∘κ` round trips.
    coords = 1e-13,
    /// Relative error of the FD Jacobian determinant of `τ`.
    jacobian = 1e-6,
    /// Relative gap between the two pushforward quadratures.
    pushforward = 1e-4,
    /// CR residuals of `e^{-ξ|w|^2 - ξ/r} ψ`.
    cr = 1e-7,
    /// `‖Vψ‖ = ‖ψ‖` and `V*V = I`.
    isometry = 1e-6,
    /// `R R* = I`.
    roundtrip = 1e-5,
    /// Toeplitz multiplier deviation and z-spread.
    multiplier = 1e-3,
    /// Absolute error of `γ ≡ 1` for the constant symbol.
    normalization = 1e-10,
    /// Quadrature against closed-form `γ`.
    gamma_closed = 1e-8,
    /// `γ̂` against `γ`.
    gamma_hat = 1e-6,
    /// Spread of `γ̂` over `y'`.
    y_spread = 1e-8,
    /// `γ̂` through `n = 1` against `n = 2`.
    dimension = 1e-5,
}

impl Tolerances {
    /// Applies `key = value` lines; `#` starts a comment.
    pub fn merge_text(mut self, text: &str) -> Result<Self> {
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |reason: String| Error::Parse {
                what: "tolerance",
                input: raw.to_string(),
                reason,
            };
            let (key, value) = line.split_once('=').ok_or_else(|| perr("expected key = value".into()))?;
            let value: f64 = value.trim().parse().map_err(|e: std::num::ParseFloatError| perr(e.to_string()))?;
            self.set(key.trim(), value)?;
        }
        Ok(self)
    }
}

impl fmt::Display for Tolerances {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.entries() {
            writeln!(f, "{k} = {v:e}")?;
        }
        Ok(())
    }
}
