//! Central finite differences shared by the derivative oracles.

use crate::C64;

/// Default step of the derivative oracles.
pub const DEFAULT_STEP: f64 = 1e-5;

/// `(f(h) - f(-h)) / 2h` for a scalar path `f` through the base point.
pub fn central<F: FnMut(f64) -> C64>(mut f: F, h: f64) -> C64 {
    (f(h) - f(-h)) / (2.0 * h)
}

/// One Richardson step on [`central`], cancelling the `h^2` term.
pub fn richardson<F: FnMut(f64) -> C64>(mut f: F, h: f64) -> C64 {
    let coarse = central(&mut f, h);
    let fine = central(&mut f, 0.5 * h);
    (fine * 4.0 - coarse) / 3.0
}

/// Wirtinger derivative `∂/∂z̄ = (∂_x + i ∂_y) / 2` along one complex
/// coordinate, given `f` as a function of the complex displacement.
pub fn wirtinger_bar<F: FnMut(C64) -> C64>(mut f: F, h: f64) -> C64 {
    let dx = central(|s| f(C64::new(s, 0.0)), h);
    let dy = central(|s| f(C64::new(0.0, s)), h);
    (dx + C64::new(0.0, 1.0) * dy) * 0.5
}
