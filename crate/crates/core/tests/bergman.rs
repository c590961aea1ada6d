use proptest::prelude::*;
use siegel_core::bergman::*;
use siegel_core::coordinates::{nu_lambda_density, tau, u0_pullback, WeightContext};
use siegel_core::heisenberg::HeisenbergElement;
use siegel_core::quadrature::{integrate_to_infinity, Tolerance};
use siegel_core::siegel::SiegelPoint;
use siegel_core::special::gamma;
use siegel_core::spectral::{gamma_closed_form, RadialSymbol};
use siegel_core::suite::wave_packet_norm_sq;
use siegel_core::C64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn axis_point(x: f64, y: f64) -> SiegelPoint {
    SiegelPoint::new(vec![c(0.0, 0.0)], c(x, y)).unwrap()
}

fn monomial_section(n: usize, degree: usize, grid: &XiGrid) -> FockSection {
    let mut s = FockSection::zero(n, degree, grid);
    let alphas = multi_indices(n, degree);
    for k in 0..grid.len() {
        for (i, a) in alphas.iter().enumerate() {
            s.set(k, a, c(1.0 + 0.1 * i as f64, 0.3 * k as f64 - 0.2 * i as f64)).unwrap();
        }
    }
    s
}

fn point_strategy(n: usize) -> impl Strategy<Value = SiegelPoint> {
    (
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n),
        -3.0f64..3.0,
        0.05f64..5.0,
    )
        .prop_map(|(zp, x, gap)| {
            let zp: Vec<C64> = zp.into_iter().map(|(a, b)| c(a, b)).collect();
            let lift = zp.iter().map(|w| w.norm_sqr()).sum::<f64>() + gap;
            SiegelPoint::new(zp, c(x, lift)).unwrap()
        })
}

proptest! {
    #[test]
    fn kernel_is_hermitian(z in point_strategy(2), w in point_strategy(2), lambda in -0.9f64..3.0) {
        let ctx = WeightContext::new(lambda, 2).unwrap();
        let a = bergman_kernel(&ctx, &z, &w).unwrap();
        let b = bergman_kernel(&ctx, &w, &z).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-13 * a.norm().max(1.0));
    }

    #[test]
    fn kernel_diagonal_is_a_height_power(z in point_strategy(1), lambda in -0.9f64..3.0) {
        let ctx = WeightContext::new(lambda, 1).unwrap();
        let k = bergman_kernel(&ctx, &z, &z).unwrap();
        let want = z.gap().powf(-ctx.kernel_exponent());
        prop_assert!(k.im.abs() <= 1e-13 * want);
        prop_assert!((k.re - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn measures_agree_through_tau(z in point_strategy(2), lambda in -0.9f64..3.0) {
        // ν_λ density = v_λ density · |det dκ| with |det dτ| = r^2
        let ctx = WeightContext::new(lambda, 2).unwrap();
        let p = tau(&z);
        let v = v_lambda_density(&ctx, &z).unwrap();
        let nu = nu_lambda_density(&ctx, &p).unwrap();
        prop_assert!((nu - v / (p.r * p.r)).abs() <= 1e-10 * nu);
    }

    #[test]
    fn plane_wave_translation_covariance(z in point_strategy(1), t0 in -5.0f64..5.0, b in 0.1f64..3.0) {
        let f = PlaneWave::new(b).unwrap();
        let moved = z.act(&HeisenbergElement { w_prime: vec![c(0.0, 0.0)], t: t0 }).unwrap();
        let want = c(0.0, b * t0).exp() * f.at(&z);
        prop_assert!((f.at(&moved) - want).norm() <= 1e-13);
        prop_assert!(f.at(&z).norm() <= (-b * z.z_prime()[0].norm_sqr()).exp() * (1.0 + 1e-14));
    }
}

#[test]
fn kernel_examples() {
    let ctx = WeightContext::new(0.0, 1).unwrap();
    assert!((bergman_kernel(&ctx, &axis_point(0.0, 1.0), &axis_point(0.0, 1.0)).unwrap() - 1.0).norm() < 1e-15);
    let k = bergman_kernel(&ctx, &axis_point(0.0, 2.0), &axis_point(0.0, 2.0)).unwrap();
    assert!((k - 0.125).norm() < 1e-15);
    let d = v_lambda_density(&WeightContext::new(2.5, 1).unwrap(), &axis_point(3.0, 1.0)).unwrap();
    assert!((d - WeightContext::new(2.5, 1).unwrap().c_lambda / 4.0).abs() < 1e-15);
}

#[test]
fn plane_wave_pullback_factorizes() {
    let b = 1.3;
    let f = PlaneWave::new(b).unwrap();
    let g = u0_pullback(|z: &SiegelPoint| f.at(z));
    for &(w, t, r) in &[(c(0.2, -0.4), 0.5, 0.7), (c(-1.0, 0.3), -2.0, 3.0)] {
        let p = siegel_core::coordinates::GroupMomentPoint::new(vec![w], t, r).unwrap();
        let want = c(0.0, b * t).exp() * (-b / r).exp() * (-b * w.norm_sqr()).exp();
        assert!((g(&p).unwrap() - want).norm() < 1e-14);
    }
    assert!((f.at(&axis_point(0.0, 1.0)) - (-b as f64).exp()).norm() < 1e-15);
    assert!(PlaneWave::new(0.0).is_err());
}

#[test]
fn v_adjoint_inverts_v_on_polynomial_sections() {
    for &(lambda, n) in &[(0.0, 1), (1.5, 1), (0.0, 2), (-0.5, 2)] {
        let ctx = WeightContext::new(lambda, n).unwrap();
        let q = QuadratureSpec {
            degree: 3,
            ..QuadratureSpec::default()
        };
        let grid = XiGrid {
            xi: vec![0.4, 1.0, 3.0],
            weights: vec![0.5, 0.25, 1.0],
        };
        let s = monomial_section(n, 3, &grid);
        let v = v_lambda_apply(&ctx, &s).unwrap();
        let back = v_lambda_adjoint(&ctx, |w: &[C64], xi, r| v.eval(w, xi, r), &grid, &q).unwrap();
        assert!(s.rel_diff(&back) < 1e-10, "lambda {lambda} n {n}");
    }
}

#[test]
fn zero_maps_to_zero() {
    let ctx = WeightContext::new(0.0, 1).unwrap();
    let q = QuadratureSpec {
        t_window: 10.0,
        t_nodes: 32,
        xi_nodes: 4,
        degree: 2,
        ..QuadratureSpec::default()
    };
    let grid = XiGrid::lattice(q.t_window, q.xi_nodes).unwrap();
    let zero = FockSection::zero(1, 2, &grid);
    let v = v_lambda_adjoint(&ctx, |_: &[C64], _, _| c(0.0, 0.0), &grid, &q).unwrap();
    assert_eq!(v, zero);
    let r = r_lambda_apply(&ctx, &|_: &[C64], _: C64| c(0.0, 0.0), &grid, &q).unwrap();
    assert_eq!(r, zero);
    assert_eq!(fock_norm(&ctx, &zero).unwrap(), 0.0);
}

#[test]
fn v_is_isometric_single_node() {
    let ctx = WeightContext::new(0.0, 1).unwrap();
    let grid = XiGrid::single(1.0).unwrap();
    let mut s = FockSection::zero(1, 0, &grid);
    s.set(0, &[0], c(1.0, 0.0)).unwrap();
    let q = QuadratureSpec {
        tol: 1e-9,
        angular_nodes: 1,
        ..QuadratureSpec::default()
    };
    let direct = v_image_norm_sq(&v_lambda_apply(&ctx, &s).unwrap(), &q).unwrap();
    assert!((direct - 1.0).abs() < 1e-6, "{direct}");
}

#[test]
fn r_after_r_adjoint_is_identity_on_the_lattice() {
    for &lambda in &[0.0, 1.0] {
        let ctx = WeightContext::new(lambda, 1).unwrap();
        let q = QuadratureSpec {
            t_window: 20.0,
            t_nodes: 64,
            degree: 2,
            xi_nodes: 16,
            ..QuadratureSpec::default()
        };
        let grid = XiGrid::lattice(q.t_window, q.xi_nodes).unwrap();
        let mut s = FockSection::zero(1, q.degree, &grid);
        s.set(2, &[0], c(1.0, 0.5)).unwrap();
        s.set(5, &[1], c(-0.3, 0.2)).unwrap();
        s.set(9, &[2], c(0.7, 0.0)).unwrap();
        let f = r_lambda_adjoint(&ctx, &s).unwrap();
        let back = r_lambda_apply(&ctx, &f, &grid, &q).unwrap();
        assert!(s.rel_diff(&back) < 1e-5);
    }
}

/// `f(z) = (1 - i z_2)^{-5}` has t-spectrum `ξ^4 e^{-ξ} / 4!`.
#[test]
fn wave_packet_norm_and_reconstruction() {
    let (a, cc) = (4.0f64, 1.0f64);
    let f = move |_: &[C64], z: C64| (c(cc, 0.0) - c(0.0, 1.0) * z).powf(-(a + 1.0));
    let lambda = 0.0;
    let ctx = WeightContext::new(lambda, 1).unwrap();
    let analytic = wave_packet_norm_sq(lambda, a, cc);

    // direct ∫ |f|^2 dv_λ in (s = 1/r, ρ = |w|^2) with the t integral in closed form
    let tol = Tolerance::relative(1e-10);
    let direct = integrate_to_infinity(
        |s| {
            let inner = integrate_to_infinity(
                |rho| {
                    let base = cc + s + rho;
                    let t_int = PI.sqrt() * gamma(a + 0.5) / gamma(a + 1.0) * base.powf(-2.0 * a - 1.0);
                    c(PI * t_int, 0.0)
                },
                0.0,
                tol,
            );
            inner.value * (ctx.c_lambda / 4.0 * s.powf(lambda))
        },
        0.0,
        tol,
    )
    .value
    .re;
    assert!((direct - analytic).abs() / analytic < 1e-8);

    let q = QuadratureSpec {
        t_window: 20.0,
        t_nodes: 512,
        degree: 0,
        xi_nodes: 200,
        ..QuadratureSpec::default()
    };
    let grid = XiGrid::lattice(q.t_window, q.xi_nodes).unwrap();
    let s = r_lambda_apply(&ctx, &f, &grid, &q).unwrap();
    let norm_sq = fock_norm(&ctx, &s).unwrap().powi(2);
    assert!((norm_sq - analytic).abs() / analytic < 1e-4);

    // R* R acts as the identity on holomorphic inputs
    let back = r_lambda_adjoint(&ctx, &s).unwrap();
    for z in [axis_point(0.0, 1.0), axis_point(0.5, 0.7), SiegelPoint::new(vec![c(0.3, 0.1)], c(-0.4, 1.2)).unwrap()] {
        let want = f.at(&z);
        assert!((back.at(&z) - want).norm() / want.norm() < 1e-4);
    }
}

#[test]
fn toeplitz_exponential_symbol_example() {
    let ctx = WeightContext::new(0.0, 1).unwrap();
    let sym = RadialSymbol::exponential(2.0).unwrap();
    let f = PlaneWave::new(1.0).unwrap();
    let z = axis_point(0.0, 2.0);
    let q = QuadratureSpec {
        angular_nodes: 1,
        ..QuadratureSpec::default()
    };
    let v = toeplitz_apply(&ctx, &sym, &f, &z, &q).unwrap();
    assert!((v.value / f.at(&z) - 0.5).norm() < 0.5e-3);

    // linearity in the symbol
    let scaled = toeplitz_apply(&ctx, &sym.scaled(c(2.0, -1.0)), &f, &z, &q).unwrap();
    assert!((scaled.value - v.value * c(2.0, -1.0)).norm() < 1e-12 * v.value.norm());
    // linearity in f
    let g = |zp: &[C64], zl: C64| f.eval(zp, zl) * 3.0;
    let tripled = toeplitz_apply(&ctx, &sym, &g, &z, &q).unwrap();
    assert!((tripled.value - v.value * 3.0).norm() < 1e-12 * v.value.norm());
}

#[test]
fn toeplitz_off_axis_point() {
    let ctx = WeightContext::new(0.0, 1).unwrap();
    let z = SiegelPoint::new(vec![c(0.3, -0.2)], c(0.1, 1.3)).unwrap();
    let sym = RadialSymbol::indicator(0.0, 1.0).unwrap();
    let f = PlaneWave::new(1.0).unwrap();
    let v = toeplitz_apply(&ctx, &sym, &f, &z, &QuadratureSpec::default()).unwrap();
    let gamma = gamma_closed_form(&sym, 0.0, 1.0).unwrap();
    assert!((v.value / f.at(&z) - gamma).norm() / gamma.norm() < 1e-3);
}

#[test]
fn verify_multiplier_reports_spread() {
    let ctx = WeightContext::new(0.0, 1).unwrap();
    let samples = [axis_point(0.0, 1.0), axis_point(0.7, 1.5)];
    let rep = verify_multiplier(&ctx, &RadialSymbol::osc_log(1.0).unwrap(), 2.0, &samples, &QuadratureSpec::default()).unwrap();
    assert_eq!(rep.ratios.len(), 2);
    assert!(rep.max_rel_deviation < 1e-3 && rep.spread < 1e-3);
}
