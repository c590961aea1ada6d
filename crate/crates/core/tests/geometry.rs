use proptest::prelude::*;
use siegel_core::coordinates::*;
use siegel_core::fd;
use siegel_core::heisenberg::{exp, HeisenbergElement, LieElement, SubgroupKind, SubgroupSpec};
use siegel_core::siegel::*;
use siegel_core::{Error, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn point(n: usize) -> impl Strategy<Value = SiegelPoint> {
    (prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n), -4.0f64..4.0, 0.1f64..5.0).prop_map(|(zp, x, gap)| {
        let zp: Vec<C64> = zp.into_iter().map(|(a, b)| c(a, b)).collect();
        let lift = zp.iter().map(|w| w.norm_sqr()).sum::<f64>() + gap;
        SiegelPoint::new(zp, c(x, lift)).unwrap()
    })
}

fn tangent(n: usize) -> impl Strategy<Value = TangentVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n + 1)
        .prop_map(|v| TangentVector::new(v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
}

fn lie(n: usize) -> impl Strategy<Value = LieElement> {
    (prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n), -3.0f64..3.0).prop_map(|(w, t)| LieElement {
        w_prime: w.into_iter().map(|(a, b)| c(a, b)).collect(),
        t,
    })
}

fn base(n: usize) -> SiegelPoint {
    SiegelPoint::new(vec![c(0.0, 0.0); n], c(0.0, 1.0)).unwrap()
}

#[test]
fn height_and_domain() {
    assert_eq!(height(&base(2)), 1.0);
    assert_eq!(height(&SiegelPoint::new(vec![c(0.0, 0.0)], c(0.0, 4.0)).unwrap()), 0.25);
    assert!(matches!(SiegelPoint::new(vec![c(0.0, 0.0)], c(0.0, -1.0)), Err(Error::OutsideDomain { .. })));
}

#[test]
fn moment_map_examples() {
    let mu = moment_map_hn(&base(1));
    assert_eq!(mu, LieElement { w_prime: vec![c(0.0, 0.0)], t: -0.5 });
    let z = SiegelPoint::new(vec![c(1.0, 0.0)], c(0.0, 2.0)).unwrap();
    let mu = moment_map_hn(&z);
    assert!(mu.max_abs_diff(&LieElement { w_prime: vec![c(0.0, -2.0)], t: -0.5 }) < 1e-15);

    let center = SubgroupSpec::new(1, SubgroupKind::Center);
    assert_eq!(moment_map_closed_form(&center, &base(1)).unwrap(), LieElement { w_prime: vec![c(0.0, 0.0)], t: -0.5 });
    let z = SiegelPoint::new(vec![c(0.0, 1.0)], c(0.0, 2.0)).unwrap();
    let hr = SubgroupSpec::new(1, SubgroupKind::HR);
    let closed = moment_map_closed_form(&hr, &z).unwrap();
    assert!(closed.max_abs_diff(&LieElement { w_prime: vec![c(2.0, 0.0)], t: -0.5 }) < 1e-15);
    assert!(closed.max_abs_diff(&moment_map_subgroup(&hr, &z).unwrap()) < 1e-15);
}

#[test]
fn moment_identity_examples() {
    let z = base(1);
    assert_eq!(verify_moment_identity(&LieElement::zero(1), &z, 1e-5).unwrap().residual, 0.0);
    let central = LieElement { w_prime: vec![c(0.0, 0.0)], t: 1.0 };
    assert!(verify_moment_identity(&central, &z, 1e-5).unwrap().residual < 1e-6);
    assert!(verify_moment_identity(&central, &z, 0.1).is_err());
}

#[test]
fn sharp_field_examples() {
    let x = LieElement { w_prime: vec![c(0.0, 0.0)], t: 1.0 };
    assert_eq!(sharp_field(&x, &base(1)).unwrap().components, vec![c(0.0, 0.0), c(1.0, 0.0)]);
    let x = LieElement { w_prime: vec![c(1.0, 0.0)], t: 0.0 };
    assert_eq!(sharp_field(&x, &base(1)).unwrap().components, vec![c(1.0, 0.0), c(0.0, 0.0)]);
}

#[test]
fn transporter_examples() {
    let z = SiegelPoint::new(vec![c(0.0, 0.0)], c(1.0, 1.0)).unwrap();
    let h = orbit_transporter(&z, &base(1)).unwrap().unwrap();
    assert_eq!(h, HeisenbergElement { w_prime: vec![c(0.0, 0.0)], t: 1.0 });
    assert_eq!(orbit_transporter(&z, &z).unwrap().unwrap(), HeisenbergElement::zero(1));
    let other = SiegelPoint::new(vec![c(0.0, 0.0)], c(0.0, 2.0)).unwrap();
    assert!(orbit_transporter(&other, &base(1)).unwrap().is_none());
}

#[test]
fn coordinate_examples() {
    assert_eq!(sigma_section(1.0, 1).unwrap(), base(1));
    assert_eq!(sigma_section(2.0, 1).unwrap().z_last(), c(0.0, 0.5));
    for k in -3..=3 {
        let r = 10f64.powi(k);
        assert!((height(&sigma_section(r, 2).unwrap()) - r).abs() <= 2.0 * f64::EPSILON * r);
    }
    let z = SiegelPoint::new(vec![c(0.0, 0.0)], c(3.0, 1.0)).unwrap();
    assert_eq!(rho_coord(&z), HeisenbergElement { w_prime: vec![c(0.0, 0.0)], t: 3.0 });
    let p = GroupMomentPoint::new(vec![c(1.0, 0.0)], 0.0, 1.0).unwrap();
    assert_eq!(kappa(&p).unwrap().z_last(), c(0.0, 2.0));
    let t = tau(&SiegelPoint::new(vec![c(0.0, 0.0)], c(2.0, 3.0)).unwrap());
    assert_eq!((t.t, t.r), (2.0, 1.0 / 3.0));
}

#[test]
fn density_scaling() {
    let ctx = WeightContext::new(0.7, 1).unwrap();
    let at = |r: f64| nu_lambda_density(&ctx, &GroupMomentPoint::new(vec![c(0.2, 0.1)], 1.0, r).unwrap()).unwrap();
    let k = at(1.0);
    for r in [0.01, 0.5, 3.0, 200.0] {
        assert!((at(r) * r.powf(2.7) - k).abs() < 1e-13 * k);
    }
}

#[test]
fn pullback_examples() {
    let h = u0_pullback(|z: &SiegelPoint| c(height(z), 0.0));
    let p = GroupMomentPoint::new(vec![c(0.3, 0.3)], -1.0, 2.5).unwrap();
    assert!((h(&p).unwrap() - 2.5).norm() < 1e-14);
    let back = u0_pushforward(|p: &GroupMomentPoint| C64::new(p.r, p.t));
    let z = SiegelPoint::new(vec![c(0.0, 0.0)], c(2.0, 4.0)).unwrap();
    assert_eq!(back(&z), c(0.25, 2.0));
}

#[test]
fn fourier_of_a_gaussian() {
    let ft = fourier_t(|t| c((-0.5 * t * t).exp(), 0.0), 20.0, 2048).unwrap();
    for xi in [0.0f64, 0.5, 1.0, 3.0] {
        let want = (-0.5 * xi * xi).exp();
        assert!((ft.eval(xi) - want).norm() < 1e-8 * want.max(1e-300), "xi {xi}");
    }
    assert!(ft.diagnostic(1e-8).is_none());
    let narrow = fourier_t(|t| c((-0.01 * t * t).exp(), 0.0), 5.0, 64).unwrap();
    assert!(narrow.diagnostic(1e-8).is_some());
    let zero = fourier_t(|_| c(0.0, 0.0), 5.0, 64).unwrap();
    assert_eq!(zero.eval(1.0), c(0.0, 0.0));
}

#[test]
fn cr_system_controls() {
    let xi = 0.8;
    let w = [c(0.3, -0.4)];
    let linear = cr_solution_form(|w: &[C64], _| w[0], 1, xi).unwrap();
    assert!(cr_residual(&linear, &w, xi, 1.3, fd::DEFAULT_STEP).unwrap().max_abs() < 1e-7);
    // φ = r: second residual r^2 - ξ r
    let res = cr_residual(|_: &[C64], _, r| c(r, 0.0), &w, xi, 2.0, fd::DEFAULT_STEP).unwrap();
    assert!((res.residuals[1] - (4.0 - 1.6)).norm() < 1e-8);
    // constant φ: residuals (0, -ξ c)
    let res = cr_residual(|_: &[C64], _, _| c(2.0, 0.0), &w, xi, 2.0, fd::DEFAULT_STEP).unwrap();
    assert!(res.residuals[0].norm() < 1e-12 && (res.residuals[1] + 1.6).norm() < 1e-12);
    assert!(matches!(cr_solution_form(|w: &[C64], _| w[0].conj(), 1, xi), Err(Error::NotHolomorphic { .. })));
    let one = cr_solution_form(|_: &[C64], _| c(1.0, 0.0), 1, 1.0).unwrap();
    assert!((one(&w, 1.0, 2.0) - (-w[0].norm_sqr() - 0.5).exp()).norm() < 1e-15);
}

proptest! {
    #[test]
    fn kahler_compatibility(z in point(2), u in tangent(2), v in tangent(2)) {
        let (_, w_uu) = kahler_eval(&z, &u, &u).unwrap();
        prop_assert!(w_uu.abs() < 1e-12);
        let (g_uu, _) = kahler_eval(&z, &u, &u).unwrap();
        prop_assert!(g_uu > 0.0);
        let (_, w) = kahler_eval(&z, &u, &v).unwrap();
        let (g_ju, _) = kahler_eval(&z, &u.times_i(), &v).unwrap();
        prop_assert!((w - g_ju).abs() <= 1e-10 * w.abs().max(1e-3));
    }

    #[test]
    fn sharp_field_is_the_orbit_velocity(z in point(1), x in lie(1)) {
        let coords = z.coords();
        let sharp = sharp_field(&x, &z).unwrap();
        for (k, s) in sharp.components.iter().enumerate() {
            let d = fd::central(|r| z.act(&exp(&x.scale(r))).unwrap().coords()[k], 1e-5);
            prop_assert!((d - s).norm() <= 1e-6 * (1.0 + s.norm()), "{} {:?} {:?}", k, d, coords);
        }
    }

    #[test]
    fn moment_identity_holds(z in point(2), x in lie(2)) {
        prop_assert!(verify_moment_identity(&x, &z, 1e-5).unwrap().residual < 1e-6);
    }

    #[test]
    fn equivariance(z in point(2), x in lie(2)) {
        let h = exp(&x);
        let lhs = moment_map_hn(&z.act(&h).unwrap());
        let rhs = siegel_core::heisenberg::rho_rep(&h, &moment_map_hn(&z)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12 * (1.0 + height(&z)) * 10.0);
        prop_assert!((height(&z.act(&h).unwrap()) - height(&z)).abs() < 1e-12 * height(&z) * 10.0);
    }

    #[test]
    fn transporter_moves_between_same_height_points(z in point(2), x in lie(2)) {
        let w = z.act(&exp(&x)).unwrap();
        let h = orbit_transporter(&z, &w).unwrap().unwrap();
        prop_assert!(w.act(&h).unwrap().max_abs_diff(&z) < 1e-10);
    }

    #[test]
    fn coordinate_round_trips(z in point(2)) {
        prop_assert!(kappa(&tau(&z)).unwrap().max_abs_diff(&z) < 1e-13 * 10.0);
        let back = rho_coord(&z);
        let rebuilt = sigma_section(height(&z), 2).unwrap().act(&back).unwrap();
        prop_assert!(rebuilt.max_abs_diff(&z) < 1e-12 * 10.0);
    }

    #[test]
    fn jacobian_is_height_squared(z in point(1)) {
        let det = tau_jacobian_fd(&z, 1e-5).unwrap().abs();
        let want = height(&z).powi(2);
        prop_assert!((det - want).abs() <= 1e-6 * want);
    }
}
