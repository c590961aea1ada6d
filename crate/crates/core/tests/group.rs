use proptest::prelude::*;
use siegel_core::heisenberg::*;
use siegel_core::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn element(n: usize) -> impl Strategy<Value = HeisenbergElement> {
    (prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), n), -5.0f64..5.0).prop_map(|(w, t)| HeisenbergElement {
        w_prime: w.into_iter().map(|(a, b)| c(a, b)).collect(),
        t,
    })
}

fn lie(n: usize) -> impl Strategy<Value = LieElement> {
    element(n).prop_map(LieElement::from)
}

fn e1(n: usize, v: C64, t: f64) -> HeisenbergElement {
    let mut w = vec![c(0.0, 0.0); n];
    w[0] = v;
    HeisenbergElement { w_prime: w, t }
}

#[test]
fn product_examples() {
    let a = e1(3, c(1.0, 0.0), 0.0);
    let b = e1(3, c(0.0, 1.0), 0.0);
    let p = hn_mul(&a, &b).unwrap();
    assert_eq!(p, e1(3, c(1.0, 1.0), -2.0));
    assert_eq!(hn_mul(&HeisenbergElement::zero(3), &a).unwrap(), a);
    assert_eq!(hn_inv(&e1(2, c(0.0, 1.0), 3.0)), e1(2, c(0.0, -1.0), -3.0));
    assert!(matches!(
        hn_mul(&HeisenbergElement::zero(1), &HeisenbergElement::zero(2)),
        Err(siegel_core::Error::DimensionMismatch { .. })
    ));
}

#[test]
fn bracket_and_adjoint_examples() {
    let x: LieElement = e1(2, c(1.0, 0.0), 0.0).into();
    let y: LieElement = e1(2, c(0.0, 1.0), 0.0).into();
    assert_eq!(lie_bracket(&x, &y).unwrap(), LieElement { w_prime: vec![c(0.0, 0.0); 2], t: -4.0 });
    // h X h^{-1} with exp = id gives the same element as the adjoint formula
    let h = e1(2, c(1.0, 0.0), 0.0);
    let conj = hn_mul(&hn_mul(&h, &HeisenbergElement::from(y.clone())).unwrap(), &hn_inv(&h)).unwrap();
    let ad = adjoint(&h, &y).unwrap();
    assert_eq!(ad, LieElement { w_prime: y.w_prime.clone(), t: -4.0 });
    assert!(ad.max_abs_diff(&conj.into()) < 1e-15);
    let rho = rho_rep(&e1(1, c(2.0, -1.0), 7.0), &LieElement { w_prime: vec![c(0.0, 0.0)], t: 1.0 }).unwrap();
    assert_eq!(rho, LieElement { w_prime: vec![c(4.0, 8.0)], t: 1.0 });
    assert_eq!(lie_inner(&e1(2, c(1.0, 0.0), 2.0).into(), &e1(2, c(1.0, 0.0), 2.0).into()).unwrap(), 5.0);
    assert_eq!(lie_inner(&e1(1, c(0.0, 1.0), 0.0).into(), &e1(1, c(1.0, 0.0), 0.0).into()).unwrap(), 0.0);
}

#[test]
fn action_examples() {
    let z = vec![c(0.5, -0.5), c(1.0, 3.0)];
    let moved = act(&HeisenbergElement { w_prime: vec![c(0.0, 0.0)], t: 2.0 }, &z).unwrap();
    assert_eq!(moved, vec![c(0.5, -0.5), c(3.0, 3.0)]);
    let moved = act(&e1(1, c(1.0, 0.0), 0.0), &[c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
    assert_eq!(moved, vec![c(1.0, 0.0), c(0.0, 2.0)]);
}

#[test]
fn subgroup_validation_examples() {
    let graph = |basis: Vec<Vec<C64>>| SubgroupSpec::new(1, SubgroupKind::GraphVf { f_coeffs: vec![0.5; basis.len()], basis });
    assert!(subgroup_validate(&graph(vec![vec![c(1.0, 0.0)]])).valid);
    let bad = subgroup_validate(&graph(vec![vec![c(1.0, 0.0)], vec![c(0.0, 1.0)]]));
    assert!(!bad.valid && !bad.diagnostics.is_empty());
    let product = SubgroupSpec::new(1, SubgroupKind::ProductVxR { basis: vec![vec![c(1.0, 0.0)], vec![c(0.0, 1.0)]] });
    assert!(subgroup_validate(&product).valid);
    let x = LieElement { w_prime: vec![c(1.0, 2.0)], t: 3.0 };
    let center = subgroup_project(&SubgroupSpec::new(1, SubgroupKind::Center), &x).unwrap();
    assert_eq!(center, LieElement { w_prime: vec![c(0.0, 0.0)], t: 3.0 });
}

proptest! {
    #[test]
    fn group_axioms(a in element(2), b in element(2), d in element(2)) {
        let lhs = hn_mul(&hn_mul(&a, &b).unwrap(), &d).unwrap();
        let rhs = hn_mul(&a, &hn_mul(&b, &d).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        prop_assert!(hn_mul(&hn_inv(&a), &a).unwrap().max_abs_diff(&HeisenbergElement::zero(2)) < 1e-14);
        prop_assert!(hn_mul(&a, &hn_inv(&a)).unwrap().max_abs_diff(&HeisenbergElement::zero(2)) < 1e-14);
    }

    #[test]
    fn nilpotency_and_antisymmetry(x in lie(3), y in lie(3), z in lie(3)) {
        let zero = LieElement::zero(3);
        prop_assert_eq!(lie_bracket(&x, &x).unwrap(), zero.clone());
        prop_assert_eq!(lie_bracket(&lie_bracket(&x, &y).unwrap(), &z).unwrap(), zero);
        let xy = lie_bracket(&x, &y).unwrap();
        let yx = lie_bracket(&y, &x).unwrap();
        prop_assert!(xy.add(&yx).max_abs_diff(&LieElement::zero(3)) < 1e-13);
    }

    #[test]
    fn transpose_identity(h in element(2), x in lie(2), y in lie(2)) {
        let l = lie_inner(&adjoint(&hn_inv(&h), &x).unwrap(), &y).unwrap();
        let r = lie_inner(&x, &rho_rep(&h, &y).unwrap()).unwrap();
        prop_assert!((l - r).abs() < 1e-12 * (1.0 + l.abs()));
    }

    #[test]
    fn adjoint_is_conjugation(h in element(2), x in lie(2)) {
        let conj = hn_mul(&hn_mul(&h, &exp(&x)).unwrap(), &hn_inv(&h)).unwrap();
        prop_assert!(adjoint(&h, &x).unwrap().max_abs_diff(&conj.into()) < 1e-12);
    }

    #[test]
    fn cauchy_schwarz(x in lie(2), y in lie(2)) {
        let xy = lie_inner(&x, &y).unwrap();
        prop_assert!(xy * xy <= lie_inner(&x, &x).unwrap() * lie_inner(&y, &y).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn action_preserves_the_defining_function(
        h in element(2),
        zp in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2),
        x in -5.0f64..5.0,
        gap in 0.01f64..10.0,
    ) {
        let zp: Vec<C64> = zp.into_iter().map(|(a, b)| c(a, b)).collect();
        let lift = zp.iter().map(|w| w.norm_sqr()).sum::<f64>() + gap;
        let (wp, wl) = act_raw(&h, &zp, c(x, lift)).unwrap();
        let moved_gap = wl.im - norm_sqr(&wp);
        prop_assert!((moved_gap - gap).abs() < 1e-12 * (1.0 + wl.im.abs()));
    }

    #[test]
    fn projections_are_orthogonal(x in lie(2), y in lie(2), ell in 1usize..2) {
        let kinds = [
            SubgroupKind::Full,
            SubgroupKind::Center,
            SubgroupKind::HR,
            SubgroupKind::HiR,
            SubgroupKind::HlR { ell },
            SubgroupKind::HliR { ell },
            SubgroupKind::ProductVxR { basis: vec![vec![c(1.0, 1.0), c(0.0, 2.0)]] },
        ];
        for kind in kinds {
            let spec = SubgroupSpec::new(2, kind);
            let px = subgroup_project(&spec, &x).unwrap();
            let ppx = subgroup_project(&spec, &px).unwrap();
            prop_assert!(px.max_abs_diff(&ppx) < 1e-14 * (1.0 + px.to_real().iter().fold(0.0f64, |m, v| m.max(v.abs()))));
            let py = subgroup_project(&spec, &y).unwrap();
            let l = lie_inner(&px, &y).unwrap();
            let r = lie_inner(&x, &py).unwrap();
            prop_assert!((l - r).abs() < 1e-13 * (1.0 + l.abs()));
        }
    }
}
