mod common;

use num_complex::Complex;
use proptest::prelude::*;
use rshaper_core::*;

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1..7)
}

fn root_set() -> impl Strategy<Value = Vec<Complex<f64>>> {
    // real roots and conjugate pairs in the open left half plane, total degree <= 6
    let real = (-20.0f64..-0.1).prop_map(|r| vec![Complex::new(r, 0.0)]);
    let pair = (-20.0f64..-0.1, 0.5f64..30.0)
        .prop_map(|(re, im)| vec![Complex::new(re, im), Complex::new(re, -im)]);
    prop::collection::vec(prop_oneof![real, pair], 1..4)
        .prop_map(|groups| groups.into_iter().flatten().take(6).collect::<Vec<_>>())
        .prop_filter("conjugate pairs stay whole", |r| {
            r.iter().filter(|z| z.im > 0.0).count() == r.iter().filter(|z| z.im < 0.0).count()
        })
}

fn sorted(mut v: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

/// Greedy nearest matching, since sorted order is fragile for nearly equal real parts.
fn max_matching_error(found: &[Complex<f64>], expected: &[Complex<f64>]) -> f64 {
    let mut pool = found.to_vec();
    let mut worst = 0.0f64;
    for e in expected {
        let (i, d) = pool
            .iter()
            .enumerate()
            .map(|(i, f)| (i, (f - e).norm() / e.norm().max(1.0)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        worst = worst.max(d);
        pool.swap_remove(i);
    }
    worst
}

proptest! {
    #[test]
    fn product_evaluates_to_product_of_values(a in coeffs(), b in coeffs(), re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let (pa, pb) = (Polynomial::new(a), Polynomial::new(b));
        let s = Complex::new(re, im);
        let lhs = (&pa * &pb).eval(s);
        let rhs = pa.eval(s) * pb.eval(s);
        let scale = (pa.eval(s).norm() * pb.eval(s).norm()).max(1.0)
            * (1.0 + s.norm()).powi((pa.degree() + pb.degree()) as i32);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
    }

    #[test]
    fn roots_invert_from_roots(r in root_set()) {
        let p = Polynomial::from_roots(&r);
        let found = p.roots().unwrap();
        prop_assert_eq!(found.len(), r.len());
        prop_assert!(max_matching_error(&sorted(found), &sorted(r)) <= 1e-8);
    }

    #[test]
    fn statespace_transfer_round_trip(m in common::stable_system_strategy(3)) {
        let g = RationalTransfer::from_statespace(&m).unwrap();
        for w in FrequencyGrid::logarithmic(0.1, 1000.0, 20).unwrap().omegas() {
            prop_assert!(common::rel_err(g.eval_jw(w).unwrap(), common::resolvent(&m, w)) <= 1e-9);
        }
    }

    #[test]
    fn round_trip_holds_for_larger_orders(m in common::stable_system_strategy(5)) {
        let g = RationalTransfer::from_statespace(&m).unwrap();
        prop_assert!(g.den().degree() == 5);
        for w in [0.3, 3.0, 30.0] {
            prop_assert!(common::rel_err(g.eval_jw(w).unwrap(), common::resolvent(&m, w)) <= 1e-9);
        }
    }

    #[test]
    fn template_quadratic_factor_is_imaginary_at_omega0(zeta in 0.001f64..0.99, omega0 in 0.5f64..100.0) {
        let quad = Polynomial::new(vec![1.0, 2.0 * zeta * omega0, omega0 * omega0]);
        let v = quad.eval(Complex::new(0.0, omega0));
        prop_assert!(v.re.abs() <= 1e-12 * omega0 * omega0);
        prop_assert!((v.im - 2.0 * zeta * omega0 * omega0).abs() <= 1e-12 * omega0 * omega0);
    }
}

#[test]
fn plant_poles_match_matrix_eigenvalues() {
    let m = paper_verbatim_statespace::<f64>();
    let poles = RationalTransfer::from_statespace(&m)
        .unwrap()
        .poles()
        .unwrap();
    let eig = common::eigenvalues(&m);
    assert_eq!(poles.len(), 4);
    for e in &eig {
        let nearest = poles
            .iter()
            .map(|p| (p - e).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest <= 1e-6 * e.norm().max(1.0), "{e} vs {poles:?}");
    }
    let pair = poles.iter().find(|p| p.im > 1.0).unwrap();
    assert!((pair.im - 16.3).abs() / 16.3 < 0.01);
    assert!(pair.re < 0.0);
}

#[test]
fn physical_constructor_has_the_same_oscillation() {
    let m = two_mass_statespace(&nominal_params::<f64>()).unwrap();
    let eig = common::eigenvalues(&m);
    let pair = eig.iter().find(|p| p.im > 1.0).unwrap();
    assert!((pair.im - 16.3).abs() / 16.3 < 0.01, "{pair}");
    assert!(eig.iter().all(|p| p.re <= 1e-9));
}

#[test]
fn transfer_json_round_trip() {
    let g = RationalTransfer::from_statespace(&paper_verbatim_statespace::<f64>()).unwrap();
    let back: RationalTransferF64 =
        serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
    assert_eq!(back, g);
    let bad = serde_json::from_str::<RationalTransferF64>(r#"{"num":[1],"den":[0,0]}"#);
    assert!(bad.is_err());
}
