use discop::spectrum::spectrum;
use discop::verify::{convolve_exponential, convolve_fundamental, convolve_monomial, fundamental_power_sum};
use discop::{build_characteristic_polynomial, construct, run_verification, Dd, DiscreteOperator, Error, OperatorSpec};
use proptest::prelude::*;

fn op(m: usize, h: f64) -> DiscreteOperator<Dd> {
    construct(&OperatorSpec::new(m, h).unwrap()).unwrap()
}

#[test]
fn convergent_grid_points_pass() {
    for m in 1..=3 {
        for h in [0.1, 0.5, 1.0] {
            let o = op(m, h);
            let r = run_verification(&o, 20, 1e-8);
            if (m, h) == (3, 1.0) {
                // max |λ| e^h exceeds 1 here, so the sums do not converge
                assert!(matches!(r, Err(Error::Divergent { ratio }) if ratio > 1.14 && ratio < 1.15));
                continue;
            }
            let r = r.unwrap();
            assert!(r.passed, "({m}, {h}): {r:?}");
            assert!(r.max_route_discrepancy < 1e-10);
        }
    }
}

#[test]
fn monomials_do_not_need_the_exponential_margin() {
    // only |λ| < 1 matters for polynomial growth
    let o = op(3, 1.0);
    for n in 0..=3 {
        for beta in [-7, 0, 11] {
            let c = convolve_monomial(&o, n, beta).unwrap();
            let norm = (1.0 * beta as f64).abs().powi(n as i32).max(1.0);
            assert!(c.value.abs().to_f64() / norm < 1e-20);
        }
    }
}

#[test]
fn higher_orders_are_measured() {
    for (m, h) in [(4, 0.1), (4, 0.5), (5, 0.1)] {
        let r = run_verification(&op(m, h), 20, 1e-6).unwrap();
        assert!(r.beyond_stated_range);
        assert!(r.passed, "({m}, {h}): {r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn delta_and_exponentials(m in 1usize..=3, h in 0.02f64..0.6, beta in -15i64..=15) {
        let o = op(m, h);
        let d = convolve_fundamental(&o, beta).unwrap();
        let want = if beta == 0 { 1.0 } else { 0.0 };
        prop_assert!((d.value.to_f64() - want).abs() < 1e-8);
        prop_assert!(d.discrepancy <= 1e-10);
        for sign in [1, -1] {
            let e = convolve_exponential(&o, sign, beta).unwrap();
            prop_assert!(e.value.abs().to_f64() / (h * beta.abs() as f64).exp() < 1e-8);
        }
    }

    #[test]
    fn operator_is_even_and_decays(m in 2usize..=5, h in 0.02f64..0.4) {
        let o = op(m, h);
        let ratio = o.convergence_ratio() / h.exp();
        for beta in 1..30i64 {
            prop_assert_eq!(o.evaluate(beta), o.evaluate(-beta));
        }
        let far = o.evaluate(40).abs().to_f64();
        let near = o.evaluate(2).abs().to_f64();
        prop_assert!(far <= near * ratio.powi(30) * 1e3 + 1e-300);
    }

    #[test]
    fn spectrum_is_reciprocal(m in 2usize..=6, h in 0.01f64..2.0) {
        let cp = build_characteristic_polynomial::<Dd>(&OperatorSpec::new(m, h).unwrap()).unwrap();
        let sp = spectrum(&cp).unwrap();
        prop_assert_eq!(sp.interior().len(), m - 1);
        for (a, b) in sp.interior().iter().zip(sp.exterior()) {
            let p = a * b;
            prop_assert!((p.re.to_f64() - 1.0).hypot(p.im.to_f64()) < 1e-8);
        }
        prop_assert!(sp.residual() < 1e-25);
    }

    #[test]
    fn non_root_sums_do_not_vanish(m in 2usize..=3, h in 0.05f64..0.5, t in 0.1f64..0.9) {
        let o = op(m, h);
        let lambda = o.terms()[0].root * discop::num_complex::Complex::new(Dd::from_f64(t), Dd::ZERO);
        let c = fundamental_power_sum(&o.spec(), lambda).unwrap();
        prop_assert!(c.value.re.abs().to_f64() > 1e-6 * c.scale);
    }
}
