use num_complex::Complex64;
use proptest::prelude::*;
use tanprimes::expsum::{direct_sum, weyl_vdc_check, PhaseSpec};
use tanprimes::hb::{direct_lambda_sum, hb_params_scaled, HBPlan};
use tanprimes::numeric::certified_floor;
use tanprimes::sequence::{Cursor, Inverter, TermEnumerator, Window, DEFAULT_TOL, WINDOW_PREC};
use tanprimes::vaaler::{approx_psi, build_vaaler, psi, DOMINATION_SLACK};
use tanprimes::{BallScalar, EvalConfig, Evaluator, Params};

fn p() -> Params {
    Params::new(1.05, 2.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn certified_floor_brackets_the_midpoint(v in 1.0f64..1e9, r in 0.0f64..1e-6) {
        let b = BallScalar::with_radius(v, r, 128);
        match certified_floor(&b, |p| Ok(BallScalar::with_radius(v, r, p)), 256) {
            Ok(f) => {
                prop_assert!(f as f64 <= v - r && v + r < f as f64 + 1.0);
            }
            Err(_) => prop_assert!((v - r).floor() != (v + r).floor()),
        }
    }

    #[test]
    fn floors_agree_with_high_precision(n in 1175u64..1621) {
        let ev = Evaluator::new(p(), EvalConfig::default());
        let f = ev.floor_f(n).unwrap().floor;
        let hi = ev.eval_f(n, 512).unwrap();
        prop_assert_eq!(hi.floor_bounds(), (f, f));
    }

    #[test]
    fn inversion_round_trip(t in 1700.0f64..9300.0) {
        let w = Window::make(1e3, &p()).unwrap();
        let inv = Inverter::new(&w, DEFAULT_TOL, EvalConfig::default()).unwrap();
        let root = inv.root(t, &mut Cursor::default()).unwrap();
        let ev = Evaluator::new(p(), EvalConfig::default());
        let g = ev.g(&root.to_ball(WINDOW_PREC)).unwrap();
        // g' is below 40 on this window
        prop_assert!((g.mid_f64() - t).abs() <= 40.0 * (root.half_width + 1e-12));
    }

    #[test]
    fn vaaler_domination_at_random_points(t in -3.0f64..3.0, m in 2usize..80) {
        let vp = build_vaaler(m).unwrap();
        let (a, b) = approx_psi(&vp, t);
        prop_assert!((psi(t) - a).abs() <= b + DOMINATION_SLACK);
        prop_assert!(b >= -1e-15);
    }

    #[test]
    fn conjugate_symmetry(f in 1.0f64..500.0, alpha in 0.3f64..1.7, h in 1i64..5) {
        let ph = PhaseSpec::monomial(f, alpha, 1000.0, h);
        let a = direct_sum(&ph, 1000, 1400, None).unwrap();
        let b = direct_sum(&ph.negated(), 1000, 1400, None).unwrap();
        prop_assert!((a.value.conj() - b.value).norm() < 1e-9);
        prop_assert!(a.abs <= a.trivial + 1e-9);
    }

    #[test]
    fn weyl_inequality(seed in any::<u64>(), len in 1usize..64, q in 1usize..80) {
        let z: Vec<Complex64> = (0..len)
            .map(|n| tanprimes::vaaler::e(((seed % 1000) as f64 / 997.0) * (n * n) as f64))
            .collect();
        prop_assert!(weyl_vdc_check(&z, len as f64, q).unwrap().holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn hb_exact_for_linear_phases(alpha in 0.0f64..1.0) {
        let hp = hb_params_scaled(1 << 10).unwrap();
        let plan = HBPlan::new(&hp).unwrap();
        let g = move |n: u64| tanprimes::vaaler::e(alpha * n as f64);
        let d = plan.evaluate(&g);
        let (want, mass) = direct_lambda_sum(&g, hp.p, hp.p1);
        prop_assert!((d.total - want).norm() <= 1e-9 * mass);
    }
}

#[test]
fn terms_increase_on_the_window() {
    let w = Window::make(1e5, &p()).unwrap();
    let recs = TermEnumerator::new(&w, EvalConfig::default()).unwrap().terms();
    assert!(recs.windows(2).all(|r| r[0].f_mid < r[1].f_mid));
    assert!(recs.iter().all(|r| r.in_band && r.floor.is_some()));
}
