//! Values frozen from an independent 60-digit mpmath evaluation (gmpy2 for
//! primality, sympy for the Chebyshev differences).

use num_complex::Complex64;
use tanprimes::counting::{count_pi_c, count_sc};
use tanprimes::hb::{hb_decompose, hb_params_scaled};
use tanprimes::sequence::{dy_dt, invert, Window, DEFAULT_TOL, WINDOW_PREC};
use tanprimes::{EvalConfig, Evaluator, Params};

fn p() -> Params {
    Params::new(1.05, 2.0).unwrap()
}

fn close(got: f64, want: f64, abs: f64) {
    assert!((got - want).abs() <= abs, "{got} vs {want}");
}

#[test]
fn window_edges() {
    let cases = [
        (1e3, 2, 1174.4831653991398962, 1620.2472255929714233, 1175, 1621),
        (1e5, 3, 27178.353932875152263, 37493.64303656032409, 27179, 37494),
        (1e6, 4, 628925.93462555150738, 867628.86919218723223, 628926, 867629),
    ];
    for (x, k, d1, d2, first, end) in cases {
        let w = Window::make(x, &p()).unwrap();
        assert_eq!(w.k, k);
        close(w.delta1.mid_f64(), d1, 1e-15 * d1);
        close(w.delta2.mid_f64(), d2, 1e-15 * d2);
        assert_eq!((w.first(), w.end()), (first, end));
    }
}

#[test]
fn sequence_values() {
    let ev = Evaluator::new(p(), EvalConfig::default());
    let cases = [
        (1175u64, 1676.11588448493625820868510207),
        (1400, 4121.31486993570481385607534031),
        (1620, 9369.56513982141839464099949543),
        (628926, 1226110.76931537419098092618985),
        (867628, 6875559.63033802114621674187709),
    ];
    for (n, want) in cases {
        let b = ev.eval_f(n, WINDOW_PREC).unwrap();
        close(b.mid_f64(), want, b.rad_f64() + 4.0 * f64::EPSILON * want);
        assert_eq!(ev.floor_f(n).unwrap().floor, want.floor() as i64);
    }
    let other = Evaluator::new(Params::new(1.08, 3.5).unwrap(), EvalConfig::default());
    for (n, want) in [(1500u64, 16049.8856714855376203900456626), (700000, 4372320.56736472589197736343607)] {
        let b = other.eval_f(n, WINDOW_PREC).unwrap();
        close(b.mid_f64(), want, b.rad_f64() + 4.0 * f64::EPSILON * want);
    }
}

#[test]
fn roots_and_derivative() {
    let w = Window::make(1e3, &p()).unwrap();
    let cases = [
        (2000.0, 1216.80486735268206979870585057, 0.120236532183349569882276097254),
        (2001.5, 1216.98516640483238245359016789, 0.120162219513371032416701022756),
        (9000.0, 1609.21423574817546028292672601, 0.0298015878546178757417282670135),
    ];
    for (t, y, d) in cases {
        let r = invert(t, &w, DEFAULT_TOL).unwrap();
        close(r.m_lo.mid_f64(), y, DEFAULT_TOL);
        let got = dy_dt(&r.m_lo, &p()).unwrap().mid_f64();
        close(got, d, 1e-10 * d);
    }
}

#[test]
fn prime_counts() {
    let cfg = EvalConfig::default();
    for (x, s) in [(1e3, 46), (1e4, 46), (1e5, 884)] {
        assert_eq!(count_sc(x, &p(), cfg, DEFAULT_TOL).unwrap().s_c, s);
    }
    assert_eq!(count_pi_c(1e5, 1.05, cfg).unwrap().pi_c, 9019);
    assert_eq!(count_pi_c(1e6, 1.05, cfg).unwrap().pi_c, 74616);
}

#[test]
fn chebyshev_differences() {
    let one = |_: u64| Complex64::new(1.0, 0.0);
    for (p, want) in [(1024u64, 1015.746146875158), (4096, 4070.3360845966818)] {
        let d = hb_decompose(&one, &hb_params_scaled(p).unwrap()).unwrap();
        close(d.total.re, want, 1e-9 * want);
        assert!(d.total.im.abs() < 1e-9);
    }
}
