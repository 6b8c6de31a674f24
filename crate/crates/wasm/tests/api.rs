use serde_json::Value;
use tanprimes_wasm::{expsum_walk, vaaler_curve, window_terms};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn window_terms_shape() {
    let v = parse(window_terms(1.05, 2.0, 1000.0, 5).unwrap());
    assert_eq!(v["k"], 2);
    assert_eq!(v["count"], 446);
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 5);
    assert_eq!(terms[0]["n"], 1175);
    assert_eq!(terms[0]["floor"], 1676);
}

#[test]
fn vaaler_curve_dominates() {
    let v = parse(vaaler_curve(16, 200).unwrap());
    let col = |k: &str| -> Vec<f64> { v[k].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect() };
    let (s, a, b) = (col("psi"), col("approx"), col("bound"));
    assert_eq!(s.len(), 200);
    for i in 0..s.len() {
        assert!((s[i] - a[i]).abs() <= b[i] + 1e-12);
    }
}

#[test]
fn expsum_walk_is_bounded() {
    let v = parse(expsum_walk(1.05, 5.0, 2048, 1).unwrap());
    assert_eq!(v["re"].as_array().unwrap().len(), v["im"].as_array().unwrap().len());
    assert!(v["abs"].as_f64().unwrap() <= 2048.0);
}
