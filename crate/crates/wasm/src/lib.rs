//! Browser bindings: three operations, each returning a JSON string.

use serde::Serialize;
use serde_json::json;
use tanprimes::expsum::{covering_window, PhaseSpec};
use tanprimes::sequence::{TermEnumerator, Window};
use tanprimes::vaaler::{self, build_vaaler, psi};
use tanprimes::{EvalConfig, Params};
use wasm_bindgen::prelude::*;

const MAX_TERMS: u64 = 5000;
const MAX_WALK: u64 = 1 << 16;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, JsValue> {
    serde_json::to_string(v).map_err(js_err)
}

/// Window of x and its first `limit` terms (n, f(n), floor, prime).
#[wasm_bindgen]
pub fn window_terms(c: f64, theta: f64, x: f64, limit: u32) -> Result<String, JsValue> {
    let p = Params::new(c, theta).map_err(js_err)?;
    let w = Window::make(x, &p).map_err(js_err)?;
    let en = TermEnumerator::new(&w, EvalConfig::default()).map_err(js_err)?;
    let hi = (w.first() + (limit as u64).min(MAX_TERMS)).min(w.end());
    let terms: Vec<_> = en
        .range(w.first(), hi)
        .into_iter()
        .map(|r| json!({ "n": r.n, "f": r.f_mid, "floor": r.floor, "prime": r.prime }))
        .collect();
    to_json(&json!({
        "k": w.k,
        "delta1": w.delta1.mid_f64(),
        "delta2": w.delta2.mid_f64(),
        "count": w.len(),
        "terms": terms,
    }))
}

/// ψ, its degree-M approximation and the majorant on `points` samples of [0, 1).
#[wasm_bindgen]
pub fn vaaler_curve(m: u32, points: u32) -> Result<String, JsValue> {
    let vp = build_vaaler(m as usize).map_err(js_err)?;
    let n = points.clamp(2, 20_000) as usize;
    let (mut t, mut s, mut a, mut b) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for i in 0..n {
        let x = i as f64 / n as f64;
        let (ap, bd) = vaaler::approx_psi(&vp, x);
        t.push(x);
        s.push(psi(x));
        a.push(ap);
        b.push(bd);
    }
    to_json(&json!({ "m": m, "t": t, "psi": s, "approx": a, "bound": b }))
}

/// Partial sums of Σ_{N<t≤2N} e(h m'_t), the walk in the complex plane.
#[wasm_bindgen]
pub fn expsum_walk(c: f64, theta: f64, n: u32, h: i32) -> Result<String, JsValue> {
    let p = Params::new(c, theta).map_err(js_err)?;
    let n = (n as u64).clamp(16, MAX_WALK);
    let w = covering_window(n, 2 * n, &p).map_err(js_err)?;
    let fr = PhaseSpec::inversion(&w, h as i64).fractions(n, 2 * n).map_err(js_err)?;
    let (mut re, mut im) = (Vec::with_capacity(fr.len() + 1), Vec::with_capacity(fr.len() + 1));
    let (mut x, mut y) = (0.0, 0.0);
    re.push(x);
    im.push(y);
    for f in fr {
        let z = vaaler::e(f);
        x += z.re;
        y += z.im;
        re.push(x);
        im.push(y);
    }
    to_json(&json!({ "n": n, "h": h, "k": w.k, "re": re, "im": im, "abs": (x * x + y * y).sqrt() }))
}
