//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use tanprimes::counting::{count_pi_c, count_sc};
use tanprimes::hb::hb_params_literal;
use tanprimes::sequence::{TermEnumerator, Window, DEFAULT_TOL};
use tanprimes::verify::{self, Check, Suite, VerifyConfig};
use tanprimes::{EvalConfig, Params};

const XS: [f64; 4] = [1e3, 1e4, 1e5, 1e6];
/// S_c(x) at c = 1.05, θ = 2, frozen from the first run and matched by an
/// independent 60-digit evaluation.
const FROZEN_SC: [u64; 4] = [46, 46, 884, 15961];
const FROZEN_DENSITY: [f64; 4] = [0.3177567428331783, 0.042367565711090446, 0.10177426111033683, 0.22050936401566776];

struct Outcome {
    pass: bool,
    detail: String,
}

fn params() -> Params {
    Params::new(1.05, 2.0).unwrap()
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e <= limit, format!("{:.1} s of {} s", e.as_secs_f64(), limit.as_secs()))
}

fn window_soundness() -> Outcome {
    let t = Instant::now();
    let mut violations = 0;
    let mut terms = 0;
    for x in XS {
        let w = Window::make(x, &params()).unwrap();
        let recs = TermEnumerator::new(&w, EvalConfig::default()).unwrap().terms();
        terms += recs.len();
        violations += recs.iter().filter(|r| !r.in_band).count();
    }
    let (fast, time) = within(t, Duration::from_secs(60));
    Outcome { pass: violations == 0 && fast, detail: format!("{violations} violations over {terms} terms, {time}") }
}

fn decomposition_identity() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for x in XS {
        let t = Instant::now();
        let r = count_sc(x, &params(), EvalConfig::default(), DEFAULT_TOL).unwrap();
        let ok = r.residual.abs() <= 3.0 && r.undecided == 0;
        let (fast, _) = within(t, Duration::from_secs(300));
        pass &= ok && fast;
        parts.push(format!("x={x:e}: residual {:.2e}, undecided {} ({:.1} s)", r.residual, r.undecided, t.elapsed().as_secs_f64()));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn theorem_sanity() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, x) in XS.into_iter().enumerate() {
        let r = count_sc(x, &params(), EvalConfig::default(), DEFAULT_TOL).unwrap();
        let ok = r.s_c >= 1
            && r.s_c == FROZEN_SC[i]
            && (r.density_ratio - FROZEN_DENSITY[i]).abs() <= 1e-15 * FROZEN_DENSITY[i];
        pass &= ok;
        parts.push(format!("S_c({x:e}) = {}, ratio {:.6}", r.s_c, r.density_ratio));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn classic_comparison() -> Outcome {
    let t = Instant::now();
    let ratios: Vec<f64> =
        [1e5, 1e6, 1e7].iter().map(|&x| count_pi_c(x, 1.05, EvalConfig::default()).unwrap().ratio).collect();
    let dist: Vec<f64> = ratios.iter().map(|r| (r - 1.0).abs()).collect();
    let band = (0.7..=1.3).contains(&ratios[2]);
    let monotone = dist.windows(2).all(|w| w[1] <= w[0]);
    let (fast, time) = within(t, Duration::from_secs(600));
    Outcome {
        pass: band && monotone && fast,
        detail: format!("ratios {:.5} {:.5} {:.5}, {time}", ratios[0], ratios[1], ratios[2]),
    }
}

fn summarize(checks: &[Check]) -> (bool, String) {
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.passed).collect();
    let worst = checks
        .iter()
        .map(|c| if c.limit > 0.0 { c.value / c.limit } else { c.value })
        .fold(0.0, f64::max);
    let mut s = format!("{} checks, {} failed, max value/limit {:.4}", checks.len(), failed.len(), worst);
    for c in failed.iter().take(3) {
        s += &format!("; failed {}: {:.4e} > {:.4e}", c.name, c.value, c.limit);
    }
    (failed.is_empty(), s)
}

fn suite(s: Suite, limit: Option<Duration>) -> Outcome {
    let t = Instant::now();
    let r = verify::run_suite(s, &VerifyConfig::default()).unwrap();
    let (mut pass, mut detail) = summarize(&r.checks);
    if let Some(l) = limit {
        let (fast, time) = within(t, l);
        pass &= fast;
        detail += &format!(", {time}");
    }
    Outcome { pass, detail }
}

fn heath_brown() -> Outcome {
    let t = Instant::now();
    let p = Params::new(1.05, 5.0).unwrap();
    let checks = verify::hb_checks(&p, &[1 << 10, 1 << 12, 1 << 14]).unwrap();
    let (ok, detail) = summarize(&checks);
    let cited = hb_params_literal(1 << 10).violations();
    let cites = cited.iter().any(|v| v == "2¹⁸P₁ ≤ V³");
    let (fast, time) = within(t, Duration::from_secs(300));
    Outcome {
        pass: ok && cites && fast,
        detail: format!(
            "{detail}; literal N=2^10 cites [{}], {} \"2¹⁸P₁ ≤ V³\"; {time}",
            cited.join(", "),
            if cites { "including" } else { "not" }
        ),
    }
}

fn run_bin(threads: usize, args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_tanprimes"))
        .args(["--threads", &threads.to_string(), "--format", "csv"])
        .args(args)
        .output()
        .expect("running tanprimes");
    assert!(out.status.success(), "{:?} exited with {:?}", args, out.status);
    out.stdout
}

fn determinism() -> Outcome {
    let cmds: [&[&str]; 4] = [
        &["terms", "--x", "1e5"],
        &["count", "--x", "1e3,1e4,1e5,1e6"],
        &["density", "--x", "1e3,1e4,1e5,1e6"],
        &["pi-c", "--x", "1e5,1e6,1e7"],
    ];
    let mut same = 0;
    let mut bytes = 0;
    for c in cmds {
        let (a, b) = (run_bin(1, c), run_bin(8, c));
        bytes += a.len();
        if a == b {
            same += 1;
        }
    }
    Outcome { pass: same == cmds.len(), detail: format!("{same} of {} commands byte-identical ({bytes} bytes)", cmds.len()) }
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("window soundness", window_soundness),
        ("decomposition identity", decomposition_identity),
        ("theorem sanity", theorem_sanity),
        ("classic comparison", classic_comparison),
        ("sawtooth majorant", || suite(Suite::Vaaler, None)),
        ("Weyl-van der Corput", || suite(Suite::Weyl, Some(Duration::from_secs(10)))),
        ("derivative test", || suite(Suite::Vdc, None)),
        ("Heath-Brown exactness", heath_brown),
        ("implicit derivative", || suite(Suite::Derivative, None)),
        ("Type I/II shapes", || suite(Suite::Typesums, None)),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
