//! Property suites with machine-readable pass/fail lines.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::SpfTable;
use crate::error::{Error, Result};
use crate::expsum::{
    bound_shape_sweep, covering_window, derivative_bands, type_sum_eval, weyl_vdc_check, PhaseSpec, SideConditions,
    SweepFamily, SweepRow, TypeKind, TypeSumResult, FIT_CONSTANT,
};
use crate::hb::{direct_lambda_sum, hb_params_literal, hb_params_scaled, HBPlan};
use crate::numeric::{EvalConfig, Params};
use crate::sequence::{dy_dt, Cursor, Inverter, Window, DEFAULT_TOL, WINDOW_PREC};
use crate::vaaler::{self, build_vaaler, build_with, check_domination, random_points, uniform_grid, Multiplier};

/// Frozen bound on component_count / (log P)^6.
pub const HB_COUNT_CONSTANT: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Vaaler,
    Weyl,
    Vdc,
    Typesums,
    Hb,
    Derivative,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Vaaler, Suite::Weyl, Suite::Vdc, Suite::Typesums, Suite::Hb, Suite::Derivative];
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "vaaler" => Suite::Vaaler,
            "weyl" => Suite::Weyl,
            "vdc" => Suite::Vdc,
            "typesums" => Suite::Typesums,
            "hb" => Suite::Hb,
            "derivative" => Suite::Derivative,
            _ => return Err(Error::Domain(format!("unknown suite {s}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).unwrap();
        f.write_str(s.as_str().unwrap())
    }
}

/// One property: passes when `value ≤ limit`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    pub fn le(name: impl Into<String>, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: value <= limit, value, limit, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

/// Knobs shared by all suites.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub degrees: Vec<usize>,
    pub grid: usize,
    pub random: usize,
    pub pmax: u64,
    /// c and θ for the inversion phases.
    pub c: f64,
    pub theta: f64,
    pub points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            trials: 1000,
            degrees: vec![16, 64, 256],
            grid: 10_000,
            random: 1000,
            pmax: 1 << 14,
            c: 1.05,
            theta: 5.0,
            points: 100,
        }
    }
}

impl VerifyConfig {
    fn params(&self) -> Result<Params> {
        Params::new(self.c, self.theta)
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Vaaler => vaaler_checks(&cfg.degrees, cfg.grid, cfg.random, cfg.seed)?,
        Suite::Weyl => weyl_checks(cfg.trials, cfg.seed)?,
        Suite::Vdc => vdc_checks(&cfg.params()?, &(10..=16).map(|e| 1u64 << e).collect::<Vec<_>>())?,
        Suite::Typesums => typesum_checks(&cfg.params()?, &[1 << 12, 1 << 14], &[1, 4, 16])?,
        Suite::Hb => {
            let ps: Vec<u64> = (10..=40).step_by(2).map(|e| 1u64 << e).take_while(|&p| p <= cfg.pmax).collect();
            hb_checks(&cfg.params()?, &ps)?
        }
        Suite::Derivative => derivative_checks(&Params::new(cfg.c, 2.0)?, cfg.points, cfg.seed)?,
    };
    Ok(SuiteReport { suite, checks })
}

pub fn vaaler_checks(degrees: &[usize], grid: usize, random: usize, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut pts = uniform_grid(grid);
    pts.extend(random_points(random, seed));
    for &m in degrees {
        let vp = build_vaaler(m)?;
        let rep = check_domination(&vp, &pts);
        out.push(Check::le(
            format!("domination M={m}"),
            rep.violations as f64,
            0.0,
            format!("{} points, worst ratio {:.6} at t = {}", rep.points, rep.worst_ratio, rep.worst_t),
        ));
        let mean = check_domination(&vp, &uniform_grid(grid)).grid_mean_b;
        out.push(Check::le(format!("grid mean B_M M={m}"), mean, 2.0 / m as f64, ""));
        let (ca, cb) = vp.coefficient_caps();
        out.push(Check::le(format!("|a(h)h| M={m}"), ca, 1.0, ""));
        out.push(Check::le(format!("b(h)M M={m}"), cb, 1.0, ""));
    }
    let fejer = build_with(16, Multiplier::Fejer, &uniform_grid(vaaler::BUILD_GRID));
    out.push(Check::le(
        "Fejér multiplier rejected",
        if matches!(fejer, Err(Error::ConstructionFailed(_))) { 0.0 } else { 1.0 },
        0.0,
        "",
    ));
    Ok(out)
}

fn random_sequence(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    match rng.gen_range(0..3) {
        0 => (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        1 => {
            let a: f64 = rng.gen();
            (0..len).map(|n| vaaler::e(a * (n * n) as f64)).collect()
        }
        _ => {
            let a: f64 = rng.gen_range(0.0..0.01);
            (0..len).map(|n| vaaler::e(a * n as f64) * (1.0 + (n % 3) as f64)).collect()
        }
    }
}

/// Random subintervals of (X, 2X], sequences and Q; one check with the count.
pub fn weyl_checks(trials: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let x = rng.gen_range(2.0..512.0f64);
        let len = rng.gen_range(1..=x.floor() as usize);
        let q = rng.gen_range(1..=(2.0 * x) as usize);
        let z = random_sequence(&mut rng, len);
        let w = weyl_vdc_check(&z, x, q)?;
        if !w.holds {
            bad += 1;
        }
        if w.rhs > 0.0 {
            worst = worst.max(w.lhs / w.rhs);
        }
    }
    Ok(vec![Check::le(format!("Weyl-van der Corput over {trials} trials"), bad as f64, 0.0, format!("max lhs/rhs {worst:.6}"))])
}

/// The sweep families of the derivative test.
pub fn vdc_families(params: &Params) -> Vec<(String, SweepFamily)> {
    vec![
        ("monomial F=N^0.5".into(), SweepFamily::Monomial { scale: 1.0, beta: 0.5, alpha: 1.5, h: 1 }),
        ("monomial F=N^0.8".into(), SweepFamily::Monomial { scale: 1.0, beta: 0.8, alpha: 0.75, h: 1 }),
        ("inversion h=1".into(), SweepFamily::Inversion { params: *params, h: 1 }),
        ("inversion h=3".into(), SweepFamily::Inversion { params: *params, h: 3 }),
    ]
}

pub fn vdc_rows(params: &Params, ns: &[u64]) -> Result<Vec<(String, SweepRow)>> {
    let mut out = Vec::new();
    for (name, fam) in vdc_families(params) {
        for k in [0, 1] {
            for r in bound_shape_sweep(&fam, ns, k)? {
                out.push((name.clone(), r));
            }
        }
    }
    Ok(out)
}

pub fn vdc_checks(params: &Params, ns: &[u64]) -> Result<Vec<Check>> {
    Ok(vdc_rows(params, ns)?
        .into_iter()
        .map(|(name, r)| {
            Check::le(
                format!("{name} k={} N={}", r.k, r.n),
                r.abs,
                FIT_CONSTANT * r.bound,
                format!("F = {:.4}, ratio {:.4}", r.f, r.ratio),
            )
        })
        .collect())
}

/// The bilinear sum of `kind` with a(d) = μ(d), b(l) = Λ(l) and phase h m'_n
/// on (N, 2N]: d ∈ (D, 2D], D = N^{1/4}, for Type I; l ∈ (16, 32] for Type II.
pub fn standard_type_sum(params: &Params, kind: TypeKind, n: u64, h: i64) -> Result<TypeSumResult> {
    let w = covering_window(n, 2 * n, params)?;
    let fr = PhaseSpec::inversion(&w, h).fractions(n, 2 * n)?;
    type_sum_on(params, kind, n, h, &fr, &SpfTable::new(2 * n as usize + 1))
}

fn type_sum_on(params: &Params, kind: TypeKind, n: u64, h: i64, fr: &[f64], spf: &SpfTable) -> Result<TypeSumResult> {
    let mu = |d: u64| spf.moebius(d) as f64;
    let lam = |l: u64| spf.mangoldt(l);
    let dd = (n as f64).powf(0.25).round() as u64;
    let (dr, lr) = match kind {
        TypeKind::I | TypeKind::ILog => ((dd, 2 * dd), (n / (2 * dd), 2 * n / dd)),
        TypeKind::II => ((n / 32, n / 8), (16, 32)),
    };
    type_sum_eval(kind, dr, lr, (n, 2 * n), fr, &mu, &lam, params.gamma(), h, &SideConditions::default())
}

/// Type I, I-log and II sums of the inversion phase over (N, 2N].
pub fn typesum_checks(params: &Params, ns: &[u64], hs: &[i64]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &n in ns {
        let w = covering_window(n, 2 * n, params)?;
        let spf = SpfTable::new(2 * n as usize + 1);
        for &h in hs {
            let fr = PhaseSpec::inversion(&w, h).fractions(n, 2 * n)?;
            for kind in [TypeKind::I, TypeKind::ILog, TypeKind::II] {
                let r = type_sum_on(params, kind, n, h, &fr, &spf)?;
                out.push(Check::le(
                    format!("{kind:?} N={n} h={h}"),
                    r.abs,
                    r.lemma_bound,
                    format!("{} terms, ratio {:.4}", r.terms, r.ratio),
                ));
            }
        }
    }
    Ok(out)
}

/// Exactness, caps and count growth of the scaled decomposition.
pub fn hb_checks(params: &Params, ps: &[u64]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &p in ps {
        let hp = hb_params_scaled(p)?;
        let plan = HBPlan::new(&hp)?;
        let w = covering_window(hp.p, hp.p1, params)?;
        let inv = PhaseSpec::inversion(&w, 1).fractions(hp.p, hp.p1)?;
        let alpha = 2f64.sqrt() - 1.0;
        let families: Vec<(&str, Box<dyn Fn(u64) -> Complex64 + Sync>)> = vec![
            ("constant", Box::new(|_| Complex64::new(1.0, 0.0))),
            ("linear alpha=0", Box::new(|n| vaaler::e(0.0 * n as f64))),
            ("linear alpha=sqrt2-1", Box::new(move |n| vaaler::e(alpha * n as f64))),
            ("inversion h=1", Box::new(|n: u64| vaaler::e(inv[(n - hp.p - 1) as usize]))),
        ];
        for (name, g) in &families {
            let d = plan.evaluate(g.as_ref());
            let (want, mass) = direct_lambda_sum(g.as_ref(), hp.p, hp.p1);
            let rel = (d.total - want).norm() / mass;
            out.push(Check::le(format!("exactness {name} P={p}"), rel, 1e-9, format!("total {:.10}", d.total)));
        }
        out.push(Check::le(format!("coefficient caps P={p}"), plan.max_coefficient_ratio(), 1.0, "τ5(m) log P1"));
        let lp = (p as f64).ln();
        out.push(Check::le(
            format!("component count P={p}"),
            plan.components.len() as f64 / lp.powi(6),
            HB_COUNT_CONSTANT,
            format!("{} components from {} boxes", plan.components.len(), plan.boxes),
        ));
    }
    let lit = hb_params_literal(1 << 10).violations();
    out.push(Check::le("literal mode rejects N=2^10", if lit.is_empty() { 1.0 } else { 0.0 }, 0.0, lit.join("; ")));
    Ok(out)
}

/// dy/dt against centered differences of the inversion at seeded points.
pub fn derivative_checks(params: &Params, points: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let windows: Vec<Window> = (2..=4).map(|k| Window::from_index(k, params)).collect::<Result<_>>()?;
    let invs: Vec<Inverter> =
        windows.iter().map(|w| Inverter::new(w, DEFAULT_TOL, EvalConfig::default())).collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 0..points {
        let inv = &invs[i % invs.len()];
        let w = inv.window();
        let (a, b) = (w.g_lo.mid_f64(), w.g_hi.mid_f64());
        let t = a + (b - a) * rng.gen_range(0.05..0.95);
        let h = 1e-4 * t;
        let mut cur = Cursor::default();
        let y = inv.root(t, &mut cur)?;
        let yp = inv.root(t + h, &mut cur)?;
        let ym = inv.root(t - h, &mut cur)?;
        let fd = ((yp.n0 as f64 - ym.n0 as f64) + (yp.delta - ym.delta)) / (2.0 * h);
        let d = dy_dt(&y.to_ball(WINDOW_PREC), params)?.mid_f64();
        worst = worst.max((d - fd).abs() / d.abs());
    }
    let mut out = vec![Check::le(format!("dy/dt vs centered differences, {points} points"), worst, 1e-6, "")];
    let bw = covering_window(1 << 12, 1 << 13, &Params::new(params.c, 5.0)?)?;
    let bands = derivative_bands(&bw, 1 << 12, 17)?;
    let (lo, hi) = bands.iter().flatten().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    out.push(Check::le("derivative bands ⊂ [1/8, 8]", (hi / 8.0).max(0.125 / lo), 1.0, format!("[{lo:.4}, {hi:.4}]")));
    Ok(out)
}
