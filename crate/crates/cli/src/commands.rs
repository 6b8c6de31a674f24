use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde_json::json;
use tanprimes::counting::{count_pi_c, count_sc, density_series, CountReport};
use tanprimes::expsum::{bound_shape_sweep, covering_window, PhaseSpec, SweepFamily, TypeKind};
use tanprimes::hb::{direct_lambda_sum, hb_params_literal, hb_params_scaled, HBPlan, HBParams};
use tanprimes::report::{self, real, Table, WindowRow};
use tanprimes::sequence::{Cursor, Inverter, TermEnumerator, Window};
use tanprimes::vaaler::{self, build_vaaler, check_domination, uniform_grid, vaaler_cutoff, BUILD_GRID};
use tanprimes::verify::{self, Suite, VerifyConfig};

use crate::config::RunConfig;
use crate::{Outcome, Status};

fn outcome(kind: &'static str, table: Table, data: serde_json::Value, status: Status) -> Outcome {
    Outcome { kind, table, data, status, files: Vec::new() }
}

#[derive(Args, Debug)]
pub struct WindowsArgs {
    /// Scales x (comma separated)
    #[arg(long, value_delimiter = ',', required = true)]
    x: Vec<f64>,
}

pub fn windows(cfg: &RunConfig, a: &WindowsArgs) -> Result<Outcome> {
    let p = cfg.params()?;
    let rows: Vec<WindowRow> =
        a.x.iter().map(|&x| Window::make(x, &p).map(|w| WindowRow::from(&w))).collect::<tanprimes::Result<_>>()?;
    Ok(outcome("windows", report::windows_table(&rows), json!(rows), Status::Ok))
}

#[derive(Args, Debug)]
pub struct TermsArgs {
    #[arg(long)]
    x: f64,
    /// First n (default: start of the window)
    #[arg(long)]
    from: Option<u64>,
    /// Number of terms (default: the whole window)
    #[arg(long)]
    count: Option<u64>,
}

pub fn terms(cfg: &RunConfig, a: &TermsArgs) -> Result<Outcome> {
    let w = Window::make(a.x, &cfg.params()?)?;
    let en = TermEnumerator::new(&w, cfg.eval()?)?;
    let lo = a.from.unwrap_or(w.first()).max(w.first());
    let hi = a.count.map_or(w.end(), |c| lo.saturating_add(c)).min(w.end());
    let recs = en.range(lo, hi.max(lo));
    let status = if recs.iter().any(|r| r.floor.is_none()) { Status::Undecided } else { Status::Ok };
    Ok(outcome("terms", report::terms_table(&recs), json!(recs), status))
}

#[derive(Args, Debug)]
pub struct InvertArgs {
    /// Scale selecting the window
    #[arg(long)]
    x: f64,
    /// Targets t (comma separated)
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<f64>,
}

pub fn invert(cfg: &RunConfig, a: &InvertArgs) -> Result<Outcome> {
    let w = Window::make(a.x, &cfg.params()?)?;
    let inv = Inverter::new(&w, cfg.tol, cfg.eval()?)?;
    let mut cur = Cursor::default();
    let rs = a.t.iter().map(|&t| inv.invert(t, &mut cur)).collect::<tanprimes::Result<Vec<_>>>()?;
    let status = if rs.iter().any(|r| r.integer_count().is_none()) { Status::Undecided } else { Status::Ok };
    let data: Vec<_> = rs
        .iter()
        .map(|r| {
            json!({
                "t": r.t, "m_lo": r.m_lo.mid_f64(), "m_lo_rad": r.m_lo.rad_f64(),
                "m_hi": r.m_hi.mid_f64(), "m_hi_rad": r.m_hi.rad_f64(), "tol": r.tol, "count": r.integer_count(),
            })
        })
        .collect();
    Ok(outcome("invert", report::inversion_table(&rs), json!(data), status))
}

fn count_status(reps: &[CountReport]) -> Status {
    if reps.iter().any(|r| r.undecided > 0 || r.inversion_undecided > 0) {
        Status::Undecided
    } else {
        Status::Ok
    }
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    x: Vec<f64>,
}

pub fn count(cfg: &RunConfig, a: &CountArgs) -> Result<Outcome> {
    let (p, ev) = (cfg.params()?, cfg.eval()?);
    let reps = a.x.iter().map(|&x| count_sc(x, &p, ev, cfg.tol)).collect::<tanprimes::Result<Vec<_>>>()?;
    let status = count_status(&reps);
    Ok(outcome("count", report::count_table(&reps), json!(reps), status))
}

#[derive(Args, Debug)]
pub struct PiCArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    x: Vec<f64>,
}

pub fn pi_c(cfg: &RunConfig, a: &PiCArgs) -> Result<Outcome> {
    cfg.params()?;
    let ev = cfg.eval()?;
    let reps = a.x.iter().map(|&x| count_pi_c(x, cfg.c, ev)).collect::<tanprimes::Result<Vec<_>>>()?;
    let status = if reps.iter().any(|r| r.undecided > 0) { Status::Undecided } else { Status::Ok };
    Ok(outcome("pi-c", report::pi_c_table(&reps), json!(reps), status))
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long, value_delimiter = ',', default_value = "1e3,1e4,1e5,1e6")]
    x: Vec<f64>,
    /// Two-column (x, density_ratio) file
    #[arg(long)]
    plot: Option<PathBuf>,
}

pub fn density(cfg: &RunConfig, a: &DensityArgs) -> Result<Outcome> {
    let (p, ev) = (cfg.params()?, cfg.eval()?);
    let mut reps = Vec::new();
    let mut failed = false;
    for (x, r) in a.x.iter().zip(density_series(&p, &a.x, ev, cfg.tol)) {
        match r {
            Ok(r) => reps.push(r),
            Err(e) => {
                eprintln!("x = {x}: {e}");
                failed = true;
            }
        }
    }
    let mut status = count_status(&reps);
    if failed {
        status = status.max(Status::CheckFailed);
    }
    let mut out = outcome("density", report::count_table(&reps), json!(reps), status);
    if let Some(path) = &a.plot {
        let mut buf = Vec::new();
        report::write_density_plot(&mut buf, &reps)?;
        out.files.push((path.clone(), String::from_utf8(buf)?));
    }
    Ok(out)
}

#[derive(Args, Debug)]
pub struct VaalerArgs {
    /// Degree M
    #[arg(long = "M", alias = "m", conflicts_with = "n")]
    m: Option<usize>,
    /// Choose M = N^{1-γ} (log N)^4 for this N
    #[arg(long)]
    n: Option<f64>,
}

pub fn vaaler(cfg: &RunConfig, a: &VaalerArgs) -> Result<Outcome> {
    let m = match (a.m, a.n) {
        (Some(m), _) => m,
        (None, Some(n)) => vaaler_cutoff(n, &cfg.params()?)?,
        (None, None) => 16,
    };
    let vp = build_vaaler(m)?;
    let rep = check_domination(&vp, &uniform_grid(BUILD_GRID));
    let data = json!({ "m": m, "a": vp.a, "b": vp.b, "domination": rep });
    Ok(outcome("vaaler", report::vaaler_table(&vp), data, Status::Ok))
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FamilyArg {
    Monomial,
    Inversion,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "monomial")]
    family: FamilyArg,
    /// Lengths N (default 2^10..2^16)
    #[arg(long, value_delimiter = ',')]
    n: Vec<u64>,
    #[arg(long, default_value_t = 0)]
    k: u32,
    #[arg(long, default_value_t = 1)]
    h: i64,
    /// Monomial family: F = scale N^beta, f(t) = F (t/N)^alpha
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
}

pub fn sweep(cfg: &RunConfig, a: &SweepArgs) -> Result<Outcome> {
    let fam = match a.family {
        FamilyArg::Monomial => SweepFamily::Monomial { scale: a.scale, beta: a.beta, alpha: a.alpha, h: a.h },
        FamilyArg::Inversion => SweepFamily::Inversion { params: cfg.params()?, h: a.h },
    };
    let ns = if a.n.is_empty() { (10..=16).map(|e| 1u64 << e).collect() } else { a.n.clone() };
    let rows = bound_shape_sweep(&fam, &ns, a.k)?;
    let status = if rows.iter().all(|r| r.ratio <= tanprimes::expsum::FIT_CONSTANT) {
        Status::Ok
    } else {
        Status::CheckFailed
    };
    Ok(outcome("sweep", report::sweep_table(&rows), json!(rows), status))
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    I,
    Ilog,
    Ii,
}

#[derive(Args, Debug)]
pub struct TypesumArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1)]
    h: i64,
}

pub fn typesum(cfg: &RunConfig, a: &TypesumArgs) -> Result<Outcome> {
    let kind = match a.kind {
        KindArg::I => TypeKind::I,
        KindArg::Ilog => TypeKind::ILog,
        KindArg::Ii => TypeKind::II,
    };
    let r = verify::standard_type_sum(&cfg.params()?, kind, a.n, a.h)?;
    let mut t = Table::new(&["kind", "N", "h", "re", "im", "abs", "bound", "ratio", "terms"]);
    t.push(vec![
        format!("{kind:?}"),
        a.n.to_string(),
        a.h.to_string(),
        real(r.value.re),
        real(r.value.im),
        real(r.abs),
        real(r.lemma_bound),
        real(r.ratio),
        r.terms.to_string(),
    ]);
    let status = if r.abs <= r.lemma_bound { Status::Ok } else { Status::CheckFailed };
    Ok(outcome("typesum", t, json!(r), status))
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Scaled,
    Literal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GArg {
    Constant,
    Linear,
    Inversion,
}

#[derive(Args, Debug)]
pub struct HbArgs {
    #[arg(long, default_value_t = 4096)]
    p: u64,
    #[arg(long, value_enum, default_value = "scaled")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "constant")]
    g: GArg,
    /// Frequency of the linear family e(αn)
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Multiplier h of the inversion family e(h m'_n)
    #[arg(long, default_value_t = 1)]
    h: i64,
}

pub fn hb(cfg: &RunConfig, a: &HbArgs) -> Result<Outcome> {
    let hp: HBParams = match a.mode {
        ModeArg::Scaled => hb_params_scaled(a.p)?,
        ModeArg::Literal => {
            let hp = hb_params_literal(a.p);
            hp.validate()?;
            hp
        }
    };
    let plan = HBPlan::new(&hp)?;
    let table: Vec<f64> = match a.g {
        GArg::Inversion => {
            let w = covering_window(hp.p, hp.p1, &cfg.params()?)?;
            PhaseSpec::inversion(&w, a.h).fractions(hp.p, hp.p1)?
        }
        _ => Vec::new(),
    };
    let (g_kind, alpha, lo) = (a.g, a.alpha, hp.p);
    let g = move |n: u64| -> Complex64 {
        match g_kind {
            GArg::Constant => Complex64::new(1.0, 0.0),
            GArg::Linear => vaaler::e(alpha * n as f64),
            GArg::Inversion => vaaler::e(table[(n - lo - 1) as usize]),
        }
    };
    let d = plan.evaluate(&g);
    let (want, mass) = direct_lambda_sum(&g, hp.p, hp.p1);
    let rel = (d.total - want).norm() / mass;
    let caps = plan.max_coefficient_ratio();
    let manifest = d.manifest();
    let data = json!({
        "params": hp,
        "total": d.total,
        "direct": want,
        "relative_residual": rel,
        "component_count": d.component_count,
        "max_coefficient_ratio": caps,
        "components": manifest,
    });
    let status = if rel <= 1e-9 && caps <= 1.0 { Status::Ok } else { Status::CheckFailed };
    Ok(outcome("hb", report::hb_table(&manifest), data, status))
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// vaaler, weyl, vdc, typesums, hb, derivative or all
    suite: String,
    #[arg(long)]
    trials: Option<usize>,
    /// Degrees for the vaaler suite (comma separated)
    #[arg(long = "M", alias = "m", value_delimiter = ',')]
    m: Vec<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    random: Option<usize>,
    #[arg(long)]
    pmax: Option<u64>,
    #[arg(long)]
    points: Option<usize>,
}

pub fn verify(cfg: &RunConfig, a: &VerifyArgs) -> Result<Outcome> {
    let suites: Vec<Suite> = if a.suite == "all" { Suite::ALL.to_vec() } else { vec![a.suite.parse()?] };
    let d = VerifyConfig::default();
    let vc = VerifyConfig {
        seed: cfg.seed,
        trials: a.trials.unwrap_or(d.trials),
        degrees: if a.m.is_empty() { d.degrees } else { a.m.clone() },
        grid: a.grid.unwrap_or(d.grid),
        random: a.random.unwrap_or(d.random),
        pmax: a.pmax.unwrap_or(d.pmax),
        c: cfg.c,
        theta: d.theta,
        points: a.points.unwrap_or(d.points),
    };
    let reports = suites.iter().map(|&s| verify::run_suite(s, &vc)).collect::<tanprimes::Result<Vec<_>>>()?;
    let mut t = Table::new(&["suite", "check", "passed", "value", "limit", "detail"]);
    for r in &reports {
        for c in &r.checks {
            t.push(vec![
                r.suite.to_string(),
                c.name.clone(),
                c.passed.to_string(),
                real(c.value),
                real(c.limit),
                c.detail.clone(),
            ]);
        }
    }
    let status = if reports.iter().all(|r| r.passed()) { Status::Ok } else { Status::CheckFailed };
    Ok(outcome("verify", t, json!({ "verify_config": vc, "reports": reports }), status))
}
