//! Exponential sums Σ w(n) e(f(n)) and the derivative-test bounds.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{BallScalar, EvalConfig, FBall, Params};
use crate::par::{self, ComplexSum, KahanSum};
use crate::sequence::{dy_dt, inverse_derivatives, Cursor, Inverter, Window, DEFAULT_TOL, WINDOW_PREC};
use crate::vaaler::e;

const SUM_CHUNK: u64 = 1 << 12;
const PHASE_ERR: f64 = 1e-10;
const F_GRID: usize = 9;

/// Fitted constant of all bound-shape checks.
pub const FIT_CONSTANT: f64 = 10.0;
/// The ε of the lemma exponents.
pub const EPSILON: f64 = 0.05;

#[derive(Clone, Debug)]
pub enum PhaseKind {
    /// t ↦ m'_t, the root of g(y) = t on the window.
    Inversion { window: Window, tol: f64 },
    /// t ↦ F (t/N)^α.
    Monomial { f: f64, alpha: f64, n: f64 },
    /// Explicit values for t = lo + 1, lo + 2, ...
    Table { lo: u64, values: Vec<f64> },
}

/// The phase h·f(t).
#[derive(Clone, Debug)]
pub struct PhaseSpec {
    pub kind: PhaseKind,
    pub h: i64,
    pub negate: bool,
}

impl PhaseSpec {
    pub fn inversion(window: &Window, h: i64) -> Self {
        Self { kind: PhaseKind::Inversion { window: window.clone(), tol: DEFAULT_TOL }, h, negate: false }
    }

    pub fn monomial(f: f64, alpha: f64, n: f64, h: i64) -> Self {
        Self { kind: PhaseKind::Monomial { f, alpha, n }, h, negate: false }
    }

    pub fn table(lo: u64, values: Vec<f64>, h: i64) -> Self {
        Self { kind: PhaseKind::Table { lo, values }, h, negate: false }
    }

    pub fn negated(&self) -> Self {
        Self { negate: !self.negate, ..self.clone() }
    }

    /// Fractional parts {h f(t)} for t in (lo, hi], ascending.
    pub fn fractions(&self, lo: u64, hi: u64) -> Result<Vec<f64>> {
        let parts = match &self.kind {
            PhaseKind::Inversion { window, tol } => {
                let inv = Inverter::new(window, *tol, EvalConfig::default())?;
                let h = self.h as f64;
                par::map_ordered(par::chunks(lo + 1..hi + 1, SUM_CHUNK), |r| -> Result<Vec<f64>> {
                    let mut cur = Cursor::default();
                    r.map(|t| {
                        let root = inv.root(t as f64, &mut cur)?;
                        // h n0 is an integer; only h delta matters modulo 1
                        Ok(frac(h * root.delta))
                    })
                    .collect()
                })
            }
            PhaseKind::Monomial { f, alpha, n } => {
                par::map_ordered(par::chunks(lo + 1..hi + 1, SUM_CHUNK), |r| -> Result<Vec<f64>> {
                    r.map(|t| monomial_frac(*f * self.h as f64, *alpha, *n, t)).collect()
                })
            }
            PhaseKind::Table { lo: tlo, values } => {
                if lo < *tlo || hi > *tlo + values.len() as u64 {
                    return Err(Error::Range(format!("table covers ({tlo}, {}]", tlo + values.len() as u64)));
                }
                let h = self.h as f64;
                vec![Ok(values[(lo - tlo) as usize..(hi - tlo) as usize].iter().map(|v| frac(h * v)).collect())]
            }
        };
        let mut out = Vec::with_capacity((hi - lo) as usize);
        for p in parts {
            out.extend(p?);
        }
        if self.negate {
            for v in out.iter_mut() {
                *v = frac(-*v);
            }
        }
        Ok(out)
    }

    /// F := N sup |f'| over (lo, hi], N = lo.
    pub fn derivative_scale(&self, lo: u64, hi: u64) -> Result<f64> {
        let n = lo as f64;
        let h = self.h.unsigned_abs() as f64;
        match &self.kind {
            PhaseKind::Monomial { f, alpha, n: nn } => {
                let d = |t: f64| (f * alpha * t.powf(alpha - 1.0) / nn.powf(*alpha)).abs();
                Ok(n * h * d(lo as f64).max(d(hi as f64)))
            }
            PhaseKind::Inversion { window, tol } => {
                let inv = Inverter::new(window, *tol, EvalConfig::default())?;
                let mut cur = Cursor::default();
                let mut sup = 0.0f64;
                for i in 0..F_GRID {
                    let t = lo as f64 + 1.0 + (hi - lo - 1) as f64 * i as f64 / (F_GRID - 1) as f64;
                    let y = inv.root(t.round(), &mut cur)?.to_ball(WINDOW_PREC);
                    sup = sup.max(dy_dt(&y, &window.params)?.upper_f64());
                }
                Ok(n * h * sup)
            }
            PhaseKind::Table { lo: tlo, values } => {
                let s = (lo - tlo) as usize;
                let e = ((hi - tlo) as usize).min(values.len());
                let sup = values[s..e].windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
                Ok(n * h * sup)
            }
        }
    }
}

fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

fn monomial_frac(f: f64, alpha: f64, n: f64, t: u64) -> Result<f64> {
    let tf = t as f64;
    if let Some(q) = FBall::exact(tf).div(FBall::exact(n)).and_then(|q| q.ln()) {
        let v = q.scale(alpha).exp().scale(f);
        if v.rad <= PHASE_ERR {
            return Ok(frac(v.mid));
        }
    }
    let mut prec = WINDOW_PREC;
    loop {
        let q = BallScalar::from_u64(t, prec).div(&BallScalar::from_f64(n, prec))?;
        let v = q.ln()?.mul_f64(alpha).exp()?.mul_f64(f);
        if v.rad_f64() <= PHASE_ERR {
            return Ok(frac(v.split_floor().1));
        }
        prec *= 2;
        if prec > EvalConfig::default().cap {
            return Err(Error::PrecisionExhausted { requested: prec, cap: EvalConfig::default().cap });
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpSumResult {
    pub value: Complex64,
    pub abs: f64,
    pub n_scale: u64,
    /// The interval (lo, hi].
    pub interval: (u64, u64),
    pub f_scale: f64,
    pub k: u32,
    pub bound: f64,
    /// Σ |w(n)|.
    pub trivial: f64,
}

pub type Weights<'a> = &'a (dyn Fn(u64) -> f64 + Sync);

/// Σ_{lo < n ≤ hi} w(n) e(h f(n)).
pub fn direct_sum(phase: &PhaseSpec, lo: u64, hi: u64, weights: Option<Weights>) -> Result<ExpSumResult> {
    if hi <= lo {
        return Err(Error::Range(format!("empty interval ({lo}, {hi}]")));
    }
    if hi - lo > 10_000_000 {
        return Err(Error::Range(format!("interval length {} above 10^7", hi - lo)));
    }
    let fr = phase.fractions(lo, hi)?;
    let (value, trivial) = sum_fractions(&fr, lo, weights);
    let f_scale = phase.derivative_scale(lo, hi).unwrap_or(f64::NAN);
    Ok(ExpSumResult {
        value,
        abs: value.norm(),
        n_scale: lo,
        interval: (lo, hi),
        f_scale,
        k: 0,
        bound: vdc_bound(f_scale, lo, 0),
        trivial,
    })
}

/// Σ w(lo + 1 + i) e(fr[i]) in fixed chunks, plus Σ |w|.
pub fn sum_fractions(fr: &[f64], lo: u64, weights: Option<Weights>) -> (Complex64, f64) {
    let parts = par::map_ordered(par::chunks(0..fr.len() as u64, SUM_CHUNK), |r| {
        let mut s = ComplexSum::default();
        let mut t = KahanSum::default();
        for i in r {
            let w = weights.map_or(1.0, |f| f(lo + 1 + i));
            if w != 0.0 {
                s.add(e(fr[i as usize]) * w);
                t.add(w.abs());
            }
        }
        (s.value(), t.value())
    });
    let mut s = ComplexSum::default();
    let mut t = KahanSum::default();
    for (v, w) in parts {
        s.add(v);
        t.add(w);
    }
    (s.value(), t.value())
}

/// F^{1/(4Q-2)} N^{1-(k+2)/(4Q-2)} + N/F with Q = 2^k.
pub fn vdc_bound(f: f64, n: u64, k: u32) -> f64 {
    let q = 2f64.powi(k as i32);
    let d = 4.0 * q - 2.0;
    let n = n as f64;
    f.powf(1.0 / d) * n.powf(1.0 - (k as f64 + 2.0) / d) + n / f
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeylCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Both sides of |Σ z(n)|² ≤ (1 + X/Q) Σ_{|q|<Q} (1 - |q|/Q) Σ z(n+q) conj(z(n)),
/// for z given on an interval of length at most X.
pub fn weyl_vdc_check(z: &[Complex64], x: f64, q: usize) -> Result<WeylCheck> {
    if q == 0 {
        return Err(Error::Domain("Q must be positive".into()));
    }
    if z.len() as f64 > x {
        return Err(Error::Domain(format!("interval of length {} does not fit in (X, 2X] for X = {x}", z.len())));
    }
    let total = z.iter().fold(ComplexSum::default(), |mut s, v| {
        s.add(*v);
        s
    });
    let lhs = total.value().norm_sqr();
    let mut acc = KahanSum::default();
    let qf = q as f64;
    for s in -(q as i64 - 1)..=(q as i64 - 1) {
        let mut c = ComplexSum::default();
        for n in 0..z.len() as i64 {
            let m = n + s;
            if m >= 0 && m < z.len() as i64 {
                c.add(z[m as usize] * z[n as usize].conj());
            }
        }
        acc.add((1.0 - s.unsigned_abs() as f64 / qf) * c.value().re);
    }
    let rhs = (1.0 + x / qf) * acc.value();
    Ok(WeylCheck { lhs, rhs, holds: lhs <= rhs + 1e-9 * rhs.abs() })
}

/// Phase families used by the sweep.
#[derive(Clone, Debug)]
pub enum SweepFamily {
    /// F = scale N^beta, f(t) = F (t/N)^alpha.
    Monomial { scale: f64, beta: f64, alpha: f64, h: i64 },
    /// h m'_t on whichever window covers (N, 2N].
    Inversion { params: Params, h: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u64,
    pub h: i64,
    pub k: u32,
    pub f: f64,
    pub abs: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// A window whose image [g(Δ1), g(Δ2)] contains (lo, hi].
pub fn covering_window(lo: u64, hi: u64, params: &Params) -> Result<Window> {
    for k in 1..64 {
        let w = Window::from_index(k, params)?;
        if w.g_lo.cmp_f64((lo + 1) as f64) == Some(Ordering::Greater) {
            break;
        }
        if w.g_hi.cmp_f64(hi as f64) == Some(Ordering::Greater) {
            return Ok(w);
        }
    }
    Err(Error::Range(format!("no branch window has ({lo}, {hi}] inside its image")))
}

impl SweepFamily {
    pub fn phase(&self, n: u64) -> Result<PhaseSpec> {
        match self {
            SweepFamily::Monomial { scale, beta, alpha, h } => {
                Ok(PhaseSpec::monomial(scale * (n as f64).powf(*beta), *alpha, n as f64, *h))
            }
            SweepFamily::Inversion { params, h } => Ok(PhaseSpec::inversion(&covering_window(n, 2 * n, params)?, *h)),
        }
    }
}

/// |Σ_{N<t≤2N} e(f(t))| against vdc_bound(F, N, k) for every N.
pub fn bound_shape_sweep(family: &SweepFamily, ns: &[u64], k: u32) -> Result<Vec<SweepRow>> {
    ns.iter()
        .map(|&n| {
            let ph = family.phase(n)?;
            let r = direct_sum(&ph, n, 2 * n, None)?;
            let bound = vdc_bound(r.f_scale, n, k);
            Ok(SweepRow { n, h: ph.h, k, f: r.f_scale, abs: r.abs, bound, ratio: r.abs / bound })
        })
        .collect()
}

/// Ratios |f^{(r)}(t)| / (F N^{-r}) for r = 1, 2, 3 over a grid of (N, 2N].
pub fn derivative_bands(window: &Window, n: u64, points: usize) -> Result<Vec<[f64; 3]>> {
    let inv = Inverter::new(window, DEFAULT_TOL, EvalConfig::default())?;
    let ph = PhaseSpec::inversion(window, 1);
    let f = ph.derivative_scale(n, 2 * n)?;
    let nf = n as f64;
    let mut cur = Cursor::default();
    (0..points)
        .map(|i| {
            let t = (n + 1) as f64 + (n - 1) as f64 * i as f64 / (points.max(2) - 1) as f64;
            let y = inv.root(t.round(), &mut cur)?.to_ball(WINDOW_PREC);
            let d = inverse_derivatives(&y, &window.params)?;
            Ok(std::array::from_fn(|r| d[r].mid_f64().abs() * nf.powi(r as i32 + 1) / f))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TypeKind {
    I,
    ILog,
    II,
}

/// Side conditions of the bilinear sums; the defaults are the literal ones.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SideConditions {
    /// Type I needs L ≥ type1 N^{1/2}.
    pub type1: f64,
    /// Type II needs type2_lo ≤ L ≤ type2_hi N^{1/3}.
    pub type2_lo: f64,
    pub type2_hi: f64,
}

impl Default for SideConditions {
    fn default() -> Self {
        Self { type1: 2f64.powi(-10), type2_lo: 8.0, type2_hi: 128.0 }
    }
}

impl SideConditions {
    pub fn check(&self, kind: TypeKind, l: f64, n: f64) -> Result<()> {
        let ok = match kind {
            TypeKind::I | TypeKind::ILog => l >= self.type1 * n.sqrt(),
            TypeKind::II => self.type2_lo <= l && l <= self.type2_hi * n.cbrt(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Range(format!("{kind:?} side condition fails for L = {l}, N = {n}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeSumResult {
    pub kind: TypeKind,
    pub value: Complex64,
    pub abs: f64,
    pub lemma_bound: f64,
    pub ratio: f64,
    pub terms: u64,
}

/// The right-hand exponent of the lemma bound for `kind`.
pub fn lemma_bound(kind: TypeKind, h: i64, n: f64, gamma: f64) -> f64 {
    let h = h.unsigned_abs() as f64;
    match kind {
        TypeKind::I | TypeKind::ILog => h.powf(1.0 / 6.0) * n.powf((2.0 * gamma + 9.0) / 12.0 + EPSILON),
        TypeKind::II => h.powf(0.25) * n.powf((3.0 * gamma + 8.0) / 12.0 + EPSILON),
    }
}

/// Bilinear sum over d in (d_lo, d_hi], l in (l_lo, l_hi] with N < dl ≤ N1 and
/// phase fractions `fr` indexed from N + 1.
#[allow(clippy::too_many_arguments)]
pub fn type_sum_eval(
    kind: TypeKind,
    d_range: (u64, u64),
    l_range: (u64, u64),
    n_range: (u64, u64),
    fr: &[f64],
    a: &dyn Fn(u64) -> f64,
    b: &dyn Fn(u64) -> f64,
    gamma: f64,
    h: i64,
    side: &SideConditions,
) -> Result<TypeSumResult> {
    let (nlo, nhi) = n_range;
    side.check(kind, l_range.0.max(1) as f64, nlo as f64)?;
    if fr.len() as u64 != nhi - nlo {
        return Err(Error::Range("phase table does not match the n range".into()));
    }
    let mut s = ComplexSum::default();
    let mut terms = 0;
    for d in d_range.0 + 1..=d_range.1 {
        let ad = a(d);
        let lmin = (l_range.0 + 1).max(nlo / d + 1);
        let lmax = l_range.1.min(nhi / d);
        let mut inner = ComplexSum::default();
        for l in lmin..=lmax {
            let w = match kind {
                TypeKind::I => 1.0,
                TypeKind::ILog => (l as f64).ln(),
                TypeKind::II => b(l),
            };
            inner.add(e(fr[(d * l - nlo - 1) as usize]) * w);
            terms += 1;
        }
        s.add(inner.value() * ad);
    }
    let value = s.value();
    let bound = FIT_CONSTANT * lemma_bound(kind, h, nlo as f64, gamma);
    Ok(TypeSumResult { kind, value, abs: value.norm(), lemma_bound: bound, ratio: value.norm() / bound, terms })
}
