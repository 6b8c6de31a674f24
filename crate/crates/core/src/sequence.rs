//! Branch windows, the terms of [n^c tan^theta(log n)], and inversion of
//! g(y) = y^c tan^theta(log y).

use std::cmp::Ordering;

use serde::Serialize;

use crate::arith::PrimeRange;
use crate::error::{Error, Result};
use crate::numeric::eval::{reduced_log, tan_log};
use crate::numeric::jet::Jet;
use crate::numeric::{certified_floor, BallScalar, EvalConfig, Evaluator, FBall, Params};
use crate::par;

/// Working precision of window endpoints and inversion anchors.
pub const WINDOW_PREC: usize = 128;

/// Default absolute tolerance of inversion, in y.
pub const DEFAULT_TOL: f64 = 1e-12;

// anchors sit on multiples of this spacing
const ANCHOR_STEP: u64 = 16;
const TERM_CHUNK: u64 = 4096;

/// One window [Δ1, Δ2) on which tan(log n) runs through [1, 2).
#[derive(Clone, Debug)]
pub struct Window {
    pub x: f64,
    pub k: i64,
    pub delta1: BallScalar,
    pub delta2: BallScalar,
    /// g(Δ1) = e^{c(πk + π/4)}.
    pub g_lo: BallScalar,
    /// g(Δ2) = 2^θ e^{c(πk + arctan 2)}.
    pub g_hi: BallScalar,
    pub params: Params,
    first: u64,
    end: u64,
}

fn window_k(x: f64, cap: usize) -> Result<i64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x = {x} is not a positive finite real")));
    }
    let q = |p: usize| -> Result<BallScalar> { BallScalar::from_f64(x, p).ln()?.div(&BallScalar::pi(p)) };
    certified_floor(&q(WINDOW_PREC)?, q, cap)
}

impl Window {
    /// The window for scale `x`, with k = [log x / π].
    pub fn make(x: f64, params: &Params) -> Result<Self> {
        let k = window_k(x, EvalConfig::default().cap)?;
        if k < 1 {
            return Err(Error::Domain(format!("x = {x} is below e^pi")));
        }
        let mut w = Self::from_index(k, params)?;
        w.x = x;
        Ok(w)
    }

    /// The window with branch index `k` directly (`x` is set to e^{πk}).
    pub fn from_index(k: i64, params: &Params) -> Result<Self> {
        if k < 1 {
            return Err(Error::Domain(format!("branch index {k} must be at least 1")));
        }
        let p = WINDOW_PREC;
        let base = BallScalar::pi(p).mul(&BallScalar::from_i64(k, p));
        let l1 = base.add(&BallScalar::pi(p).mul_f64(0.25));
        let l2 = base.add(&BallScalar::from_u64(2, p).atan());
        let delta1 = l1.exp()?;
        let delta2 = l2.exp()?;
        let c = params.c_ball(p);
        let g_lo = l1.mul(&c).exp()?;
        let g_hi = l2
            .mul(&c)
            .add(&BallScalar::from_u64(2, p).ln()?.mul(&params.theta_ball(p)))
            .exp()?;
        let edge = |d: &BallScalar| -> Result<u64> {
            match d.floor_bounds() {
                (a, b) if a == b => Ok(a as u64 + 1),
                (_, b) => Err(Error::FloorUndecidable { straddled: b, cap: p }),
            }
        };
        let first = edge(&delta1)?;
        let end = edge(&delta2)?;
        if end >= 1 << 53 {
            return Err(Error::Domain(format!("window {k} lies beyond 2^53")));
        }
        Ok(Self {
            x: (std::f64::consts::PI * k as f64).exp(),
            k,
            delta1,
            delta2,
            g_lo,
            g_hi,
            params: *params,
            first,
            end,
        })
    }

    /// Windows whose index lies between those of `lo` and `hi`.
    pub fn covering(lo: f64, hi: f64, params: &Params) -> Result<Vec<Self>> {
        let cap = EvalConfig::default().cap;
        let (a, b) = (window_k(lo, cap)?.max(1), window_k(hi, cap)?);
        (a..=b).map(|k| Self::from_index(k, params)).collect()
    }

    /// First integer n ≥ Δ1.
    pub fn first(&self) -> u64 {
        self.first
    }

    /// One past the last integer n < Δ2.
    pub fn end(&self) -> u64 {
        self.end
    }

    pub fn len(&self) -> u64 {
        self.end - self.first
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.first
    }

    pub fn contains(&self, n: u64) -> bool {
        self.first <= n && n < self.end
    }
}

/// Convenience wrapper for [`Window::make`].
pub fn make_window(x: f64, params: &Params) -> Result<Window> {
    Window::make(x, params)
}

/// One sequence element.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermRecord {
    pub n: u64,
    pub f_mid: f64,
    pub f_rad: f64,
    /// Certified floor of f(n); `None` when undecidable at the cap.
    pub floor: Option<i64>,
    /// Integer straddled by the final enclosure when the floor is undecided.
    pub straddled: Option<i64>,
    pub prec: usize,
    /// tan(log n) ∈ [1, 2) was proven.
    pub in_band: bool,
    pub prime: bool,
}

impl TermRecord {
    pub fn flags(&self) -> String {
        let mut s = String::new();
        if self.prime {
            s.push('P');
        }
        if self.floor.is_none() {
            s.push('U');
        }
        if !self.in_band {
            s.push('B');
        }
        s
    }
}

/// Enumerates the terms of one window with a sieve over the range of floors.
pub struct TermEnumerator {
    ev: Evaluator,
    window: Window,
    sieve: PrimeRange,
}

impl TermEnumerator {
    pub fn new(window: &Window, cfg: EvalConfig) -> Result<Self> {
        let lo = window.g_lo.lower_f64().floor().max(0.0) as u64;
        let hi = window.g_hi.upper_f64().ceil() as u64 + 2;
        Ok(Self {
            ev: Evaluator::new(window.params, cfg),
            window: window.clone(),
            sieve: PrimeRange::new(lo, hi)?,
        })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.ev
    }

    pub fn sieve(&self) -> &PrimeRange {
        &self.sieve
    }

    pub fn term(&self, n: u64) -> TermRecord {
        let in_band = self.ev.tan_in_band(n).unwrap_or(false);
        let mut rec = TermRecord {
            n,
            f_mid: f64::NAN,
            f_rad: f64::INFINITY,
            floor: None,
            straddled: None,
            prec: 0,
            in_band,
            prime: false,
        };
        match self.ev.floor_f(n) {
            Ok(o) => {
                rec.f_mid = o.mid;
                rec.f_rad = o.rad;
                rec.prec = o.prec;
                rec.floor = Some(o.floor);
                let m = o.floor as u64;
                rec.prime = o.floor >= 2
                    && if m >= self.sieve.lo && m < self.sieve.hi {
                        self.sieve.is_prime(m)
                    } else {
                        crate::arith::is_prime(m)
                    };
            }
            Err(Error::FloorUndecidable { straddled, cap }) => {
                rec.straddled = Some(straddled);
                rec.prec = cap;
                if let Some(b) = self.ev.eval_f_fast(n) {
                    rec.f_mid = b.mid;
                    rec.f_rad = b.rad;
                }
            }
            Err(_) => {}
        }
        rec
    }

    /// Terms for `lo..hi` (clipped to the window), ascending.
    pub fn range(&self, lo: u64, hi: u64) -> Vec<TermRecord> {
        let lo = lo.max(self.window.first);
        let hi = hi.min(self.window.end);
        let parts = par::map_ordered(par::chunks(lo..hi, TERM_CHUNK), |r| {
            r.map(|n| self.term(n)).collect::<Vec<_>>()
        });
        parts.into_iter().flatten().collect()
    }

    pub fn terms(&self) -> Vec<TermRecord> {
        self.range(self.window.first, self.window.end)
    }
}

/// All terms of the window, ascending in n.
pub fn enumerate_terms(w: &Window, cfg: EvalConfig) -> Result<Vec<TermRecord>> {
    Ok(TermEnumerator::new(w, cfg)?.terms())
}

/// A certified root y = n0 + delta with |y_true - y| ≤ half_width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub n0: u64,
    pub delta: f64,
    pub half_width: f64,
}

impl Root {
    pub fn approx(&self) -> f64 {
        self.n0 as f64 + self.delta
    }

    pub fn to_ball(&self, prec: usize) -> BallScalar {
        let i = BallScalar::from_u64(self.n0, prec);
        i.add(&BallScalar::with_radius(self.delta, self.half_width, prec))
    }

    /// [-y], when the enclosure does not straddle an integer.
    pub fn neg_floor(&self) -> Option<i64> {
        let a = (-self.delta - self.half_width).floor();
        let b = (-self.delta + self.half_width).floor();
        (a == b).then(|| a as i64 - self.n0 as i64)
    }

    /// {-y}, using the midpoint.
    pub fn neg_frac(&self) -> f64 {
        let v = -self.delta;
        v - v.floor()
    }
}

/// Roots of g(y) = t and g(y) = t + 1.
#[derive(Clone, Debug)]
pub struct InversionResult {
    pub t: f64,
    pub m_lo: BallScalar,
    pub m_hi: BallScalar,
    pub tol: f64,
    pub lo: Root,
    pub hi: Root,
}

impl InversionResult {
    /// Number of integers in [m_lo, m_hi) as [-m_lo] - [-m_hi].
    pub fn integer_count(&self) -> Option<i64> {
        Some(self.lo.neg_floor()? - self.hi.neg_floor()?)
    }
}

#[derive(Clone, Debug)]
struct Anchor {
    n0: u64,
    g: BallScalar,
    g_f: FBall,
    a0: FBall,
    s0: FBall,
    c0: FBall,
}

/// Reusable state between consecutive inversions (the last anchor).
#[derive(Clone, Debug, Default)]
pub struct Cursor {
    anchor: Option<Anchor>,
}

/// Root finder for g on one window.
#[derive(Clone, Debug)]
pub struct Inverter {
    window: Window,
    params: Params,
    ev: Evaluator,
    tol: f64,
    log_lo: f64,
    log_hi: f64,
    ln_lo: f64,
    ln_hi: f64,
}

impl Inverter {
    pub fn new(window: &Window, tol: f64, cfg: EvalConfig) -> Result<Self> {
        if !(tol > 0.0) || tol > 1e-3 {
            return Err(Error::Domain(format!("tolerance {tol} outside (0, 1e-3]")));
        }
        let kpi = std::f64::consts::PI * window.k as f64;
        Ok(Self {
            window: window.clone(),
            params: window.params,
            ev: Evaluator::new(window.params, cfg),
            tol,
            log_lo: kpi + 0.05,
            log_hi: kpi + std::f64::consts::FRAC_PI_2 - 0.05,
            ln_lo: window.g_lo.lower_f64().ln(),
            ln_hi: window.g_hi.upper_f64().ln(),
        })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    // f64 Newton on u = log y for phi(u) = c u + theta ln tan(u) - ln t
    fn estimate(&self, t: f64) -> f64 {
        let (c, th) = (self.params.c, self.params.theta);
        let lt = t.ln();
        let frac = ((lt - self.ln_lo) / (self.ln_hi - self.ln_lo)).clamp(0.0, 1.0);
        let kpi = std::f64::consts::PI * self.window.k as f64;
        let mut u = kpi + std::f64::consts::FRAC_PI_4 + frac * (2f64.atan() - std::f64::consts::FRAC_PI_4);
        for _ in 0..60 {
            let tn = (u - kpi).tan();
            let phi = c * u + th * tn.ln() - lt;
            let dphi = c + th * (1.0 + tn * tn) / tn;
            let step = phi / dphi;
            u = (u - step).clamp(self.log_lo, self.log_hi);
            if step.abs() < 1e-15 * u {
                break;
            }
        }
        u.exp()
    }

    fn anchor(&self, n0: u64) -> Result<Anchor> {
        let p = WINDOW_PREC;
        let y = BallScalar::from_u64(n0, p);
        let g = self.ev.g(&y)?;
        let (a, _) = reduced_log(&y)?;
        Ok(Anchor { n0, g_f: g.to_fball(), g, a0: a.to_fball(), s0: a.sin().to_fball(), c0: a.cos().to_fball() })
    }

    // G(d) = g(n0 + d) - t as a hardware ball; `diff` encloses g(n0) - t
    fn local(&self, an: &Anchor, diff: FBall, d: f64) -> Option<FBall> {
        let eps = FBall::exact(d).div(FBall::exact(an.n0 as f64))?.ln_1p()?;
        let (se, ce) = (eps.sin(), eps.cos());
        let cae = an.c0.mul(ce).sub(an.s0.mul(se));
        let r = se.div(cae.mul(an.s0))?;
        let l = eps.scale(self.params.c).add(r.ln_1p()?.scale(self.params.theta));
        Some(diff.add(an.g_f.mul(l.exp_m1())))
    }

    fn slope(&self, an: &Anchor, d: f64) -> f64 {
        let y = an.n0 as f64 + d;
        let eps = (d / an.n0 as f64).ln_1p();
        let tn = (an.a0.mid + eps).tan();
        let gy = an.g_f.mid * (self.params.c * eps).exp() * (tn / an.a0.mid.tan()).powf(self.params.theta);
        gy * (self.params.c + self.params.theta * (1.0 + tn * tn) / tn) / y
    }

    /// Root of g(y) = t, allowed to fall slightly outside the window.
    pub fn root(&self, t: f64, cur: &mut Cursor) -> Result<Root> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Range(format!("target {t} is not a positive real")));
        }
        let est = self.estimate(t);
        let mut n0 = ((est / ANCHOR_STEP as f64).round() as u64).max(1) * ANCHOR_STEP;
        for _ in 0..4 {
            let an = match &cur.anchor {
                Some(a) if a.n0 == n0 => a.clone(),
                _ => {
                    let a = self.anchor(n0)?;
                    cur.anchor = Some(a.clone());
                    a
                }
            };
            let diff = an.g.sub(&BallScalar::from_f64(t, WINDOW_PREC)).to_fball();
            let mut d = est - n0 as f64;
            for _ in 0..40 {
                let Some(v) = self.local(&an, diff, d) else { break };
                let step = v.mid / self.slope(&an, d);
                d -= step;
                if !(step.abs() > 4.0 * f64::EPSILON * d.abs().max(1.0)) {
                    break;
                }
            }
            if !d.is_finite() {
                break;
            }
            if d.abs() > 2.0 * ANCHOR_STEP as f64 {
                n0 = (((n0 as f64 + d) / ANCHOR_STEP as f64).round() as u64).max(1) * ANCHOR_STEP;
                continue;
            }
            let h = self.tol / 2.0;
            let below = self.local(&an, diff, d - h).and_then(|v| v.cmp_f64(0.0));
            let above = self.local(&an, diff, d + h).and_then(|v| v.cmp_f64(0.0));
            if below == Some(Ordering::Less) && above == Some(Ordering::Greater) {
                return Ok(Root { n0, delta: d, half_width: h });
            }
            return self.bisect(t, n0, d);
        }
        self.bisect(t, n0, est - n0 as f64)
    }

    // sign of g(n0 + d) - t, escalating precision; None once the cap is passed
    fn sign_at(&self, t: f64, n0: u64, d: f64) -> Result<Option<Ordering>> {
        let mut prec = WINDOW_PREC;
        while prec <= self.ev.cfg.cap {
            let y = BallScalar::from_u64(n0, prec).add(&BallScalar::from_f64(d, prec));
            let v = self.ev.g(&y)?.sub(&BallScalar::from_f64(t, prec));
            if let Some(o) = v.cmp_f64(0.0) {
                return Ok(Some(o));
            }
            prec *= 2;
        }
        Ok(None)
    }

    /// Certified bisection on balls with precision escalation.
    fn bisect(&self, t: f64, n0: u64, guess: f64) -> Result<Root> {
        let fail = |why: &str| Error::NoConvergence(format!("target {t}: {why}"));
        let mut w = 1e-6f64.max(1e3 * self.tol);
        let (mut lo, mut hi);
        loop {
            lo = guess - w;
            hi = guess + w;
            let sl = self.sign_at(t, n0, lo)?;
            let sh = self.sign_at(t, n0, hi)?;
            if sl == Some(Ordering::Less) && sh == Some(Ordering::Greater) {
                break;
            }
            w *= 16.0;
            if w > 4.0 * ANCHOR_STEP as f64 {
                return Err(fail("no certified sign change near the estimate"));
            }
        }
        while hi - lo > self.tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Err(fail("tolerance below the offset resolution"));
            }
            match self.sign_at(t, n0, mid)? {
                Some(Ordering::Less) => lo = mid,
                Some(_) => hi = mid,
                None => return Err(fail("sign undecidable at the precision cap")),
            }
        }
        Ok(Root { n0, delta: 0.5 * (lo + hi), half_width: 0.5 * (hi - lo) })
    }

    /// [m'_t, m''_t] for a target with both roots in the window.
    pub fn invert(&self, t: f64, cur: &mut Cursor) -> Result<InversionResult> {
        let slack = 1e-9 * t.abs();
        let lo_ok = self.window.g_lo.cmp_f64(t + slack) != Some(Ordering::Greater);
        let hi_ok = self.window.g_hi.cmp_f64(t + 1.0 - slack) != Some(Ordering::Less);
        if !lo_ok || !hi_ok {
            return Err(Error::Range(format!(
                "target {t} outside [g(Δ1), g(Δ2) - 1] = [{:.6}, {:.6}]",
                self.window.g_lo.mid_f64(),
                self.window.g_hi.mid_f64() - 1.0
            )));
        }
        self.invert_unchecked(t, cur)
    }

    /// As [`invert`](Self::invert) without the window range check.
    pub fn invert_unchecked(&self, t: f64, cur: &mut Cursor) -> Result<InversionResult> {
        let lo = self.root(t, cur)?;
        let hi = self.root(t + 1.0, cur)?;
        Ok(InversionResult {
            t,
            m_lo: lo.to_ball(WINDOW_PREC),
            m_hi: hi.to_ball(WINDOW_PREC),
            tol: self.tol,
            lo,
            hi,
        })
    }
}

/// One-shot inversion on the window `w`.
pub fn invert(t: f64, w: &Window, tol: f64) -> Result<InversionResult> {
    Inverter::new(w, tol, EvalConfig::default())?.invert(t, &mut Cursor::default())
}

fn check_band(y: &BallScalar) -> Result<BallScalar> {
    let t = tan_log(y)?;
    let inside = t.cmp_f64(1.0 - 1e-6) == Some(Ordering::Greater) && t.cmp_f64(2.0 + 1e-6) == Some(Ordering::Less);
    if !inside {
        return Err(Error::Domain(format!("y = {:.6} is outside every branch window", y.mid_f64())));
    }
    Ok(t)
}

/// y' = y^{1-c} / ((c tan + θ sec²) tan^{θ-1}) at log y.
pub fn dy_dt(y: &BallScalar, params: &Params) -> Result<BallScalar> {
    let prec = y.prec();
    let t = check_band(y)?;
    let c = params.c_ball(prec);
    let th = params.theta_ball(prec);
    let one = BallScalar::from_u64(1, prec);
    let sec2 = one.add(&t.sqr());
    let den = c.mul(&t).add(&th.mul(&sec2)).mul(&t.powf(&th.sub(&one))?);
    y.powf(&one.sub(&c))?.div(&den)
}

/// Jet of g at y (value and first three y-derivatives).
pub fn g_jet(y: &BallScalar, params: &Params) -> Result<Jet> {
    let prec = y.prec();
    let l = Jet::variable(y.clone()).ln()?;
    let (_, k) = reduced_log(y)?;
    let kpi = BallScalar::pi(prec).mul(&BallScalar::from_i64(k, prec)).neg();
    let (s, c) = l.shift(&kpi).sin_cos();
    let tn = s.div(&c)?;
    l.scale(&params.c_ball(prec)).add(&tn.ln()?.scale(&params.theta_ball(prec))).exp()
}

/// (y', y'', y''') of the inverse function t ↦ y at the point y.
pub fn inverse_derivatives(y: &BallScalar, params: &Params) -> Result<[BallScalar; 3]> {
    check_band(y)?;
    let j = g_jet(y, params)?;
    let (g1, g2, g3) = (j.derivative(1), j.derivative(2), j.derivative(3));
    let g1_3 = g1.sqr().mul(&g1);
    let g1_5 = g1_3.mul(&g1.sqr());
    let d1 = BallScalar::from_u64(1, y.prec()).div(&g1)?;
    let d2 = g2.neg().div(&g1_3)?;
    let d3 = g2.sqr().mul_f64(3.0).sub(&g1.mul(&g3)).div(&g1_5)?;
    Ok([d1, d2, d3])
}
