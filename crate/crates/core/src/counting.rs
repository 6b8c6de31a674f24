//! S_c(x), its split into Γ + Σ, and the classic π_c(x).

use std::cmp::Ordering;

use serde::Serialize;

use crate::arith::PrimeRange;
use crate::error::{Error, Result};
use crate::numeric::{certified_floor, BallScalar, EvalConfig, FBall, Params};
use crate::par::{self, KahanSum};
use crate::sequence::{Cursor, Inverter, TermEnumerator, Window};

const PRIME_CHUNK: usize = 2048;
const PI_C_CHUNK: u64 = 1 << 16;

/// Counts for one window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountReport {
    pub x: f64,
    pub k: i64,
    pub delta1: f64,
    pub delta2: f64,
    pub s_c: u64,
    pub undecided: u64,
    pub gamma_sum: f64,
    pub sigma_sum: f64,
    pub residual: f64,
    pub density_ratio: f64,
    /// Integers of the window inside some [m'_p, m''_p), counted prime by prime.
    pub route_count: u64,
    /// Primes p with g(Δ1) - 1 < p < g(Δ2).
    pub primes_in_range: u64,
    /// Primes whose interval [m'_p, m''_p) sticks out of the window.
    pub edge_primes: u64,
    /// Inversions whose root could not be separated from an integer.
    pub inversion_undecided: u64,
    /// Window integers for which tan(log n) ∈ [1, 2) could not be proven.
    pub band_violations: u64,
}

#[derive(Default)]
struct Partial {
    gamma: KahanSum,
    sigma: KahanSum,
    route: u64,
    edge: u64,
    undecided: u64,
}

/// Integer range of primes p with lo - 1 < p < hi, from enclosures of lo and hi.
/// The flag reports that one of the bounds sat within its radius of an integer.
fn prime_bounds(lo: &BallScalar, hi: &BallScalar) -> (u64, u64, bool) {
    let one = BallScalar::from_u64(1, lo.prec());
    let (a0, a1) = lo.sub(&one).floor_bounds();
    let (b0, b1) = hi.floor_bounds();
    let ambiguous = a0 != a1 || b0 != b1;
    // p > lo - 1 means p ≥ [lo - 1] + 1; p < hi means p ≤ [hi] (hi is never integral)
    (a1.max(0) as u64 + 1, b0.max(0) as u64 + 1, ambiguous)
}

/// S_c(x) by direct enumeration, and Γ, Σ through the inversion route.
pub fn count_sc(x: f64, params: &Params, cfg: EvalConfig, tol: f64) -> Result<CountReport> {
    let w = Window::make(x, params)?;
    count_window(&w, cfg, tol)
}

pub fn count_window(w: &Window, cfg: EvalConfig, tol: f64) -> Result<CountReport> {
    let terms = TermEnumerator::new(w, cfg)?;
    let recs = terms.terms();
    let s_c = recs.iter().filter(|r| r.prime).count() as u64;
    let undecided = recs.iter().filter(|r| r.floor.is_none()).count() as u64;
    let band_violations = recs.iter().filter(|r| !r.in_band).count() as u64;

    let (plo, phi, ambiguous) = prime_bounds(&w.g_lo, &w.g_hi);
    let primes: Vec<u64> = if plo < phi { PrimeRange::new(plo, phi)?.primes().collect() } else { Vec::new() };
    let inv = Inverter::new(w, tol, cfg)?;
    let (first, end) = (w.first() as i64, w.end() as i64);

    let parts = par::map_ordered(primes.chunks(PRIME_CHUNK).collect::<Vec<_>>(), |chunk| -> Result<Partial> {
        let mut cur = Cursor::default();
        let mut acc = Partial::default();
        for &p in chunk {
            let r = inv.invert_unchecked(p as f64, &mut cur)?;
            let (a, b) = (r.lo, r.hi);
            acc.gamma.add((b.n0 as f64 - a.n0 as f64) + (b.delta - a.delta));
            acc.sigma.add(b.neg_frac() - a.neg_frac());
            match (a.neg_floor(), b.neg_floor()) {
                (Some(fa), Some(fb)) => {
                    // ceil(m) = -[-m]; integers of [m', m'') inside [first, end)
                    let (ca, cb) = (-fa, -fb);
                    if ca < first || cb > end {
                        acc.edge += 1;
                    }
                    acc.route += (cb.min(end) - ca.max(first)).max(0) as u64;
                }
                _ => acc.undecided += 1,
            }
        }
        Ok(acc)
    });
    let mut gamma = KahanSum::default();
    let mut sigma = KahanSum::default();
    let (mut route, mut edge, mut inv_undecided) = (0, 0, 0);
    for part in parts {
        let part = part?;
        gamma.add(part.gamma.value());
        sigma.add(part.sigma.value());
        route += part.route;
        edge += part.edge;
        inv_undecided += part.undecided;
    }
    let (gs, ss) = (gamma.value(), sigma.value());
    Ok(CountReport {
        x: w.x,
        k: w.k,
        delta1: w.delta1.mid_f64(),
        delta2: w.delta2.mid_f64(),
        s_c,
        undecided,
        gamma_sum: gs,
        sigma_sum: ss,
        residual: s_c as f64 - gs - ss,
        density_ratio: s_c as f64 * w.x.ln() / w.x,
        route_count: route,
        primes_in_range: primes.len() as u64,
        edge_primes: edge + ambiguous as u64,
        inversion_undecided: inv_undecided,
        band_violations,
    })
}

/// One report per x; failures are kept in place and do not stop the series.
pub fn density_series(params: &Params, xs: &[f64], cfg: EvalConfig, tol: f64) -> Vec<Result<CountReport>> {
    xs.iter().map(|&x| count_sc(x, params, cfg, tol)).collect()
}

/// Result of counting n ≤ x with [n^c] prime.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiCReport {
    pub x: f64,
    pub c: f64,
    pub pi_c: u64,
    pub undecided: u64,
    /// π_c(x) c log x / x.
    pub ratio: f64,
}

/// Certified [n^c].
pub fn floor_pow(n: u64, c: f64, cfg: EvalConfig) -> Result<i64> {
    if n <= 1 {
        return Ok(n as i64);
    }
    if n < (1 << 53) {
        if let Some(l) = FBall::exact(n as f64).ln() {
            let v = l.scale(c).exp();
            let (a, b) = (v.lo().floor(), v.hi().floor());
            if a == b {
                return Ok(a as i64);
            }
        }
    }
    let at = |p: usize| -> Result<BallScalar> {
        if p > cfg.cap {
            return Err(Error::PrecisionExhausted { requested: p, cap: cfg.cap });
        }
        BallScalar::from_u64(n, p).powf(&BallScalar::from_f64(c, p))
    };
    certified_floor(&at(cfg.start_prec)?, at, cfg.cap)
}

/// π_c(x) = #{n ≤ x : [n^c] is prime}.
pub fn count_pi_c(x: f64, c: f64, cfg: EvalConfig) -> Result<PiCReport> {
    if !(c > 1.0 && c < 2.0) {
        return Err(Error::InvalidParams(format!("c = {c} outside (1, 2)")));
    }
    if !(x >= 2.0) || x >= 2f64.powi(40) {
        return Err(Error::Domain(format!("x = {x} outside [2, 2^40)")));
    }
    let nmax = x.floor() as u64;
    let top = (floor_pow(nmax, c, cfg).unwrap_or(0).max(0) as u64).max((nmax as f64).powf(c).ceil() as u64) + 2;
    let sieve = PrimeRange::new(0, top)?;
    let parts = par::map_ordered(par::chunks(1..nmax + 1, PI_C_CHUNK), |r| {
        let (mut hits, mut und) = (0u64, 0u64);
        for n in r {
            match floor_pow(n, c, cfg) {
                Ok(m) if m >= 2 && sieve.is_prime(m as u64) => hits += 1,
                Ok(_) => {}
                Err(_) => und += 1,
            }
        }
        (hits, und)
    });
    let (pi_c, undecided) = parts.into_iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(PiCReport { x, c, pi_c, undecided, ratio: pi_c as f64 * c * x.ln() / x })
}

/// Ratio Γ / Σ_p p^{γ-1} over the primes of the report's range.
pub fn gamma_weight_ratio(r: &CountReport, w: &Window) -> Result<f64> {
    let (plo, phi, _) = prime_bounds(&w.g_lo, &w.g_hi);
    let g1 = w.params.gamma() - 1.0;
    let s: KahanSum = PrimeRange::new(plo, phi)?.primes().map(|p| (p as f64).powf(g1)).collect();
    match s.value().partial_cmp(&0.0) {
        Some(Ordering::Greater) => Ok(r.gamma_sum / s.value()),
        _ => Err(Error::Range("empty prime range".into())),
    }
}
