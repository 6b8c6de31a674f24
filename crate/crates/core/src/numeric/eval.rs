//! Certified evaluation of f(n) = n^c tan^theta(log n) and floor extraction.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{BallScalar, FBall, Params};

/// Precision ladder used for escalation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub start_prec: usize,
    pub cap: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { start_prec: 64, cap: 4096 }
    }
}

/// Precision reported for results settled by the f64 tier.
pub const HARDWARE_PREC: usize = 53;

/// A settled floor together with the enclosure that proved it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloorOutcome {
    pub floor: i64,
    pub mid: f64,
    pub rad: f64,
    pub prec: usize,
}

/// `log y - k pi` and `k`, with `k = floor(log y / pi)` taken from the midpoint.
pub fn reduced_log(y: &BallScalar) -> Result<(BallScalar, i64)> {
    let l = y.ln()?;
    let k = (l.mid_f64() / std::f64::consts::PI).floor() as i64;
    let a = l.sub(&BallScalar::pi(y.prec()).mul(&BallScalar::from_i64(k, y.prec())));
    Ok((a, k))
}

/// tan(log y) as sin/cos of the reduced angle.
pub fn tan_log(y: &BallScalar) -> Result<BallScalar> {
    let (a, _) = reduced_log(y)?;
    a.sin().div(&a.cos())
}

/// Hardware-precision counterpart of [`reduced_log`].
pub fn reduced_log_fast(y: f64) -> Option<(FBall, i64)> {
    let l = FBall::exact(y).ln()?;
    let k = (l.mid / std::f64::consts::PI).floor() as i64;
    Some((l.sub(FBall::pi().scale(k as f64)), k))
}

pub fn tan_log_fast(y: f64) -> Option<FBall> {
    let (a, _) = reduced_log_fast(y)?;
    a.sin().div(a.cos())
}

/// Evaluator for the sequence map with a fixed parameter set and ladder.
#[derive(Clone, Copy, Debug)]
pub struct Evaluator {
    pub params: Params,
    pub cfg: EvalConfig,
}

impl Evaluator {
    pub fn new(params: Params, cfg: EvalConfig) -> Self {
        Self { params, cfg }
    }

    fn check_prec(&self, prec: usize) -> Result<()> {
        if prec > self.cfg.cap {
            Err(Error::PrecisionExhausted { requested: prec, cap: self.cfg.cap })
        } else {
            Ok(())
        }
    }

    /// g(y) = y^c tan^theta(log y) for a real ball argument.
    pub fn g(&self, y: &BallScalar) -> Result<BallScalar> {
        self.check_prec(y.prec())?;
        let prec = y.prec();
        let t = tan_log(y)?;
        if !t.is_positive() {
            return Err(Error::Domain(format!(
                "tan(log y) enclosure {t:?} touches (-inf, 0]"
            )));
        }
        let c = self.params.c_ball(prec);
        if self.params.theta == 1.0 {
            return Ok(y.powf(&c)?.mul(&t));
        }
        let th = self.params.theta_ball(prec);
        y.ln()?.mul(&c).add(&t.ln()?.mul(&th)).exp()
    }

    /// Enclosure of f(n) at `prec` bits.
    pub fn eval_f(&self, n: u64, prec: usize) -> Result<BallScalar> {
        if n < 2 {
            return Err(Error::Domain(format!("n = {n} must be at least 2")));
        }
        self.g(&BallScalar::from_u64(n, prec))
    }

    /// Alternative route n^c * (tan(log n))^theta with two separate powers.
    pub fn eval_f_split(&self, n: u64, prec: usize) -> Result<BallScalar> {
        self.check_prec(prec)?;
        let y = BallScalar::from_u64(n, prec);
        let t = tan_log(&y)?;
        if !t.is_positive() {
            return Err(Error::Domain("tan(log n) not positive".into()));
        }
        let yc = y.powf(&self.params.c_ball(prec))?;
        let tt = t.powf(&self.params.theta_ball(prec))?;
        Ok(yc.mul(&tt))
    }

    /// f(n) in hardware precision; `None` when the tan enclosure is not positive.
    pub fn eval_f_fast(&self, n: u64) -> Option<FBall> {
        if n < 2 || n >= (1u64 << 53) {
            return None;
        }
        let (a, _) = reduced_log_fast(n as f64)?;
        let t = a.sin().div(a.cos())?;
        if !(t.lo() > 0.0) {
            return None;
        }
        let ln_n = FBall::exact(n as f64).ln()?;
        if self.params.theta == 1.0 {
            return Some(ln_n.scale(self.params.c).exp().mul(t));
        }
        let e = ln_n.scale(self.params.c).add(t.ln()?.scale(self.params.theta));
        Some(e.exp())
    }

    /// Certified floor of f(n): hardware tier first, then the precision ladder.
    pub fn floor_f(&self, n: u64) -> Result<FloorOutcome> {
        if let Some(b) = self.eval_f_fast(n) {
            let (lo, hi) = (b.lo().floor(), b.hi().floor());
            if lo == hi {
                return Ok(FloorOutcome { floor: lo as i64, mid: b.mid, rad: b.rad, prec: HARDWARE_PREC });
            }
        }
        let first = self.eval_f(n, self.cfg.start_prec)?;
        let mut last = first.clone();
        let m = certified_floor(
            &first,
            |p| {
                let v = self.eval_f(n, p)?;
                last = v.clone();
                Ok(v)
            },
            self.cfg.cap,
        )?;
        Ok(FloorOutcome { floor: m, mid: last.mid_f64(), rad: last.rad_f64(), prec: last.prec() })
    }

    /// Certified position of tan(log n) relative to [1, 2): `Some(true)` inside,
    /// `Some(false)` outside, escalating to the cap before giving up.
    pub fn tan_in_band(&self, n: u64) -> Result<bool> {
        if let Some(t) = tan_log_fast(n as f64) {
            if let Some(v) = band_decision(t.cmp_f64(1.0), t.cmp_f64(2.0)) {
                return Ok(v);
            }
        }
        let mut prec = self.cfg.start_prec;
        while prec <= self.cfg.cap {
            let t = tan_log(&BallScalar::from_u64(n, prec))?;
            if let Some(v) = band_decision(t.cmp_f64(1.0), t.cmp_f64(2.0)) {
                return Ok(v);
            }
            prec *= 2;
        }
        Err(Error::PrecisionExhausted { requested: prec, cap: self.cfg.cap })
    }
}

// tan >= 1 needs "not below 1"; a ball touching 1 from above is undecided.
fn band_decision(vs1: Option<Ordering>, vs2: Option<Ordering>) -> Option<bool> {
    match (vs1, vs2) {
        (Some(Ordering::Less), _) => Some(false),
        (_, Some(Ordering::Greater)) => Some(false),
        (Some(Ordering::Greater), Some(Ordering::Less)) => Some(true),
        _ => None,
    }
}

/// Floor of a value known through escalating enclosures.
///
/// Starting from `v`, the precision doubles through `escalate` until both
/// endpoints share a floor or the next step would pass `cap`.
pub fn certified_floor<F>(v: &BallScalar, mut escalate: F, cap: usize) -> Result<i64>
where
    F: FnMut(usize) -> Result<BallScalar>,
{
    let mut cur = v.clone();
    loop {
        let (a, b) = cur.floor_bounds();
        if a == b {
            return Ok(a);
        }
        let next = cur.prec() * 2;
        if next > cap {
            return Err(Error::FloorUndecidable { straddled: b, cap });
        }
        cur = escalate(next)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(c: f64, th: f64) -> Evaluator {
        Evaluator::new(Params::exploratory(c, th).unwrap(), EvalConfig::default())
    }

    #[test]
    fn floor_of_clear_ball() {
        let b = BallScalar::with_radius(3.25, 0.05, 64);
        let m = certified_floor(&b, |_| unreachable!(), 4096).unwrap();
        assert_eq!(m, 3);
    }

    #[test]
    fn floor_escalates_until_resolved() {
        let b = BallScalar::with_radius(5.0, 0.001, 64);
        let mut calls = 0;
        let m = certified_floor(
            &b,
            |p| {
                calls += 1;
                Ok(BallScalar::with_radius(4.99999, 1e-9, p))
            },
            4096,
        )
        .unwrap();
        assert_eq!(m, 4);
        assert_eq!(calls, 1);
    }

    #[test]
    fn ball_around_integer_is_undecidable() {
        let b = BallScalar::with_radius(7.0, 1e-3, 64);
        let err = certified_floor(&b, |p| Ok(BallScalar::with_radius(7.0, 2f64.powi(-(p as i32) / 8), p)), 4096)
            .unwrap_err();
        assert_eq!(err, Error::FloorUndecidable { straddled: 7, cap: 4096 });
    }

    #[test]
    fn synthetic_integer_neighbourhoods_resolve_per_side() {
        for k in [3i64, 100, 9_999_991] {
            for side in [-1.0, 1.0] {
                let b = BallScalar::with_radius(k as f64, 0.5, 64);
                let m = certified_floor(
                    &b,
                    |p| {
                        let off = 2f64.powi(-((p / 16) as i32));
                        Ok(BallScalar::with_radius(k as f64 + side * off, off / 4.0, p))
                    },
                    4096,
                )
                .unwrap();
                assert_eq!(m, if side < 0.0 { k - 1 } else { k });
            }
        }
    }

    #[test]
    fn eval_f_widths_shrink_and_nest() {
        let e = ev(1.05, 2.0);
        let lo = e.eval_f(1175, 64).unwrap();
        let hi = e.eval_f(1175, 256).unwrap();
        assert!(hi.rad_f64() < 1e-60);
        assert!(lo.rad_f64() < 1e-12);
        assert!(hi.is_within(&lo));
        let mid = e.eval_f(1175, 128).unwrap();
        assert!(mid.rad_f64() < 1e-20);
    }

    #[test]
    fn theta_one_matches_split_route() {
        let e = ev(1.05, 1.0);
        for n in [1175u64, 1300, 1619] {
            let a = e.eval_f(n, 192).unwrap();
            let b = e.eval_f_split(n, 192).unwrap();
            assert!(a.cmp_ball(&b).is_none());
            assert!(a.sub(&b).upper_f64().abs() < 1e-40);
        }
    }

    #[test]
    fn near_left_edge_tan_is_one() {
        // round(e^{2 pi + pi/4}) = 1174
        let e = ev(1.05, 2.0);
        let t = tan_log(&BallScalar::from_u64(1174, 128)).unwrap();
        assert!((t.mid_f64() - 1.0).abs() < 1e-3);
        let f = e.eval_f(1174, 128).unwrap();
        let nc = BallScalar::from_u64(1174, 128).powf(&BallScalar::from_f64(1.05, 128)).unwrap();
        let ratio = f.div(&nc).unwrap().mid_f64();
        assert!((ratio - 1.0).abs() < 2e-3);
    }

    #[test]
    fn non_positive_tangent_is_a_domain_error() {
        let e = ev(1.05, 2.0);
        // log 30 = 3.40, reduced angle 0.26 > 0 but log 20 = 2.996 lies in (pi/2, pi)
        assert!(matches!(e.eval_f(20, 64), Err(Error::Domain(_))));
        assert!(e.eval_f_fast(20).is_none());
    }

    #[test]
    fn precision_cap_is_enforced() {
        let e = Evaluator::new(Params::new(1.05, 2.0).unwrap(), EvalConfig { start_prec: 64, cap: 128 });
        assert_eq!(
            e.eval_f(1175, 256).unwrap_err(),
            Error::PrecisionExhausted { requested: 256, cap: 128 }
        );
    }

    #[test]
    fn fast_tier_agrees_with_ball() {
        let e = ev(1.05, 2.0);
        for n in (1175u64..1620).step_by(37) {
            let f = e.eval_f_fast(n).unwrap();
            let b = e.eval_f(n, 128).unwrap();
            assert!(f.contains(b.mid_f64()), "n = {n}");
            assert!(f.rad < 1e-9);
        }
    }
}
