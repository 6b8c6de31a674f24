//! Midpoint-radius balls over arbitrary-precision binary floats.
//!
//! The midpoint carries `prec` bits and is rounded to nearest; the radius is a
//! 64-bit float that is only ever rounded upward. Every operation returns a ball
//! that contains the exact result for every choice of operands inside the input
//! balls. Elementary functions of `astro-float` are charged two ulps of the
//! result on top of the propagated radius.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode, Sign, WORD_BIT_SIZE};

use crate::error::{Error, Result};
use crate::numeric::fball::FBall;

const RAD_PREC: usize = 64;
const RN: RoundingMode = RoundingMode::ToEven;
const UP: RoundingMode = RoundingMode::Up;
const DOWN: RoundingMode = RoundingMode::Down;

/// Smallest working precision accepted by the ball constructors.
pub const MIN_PREC: usize = 64;

thread_local! {
    // Memo of pi/e/ln2 expansions; read-mostly and private to the thread.
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Nearest-ish f64 of a big float (error below two f64 ulps).
pub(crate) fn big_to_f64(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, e, _)) = v.as_raw_parts() else {
        return f64::NAN;
    };
    let len = words.len();
    let take = (128 / WORD_BIT_SIZE).max(1).min(len);
    let mut acc = 0.0f64;
    for i in 0..take {
        let w = words[len - 1 - i] as f64;
        acc += w * pow2(-((WORD_BIT_SIZE * (i + 1)) as i32));
    }
    let out = if e < -1070 {
        0.0
    } else if e > 1030 {
        f64::INFINITY
    } else {
        scale2(acc, e)
    };
    match sign {
        Sign::Neg => -out,
        Sign::Pos => out,
    }
}

fn pow2(e: i32) -> f64 {
    scale2(1.0, e)
}

// acc * 2^e without intermediate overflow/underflow for |e| up to ~2100.
fn scale2(acc: f64, e: i32) -> f64 {
    let mut v = acc;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e)
}

/// Upper bound of a nonnegative big float as an f64.
fn big_to_f64_up(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let x = big_to_f64(v).abs();
    let x = x * (1.0 + 4.0 * f64::EPSILON);
    x.next_up()
}

fn big_exp(v: &BigFloat) -> i32 {
    v.exponent().unwrap_or(0)
}

/// 2^k as a big float.
fn big_pow2(k: i32) -> BigFloat {
    let mut one = BigFloat::from_u64(1, RAD_PREC);
    // 1 = 0.1b * 2^1
    one.set_exponent(k + 1);
    one
}

/// Upper bound for one ulp of `v` at precision `prec`, times `units`.
fn ulps(v: &BigFloat, prec: usize, units: u64) -> BigFloat {
    if v.is_zero() {
        return BigFloat::from_u64(0, RAD_PREC);
    }
    let e = big_exp(v) - prec as i32;
    big_pow2(e).mul(&BigFloat::from_u64(units, RAD_PREC), RAD_PREC, UP)
}

fn rad_add(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.add(b, RAD_PREC, UP)
}

fn rad_mul(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.mul(b, RAD_PREC, UP)
}

fn abs_up(v: &BigFloat) -> BigFloat {
    let mut a = v.abs();
    a.set_precision(RAD_PREC, UP).expect("precision change");
    a
}

fn abs_down(v: &BigFloat) -> BigFloat {
    let mut a = v.abs();
    a.set_precision(RAD_PREC, DOWN).expect("precision change");
    a
}

// e^r - 1 <= r (1 + r) for 0 <= r <= 1.
fn expm1_up(r: &BigFloat) -> BigFloat {
    let one = BigFloat::from_u64(1, RAD_PREC);
    if r.cmp(&one).unwrap_or(1) <= 0 {
        rad_mul(r, &rad_add(&one, r))
    } else {
        let e = with_consts(|cc| r.exp(RAD_PREC, UP, cc));
        let e = rad_mul(&e, &BigFloat::from_f64(1.0 + 1e-15, RAD_PREC));
        e.sub(&one, RAD_PREC, UP)
    }
}

/// Extended-precision ball `mid ± rad`.
#[derive(Clone)]
pub struct BallScalar {
    mid: BigFloat,
    rad: BigFloat,
    prec: usize,
}

impl fmt::Debug for BallScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e} +/- {:e}] ({} bits)", self.mid_f64(), self.rad_f64(), self.prec)
    }
}

impl BallScalar {
    fn raw(mid: BigFloat, rad: BigFloat, prec: usize) -> Self {
        Self { mid, rad, prec }
    }

    fn check(self) -> Result<Self> {
        if self.mid.is_nan() || self.rad.is_nan() || self.mid.is_inf() || self.rad.is_inf() {
            return Err(Error::Domain("non-finite ball".into()));
        }
        Ok(self)
    }

    /// Exact ball around an f64 value.
    pub fn from_f64(v: f64, prec: usize) -> Self {
        Self::raw(BigFloat::from_f64(v, prec), BigFloat::from_u64(0, RAD_PREC), prec)
    }

    pub fn from_u64(v: u64, prec: usize) -> Self {
        Self::raw(BigFloat::from_u64(v, prec), BigFloat::from_u64(0, RAD_PREC), prec)
    }

    pub fn from_i64(v: i64, prec: usize) -> Self {
        Self::raw(BigFloat::from_i64(v, prec), BigFloat::from_u64(0, RAD_PREC), prec)
    }

    /// Ball with an explicit f64 midpoint and radius (radius kept as an upper bound).
    pub fn with_radius(mid: f64, rad: f64, prec: usize) -> Self {
        assert!(rad >= 0.0, "radius must be nonnegative");
        Self::raw(BigFloat::from_f64(mid, prec), BigFloat::from_f64(rad, RAD_PREC), prec)
    }

    /// `int + frac` evaluated exactly (as long as it fits in `prec`).
    pub fn from_offset(int: u64, frac: f64, rad: f64, prec: usize) -> Self {
        let i = BigFloat::from_u64(int, prec);
        let f = BigFloat::from_f64(frac, prec);
        let mid = i.add(&f, prec, RN);
        let r = rad_add(&BigFloat::from_f64(rad, RAD_PREC), &ulps(&mid, prec, 1));
        Self::raw(mid, r, prec)
    }

    pub fn pi(prec: usize) -> Self {
        let mid = with_consts(|cc| cc.pi(prec, RN));
        let rad = ulps(&mid, prec, 1);
        Self::raw(mid, rad, prec)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn mid(&self) -> &BigFloat {
        &self.mid
    }

    pub fn rad(&self) -> &BigFloat {
        &self.rad
    }

    pub fn mid_f64(&self) -> f64 {
        big_to_f64(&self.mid)
    }

    /// Radius rounded up to f64 (never below the true radius).
    pub fn rad_f64(&self) -> f64 {
        let r = big_to_f64_up(&self.rad);
        if r == 0.0 && !self.rad.is_zero() {
            f64::from_bits(1)
        } else {
            r
        }
    }

    /// Enclosure as a hardware-precision ball.
    pub fn to_fball(&self) -> FBall {
        let m = self.mid_f64();
        let conv = m.abs() * 2.0 * f64::EPSILON;
        FBall::new(m, (self.rad_f64() + conv).next_up())
    }

    /// Lower endpoint, rounded down.
    pub fn lower(&self) -> BigFloat {
        self.mid.sub(&self.rad, self.prec, DOWN)
    }

    /// Upper endpoint, rounded up.
    pub fn upper(&self) -> BigFloat {
        self.mid.add(&self.rad, self.prec, UP)
    }

    pub fn lower_f64(&self) -> f64 {
        let v = big_to_f64(&self.lower());
        (v - v.abs() * 4.0 * f64::EPSILON).next_down()
    }

    pub fn upper_f64(&self) -> f64 {
        let v = big_to_f64(&self.upper());
        (v + v.abs() * 4.0 * f64::EPSILON).next_up()
    }

    /// Certified comparison with an exact f64: `Some(Less)` when the whole ball
    /// lies below `v`, `Some(Greater)` when above, `None` when it touches `v`.
    pub fn cmp_f64(&self, v: f64) -> Option<Ordering> {
        let b = BigFloat::from_f64(v, self.prec.max(MIN_PREC));
        self.cmp_big(&b)
    }

    fn cmp_big(&self, b: &BigFloat) -> Option<Ordering> {
        if self.upper().cmp(b).map(|c| c < 0).unwrap_or(false) {
            Some(Ordering::Less)
        } else if self.lower().cmp(b).map(|c| c > 0).unwrap_or(false) {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// Certified comparison of two balls.
    pub fn cmp_ball(&self, other: &BallScalar) -> Option<Ordering> {
        if self.upper().cmp(&other.lower()).map(|c| c < 0).unwrap_or(false) {
            Some(Ordering::Less)
        } else if self.lower().cmp(&other.upper()).map(|c| c > 0).unwrap_or(false) {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// True when the ball lies strictly above zero.
    pub fn is_positive(&self) -> bool {
        self.cmp_f64(0.0) == Some(Ordering::Greater)
    }

    /// True when `self` is contained in `other`.
    pub fn is_within(&self, other: &BallScalar) -> bool {
        let lo_ok = self.lower().cmp(&other.lower()).map(|c| c >= 0).unwrap_or(false);
        let hi_ok = self.upper().cmp(&other.upper()).map(|c| c <= 0).unwrap_or(false);
        lo_ok && hi_ok
    }

    /// Floors of the two endpoints.
    pub fn floor_bounds(&self) -> (i64, i64) {
        (floor_i64(&self.lower()), floor_i64(&self.upper()))
    }

    /// Widen the radius by `extra` (absolute).
    pub fn inflate(&self, extra: f64) -> Self {
        let r = rad_add(&self.rad, &BigFloat::from_f64(extra.abs(), RAD_PREC));
        Self::raw(self.mid.clone(), r, self.prec)
    }

    pub fn neg(&self) -> Self {
        Self::raw(self.mid.neg(), self.rad.clone(), self.prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec.max(o.prec);
        let mid = self.mid.add(&o.mid, p, RN);
        let rad = rad_add(&rad_add(&self.rad, &o.rad), &ulps(&mid, p, 1));
        Self::raw(mid, rad, p)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec.max(o.prec);
        let mid = self.mid.mul(&o.mid, p, RN);
        let t1 = rad_mul(&abs_up(&self.mid), &o.rad);
        let t2 = rad_mul(&abs_up(&o.mid), &self.rad);
        let t3 = rad_mul(&self.rad, &o.rad);
        let rad = rad_add(&rad_add(&rad_add(&t1, &t2), &t3), &ulps(&mid, p, 1));
        Self::raw(mid, rad, p)
    }

    /// Multiply by an exact f64.
    pub fn mul_f64(&self, v: f64) -> Self {
        self.mul(&Self::from_f64(v, self.prec))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        let p = self.prec.max(o.prec);
        let bm = abs_down(&o.mid);
        let gap = bm.sub(&o.rad, RAD_PREC, DOWN);
        if !gap.is_positive() || gap.is_zero() {
            return Err(Error::Domain("division by a ball containing zero".into()));
        }
        let mid = self.mid.div(&o.mid, p, RN);
        let num = rad_add(&rad_mul(&abs_up(&self.mid), &o.rad), &rad_mul(&abs_up(&o.mid), &self.rad));
        let den = bm.mul(&gap, RAD_PREC, DOWN);
        let rad = rad_add(&num.div(&den, RAD_PREC, UP), &ulps(&mid, p, 1));
        Self::raw(mid, rad, p).check()
    }

    pub fn sqr(&self) -> Self {
        self.mul(self)
    }

    /// Natural logarithm; the ball must lie in (0, inf).
    pub fn ln(&self) -> Result<Self> {
        let lo = self.lower();
        if !lo.is_positive() || lo.is_zero() {
            return Err(Error::Domain("logarithm of a ball touching (-inf, 0]".into()));
        }
        let p = self.prec;
        let mid = with_consts(|cc| self.mid.ln(p, RN, cc));
        let lo = abs_down(&lo);
        let prop = self.rad.div(&lo, RAD_PREC, UP);
        let rad = rad_add(&prop, &ulps(&mid, p, 2));
        Self::raw(mid, rad, p).check()
    }

    pub fn exp(&self) -> Result<Self> {
        let p = self.prec;
        let mid = with_consts(|cc| self.mid.exp(p, RN, cc));
        if mid.is_inf() || mid.is_nan() {
            return Err(Error::Domain("exponential overflow".into()));
        }
        let big = rad_mul(&abs_up(&mid), &BigFloat::from_f64(1.0 + 1e-15, RAD_PREC));
        let prop = rad_mul(&big, &expm1_up(&self.rad));
        let rad = rad_add(&prop, &ulps(&mid, p, 2));
        Self::raw(mid, rad, p).check()
    }

    pub fn sin(&self) -> Self {
        let p = self.prec;
        let mid = with_consts(|cc| self.mid.sin(p, RN, cc));
        let rad = rad_add(&self.rad, &ulps(&mid, p, 2));
        // tiny results: ulps relative to mid may vanish, keep an absolute floor
        let rad = rad_add(&rad, &big_pow2(-(p as i32) - 4));
        Self::raw(mid, rad, p)
    }

    pub fn cos(&self) -> Self {
        let p = self.prec;
        let mid = with_consts(|cc| self.mid.cos(p, RN, cc));
        let rad = rad_add(&self.rad, &ulps(&mid, p, 2));
        let rad = rad_add(&rad, &big_pow2(-(p as i32) - 4));
        Self::raw(mid, rad, p)
    }

    pub fn atan(&self) -> Self {
        let p = self.prec;
        let mid = with_consts(|cc| self.mid.atan(p, RN, cc));
        let rad = rad_add(&self.rad, &ulps(&mid, p, 2));
        Self::raw(mid, rad, p)
    }

    /// `self^e` for a ball base in (0, inf), as exp(e * ln self).
    pub fn powf(&self, e: &Self) -> Result<Self> {
        self.ln()?.mul(e).exp()
    }

    /// `(floor(mid), mid - floor(mid))`, the fraction formed at full precision
    /// before rounding to f64.
    pub fn split_floor(&self) -> (i64, f64) {
        let f = self.mid.floor();
        let frac = self.mid.sub(&f, self.prec, RN);
        (floor_i64(&self.mid), big_to_f64(&frac))
    }

    /// Re-round to a new working precision (radius absorbs the rounding).
    pub fn with_prec(&self, prec: usize) -> Self {
        let mut mid = self.mid.clone();
        mid.set_precision(prec, RN).expect("precision change");
        let rad = rad_add(&self.rad, &ulps(&mid, prec, 1));
        Self::raw(mid, rad, prec)
    }
}

fn floor_i64(v: &BigFloat) -> i64 {
    let f = v.floor();
    let x = big_to_f64(&f);
    // floors are integers below 2^53 in every use of this crate
    x.round() as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_roundtrip() {
        for v in [1.0, -2.5, 1174.4831653991399, 3.0e-20, 7.25e12, 0.1] {
            let b = BallScalar::from_f64(v, 128);
            assert_eq!(b.mid_f64(), v);
        }
    }

    #[test]
    fn pi_encloses() {
        let p = BallScalar::pi(128);
        assert!(p.lower_f64() <= std::f64::consts::PI && std::f64::consts::PI <= p.upper_f64());
        assert!(p.rad_f64() < 1e-35);
    }

    #[test]
    fn arithmetic_encloses_known_values() {
        let prec = 128;
        let two = BallScalar::from_u64(2, prec);
        let l = two.ln().unwrap();
        assert!((l.mid_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        let back = l.exp().unwrap();
        assert!(back.cmp_f64(2.0).is_none());
        assert!(back.rad_f64() < 1e-30);
        let third = BallScalar::from_u64(1, prec).div(&BallScalar::from_u64(3, prec)).unwrap();
        let one = third.mul(&BallScalar::from_u64(3, prec));
        assert!(one.cmp_f64(1.0).is_none());
    }

    #[test]
    fn division_by_zero_ball_is_rejected() {
        let z = BallScalar::with_radius(0.0, 1e-3, 64);
        assert!(BallScalar::from_u64(1, 64).div(&z).is_err());
        assert!(z.ln().is_err());
    }

    #[test]
    fn radius_propagates_through_exp() {
        let x = BallScalar::with_radius(1.0, 1e-6, 128);
        let e = x.exp().unwrap();
        let lo = (1.0f64 - 1e-6).exp();
        let hi = (1.0f64 + 1e-6).exp();
        assert!(e.lower_f64() <= lo && hi <= e.upper_f64());
    }

    #[test]
    fn floor_bounds_detect_straddle() {
        let b = BallScalar::with_radius(5.0, 1e-3, 64);
        assert_eq!(b.floor_bounds(), (4, 5));
        let b = BallScalar::with_radius(3.25, 0.05, 64);
        assert_eq!(b.floor_bounds(), (3, 3));
    }

    #[test]
    fn precision_nesting() {
        let f = |p| BallScalar::from_u64(1175, p).ln().unwrap().sin();
        let lo = f(64);
        let hi = f(256);
        assert!(hi.is_within(&lo.inflate(1e-30)));
        assert!(hi.rad_f64() < lo.rad_f64());
    }
}
