//! Hardware-precision balls.
//!
//! Same contract as [`BallScalar`](super::BallScalar) with an f64 midpoint:
//! results enclose the exact value. Each rounded operation is charged one ulp,
//! libm elementary functions two ulps, and every computed radius is inflated
//! by a few relative ulps plus one step toward +inf.

use std::cmp::Ordering;

const EPS: f64 = f64::EPSILON;

/// |pi - (pi as f64)| < 1.23e-16.
pub const PI_RAD: f64 = 1.23e-16;

#[inline]
fn up(x: f64) -> f64 {
    (x * (1.0 + 4.0 * EPS)).next_up()
}

#[inline]
fn round_err(v: f64) -> f64 {
    v.abs() * EPS
}

#[inline]
fn libm_err(v: f64) -> f64 {
    v.abs() * 2.0 * EPS + f64::MIN_POSITIVE
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FBall {
    pub mid: f64,
    pub rad: f64,
}

impl FBall {
    pub fn new(mid: f64, rad: f64) -> Self {
        debug_assert!(rad >= 0.0);
        Self { mid, rad }
    }

    pub fn exact(v: f64) -> Self {
        Self { mid: v, rad: 0.0 }
    }

    pub fn pi() -> Self {
        Self { mid: std::f64::consts::PI, rad: PI_RAD }
    }

    pub fn lo(&self) -> f64 {
        (self.mid - self.rad).next_down()
    }

    pub fn hi(&self) -> f64 {
        (self.mid + self.rad).next_up()
    }

    pub fn is_finite(&self) -> bool {
        self.mid.is_finite() && self.rad.is_finite()
    }

    pub fn cmp_f64(&self, v: f64) -> Option<Ordering> {
        if !self.is_finite() {
            None
        } else if self.hi() < v {
            Some(Ordering::Less)
        } else if self.lo() > v {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    pub fn add(self, o: Self) -> Self {
        let m = self.mid + o.mid;
        Self::new(m, up(self.rad + o.rad + round_err(m)))
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    pub fn neg(self) -> Self {
        Self::new(-self.mid, self.rad)
    }

    pub fn mul(self, o: Self) -> Self {
        let m = self.mid * o.mid;
        let r = self.mid.abs() * o.rad + o.mid.abs() * self.rad + self.rad * o.rad;
        Self::new(m, up(r + round_err(m)))
    }

    pub fn scale(self, k: f64) -> Self {
        self.mul(Self::exact(k))
    }

    /// `None` when the divisor ball contains zero.
    pub fn div(self, o: Self) -> Option<Self> {
        let b = o.mid.abs();
        let gap = (b - o.rad) * (1.0 - 4.0 * EPS);
        if !(gap > 0.0) {
            return None;
        }
        let m = self.mid / o.mid;
        let r = (self.mid.abs() * o.rad + b * self.rad) / (b * gap);
        Some(Self::new(m, up(r + round_err(m))))
    }

    pub fn ln(self) -> Option<Self> {
        let lo = self.lo();
        if !(lo > 0.0) {
            return None;
        }
        let m = self.mid.ln();
        Some(Self::new(m, up(self.rad / lo + libm_err(m))))
    }

    /// ln(1 + x); needs the ball inside (-1, inf).
    pub fn ln_1p(self) -> Option<Self> {
        let lo = self.lo();
        if !(lo > -1.0) {
            return None;
        }
        let m = self.mid.ln_1p();
        let lip = 1.0 / ((1.0 + lo) * (1.0 - 4.0 * EPS));
        Some(Self::new(m, up(self.rad * lip + libm_err(m))))
    }

    pub fn exp(self) -> Self {
        let m = self.mid.exp();
        let lip = self.hi().exp() * (1.0 + 4.0 * EPS);
        Self::new(m, up(self.rad * lip + libm_err(m)))
    }

    pub fn exp_m1(self) -> Self {
        let m = self.mid.exp_m1();
        let lip = self.hi().exp() * (1.0 + 4.0 * EPS);
        Self::new(m, up(self.rad * lip + libm_err(m)))
    }

    pub fn sin(self) -> Self {
        let m = self.mid.sin();
        Self::new(m, up(self.rad + libm_err(m)))
    }

    pub fn cos(self) -> Self {
        let m = self.mid.cos();
        Self::new(m, up(self.rad + libm_err(m)))
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo() <= v && v <= self.hi()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pi_radius_covers_the_constant() {
        let pi = crate::numeric::BallScalar::pi(256);
        let gap = pi.sub(&crate::numeric::BallScalar::from_f64(std::f64::consts::PI, 256));
        assert!(gap.upper_f64().abs() <= PI_RAD && gap.lower_f64().abs() <= PI_RAD);
    }

    #[test]
    fn division_rejects_zero() {
        assert!(FBall::exact(1.0).div(FBall::new(0.0, 1e-9)).is_none());
        assert!(FBall::new(-0.5, 0.0).ln().is_none());
    }

    proptest! {
        #[test]
        fn enclosures_contain_perturbed_points(m in 0.1f64..20.0, r in 0.0f64..1e-6, s in -1.0f64..1.0) {
            let b = FBall::new(m, r);
            let x = m + s * r;
            prop_assert!(b.ln().unwrap().contains(x.ln()));
            prop_assert!(b.exp().contains(x.exp()));
            prop_assert!(b.sin().contains(x.sin()));
            prop_assert!(b.cos().contains(x.cos()));
            prop_assert!(b.mul(b).contains(x * x));
            prop_assert!(FBall::exact(1.0).div(b).unwrap().contains(1.0 / x));
        }
    }
}
