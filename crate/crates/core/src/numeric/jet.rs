//! Truncated Taylor series with ball coefficients.
//!
//! `Jet { c }` stands for c[0] + c[1] h + c[2] h^2 + c[3] h^3 + O(h^4); the
//! r-th derivative of the underlying function is r! c[r].

use crate::error::Result;
use crate::numeric::BallScalar;

pub const ORDER: usize = 4;

#[derive(Clone, Debug)]
pub struct Jet {
    pub c: [BallScalar; ORDER],
}

fn zero(prec: usize) -> BallScalar {
    BallScalar::from_u64(0, prec)
}

impl Jet {
    pub fn constant(v: BallScalar) -> Self {
        let p = v.prec();
        Self { c: [v, zero(p), zero(p), zero(p)] }
    }

    /// The identity map expanded at `v`.
    pub fn variable(v: BallScalar) -> Self {
        let p = v.prec();
        Self { c: [v, BallScalar::from_u64(1, p), zero(p), zero(p)] }
    }

    fn prec(&self) -> usize {
        self.c[0].prec()
    }

    /// r-th derivative.
    pub fn derivative(&self, r: usize) -> BallScalar {
        let fact = [1.0, 1.0, 2.0, 6.0][r];
        self.c[r].mul_f64(fact)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { c: std::array::from_fn(|i| self.c[i].add(&o.c[i])) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { c: std::array::from_fn(|i| self.c[i].sub(&o.c[i])) }
    }

    pub fn scale(&self, s: &BallScalar) -> Self {
        Self { c: std::array::from_fn(|i| self.c[i].mul(s)) }
    }

    pub fn shift(&self, s: &BallScalar) -> Self {
        let mut c = self.c.clone();
        c[0] = c[0].add(s);
        Self { c }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec();
        Self {
            c: std::array::from_fn(|n| {
                (0..=n).fold(zero(p), |acc, i| acc.add(&self.c[i].mul(&o.c[n - i])))
            }),
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        let p = self.prec();
        let mut q: [BallScalar; ORDER] = std::array::from_fn(|_| zero(p));
        for n in 0..ORDER {
            let mut num = self.c[n].clone();
            for k in 1..=n {
                num = num.sub(&o.c[k].mul(&q[n - k]));
            }
            q[n] = num.div(&o.c[0])?;
        }
        Ok(Self { c: q })
    }

    pub fn exp(&self) -> Result<Self> {
        let p = self.prec();
        let mut b: [BallScalar; ORDER] = std::array::from_fn(|_| zero(p));
        b[0] = self.c[0].exp()?;
        for n in 1..ORDER {
            let mut s = zero(p);
            for k in 1..=n {
                s = s.add(&self.c[k].mul(&b[n - k]).mul_f64(k as f64));
            }
            b[n] = s.div(&BallScalar::from_u64(n as u64, p))?;
        }
        Ok(Self { c: b })
    }

    pub fn ln(&self) -> Result<Self> {
        let p = self.prec();
        let a0 = &self.c[0];
        let mut b: [BallScalar; ORDER] = std::array::from_fn(|_| zero(p));
        b[0] = a0.ln()?;
        for n in 1..ORDER {
            let mut s = self.c[n].mul_f64(n as f64);
            for k in 1..n {
                s = s.sub(&b[k].mul(&self.c[n - k]).mul_f64(k as f64));
            }
            b[n] = s.div(&a0.mul_f64(n as f64))?;
        }
        Ok(Self { c: b })
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let p = self.prec();
        let mut s: [BallScalar; ORDER] = std::array::from_fn(|_| zero(p));
        let mut c: [BallScalar; ORDER] = std::array::from_fn(|_| zero(p));
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for n in 1..ORDER {
            let mut ss = zero(p);
            let mut cc = zero(p);
            for k in 1..=n {
                let ka = self.c[k].mul_f64(k as f64);
                ss = ss.add(&ka.mul(&c[n - k]));
                cc = cc.sub(&ka.mul(&s[n - k]));
            }
            let nb = BallScalar::from_u64(n as u64, p);
            s[n] = ss.div(&nb).expect("nonzero divisor");
            c[n] = cc.div(&nb).expect("nonzero divisor");
        }
        (Self { c: s }, Self { c })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_ln_roundtrip_derivatives() {
        let x = Jet::variable(BallScalar::from_f64(1.5, 128));
        let y = x.ln().unwrap().exp().unwrap();
        assert!((y.derivative(1).mid_f64() - 1.0).abs() < 1e-30);
        assert!(y.derivative(2).mid_f64().abs() < 1e-30);
        assert!(y.derivative(3).mid_f64().abs() < 1e-30);
    }

    #[test]
    fn tan_derivatives_match_closed_form() {
        let a = 0.9f64;
        let x = Jet::variable(BallScalar::from_f64(a, 128));
        let (s, c) = x.sin_cos();
        let t = s.div(&c).unwrap();
        let tv = a.tan();
        let d1 = 1.0 + tv * tv;
        let d2 = 2.0 * tv * d1;
        let d3 = 2.0 * d1 * d1 + 4.0 * tv * tv * d1;
        for (r, want) in [(1, d1), (2, d2), (3, d3)] {
            let got = t.derivative(r);
            assert!((got.mid_f64() - want).abs() < 1e-12 * want, "r = {r}");
            assert!(got.rad_f64() < 1e-25);
        }
    }
}
