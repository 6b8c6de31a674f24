use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::BallScalar;

/// Exponents of the map n -> n^c tan^theta(log n).
///
/// The f64 values are taken as the exact exponents; every ball evaluation
/// starts from them without further rounding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub c: f64,
    pub theta: f64,
}

/// Upper end of the admissible range for c.
pub const C_MAX: f64 = 12.0 / 11.0;

impl Params {
    /// Parameters inside the theorem range: 1 < c < 12/11 and theta > 1.
    pub fn new(c: f64, theta: f64) -> Result<Self> {
        let mut bad = Vec::new();
        if !(c > 1.0 && c < C_MAX) {
            bad.push(format!("c = {c} must satisfy 1 < c < 12/11"));
        }
        if !(theta > 1.0) || !theta.is_finite() {
            bad.push(format!("theta = {theta} must exceed 1"));
        }
        if bad.is_empty() {
            Ok(Self { c, theta })
        } else {
            Err(Error::InvalidParams(bad.join("; ")))
        }
    }

    /// Looser gate for exploration and cross-checks (c >= 1, theta >= 1).
    pub fn exploratory(c: f64, theta: f64) -> Result<Self> {
        if c >= 1.0 && c < 2.0 && theta >= 1.0 && theta.is_finite() {
            Ok(Self { c, theta })
        } else {
            Err(Error::InvalidParams(format!("c = {c}, theta = {theta} outside [1, 2) x [1, inf)")))
        }
    }

    pub fn gamma(&self) -> f64 {
        1.0 / self.c
    }

    pub fn c_ball(&self, prec: usize) -> BallScalar {
        BallScalar::from_f64(self.c, prec)
    }

    pub fn theta_ball(&self, prec: usize) -> BallScalar {
        BallScalar::from_f64(self.theta, prec)
    }

    /// Enclosure of 1/c at `prec` bits.
    pub fn gamma_ball(&self, prec: usize) -> BallScalar {
        BallScalar::from_u64(1, prec)
            .div(&self.c_ball(prec))
            .expect("c > 0")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_gate() {
        assert!(Params::new(1.05, 2.0).is_ok());
        assert!(Params::new(1.2, 2.0).is_err());
        assert!(Params::new(1.0, 2.0).is_err());
        assert!(Params::new(1.05, 1.0).is_err());
        assert!(Params::exploratory(1.0001, 1.0).is_ok());
    }

    #[test]
    fn gamma_matches_reciprocal() {
        let p = Params::new(1.05, 2.0).unwrap();
        let g = p.gamma_ball(256);
        assert!(g.rad_f64() < 1e-70);
        assert!(g.mul(&p.c_ball(256)).cmp_f64(1.0).is_none());
        assert!((p.gamma() - 20.0 / 21.0).abs() < 1e-15);
    }
}
