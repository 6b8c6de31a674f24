//! The sawtooth ψ and its trigonometric approximation.
//!
//! ψ(t) ≈ Σ_{1≤|h|≤M} a(h) e(ht) with the error dominated pointwise by
//! B_M(t) = Σ_{|h|≤M} b(h) e(ht), a nonnegative Fejér kernel.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::Params;
use crate::par::ComplexSum;

/// Rounding allowance of the domination test; B_M vanishes at t = j/(M+1)
/// and so does the exact error there.
pub const DOMINATION_SLACK: f64 = 1e-12;

/// Points of the verification grid used at construction.
pub const BUILD_GRID: usize = 4096;

/// ψ(t) = {t} - 1/2, with values in [-1/2, 1/2).
pub fn psi(t: f64) -> f64 {
    t - t.floor() - 0.5
}

/// e(x) = exp(2πi x), reduced modulo 1 first.
pub fn e(x: f64) -> Complex64 {
    let f = x - x.floor();
    let (s, c) = (2.0 * PI * f).sin_cos();
    Complex64::new(c, s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Multiplier {
    /// Vaaler's extremal weight π u (1 - u) cot(π u) + u.
    Vaaler,
    /// 1 - u.
    Fejer,
}

impl Multiplier {
    pub fn weight(self, u: f64) -> f64 {
        let u = u.abs();
        match self {
            Multiplier::Vaaler => PI * u * (1.0 - u) / (PI * u).tan() + u,
            Multiplier::Fejer => 1.0 - u,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VaalerPoly {
    pub m: usize,
    pub multiplier: Multiplier,
    /// a(h) for h = 1..=M; a(-h) is the conjugate.
    pub a: Vec<Complex64>,
    /// b(h) for h = 0..=M; b(-h) = b(h).
    pub b: Vec<f64>,
}

impl VaalerPoly {
    pub fn coeff_a(&self, h: i64) -> Complex64 {
        match h {
            0 => Complex64::new(0.0, 0.0),
            h if h > 0 => self.a[h as usize - 1],
            h => self.a[(-h) as usize - 1].conj(),
        }
    }

    pub fn coeff_b(&self, h: i64) -> f64 {
        self.b[h.unsigned_abs() as usize]
    }

    /// B_M(t) = (1/(M+1)^2) (sin(π(M+1)t) / sin(πt))^2.
    pub fn majorant(&self, t: f64) -> f64 {
        let m1 = (self.m + 1) as f64;
        let f = t - t.floor();
        let s = (PI * f).sin();
        if s.abs() < 1e-6 {
            let mut acc = self.b[0];
            for h in 1..=self.m {
                acc += 2.0 * self.b[h] * (2.0 * PI * ((h as f64 * f) % 1.0)).cos();
            }
            return acc;
        }
        let r = (PI * ((m1 * f) % 2.0)).sin() / s;
        r * r / (m1 * m1)
    }

    /// The full complex sum Σ a(h) e(ht) over 1 ≤ |h| ≤ M.
    pub fn eval_complex(&self, t: f64) -> Complex64 {
        let f = t - t.floor();
        let mut acc = ComplexSum::default();
        for h in 1..=self.m {
            let z = e(h as f64 * f);
            let a = self.a[h - 1];
            acc.add(a * z);
            acc.add(a.conj() * z.conj());
        }
        acc.value()
    }

    /// Largest |a(h)| |h| and b(h) M.
    pub fn coefficient_caps(&self) -> (f64, f64) {
        let ca = self.a.iter().enumerate().map(|(i, a)| a.norm() * (i + 1) as f64).fold(0.0, f64::max);
        let cb = self.b.iter().map(|b| b * self.m as f64).fold(0.0, f64::max);
        (ca, cb)
    }
}

/// (approximation, bound) at t.
pub fn approx_psi(vp: &VaalerPoly, t: f64) -> (f64, f64) {
    (vp.eval_complex(t).re, vp.majorant(t))
}

/// Pointwise domination statistics over a set of points.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DominationReport {
    pub points: usize,
    pub violations: usize,
    /// Largest |ψ - approx| / (B_M + slack).
    pub worst_ratio: f64,
    pub worst_t: f64,
    /// Largest imaginary residue of the approximation.
    pub max_imag: f64,
    pub grid_mean_b: f64,
}

pub fn check_domination(vp: &VaalerPoly, ts: &[f64]) -> DominationReport {
    let mut r = DominationReport { points: ts.len(), ..Default::default() };
    let mut mean = 0.0;
    for &t in ts {
        let z = vp.eval_complex(t);
        let b = vp.majorant(t);
        let err = (psi(t) - z.re).abs();
        let ratio = err / (b + DOMINATION_SLACK);
        if err > b + DOMINATION_SLACK {
            r.violations += 1;
        }
        if ratio > r.worst_ratio {
            r.worst_ratio = ratio;
            r.worst_t = t;
        }
        r.max_imag = r.max_imag.max(z.im.abs());
        mean += b;
    }
    r.grid_mean_b = if ts.is_empty() { 0.0 } else { mean / ts.len() as f64 };
    r
}

/// t_i = i / n for i in 0..n.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / n as f64).collect()
}

pub fn random_points(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen::<f64>()).collect()
}

pub fn build_vaaler(m: usize) -> Result<VaalerPoly> {
    build_with(m, Multiplier::Vaaler, &uniform_grid(BUILD_GRID))
}

/// Build with the given multiplier and reject it unless the coefficient caps
/// and the domination test on `grid` hold.
pub fn build_with(m: usize, multiplier: Multiplier, grid: &[f64]) -> Result<VaalerPoly> {
    if m < 2 {
        return Err(Error::Domain(format!("degree M = {m} must be at least 2")));
    }
    let m1 = (m + 1) as f64;
    let a = (1..=m)
        .map(|h| {
            let w = multiplier.weight(h as f64 / m1);
            // -w / (2πih) = i w / (2πh)
            Complex64::new(0.0, w / (2.0 * PI * h as f64))
        })
        .collect();
    let b = (0..=m).map(|h| (1.0 - h as f64 / m1) / m1).collect();
    let vp = VaalerPoly { m, multiplier, a, b };
    let (ca, cb) = vp.coefficient_caps();
    if ca > 1.0 || cb > 1.0 {
        return Err(Error::ConstructionFailed(format!("coefficient caps |a(h)h| = {ca}, b(h)M = {cb}")));
    }
    let rep = check_domination(&vp, grid);
    if rep.violations > 0 {
        return Err(Error::ConstructionFailed(format!(
            "{:?} multiplier: domination fails at {} of {} points (worst t = {}, ratio {:.3})",
            multiplier, rep.violations, rep.points, rep.worst_t, rep.worst_ratio
        )));
    }
    Ok(vp)
}

/// M = ⌈N^{1-γ} (log N)^4⌉, at least 2.
pub fn vaaler_cutoff(n: f64, params: &Params) -> Result<usize> {
    if !(n >= 16.0) {
        return Err(Error::Domain(format!("N = {n} must be at least 16")));
    }
    let m = (n.powf(1.0 - params.gamma()) * n.ln().powi(4)).ceil();
    Ok((m as usize).max(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_values() {
        assert!((psi(0.3) + 0.2).abs() < 1e-15);
        assert_eq!(psi(-0.25), 0.25);
        assert_eq!(psi(2.0), -0.5);
        assert_eq!(psi(0.5), 0.0);
    }

    #[test]
    fn conjugate_symmetry_and_real_sum() {
        let vp = build_vaaler(8).unwrap();
        for h in 1..=8 {
            assert_eq!(vp.coeff_a(-h), vp.coeff_a(h).conj());
        }
        assert!(vp.eval_complex(0.123).im.abs() < 1e-15);
    }

    #[test]
    fn smallest_degree() {
        let vp = build_vaaler(2).unwrap();
        assert_eq!(vp.a.len(), 2);
        assert!(vp.coeff_a(1).norm() <= 1.0 && vp.coeff_a(-2).norm() <= 1.0);
        assert!(build_vaaler(1).is_err());
    }

    #[test]
    fn majorant_closed_form_equals_sum() {
        let vp = build_vaaler(16).unwrap();
        for t in [0.0, 1e-7, 0.1, 0.37, 0.5, 0.999] {
            let s: f64 = (-16i64..=16).map(|h| vp.coeff_b(h) * (2.0 * PI * h as f64 * t).cos()).sum();
            assert!((vp.majorant(t) - s).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn domination_near_jump_and_half() {
        let vp = build_vaaler(64).unwrap();
        for t in [1e-6, 0.5, 1.0 - 1e-6] {
            let (a, b) = approx_psi(&vp, t);
            assert!((psi(t) - a).abs() <= b + DOMINATION_SLACK);
        }
        assert!(approx_psi(&vp, 0.5).0.abs() <= vp.majorant(0.5));
        let (x, y) = (approx_psi(&vp, 0.3).0, approx_psi(&vp, 1.3).0);
        assert!((x - y).abs() < 1e-12);
    }

    #[test]
    fn fejer_multiplier_is_rejected() {
        assert!(matches!(
            build_with(16, Multiplier::Fejer, &uniform_grid(BUILD_GRID)),
            Err(Error::ConstructionFailed(_))
        ));
    }

    #[test]
    fn cutoff() {
        let p = Params::new(1.05, 2.0).unwrap();
        assert_eq!(vaaler_cutoff(1e6, &p).unwrap(), 70337);
        let q = Params::exploratory(1.0, 2.0).unwrap();
        assert_eq!(vaaler_cutoff(1e6, &q).unwrap(), (1e6f64.ln().powi(4)).ceil() as usize);
        assert_eq!(vaaler_cutoff(16.0, &p).unwrap(), 68);
    }
}
