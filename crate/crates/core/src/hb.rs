//! Heath-Brown's identity: Σ_{P<n≤P1} Λ(n) G(n) split into Type I and Type II
//! bilinear sums.
//!
//! With z^K ≥ P1,
//!
//! Λ(n) = Σ_{j=1}^{K} (-1)^{j-1} C(K, j) Σ_{m_1···m_j n_1···n_j = n, m_i ≤ z} μ(m_1)···μ(m_j) log n_1
//!
//! for every n ≤ P1. Each variable runs over dyadic blocks (split at U, V, Z);
//! every box of blocks is then labelled by which variable, or product of
//! variables, lands in the Type I or Type II ranges.

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{tau_k, SpfTable};
use crate::error::{Error, Result};
use crate::par::{self, ComplexSum};

/// Order of the identity (three μ-variables and three smooth ones).
pub const DEFAULT_ORDER: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HBMode {
    /// Side conditions with the constants 128 and 2^18.
    Literal,
    /// The same inequalities with 2 and 4.
    Scaled,
}

impl HBMode {
    fn constants(self) -> (f64, f64) {
        match self {
            HBMode::Literal => (128.0, 2f64.powi(18)),
            HBMode::Scaled => (2.0, 4.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HBParams {
    pub p: u64,
    pub p1: u64,
    pub u: f64,
    pub v: f64,
    pub z: f64,
    pub k: u32,
    pub mode: HBMode,
}

impl HBParams {
    /// Names of the side conditions that fail.
    pub fn violations(&self) -> Vec<String> {
        let (c1, c2) = self.mode.constants();
        let (p, p1) = (self.p as f64, self.p1 as f64);
        let (u, v, z) = (self.u, self.v, self.z);
        let mut out = Vec::new();
        if !(p > 2.0) {
            out.push("P > 2".to_string());
        }
        if !(p1 <= 2.0 * p && p1 > p) {
            out.push("P < P₁ ≤ 2P".to_string());
        }
        if !(2.0 <= u && u < v && v <= z && z <= p) {
            out.push("2 ≤ U < V ≤ Z ≤ P".to_string());
        }
        if !(u * u <= z) {
            out.push("U² ≤ Z".to_string());
        }
        if !(c1 * u * z * z <= p1) {
            out.push(match self.mode {
                HBMode::Literal => "128UZ² ≤ P₁".to_string(),
                HBMode::Scaled => "2UZ² ≤ P₁".to_string(),
            });
        }
        if !(c2 * p1 <= v * v * v) {
            out.push(match self.mode {
                HBMode::Literal => "2¹⁸P₁ ≤ V³".to_string(),
                HBMode::Scaled => "4P₁ ≤ V³".to_string(),
            });
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Param { violations: v })
        }
    }

    /// Smallest integer z with z^K ≥ P1, the cut of the μ-variables.
    pub fn mu_cut(&self) -> u64 {
        let mut z = (self.p1 as f64).powf(1.0 / self.k as f64).floor().max(1.0) as u64;
        while z.pow(self.k) < self.p1 {
            z += 1;
        }
        while z > 1 && (z - 1).pow(self.k) >= self.p1 {
            z -= 1;
        }
        z
    }
}

/// U = 2^3, V = 2^7 N^{1/3}, Z = 2^{-10} N^{1/2}, P = N, P1 = 2N; errors with
/// the list of failing side conditions.
pub fn hb_params_default(n: u64) -> Result<HBParams> {
    let hp = hb_params_literal(n);
    hp.validate()?;
    Ok(hp)
}

/// The literal parameters without validation.
pub fn hb_params_literal(n: u64) -> HBParams {
    let nf = n as f64;
    HBParams { p: n, p1: 2 * n, u: 8.0, v: 128.0 * nf.cbrt(), z: nf.sqrt() / 1024.0, k: DEFAULT_ORDER, mode: HBMode::Literal }
}

/// Scaled parameters U = 2, V = 2^{1.05} N^{1/3}, Z = 2^{-0.55} N^{1/2}
/// (valid for N ≥ 2^10).
pub fn hb_params_scaled(n: u64) -> Result<HBParams> {
    let nf = n as f64;
    let hp = HBParams {
        p: n,
        p1: 2 * n,
        u: 2.0,
        v: 2f64.powf(1.05) * nf.cbrt(),
        z: 2f64.powf(-0.55) * nf.sqrt(),
        k: DEFAULT_ORDER,
        mode: HBMode::Scaled,
    };
    hp.validate()?;
    Ok(hp)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tag {
    TypeI,
    TypeILog,
    TypeII,
}

/// One bilinear sum mult · Σ_{D<d≤D1} a(d) Σ_{L<l≤L1, P<dl≤P1} b(l) G(dl).
#[derive(Clone, Debug, Serialize)]
pub struct Component {
    pub tag: Tag,
    /// Number of μ-variables in the term of the identity.
    pub j: u32,
    /// Binomial multiplicity C(K, j); the sign sits in a(d).
    pub mult: f64,
    pub d_range: (f64, u64),
    pub l_range: (f64, u64),
    /// Sparse a(d) sorted by d.
    #[serde(skip)]
    pub a: Vec<(u64, f64)>,
    /// Sparse b(l) for Type II; Type I uses 1 or log l on the whole range.
    #[serde(skip)]
    pub b: Vec<(u64, f64)>,
}

impl Component {
    fn l_weight(&self, l: u64) -> f64 {
        match self.tag {
            Tag::TypeI => 1.0,
            Tag::TypeILog => (l as f64).ln(),
            Tag::TypeII => unreachable!(),
        }
    }

    /// The value for G given on (P, P1] (g[i] = G(P + 1 + i)).
    pub fn value(&self, p: u64, p1: u64, g: &[Complex64]) -> Complex64 {
        let mut s = ComplexSum::default();
        let (llo, lhi) = (self.l_range.0, self.l_range.1);
        for &(d, a) in &self.a {
            let lo = ((p / d) + 1).max(llo.floor() as u64 + 1);
            let hi = (p1 / d).min(lhi);
            if lo > hi {
                continue;
            }
            let mut inner = ComplexSum::default();
            if self.tag == Tag::TypeII {
                let start = self.b.partition_point(|&(l, _)| l < lo);
                for &(l, b) in self.b[start..].iter().take_while(|&&(l, _)| l <= hi) {
                    inner.add(g[(d * l - p - 1) as usize] * b);
                }
            } else {
                for l in lo..=hi {
                    inner.add(g[(d * l - p - 1) as usize] * self.l_weight(l));
                }
            }
            s.add(inner.value() * a);
        }
        s.value() * self.mult
    }

    /// max |a(d)| / (τ5(d) log P1) and the same for b(l).
    pub fn coefficient_ratio(&self, p1: u64) -> f64 {
        let lp = (p1 as f64).ln();
        let ra = self.a.iter().map(|&(d, a)| a.abs() / (tau_k(d, 5) as f64 * lp)).fold(0.0, f64::max);
        let rb = match self.tag {
            Tag::TypeII => self.b.iter().map(|&(l, b)| b.abs() / (tau_k(l, 5) as f64 * lp)).fold(0.0, f64::max),
            _ => {
                let w = self.l_weight(self.l_range.1).abs();
                w / lp
            }
        };
        ra.max(rb)
    }
}

#[derive(Clone, Copy, Debug)]
struct Block {
    edge: f64,
    min: u64,
    max: u64,
}

fn blocks(max: u64, cuts: &[f64]) -> Vec<Block> {
    let mut edges = vec![0.0];
    let mut e = 1u64;
    while (e as f64) < max as f64 {
        edges.push(e as f64);
        e *= 2;
    }
    edges.push(max as f64);
    for &c in cuts {
        if c > 1.0 && c < max as f64 {
            edges.push(c);
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();
    edges
        .windows(2)
        .filter_map(|w| {
            let min = w[0].floor() as u64 + 1;
            let hi = (w[1].floor() as u64).min(max);
            (min <= hi).then_some(Block { edge: w[0], min, max: hi })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Var {
    Log,
    Smooth,
    Mu,
}

/// The decomposition: component plan plus the values for one G.
#[derive(Clone, Debug, Serialize)]
pub struct HBDecomposition {
    pub params: HBParams,
    pub components: Vec<Component>,
    pub values: Vec<Complex64>,
    pub total: Complex64,
    pub component_count: usize,
}

/// Plan of components for fixed parameters, reusable across G.
#[derive(Clone, Debug)]
pub struct HBPlan {
    pub params: HBParams,
    pub components: Vec<Component>,
    pub boxes: usize,
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

// dyadic pieces (D, min(2D, max)] covering [min, max]
fn pieces(min: u64, max: u64) -> Vec<(f64, u64)> {
    let mut out = Vec::new();
    let mut lo = if min >= 2 { (min - 1) as f64 } else { 0.5 };
    while lo < max as f64 {
        let hi = ((2.0 * lo).floor() as u64).min(max);
        out.push((lo, hi));
        lo = hi as f64;
    }
    out
}

// Type II l-pieces starting at max(U, min - 1); None unless every piece has U ≤ L ≤ V
fn type2_pieces(min: u64, max: u64, u: f64, v: f64) -> Option<Vec<(f64, u64)>> {
    if (min as f64) <= u {
        return None;
    }
    let mut lo = u.max((min - 1) as f64);
    let mut out = Vec::new();
    while lo < max as f64 {
        if lo > v {
            return None;
        }
        let hi = ((2.0 * lo).floor() as u64).min(max);
        out.push((lo, hi));
        lo = hi as f64;
    }
    Some(out)
}

struct Builder<'a> {
    hp: &'a HBParams,
    spf: SpfTable,
}

impl Builder<'_> {
    fn weight(&self, var: Var, x: u64) -> f64 {
        match var {
            Var::Log => (x as f64).ln(),
            Var::Smooth => 1.0,
            Var::Mu => self.spf.moebius(x) as f64,
        }
    }

    /// Sparse Dirichlet convolution of the selected variables, products ≤ P1.
    fn convolve(&self, vars: &[(Var, Block)], sign: f64) -> Vec<(u64, f64)> {
        let mut cur: Vec<(u64, f64)> = vec![(1, sign)];
        for &(var, b) in vars {
            let mut next = Vec::new();
            for &(p, w) in &cur {
                for x in b.min..=b.max {
                    if p * x > self.hp.p1 {
                        break;
                    }
                    let wx = self.weight(var, x);
                    if wx != 0.0 {
                        next.push((p * x, w * wx));
                    }
                }
            }
            next.sort_by_key(|&(p, _)| p);
            let mut merged: Vec<(u64, f64)> = Vec::with_capacity(next.len());
            for (p, w) in next {
                match merged.last_mut() {
                    Some((q, acc)) if *q == p => *acc += w,
                    _ => merged.push((p, w)),
                }
            }
            merged.retain(|&(_, w)| w != 0.0);
            cur = merged;
        }
        cur
    }

    fn classify(&self, j: u32, bx: &[(Var, Block)], out: &mut Vec<Component>) -> Result<()> {
        let hp = self.hp;
        let mult = binom(hp.k, j);
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let (p, p1) = (hp.p, hp.p1);
        let emit = |out: &mut Vec<Component>, tag, a: &[(u64, f64)], dmin, dmax, lr: (f64, u64), lmin: u64, b: &[(u64, f64)]| {
            for (dlo, dhi) in pieces(dmin, dmax) {
                let a_piece: Vec<(u64, f64)> =
                    a.iter().copied().filter(|&(d, _)| (d as f64) > dlo && d <= dhi).collect();
                if a_piece.is_empty() {
                    continue;
                }
                let lo_prod = a_piece[0].0 * lmin;
                let hi_prod = a_piece.last().unwrap().0 * lr.1;
                if lo_prod > p1 || hi_prod <= p {
                    continue;
                }
                let b_piece: Vec<(u64, f64)> =
                    b.iter().copied().filter(|&(l, _)| (l as f64) > lr.0 && l <= lr.1).collect();
                if tag == Tag::TypeII && b_piece.is_empty() {
                    continue;
                }
                out.push(Component { tag, j, mult, d_range: (dlo, dhi), l_range: lr, a: a_piece, b: b_piece });
            }
        };

        // Type I: a smooth variable on a block starting at or beyond Z
        let long = bx
            .iter()
            .position(|&(v, b)| v == Var::Log && b.edge >= hp.z)
            .or_else(|| bx.iter().position(|&(v, b)| v == Var::Smooth && b.edge >= hp.z));
        if let Some(i) = long {
            let (var, blk) = bx[i];
            let rest: Vec<(Var, Block)> = bx.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, x)| *x).collect();
            let a = self.convolve(&rest, sign);
            if a.is_empty() {
                return Ok(());
            }
            let tag = if var == Var::Log { Tag::TypeILog } else { Tag::TypeI };
            let (dmin, dmax) = (a[0].0, a.last().unwrap().0);
            emit(out, tag, &a, dmin, dmax, (blk.edge, blk.max), blk.min, &[]);
            return Ok(());
        }

        // Type II: a product of variables confined to [U, V]
        let nontrivial: Vec<usize> = (0..bx.len()).filter(|&i| bx[i].1.max > 1).collect();
        for mask in 1u32..(1 << nontrivial.len()) {
            let sel: Vec<usize> = nontrivial.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i).collect();
            let (lmin, lmax) = sel
                .iter()
                .fold((1u64, 1u64), |(a, b), &i| (a.saturating_mul(bx[i].1.min), b.saturating_mul(bx[i].1.max)));
            let Some(lp) = type2_pieces(lmin, lmax.min(p1), hp.u, hp.v) else { continue };
            let lvars: Vec<(Var, Block)> = sel.iter().map(|&i| bx[i]).collect();
            let dvars: Vec<(Var, Block)> = (0..bx.len()).filter(|i| !sel.contains(i)).map(|i| bx[i]).collect();
            let b = self.convolve(&lvars, 1.0);
            let a = self.convolve(&dvars, sign);
            if a.is_empty() || b.is_empty() {
                return Ok(());
            }
            let (dmin, dmax) = (a[0].0, a.last().unwrap().0);
            for lr in lp {
                let lmin_piece = lr.0.floor() as u64 + 1;
                emit(out, Tag::TypeII, &a, dmin, dmax, lr, lmin_piece, &b);
            }
            return Ok(());
        }
        let desc: Vec<String> = bx.iter().map(|(v, b)| format!("{v:?}[{},{}]", b.min, b.max)).collect();
        Err(Error::Classification(format!("box {} fits neither type", desc.join(" x "))))
    }
}

impl HBPlan {
    pub fn new(hp: &HBParams) -> Result<Self> {
        hp.validate()?;
        let z = hp.mu_cut();
        let cuts = [hp.u, hp.v, hp.z];
        let nb = blocks(hp.p1, &cuts);
        let mb = blocks(z, &cuts);
        let builder = Builder { hp, spf: SpfTable::new(hp.p1 as usize + 1) };
        let mut components = Vec::new();
        let mut boxes = 0usize;
        for j in 1..=hp.k {
            let mut vars = vec![Var::Log];
            vars.extend(std::iter::repeat(Var::Smooth).take(j as usize - 1));
            vars.extend(std::iter::repeat(Var::Mu).take(j as usize));
            let mut stack: Vec<(Var, Block)> = Vec::new();
            enumerate(&vars, &nb, &mb, hp, 1, 1, &mut stack, &mut |bx| {
                boxes += 1;
                builder.classify(j, bx, &mut components)
            })?;
        }
        Ok(Self { params: hp.clone(), components, boxes })
    }

    /// Values of every component for G, plus their total.
    pub fn evaluate(&self, g: &(dyn Fn(u64) -> Complex64 + Sync)) -> HBDecomposition {
        let (p, p1) = (self.params.p, self.params.p1);
        let table: Vec<Complex64> = (p + 1..=p1).map(g).collect();
        let values = par::map_ordered(self.components.iter().collect(), |c: &Component| c.value(p, p1, &table));
        let mut s = ComplexSum::default();
        for v in &values {
            s.add(*v);
        }
        HBDecomposition {
            params: self.params.clone(),
            components: self.components.clone(),
            total: s.value(),
            values,
            component_count: self.components.len(),
        }
    }

    /// Largest coefficient ratio against τ5 log P over all components.
    pub fn max_coefficient_ratio(&self) -> f64 {
        self.components.iter().map(|c| c.coefficient_ratio(self.params.p1)).fold(0.0, f64::max)
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    vars: &[Var],
    nb: &[Block],
    mb: &[Block],
    hp: &HBParams,
    min_prod: u64,
    max_prod: u64,
    stack: &mut Vec<(Var, Block)>,
    f: &mut dyn FnMut(&[(Var, Block)]) -> Result<()>,
) -> Result<()> {
    let Some((&var, rest)) = vars.split_first() else {
        if max_prod > hp.p {
            f(stack)?;
        }
        return Ok(());
    };
    let list = if var == Var::Mu { mb } else { nb };
    for &b in list {
        let lo = min_prod.saturating_mul(b.min);
        if lo > hp.p1 {
            break;
        }
        stack.push((var, b));
        enumerate(rest, nb, mb, hp, lo, max_prod.saturating_mul(b.max), stack, f)?;
        stack.pop();
    }
    Ok(())
}

/// Decompose Σ_{P<n≤P1} Λ(n) G(n) for one G.
pub fn hb_decompose(g: &(dyn Fn(u64) -> Complex64 + Sync), hp: &HBParams) -> Result<HBDecomposition> {
    Ok(HBPlan::new(hp)?.evaluate(g))
}

/// Σ_{P<n≤P1} Λ(n) G(n) directly, and Σ Λ(n) |G(n)|.
pub fn direct_lambda_sum(g: &(dyn Fn(u64) -> Complex64 + Sync), p: u64, p1: u64) -> (Complex64, f64) {
    let spf = SpfTable::new(p1 as usize + 1);
    let mut s = ComplexSum::default();
    let mut m = crate::par::KahanSum::default();
    for n in p + 1..=p1 {
        let l = spf.mangoldt(n);
        if l != 0.0 {
            let v = g(n);
            s.add(v * l);
            m.add(l * v.norm());
        }
    }
    (s.value(), m.value())
}

/// Manifest entry for JSON output.
#[derive(Clone, Debug, Serialize)]
pub struct ManifestEntry {
    pub tag: Tag,
    pub j: u32,
    pub d_range: (f64, u64),
    pub l_range: (f64, u64),
    pub value: Complex64,
    pub coeff_max_ratio: f64,
}

impl HBDecomposition {
    pub fn manifest(&self) -> Vec<ManifestEntry> {
        self.components
            .iter()
            .zip(&self.values)
            .map(|(c, v)| ManifestEntry {
                tag: c.tag,
                j: c.j,
                d_range: c.d_range,
                l_range: c.l_range,
                value: *v,
                coeff_max_ratio: c.coefficient_ratio(self.params.p1),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_parameters() {
        let err = hb_params_default(1 << 10).unwrap_err();
        let Error::Param { violations } = err else { panic!() };
        assert!(violations.contains(&"U² ≤ Z".to_string()));
        // 2^18 P1 = 2^19 N against V^3 = 2^21 N: never the failing one
        assert!(!violations.contains(&"2¹⁸P₁ ≤ V³".to_string()));
        let big = hb_params_literal(1 << 40);
        assert_eq!(big.violations(), vec!["2 ≤ U < V ≤ Z ≤ P".to_string()]);
    }

    #[test]
    fn scaled_parameters_are_valid() {
        for e in 10..=20 {
            assert!(hb_params_scaled(1 << e).is_ok(), "2^{e}");
        }
        assert!(hb_params_scaled(1 << 9).is_err());
        assert_eq!(hb_params_scaled(1 << 12).unwrap().mu_cut(), 21);
    }

    #[test]
    fn blocks_partition_the_range() {
        let b = blocks(100, &[2.0, 9.5, 40.0]);
        let mut next = 1;
        for blk in &b {
            assert_eq!(blk.min, next);
            next = blk.max + 1;
        }
        assert_eq!(next, 101);
        assert!(b.iter().any(|x| x.edge == 9.5));
    }

    #[test]
    fn identity_with_constant_g() {
        let hp = hb_params_scaled(1 << 10).unwrap();
        let g = |_: u64| Complex64::new(1.0, 0.0);
        let d = hb_decompose(&g, &hp).unwrap();
        let (want, _) = direct_lambda_sum(&g, hp.p, hp.p1);
        assert!((d.total - want).norm() <= 1e-9 * want.norm(), "{} vs {}", d.total, want);
        assert!(d.components.iter().all(|c| c.coefficient_ratio(hp.p1) <= 1.0));
    }

    #[test]
    fn pieces_are_dyadic() {
        for (lo, hi) in pieces(1, 1000) {
            assert!(hi as f64 <= 2.0 * lo);
        }
        assert!(type2_pieces(2, 10, 2.0, 20.0).is_none());
        let t = type2_pieces(3, 30, 2.0, 20.0).unwrap();
        assert_eq!(t.first().unwrap().0, 2.0);
        assert!(t.iter().all(|&(l, _)| (2.0..=20.0).contains(&l)));
    }
}
