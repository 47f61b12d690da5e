//! The projective line `P^1(O/n)`, indexing the cosets of `Gamma_0(n)` in
//! `GL_2(O)`.
//!
//! Normalization works one prime power `p^e || n` at a time. Locally a point
//! `(c : d)` with `c` a unit is written `(1 : d/c)` (scaler `c`); otherwise `d`
//! is a unit and the point is `(c/d : 1)` (scaler `d`). Local indices are
//! `hnf_index(d/c)` in the first case and `N(p^e) + hnf_index((c/d)/pi)` in the
//! second, and the global index is mixed radix over the factors (first factor
//! most significant). Local data are glued with CRT idempotents.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gaussian::{factor, ggcd, unimodular_complete, GMatrix2, GaussianInt, Hnf};

/// Arithmetic in `O/(m)` on reduced coordinate pairs.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    pub modulus: GaussianInt,
    pub hnf: Hnf,
}

impl ResidueRing {
    pub fn new(m: &GaussianInt) -> Result<Self> {
        Ok(ResidueRing { modulus: m.clone(), hnf: Hnf::new(m)? })
    }

    pub fn size(&self) -> usize {
        self.hnf.size() as usize
    }

    #[inline]
    pub fn reduce(&self, z: &GaussianInt) -> (i64, i64) {
        self.hnf.reduce(z)
    }

    #[inline]
    pub fn mul(&self, a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
        self.hnf.reduce_small(a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
    }

    #[inline]
    pub fn add(&self, a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
        self.hnf.reduce_small(a.0 + b.0, a.1 + b.1)
    }

    #[inline]
    pub fn index(&self, a: (i64, i64)) -> usize {
        self.hnf.index(a.0, a.1)
    }

    #[inline]
    pub fn element(&self, idx: usize) -> (i64, i64) {
        self.hnf.element(idx)
    }
}

/// One prime-power factor `pi^e` of the level.
#[derive(Clone, Debug)]
struct LocalFactor {
    pi: (i64, i64),
    ring: ResidueRing,
    /// Ring modulo `pi^{e-1}` (the unit ring when `e = 1`).
    sub: ResidueRing,
    /// Inverse index per residue index, `u32::MAX` for non-units.
    inv: Vec<u32>,
    /// For residues in `p`: the index of `x/pi` modulo `pi^{e-1}`.
    div_pi: Vec<u32>,
    /// Local idempotent (global residue) that is 1 here and 0 elsewhere.
    idempotent: (i64, i64),
}

impl LocalFactor {
    fn new(pi: &GaussianInt, exp: u32) -> Result<Self> {
        let modulus = pi.pow(exp);
        let ring = ResidueRing::new(&modulus)?;
        let sub = ResidueRing::new(&pi.pow(exp - 1))?;
        let pi_small = pi.to_i64_pair().expect("small prime");
        let n = ring.size();
        let mut inv = vec![u32::MAX; n];
        let mut div_pi = vec![u32::MAX; n];
        for idx in 0..n {
            let (x, y) = ring.element(idx);
            let z = GaussianInt::small(x, y);
            if !pi.divides(&z) {
                if inv[idx] == u32::MAX {
                    let g = ggcd(&z, &modulus)?;
                    debug_assert!(g.is_one());
                    let (_, s, _) = crate::gaussian::xgcd(&z, &modulus)?;
                    let j = ring.index(ring.reduce(&s));
                    inv[idx] = j as u32;
                    inv[j] = idx as u32;
                }
            } else {
                let q = GaussianInt::div_exact(&z, pi).expect("divisible");
                div_pi[idx] = sub.index(sub.reduce(&q)) as u32;
            }
        }
        Ok(LocalFactor { pi: pi_small, ring, sub, inv, div_pi, idempotent: (0, 0) })
    }

    fn norm(&self) -> usize {
        self.ring.size()
    }

    fn p1_size(&self) -> usize {
        self.norm() + self.sub.size()
    }

    #[inline]
    fn is_unit(&self, a: (i64, i64)) -> bool {
        self.inv[self.ring.index(a)] != u32::MAX
    }

    #[inline]
    fn inverse(&self, a: (i64, i64)) -> (i64, i64) {
        self.ring.element(self.inv[self.ring.index(a)] as usize)
    }

    /// Local normalization: `(index, scaler)`, or `None` if not unimodular.
    #[inline]
    fn normalize(&self, c: (i64, i64), d: (i64, i64)) -> Option<(usize, (i64, i64))> {
        if self.is_unit(c) {
            let x = self.ring.mul(d, self.inverse(c));
            Some((self.ring.index(x), c))
        } else if self.is_unit(d) {
            let y = self.ring.mul(c, self.inverse(d));
            let k = self.div_pi[self.ring.index(y)] as usize;
            Some((self.norm() + k, d))
        } else {
            None
        }
    }

    /// Canonical local representative of a local index.
    fn point(&self, idx: usize) -> ((i64, i64), (i64, i64)) {
        if idx < self.norm() {
            ((1, 0), self.ring.element(idx))
        } else {
            let (x, y) = self.sub.element(idx - self.norm());
            let c = self.ring.mul((x, y), self.pi);
            (c, (1, 0))
        }
    }
}

/// A normalized point of `P^1(O/n)`, with canonical coordinates reduced mod `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct P1Point {
    pub c: GaussianInt,
    pub d: GaussianInt,
}

/// The scaler of a normalization, as an index into the residues of `O/n`.
pub type Scaler = usize;

/// Enumeration of `P^1(O/n)` with normalization, lifts and the right action.
#[derive(Clone, Debug)]
pub struct P1Table {
    level: GaussianInt,
    ring: ResidueRing,
    factors: Vec<LocalFactor>,
    strides: Vec<usize>,
    points: Vec<((i64, i64), (i64, i64))>,
    lifts: Vec<GMatrix2>,
}

impl P1Table {
    /// Build the table for the level `n` (a generator of the ideal).
    pub fn new(level: &GaussianInt) -> Result<Self> {
        if level.is_zero() || level.is_unit() {
            return Err(Error::InvalidInput(format!("level {level} must be a nonzero non-unit")));
        }
        let ring = ResidueRing::new(level)?;
        let (_, facs) = factor(level)?;
        let mut factors: Vec<LocalFactor> = facs.iter().map(|(p, e)| LocalFactor::new(p, *e)).collect::<Result<_>>()?;
        // CRT idempotents: e_k = M_k * (M_k^{-1} mod q_k), M_k = n / q_k
        for k in 0..factors.len() {
            let qk = factors[k].ring.modulus.clone();
            let mk = GaussianInt::div_exact(level, &qk).expect("factor divides");
            let e = if factors.len() == 1 {
                GaussianInt::one()
            } else {
                let (g, s, _) = crate::gaussian::xgcd(&mk, &qk)?;
                debug_assert!(g.is_one());
                &mk * &s
            };
            factors[k].idempotent = ring.reduce(&e);
        }
        let mut strides = vec![1usize; factors.len()];
        for k in (0..factors.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * factors[k + 1].p1_size();
        }
        let total: usize = factors.iter().map(|f| f.p1_size()).product();
        let mut table = P1Table { level: level.clone(), ring, factors, strides, points: Vec::new(), lifts: Vec::new() };
        table.points = (0..total).map(|idx| table.glue(idx)).collect();
        table.lifts = (0..total).map(|idx| table.compute_lift(idx)).collect::<Result<_>>()?;
        Ok(table)
    }

    fn glue(&self, idx: usize) -> ((i64, i64), (i64, i64)) {
        let mut c = (0, 0);
        let mut d = (0, 0);
        for (k, f) in self.factors.iter().enumerate() {
            let local = (idx / self.strides[k]) % f.p1_size();
            let (lc, ld) = f.point(local);
            c = self.ring.add(c, self.ring.mul(lc, f.idempotent));
            d = self.ring.add(d, self.ring.mul(ld, f.idempotent));
        }
        (c, d)
    }

    fn compute_lift(&self, idx: usize) -> Result<GMatrix2> {
        let ((cx, cy), (dx, dy)) = self.points[idx];
        let c = GaussianInt::small(cx, cy);
        let d = GaussianInt::small(dx, dy);
        let c0 = if c.is_zero() { self.level.clone() } else { c };
        let mut radius = 0i64;
        loop {
            for tr in -radius..=radius {
                for ti in -radius..=radius {
                    if tr.abs().max(ti.abs()) != radius {
                        continue;
                    }
                    let t = GaussianInt::small(tr, ti);
                    let d1 = &d + &(&t * &self.level);
                    if d1.is_zero() && !c0.is_unit() {
                        continue;
                    }
                    if ggcd(&c0, &d1)?.is_one() {
                        let m = unimodular_complete(&d1, &(-&c0))?;
                        // m = [[d1, delta], [-c0, gamma]], gamma*d1 + delta*c0 = 1
                        return Ok(GMatrix2::new(m.d.clone(), -&m.b, c0, d1));
                    }
                }
            }
            radius += 1;
            if radius > 10_000 {
                return Err(Error::Check(format!("no coprime lift for point {idx}")));
            }
        }
    }

    pub fn level(&self) -> &GaussianInt {
        &self.level
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    /// `N(n) * prod_{p | n} (1 + 1/N(p))`.
    pub fn expected_size(&self) -> usize {
        self.factors.iter().map(|f| f.norm() + f.norm() / (f.pi.0 * f.pi.0 + f.pi.1 * f.pi.1) as usize).product()
    }

    pub fn point(&self, idx: usize) -> P1Point {
        let ((cx, cy), (dx, dy)) = self.points[idx];
        P1Point { c: GaussianInt::small(cx, cy), d: GaussianInt::small(dx, dy) }
    }

    pub fn points(&self) -> impl Iterator<Item = P1Point> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }

    /// A matrix in `SL_2(O)` whose bottom row is the canonical representative.
    pub fn lift(&self, idx: usize) -> &GMatrix2 {
        &self.lifts[idx]
    }

    /// Normalize reduced pairs. Returns `(index, scaler)` with
    /// `(c, d) = u * point` componentwise mod n, where `u` is the scaler.
    #[inline]
    pub fn normalize_small(&self, c: (i64, i64), d: (i64, i64)) -> Option<(usize, Scaler)> {
        let mut idx = 0usize;
        let mut u = (0i64, 0i64);
        for (k, f) in self.factors.iter().enumerate() {
            let lc = f.ring.hnf.reduce_small(c.0, c.1);
            let ld = f.ring.hnf.reduce_small(d.0, d.1);
            let (li, s) = f.normalize(lc, ld)?;
            idx += li * self.strides[k];
            u = if self.factors.len() == 1 { s } else { self.ring.add(u, self.ring.mul(s, f.idempotent)) };
        }
        Some((idx, self.ring.index(u)))
    }

    pub fn normalize(&self, c: &GaussianInt, d: &GaussianInt) -> Result<(usize, Scaler)> {
        self.normalize_small(self.ring.reduce(c), self.ring.reduce(d))
            .ok_or_else(|| Error::InvalidInput(format!("({c} : {d}) is not unimodular modulo {}", self.level)))
    }

    /// The scaler as a Gaussian integer reduced mod n.
    pub fn scaler_element(&self, u: Scaler) -> GaussianInt {
        let (x, y) = self.ring.element(u);
        GaussianInt::small(x, y)
    }

    /// Normalize `(c, d) * g` for the point at `idx`.
    pub fn act_right(&self, idx: usize, g: &GMatrix2) -> Result<(usize, Scaler)> {
        let (c, d) = self.points[idx];
        let r = &self.ring;
        let (a, b, gc, gd) = (r.reduce(&g.a), r.reduce(&g.b), r.reduce(&g.c), r.reduce(&g.d));
        let c2 = r.add(r.mul(c, a), r.mul(d, gc));
        let d2 = r.add(r.mul(c, b), r.mul(d, gd));
        self.normalize_small(c2, d2)
            .ok_or_else(|| Error::InvalidInput(format!("determinant of {g} is not invertible modulo {}", self.level)))
    }

    /// One `c d index` line per point.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (k, p) in self.points().enumerate() {
            let _ = writeln!(s, "{} {} {}", p.c, p.d, k);
        }
        s
    }
}
