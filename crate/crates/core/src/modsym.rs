//! Modular symbols and their continued-fraction expansion into unimodular
//! symbols.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::FqElem;
use crate::gaussian::{euc_divmod, ggcd, GMatrix2, GaussianInt};
use crate::manin::{ManinSpace, ManinVector};

/// A cusp `p/q` as a column `(p, q)`; `(1, 0)` is infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cusp {
    pub p: GaussianInt,
    pub q: GaussianInt,
}

impl Cusp {
    /// Build a cusp, reducing the column to lowest terms.
    pub fn new(p: GaussianInt, q: GaussianInt) -> Result<Self> {
        let g = ggcd(&p, &q)?;
        if g.is_one() {
            return Ok(Cusp { p, q });
        }
        let p = GaussianInt::div_exact(&p, &g).expect("gcd divides");
        let q = GaussianInt::div_exact(&q, &g).expect("gcd divides");
        Ok(Cusp { p, q })
    }

    pub fn infinity() -> Self {
        Cusp { p: GaussianInt::one(), q: GaussianInt::zero() }
    }

    pub fn zero() -> Self {
        Cusp { p: GaussianInt::zero(), q: GaussianInt::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero()
    }

    /// Equality as points of `P^1(K)`.
    pub fn same_point(&self, o: &Cusp) -> bool {
        &self.p * &o.q == &o.p * &self.q
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            write!(f, "oo")
        } else {
            write!(f, "({})/({})", self.p, self.q)
        }
    }
}

/// The modular symbol `[v1, v2]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModSym {
    pub v1: Cusp,
    pub v2: Cusp,
}

impl ModSym {
    pub fn new(v1: Cusp, v2: Cusp) -> Self {
        ModSym { v1, v2 }
    }

    /// `[g(0), g(oo)]`.
    pub fn of_matrix(g: &GMatrix2) -> Result<Self> {
        Ok(ModSym { v1: Cusp::new(g.b.clone(), g.d.clone())?, v2: Cusp::new(g.a.clone(), g.c.clone())? })
    }

    /// `g * [v1, v2]`.
    pub fn act_left(&self, g: &GMatrix2) -> Result<Self> {
        let (p1, q1) = g.act_column(&self.v1.p, &self.v1.q);
        let (p2, q2) = g.act_column(&self.v2.p, &self.v2.q);
        Ok(ModSym { v1: Cusp::new(p1, q1)?, v2: Cusp::new(p2, q2)? })
    }
}

/// Partial quotients and convergent matrices of `alpha/beta`.
#[derive(Clone, Debug)]
pub struct CFExpansion {
    pub partial_quotients: Vec<GaussianInt>,
    /// `gamma_{-1}, gamma_0, ..., gamma_k`.
    pub gammas: Vec<GMatrix2>,
}

impl CFExpansion {
    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// The convergent `(p_n, q_n)` for `n >= -1`, read off `gamma_n`.
    pub fn convergent(&self, n: isize) -> (GaussianInt, GaussianInt) {
        let g = &self.gammas[(n + 1) as usize];
        if n % 2 == 0 {
            (-&g.a, -&g.c)
        } else {
            (g.a.clone(), g.c.clone())
        }
    }
}

/// Continued-fraction expansion of `alpha/beta` with the rounding `floor_q`.
pub fn cf_expand(alpha: &GaussianInt, beta: &GaussianInt) -> Result<CFExpansion> {
    if !ggcd(alpha, beta)?.is_one() {
        return Err(Error::NotCoprime(alpha.clone(), beta.clone()));
    }
    let mut partial_quotients = Vec::new();
    let mut gammas = vec![GMatrix2::identity()];
    let (mut p2, mut q2) = (GaussianInt::zero(), GaussianInt::one());
    let (mut p1, mut q1) = (GaussianInt::one(), GaussianInt::zero());
    let (mut num, mut den) = (alpha.clone(), beta.clone());
    let mut n = 0usize;
    while !den.is_zero() {
        let (a, r) = euc_divmod(&num, &den)?;
        let p = &(&a * &p1) + &p2;
        let q = &(&a * &q1) + &q2;
        let (sp, sq) = if n % 2 == 1 { (p.clone(), q.clone()) } else { (-&p, -&q) };
        gammas.push(GMatrix2::new(sp, p1.clone(), sq, q1.clone()));
        partial_quotients.push(a);
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
        num = std::mem::replace(&mut den, r);
        n += 1;
    }
    Ok(CFExpansion { partial_quotients, gammas })
}

/// `[v1, v2] = -[0, v1] + [0, v2]`, dropping `[0, 0]` terms.
pub fn split_symbol(s: &ModSym) -> Vec<(i8, Cusp)> {
    if s.v1.same_point(&s.v2) {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(2);
    if !s.v1.is_zero() {
        out.push((-1, s.v1.clone()));
    }
    if !s.v2.is_zero() {
        out.push((1, s.v2.clone()));
    }
    out
}

/// Signed unimodular matrices `gamma` with `s = sum sign * [gamma(0), gamma(oo)]`.
pub fn unimodular_terms(s: &ModSym) -> Result<Vec<(i8, GMatrix2)>> {
    let mut out = Vec::new();
    for (sign, c) in split_symbol(s) {
        for g in cf_expand(&c.p, &c.q)?.gammas {
            out.push((sign, g));
        }
    }
    Ok(out)
}

/// Convert `s (x) w` into Manin-symbol coordinates.
pub fn to_manin(s: &ModSym, w: &[FqElem], space: &ManinSpace) -> Result<ManinVector> {
    let ws = space.weight();
    if w.len() != ws.dim() {
        return Err(Error::Dimension { expected: ws.dim(), got: w.len() });
    }
    let f = space.field();
    let mut out = ManinVector::new(f);
    for (sign, g) in unimodular_terms(s)? {
        let (p, coef) = space.term(&g)?;
        if coef.is_zero() {
            continue;
        }
        let coef = if sign < 0 { f.neg(coef) } else { coef };
        let inv = g.inverse().expect("unimodular");
        let v = ws.action(&inv).apply(w);
        out.add_vec(p, &v, coef);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gi(re: i64, im: i64) -> GaussianInt {
        GaussianInt::small(re, im)
    }

    #[test]
    fn worked_example() {
        let e = cf_expand(&gi(3, 4), &gi(1, 2)).unwrap();
        assert_eq!(e.partial_quotients, vec![gi(2, 0), gi(1, 2)]);
        assert_eq!(e.convergent(1), (gi(3, 4), gi(1, 2)));
        let (p0, q0) = e.convergent(0);
        let (p1, q1) = e.convergent(1);
        assert_eq!(&(&p1 * &q0) - &(&p0 * &q1), gi(1, 0));
        assert!(e.gammas.iter().all(|g| g.is_sl2()));
    }

    #[test]
    fn zero_and_infinity() {
        let e = cf_expand(&gi(0, 0), &gi(1, 0)).unwrap();
        assert_eq!(e.partial_quotients, vec![gi(0, 0)]);
        assert_eq!(e.convergent(0).0, gi(0, 0));
        let inf = cf_expand(&gi(1, 0), &gi(0, 0)).unwrap();
        assert_eq!(inf.gammas, vec![GMatrix2::identity()]);
        assert!(cf_expand(&gi(2, 0), &gi(4, 0)).is_err());
    }

    #[test]
    fn split_examples() {
        let s = ModSym::new(Cusp::zero(), Cusp::infinity());
        assert_eq!(split_symbol(&s), vec![(1, Cusp::infinity())]);
        let v = Cusp::new(gi(2, 1), gi(3, 0)).unwrap();
        assert!(split_symbol(&ModSym::new(v.clone(), v)).is_empty());
        let r = ModSym::new(Cusp::infinity(), Cusp::zero());
        assert_eq!(split_symbol(&r), vec![(-1, Cusp::infinity())]);
    }
}
