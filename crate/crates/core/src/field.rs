//! Small finite fields `F_{l^k}`, reduction maps `O -> O/p`, and the
//! quadratic character of a prime.
//!
//! Elements are stored as a single index `c_0 + c_1 l + ... + c_{k-1} l^{k-1}`
//! of their coefficient vector in the polynomial basis, so elements of the
//! prime field have the same index in every extension. Multiplication goes
//! through exp/log tables; addition uses a full table when the field is small.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gaussian::{is_prime_u64, GaussianInt};

/// Largest supported field order (indices must fit a `u16`).
pub const MAX_ORDER: u64 = 1 << 16;
const ADD_TABLE_LIMIT: u32 = 2500;

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FqElem(pub u16);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

struct Inner {
    ell: u32,
    degree: u32,
    /// Monic modulus, coefficients from low to high degree (length degree+1).
    modulus: Vec<u32>,
    order: u32,
    /// `exp[k] = g^k` for `k < 2(q-1)`.
    exp: Vec<u16>,
    log: Vec<u32>,
    add: Option<Vec<u16>>,
    neg: Vec<u16>,
    frob: Vec<u16>,
}

/// The field `F_{l^k}` with a deterministic modulus.
#[derive(Clone)]
pub struct FqField(Arc<Inner>);

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.ell == other.0.ell && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FqField {}

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

// Dense polynomial helpers over F_l (coefficients low to high).

fn poly_trim(p: &mut Vec<u32>) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], ell: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % ell;
        }
    }
    poly_rem(&prod, m, ell)
}

/// Remainder modulo a monic polynomial.
fn poly_rem(a: &[u32], m: &[u32], ell: u32) -> Vec<u32> {
    let k = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > k {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let off = r.len() - k;
            for (i, &c) in m[..k].iter().enumerate() {
                r[off + i] = (r[off + i] + (ell - lead) * c % ell) % ell;
            }
        }
    }
    r.resize(k, 0);
    r
}

fn coeffs_to_index(c: &[u32], ell: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &x| acc * ell + x)
}

fn index_to_coeffs(mut idx: u32, ell: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let c = idx % ell;
            idx /= ell;
            c
        })
        .collect()
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn poly_powmod(base: &[u32], mut e: u64, m: &[u32], ell: u32) -> Vec<u32> {
    let k = m.len() - 1;
    let mut acc = vec![0u32; k];
    acc[0] = 1;
    let mut b = base.to_vec();
    b.resize(k, 0);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, ell);
        }
        b = poly_mulmod(&b, &b, m, ell);
        e >>= 1;
    }
    acc
}

fn is_irreducible(m: &[u32], ell: u32) -> bool {
    let k = m.len() - 1;
    // no monic factor of degree 1..=k/2
    for d in 1..=k / 2 {
        let count = (ell as u64).pow(d as u32);
        for idx in 0..count {
            let mut f = index_to_coeffs(idx as u32, ell, d as u32);
            f.push(1);
            let r = poly_rem(m, &f, ell);
            let mut r2 = r.clone();
            poly_trim(&mut r2);
            if r2.len() == 1 && r2[0] == 0 {
                return false;
            }
        }
    }
    true
}

fn least_non_residue(ell: u32) -> u32 {
    (2..ell)
        .find(|&c| {
            let mut acc = 1u64;
            for _ in 0..(ell - 1) / 2 {
                acc = acc * c as u64 % ell as u64;
            }
            acc == ell as u64 - 1
        })
        .expect("odd prime has a non-residue")
}

impl FqField {
    /// Build `F_{ell^degree}`.
    ///
    /// Degree-two moduli are `x^2 + 1` when `ell = 3 mod 4` and `x^2 - c` with
    /// `c` the least non-residue otherwise; higher degrees use the least monic
    /// irreducible polynomial in index order.
    pub fn new(ell: u64, degree: u32) -> Result<Self> {
        if ell == 2 {
            return Err(Error::Field("l = 2 is ramified in Z[i] and not supported".into()));
        }
        if !is_prime_u64(ell) {
            return Err(Error::Field(format!("{ell} is not prime")));
        }
        if degree == 0 {
            return Err(Error::Field("degree must be positive".into()));
        }
        let order = ell
            .checked_pow(degree)
            .filter(|&q| q < MAX_ORDER)
            .ok_or_else(|| Error::Field(format!("{ell}^{degree} is too large")))?;
        let ell32 = ell as u32;
        let modulus: Vec<u32> = match degree {
            1 => vec![0, 1],
            2 if ell % 4 == 3 => vec![1, 0, 1],
            2 => vec![ell32 - least_non_residue(ell32), 0, 1],
            k => {
                let count = order;
                (0..count)
                    .map(|idx| {
                        let mut m = index_to_coeffs(idx as u32, ell32, k);
                        m.push(1);
                        m
                    })
                    .find(|m| m[0] != 0 && is_irreducible(m, ell32))
                    .expect("irreducible polynomials exist in every degree")
            }
        };
        Ok(Self::with_modulus(ell32, modulus))
    }

    fn with_modulus(ell: u32, modulus: Vec<u32>) -> Self {
        let k = (modulus.len() - 1) as u32;
        let q = ell.pow(k);
        let elem = |idx: u32| index_to_coeffs(idx, ell, k);
        let gen = (1..q)
            .find(|&g| {
                let gc = elem(g);
                prime_factors((q - 1) as u64).iter().all(|&p| {
                    let r = poly_powmod(&gc, (q as u64 - 1) / p, &modulus, ell);
                    coeffs_to_index(&r, ell) != 1
                })
            })
            .unwrap_or(1);
        let mut exp = vec![0u16; 2 * (q as usize - 1).max(1)];
        let mut log = vec![0u32; q as usize];
        let gc = elem(gen);
        let mut cur = elem(1);
        for e in 0..(q - 1) as usize {
            let idx = coeffs_to_index(&cur, ell);
            exp[e] = idx as u16;
            exp[e + (q as usize - 1)] = idx as u16;
            log[idx as usize] = e as u32;
            cur = poly_mulmod(&cur, &gc, &modulus, ell);
        }
        let add_digits = |a: u32, b: u32| -> u32 {
            let (ca, cb) = (elem(a), elem(b));
            let s: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % ell).collect();
            coeffs_to_index(&s, ell)
        };
        let neg: Vec<u16> = (0..q)
            .map(|a| {
                let c: Vec<u32> = elem(a).iter().map(|x| (ell - x) % ell).collect();
                coeffs_to_index(&c, ell) as u16
            })
            .collect();
        let add = (q <= ADD_TABLE_LIMIT).then(|| {
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = add_digits(a, b) as u16;
                }
            }
            t
        });
        let frob: Vec<u16> =
            (0..q).map(|a| coeffs_to_index(&poly_powmod(&elem(a), ell as u64, &modulus, ell), ell) as u16).collect();
        FqField(Arc::new(Inner { ell, degree: k, modulus, order: q, exp, log, add, neg, frob }))
    }

    pub fn ell(&self) -> u32 {
        self.0.ell
    }

    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    pub fn order(&self) -> u32 {
        self.0.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// Textual descriptor such as `F_49[x^2+1]`, used in cache headers.
    pub fn descriptor(&self) -> String {
        let m = &self.0.modulus;
        if self.0.degree == 1 {
            return format!("F_{}", self.0.ell);
        }
        let mut terms = Vec::new();
        for (k, &c) in m.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            terms.push(match (c, k) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}{mono}"),
            });
        }
        format!("F_{}[{}]", self.0.order, terms.join("+"))
    }

    #[inline]
    pub fn zero(&self) -> FqElem {
        FqElem::ZERO
    }

    #[inline]
    pub fn one(&self) -> FqElem {
        FqElem::ONE
    }

    /// The image of an integer in the prime field.
    pub fn from_i64(&self, v: i64) -> FqElem {
        FqElem(v.rem_euclid(self.0.ell as i64) as u16)
    }

    pub fn from_coeffs(&self, c: &[i64]) -> FqElem {
        let ell = self.0.ell as i64;
        let mut cs: Vec<u32> = c.iter().map(|x| x.rem_euclid(ell) as u32).collect();
        cs.resize(self.0.degree as usize, 0);
        FqElem(coeffs_to_index(&cs, self.0.ell) as u16)
    }

    pub fn coeffs(&self, x: FqElem) -> Vec<u32> {
        index_to_coeffs(x.0 as u32, self.0.ell, self.0.degree)
    }

    /// The generator `x` of the polynomial basis (equal to a prime-field
    /// element when the degree is one).
    pub fn x(&self) -> FqElem {
        if self.0.degree == 1 {
            // x = 0 modulo the modulus x
            FqElem::ZERO
        } else {
            FqElem(self.0.ell as u16)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.0.order).map(|i| FqElem(i as u16))
    }

    pub fn in_prime_field(&self, x: FqElem) -> bool {
        (x.0 as u32) < self.0.ell
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        match &self.0.add {
            Some(t) => FqElem(t[a.index() * self.0.order as usize + b.index()]),
            None => {
                let ell = self.0.ell;
                let (mut x, mut y) = (a.0 as u32, b.0 as u32);
                let (mut out, mut place) = (0u32, 1u32);
                while x > 0 || y > 0 {
                    out += ((x % ell + y % ell) % ell) * place;
                    x /= ell;
                    y /= ell;
                    place *= ell;
                }
                FqElem(out as u16)
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        FqElem(self.0.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if a.0 == 0 || b.0 == 0 {
            return FqElem::ZERO;
        }
        let i = self.0.log[a.index()] + self.0.log[b.index()];
        FqElem(self.0.exp[i as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: FqElem) -> Option<FqElem> {
        if a.0 == 0 {
            return None;
        }
        let q1 = self.0.order - 1;
        let l = self.0.log[a.index()];
        Some(FqElem(self.0.exp[((q1 - l) % q1) as usize]))
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        let bi = self.inv(b).ok_or(Error::DivisionByZero)?;
        Ok(self.mul(a, bi))
    }

    pub fn pow(&self, a: FqElem, e: u64) -> FqElem {
        if e == 0 {
            return FqElem::ONE;
        }
        if a.0 == 0 {
            return FqElem::ZERO;
        }
        let q1 = (self.0.order - 1) as u64;
        let l = self.0.log[a.index()] as u64;
        FqElem(self.0.exp[((l * (e % q1)) % q1) as usize])
    }

    /// `x -> x^l`.
    #[inline]
    pub fn frobenius(&self, a: FqElem) -> FqElem {
        FqElem(self.0.frob[a.index()])
    }

    pub fn frobenius_pow(&self, a: FqElem, k: u32) -> FqElem {
        (0..k).fold(a, |x, _| self.frobenius(x))
    }

    /// Logarithm to the fixed primitive element (`None` for zero).
    pub fn log(&self, a: FqElem) -> Option<u32> {
        (a.0 != 0).then(|| self.0.log[a.index()])
    }

    /// The table `x -> f*x` over all elements.
    pub fn mul_map(&self, f: FqElem) -> Vec<u16> {
        self.elements().map(|x| self.mul(f, x).0).collect()
    }

    /// The full addition table, when the field is small enough to have one.
    pub fn add_table(&self) -> Option<&[u16]> {
        self.0.add.as_deref()
    }

    /// Serialized coefficient vector, e.g. `[3,1]`.
    pub fn format(&self, x: FqElem) -> String {
        let c: Vec<String> = self.coeffs(x).iter().map(|v| v.to_string()).collect();
        format!("[{}]", c.join(","))
    }

    pub fn parse(&self, s: &str) -> Result<FqElem> {
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("bad field element {s:?}")))?;
        let c: Vec<i64> = body
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad coefficient in {s:?}"))))
            .collect::<Result<_>>()?;
        if c.len() != self.0.degree as usize {
            return Err(Error::Parse(format!("{s:?} has the wrong length")));
        }
        Ok(self.from_coeffs(&c))
    }

    /// Lift a prime-field element to a signed representative in `(-l/2, l/2]`.
    pub fn to_signed(&self, x: FqElem) -> Option<i64> {
        if !self.in_prime_field(x) {
            return None;
        }
        let (v, l) = (x.0 as i64, self.0.ell as i64);
        Some(if 2 * v > l { v - l } else { v })
    }

    /// Field embedding into `target`, as an image table indexed by element.
    ///
    /// Requires the same characteristic and `degree | target.degree`. The
    /// generator `x` maps to the least-index root of this field's modulus.
    pub fn embedding_into(&self, target: &FqField) -> Result<Vec<FqElem>> {
        if self.ell() != target.ell() || target.degree() % self.degree() != 0 {
            return Err(Error::Field(format!("cannot embed {} into {}", self.descriptor(), target.descriptor())));
        }
        if self.degree() == 1 {
            return Ok(self.elements().collect());
        }
        let m: Vec<FqElem> = self.modulus().iter().map(|&c| FqElem(c as u16)).collect();
        let root = target
            .elements()
            .find(|&r| target.poly_eval(&m, r).is_zero())
            .ok_or_else(|| Error::Field("modulus has no root in target".into()))?;
        Ok(self
            .elements()
            .map(|x| {
                let c = self.coeffs(x);
                let mut acc = FqElem::ZERO;
                for &ci in c.iter().rev() {
                    acc = target.add(target.mul(acc, root), FqElem(ci as u16));
                }
                acc
            })
            .collect())
    }

    /// Evaluate a polynomial (coefficients low to high) at `x`.
    pub fn poly_eval(&self, p: &[FqElem], x: FqElem) -> FqElem {
        p.iter().rev().fold(FqElem::ZERO, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Divide by `(x - a)`, assuming `a` is a root; returns the quotient.
    pub fn poly_deflate(&self, p: &[FqElem], a: FqElem) -> Vec<FqElem> {
        let n = p.len() - 1;
        let mut q = vec![FqElem::ZERO; n];
        let mut carry = FqElem::ZERO;
        for k in (0..n).rev() {
            carry = self.add(self.mul(carry, a), p[k + 1]);
            q[k] = carry;
        }
        q
    }

    pub fn poly_mul(&self, a: &[FqElem], b: &[FqElem]) -> Vec<FqElem> {
        let mut out = vec![FqElem::ZERO; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        out
    }
}

/// All roots of `p` in the field, with multiplicity, in increasing index order.
pub fn roots_in_field(field: &FqField, p: &[FqElem]) -> Result<Vec<FqElem>> {
    let mut p: Vec<FqElem> = p.to_vec();
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    if p.iter().all(|c| c.is_zero()) {
        return Err(Error::InvalidInput("zero polynomial has every element as a root".into()));
    }
    let mut roots = Vec::new();
    for a in field.elements() {
        while p.len() > 1 && field.poly_eval(&p, a).is_zero() {
            p = field.poly_deflate(&p, a);
            roots.push(a);
        }
        if p.len() == 1 {
            break;
        }
    }
    Ok(roots)
}

/// Reduction `O -> O/p` composed with an embedding of the residue field into
/// `field`.
#[derive(Clone, Debug)]
pub struct ResidueMap {
    pub prime: GaussianInt,
    pub field: FqField,
    pub i_image: FqElem,
}

impl ResidueMap {
    /// For a split or inert prime `p` of residue characteristic `field.ell()`.
    ///
    /// Split `p = a+bi` sends `i` to `-a/b`; an inert `p = (l)` sends `i` to
    /// `x` when the modulus is `x^2+1`, otherwise to the least-index root.
    pub fn new(prime: &GaussianInt, field: &FqField) -> Result<Self> {
        let ell = field.ell() as i64;
        let n = prime.norm().to_i64().ok_or_else(|| Error::InvalidInput("prime too large".into()))?;
        let i_image = if n == ell {
            let (a, b) = prime.to_i64_pair().expect("small");
            let (fa, fb) = (field.from_i64(a), field.from_i64(b));
            let binv =
                field.inv(fb).ok_or_else(|| Error::InvalidInput(format!("{prime} is not a prime over {ell}")))?;
            field.neg(field.mul(fa, binv))
        } else if n == ell * ell && prime.canonical() == GaussianInt::small(ell, 0) {
            if field.degree() % 2 != 0 {
                return Err(Error::Field(format!("residue field of ({ell}) does not embed in {}", field.descriptor())));
            }
            if field.degree() == 2 && field.modulus() == [1, 0, 1] {
                field.x()
            } else {
                let minus_one = field.neg(FqElem::ONE);
                field.elements().find(|&r| field.mul(r, r) == minus_one).expect("degree is even")
            }
        } else {
            return Err(Error::InvalidInput(format!("{prime} is not a prime above {ell}")));
        };
        Ok(ResidueMap { prime: prime.clone(), field: field.clone(), i_image })
    }

    pub fn reduce(&self, z: &GaussianInt) -> FqElem {
        let ell = self.field.ell() as u64;
        let re = FqElem(z.re.rem_u64(ell) as u16);
        let im = FqElem(z.im.rem_u64(ell) as u16);
        self.field.add(re, self.field.mul(im, self.i_image))
    }

    /// Reduction of a small pair `(re, im)`.
    #[inline]
    pub fn reduce_small(&self, re: i64, im: i64) -> FqElem {
        let f = &self.field;
        f.add(f.from_i64(re), f.mul(f.from_i64(im), self.i_image))
    }
}

/// The quadratic character of `(O/p)^*` with values in a target field.
#[derive(Clone, Debug)]
pub struct QuadraticCharacter {
    residue: ResidueMap,
    exponent: u64,
    target: FqField,
}

impl QuadraticCharacter {
    pub fn new(prime: &GaussianInt, target: &FqField) -> Result<Self> {
        let n = prime
            .norm()
            .to_i64()
            .filter(|&n| n > 1)
            .ok_or_else(|| Error::InvalidInput(format!("{prime} is not a prime")))? as u64;
        if n % 2 == 0 {
            return Err(Error::InvalidInput(format!("{prime} has even norm")));
        }
        let (ell, degree) = if is_prime_u64(n) {
            (n, 1)
        } else {
            let r = (n as f64).sqrt().round() as u64;
            if r * r != n || !is_prime_u64(r) || r % 4 != 3 {
                return Err(Error::InvalidInput(format!("{prime} is not a prime")));
            }
            (r, 2)
        };
        let field = FqField::new(ell, degree)?;
        let residue = ResidueMap::new(prime, &field)?;
        Ok(QuadraticCharacter { residue, exponent: (n - 1) / 2, target: target.clone() })
    }

    pub fn prime(&self) -> &GaussianInt {
        &self.residue.prime
    }

    /// `eps(u)` in `{+1, -1}`; `None` when `u` lies in the prime.
    pub fn eval(&self, u: &GaussianInt) -> Option<FqElem> {
        let r = self.residue.reduce(u);
        if r.is_zero() {
            return None;
        }
        let s = self.residue.field.pow(r, self.exponent);
        Some(if s == FqElem::ONE { FqElem::ONE } else { self.target.neg(FqElem::ONE) })
    }
}
