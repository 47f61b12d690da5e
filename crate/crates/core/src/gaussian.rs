//! Exact arithmetic in Z[i] and Q(i).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::int::Int;

/// An element `re + im*i` of the Gaussian integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GaussianInt {
    pub re: Int,
    pub im: Int,
}

impl GaussianInt {
    pub fn new(re: impl Into<Int>, im: impl Into<Int>) -> Self {
        GaussianInt { re: re.into(), im: im.into() }
    }

    pub fn small(re: i64, im: i64) -> Self {
        GaussianInt { re: Int::small(re), im: Int::small(im) }
    }

    pub fn zero() -> Self {
        Self::small(0, 0)
    }

    pub fn one() -> Self {
        Self::small(1, 0)
    }

    pub fn i() -> Self {
        Self::small(0, 1)
    }

    /// The four units, in the order `1, i, -1, -i`.
    pub fn units() -> [GaussianInt; 4] {
        [Self::small(1, 0), Self::small(0, 1), Self::small(-1, 0), Self::small(0, -1)]
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn conj(&self) -> Self {
        GaussianInt { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm(&self) -> Int {
        self.re.square() + self.im.square()
    }

    /// Multiply by `i^k`.
    pub fn mul_i_pow(&self, k: u32) -> Self {
        match k % 4 {
            0 => self.clone(),
            1 => GaussianInt { re: -&self.im, im: self.re.clone() },
            2 => -self,
            _ => GaussianInt { re: self.im.clone(), im: -&self.re },
        }
    }

    /// The unit multiple with `re > 0, im >= 0`, together with the exponent
    /// `k` such that `self = i^k * canonical`. Zero maps to itself with `k = 0`.
    pub fn canonical_with_unit(&self) -> (Self, u32) {
        if self.is_zero() {
            return (self.clone(), 0);
        }
        for k in 0..4u32 {
            // candidate = self * i^{-k}
            let cand = self.mul_i_pow((4 - k) % 4);
            if cand.re.signum() > 0 && cand.im.signum() >= 0 {
                return (cand, k);
            }
        }
        unreachable!("every nonzero Gaussian integer has a first-quadrant associate")
    }

    pub fn canonical(&self) -> Self {
        self.canonical_with_unit().0
    }

    /// Whether `self` divides `z`.
    pub fn divides(&self, z: &GaussianInt) -> bool {
        if self.is_zero() {
            return z.is_zero();
        }
        let n = self.norm();
        let t = z * &self.conj();
        t.re.mod_floor(&n).is_zero() && t.im.mod_floor(&n).is_zero()
    }

    /// `z / self` when the division is exact.
    pub fn div_exact(z: &GaussianInt, w: &GaussianInt) -> Option<GaussianInt> {
        if w.is_zero() {
            return None;
        }
        let n = w.norm();
        let t = z * &w.conj();
        if t.re.mod_floor(&n).is_zero() && t.im.mod_floor(&n).is_zero() {
            Some(GaussianInt { re: t.re.div_floor(&n), im: t.im.div_floor(&n) })
        } else {
            None
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = GaussianInt::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Components as machine words, if they fit.
    pub fn to_i64_pair(&self) -> Option<(i64, i64)> {
        Some((self.re.to_i64()?, self.im.to_i64()?))
    }
}

impl From<i64> for GaussianInt {
    fn from(v: i64) -> Self {
        GaussianInt::small(v, 0)
    }
}

impl<'a> Add<&'a GaussianInt> for &'a GaussianInt {
    type Output = GaussianInt;
    fn add(self, rhs: &'a GaussianInt) -> GaussianInt {
        GaussianInt { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a GaussianInt> for &'a GaussianInt {
    type Output = GaussianInt;
    fn sub(self, rhs: &'a GaussianInt) -> GaussianInt {
        GaussianInt { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a GaussianInt> for &'a GaussianInt {
    type Output = GaussianInt;
    fn mul(self, rhs: &'a GaussianInt) -> GaussianInt {
        GaussianInt { re: &self.re * &rhs.re - &self.im * &rhs.im, im: &self.re * &rhs.im + &self.im * &rhs.re }
    }
}

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt { re: -&self.re, im: -&self.im }
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                &self * &rhs
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

owned_ops!(GaussianInt);

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_abs = self.im.abs();
        match (self.re.is_zero(), self.im.signum()) {
            (_, 0) => write!(f, "{}", self.re),
            (true, _) => {
                if im_abs.is_one() {
                    write!(f, "{}i", if self.im.is_negative() { "-" } else { "" })
                } else {
                    write!(f, "{}i", self.im)
                }
            }
            (false, s) => {
                let sign = if s < 0 { '-' } else { '+' };
                if im_abs.is_one() {
                    write!(f, "{}{}i", self.re, sign)
                } else {
                    write!(f, "{}{}{}i", self.re, sign, im_abs)
                }
            }
        }
    }
}

impl fmt::Debug for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for GaussianInt {
    type Err = Error;

    /// Accepts `a`, `bi`, `a+bi`, `a-bi`, with optional surrounding parentheses
    /// and whitespace; a bare `i` has coefficient one.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a Gaussian integer: {s:?}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let t = t.trim_start_matches('(').trim_end_matches(')');
        if t.is_empty() {
            return Err(bad());
        }
        let parse_int = |x: &str| -> Result<Int> {
            let x = x.strip_prefix('+').unwrap_or(x);
            if x.is_empty() || !x.trim_start_matches('-').chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            x.parse::<Int>().map_err(|_| bad())
        };
        let parse_imag = |x: &str| -> Result<Int> {
            let body = x.strip_suffix('i').ok_or_else(bad)?;
            match body {
                "" | "+" => Ok(Int::one()),
                "-" => Ok(Int::small(-1)),
                b => parse_int(b),
            }
        };
        if !t.ends_with('i') {
            return Ok(GaussianInt { re: parse_int(t)?, im: Int::zero() });
        }
        // split at the last sign that is not in leading position
        let split = t.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').map(|(k, _)| k).last();
        match split {
            Some(k) => Ok(GaussianInt { re: parse_int(&t[..k])?, im: parse_imag(&t[k..])? }),
            None => Ok(GaussianInt { re: Int::zero(), im: parse_imag(t)? }),
        }
    }
}

/// An element of Q(i) in lowest terms with a canonical-associate denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GaussianRational {
    num: GaussianInt,
    den: GaussianInt,
}

impl GaussianRational {
    pub fn new(num: GaussianInt, den: GaussianInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = if num.is_zero() { den.clone() } else { ggcd(&num, &den)? };
        let num = GaussianInt::div_exact(&num, &g).expect("gcd divides");
        let den = GaussianInt::div_exact(&den, &g).expect("gcd divides");
        let (den_c, k) = den.canonical_with_unit();
        // num/den = num/(i^k den_c) = (num i^{-k}) / den_c
        let num = num.mul_i_pow((4 - k) % 4);
        Ok(GaussianRational { num, den: den_c })
    }

    pub fn from_int(z: GaussianInt) -> Self {
        GaussianRational { num: z, den: GaussianInt::one() }
    }

    pub fn num(&self) -> &GaussianInt {
        &self.num
    }

    pub fn den(&self) -> &GaussianInt {
        &self.den
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Round each coordinate of `z/w` to the least integer within distance 1/2.
fn floor_div(z: &GaussianInt, w: &GaussianInt) -> GaussianInt {
    let n = w.norm();
    let t = z * &w.conj();
    GaussianInt { re: t.re.round_half_down_div(&n), im: t.im.round_half_down_div(&n) }
}

/// The rounding used by the continued-fraction algorithm: per coordinate, the
/// least integer `a` with `|a - x| <= 1/2`.
pub fn floor_q(r: &GaussianRational) -> GaussianInt {
    floor_div(&r.num, &r.den)
}

/// Euclidean division `z = q*w + r` with `q = floor_q(z/w)`, so `N(r) <= N(w)/2`.
pub fn euc_divmod(z: &GaussianInt, w: &GaussianInt) -> Result<(GaussianInt, GaussianInt)> {
    if w.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let q = floor_div(z, w);
    let r = z - &(&q * w);
    Ok((q, r))
}

/// Greatest common divisor, normalized to the canonical associate.
pub fn ggcd(z: &GaussianInt, w: &GaussianInt) -> Result<GaussianInt> {
    if z.is_zero() && w.is_zero() {
        return Err(Error::InvalidInput("gcd(0, 0) is undefined".into()));
    }
    let (mut a, mut b) = (z.clone(), w.clone());
    while !b.is_zero() {
        let (_, r) = euc_divmod(&a, &b)?;
        a = b;
        b = r;
    }
    Ok(a.canonical())
}

/// Extended gcd: returns `(g, x, y)` with `x*z + y*w = g`, `g` canonical.
pub fn xgcd(z: &GaussianInt, w: &GaussianInt) -> Result<(GaussianInt, GaussianInt, GaussianInt)> {
    if z.is_zero() && w.is_zero() {
        return Err(Error::InvalidInput("gcd(0, 0) is undefined".into()));
    }
    let (mut r0, mut r1) = (z.clone(), w.clone());
    let (mut x0, mut x1) = (GaussianInt::one(), GaussianInt::zero());
    let (mut y0, mut y1) = (GaussianInt::zero(), GaussianInt::one());
    while !r1.is_zero() {
        let (q, r) = euc_divmod(&r0, &r1)?;
        let x2 = &x0 - &(&q * &x1);
        let y2 = &y0 - &(&q * &y1);
        r0 = std::mem::replace(&mut r1, r);
        x0 = std::mem::replace(&mut x1, x2);
        y0 = std::mem::replace(&mut y1, y2);
    }
    let (g, k) = r0.canonical_with_unit();
    let back = (4 - k) % 4;
    Ok((g, x0.mul_i_pow(back), y0.mul_i_pow(back)))
}

/// A 2x2 matrix over the Gaussian integers, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GMatrix2 {
    pub a: GaussianInt,
    pub b: GaussianInt,
    pub c: GaussianInt,
    pub d: GaussianInt,
}

impl GMatrix2 {
    pub fn new(a: GaussianInt, b: GaussianInt, c: GaussianInt, d: GaussianInt) -> Self {
        GMatrix2 { a, b, c, d }
    }

    pub fn small(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> Self {
        GMatrix2 {
            a: GaussianInt::small(a.0, a.1),
            b: GaussianInt::small(b.0, b.1),
            c: GaussianInt::small(c.0, c.1),
            d: GaussianInt::small(d.0, d.1),
        }
    }

    pub fn identity() -> Self {
        Self::small((1, 0), (0, 0), (0, 0), (1, 0))
    }

    /// `[[i, 0], [0, 1]]`
    pub fn j() -> Self {
        Self::small((0, 1), (0, 0), (0, 0), (1, 0))
    }

    /// `[[0, i], [1, 0]]`
    pub fn s() -> Self {
        Self::small((0, 0), (0, 1), (1, 0), (0, 0))
    }

    /// `[[1, 1], [0, 1]]`
    pub fn t() -> Self {
        Self::small((1, 0), (1, 0), (0, 0), (1, 0))
    }

    /// `[[1, 0], [1, 1]]`
    pub fn t_prime() -> Self {
        Self::small((1, 0), (0, 0), (1, 0), (1, 0))
    }

    /// `[[1, -1], [1, 0]]`
    pub fn l() -> Self {
        Self::small((1, 0), (-1, 0), (1, 0), (0, 0))
    }

    pub fn scalar(z: GaussianInt) -> Self {
        GMatrix2 { a: z.clone(), b: GaussianInt::zero(), c: GaussianInt::zero(), d: z }
    }

    pub fn det(&self) -> GaussianInt {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    /// The adjugate `[[d, -b], [-c, a]]`.
    pub fn adj(&self) -> Self {
        GMatrix2 { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    /// Inverse in GL2(O); `None` if the determinant is not a unit.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if !det.is_unit() {
            return None;
        }
        // det^{-1} = conj(det) for a unit
        let u = det.conj();
        let adj = self.adj();
        Some(GMatrix2 { a: &adj.a * &u, b: &adj.b * &u, c: &adj.c * &u, d: &adj.d * &u })
    }

    pub fn is_gl2(&self) -> bool {
        self.det().is_unit()
    }

    pub fn is_sl2(&self) -> bool {
        self.det().is_one()
    }

    /// Moebius action on a column `(p, q)` standing for the cusp `p/q`.
    pub fn act_column(&self, p: &GaussianInt, q: &GaussianInt) -> (GaussianInt, GaussianInt) {
        (&(&self.a * p) + &(&self.b * q), &(&self.c * p) + &(&self.d * q))
    }
}

impl<'a> Mul<&'a GMatrix2> for &'a GMatrix2 {
    type Output = GMatrix2;
    fn mul(self, o: &'a GMatrix2) -> GMatrix2 {
        GMatrix2 {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }
}

impl Mul for GMatrix2 {
    type Output = GMatrix2;
    fn mul(self, o: GMatrix2) -> GMatrix2 {
        &self * &o
    }
}

impl fmt::Display for GMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Complete a coprime column `(alpha, beta)` to a matrix
/// `[[alpha, delta], [beta, gamma]]` of determinant one.
///
/// When both entries are nonzero the completion satisfies
/// `N(delta) <= N(alpha)` and `N(gamma) <= N(beta)`.
pub fn unimodular_complete(alpha: &GaussianInt, beta: &GaussianInt) -> Result<GMatrix2> {
    let (g, x, y) = xgcd(alpha, beta)?;
    if !g.is_one() {
        return Err(Error::NotCoprime(alpha.clone(), beta.clone()));
    }
    // alpha*x + beta*y = 1, so gamma = x, delta = -y.
    let (mut gamma, mut delta) = (x, -&y);
    if alpha.is_zero() || beta.is_zero() {
        // alpha or beta is a unit; pick the obvious completion
        if beta.is_zero() {
            let inv = alpha.conj();
            return Ok(GMatrix2::new(alpha.clone(), GaussianInt::zero(), GaussianInt::zero(), inv));
        }
        let u = beta.conj();
        return Ok(GMatrix2::new(GaussianInt::zero(), -&u, beta.clone(), gamma));
    }
    // solutions are (gamma + t*beta, delta + t*alpha); shrink gamma first
    let (q, _) = euc_divmod(&gamma, beta)?;
    gamma = &gamma - &(&q * beta);
    delta = &delta - &(&q * alpha);
    let na = alpha.norm();
    let nb = beta.norm();
    if delta.norm() > na || gamma.norm() > nb {
        // small inputs can land just outside the bound; try nearby shifts
        let mut best: Option<(GaussianInt, GaussianInt)> = None;
        for dr in -2..=2i64 {
            for di in -2..=2i64 {
                let t = GaussianInt::small(dr, di);
                let g2 = &gamma + &(&t * beta);
                let d2 = &delta + &(&t * alpha);
                if d2.norm() <= na && g2.norm() <= nb {
                    best = Some((g2, d2));
                    break;
                }
            }
            if best.is_some() {
                break;
            }
        }
        if let Some((g2, d2)) = best {
            gamma = g2;
            delta = d2;
        }
    }
    let m = GMatrix2::new(alpha.clone(), delta, beta.clone(), gamma);
    debug_assert!(m.is_sl2());
    Ok(m)
}

/// How a rational prime decomposes in Z[i].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitType {
    /// `l = pi * conj(pi)` with `pi = a+bi`, `a > b > 0`.
    Split(GaussianInt, GaussianInt),
    Inert,
    Ramified,
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Write a prime `p = 1 mod 4` as `a^2 + b^2` with `a > b > 0`.
fn two_squares(p: u64) -> (i64, i64) {
    let mut b = 1u64;
    while 2 * b * b < p {
        let r = p - b * b;
        let a = (r as f64).sqrt().round() as u64;
        for a in a.saturating_sub(1)..=a + 1 {
            if a * a == r {
                return (a as i64, b as i64);
            }
        }
        b += 1;
    }
    unreachable!("p = 1 mod 4 is a sum of two squares")
}

pub fn split_type(ell: u64) -> Result<SplitType> {
    if !is_prime_u64(ell) {
        return Err(Error::InvalidInput(format!("{ell} is not prime")));
    }
    Ok(match ell % 4 {
        2 => SplitType::Ramified,
        3 => SplitType::Inert,
        _ => {
            let (a, b) = two_squares(ell);
            SplitType::Split(GaussianInt::small(a, b), GaussianInt::small(a, -b))
        }
    })
}

/// Hermite-normal-form data for the ideal `mO` viewed as a lattice in Z^2.
///
/// `mO` has basis `(cols, 0)` and `(shift, rows)`; residues are the points
/// `x + y i` with `0 <= x < cols`, `0 <= y < rows`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    pub cols: i64,
    pub rows: i64,
    pub shift: i64,
}

impl Hnf {
    pub fn new(m: &GaussianInt) -> Result<Self> {
        if m.is_zero() {
            return Err(Error::InvalidInput("zero modulus".into()));
        }
        let (a, b) = m.to_i64_pair().ok_or_else(|| Error::InvalidInput("modulus too large".into()))?;
        let n = a * a + b * b;
        let g = num_integer::Integer::gcd(&a, &b);
        // m * (x + y i) has imaginary part a y + b x; pick x, y with a y + b x = g.
        let (ga, gb) = (a / g, b / g);
        let ext = num_integer::Integer::extended_gcd(&gb, &ga);
        // ext.x * gb + ext.y * ga = 1
        let (x, y) = (ext.x, ext.y);
        let re = a * x - b * y;
        let cols = n / g;
        Ok(Hnf { cols, rows: g, shift: re.rem_euclid(cols) })
    }

    pub fn size(&self) -> i64 {
        self.cols * self.rows
    }

    /// Reduce small coordinates into the canonical box.
    #[inline]
    pub fn reduce_small(&self, x: i64, y: i64) -> (i64, i64) {
        let k = y.div_euclid(self.rows);
        let y = y - k * self.rows;
        let x = (x - k * self.shift).rem_euclid(self.cols);
        (x, y)
    }

    pub fn reduce(&self, z: &GaussianInt) -> (i64, i64) {
        match z.to_i64_pair() {
            Some((x, y)) if x.unsigned_abs() < 1 << 40 && y.unsigned_abs() < 1 << 40 => self.reduce_small(x, y),
            _ => {
                // reduce modulo the sublattice N*Z[i] first (N = cols*rows)
                let n = self.size() as u64;
                let x = z.re.rem_u64(n) as i64;
                let y = z.im.rem_u64(n) as i64;
                self.reduce_small(x, y)
            }
        }
    }

    #[inline]
    pub fn index(&self, x: i64, y: i64) -> usize {
        (x * self.rows + y) as usize
    }

    #[inline]
    pub fn element(&self, idx: usize) -> (i64, i64) {
        let idx = idx as i64;
        (idx / self.rows, idx % self.rows)
    }
}

/// A complete residue system for `O/(m)`, of size `N(m)`.
pub fn residues_mod(m: &GaussianInt) -> Result<Vec<GaussianInt>> {
    let h = Hnf::new(m)?;
    Ok((0..h.size() as usize)
        .map(|k| {
            let (x, y) = h.element(k);
            GaussianInt::small(x, y)
        })
        .collect())
}

/// One canonical generator per prime ideal of norm at most `bound`, with its
/// residue degree, ordered by norm, then real part, then imaginary part.
///
/// For a split prime the two conjugate ideals are represented by the
/// canonical associates `a+bi` and `b+ai` with `a > b > 0`.
pub fn enumerate_primes(bound: u64) -> Vec<(GaussianInt, u32)> {
    let mut out: Vec<(u64, GaussianInt, u32)> = Vec::new();
    let mut p = 2u64;
    while p <= bound {
        if is_prime_u64(p) {
            match p % 4 {
                2 => out.push((2, GaussianInt::small(1, 1), 1)),
                3 => {
                    if p * p <= bound {
                        out.push((p * p, GaussianInt::small(p as i64, 0), 2));
                    }
                }
                _ => {
                    let (a, b) = two_squares(p);
                    out.push((p, GaussianInt::small(a, b), 1));
                    out.push((p, GaussianInt::small(b, a), 1));
                }
            }
        }
        p += 1;
    }
    out.sort_by(|x, y| (x.0, &x.1.re, &x.1.im).cmp(&(y.0, &y.1.re, &y.1.im)));
    out.into_iter().map(|(_, g, f)| (g, f)).collect()
}

/// Factor a nonzero Gaussian integer into canonical primes.
///
/// Returns `(k, factors)` with `z = i^k * prod(p^e)`. Trial division only;
/// intended for levels and small test inputs.
pub fn factor(z: &GaussianInt) -> Result<(u32, Vec<(GaussianInt, u32)>)> {
    if z.is_zero() {
        return Err(Error::InvalidInput("cannot factor zero".into()));
    }
    let n = z.norm().to_i64().ok_or_else(|| Error::InvalidInput("norm too large to factor".into()))? as u64;
    let mut rest = z.clone();
    let mut factors: Vec<(GaussianInt, u32)> = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    let mut rational = Vec::new();
    while p * p <= m {
        if m % p == 0 {
            rational.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        rational.push(m);
    }
    for p in rational {
        let cands: Vec<GaussianInt> = match p % 4 {
            2 => vec![GaussianInt::small(1, 1)],
            3 => vec![GaussianInt::small(p as i64, 0)],
            _ => {
                let (a, b) = two_squares(p);
                vec![GaussianInt::small(a, b), GaussianInt::small(b, a)]
            }
        };
        for pi in cands {
            let mut e = 0;
            while let Some(q) = GaussianInt::div_exact(&rest, &pi) {
                rest = q;
                e += 1;
            }
            if e > 0 {
                factors.push((pi, e));
            }
        }
    }
    debug_assert!(rest.is_unit());
    let k = GaussianInt::units().iter().position(|u| *u == rest).expect("unit") as u32;
    Ok((k, factors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64) -> GaussianInt {
        GaussianInt::small(a, b)
    }

    #[test]
    fn norms() {
        assert_eq!(g(0, 0).norm(), Int::small(0));
        assert_eq!(g(3, 2).norm(), Int::small(13));
        assert_eq!((g(1, 1) * g(1, -1)).norm(), g(1, 1).norm() * g(1, -1).norm());
    }

    #[test]
    fn floor_examples() {
        let r = |n: GaussianInt, d: GaussianInt| floor_q(&GaussianRational::new(n, d).unwrap());
        assert_eq!(r(g(0, 0), g(1, 0)), g(0, 0));
        assert_eq!(r(g(1, 3), g(2, 0)), g(0, 1));
        assert_eq!(r(g(11, -2), g(5, 0)), g(2, 0));
    }

    #[test]
    fn division_examples() {
        let (q, r) = euc_divmod(&g(5, 0), &g(1, 1)).unwrap();
        assert_eq!(&(&q * &g(1, 1)) + &r, g(5, 0));
        assert!(r.norm() <= Int::small(1));
        let z = g(7, -3);
        assert_eq!(euc_divmod(&z, &g(1, 0)).unwrap(), (z, g(0, 0)));
        let (q, r) = euc_divmod(&g(1, 1), &g(2, 0)).unwrap();
        assert_eq!(&(&q * &g(2, 0)) + &r, g(1, 1));
        assert!(r.norm() <= Int::small(2));
        assert!(euc_divmod(&g(1, 0), &g(0, 0)).is_err());
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(ggcd(&g(1, 1), &g(2, 0)).unwrap(), g(1, 1));
        assert_eq!(ggcd(&g(-3, 5), &g(0, 0)).unwrap(), g(-3, 5).canonical());
        assert_eq!(ggcd(&g(3, 4), &g(1, 2)).unwrap(), g(1, 0));
        assert!(ggcd(&g(0, 0), &g(0, 0)).is_err());
    }

    #[test]
    fn completion_examples() {
        assert_eq!(unimodular_complete(&g(1, 0), &g(0, 0)).unwrap(), GMatrix2::identity());
        let m = unimodular_complete(&g(0, 0), &g(1, 0)).unwrap();
        assert!(m.is_sl2());
        assert_eq!((m.a.clone(), m.c.clone()), (g(0, 0), g(1, 0)));
        let m = unimodular_complete(&g(3, 4), &g(1, 2)).unwrap();
        assert!(m.is_sl2());
        assert!(m.b.norm() <= Int::small(25) && m.d.norm() <= Int::small(5));
        assert!(unimodular_complete(&g(2, 0), &g(1, 1)).is_err());
    }

    #[test]
    fn splitting() {
        assert_eq!(split_type(5).unwrap(), SplitType::Split(g(2, 1), g(2, -1)));
        assert_eq!(split_type(7).unwrap(), SplitType::Inert);
        assert_eq!(split_type(2).unwrap(), SplitType::Ramified);
        assert!(split_type(9).is_err());
    }

    #[test]
    fn residue_systems() {
        assert_eq!(residues_mod(&g(1, 1)).unwrap(), vec![g(0, 0), g(1, 0)]);
        assert_eq!(residues_mod(&g(2, 0)).unwrap(), vec![g(0, 0), g(0, 1), g(1, 0), g(1, 1)]);
        assert_eq!(residues_mod(&g(0, 1)).unwrap(), vec![g(0, 0)]);
        assert!(residues_mod(&g(0, 0)).is_err());
    }

    #[test]
    fn prime_lists() {
        assert_eq!(enumerate_primes(2), vec![(g(1, 1), 1)]);
        assert_eq!(enumerate_primes(5), vec![(g(1, 1), 1), (g(1, 2), 1), (g(2, 1), 1)]);
        assert!(enumerate_primes(200).contains(&(g(3, 0), 2)));
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["0", "3", "-4", "i", "-i", "7i", "2+i", "2-i", "8+17i", "-13-28i", "5-6i"] {
            let z: GaussianInt = s.parse().unwrap();
            assert_eq!(z.to_string(), s);
        }
        assert_eq!("(1+i)".parse::<GaussianInt>().unwrap(), g(1, 1));
        assert_eq!("61".parse::<GaussianInt>().unwrap(), g(61, 0));
        assert!("1+".parse::<GaussianInt>().is_err());
        assert!("x".parse::<GaussianInt>().is_err());
    }

    #[test]
    fn factoring() {
        // (6+5i)(5+6i) = 61i
        let (k, f) = factor(&g(61, 0)).unwrap();
        assert_eq!(k, 3);
        assert_eq!(f, vec![(g(6, 5), 1), (g(5, 6), 1)]);
        let (_, f) = factor(&g(2, 0)).unwrap();
        assert_eq!(f, vec![(g(1, 1), 2)]);
    }
}
