//! Serre weight modules `V = (x)_tau det^{a_tau} (x) Sym^{b_tau - 1}` with the
//! polynomial action `P(X, Y) -> P(dX - bY, -cX + aY) * det^a`, and the
//! nebentypus characters that twist them.
//!
//! For a split prime `l = pi * conj(pi)` the two tensor factors belong to
//! `pi = a+bi` (with `a > b > 0`) and to its conjugate, each with a single
//! embedding into `F_l`. For an inert `l` there is one factor over `F_{l^2}`
//! with the identity and Frobenius embeddings. Basis vectors are tuples of
//! monomial indices `X^{n-j} Y^j` (ascending `j`), embedding 0 most significant.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{FqElem, FqField, QuadraticCharacter, ResidueMap};
use crate::gaussian::{split_type, GMatrix2, GaussianInt, SplitType};
use crate::linalg::FqMatrix;
use crate::p1::ResidueRing;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightSpec {
    pub ell: u64,
    /// Per prime above `l`, per embedding: `(a, b)`.
    pub factors: Vec<Vec<(u32, u32)>>,
}

impl WeightSpec {
    /// Build from the flattened `(a_0, a_1)`, `(b_0, b_1)` form used in tables.
    pub fn new(ell: u64, a: [u32; 2], b: [u32; 2]) -> Result<Self> {
        Self::build(ell, a, b, false)
    }

    /// As [`WeightSpec::new`] but without the `b <= l` bound.
    pub fn new_unbounded(ell: u64, a: [u32; 2], b: [u32; 2]) -> Result<Self> {
        Self::build(ell, a, b, true)
    }

    fn build(ell: u64, a: [u32; 2], b: [u32; 2], relaxed: bool) -> Result<Self> {
        let st = split_type(ell)?;
        let (factors, residue_order) = match st {
            SplitType::Ramified => return Err(Error::Torsion("2 is ramified in Z[i] and not covered".into())),
            SplitType::Split(..) => (vec![vec![(a[0], b[0])], vec![(a[1], b[1])]], ell),
            SplitType::Inert => (vec![vec![(a[0], b[0]), (a[1], b[1])]], ell * ell),
        };
        let mut spec = WeightSpec { ell, factors };
        for f in spec.factors.iter_mut() {
            for (a, b) in f.iter_mut() {
                if *b == 0 || (!relaxed && *b as u64 > ell) {
                    return Err(Error::InvalidInput(format!("b = {b} must lie in 1..={ell}")));
                }
                let m = (residue_order - 1) as u32;
                if *a >= m {
                    log::warn!("exponent a = {a} normalized modulo {m}");
                    *a %= m;
                }
            }
        }
        Ok(spec)
    }

    pub fn is_split(&self) -> bool {
        self.factors.len() == 2
    }

    /// Flattened `(a, b)` pairs in basis order.
    pub fn embeddings(&self) -> Vec<(u32, u32)> {
        self.factors.iter().flatten().copied().collect()
    }

    pub fn dimension(&self) -> usize {
        self.embeddings().iter().map(|&(_, b)| b as usize).product()
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.embeddings();
        write!(f, "l={} a=({},{}) b=({},{})", self.ell, e[0].0, e[1].0, e[0].1, e[1].1)
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    /// Parse `l=7 a=(5,6) b=(1,7)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad weight {s:?}; expected e.g. \"l=7 a=(5,6) b=(1,7)\""));
        let mut ell = None;
        let mut a = None;
        let mut b = None;
        let pair = |v: &str| -> Result<[u32; 2]> {
            let body = v.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
            let parts: Vec<u32> =
                body.split(',').map(|x| x.trim().parse::<u32>().map_err(|_| bad())).collect::<Result<_>>()?;
            <[u32; 2]>::try_from(parts).map_err(|_| bad())
        };
        for tok in s.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(bad)?;
            match k {
                "l" | "ell" => ell = Some(v.parse::<u64>().map_err(|_| bad())?),
                "a" => a = Some(pair(v)?),
                "b" => b = Some(pair(v)?),
                _ => return Err(bad()),
            }
        }
        WeightSpec::new(ell.ok_or_else(bad)?, a.ok_or_else(bad)?, b.ok_or_else(bad)?)
    }
}

#[derive(Clone, Debug)]
struct Embedding {
    residue: ResidueMap,
    frob: u32,
    a: u32,
    b: u32,
}

/// A weight module with its coefficient field and monomial basis.
#[derive(Clone, Debug)]
pub struct WeightSpace {
    spec: WeightSpec,
    field: FqField,
    embeddings: Vec<Embedding>,
    dim: usize,
}

/// The action of one matrix, kept in factored (per-embedding) form.
#[derive(Clone, Debug)]
pub struct WeightAction {
    pub blocks: Vec<FqMatrix>,
}

impl WeightSpace {
    pub fn new(spec: &WeightSpec) -> Result<Self> {
        let (field, embeddings) = match split_type(spec.ell)? {
            SplitType::Split(pi, pibar) => {
                let f = FqField::new(spec.ell, 1)?;
                let e0 = Embedding {
                    residue: ResidueMap::new(&pi, &f)?,
                    frob: 0,
                    a: spec.factors[0][0].0,
                    b: spec.factors[0][0].1,
                };
                let e1 = Embedding {
                    residue: ResidueMap::new(&pibar, &f)?,
                    frob: 0,
                    a: spec.factors[1][0].0,
                    b: spec.factors[1][0].1,
                };
                (f, vec![e0, e1])
            }
            SplitType::Inert => {
                let f = FqField::new(spec.ell, 2)?;
                let r = ResidueMap::new(&GaussianInt::small(spec.ell as i64, 0), &f)?;
                let embs = spec.factors[0]
                    .iter()
                    .enumerate()
                    .map(|(k, &(a, b))| Embedding { residue: r.clone(), frob: k as u32, a, b })
                    .collect();
                (f, embs)
            }
            SplitType::Ramified => return Err(Error::Torsion("2 is ramified in Z[i] and not covered".into())),
        };
        Ok(WeightSpace { spec: spec.clone(), field, dim: spec.dimension(), embeddings })
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sizes of the tensor factors, in basis order.
    pub fn factor_dims(&self) -> Vec<usize> {
        self.embeddings.iter().map(|e| e.b as usize).collect()
    }

    /// Per-embedding reduction of `g` (after the embedding's Frobenius power).
    pub fn reduce_matrix(&self, g: &GMatrix2, emb: usize) -> [FqElem; 4] {
        let e = &self.embeddings[emb];
        let f = &self.field;
        let r = |z: &GaussianInt| f.frobenius_pow(e.residue.reduce(z), e.frob);
        [r(&g.a), r(&g.b), r(&g.c), r(&g.d)]
    }

    /// The `b x b` block `det^a * Sym^{b-1}` for already-reduced entries.
    pub fn sym_block(&self, entries: [FqElem; 4], a_exp: u32, b: u32) -> FqMatrix {
        let f = &self.field;
        let [a, bb, c, d] = entries;
        let n = (b - 1) as usize;
        // (dX - bY) and (-cX + aY) as (X-coeff, Y-coeff)
        let u = (d, f.neg(bb));
        let w = (f.neg(c), a);
        let det = f.sub(f.mul(a, d), f.mul(bb, c));
        let scale = f.pow(det, a_exp as u64);
        let mut m = FqMatrix::zeros(f, n + 1, n + 1);
        for j in 0..=n {
            // poly in Y (index = Y-degree) for u^{n-j} w^j
            let mut p = vec![FqElem::ONE];
            for _ in 0..n - j {
                p = f.poly_mul(&p, &[u.0, u.1]);
            }
            for _ in 0..j {
                p = f.poly_mul(&p, &[w.0, w.1]);
            }
            for (k, &coef) in p.iter().enumerate() {
                m.set(k, j, f.mul(coef, scale));
            }
        }
        m
    }

    pub fn action(&self, g: &GMatrix2) -> WeightAction {
        let blocks = (0..self.embeddings.len())
            .map(|k| {
                let e = &self.embeddings[k];
                self.sym_block(self.reduce_matrix(g, k), e.a, e.b)
            })
            .collect();
        WeightAction { blocks }
    }

    /// Column `j` of the action of `g`, computed without forming any block.
    pub fn action_column(&self, g: &GMatrix2, j: usize) -> Vec<FqElem> {
        let f = &self.field;
        let mut idx = vec![0usize; self.embeddings.len()];
        let mut rem = j;
        for k in (0..self.embeddings.len()).rev() {
            let b = self.embeddings[k].b as usize;
            idx[k] = rem % b;
            rem /= b;
        }
        let mut out = vec![FqElem::ONE];
        for (k, e) in self.embeddings.iter().enumerate() {
            let [a, bb, c, d] = self.reduce_matrix(g, k);
            let n = (e.b - 1) as usize;
            let u = (d, f.neg(bb));
            let w = (f.neg(c), a);
            let det = f.sub(f.mul(a, d), f.mul(bb, c));
            let mut p = vec![f.pow(det, e.a as u64)];
            for _ in 0..n - idx[k] {
                p = f.poly_mul(&p, &[u.0, u.1]);
            }
            for _ in 0..idx[k] {
                p = f.poly_mul(&p, &[w.0, w.1]);
            }
            p.resize(n + 1, FqElem::ZERO);
            let mut next = Vec::with_capacity(out.len() * p.len());
            for &x in &out {
                for &y in &p {
                    next.push(f.mul(x, y));
                }
            }
            out = next;
        }
        out
    }

    /// The full `dim x dim` action matrix.
    pub fn action_matrix(&self, g: &GMatrix2) -> FqMatrix {
        self.action(g).full()
    }

    pub fn basis_vector(&self, j: usize) -> Vec<FqElem> {
        let mut v = vec![FqElem::ZERO; self.dim];
        v[j] = FqElem::ONE;
        v
    }
}

impl WeightAction {
    pub fn field(&self) -> &FqField {
        self.blocks[0].field()
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.rows()).product()
    }

    pub fn full(&self) -> FqMatrix {
        let mut m = self.blocks[0].clone();
        for b in &self.blocks[1..] {
            m = m.kron(b);
        }
        m
    }

    /// Blockwise product, i.e. the action of the product matrix.
    pub fn compose(&self, o: &WeightAction) -> WeightAction {
        WeightAction { blocks: self.blocks.iter().zip(&o.blocks).map(|(x, y)| x.mul(y).expect("same shape")).collect() }
    }

    /// Column `j` of the full matrix: the image of the `j`-th basis vector.
    pub fn column(&self, j: usize) -> Vec<FqElem> {
        let f = self.field().clone();
        let mut out = vec![FqElem::ONE];
        let mut rem = j;
        let dims: Vec<usize> = self.blocks.iter().map(|b| b.rows()).collect();
        let mut idx = vec![0usize; dims.len()];
        for k in (0..dims.len()).rev() {
            idx[k] = rem % dims[k];
            rem /= dims[k];
        }
        for (k, b) in self.blocks.iter().enumerate() {
            let col = b.column(idx[k]);
            let mut next = Vec::with_capacity(out.len() * col.len());
            for &x in &out {
                for &y in &col {
                    next.push(f.mul(x, y));
                }
            }
            out = next;
        }
        out
    }

    /// Apply to a vector without forming the Kronecker product.
    pub fn apply(&self, v: &[FqElem]) -> Vec<FqElem> {
        let f = self.field().clone();
        let dims: Vec<usize> = self.blocks.iter().map(|b| b.rows()).collect();
        let total: usize = dims.iter().product();
        assert_eq!(v.len(), total);
        let mut cur = v.to_vec();
        let mut stride = total;
        for (k, b) in self.blocks.iter().enumerate() {
            let n = dims[k];
            stride /= n;
            let outer = total / (n * stride);
            let mut next = vec![FqElem::ZERO; total];
            for o in 0..outer {
                for i in 0..stride {
                    for r in 0..n {
                        let mut acc = FqElem::ZERO;
                        for c in 0..n {
                            let x = cur[(o * n + c) * stride + i];
                            if !x.is_zero() {
                                acc = f.add(acc, f.mul(b.get(r, c), x));
                            }
                        }
                        next[(o * n + r) * stride + i] = acc;
                    }
                }
            }
            cur = next;
        }
        cur
    }
}

/// Nebentypus data for a level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CharacterKind {
    Trivial,
    /// The quadratic character of `(O/p)^*` for a prime `p` dividing the level.
    Quadratic(GaussianInt),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharacterSpec {
    pub level: GaussianInt,
    pub kind: CharacterKind,
}

impl CharacterSpec {
    pub fn trivial(level: &GaussianInt) -> Self {
        CharacterSpec { level: level.clone(), kind: CharacterKind::Trivial }
    }

    /// The quadratic character modulo the (prime) level itself.
    pub fn quadratic(level: &GaussianInt) -> Self {
        CharacterSpec { level: level.clone(), kind: CharacterKind::Quadratic(level.clone()) }
    }

    /// Parse `trivial`, `quadratic` or `quadratic:<prime>`.
    pub fn parse(level: &GaussianInt, s: &str) -> Result<Self> {
        match s.trim() {
            "trivial" | "1" => Ok(Self::trivial(level)),
            "quadratic" => Ok(Self::quadratic(level)),
            t => {
                let p = t.strip_prefix("quadratic:").ok_or_else(|| Error::Parse(format!("unknown character {s:?}")))?;
                let p: GaussianInt = p.parse()?;
                if !p.divides(level) {
                    return Err(Error::InvalidInput(format!("{p} does not divide the level {level}")));
                }
                Ok(CharacterSpec { level: level.clone(), kind: CharacterKind::Quadratic(p) })
            }
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.kind == CharacterKind::Trivial
    }

    /// Value table over the residues of `O/n` (zero at non-units).
    pub fn table(&self, ring: &ResidueRing, field: &FqField) -> Result<Vec<FqElem>> {
        let units = |z: &GaussianInt| crate::gaussian::ggcd(z, &self.level).map(|g| g.is_one()).unwrap_or(false);
        match &self.kind {
            CharacterKind::Trivial => Ok((0..ring.size())
                .map(|k| {
                    let (x, y) = ring.element(k);
                    if units(&GaussianInt::small(x, y)) {
                        FqElem::ONE
                    } else {
                        FqElem::ZERO
                    }
                })
                .collect()),
            CharacterKind::Quadratic(p) => {
                let chi = QuadraticCharacter::new(p, field)?;
                Ok((0..ring.size())
                    .map(|k| {
                        let (x, y) = ring.element(k);
                        let z = GaussianInt::small(x, y);
                        if units(&z) {
                            chi.eval(&z).unwrap_or(FqElem::ZERO)
                        } else {
                            FqElem::ZERO
                        }
                    })
                    .collect())
            }
        }
    }

    /// `eps(u)` for `u` coprime to the level.
    pub fn value(&self, u: &GaussianInt, field: &FqField) -> Result<FqElem> {
        if !crate::gaussian::ggcd(u, &self.level)?.is_one() {
            return Err(Error::NotUnit(u.clone()));
        }
        match &self.kind {
            CharacterKind::Trivial => Ok(FqElem::ONE),
            CharacterKind::Quadratic(p) => {
                QuadraticCharacter::new(p, field)?.eval(u).ok_or_else(|| Error::NotUnit(u.clone()))
            }
        }
    }
}

impl fmt::Display for CharacterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            CharacterKind::Trivial => write!(f, "trivial"),
            CharacterKind::Quadratic(p) if *p == self.level => write!(f, "quadratic"),
            CharacterKind::Quadratic(p) => write!(f, "quadratic:{p}"),
        }
    }
}

/// `eps(u)` in the coefficient field.
pub fn char_value(eps: &CharacterSpec, u: &GaussianInt, field: &FqField) -> Result<FqElem> {
    eps.value(u, field)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(WeightSpec::new(5, [0, 0], [4, 4]).unwrap().dimension(), 16);
        assert_eq!(WeightSpec::new(3, [0, 2], [1, 1]).unwrap().dimension(), 1);
        assert_eq!(WeightSpec::new(7, [0, 0], [6, 6]).unwrap().dimension(), 36);
        assert!(WeightSpec::new(7, [0, 0], [8, 1]).is_err());
        assert!(WeightSpec::new(2, [0, 0], [1, 1]).is_err());
    }

    #[test]
    fn parse_roundtrip() {
        let w: WeightSpec = "l=7 a=(5,6) b=(1,7)".parse().unwrap();
        assert_eq!(w.to_string(), "l=7 a=(5,6) b=(1,7)");
        assert_eq!(w.factors, vec![vec![(5, 1), (6, 7)]]);
        let w: WeightSpec = "l=5 a=(0,0) b=(4,4)".parse().unwrap();
        assert!(w.is_split());
        assert!("l=5 a=(0,0)".parse::<WeightSpec>().is_err());
    }

    #[test]
    fn identity_acts_trivially() {
        let ws = WeightSpace::new(&WeightSpec::new(7, [5, 6], [3, 4]).unwrap()).unwrap();
        let m = ws.action_matrix(&GMatrix2::identity());
        assert_eq!(m, FqMatrix::identity(ws.field(), 12));
    }

    #[test]
    fn det_twist_only_weight() {
        let ws = WeightSpace::new(&WeightSpec::new(3, [0, 2], [1, 1]).unwrap()).unwrap();
        let f = ws.field().clone();
        assert_eq!(ws.action_matrix(&GMatrix2::t()).get(0, 0), FqElem::ONE);
        // det(J) = i; (Frob i)^2 = (-x)^2 = -1
        assert_eq!(ws.action_matrix(&GMatrix2::j()).get(0, 0), f.from_i64(-1));
    }

    #[test]
    fn factored_apply_matches_full() {
        let ws = WeightSpace::new(&WeightSpec::new(5, [1, 2], [3, 4]).unwrap()).unwrap();
        let g = GMatrix2::small((2, 1), (1, 0), (3, -1), (1, 1));
        let act = ws.action(&g);
        let full = act.full();
        let f = ws.field();
        let v: Vec<FqElem> = (0..12).map(|k| f.from_i64(k * 7 + 1)).collect();
        assert_eq!(act.apply(&v), full.mul_vec(&v));
        for j in 0..12 {
            assert_eq!(act.column(j), full.column(j));
            assert_eq!(ws.action_column(&g, j), full.column(j));
        }
        let inert = WeightSpace::new(&WeightSpec::new(7, [5, 6], [1, 7]).unwrap()).unwrap();
        let full = inert.action_matrix(&g);
        for j in 0..7 {
            assert_eq!(inert.action_column(&g, j), full.column(j));
        }
    }

    #[test]
    fn characters() {
        let lvl = GaussianInt::small(8, 17);
        let f = FqField::new(5, 1).unwrap();
        let eps = CharacterSpec::quadratic(&lvl);
        assert_eq!(char_value(&eps, &GaussianInt::i(), &f).unwrap(), FqElem::ONE);
        assert_eq!(char_value(&CharacterSpec::trivial(&lvl), &GaussianInt::small(3, 1), &f).unwrap(), FqElem::ONE);
        assert!(char_value(&eps, &lvl, &f).is_err());
        assert_eq!(CharacterSpec::parse(&lvl, "quadratic").unwrap(), eps);
    }
}
