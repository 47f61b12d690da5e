//! Manin symbols `P^1(O/n) (x) V (x) eps`, their relations, and the quotient
//! `H` computed by sparse elimination.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{FqElem, FqField};
use crate::gaussian::{GMatrix2, GaussianInt};
use crate::p1::P1Table;
use crate::sparse::{eliminate, ColumnImage, EliminationOptions, Projector, Reduction, SparseRow};
use crate::weight::{CharacterSpec, WeightSpace, WeightSpec};

/// The ambient space of Manin symbols together with everything needed to
/// normalize terms into it.
#[derive(Clone, Debug)]
pub struct ManinSpace {
    table: P1Table,
    weight: WeightSpace,
    character: CharacterSpec,
    /// `eps(u)^{-1}` by residue index; zero at non-units.
    chi_inv: Vec<FqElem>,
}

impl ManinSpace {
    pub fn new(level: &GaussianInt, spec: &WeightSpec, character: &CharacterSpec) -> Result<Self> {
        Self::from_parts(P1Table::new(level)?, WeightSpace::new(spec)?, character.clone())
    }

    pub fn from_parts(table: P1Table, weight: WeightSpace, character: CharacterSpec) -> Result<Self> {
        if character.level != *table.level() {
            return Err(Error::InvalidInput(format!(
                "character level {} differs from table level {}",
                character.level,
                table.level()
            )));
        }
        let f = weight.field().clone();
        let chi_inv =
            character.table(table.ring(), &f)?.into_iter().map(|x| f.inv(x).unwrap_or(FqElem::ZERO)).collect();
        Ok(ManinSpace { table, weight, character, chi_inv })
    }

    pub fn table(&self) -> &P1Table {
        &self.table
    }

    pub fn weight(&self) -> &WeightSpace {
        &self.weight
    }

    pub fn character(&self) -> &CharacterSpec {
        &self.character
    }

    pub fn field(&self) -> &FqField {
        self.weight.field()
    }

    pub fn dim_v(&self) -> usize {
        self.weight.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.table.len() * self.weight.dim()
    }

    #[inline]
    pub fn index(&self, p: usize, j: usize) -> usize {
        p * self.weight.dim() + j
    }

    #[inline]
    pub fn split_index(&self, idx: usize) -> (usize, usize) {
        (idx / self.weight.dim(), idx % self.weight.dim())
    }

    /// `eps(u)^{-1}` for a scaler index.
    #[inline]
    pub fn chi_inv(&self, u: usize) -> FqElem {
        self.chi_inv[u]
    }

    /// The P^1 point of `m` (a matrix with unit determinant) and the character
    /// coefficient picked up when moving `m` onto the lift of that point.
    pub fn term(&self, m: &GMatrix2) -> Result<(usize, FqElem)> {
        let (p, u) = self.table.normalize(&m.c, &m.d)?;
        Ok((p, self.chi_inv[u]))
    }

    /// `(p (x) e_j) * h` for `h` in `GL_2(O)`, as sparse terms.
    fn right_action(&self, p: usize, j: usize, h: &GMatrix2, hinv: &GMatrix2) -> Result<Vec<(u32, FqElem)>> {
        let f = self.field();
        let (p2, u) = self.table.act_right(p, h)?;
        let c = self.chi_inv[u];
        let col = self.weight.action_column(hinv, j);
        Ok(col
            .into_iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| (self.index(p2, k) as u32, f.mul(c, x)))
            .collect())
    }

    /// The scalar by which `-I` acts on every Manin symbol.
    fn minus_identity_scalar(&self) -> Result<FqElem> {
        let m = GMatrix2::scalar(-&GaussianInt::one());
        let (_, u) = self.table.act_right(0, &m)?;
        let col = self.weight.action_column(&m, 0);
        Ok(self.field().mul(self.chi_inv[u], col[0]))
    }

    /// Build the relation rows and eliminate them.
    pub fn quotient(&self) -> Result<QuotientSpace> {
        self.quotient_with(&EliminationOptions::default())
    }

    pub fn quotient_with(&self, opts: &EliminationOptions) -> Result<QuotientSpace> {
        let rows = compact_relation_rows(self)?;
        let q = quotient(self.field(), self.ambient_dim(), self.dim_v(), rows, opts);
        if cfg!(debug_assertions) && self.ambient_dim() <= 600 {
            let alt = quotient(self.field(), self.ambient_dim(), self.dim_v(), alt_relation_rows(self)?, opts);
            debug_assert_eq!(alt.dim(), q.dim(), "relation sets disagree");
        }
        Ok(q)
    }
}

/// A sparse vector of Manin symbols, keyed by `(P^1 index, weight index)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManinVector {
    field: FqField,
    entries: BTreeMap<(usize, usize), FqElem>,
}

impl ManinVector {
    pub fn new(field: &FqField) -> Self {
        ManinVector { field: field.clone(), entries: BTreeMap::new() }
    }

    pub fn add_term(&mut self, p: usize, j: usize, c: FqElem) {
        if c.is_zero() {
            return;
        }
        let f = &self.field;
        let slot = self.entries.entry((p, j)).or_insert(FqElem::ZERO);
        *slot = f.add(*slot, c);
        if slot.is_zero() {
            self.entries.remove(&(p, j));
        }
    }

    /// Add `c * (p (x) v)`.
    pub fn add_vec(&mut self, p: usize, v: &[FqElem], c: FqElem) {
        for (j, &x) in v.iter().enumerate() {
            if !x.is_zero() {
                let t = self.field.mul(c, x);
                self.add_term(p, j, t);
            }
        }
    }

    pub fn add(&mut self, o: &ManinVector) {
        for (&(p, j), &c) in &o.entries {
            self.add_term(p, j, c);
        }
    }

    pub fn scale(&self, c: FqElem) -> ManinVector {
        let mut out = ManinVector::new(&self.field);
        for (&(p, j), &x) in &self.entries {
            out.add_term(p, j, self.field.mul(c, x));
        }
        out
    }

    pub fn get(&self, p: usize, j: usize) -> FqElem {
        self.entries.get(&(p, j)).copied().unwrap_or(FqElem::ZERO)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), FqElem)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }
}

fn row_plus(f: &FqField, mut base: SparseRow, terms: &[Vec<(u32, FqElem)>], signs: &[bool]) -> SparseRow {
    for (t, &neg) in terms.iter().zip(signs) {
        for &(c, a) in t {
            base.push((c, if neg { f.neg(a) } else { a }));
        }
    }
    base.sort_unstable_by_key(|e| e.0);
    let mut out: SparseRow = Vec::with_capacity(base.len());
    for (c, a) in base {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 = f.add(last.1, a),
            _ => out.push((c, a)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

struct Generators {
    j: (GMatrix2, GMatrix2),
    s: (GMatrix2, GMatrix2),
    l: (GMatrix2, GMatrix2),
    l2: (GMatrix2, GMatrix2),
}

impl Generators {
    fn new() -> Self {
        let pair = |m: GMatrix2| {
            let inv = m.inverse().expect("unit determinant");
            (m, inv)
        };
        let l = GMatrix2::l();
        let l2 = &l * &l;
        Generators { j: pair(GMatrix2::j()), s: pair(GMatrix2::s()), l: pair(l), l2: pair(l2) }
    }
}

/// For every generator `x = p (x) e_j`, the rows `x(I-J)`, `x(I+S)` and
/// `x(I+L+L^2)`, in that order. Columns are `p * dim V + j`.
pub fn relation_rows(space: &ManinSpace) -> Result<Vec<SparseRow>> {
    let f = space.field();
    let g = Generators::new();
    let mut rows = Vec::with_capacity(3 * space.ambient_dim());
    for p in 0..space.table().len() {
        for j in 0..space.dim_v() {
            let x = vec![(space.index(p, j) as u32, FqElem::ONE)];
            let xj = space.right_action(p, j, &g.j.0, &g.j.1)?;
            let xs = space.right_action(p, j, &g.s.0, &g.s.1)?;
            let xl = space.right_action(p, j, &g.l.0, &g.l.1)?;
            let xl2 = space.right_action(p, j, &g.l2.0, &g.l2.1)?;
            rows.push(row_plus(f, x.clone(), &[xj], &[true]));
            rows.push(row_plus(f, x.clone(), &[xs], &[false]));
            rows.push(row_plus(f, x, &[xl, xl2], &[false, false]));
        }
    }
    Ok(rows)
}

/// The same span as [`relation_rows`] with fewer rows: when `-I` acts
/// trivially, the `I+L+L^2` rows of `p`, `pL` and `pL^2` span the same space,
/// so only the lowest point of each orbit contributes them.
pub fn compact_relation_rows(space: &ManinSpace) -> Result<Vec<SparseRow>> {
    if space.minus_identity_scalar()? != FqElem::ONE {
        return relation_rows(space);
    }
    let f = space.field();
    let g = Generators::new();
    let n = space.table().len();
    let mut rows = Vec::with_capacity(3 * space.ambient_dim());
    for p in 0..n {
        let (pl, _) = space.table().act_right(p, &g.l.0)?;
        let (pl2, _) = space.table().act_right(p, &g.l2.0)?;
        let rep = p <= pl && p <= pl2;
        for j in 0..space.dim_v() {
            let x = vec![(space.index(p, j) as u32, FqElem::ONE)];
            let xj = space.right_action(p, j, &g.j.0, &g.j.1)?;
            let xs = space.right_action(p, j, &g.s.0, &g.s.1)?;
            rows.push(row_plus(f, x.clone(), &[xj], &[true]));
            rows.push(row_plus(f, x.clone(), &[xs], &[false]));
            if rep {
                let xl = space.right_action(p, j, &g.l.0, &g.l.1)?;
                let xl2 = space.right_action(p, j, &g.l2.0, &g.l2.1)?;
                rows.push(row_plus(f, x, &[xl, xl2], &[false, false]));
            }
        }
    }
    Ok(rows)
}

/// The alternative relation set `x(I-J)`, `x(I+S)`, `x(I-T-T')`.
pub fn alt_relation_rows(space: &ManinSpace) -> Result<Vec<SparseRow>> {
    let f = space.field();
    let g = Generators::new();
    let t = GMatrix2::t();
    let tp = GMatrix2::t_prime();
    let (ti, tpi) = (t.inverse().unwrap(), tp.inverse().unwrap());
    let mut rows = Vec::with_capacity(3 * space.ambient_dim());
    for p in 0..space.table().len() {
        for j in 0..space.dim_v() {
            let x = vec![(space.index(p, j) as u32, FqElem::ONE)];
            let xj = space.right_action(p, j, &g.j.0, &g.j.1)?;
            let xs = space.right_action(p, j, &g.s.0, &g.s.1)?;
            let xt = space.right_action(p, j, &t, &ti)?;
            let xtp = space.right_action(p, j, &tp, &tpi)?;
            rows.push(row_plus(f, x.clone(), &[xj], &[true]));
            rows.push(row_plus(f, x.clone(), &[xs], &[false]));
            rows.push(row_plus(f, x, &[xt, xtp], &[true, true]));
        }
    }
    Ok(rows)
}

/// The quotient `H` of the Manin-symbol space by the relations.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    red: Reduction,
    dim_v: usize,
}

/// Eliminate `rows` over `field` in an ambient space of `ncols` columns.
pub fn quotient(
    field: &FqField,
    ncols: usize,
    dim_v: usize,
    rows: Vec<SparseRow>,
    opts: &EliminationOptions,
) -> QuotientSpace {
    let red = eliminate(field, ncols, rows, opts);
    log::debug!("quotient: ambient {} -> reduced {} -> dim {} ({:?})", ncols, red.nreduced, red.dim(), red.stats);
    QuotientSpace { red, dim_v }
}

impl QuotientSpace {
    pub fn dim(&self) -> usize {
        self.red.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.red.ncols
    }

    pub fn field(&self) -> &FqField {
        &self.red.field
    }

    pub fn reduction(&self) -> &Reduction {
        &self.red
    }

    /// Ambient columns whose images form the basis of `H`.
    pub fn basis_columns(&self) -> Vec<usize> {
        self.red.basis_columns()
    }

    /// The basis of `H` as Manin generators `(P^1 index, weight index)`.
    pub fn basis(&self) -> Vec<(usize, usize)> {
        self.basis_columns().into_iter().map(|c| (c / self.dim_v, c % self.dim_v)).collect()
    }

    /// Image of an ambient column: `None` if it dies in the quotient.
    pub fn column_image(&self, c: usize) -> Option<Vec<FqElem>> {
        match self.red.image[c] {
            ColumnImage::Zero => None,
            ColumnImage::Reduced(r, m) => {
                let f = self.field();
                Some(self.red.expr_row(r as usize).iter().map(|&x| f.mul(x, m)).collect())
            }
        }
    }

    pub fn projector(&self) -> Projector<'_> {
        Projector::new(&self.red)
    }

    pub fn project(&self, v: &ManinVector) -> Result<Vec<FqElem>> {
        let mut p = self.projector();
        for ((pt, j), c) in v.iter() {
            if j >= self.dim_v || pt * self.dim_v + j >= self.ambient_dim() {
                return Err(Error::Dimension { expected: self.ambient_dim(), got: pt * self.dim_v + j });
            }
            p.add(pt * self.dim_v + j, c);
        }
        Ok(p.finish())
    }

    pub fn project_row(&self, row: &[(u32, FqElem)]) -> Vec<FqElem> {
        let mut p = self.projector();
        for &(c, a) in row {
            p.add(c as usize, a);
        }
        p.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(level: (i64, i64), ell: u64, a: [u32; 2], b: [u32; 2], quad: bool) -> ManinSpace {
        let lvl = GaussianInt::small(level.0, level.1);
        let eps = if quad { CharacterSpec::quadratic(&lvl) } else { CharacterSpec::trivial(&lvl) };
        ManinSpace::new(&lvl, &WeightSpec::new(ell, a, b).unwrap(), &eps).unwrap()
    }

    #[test]
    fn row_counts() {
        let s = space((1, 1), 5, [0, 0], [1, 1], false);
        assert_eq!(relation_rows(&s).unwrap().len(), 9);
        let s = space((1, 2), 7, [0, 0], [2, 3], false);
        assert_eq!(relation_rows(&s).unwrap().len(), 3 * 6 * 6);
    }

    #[test]
    fn relations_project_to_zero() {
        for s in [
            space((1, 1), 5, [0, 0], [1, 1], false),
            space((3, 0), 5, [0, 0], [3, 2], false),
            space((2, 1), 7, [1, 0], [2, 2], false),
            space((1, 2), 3, [0, 1], [2, 3], false),
        ] {
            let q = s.quotient().unwrap();
            for row in relation_rows(&s).unwrap() {
                assert!(q.project_row(&row).iter().all(|x| x.is_zero()));
            }
            for (k, c) in q.basis_columns().into_iter().enumerate() {
                let v = q.column_image(c).unwrap();
                assert!(v.iter().enumerate().all(|(i, x)| *x == if i == k { FqElem::ONE } else { FqElem::ZERO }));
            }
        }
    }

    #[test]
    fn compact_rows_same_dimension() {
        let s = space((3, 0), 7, [0, 0], [3, 3], false);
        let f = s.field();
        let full = quotient(f, s.ambient_dim(), s.dim_v(), relation_rows(&s).unwrap(), &Default::default());
        let compact = quotient(f, s.ambient_dim(), s.dim_v(), compact_relation_rows(&s).unwrap(), &Default::default());
        assert_eq!(full.dim(), compact.dim());
    }
}
