//! Characteristic polynomials and simultaneous eigensystems of commuting
//! operators.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{roots_in_field, FqElem, FqField};
use crate::gaussian::GaussianInt;
use crate::hecke::HeckeMatrix;
use crate::linalg::FqMatrix;

/// Characteristic polynomial `det(xI - M)`, coefficients from low to high.
///
/// Reduces to upper Hessenberg form by elementary similarities, then runs the
/// usual three-term recurrence on the leading principal minors.
pub fn char_poly(m: &FqMatrix) -> Result<Vec<FqElem>> {
    if !m.is_square() {
        return Err(Error::Dimension { expected: m.rows(), got: m.cols() });
    }
    let f = m.field();
    let n = m.rows();
    let mut h: Vec<Vec<FqElem>> = (0..n).map(|r| m.row(r).to_vec()).collect();
    for j in 0..n.saturating_sub(2) {
        let Some(i) = (j + 1..n).find(|&i| !h[i][j].is_zero()) else {
            continue;
        };
        if i != j + 1 {
            h.swap(i, j + 1);
            for row in h.iter_mut() {
                row.swap(i, j + 1);
            }
        }
        let pinv = f.inv(h[j + 1][j]).unwrap();
        for r in j + 2..n {
            let u = f.mul(h[r][j], pinv);
            if u.is_zero() {
                continue;
            }
            for c in 0..n {
                let v = f.sub(h[r][c], f.mul(u, h[j + 1][c]));
                h[r][c] = v;
            }
            for row in h.iter_mut() {
                let v = f.add(row[j + 1], f.mul(u, row[r]));
                row[j + 1] = v;
            }
        }
    }
    let mut p: Vec<Vec<FqElem>> = vec![vec![FqElem::ONE]];
    for k in 1..=n {
        let hk = h[k - 1][k - 1];
        let mut next = f.poly_mul(&p[k - 1], &[f.neg(hk), FqElem::ONE]);
        let mut t = FqElem::ONE;
        for i in 1..k {
            t = f.mul(t, h[k - i][k - i - 1]);
            let c = f.mul(t, h[k - i - 1][k - 1]);
            if c.is_zero() {
                continue;
            }
            for (d, &x) in p[k - i - 1].iter().enumerate() {
                next[d] = f.sub(next[d], f.mul(c, x));
            }
        }
        p.push(next);
    }
    Ok(p.pop().unwrap())
}

/// Evaluate a polynomial at a square matrix.
pub fn poly_at_matrix(p: &[FqElem], m: &FqMatrix) -> Result<FqMatrix> {
    let f = m.field();
    let mut acc = FqMatrix::zeros(f, m.rows(), m.cols());
    for &c in p.iter().rev() {
        acc = acc.mul(m)?;
        acc = acc.add(&FqMatrix::identity(f, m.rows()).scale(c));
    }
    Ok(acc)
}

/// A simultaneous eigensystem `{a_q}` with the dimension of its common eigenspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenSystem {
    pub eigenvalues: Vec<(GaussianInt, FqElem)>,
    pub multiplicity: usize,
    pub field: FqField,
}

impl EigenSystem {
    pub fn value(&self, prime: &GaussianInt) -> Option<FqElem> {
        self.eigenvalues.iter().find(|(p, _)| p == prime).map(|e| e.1)
    }
}

impl fmt::Display for EigenSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.eigenvalues.iter().map(|(p, a)| format!("{p}:{}", self.field.format(*a))).collect();
        write!(f, "mult {} [{}]", self.multiplicity, parts.join(" "))
    }
}

/// All eigensystems found over the search field, plus the dimension not
/// accounted for by common eigenvectors there.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub systems: Vec<EigenSystem>,
    pub residue_dim: usize,
    pub dim: usize,
}

/// A subspace given by a reduced row echelon basis.
struct Subspace {
    rows: FqMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    fn from_rows(m: &FqMatrix) -> Self {
        let e = m.rref();
        let r = e.pivots.len();
        let idx: Vec<usize> = (0..r).collect();
        Subspace { rows: e.matrix.select_rows(&idx), pivots: e.pivots }
    }

    fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Matrix of `t` restricted to this (invariant) subspace, acting on coordinate columns.
    fn restrict(&self, t: &FqMatrix) -> FqMatrix {
        let f = t.field();
        let d = self.dim();
        let mut out = FqMatrix::zeros(f, d, d);
        for k in 0..d {
            let img = t.mul_vec(self.rows.row(k));
            for (i, &p) in self.pivots.iter().enumerate() {
                out.set(i, k, img[p]);
            }
        }
        out
    }

    /// Subspace spanned by the given coordinate vectors (as rows).
    fn sub(&self, coords: &FqMatrix) -> Subspace {
        let amb = coords.mul(&self.rows).expect("shapes agree");
        Subspace::from_rows(&amb)
    }
}

fn refine(
    ops: &[(GaussianInt, FqMatrix)],
    k: usize,
    space: Subspace,
    prefix: &mut Vec<(GaussianInt, FqElem)>,
    out: &mut Vec<EigenSystem>,
    residue: &mut usize,
    field: &FqField,
) -> Result<()> {
    if space.dim() == 0 {
        return Ok(());
    }
    if k == ops.len() {
        out.push(EigenSystem { eigenvalues: prefix.clone(), multiplicity: space.dim(), field: field.clone() });
        return Ok(());
    }
    let t = space.restrict(&ops[k].1);
    let mut roots = roots_in_field(field, &char_poly(&t)?)?;
    roots.dedup();
    let mut covered = 0;
    for a in roots {
        let ker = t.sub_scalar(a).kernel();
        if ker.rows() == 0 {
            continue;
        }
        let child = space.sub(&ker);
        covered += child.dim();
        prefix.push((ops[k].0.clone(), a));
        refine(ops, k + 1, child, prefix, out, residue, field)?;
        prefix.pop();
    }
    *residue += space.dim() - covered;
    Ok(())
}

/// Common eigensystems of commuting Hecke matrices over `search` (which must
/// contain their field).
pub fn simultaneous_eigensystems(ops: &[HeckeMatrix], search: &FqField) -> Result<EigenDecomposition> {
    let Some(first) = ops.first() else {
        return Ok(EigenDecomposition { systems: Vec::new(), residue_dim: 0, dim: 0 });
    };
    let n = first.matrix.rows();
    let table = first.matrix.field().embedding_into(search)?;
    let mats: Vec<(GaussianInt, FqMatrix)> = ops
        .iter()
        .map(|h| {
            if h.matrix.rows() != n || !h.matrix.is_square() {
                return Err(Error::Dimension { expected: n, got: h.matrix.rows() });
            }
            Ok((h.prime.clone(), h.matrix.map_into(search, &table)))
        })
        .collect::<Result<_>>()?;
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            if mats[i].1.mul(&mats[j].1)? != mats[j].1.mul(&mats[i].1)? {
                return Err(Error::NonCommuting(mats[i].0.to_string(), mats[j].0.to_string()));
            }
        }
    }
    let mut systems = Vec::new();
    let mut residue = 0;
    refine(
        &mats,
        0,
        Subspace::from_rows(&FqMatrix::identity(search, n)),
        &mut Vec::new(),
        &mut systems,
        &mut residue,
        search,
    )?;
    // soundness: the common kernel over the whole space really has this dimension
    for s in &systems {
        let mut stack = FqMatrix::zeros(search, 0, n);
        for ((_, m), (_, a)) in mats.iter().zip(&s.eigenvalues) {
            stack = stack.vstack(&m.sub_scalar(*a));
        }
        let common = n - stack.rank();
        if common < s.multiplicity || common == 0 {
            return Err(Error::Check(format!("eigensystem {s} has common kernel of dimension {common}")));
        }
    }
    systems.sort_by(|x, y| {
        let key = |s: &EigenSystem| s.eigenvalues.iter().map(|(_, a)| search.coeffs(*a)).collect::<Vec<_>>();
        key(x).cmp(&key(y))
    });
    Ok(EigenDecomposition { systems, residue_dim: residue, dim: n })
}
