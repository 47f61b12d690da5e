//! Hecke operators on the quotient `H`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::FqElem;
use crate::gaussian::{factor, ggcd, residues_mod, GMatrix2, GaussianInt};
use crate::linalg::FqMatrix;
use crate::manin::{ManinSpace, QuotientSpace};
use crate::modsym::{unimodular_terms, Cusp, ModSym};

/// Coset representatives of `Delta_q` with their character coefficients.
#[derive(Clone, Debug)]
pub struct DeltaCosets {
    pub prime: GaussianInt,
    pub cosets: Vec<(FqElem, GMatrix2)>,
}

/// `pi` must generate a prime ideal.
fn check_prime(pi: &GaussianInt) -> Result<()> {
    let (_, facs) = factor(pi)?;
    if facs.len() != 1 || facs[0].1 != 1 {
        return Err(Error::InvalidInput(format!("{pi} does not generate a prime ideal")));
    }
    Ok(())
}

/// The decomposition of `Delta_q` for the generator `pi`: `eps(pi) [[pi,0],[0,1]]`
/// followed by `[[1,x],[0,pi]]` for `x` running over the residues mod `pi`.
pub fn delta_cosets(pi: &GaussianInt, space: &ManinSpace) -> Result<DeltaCosets> {
    check_prime(pi)?;
    let level = space.table().level();
    if !ggcd(pi, level)?.is_one() {
        return Err(Error::PrimeExcluded { prime: pi.clone(), reason: "prime divides level".into() });
    }
    let ell = GaussianInt::small(space.weight().spec().ell as i64, 0);
    if !ggcd(pi, &ell)?.is_one() {
        return Err(Error::PrimeExcluded { prime: pi.clone(), reason: "prime divides l".into() });
    }
    let f = space.field();
    let mut cosets = Vec::new();
    let eps_pi = space.character().value(pi, f)?;
    let z = GaussianInt::zero();
    let one = GaussianInt::one();
    cosets.push((eps_pi, GMatrix2::new(pi.clone(), z.clone(), z.clone(), one.clone())));
    for x in residues_mod(pi)? {
        cosets.push((FqElem::ONE, GMatrix2::new(one.clone(), x, z.clone(), pi.clone())));
    }
    Ok(DeltaCosets { prime: pi.clone(), cosets })
}

/// The matrix of `T_q` on the basis of `H`; column `k` is the image of basis vector `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeMatrix {
    pub prime: GaussianInt,
    pub matrix: FqMatrix,
}

impl fmt::Display for HeckeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "T_{}:", self.prime)?;
        let field = self.matrix.field();
        for r in 0..self.matrix.rows() {
            let row: Vec<String> = self.matrix.row(r).iter().map(|&x| field.format(x)).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Image under `T` of the basis generator `(p, j)`, in `H` coordinates.
fn hecke_column(
    space: &ManinSpace,
    q: &QuotientSpace,
    cosets: &DeltaCosets,
    p: usize,
    j: usize,
    max_len: &mut usize,
) -> Result<Vec<FqElem>> {
    let f = space.field();
    let ws = space.weight();
    let g = space.table().lift(p);
    let mut proj = q.projector();
    for (coef, delta) in &cosets.cosets {
        let m = delta * g;
        let sym = ModSym::new(Cusp::new(m.b.clone(), m.d.clone())?, Cusp::new(m.a.clone(), m.c.clone())?);
        let terms = unimodular_terms(&sym)?;
        *max_len = (*max_len).max(terms.len());
        for (sign, gamma) in terms {
            let (pt, chi) = space.term(&gamma)?;
            if chi.is_zero() {
                continue;
            }
            let mut c = f.mul(*coef, chi);
            if sign < 0 {
                c = f.neg(c);
            }
            let inv = gamma.inverse().expect("unimodular");
            let col = ws.action_column(&(&inv * &m), j);
            for (k, x) in col.into_iter().enumerate() {
                if !x.is_zero() {
                    proj.add(space.index(pt, k), f.mul(c, x));
                }
            }
        }
    }
    Ok(proj.finish())
}

/// Compute `T_pi` on `H`, spreading columns over `threads` workers.
pub fn hecke_matrix(pi: &GaussianInt, space: &ManinSpace, q: &QuotientSpace, threads: usize) -> Result<HeckeMatrix> {
    let cosets = delta_cosets(pi, space)?;
    let basis = q.basis();
    let n = basis.len();
    let f = space.field();
    let threads = threads.max(1).min(n.max(1));
    let chunk = n.div_ceil(threads).max(1);
    let results: Vec<Result<(Vec<Vec<FqElem>>, usize)>> = std::thread::scope(|s| {
        let handles: Vec<_> = basis
            .chunks(chunk)
            .map(|part| {
                let cosets = &cosets;
                s.spawn(move || {
                    let mut max_len = 0;
                    let cols = part
                        .iter()
                        .map(|&(p, j)| hecke_column(space, q, cosets, p, j, &mut max_len))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((cols, max_len))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut matrix = FqMatrix::zeros(f, n, n);
    let mut k = 0;
    let mut max_len = 0;
    for r in results {
        let (cols, len) = r?;
        max_len = max_len.max(len);
        for col in cols {
            for (i, x) in col.into_iter().enumerate() {
                matrix.set(i, k, x);
            }
            k += 1;
        }
    }
    log::debug!("T_{pi}: dim {n}, longest expansion {max_len}");
    Ok(HeckeMatrix { prime: pi.clone(), matrix })
}

/// Recompute `T` with the generator `i * pi` and compare. Only the first coset
/// sees the generator through `eps`, so the expected relation is
/// `T_{i pi} = eps(i) T_pi`; for characters trivial on units this is equality.
pub fn generator_invariance_check(
    pi: &GaussianInt,
    space: &ManinSpace,
    q: &QuotientSpace,
    threads: usize,
) -> Result<bool> {
    let a = hecke_matrix(pi, space, q, threads)?;
    let b = hecke_matrix(&pi.mul_i_pow(1), space, q, threads)?;
    let eps_i = space.character().value(&GaussianInt::small(0, 1), space.field())?;
    Ok(a.matrix.scale(eps_i) == b.matrix)
}

/// Whether two Hecke matrices commute.
pub fn commute(a: &HeckeMatrix, b: &HeckeMatrix) -> Result<bool> {
    Ok(a.matrix.mul(&b.matrix)? == b.matrix.mul(&a.matrix)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::{CharacterSpec, WeightSpec};

    fn gi(re: i64, im: i64) -> GaussianInt {
        GaussianInt::small(re, im)
    }

    #[test]
    fn coset_shapes() {
        let lvl = gi(3, 0);
        let s =
            ManinSpace::new(&lvl, &WeightSpec::new(7, [0, 0], [1, 1]).unwrap(), &CharacterSpec::trivial(&lvl)).unwrap();
        let c = delta_cosets(&gi(1, 1), &s).unwrap();
        assert_eq!(c.cosets.len(), 3);
        assert_eq!(c.cosets[0].1, GMatrix2::small((1, 1), (0, 0), (0, 0), (1, 0)));
        assert_eq!(c.cosets[1].1, GMatrix2::small((1, 0), (0, 0), (0, 0), (1, 1)));
        assert_eq!(c.cosets[2].1, GMatrix2::small((1, 0), (1, 0), (0, 0), (1, 1)));
        assert_eq!(delta_cosets(&gi(1, 2), &s).unwrap().cosets.len(), 6);
        assert!(matches!(delta_cosets(&gi(3, 0), &s), Err(Error::PrimeExcluded { .. })));
        assert!(matches!(delta_cosets(&gi(7, 0), &s), Err(Error::PrimeExcluded { .. })));
        assert!(delta_cosets(&gi(2, 0), &s).is_err());
    }
}
