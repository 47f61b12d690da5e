//! Dense matrices over a finite field.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FqElem, FqField};

#[derive(Clone, PartialEq, Eq)]
pub struct FqMatrix {
    field: FqField,
    rows: usize,
    cols: usize,
    data: Vec<FqElem>,
}

impl fmt::Debug for FqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {}", self.rows, self.cols, self.field.descriptor())?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|&x| self.field.format(x)).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Result of a reduced row echelon computation.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: FqMatrix,
    pub pivots: Vec<usize>,
}

impl FqMatrix {
    pub fn zeros(field: &FqField, rows: usize, cols: usize) -> Self {
        FqMatrix { field: field.clone(), rows, cols, data: vec![FqElem::ZERO; rows * cols] }
    }

    pub fn identity(field: &FqField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for k in 0..n {
            m.set(k, k, FqElem::ONE);
        }
        m
    }

    pub fn from_rows(field: &FqField, rows: &[Vec<FqElem>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(field, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn from_fn(field: &FqField, rows: usize, cols: usize, f: impl Fn(usize, usize) -> FqElem) -> Self {
        let mut m = Self::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FqElem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FqElem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FqElem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [FqElem] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<FqElem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn data(&self) -> &[FqElem] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, o: &FqMatrix) -> Result<FqMatrix> {
        if self.cols != o.rows {
            return Err(Error::Dimension { expected: self.cols, got: o.rows });
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let orow = o.row(k);
                let dst = &mut out.data[i * o.cols..(i + 1) * o.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    if !b.is_zero() {
                        *d = f.add(*d, f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[FqElem]) -> Vec<FqElem> {
        assert_eq!(v.len(), self.cols);
        let f = &self.field;
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(FqElem::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
            .collect()
    }

    pub fn add(&self, o: &FqMatrix) -> FqMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let f = &self.field;
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f.add(a, b)).collect();
        FqMatrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &FqMatrix) -> FqMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let f = &self.field;
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f.sub(a, b)).collect();
        FqMatrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: FqElem) -> FqMatrix {
        let f = &self.field;
        let data = self.data.iter().map(|&a| f.mul(a, s)).collect();
        FqMatrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    /// `self - a*I`.
    pub fn sub_scalar(&self, a: FqElem) -> FqMatrix {
        let mut m = self.clone();
        for k in 0..self.rows.min(self.cols) {
            let v = self.field.sub(m.get(k, k), a);
            m.set(k, k, v);
        }
        m
    }

    /// Kronecker product, with `self` as the major index.
    pub fn kron(&self, o: &FqMatrix) -> FqMatrix {
        let f = &self.field;
        let (r, c) = (self.rows * o.rows, self.cols * o.cols);
        Self::from_fn(f, r, c, |i, j| f.mul(self.get(i / o.rows, j / o.cols), o.get(i % o.rows, j % o.cols)))
    }

    /// Apply a field map (for example an embedding) entrywise.
    pub fn map_into(&self, target: &FqField, table: &[FqElem]) -> FqMatrix {
        FqMatrix {
            field: target.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| table[x.index()]).collect(),
        }
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> Echelon {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    m.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c)).expect("nonzero pivot");
            for j in c..self.cols {
                let v = f.mul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            let prow: Vec<FqElem> = m.row(r).to_vec();
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                let dst = m.row_mut(i);
                for j in c..dst.len() {
                    if !prow[j].is_zero() {
                        dst[j] = f.sub(dst[j], f.mul(factor, prow[j]));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// A basis of the right kernel `{v : Mv = 0}`, as rows of the result.
    pub fn kernel(&self) -> FqMatrix {
        let f = &self.field;
        let e = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !e.pivots.contains(c)).collect();
        let mut out = Self::zeros(f, free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            out.set(k, fc, FqElem::ONE);
            for (r, &pc) in e.pivots.iter().enumerate() {
                out.set(k, pc, f.neg(e.matrix.get(r, fc)));
            }
        }
        out
    }

    /// Rows of `self` stacked on rows of `o`.
    pub fn vstack(&self, o: &FqMatrix) -> FqMatrix {
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&o.data);
        FqMatrix { field: self.field.clone(), rows: self.rows + o.rows, cols: self.cols, data }
    }

    pub fn select_rows(&self, idx: &[usize]) -> FqMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        FqMatrix { field: self.field.clone(), rows: idx.len(), cols: self.cols, data }
    }
}
