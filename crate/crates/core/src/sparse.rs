//! Cokernel computation for large sparse relation systems over `F_q`.
//!
//! Elimination runs in three phases. Relations with at most two terms are
//! absorbed by a weighted union-find (each column becomes a multiple of a root
//! column, or zero). The remaining rows are eliminated with Markowitz-style
//! pivoting (shortest row first, least-populated column within it, lowest
//! column on ties) until the active part becomes dense, at which point it is
//! finished with dense row reduction. Finally every surviving column is
//! expressed in terms of the free columns by back substitution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{FqElem, FqField};

/// A sparse row: `(column, coefficient)` pairs.
pub type SparseRow = Vec<(u32, FqElem)>;

/// Tuning knobs for [`eliminate`].
#[derive(Clone, Debug)]
pub struct EliminationOptions {
    /// Switch to dense reduction once the active block is this dense.
    pub dense_threshold: f64,
    /// Compress tall dense blocks with random row combinations.
    pub compress: bool,
    pub seed: u64,
}

impl Default for EliminationOptions {
    fn default() -> Self {
        EliminationOptions { dense_threshold: 0.2, compress: true, seed: 0x5eed }
    }
}

/// Where an original column went.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnImage {
    Zero,
    /// `mult * reduced[idx]`.
    Reduced(u32, FqElem),
}

/// Statistics from one elimination run.
#[derive(Clone, Debug, Default)]
pub struct EliminationStats {
    pub rows_in: usize,
    pub reduced_cols: usize,
    pub sparse_pivots: usize,
    pub dense_rows: usize,
    pub dense_cols: usize,
    pub dense_rank: usize,
}

/// The quotient `F_q^ncols / rowspace`, in coordinates.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub field: FqField,
    pub ncols: usize,
    pub image: Vec<ColumnImage>,
    /// Number of reduced (union-find root) columns.
    pub nreduced: usize,
    /// Reduced columns that are free, in increasing order; these index the quotient basis.
    pub free: Vec<u32>,
    /// Row-major `nreduced x dim` matrix: quotient coordinates of each reduced column.
    pub expr: Vec<FqElem>,
    pub stats: EliminationStats,
}

impl Reduction {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    #[inline]
    pub fn expr_row(&self, r: usize) -> &[FqElem] {
        let d = self.dim();
        &self.expr[r * d..(r + 1) * d]
    }

    /// For each free column, the lowest original column mapping to it.
    pub fn basis_columns(&self) -> Vec<usize> {
        let mut rep = vec![usize::MAX; self.nreduced];
        for (c, img) in self.image.iter().enumerate() {
            if let ColumnImage::Reduced(r, _) = img {
                if rep[*r as usize] == usize::MAX {
                    rep[*r as usize] = c;
                }
            }
        }
        self.free.iter().map(|&r| rep[r as usize]).collect()
    }
}

struct UnionFind {
    parent: Vec<u32>,
    mult: Vec<FqElem>,
    zero: Vec<bool>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), mult: vec![FqElem::ONE; n], zero: vec![false; n] }
    }

    /// `x = m * root`.
    fn find(&mut self, f: &FqField, x: u32) -> (u32, FqElem) {
        let mut path = Vec::new();
        let mut cur = x;
        while self.parent[cur as usize] != cur {
            path.push(cur);
            cur = self.parent[cur as usize];
        }
        let root = cur;
        // compress from the top down so each node's multiplier is relative to root
        let mut acc = FqElem::ONE;
        for &node in path.iter().rev() {
            acc = f.mul(self.mult[node as usize], acc);
            self.mult[node as usize] = acc;
            self.parent[node as usize] = root;
        }
        let m = if x == root { FqElem::ONE } else { self.mult[x as usize] };
        (root, m)
    }

    /// Express a row in root coordinates, dropping zero roots and merging terms.
    fn substitute(&mut self, f: &FqField, row: &[(u32, FqElem)]) -> SparseRow {
        let mut out: SparseRow = Vec::with_capacity(row.len());
        for &(c, a) in row {
            let (r, m) = self.find(f, c);
            if self.zero[r as usize] {
                continue;
            }
            out.push((r, f.mul(a, m)));
        }
        normalize_row(f, &mut out);
        out
    }

    /// Absorb a substituted row of length at most two. Returns whether
    /// anything changed.
    fn absorb(&mut self, f: &FqField, row: &[(u32, FqElem)]) -> bool {
        match row {
            [] => false,
            [(r, _)] => {
                self.zero[*r as usize] = true;
                true
            }
            [(r1, a1), (r2, a2)] => {
                // a1 x1 + a2 x2 = 0 with r1 < r2: x2 = -(a1/a2) x1
                let k = f.neg(f.mul(*a1, f.inv(*a2).expect("nonzero")));
                self.parent[*r2 as usize] = *r1;
                self.mult[*r2 as usize] = k;
                if self.zero[*r2 as usize] {
                    self.zero[*r1 as usize] = true;
                }
                true
            }
            _ => unreachable!("only short rows are absorbed"),
        }
    }
}

/// Sort by column, merge duplicates, drop zeros.
fn normalize_row(f: &FqField, row: &mut SparseRow) {
    row.sort_unstable_by_key(|e| e.0);
    let mut w = 0;
    for k in 0..row.len() {
        if w > 0 && row[w - 1].0 == row[k].0 {
            row[w - 1].1 = f.add(row[w - 1].1, row[k].1);
        } else {
            row[w] = row[k];
            w += 1;
        }
    }
    row.truncate(w);
    row.retain(|e| !e.1.is_zero());
}

/// `dst - factor * src` for sorted sparse rows.
fn axpy(f: &FqField, dst: &[(u32, FqElem)], factor: FqElem, src: &[(u32, FqElem)], out: &mut SparseRow) {
    out.clear();
    let nf = f.neg(factor);
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        if j == src.len() || (i < dst.len() && dst[i].0 < src[j].0) {
            out.push(dst[i]);
            i += 1;
        } else if i == dst.len() || src[j].0 < dst[i].0 {
            out.push((src[j].0, f.mul(nf, src[j].1)));
            j += 1;
        } else {
            let v = f.add(dst[i].1, f.mul(nf, src[j].1));
            if !v.is_zero() {
                out.push((dst[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
}

fn coef_of(row: &[(u32, FqElem)], c: u32) -> Option<FqElem> {
    row.binary_search_by_key(&c, |e| e.0).ok().map(|k| row[k].1)
}

/// Dense row-operation kernel using lookup tables.
struct DenseOps {
    q: usize,
    add: Option<Vec<u16>>,
}

impl DenseOps {
    fn new(f: &FqField) -> Self {
        DenseOps { q: f.order() as usize, add: f.add_table().map(|t| t.to_vec()) }
    }

    /// `dst -= factor * src` over the slice range.
    #[inline]
    fn axpy(&self, f: &FqField, dst: &mut [FqElem], factor: FqElem, src: &[FqElem]) {
        let nm = f.mul_map(f.neg(factor));
        match &self.add {
            Some(t) => {
                let q = self.q;
                for (d, s) in dst.iter_mut().zip(src) {
                    let v = nm[s.index()] as usize;
                    d.0 = t[d.index() * q + v];
                }
            }
            None => {
                for (d, s) in dst.iter_mut().zip(src) {
                    *d = f.add(*d, FqElem(nm[s.index()]));
                }
            }
        }
    }
}

/// Compute the quotient of `F_q^ncols` by the span of `rows`.
pub fn eliminate(field: &FqField, ncols: usize, rows: Vec<SparseRow>, opts: &EliminationOptions) -> Reduction {
    let f = field;
    let mut stats = EliminationStats { rows_in: rows.len(), ..Default::default() };

    // Phase 0: short rows into the union-find.
    let mut uf = UnionFind::new(ncols);
    let mut pending = rows;
    loop {
        let mut changed = false;
        let mut long = Vec::with_capacity(pending.len());
        for row in pending {
            let s = uf.substitute(f, &row);
            if s.len() <= 2 {
                changed |= uf.absorb(f, &s);
            } else {
                long.push(s);
            }
        }
        pending = long;
        if !changed {
            break;
        }
    }

    // Reduced column ids for live roots.
    let mut rid = vec![u32::MAX; ncols];
    let mut nreduced = 0u32;
    let mut image = Vec::with_capacity(ncols);
    for c in 0..ncols as u32 {
        let (r, m) = uf.find(f, c);
        if uf.zero[r as usize] {
            image.push(ColumnImage::Zero);
            continue;
        }
        if rid[r as usize] == u32::MAX {
            rid[r as usize] = nreduced;
            nreduced += 1;
        }
        image.push(ColumnImage::Reduced(rid[r as usize], m));
    }
    let nred = nreduced as usize;
    stats.reduced_cols = nred;
    let mut rows: Vec<SparseRow> = pending
        .into_iter()
        .map(|r| {
            let mut s = uf.substitute(f, &r);
            for e in s.iter_mut() {
                e.0 = rid[e.0 as usize];
            }
            normalize_row(f, &mut s);
            s
        })
        .filter(|r| !r.is_empty())
        .collect();

    // Phase 1: Markowitz elimination.
    let nrows = rows.len();
    let mut alive = vec![true; nrows];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); nred];
    let mut col_done = vec![false; nred];
    let mut nnz = 0usize;
    let mut buckets: Vec<Vec<u32>> = Vec::new();
    let push_bucket = |buckets: &mut Vec<Vec<u32>>, r: u32, len: usize| {
        if buckets.len() <= len {
            buckets.resize(len + 1, Vec::new());
        }
        buckets[len].push(r);
    };
    for (k, r) in rows.iter().enumerate() {
        nnz += r.len();
        for &(c, _) in r {
            col_rows[c as usize].push(k as u32);
        }
        push_bucket(&mut buckets, k as u32, r.len());
    }
    let mut alive_rows = nrows;
    let mut active_cols = {
        let mut seen = vec![false; nred];
        for r in &rows {
            for &(c, _) in r {
                seen[c as usize] = true;
            }
        }
        seen.iter().filter(|&&s| s).count()
    };
    let mut sparse_pivots: Vec<(u32, SparseRow)> = Vec::new();
    let mut scratch: SparseRow = Vec::new();
    let mut min_len = 0usize;
    let mut since_check = 0usize;
    'outer: loop {
        // pop the shortest live row
        let r = loop {
            while min_len < buckets.len() && buckets[min_len].is_empty() {
                min_len += 1;
            }
            if min_len >= buckets.len() {
                break 'outer;
            }
            let r = buckets[min_len].pop().unwrap();
            if alive[r as usize] && rows[r as usize].len() == min_len {
                break r;
            }
        };
        let ru = r as usize;
        if rows[ru].is_empty() {
            alive[ru] = false;
            alive_rows -= 1;
            continue;
        }
        since_check += 1;
        if since_check >= 64 {
            since_check = 0;
            let density = nnz as f64 / (alive_rows as f64 * active_cols.max(1) as f64);
            if density > opts.dense_threshold && alive_rows * active_cols > 4096 {
                push_bucket(&mut buckets, r, rows[ru].len());
                break;
            }
        }
        // least-populated column in the row (stale entries make this an estimate)
        let c = rows[ru].iter().map(|&(c, _)| c).min_by_key(|&c| (col_rows[c as usize].len(), c)).unwrap();
        let pivot_row = std::mem::take(&mut rows[ru]);
        alive[ru] = false;
        alive_rows -= 1;
        nnz -= pivot_row.len();
        let pc = coef_of(&pivot_row, c).unwrap();
        let pinv = f.inv(pc).unwrap();
        let others = std::mem::take(&mut col_rows[c as usize]);
        for s in others {
            let su = s as usize;
            if !alive[su] {
                continue;
            }
            let Some(sc) = coef_of(&rows[su], c) else {
                continue;
            };
            let factor = f.mul(sc, pinv);
            axpy(f, &rows[su], factor, &pivot_row, &mut scratch);
            nnz = nnz + scratch.len() - rows[su].len();
            // register s under columns it gained
            for &(k, _) in &pivot_row {
                if k != c && coef_of(&rows[su], k).is_none() && coef_of(&scratch, k).is_some() {
                    col_rows[k as usize].push(s);
                }
            }
            std::mem::swap(&mut rows[su], &mut scratch);
            let len = rows[su].len();
            push_bucket(&mut buckets, s, len);
            if len < min_len {
                min_len = len;
            }
        }
        col_done[c as usize] = true;
        active_cols -= 1;
        sparse_pivots.push((c, pivot_row));
    }
    stats.sparse_pivots = sparse_pivots.len();

    // Phase 2: dense reduction of whatever is left.
    let live: Vec<usize> = (0..nrows).filter(|&k| alive[k] && !rows[k].is_empty()).collect();
    let mut dense_cols: Vec<u32> = live.iter().flat_map(|&k| rows[k].iter().map(|e| e.0)).collect();
    dense_cols.sort_unstable();
    dense_cols.dedup();
    let n = dense_cols.len();
    let mut local = vec![u32::MAX; nred];
    for (k, &c) in dense_cols.iter().enumerate() {
        local[c as usize] = k as u32;
    }
    let ops = DenseOps::new(f);
    let mut dense: Vec<Vec<FqElem>> = Vec::new();
    if !live.is_empty() {
        let m = live.len();
        let compress = opts.compress && m > n + n / 4 + 64;
        if compress {
            let k = n + 32;
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            for _ in 0..k {
                let mut v = vec![FqElem::ZERO; n];
                for &row in &live {
                    let coef = FqElem(rng.gen_range(0..f.order()) as u16);
                    if coef.is_zero() {
                        continue;
                    }
                    for &(c, a) in &rows[row] {
                        let j = local[c as usize] as usize;
                        v[j] = f.add(v[j], f.mul(coef, a));
                    }
                }
                dense.push(v);
            }
        } else {
            for &row in &live {
                let mut v = vec![FqElem::ZERO; n];
                for &(c, a) in &rows[row] {
                    v[local[c as usize] as usize] = a;
                }
                dense.push(v);
            }
        }
    }
    stats.dense_rows = dense.len();
    stats.dense_cols = n;
    if n > 0 {
        log::debug!("dense phase: {} x {}", dense.len(), n);
    }
    // RREF in place
    let mut dense_pivots: Vec<usize> = Vec::new();
    let mut top = 0usize;
    for col in 0..n {
        let Some(p) = (top..dense.len()).find(|&i| !dense[i][col].is_zero()) else {
            continue;
        };
        dense.swap(top, p);
        let inv = f.inv(dense[top][col]).unwrap();
        for x in dense[top][col..].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let (head, tail) = dense.split_at_mut(top);
        let (prow, tail) = tail.split_first_mut().unwrap();
        let prow = &*prow;
        for row in tail.iter_mut() {
            let factor = row[col];
            if !factor.is_zero() {
                ops.axpy(f, &mut row[col..], factor, &prow[col..]);
            }
        }
        for row in head.iter_mut() {
            let factor = row[col];
            if !factor.is_zero() {
                ops.axpy(f, &mut row[col..], factor, &prow[col..]);
            }
        }
        dense_pivots.push(col);
        top += 1;
        // drop rows that became zero to keep the working set small
        if top < dense.len() && dense.len() > 2 * n {
            let keep: Vec<Vec<FqElem>> =
                dense.drain(top..).filter(|r| r[col + 1..].iter().any(|x| !x.is_zero())).collect();
            dense.extend(keep);
        }
    }
    dense.truncate(top);
    stats.dense_rank = top;

    // Phase 3: express reduced columns over the free ones.
    let mut is_pivot = col_done.clone();
    for &pc in &dense_pivots {
        is_pivot[dense_cols[pc] as usize] = true;
    }
    let free: Vec<u32> = (0..nred as u32).filter(|&c| !is_pivot[c as usize]).collect();
    let dim = free.len();
    let mut hidx = vec![u32::MAX; nred];
    for (k, &c) in free.iter().enumerate() {
        hidx[c as usize] = k as u32;
    }
    let mut expr = vec![FqElem::ZERO; nred * dim];
    for (k, &c) in free.iter().enumerate() {
        expr[c as usize * dim + k] = FqElem::ONE;
    }
    for (ri, &pc) in dense_pivots.iter().enumerate() {
        let c = dense_cols[pc] as usize;
        for (j, &v) in dense[ri].iter().enumerate() {
            if j == pc || v.is_zero() {
                continue;
            }
            let h = hidx[dense_cols[j] as usize];
            debug_assert!(h != u32::MAX, "RREF leaves only free columns");
            expr[c * dim + h as usize] = f.neg(v);
        }
    }
    let mut acc = vec![FqElem::ZERO; dim];
    for (c, row) in sparse_pivots.iter().rev() {
        let pinv = f.inv(coef_of(row, *c).unwrap()).unwrap();
        acc.iter_mut().for_each(|x| *x = FqElem::ZERO);
        for &(k, a) in row {
            if k == *c {
                continue;
            }
            let factor = f.neg(f.mul(a, pinv));
            let src = &expr[k as usize * dim..(k as usize + 1) * dim];
            ops.axpy(f, &mut acc, f.neg(factor), src);
        }
        expr[*c as usize * dim..(*c as usize + 1) * dim].copy_from_slice(&acc);
    }

    Reduction { field: f.clone(), ncols, image, nreduced: nred, free, expr, stats }
}

/// Accumulates a sparse combination of original columns and projects it.
pub struct Projector<'a> {
    red: &'a Reduction,
    acc: Vec<FqElem>,
    touched: Vec<u32>,
    ops: DenseOps,
}

impl<'a> Projector<'a> {
    pub fn new(red: &'a Reduction) -> Self {
        Projector { red, acc: vec![FqElem::ZERO; red.nreduced], touched: Vec::new(), ops: DenseOps::new(&red.field) }
    }

    #[inline]
    pub fn add(&mut self, col: usize, coef: FqElem) {
        if let ColumnImage::Reduced(r, m) = self.red.image[col] {
            let f = &self.red.field;
            let slot = &mut self.acc[r as usize];
            if slot.is_zero() {
                self.touched.push(r);
            }
            *slot = f.add(*slot, f.mul(coef, m));
        }
    }

    /// Quotient coordinates of the accumulated vector; resets the accumulator.
    pub fn finish(&mut self) -> Vec<FqElem> {
        let f = &self.red.field;
        let mut out = vec![FqElem::ZERO; self.red.dim()];
        for &r in &self.touched {
            let a = std::mem::take(&mut self.acc[r as usize]);
            if !a.is_zero() {
                self.ops.axpy(f, &mut out, f.neg(a), self.red.expr_row(r as usize));
            }
        }
        self.touched.clear();
        out
    }
}
