//! Exact linear algebra over the rationals.
//!
//! Matrices are stored as sorted sparse rows of [`BigRational`]. Rank and
//! independence queries go through [`Echelon`], an incremental fraction-free
//! eliminator that keeps every pivot row as a primitive integer vector. It
//! runs on `i64` entries with `i128` intermediates and switches the whole
//! echelon to `BigInt` the first time a value does not fit, so the answer is
//! always exact. Kernels and solutions use a sparse rational RREF.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Sparse vector: strictly increasing indices, no stored zeros.
pub type SparseVec = Vec<(usize, Q)>;

#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(12) {
            let row: Vec<String> = (0..self.cols.min(12)).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].push((i, Q::one()));
        }
        m
    }

    pub fn from_dense(rows: usize, cols: usize, entries: &[Q]) -> Self {
        assert_eq!(entries.len(), rows * cols, "dense entry count");
        let data = (0..rows)
            .map(|r| {
                (0..cols)
                    .filter_map(|c| {
                        let v = &entries[r * cols + c];
                        (!v.is_zero()).then(|| (c, v.clone()))
                    })
                    .collect()
            })
            .collect();
        RatMatrix { rows, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let flat: Vec<Q> = rows.iter().flat_map(|r| r.iter().map(|&v| q(v))).collect();
        Self::from_dense(nrows, ncols, &flat)
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, Q)>) -> Self {
        let mut per_row: Vec<Vec<(usize, Q)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) outside {rows}x{cols}");
            per_row[r].push((c, v));
        }
        let data = per_row.into_iter().map(normalize_sparse).collect();
        RatMatrix { rows, cols, data }
    }

    /// Builds a matrix from sparse columns.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let triplets = columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v.clone())));
        Self::from_triplets(rows, columns.len(), triplets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Q)] {
        &self.data[r]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) outside {}x{}", self.rows, self.cols);
        match self.data[r].binary_search_by_key(&c, |(k, _)| *k) {
            Ok(i) => self.data[r][i].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) outside {}x{}", self.rows, self.cols);
        let row = &mut self.data[r];
        match row.binary_search_by_key(&c, |(k, _)| *k) {
            Ok(i) if v.is_zero() => {
                row.remove(i);
            }
            Ok(i) => row[i].1 = v,
            Err(_) if v.is_zero() => {}
            Err(i) => row.insert(i, (c, v)),
        }
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut data: Vec<SparseVec> = vec![Vec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                data[*c].push((r, v.clone()));
            }
        }
        RatMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn column(&self, c: usize) -> SparseVec {
        self.data
            .iter()
            .enumerate()
            .filter_map(|(r, row)| row.binary_search_by_key(&c, |(k, _)| *k).ok().map(|i| (r, row[i].1.clone())))
            .collect()
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        self.transpose().data
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: HashMap<usize, Q> = HashMap::new();
                for (k, a) in row {
                    for (c, b) in &other.data[*k] {
                        *acc.entry(*c).or_insert_with(Q::zero) += a * b;
                    }
                }
                normalize_sparse(acc.into_iter().collect())
            })
            .collect();
        RatMatrix { rows: self.rows, cols: other.cols, data }
    }

    pub fn mul_vec(&self, x: &[Q]) -> Vec<Q> {
        assert_eq!(x.len(), self.cols, "matrix-vector shape mismatch");
        self.data
            .iter()
            .map(|row| row.iter().fold(Q::zero(), |acc, (c, v)| acc + v * &x[*c]))
            .collect()
    }

    pub fn mul_sparse(&self, x: &[(usize, Q)]) -> SparseVec {
        let dense: HashMap<usize, &Q> = x.iter().map(|(i, v)| (*i, v)).collect();
        self.data
            .iter()
            .enumerate()
            .filter_map(|(r, row)| {
                let s = row
                    .iter()
                    .filter_map(|(c, v)| dense.get(c).map(|x| v * *x))
                    .fold(Q::zero(), |a, b| a + b);
                (!s.is_zero()).then_some((r, s))
            })
            .collect()
    }

    pub fn scale(&self, s: &Q) -> RatMatrix {
        if s.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        let data = self.data.iter().map(|row| row.iter().map(|(c, v)| (*c, v * s)).collect()).collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| normalize_sparse(a.iter().chain(b.iter()).cloned().collect()))
            .collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Places `blocks[i][j]` at block row i, block column j. `None` blocks are
    /// zero; row heights and column widths are given explicitly.
    pub fn block(row_sizes: &[usize], col_sizes: &[usize], blocks: &[Vec<Option<&RatMatrix>>]) -> RatMatrix {
        let row_off = offsets(row_sizes);
        let col_off = offsets(col_sizes);
        let mut trip = Vec::new();
        for (bi, brow) in blocks.iter().enumerate() {
            for (bj, blk) in brow.iter().enumerate() {
                if let Some(m) = blk {
                    assert_eq!((m.rows, m.cols), (row_sizes[bi], col_sizes[bj]), "block ({bi},{bj}) shape");
                    for (r, row) in m.data.iter().enumerate() {
                        for (c, v) in row {
                            trip.push((row_off[bi] + r, col_off[bj] + c, v.clone()));
                        }
                    }
                }
            }
        }
        RatMatrix::from_triplets(row_sizes.iter().sum(), col_sizes.iter().sum(), trip)
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }

    pub fn kernel_basis(&self) -> RatMatrix {
        kernel_basis(self)
    }
}

pub(crate) fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut off = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    for s in sizes {
        off.push(acc);
        acc += s;
    }
    off.push(acc);
    off
}

/// Sorts by index, merges duplicates and drops zeros.
pub fn normalize_sparse(mut v: Vec<(usize, Q)>) -> SparseVec {
    v.sort_by_key(|(i, _)| *i);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some((j, y)) if *j == i => *y += x,
            _ => out.push((i, x)),
        }
    }
    out.retain(|(_, x)| !x.is_zero());
    out
}

// ---------------------------------------------------------------------------
// Fraction-free incremental echelon.

#[derive(Debug)]
struct Overflow;

type SmallRow = Vec<(usize, i64)>;
type BigRow = Vec<(usize, BigInt)>;

enum Store {
    Small(Vec<SmallRow>),
    Big(Vec<BigRow>),
}

/// Incremental row echelon form over the rationals.
///
/// Vectors are inserted one at a time; [`Echelon::insert`] reports whether the
/// vector was independent of everything inserted before. Only the leading
/// entry is eliminated, which is all rank and independence need.
pub struct Echelon {
    dim: usize,
    pivot_of_col: HashMap<usize, usize>,
    store: Store,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, pivot_of_col: HashMap::new(), store: Store::Small(Vec::new()) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.pivot_of_col.len()
    }

    /// Inserts a rational sparse vector; returns `true` if it raised the rank.
    pub fn insert(&mut self, v: &[(usize, Q)]) -> bool {
        debug_assert!(v.iter().all(|(i, _)| *i < self.dim));
        let big = primitive_from_rational(v);
        self.insert_big_row(big)
    }

    /// Inserts an integer vector (entries `(index, value)`, any order).
    pub fn insert_i64(&mut self, v: &[(usize, i64)]) -> bool {
        let mut row: SmallRow = v.iter().copied().filter(|(_, x)| *x != 0).collect();
        row.sort_by_key(|(i, _)| *i);
        match &self.store {
            Store::Small(_) => {
                if let Some(r) = make_primitive_small(row.clone()) {
                    match self.try_insert_small(r) {
                        Ok(b) => return b,
                        Err(Overflow) => self.upgrade(),
                    }
                } else {
                    self.upgrade();
                }
                self.insert_big_row(row.into_iter().map(|(i, x)| (i, BigInt::from(x))).collect())
            }
            Store::Big(_) => self.insert_big_row(row.into_iter().map(|(i, x)| (i, BigInt::from(x))).collect()),
        }
    }

    /// Whether `v` lies in the span of the inserted vectors (no mutation).
    pub fn contains(&self, v: &[(usize, Q)]) -> bool {
        let row = primitive_from_rational(v);
        let mut r = row;
        loop {
            let Some(&(lead, _)) = r.first() else { return true };
            let Some(&pi) = self.pivot_of_col.get(&lead) else { return false };
            let p: BigRow = match &self.store {
                Store::Small(rows) => rows[pi].iter().map(|(i, x)| (*i, BigInt::from(*x))).collect(),
                Store::Big(rows) => rows[pi].clone(),
            };
            r = combine_big(&p, &r);
        }
    }

    fn insert_big_row(&mut self, row: BigRow) -> bool {
        if let Store::Small(_) = self.store {
            if let Some(small) = big_to_small(&row) {
                match self.try_insert_small(small) {
                    Ok(b) => return b,
                    Err(Overflow) => self.upgrade(),
                }
            } else {
                self.upgrade();
            }
        }
        let Store::Big(rows) = &mut self.store else { unreachable!() };
        let mut r = make_primitive_big(row);
        loop {
            let Some(&(lead, _)) = r.first() else { return false };
            match self.pivot_of_col.get(&lead) {
                Some(&pi) => r = combine_big(&rows[pi], &r),
                None => {
                    self.pivot_of_col.insert(lead, rows.len());
                    rows.push(r);
                    return true;
                }
            }
        }
    }

    fn try_insert_small(&mut self, row: SmallRow) -> Result<bool, Overflow> {
        let Store::Small(rows) = &mut self.store else { unreachable!() };
        let mut r = row;
        loop {
            let Some(&(lead, _)) = r.first() else { return Ok(false) };
            match self.pivot_of_col.get(&lead) {
                Some(&pi) => r = combine_small(&rows[pi], &r)?,
                None => {
                    self.pivot_of_col.insert(lead, rows.len());
                    rows.push(r);
                    return Ok(true);
                }
            }
        }
    }

    fn upgrade(&mut self) {
        if let Store::Small(rows) = &self.store {
            let big = rows.iter().map(|r| r.iter().map(|(i, x)| (*i, BigInt::from(*x))).collect()).collect();
            self.store = Store::Big(big);
        }
    }
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    a.unsigned_abs().gcd(&b.unsigned_abs()) as i64
}

fn make_primitive_small(mut r: SmallRow) -> Option<SmallRow> {
    if r.is_empty() {
        return Some(r);
    }
    let mut g: u64 = 0;
    for (_, x) in &r {
        g = g.gcd(&x.unsigned_abs());
        if g == 1 {
            break;
        }
    }
    let g = i64::try_from(g).ok()?;
    let sign = if r[0].1 < 0 { -1 } else { 1 };
    for (_, x) in r.iter_mut() {
        *x = (*x / g).checked_mul(sign)?;
    }
    Some(r)
}

/// Eliminates the leading entry of `r` using pivot row `p` (same lead column).
fn combine_small(p: &SmallRow, r: &SmallRow) -> Result<SmallRow, Overflow> {
    let pl = p[0].1;
    let rl = r[0].1;
    let g = gcd_i64(pl, rl);
    let a = (pl / g) as i128; // multiplies r
    let b = (rl / g) as i128; // multiplies p
    let mut out: Vec<(usize, i128)> = Vec::with_capacity(p.len() + r.len());
    let (mut i, mut j) = (1, 1);
    while i < p.len() || j < r.len() {
        let pc = p.get(i).map_or(usize::MAX, |e| e.0);
        let rc = r.get(j).map_or(usize::MAX, |e| e.0);
        if pc == rc {
            let v = a * r[j].1 as i128 - b * p[i].1 as i128;
            if v != 0 {
                out.push((pc, v));
            }
            i += 1;
            j += 1;
        } else if rc < pc {
            out.push((rc, a * r[j].1 as i128));
            j += 1;
        } else {
            out.push((pc, -b * p[i].1 as i128));
            i += 1;
        }
    }
    if out.is_empty() {
        return Ok(Vec::new());
    }
    let mut g: u128 = 0;
    for (_, x) in &out {
        g = g.gcd(&x.unsigned_abs());
        if g == 1 {
            break;
        }
    }
    let g = g as i128;
    let sign: i128 = if out[0].1 < 0 { -1 } else { 1 };
    out.into_iter()
        .map(|(c, x)| i64::try_from(x / g * sign).map(|v| (c, v)).map_err(|_| Overflow))
        .collect()
}

fn make_primitive_big(mut r: BigRow) -> BigRow {
    if r.is_empty() {
        return r;
    }
    let mut g = BigInt::zero();
    for (_, x) in &r {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    let neg = r[0].1.is_negative();
    for (_, x) in r.iter_mut() {
        *x = &*x / &g;
        if neg {
            *x = -&*x;
        }
    }
    r
}

fn combine_big(p: &BigRow, r: &BigRow) -> BigRow {
    let pl = &p[0].1;
    let rl = &r[0].1;
    let g = pl.gcd(rl);
    let a = pl / &g;
    let b = rl / &g;
    let mut out: BigRow = Vec::with_capacity(p.len() + r.len());
    let (mut i, mut j) = (1, 1);
    while i < p.len() || j < r.len() {
        let pc = p.get(i).map_or(usize::MAX, |e| e.0);
        let rc = r.get(j).map_or(usize::MAX, |e| e.0);
        if pc == rc {
            let v = &a * &r[j].1 - &b * &p[i].1;
            if !v.is_zero() {
                out.push((pc, v));
            }
            i += 1;
            j += 1;
        } else if rc < pc {
            out.push((rc, &a * &r[j].1));
            j += 1;
        } else {
            out.push((pc, -(&b * &p[i].1)));
            i += 1;
        }
    }
    make_primitive_big(out)
}

fn big_to_small(r: &BigRow) -> Option<SmallRow> {
    r.iter().map(|(i, x)| x.to_i64().map(|v| (*i, v))).collect()
}

/// Clears denominators of a sorted rational sparse vector and makes it primitive.
fn primitive_from_rational(v: &[(usize, Q)]) -> BigRow {
    let mut lcm = BigInt::one();
    for (_, x) in v {
        if !x.is_zero() {
            lcm = lcm.lcm(x.denom());
        }
    }
    let mut row: BigRow = v
        .iter()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (*i, x.numer() * (&lcm / x.denom())))
        .collect();
    row.sort_by_key(|(i, _)| *i);
    make_primitive_big(row)
}

// ---------------------------------------------------------------------------
// Public operations.

/// Rank over Q.
pub fn rank(m: &RatMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    // Insert along the shorter side; sparse rows first keeps fill-in down.
    let vectors: Vec<SparseVec> = if m.rows <= m.cols { m.data.clone() } else { m.transpose().data };
    let dim = m.rows.max(m.cols);
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by_key(|&i| (vectors[i].first().map_or(usize::MAX, |e| e.0), vectors[i].len()));
    let mut ech = Echelon::new(dim);
    for i in order {
        if !vectors[i].is_empty() {
            ech.insert(&vectors[i]);
        }
    }
    ech.rank()
}

/// Reduced row echelon form: returns the nonzero reduced rows (leading entry 1)
/// together with their pivot columns, in increasing pivot order.
pub fn rref(m: &RatMatrix) -> (Vec<SparseVec>, Vec<usize>) {
    let mut pivots: HashMap<usize, SparseVec> = HashMap::new();
    let mut order: Vec<usize> = (0..m.rows).collect();
    order.sort_by_key(|&i| m.data[i].len());
    for i in order {
        let mut r = m.data[i].clone();
        while let Some((lead, lv)) = r.first().cloned() {
            match pivots.get(&lead) {
                Some(p) => r = axpy_sparse(&r, p, &(-lv)),
                None => {
                    let inv = lv.recip();
                    let r: SparseVec = r.iter().map(|(c, v)| (*c, v * &inv)).collect();
                    pivots.insert(lead, r);
                    break;
                }
            }
        }
    }
    let mut cols: Vec<usize> = pivots.keys().copied().collect();
    cols.sort_unstable();
    // Back substitution from the last pivot up.
    let mut done: HashMap<usize, SparseVec> = HashMap::new();
    for &c in cols.iter().rev() {
        let mut r = pivots.remove(&c).expect("pivot row");
        let mut k = 1;
        while k < r.len() {
            let (col, v) = r[k].clone();
            if let Some(p) = done.get(&col) {
                r = axpy_sparse(&r, p, &(-v));
                // `col` was eliminated; entries before k are unchanged.
            } else {
                k += 1;
            }
        }
        done.insert(c, r);
    }
    let rows = cols.iter().map(|c| done.remove(c).expect("reduced row")).collect();
    (rows, cols)
}

/// `a + s*b` for sorted sparse vectors.
pub fn axpy_sparse(a: &[(usize, Q)], b: &[(usize, Q)], s: &Q) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ac = a.get(i).map_or(usize::MAX, |e| e.0);
        let bc = b.get(j).map_or(usize::MAX, |e| e.0);
        if ac == bc {
            let v = &a[i].1 + s * &b[j].1;
            if !v.is_zero() {
                out.push((ac, v));
            }
            i += 1;
            j += 1;
        } else if ac < bc {
            out.push(a[i].clone());
            i += 1;
        } else {
            out.push((bc, s * &b[j].1));
            j += 1;
        }
    }
    out
}

/// Basis of the right kernel, one column per free variable (ascending).
pub fn kernel_basis(m: &RatMatrix) -> RatMatrix {
    let (rows, pivots) = rref(m);
    let is_pivot: HashMap<usize, usize> = pivots.iter().enumerate().map(|(k, c)| (*c, k)).collect();
    let free: Vec<usize> = (0..m.cols).filter(|c| !is_pivot.contains_key(c)).collect();
    let free_pos: HashMap<usize, usize> = free.iter().enumerate().map(|(k, c)| (*c, k)).collect();
    let mut trip = Vec::new();
    for (k, &f) in free.iter().enumerate() {
        trip.push((f, k, Q::one()));
    }
    for (row, &p) in rows.iter().zip(&pivots) {
        for (c, v) in row.iter().skip(1) {
            if let Some(&k) = free_pos.get(c) {
                trip.push((p, k, -v.clone()));
            }
        }
    }
    RatMatrix::from_triplets(m.cols, free.len(), trip)
}

/// Some `x` with `m x = b`, or `None` if the system is inconsistent.
pub fn solve(m: &RatMatrix, b: &[Q]) -> Option<Vec<Q>> {
    assert_eq!(b.len(), m.rows, "right-hand side length must equal row count");
    let mut aug = m.clone();
    aug.cols += 1;
    for (r, row) in aug.data.iter_mut().enumerate() {
        if !b[r].is_zero() {
            row.push((m.cols, b[r].clone()));
        }
    }
    let (rows, pivots) = rref(&aug);
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut x = vec![Q::zero(); m.cols];
    for (row, &p) in rows.iter().zip(&pivots) {
        if let Some((c, v)) = row.last() {
            if *c == m.cols {
                x[p] = v.clone();
            }
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        assert_eq!(RatMatrix::identity(2).rank(), 2);
        assert_eq!(RatMatrix::zeros(2, 2).rank(), 0);
        assert_eq!(RatMatrix::from_i64(&[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(RatMatrix::identity(3).kernel_basis().cols(), 0);
        let k = RatMatrix::zeros(3, 3).kernel_basis();
        assert_eq!(k.cols(), 3);
        assert_eq!(k.rank(), 3);
        let k = RatMatrix::from_i64(&[&[1, 1]]).kernel_basis();
        assert_eq!(k.cols(), 1);
        assert_eq!(k.get(0, 0), -k.get(1, 0));
        assert!(!k.get(0, 0).is_zero());
    }

    #[test]
    fn solve_examples() {
        let b = vec![q(3), q(-7)];
        assert_eq!(solve(&RatMatrix::identity(2), &b), Some(b.clone()));
        assert_eq!(solve(&RatMatrix::zeros(2, 2), &b), None);
        let m = RatMatrix::from_i64(&[&[2]]);
        assert_eq!(solve(&m, &[q(3)]), Some(vec![q_frac(3, 2)]));
    }

    #[test]
    fn echelon_falls_back_to_bigint() {
        // Entries near i64::MAX force the BigInt path on the first combination.
        let big = i64::MAX / 3;
        let mut e = Echelon::new(3);
        assert!(e.insert_i64(&[(0, big), (1, big - 1), (2, 5)]));
        assert!(e.insert_i64(&[(0, big - 7), (1, 3), (2, big)]));
        assert!(e.insert_i64(&[(0, 1), (1, 1), (2, 1)]));
        assert!(!e.insert_i64(&[(0, 2), (1, 5), (2, 11)]));
        assert_eq!(e.rank(), 3);
    }

    #[test]
    fn echelon_contains() {
        let mut e = Echelon::new(3);
        e.insert(&[(0, q(1)), (1, q(2))]);
        e.insert(&[(1, q(1)), (2, q(1))]);
        assert!(e.contains(&[(0, q(1)), (1, q(3)), (2, q(1))]));
        assert!(!e.contains(&[(2, q(1))]));
    }

    fn small_matrix() -> impl Strategy<Value = RatMatrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
                let entries: Vec<Q> = v.iter().map(|&x| if x.abs() == 3 { q_frac(x, 2) } else { q(x) }).collect();
                RatMatrix::from_dense(r, c, &entries)
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix()) {
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.cols(), m.cols());
            prop_assert!(m.mul(&k).is_zero());
            prop_assert_eq!(k.rank(), k.cols());
        }

        #[test]
        fn rank_of_transpose(m in small_matrix()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
            let (rows, _) = rref(&m);
            prop_assert_eq!(rows.len(), m.rank());
        }

        #[test]
        fn solve_is_exact(m in small_matrix(), seed in proptest::collection::vec(-4i64..=4, 6)) {
            let x0: Vec<Q> = (0..m.cols()).map(|i| q(seed[i % seed.len()])).collect();
            let b = m.mul_vec(&x0);
            let x = solve(&m, &b).expect("consistent by construction");
            prop_assert_eq!(m.mul_vec(&x), b);
        }
    }
}
