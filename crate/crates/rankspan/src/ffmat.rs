//! Exact arithmetic in prime fields F_q (q ∈ {2, 3, 5, 7}) and dense matrices
//! over them: rank, determinant, reduced row echelon form and in-field spectrum.
//!
//! Matrices are stored row-major with every entry reduced mod q. Row-major
//! order is also the vectorization convention used by the subspace layer, so
//! `FqMat::as_vector` is the canonical embedding Mat_{n,p} ≅ F_q^{n·p}.

use std::fmt;

use crate::error::{Error, Result};

pub const SUPPORTED_MODULI: [u8; 4] = [2, 3, 5, 7];

// products and inverses for every supported modulus, indexed [q][a·8 + b];
// keeps the elimination inner loops free of hardware division
const fn build_mul_table() -> [[u8; 64]; 8] {
    let mut t = [[0u8; 64]; 8];
    let mut q = 2usize;
    while q < 8 {
        let mut a = 0usize;
        while a < q {
            let mut b = 0usize;
            while b < q {
                t[q][(a << 3) | b] = ((a * b) % q) as u8;
                b += 1;
            }
            a += 1;
        }
        q += 1;
    }
    t
}

const fn build_inv_table() -> [[u8; 8]; 8] {
    let mul = build_mul_table();
    let mut t = [[0u8; 8]; 8];
    let mut q = 2usize;
    while q < 8 {
        let mut a = 1usize;
        while a < q {
            let mut b = 1usize;
            while b < q {
                if mul[q][(a << 3) | b] == 1 {
                    t[q][a] = b as u8;
                }
                b += 1;
            }
            a += 1;
        }
        q += 1;
    }
    t
}

static MUL_TABLE: [[u8; 64]; 8] = build_mul_table();
static INV_TABLE: [[u8; 8]; 8] = build_inv_table();

/// A small prime field F_q, carried by value next to the data it qualifies.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Fq {
    q: u8,
}

impl Fq {
    pub fn new(q: u8) -> Result<Self> {
        if SUPPORTED_MODULI.contains(&q) {
            Ok(Fq { q })
        } else {
            Err(Error::UnsupportedModulus(q))
        }
    }

    pub fn modulus(self) -> u8 {
        self.q
    }

    pub fn elements(self) -> impl Iterator<Item = u8> {
        0..self.q
    }

    pub fn nonzero_elements(self) -> impl Iterator<Item = u8> {
        1..self.q
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        debug_assert!(a < self.q && b < self.q);
        MUL_TABLE[(self.q & 7) as usize][((a as usize & 7) << 3) | (b as usize & 7)]
    }

    /// Multiplicative inverse of a nonzero element.
    ///
    /// Panics on zero; callers only invert pivots.
    #[inline]
    pub fn inv(self, a: u8) -> u8 {
        assert!(a != 0 && a < self.q, "inverse of {a} in F_{}", self.q);
        INV_TABLE[(self.q & 7) as usize][(a & 7) as usize]
    }

    /// Reduce an arbitrary unsigned value into [0, q).
    #[inline]
    pub fn reduce(self, v: u64) -> u8 {
        (v % self.q as u64) as u8
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

/// Dense exact matrix over F_q, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FqMat {
    field: Fq,
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl FqMat {
    pub fn zero(field: Fq, rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        FqMat {
            field,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Fq, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    /// Elementary matrix E_{i,j} with a single 1 at the (i, j) spot, 1-based.
    pub fn elementary(field: Fq, rows: usize, cols: usize, i: usize, j: usize) -> Result<Self> {
        if i == 0 || i > rows || j == 0 || j > cols {
            return Err(Error::EntryIndexOutOfRange { i, j, rows, cols });
        }
        let mut m = Self::zero(field, rows, cols);
        m.entries[(i - 1) * cols + (j - 1)] = 1;
        Ok(m)
    }

    /// The matrix J_k: identity block of size k in the upper-left corner, zero elsewhere.
    pub fn j_k(field: Fq, rows: usize, cols: usize, k: usize) -> Result<Self> {
        if k > rows.min(cols) {
            return Err(Error::InvalidParameter(format!(
                "J_{k} does not fit in a {rows}x{cols} matrix"
            )));
        }
        let mut m = Self::zero(field, rows, cols);
        for i in 0..k {
            m.entries[i * cols + i] = 1;
        }
        Ok(m)
    }

    /// Build from explicit row data; entries are reduced mod q.
    pub fn from_rows(field: Fq, data: &[Vec<u8>]) -> Result<Self> {
        if data.is_empty() || data[0].is_empty() {
            return Err(Error::InvalidParameter(
                "matrix needs at least one row and one column".into(),
            ));
        }
        let rows = data.len();
        let cols = data[0].len();
        let mut entries = Vec::with_capacity(rows * cols);
        for row in data {
            if row.len() != cols {
                return Err(Error::ShapeMismatch {
                    expected_rows: rows,
                    expected_cols: cols,
                    rows,
                    cols: row.len(),
                });
            }
            entries.extend(row.iter().map(|&v| field.reduce(v as u64)));
        }
        Ok(FqMat {
            field,
            rows,
            cols,
            entries,
        })
    }

    /// Build from a row-major vectorization of length rows·cols.
    pub fn from_vector(field: Fq, rows: usize, cols: usize, v: &[u8]) -> Result<Self> {
        if v.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: 1,
                cols: v.len(),
            });
        }
        Ok(FqMat {
            field,
            rows,
            cols,
            entries: v.iter().map(|&x| field.reduce(x as u64)).collect(),
        })
    }

    pub fn field(&self) -> Fq {
        self.field
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
    pub fn get(&self, i: usize, j: usize) -> u8 {
        assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j] = self.field.reduce(v as u64);
    }

    /// The i-th row (0-based) as a slice.
    pub fn row(&self, i: usize) -> &[u8] {
        assert!(i < self.rows);
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Row-major vectorization; the canonical embedding into F_q^{rows·cols}.
    pub fn as_vector(&self) -> &[u8] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    pub fn trace(&self) -> Result<u8> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut t = 0;
        for i in 0..self.rows {
            t = self.field.add(t, self.entries[i * self.cols + i]);
        }
        Ok(t)
    }

    fn check_same_shape(&self, other: &FqMat) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.q,
                right: other.field.q,
            });
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                expected_rows: self.rows,
                expected_cols: self.cols,
                rows: other.rows,
                cols: other.cols,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FqMat) -> Result<FqMat> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (a, &b) in out.entries.iter_mut().zip(&other.entries) {
            *a = self.field.add(*a, b);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FqMat) -> Result<FqMat> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (a, &b) in out.entries.iter_mut().zip(&other.entries) {
            *a = self.field.sub(*a, b);
        }
        Ok(out)
    }

    pub fn scale(&self, c: u8) -> FqMat {
        let c = self.field.reduce(c as u64);
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = self.field.mul(*a, c);
        }
        out
    }

    pub fn matmul(&self, other: &FqMat) -> Result<FqMat> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.q,
                right: other.field.q,
            });
        }
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected_rows: self.cols,
                expected_cols: other.cols,
                rows: other.rows,
                cols: other.cols,
            });
        }
        let f = self.field;
        let mut out = FqMat::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.entries[k * other.cols + j];
                    if b != 0 {
                        let cur = out.entries[i * other.cols + j];
                        out.entries[i * other.cols + j] = f.add(cur, f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> FqMat {
        let mut out = FqMat::zero(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.entries[i * self.cols + j];
            }
        }
        out
    }

    /// Rank over F_q by Gaussian elimination (bit-packed XOR elimination for q = 2).
    pub fn rank(&self) -> usize {
        if self.field.q == 2 && self.cols <= 64 {
            let mut words: Vec<u64> = (0..self.rows)
                .map(|i| pack_f2_row(self.row(i)))
                .collect();
            return rank_f2_words(&mut words);
        }
        let mut scratch = self.entries.clone();
        rank_in_place(self.field, &mut scratch, self.rows, self.cols)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Determinant over F_q.
    pub fn det(&self) -> Result<u8> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut scratch = self.entries.clone();
        Ok(det_in_place(self.field, &mut scratch, self.rows))
    }

    /// Reduced row echelon form, same shape, zero rows at the bottom.
    pub fn rref(&self) -> FqMat {
        let mut rows: Vec<Vec<u8>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        rref_in_place(self.field, &mut rows);
        let mut out = FqMat::zero(self.field, self.rows, self.cols);
        for (i, r) in rows.iter().enumerate() {
            out.entries[i * self.cols..(i + 1) * self.cols].copy_from_slice(r);
        }
        out
    }

    /// The set of eigenvalues of a square matrix in F_q itself:
    /// { λ ∈ F_q : det(M − λI) = 0 }, sorted ascending.
    pub fn spectrum_in_field(&self) -> Result<Vec<u8>> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let f = self.field;
        let mut spectrum = Vec::new();
        let mut scratch = vec![0u8; n * n];
        for lambda in f.elements() {
            scratch.copy_from_slice(&self.entries);
            for i in 0..n {
                let d = scratch[i * n + i];
                scratch[i * n + i] = f.sub(d, lambda);
            }
            if det_in_place(f, &mut scratch, n) == 0 {
                spectrum.push(lambda);
            }
        }
        Ok(spectrum)
    }
}

impl fmt::Display for FqMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// dst += c · src (componentwise, mod q).
#[inline]
pub(crate) fn vec_add_scaled(field: Fq, dst: &mut [u8], src: &[u8], c: u8) {
    debug_assert_eq!(dst.len(), src.len());
    if c == 0 {
        return;
    }
    if c == 1 {
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = field.add(*d, s);
        }
    } else {
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = field.add(*d, field.mul(c, s));
        }
    }
}

#[inline]
pub(crate) fn pack_f2_row(row: &[u8]) -> u64 {
    let mut w = 0u64;
    for (j, &v) in row.iter().enumerate() {
        w |= (v as u64 & 1) << j;
    }
    w
}

/// Rank of a bit-packed F_2 matrix; destroys the input.
pub(crate) fn rank_f2_words(words: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..words.len() {
        let w = words[i];
        if w == 0 {
            continue;
        }
        let pivot = w.trailing_zeros();
        for j in 0..words.len() {
            if j != i && (words[j] >> pivot) & 1 == 1 {
                words[j] ^= w;
            }
        }
        rank += 1;
    }
    rank
}

/// Rank by in-place Gaussian elimination on a row-major scratch buffer.
pub(crate) fn rank_in_place(field: Fq, mat: &mut [u8], rows: usize, cols: usize) -> usize {
    debug_assert_eq!(mat.len(), rows * cols);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let mut pivot = None;
        for r in rank..rows {
            if mat[r * cols + col] != 0 {
                pivot = Some(r);
                break;
            }
        }
        let Some(pr) = pivot else { continue };
        if pr != rank {
            for c in col..cols {
                mat.swap(pr * cols + c, rank * cols + c);
            }
        }
        let inv = field.inv(mat[rank * cols + col]);
        if inv != 1 {
            for c in col..cols {
                mat[rank * cols + c] = field.mul(mat[rank * cols + c], inv);
            }
        }
        for r in (rank + 1)..rows {
            let f = mat[r * cols + col];
            if f != 0 {
                let fneg = field.neg(f);
                for c in col..cols {
                    let s = field.mul(fneg, mat[rank * cols + c]);
                    mat[r * cols + c] = field.add(mat[r * cols + c], s);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Determinant by in-place elimination on a row-major scratch buffer.
pub(crate) fn det_in_place(field: Fq, mat: &mut [u8], n: usize) -> u8 {
    debug_assert_eq!(mat.len(), n * n);
    let mut det = 1u8;
    for col in 0..n {
        let mut pivot = None;
        for r in col..n {
            if mat[r * n + col] != 0 {
                pivot = Some(r);
                break;
            }
        }
        let Some(pr) = pivot else { return 0 };
        if pr != col {
            for c in col..n {
                mat.swap(pr * n + c, col * n + c);
            }
            det = field.neg(det);
        }
        let pv = mat[col * n + col];
        det = field.mul(det, pv);
        let inv = field.inv(pv);
        for r in (col + 1)..n {
            let f = mat[r * n + col];
            if f != 0 {
                let scale = field.neg(field.mul(f, inv));
                for c in col..n {
                    let s = field.mul(scale, mat[col * n + c]);
                    mat[r * n + c] = field.add(mat[r * n + c], s);
                }
            }
        }
    }
    det
}

/// Full reduced row echelon form on a list of equal-length rows.
/// Zero rows are removed; returns the pivot column of each surviving row.
pub(crate) fn rref_in_place(field: Fq, rows: &mut Vec<Vec<u8>>) -> Vec<usize> {
    rows.retain(|r| !r.is_empty());
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let mut pivot = None;
        for r in rank..rows.len() {
            if rows[r][col] != 0 {
                pivot = Some(r);
                break;
            }
        }
        let Some(pr) = pivot else { continue };
        rows.swap(pr, rank);
        let inv = field.inv(rows[rank][col]);
        if inv != 1 {
            for c in col..ncols {
                rows[rank][c] = field.mul(rows[rank][c], inv);
            }
        }
        let pivot_row = std::mem::take(&mut rows[rank]);
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = field.neg(row[col]);
                vec_add_scaled(field, row, &pivot_row, f);
            }
        }
        rows[rank] = pivot_row;
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}

/// Reduce `v` in place against RREF rows with the given pivots;
/// afterwards v has zeros at every pivot coordinate.
pub(crate) fn reduce_against(field: Fq, v: &mut [u8], rows: &[Vec<u8>], pivots: &[usize]) {
    for (row, &piv) in rows.iter().zip(pivots) {
        let c = v[piv];
        if c != 0 {
            vec_add_scaled(field, v, row, field.neg(c));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u8) -> Fq {
        Fq::new(q).unwrap()
    }

    fn mat(q: u8, rows: &[&[u8]]) -> FqMat {
        let data: Vec<Vec<u8>> = rows.iter().map(|r| r.to_vec()).collect();
        FqMat::from_rows(f(q), &data).unwrap()
    }

    #[test]
    fn field_rejects_non_prime_moduli() {
        assert!(Fq::new(4).is_err());
        assert!(Fq::new(6).is_err());
        assert!(Fq::new(1).is_err());
        for q in SUPPORTED_MODULI {
            assert!(Fq::new(q).is_ok());
        }
    }

    #[test]
    fn field_inverses() {
        for q in SUPPORTED_MODULI {
            let fq = f(q);
            for a in 1..q {
                assert_eq!(fq.mul(a, fq.inv(a)), 1);
            }
        }
    }

    #[test]
    fn rank_of_zero_matrix_is_zero() {
        assert_eq!(FqMat::zero(f(2), 3, 2).rank(), 0);
    }

    #[test]
    fn rank_of_identity_block_in_mat3() {
        let j2 = FqMat::j_k(f(2), 3, 3, 2).unwrap();
        assert_eq!(j2.rank(), 2);
    }

    #[test]
    fn rank_of_unipotent_2x2_over_f2() {
        assert_eq!(mat(2, &[&[1, 1], &[0, 1]]).rank(), 2);
    }

    #[test]
    fn spectrum_of_strictly_upper_3x3_over_f2() {
        let m = mat(2, &[&[0, 1, 1], &[0, 0, 1], &[0, 0, 0]]);
        assert_eq!(m.spectrum_in_field().unwrap(), vec![0]);
    }

    #[test]
    fn spectrum_of_cycle_matrix_contains_one() {
        // E_{1,3} + E_{2,1} + E_{3,2} over F_2
        let m = mat(2, &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
        assert!(m.spectrum_in_field().unwrap().contains(&1));
    }

    #[test]
    fn spectrum_of_swap_over_f3() {
        let m = mat(3, &[&[0, 1], &[1, 0]]);
        assert_eq!(m.spectrum_in_field().unwrap(), vec![1, 2]);
    }

    #[test]
    fn spectrum_rejects_non_square() {
        assert!(FqMat::zero(f(2), 3, 2).spectrum_in_field().is_err());
    }

    #[test]
    fn det_of_identity_over_f3() {
        assert_eq!(FqMat::identity(f(3), 2).det().unwrap(), 1);
    }

    #[test]
    fn elementary_spot() {
        let e = FqMat::elementary(f(2), 2, 2, 1, 2).unwrap();
        assert_eq!(e, mat(2, &[&[0, 1], &[0, 0]]));
        assert!(FqMat::elementary(f(2), 2, 2, 0, 1).is_err());
        assert!(FqMat::elementary(f(2), 2, 2, 3, 1).is_err());
    }

    #[test]
    fn rref_of_duplicate_rows() {
        let m = mat(2, &[&[1, 1], &[1, 1]]);
        assert_eq!(m.rref(), mat(2, &[&[1, 1], &[0, 0]]));
    }

    #[test]
    fn rref_is_idempotent() {
        let m = mat(3, &[&[1, 2, 0], &[2, 1, 1], &[0, 0, 2]]);
        let r = m.rref();
        assert_eq!(r.rref(), r);
    }

    #[test]
    fn det_matches_diagonal_product_after_scaling() {
        let m = mat(5, &[&[2, 1], &[3, 4]]);
        // det = 2*4 - 1*3 = 5 = 0 mod 5
        assert_eq!(m.det().unwrap(), 0);
        let m = mat(5, &[&[2, 1], &[3, 3]]);
        // det = 6 - 3 = 3
        assert_eq!(m.det().unwrap(), 3);
    }

    #[test]
    fn matmul_and_transpose() {
        let a = mat(3, &[&[1, 2], &[0, 1]]);
        let b = mat(3, &[&[1, 1], &[1, 0]]);
        let ab = a.matmul(&b).unwrap();
        assert_eq!(ab, mat(3, &[&[0, 1], &[1, 0]]));
        assert_eq!(a.transpose(), mat(3, &[&[1, 0], &[2, 1]]));
    }

    #[test]
    fn trace_of_identity() {
        assert_eq!(FqMat::identity(f(3), 4).trace().unwrap(), 1);
        assert_eq!(FqMat::identity(f(5), 4).trace().unwrap(), 4);
    }
}
