//! Linear subspaces of Mat_{n,p}(F_q) stored by canonical basis: the reduced
//! row echelon form of the row-major vectorizations in F_q^{n·p}. Equal
//! subspaces compare equal bit for bit.

use std::fmt;

use crate::error::{Error, Result};
use crate::ffmat::{self, Fq, FqMat};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MatSubspace {
    field: Fq,
    rows: usize,
    cols: usize,
    basis: Vec<Vec<u8>>,
}

impl MatSubspace {
    pub fn zero_space(field: Fq, rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "ambient dimensions must be positive");
        MatSubspace {
            field,
            rows,
            cols,
            basis: Vec::new(),
        }
    }

    pub fn full_space(field: Fq, rows: usize, cols: usize) -> Self {
        let n = rows * cols;
        let mut basis = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = vec![0u8; n];
            v[i] = 1;
            basis.push(v);
        }
        MatSubspace {
            field,
            rows,
            cols,
            basis,
        }
    }

    /// Canonicalized span of the given matrices; duplicates and dependent
    /// elements are absorbed by the echelon reduction.
    pub fn from_basis(field: Fq, rows: usize, cols: usize, mats: &[FqMat]) -> Result<Self> {
        let mut vecs = Vec::with_capacity(mats.len());
        for m in mats {
            if m.field() != field {
                return Err(Error::FieldMismatch {
                    left: field.modulus(),
                    right: m.field().modulus(),
                });
            }
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::ShapeMismatch {
                    expected_rows: rows,
                    expected_cols: cols,
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
            vecs.push(m.as_vector().to_vec());
        }
        Ok(Self::from_vectors(field, rows, cols, vecs))
    }

    /// Canonicalized span of raw vectorizations (assumed reduced mod q).
    pub(crate) fn from_vectors(field: Fq, rows: usize, cols: usize, mut vecs: Vec<Vec<u8>>) -> Self {
        assert!(rows > 0 && cols > 0, "ambient dimensions must be positive");
        debug_assert!(vecs.iter().all(|v| v.len() == rows * cols));
        ffmat::rref_in_place(field, &mut vecs);
        MatSubspace {
            field,
            rows,
            cols,
            basis: vecs,
        }
    }

    pub fn field(&self) -> Fq {
        self.field
    }

    /// Row count of the ambient matrices.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Column count of the ambient matrices.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ambient_dim(&self) -> usize {
        self.rows * self.cols
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim() - self.dim()
    }

    /// Number of elements q^dim (saturating).
    pub fn element_count(&self) -> u128 {
        (self.field.modulus() as u128)
            .checked_pow(self.dim() as u32)
            .unwrap_or(u128::MAX)
    }

    /// Canonical basis rows as vectorizations.
    pub(crate) fn basis_vectors(&self) -> &[Vec<u8>] {
        &self.basis
    }

    pub(crate) fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|r| r.iter().position(|&v| v != 0).expect("nonzero basis row"))
            .collect()
    }

    pub fn basis_matrices(&self) -> Vec<FqMat> {
        self.basis
            .iter()
            .map(|v| FqMat::from_vector(self.field, self.rows, self.cols, v).expect("valid basis"))
            .collect()
    }

    fn check_same_ambient(&self, other: &MatSubspace) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.modulus(),
                right: other.field.modulus(),
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

    pub(crate) fn contains_vector(&self, v: &[u8]) -> bool {
        debug_assert_eq!(v.len(), self.ambient_dim());
        let mut w = v.to_vec();
        ffmat::reduce_against(self.field, &mut w, &self.basis, &self.pivots());
        w.iter().all(|&x| x == 0)
    }

    pub fn contains(&self, m: &FqMat) -> Result<bool> {
        if m.field() != self.field {
            return Err(Error::FieldMismatch {
                left: self.field.modulus(),
                right: m.field().modulus(),
            });
        }
        if m.rows() != self.rows || m.cols() != self.cols {
            return Err(Error::ShapeMismatch {
                expected_rows: self.rows,
                expected_cols: self.cols,
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        Ok(self.contains_vector(m.as_vector()))
    }

    pub fn is_subspace_of(&self, other: &MatSubspace) -> Result<bool> {
        self.check_same_ambient(other)?;
        Ok(self.basis.iter().all(|v| other.contains_vector(v)))
    }

    pub fn sum(&self, other: &MatSubspace) -> Result<MatSubspace> {
        self.check_same_ambient(other)?;
        let mut vecs = self.basis.clone();
        vecs.extend(other.basis.iter().cloned());
        Ok(Self::from_vectors(self.field, self.rows, self.cols, vecs))
    }

    /// Intersection via the Zassenhaus block trick: row-reduce rows
    /// [v | v] for v in self and [w | 0] for w in other; rows whose left half
    /// vanishes have their right half spanning the intersection.
    pub fn intersect(&self, other: &MatSubspace) -> Result<MatSubspace> {
        self.check_same_ambient(other)?;
        let n = self.ambient_dim();
        let mut rows: Vec<Vec<u8>> = Vec::with_capacity(self.dim() + other.dim());
        for v in &self.basis {
            let mut r = Vec::with_capacity(2 * n);
            r.extend_from_slice(v);
            r.extend_from_slice(v);
            rows.push(r);
        }
        for w in &other.basis {
            let mut r = Vec::with_capacity(2 * n);
            r.extend_from_slice(w);
            r.resize(2 * n, 0);
            rows.push(r);
        }
        ffmat::rref_in_place(self.field, &mut rows);
        let vecs: Vec<Vec<u8>> = rows
            .iter()
            .filter(|r| r[..n].iter().all(|&x| x == 0))
            .map(|r| r[n..].to_vec())
            .collect();
        Ok(Self::from_vectors(self.field, self.rows, self.cols, vecs))
    }

    /// The subspace {P·M·Q : M ∈ self} for invertible P, Q.
    pub fn equiv_act(&self, p: &FqMat, q: &FqMat) -> Result<MatSubspace> {
        if p.field() != self.field || q.field() != self.field {
            return Err(Error::FieldMismatch {
                left: self.field.modulus(),
                right: p.field().modulus().min(q.field().modulus()),
            });
        }
        if p.rows() != self.rows || p.cols() != self.rows {
            return Err(Error::ShapeMismatch {
                expected_rows: self.rows,
                expected_cols: self.rows,
                rows: p.rows(),
                cols: p.cols(),
            });
        }
        if q.rows() != self.cols || q.cols() != self.cols {
            return Err(Error::ShapeMismatch {
                expected_rows: self.cols,
                expected_cols: self.cols,
                rows: q.rows(),
                cols: q.cols(),
            });
        }
        if !p.is_invertible() || !q.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        let mapped: Vec<FqMat> = self
            .basis_matrices()
            .iter()
            .map(|m| p.matmul(m).and_then(|pm| pm.matmul(q)))
            .collect::<Result<_>>()?;
        Self::from_basis(self.field, self.rows, self.cols, &mapped)
    }

    /// Orthogonal complement for the trace form b(A, B) = tr(AB) on square
    /// ambient matrices. tr(AB) = Σ_{i,j} A[j][i]·B[i][j], so the functional
    /// attached to a basis element A has coefficient vector vec(Aᵀ).
    pub fn trace_orthogonal(&self) -> Result<MatSubspace> {
        if self.rows != self.cols {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let functionals: Vec<Vec<u8>> = self
            .basis_matrices()
            .iter()
            .map(|a| a.transpose().as_vector().to_vec())
            .collect();
        let kernel = nullspace(self.field, &functionals, n * n);
        Ok(Self::from_vectors(self.field, n, n, kernel))
    }

    /// R_i(V): elements of V supported on row i alone (1-based), computed as
    /// the intersection with the coordinate subspace of row i.
    pub fn row_restriction(&self, i: usize) -> Result<MatSubspace> {
        if i == 0 || i > self.rows {
            return Err(Error::RowIndexOutOfRange { i, rows: self.rows });
        }
        let mut coord = Vec::with_capacity(self.cols);
        for j in 1..=self.cols {
            coord.push(FqMat::elementary(self.field, self.rows, self.cols, i, j)?);
        }
        let coord_space = Self::from_basis(self.field, self.rows, self.cols, &coord)?;
        self.intersect(&coord_space)
    }

    /// W = { M ∈ Mat_{n,r} : [M | 0] ∈ V }, the paper normalization with the
    /// zero block on the right. Guarantees codim W ≤ codim V in its ambient.
    pub fn column_restriction(&self, r: usize) -> Result<MatSubspace> {
        if r == 0 || r > self.cols {
            return Err(Error::ColumnCountOutOfRange { r, cols: self.cols });
        }
        let mut coord = Vec::with_capacity(self.rows * r);
        for i in 1..=self.rows {
            for j in 1..=r {
                coord.push(FqMat::elementary(self.field, self.rows, self.cols, i, j)?);
            }
        }
        let coord_space = Self::from_basis(self.field, self.rows, self.cols, &coord)?;
        let padded = self.intersect(&coord_space)?;
        let vecs: Vec<Vec<u8>> = padded
            .basis
            .iter()
            .map(|v| {
                let mut w = Vec::with_capacity(self.rows * r);
                for i in 0..self.rows {
                    w.extend_from_slice(&v[i * self.cols..i * self.cols + r]);
                }
                w
            })
            .collect();
        Ok(Self::from_vectors(self.field, self.rows, r, vecs))
    }

    /// Classify a linear hyperplane of Mat_2(F_2) by the rank of the unique
    /// nonzero element of its trace orthogonal.
    pub fn classify_hyperplane_2x2_f2(&self) -> Result<HyperplaneClass> {
        if self.field.modulus() != 2 || self.rows != 2 || self.cols != 2 {
            return Err(Error::InvalidParameter(
                "classifier applies to subspaces of Mat_2(F_2) only".into(),
            ));
        }
        if self.dim() != 3 {
            return Err(Error::InvalidParameter(format!(
                "classifier needs a hyperplane (dim 3), got dim {}",
                self.dim()
            )));
        }
        let orth = self.trace_orthogonal()?;
        debug_assert_eq!(orth.dim(), 1);
        let c = &orth.basis_matrices()[0];
        Ok(if c.rank() == 2 {
            HyperplaneClass::Sl2Class
        } else {
            HyperplaneClass::T2PlusClass
        })
    }
}

impl fmt::Display for MatSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "subspace of Mat_{{{},{}}}({}) of dim {} (codim {})",
            self.rows,
            self.cols,
            self.field,
            self.dim(),
            self.codim()
        )
    }
}

/// Equivalence class of a hyperplane of Mat_2(F_2).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HyperplaneClass {
    /// Orthogonal generator has rank 2; the hyperplane is spanned by its rank-2 matrices.
    Sl2Class,
    /// Orthogonal generator has rank 1; the hyperplane is not spanned by its rank-2 matrices.
    T2PlusClass,
}

impl fmt::Display for HyperplaneClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperplaneClass::Sl2Class => write!(f, "SL2_CLASS"),
            HyperplaneClass::T2PlusClass => write!(f, "T2PLUS_CLASS"),
        }
    }
}

/// Basis of { x : r·x = 0 for every row r }, from the RREF of the rows.
pub(crate) fn nullspace(field: Fq, rows: &[Vec<u8>], ncols: usize) -> Vec<Vec<u8>> {
    let mut reduced: Vec<Vec<u8>> = rows.to_vec();
    let pivots = ffmat::rref_in_place(field, &mut reduced);
    let pivot_set: Vec<bool> = {
        let mut s = vec![false; ncols];
        for &p in &pivots {
            s[p] = true;
        }
        s
    };
    let mut basis = Vec::with_capacity(ncols - pivots.len());
    for j in 0..ncols {
        if pivot_set[j] {
            continue;
        }
        let mut v = vec![0u8; ncols];
        v[j] = 1;
        for (row, &p) in reduced.iter().zip(&pivots) {
            v[p] = field.neg(row[j]);
        }
        basis.push(v);
    }
    basis
}

/// sl_2(F_2): trace-zero matrices of Mat_2(F_2).
pub fn sl2_f2() -> MatSubspace {
    let f = Fq::new(2).unwrap();
    let e12 = FqMat::elementary(f, 2, 2, 1, 2).unwrap();
    let e21 = FqMat::elementary(f, 2, 2, 2, 1).unwrap();
    let diag = FqMat::from_rows(f, &[vec![1, 0], vec![0, 1]]).unwrap();
    MatSubspace::from_basis(f, 2, 2, &[e12, e21, diag]).unwrap()
}

/// T_k^+: upper triangular matrices of Mat_k.
pub fn upper_triangular(field: Fq, k: usize) -> MatSubspace {
    triangular(field, k, |i, j| j >= i)
}

/// T_k^{++}: strictly upper triangular matrices of Mat_k.
pub fn strict_upper_triangular(field: Fq, k: usize) -> MatSubspace {
    triangular(field, k, |i, j| j > i)
}

/// T_k^-: lower triangular matrices of Mat_k.
pub fn lower_triangular(field: Fq, k: usize) -> MatSubspace {
    triangular(field, k, |i, j| j <= i)
}

fn triangular(field: Fq, k: usize, keep: impl Fn(usize, usize) -> bool) -> MatSubspace {
    let mut basis = Vec::new();
    for i in 1..=k {
        for j in 1..=k {
            if keep(i, j) {
                basis.push(FqMat::elementary(field, k, k, i, j).unwrap());
            }
        }
    }
    MatSubspace::from_basis(field, k, k, &basis).unwrap()
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
    fn span_of_zero_matrix_has_dim_zero() {
        let z = FqMat::zero(f(2), 2, 2);
        let v = MatSubspace::from_basis(f(2), 2, 2, &[z]).unwrap();
        assert_eq!(v.dim(), 0);
        assert_eq!(v.codim(), 4);
    }

    #[test]
    fn three_invertibles_span_sl2_f2() {
        let gens = [
            FqMat::identity(f(2), 2),
            mat(2, &[&[1, 1], &[0, 1]]),
            mat(2, &[&[1, 0], &[1, 1]]),
        ];
        let v = MatSubspace::from_basis(f(2), 2, 2, &gens).unwrap();
        assert_eq!(v.dim(), 3);
        assert_eq!(v, sl2_f2());
    }

    #[test]
    fn elementaries_span_full_space_over_f3() {
        let mut gens = Vec::new();
        for i in 1..=2 {
            for j in 1..=2 {
                gens.push(FqMat::elementary(f(3), 2, 2, i, j).unwrap());
            }
        }
        let v = MatSubspace::from_basis(f(3), 2, 2, &gens).unwrap();
        assert_eq!(v.dim(), 4);
        assert_eq!(v, MatSubspace::full_space(f(3), 2, 2));
    }

    #[test]
    fn intersect_with_self_is_identity() {
        let v = sl2_f2();
        assert_eq!(v.intersect(&v).unwrap(), v);
    }

    #[test]
    fn disjoint_supports_intersect_trivially() {
        let t = upper_triangular(f(2), 2);
        let e21 = FqMat::elementary(f(2), 2, 2, 2, 1).unwrap();
        let w = MatSubspace::from_basis(f(2), 2, 2, &[e21]).unwrap();
        assert_eq!(t.intersect(&w).unwrap().dim(), 0);
    }

    #[test]
    fn sum_of_sl2_and_e11_is_full() {
        let e11 = FqMat::elementary(f(2), 2, 2, 1, 1).unwrap();
        let w = MatSubspace::from_basis(f(2), 2, 2, &[e11]).unwrap();
        assert_eq!(sl2_f2().sum(&w).unwrap().dim(), 4);
    }

    #[test]
    fn dimension_formula_for_sum_and_intersection() {
        let v = upper_triangular(f(3), 2);
        let w = lower_triangular(f(3), 2);
        let s = v.sum(&w).unwrap();
        let i = v.intersect(&w).unwrap();
        assert_eq!(s.dim() + i.dim(), v.dim() + w.dim());
    }

    #[test]
    fn equiv_act_by_identity_is_identity() {
        let v = sl2_f2();
        let id = FqMat::identity(f(2), 2);
        assert_eq!(v.equiv_act(&id, &id).unwrap(), v);
    }

    #[test]
    fn equiv_act_by_antidiagonal_flips_triangular() {
        let anti = mat(2, &[&[0, 1], &[1, 0]]);
        let t = upper_triangular(f(2), 2);
        let mapped = t.equiv_act(&anti, &anti).unwrap();
        assert_eq!(mapped.dim(), 3);
        assert_eq!(mapped, lower_triangular(f(2), 2));
    }

    #[test]
    fn equiv_act_rejects_singular() {
        let v = sl2_f2();
        let sing = mat(2, &[&[1, 1], &[1, 1]]);
        let id = FqMat::identity(f(2), 2);
        assert!(matches!(
            v.equiv_act(&sing, &id),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn trace_orthogonal_of_sl2_is_identity_line() {
        let orth = sl2_f2().trace_orthogonal().unwrap();
        assert_eq!(orth.dim(), 1);
        assert!(orth.contains(&FqMat::identity(f(2), 2)).unwrap());
    }

    #[test]
    fn trace_orthogonal_of_t2_plus_is_e12_line() {
        let orth = upper_triangular(f(2), 2).trace_orthogonal().unwrap();
        assert_eq!(orth.dim(), 1);
        let e12 = FqMat::elementary(f(2), 2, 2, 1, 2).unwrap();
        assert!(orth.contains(&e12).unwrap());
    }

    #[test]
    fn trace_orthogonal_dimension_complement() {
        let v = upper_triangular(f(3), 3);
        let orth = v.trace_orthogonal().unwrap();
        assert_eq!(v.dim() + orth.dim(), 9);
        assert_eq!(orth.trace_orthogonal().unwrap(), v);
    }

    #[test]
    fn row_restriction_of_strict_upper() {
        let t = strict_upper_triangular(f(2), 3);
        assert_eq!(t.row_restriction(3).unwrap().dim(), 0);
        assert_eq!(t.row_restriction(1).unwrap().dim(), 2);
        assert!(t.row_restriction(0).is_err());
        assert!(t.row_restriction(4).is_err());
    }

    #[test]
    fn row_restriction_of_zero_space() {
        let z = MatSubspace::zero_space(f(3), 2, 2);
        for i in 1..=2 {
            assert_eq!(z.row_restriction(i).unwrap().dim(), 0);
        }
    }

    #[test]
    fn row_restrictions_are_subspaces() {
        let t = strict_upper_triangular(f(2), 3);
        for i in 1..=3 {
            assert!(t.row_restriction(i).unwrap().is_subspace_of(&t).unwrap());
        }
    }

    #[test]
    fn column_restriction_of_full_space() {
        let v = MatSubspace::full_space(f(2), 3, 2);
        let w = v.column_restriction(1).unwrap();
        assert_eq!(w, MatSubspace::full_space(f(2), 3, 1));
    }

    #[test]
    fn column_restriction_of_upper_triangular() {
        // [M | 0] ∈ T_2^+ with M a single column forces the (2,1) entry to zero.
        let t = upper_triangular(f(2), 2);
        let w = t.column_restriction(1).unwrap();
        assert_eq!(w.dim(), 1);
        let e11_col = FqMat::from_rows(f(2), &[vec![1], vec![0]]).unwrap();
        assert!(w.contains(&e11_col).unwrap());
    }

    #[test]
    fn classifier_on_named_hyperplanes() {
        assert_eq!(
            sl2_f2().classify_hyperplane_2x2_f2().unwrap(),
            HyperplaneClass::Sl2Class
        );
        assert_eq!(
            upper_triangular(f(2), 2).classify_hyperplane_2x2_f2().unwrap(),
            HyperplaneClass::T2PlusClass
        );
    }

    #[test]
    fn classifier_on_kernel_of_corner_entry() {
        // kernel of M ↦ M_{2,1} is spanned by E11, E12, E22
        let gens = [
            FqMat::elementary(f(2), 2, 2, 1, 1).unwrap(),
            FqMat::elementary(f(2), 2, 2, 1, 2).unwrap(),
            FqMat::elementary(f(2), 2, 2, 2, 2).unwrap(),
        ];
        let h = MatSubspace::from_basis(f(2), 2, 2, &gens).unwrap();
        assert_eq!(
            h.classify_hyperplane_2x2_f2().unwrap(),
            HyperplaneClass::T2PlusClass
        );
    }

    #[test]
    fn classifier_rejects_wrong_inputs() {
        assert!(MatSubspace::full_space(f(2), 2, 2)
            .classify_hyperplane_2x2_f2()
            .is_err());
        assert!(MatSubspace::full_space(f(3), 2, 2)
            .classify_hyperplane_2x2_f2()
            .is_err());
    }

    #[test]
    fn strict_upper_triangular_dimensions() {
        for k in 2..=5 {
            let t = strict_upper_triangular(f(3), k);
            assert_eq!(t.dim(), k * (k - 1) / 2);
            assert_eq!(t.codim(), k * (k + 1) / 2);
        }
    }

    #[test]
    fn from_basis_rejects_mismatches() {
        let a = FqMat::zero(f(2), 2, 2);
        let b = FqMat::zero(f(2), 2, 3);
        assert!(MatSubspace::from_basis(f(2), 2, 2, &[a.clone(), b]).is_err());
        let c = FqMat::zero(f(3), 2, 2);
        assert!(MatSubspace::from_basis(f(2), 2, 2, &[a, c]).is_err());
    }
}
