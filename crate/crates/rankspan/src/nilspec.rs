//! Zero-spectrum subspaces of square matrices: every element's set of
//! in-field eigenvalues is contained in {0}. Covers the dimension bound
//! C(n,2), the zero-row-index algorithm with its f-cycle counterexample
//! witnesses, and the triangularizing permutation, both by the inductive
//! recipe and by exhaustive search over permutations.

use itertools::Itertools;
use serde_json::json;

use crate::error::{Error, Result};
use crate::ffmat::{self, Fq, FqMat};
use crate::io;
use crate::strata;
use crate::subspace::{self, MatSubspace};
use crate::verdict::{Status, Verdict};

/// A permutation of {0, …, n−1}, stored as the image list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidParameter(format!(
                    "not a permutation of 0..{n}: {images:?}"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        assert!(a < n && b < n);
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Permutation { images }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, j: usize) -> usize {
        self.images[j]
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (j, &i) in self.images.iter().enumerate() {
            images[i] = j;
        }
        Permutation { images }
    }

    /// (self ∘ other)(j) = self(other(j)); matches matrix product order.
    pub fn compose(&self, other: &Permutation) -> Self {
        assert_eq!(self.n(), other.n());
        Permutation {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(j, &i)| i == j)
    }

    /// The permutation matrix P with P·e_j = e_{σ(j)}.
    pub fn matrix(&self, field: Fq) -> FqMat {
        let n = self.n();
        let mut m = FqMat::zero(field, n, n);
        for (j, &i) in self.images.iter().enumerate() {
            m.set(i, j, 1);
        }
        m
    }

    /// 1-based image list, the convention used in witness payloads.
    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i + 1).collect()
    }
}

/// Conjugate a subspace of square matrices: P V P^{-1}.
pub fn conjugate(v: &MatSubspace, perm: &Permutation) -> Result<MatSubspace> {
    let field = v.field();
    v.equiv_act(&perm.matrix(field), &perm.inverse().matrix(field))
}

/// Proof that R_i(V) = {0}: the row index together with the (empty)
/// canonical basis of the restriction.
#[derive(Clone, Debug)]
pub struct ZeroRowWitness {
    /// 1-based row index.
    pub index: usize,
    pub restriction: MatSubspace,
}

/// An f-cycle and the cyclic sum matrix it pins inside V, which has
/// eigenvalue 1 with the cycle-indicator eigenvector.
#[derive(Clone, Debug)]
pub struct CycleWitness {
    /// 1-based: f[k-1] is the row index with E_{f(k),k} ∈ V.
    pub f: Vec<usize>,
    /// The cycle (i_1, …, i_m), 1-based, pairwise distinct.
    pub cycle: Vec<usize>,
    pub matrix: FqMat,
}

impl CycleWitness {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "f": self.f,
            "cycle": self.cycle,
            "matrix": io::matrix_to_value(&self.matrix),
        })
    }
}

/// Block view [[A, 0], [L, α]] of a square matrix whose last column vanishes
/// above the bottom-right entry.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub a: FqMat,
    pub l: FqMat,
    pub alpha: u8,
}

impl BlockDecomposition {
    pub fn from_last_column_constrained(m: &FqMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NonSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let n = m.rows();
        if n < 2 {
            return Err(Error::InvalidParameter(
                "block decomposition needs n >= 2".into(),
            ));
        }
        for i in 0..n - 1 {
            if m.get(i, n - 1) != 0 {
                return Err(Error::InvalidParameter(format!(
                    "entry ({}, {}) must vanish for the [[A,0],[L,alpha]] form",
                    i + 1,
                    n
                )));
            }
        }
        let field = m.field();
        let mut a = FqMat::zero(field, n - 1, n - 1);
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                a.set(i, j, m.get(i, j));
            }
        }
        let mut l = FqMat::zero(field, 1, n - 1);
        for j in 0..n - 1 {
            l.set(0, j, m.get(n - 1, j));
        }
        Ok(BlockDecomposition {
            a,
            l,
            alpha: m.get(n - 1, n - 1),
        })
    }

    pub fn reassemble(&self) -> FqMat {
        let n = self.a.rows() + 1;
        let mut m = FqMat::zero(self.a.field(), n, n);
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                m.set(i, j, self.a.get(i, j));
            }
        }
        for j in 0..n - 1 {
            m.set(n - 1, j, self.l.get(0, j));
        }
        m.set(n - 1, n - 1, self.alpha);
        m
    }
}

/// K(M): the top-left (n−1)×(n−1) block of a matrix with zero last row,
/// the compression used when restricting to matrices with vanishing last row.
pub fn compress_last_row_zero(m: &FqMat) -> Result<FqMat> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n < 2 {
        return Err(Error::InvalidParameter("compression needs n >= 2".into()));
    }
    if (0..n).any(|j| m.get(n - 1, j) != 0) {
        return Err(Error::InvalidParameter(
            "last row must vanish for the K compression".into(),
        ));
    }
    let mut a = FqMat::zero(m.field(), n - 1, n - 1);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            a.set(i, j, m.get(i, j));
        }
    }
    Ok(a)
}

/// First nonzero in-field eigenvalue of the n×n element vector, if any.
pub(crate) fn offending_eigenvalue(field: Fq, n: usize, v: &[u8], scratch: &mut [u8]) -> Option<u8> {
    for lambda in field.nonzero_elements() {
        scratch.copy_from_slice(v);
        for i in 0..n {
            scratch[i * n + i] = field.sub(scratch[i * n + i], lambda);
        }
        if ffmat::det_in_place(field, scratch, n) == 0 {
            return Some(lambda);
        }
    }
    None
}

/// Exhaustive check that Sp(M) ⊆ {0} for every element of V, by per-λ
/// determinant evaluation over all q^dim elements.
pub fn has_zero_spectrum_property(v: &MatSubspace, budget: u64) -> Result<Verdict> {
    if v.rows() != v.cols() {
        return Err(Error::NonSquare {
            rows: v.rows(),
            cols: v.cols(),
        });
    }
    let n = v.rows();
    let field = v.field();
    let mut verdict = Verdict::new("has_zero_spectrum_property", Status::Pass)
        .with_param("n", n)
        .with_param("q", field.modulus())
        .with_param("dim", v.dim());
    let mut scratch = vec![0u8; n * n];
    let mut bad: Option<(FqMat, u8)> = None;
    let mut checked = 0u64;
    let required = v.element_count();
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    strata::walk_affine(
        field,
        v.basis_vectors(),
        &vec![0u8; v.ambient_dim()],
        &mut |w: &[u8]| {
            checked += 1;
            if let Some(lambda) = offending_eigenvalue(field, n, w, &mut scratch) {
                bad = Some((
                    FqMat::from_vector(field, n, n, w).expect("valid element"),
                    lambda,
                ));
                false
            } else {
                true
            }
        },
    );
    verdict = verdict.with_count("elements_checked", checked);
    if let Some((m, lambda)) = bad {
        verdict.status = Status::Fail;
        verdict = verdict.with_witness(json!({
            "element": io::matrix_to_value(&m),
            "eigenvalue": lambda,
            "subspace": io::subspace_to_value(v),
        }));
    }
    Ok(verdict)
}

/// The smallest row index i with R_i(V) = {0}; pure linear algebra, no
/// enumeration. Fails with NoZeroRowIndex when every restriction is nonzero,
/// which is a reportable counterexample event for zero-spectrum inputs.
pub fn find_zero_row_index(v: &MatSubspace) -> Result<ZeroRowWitness> {
    if v.rows() != v.cols() {
        return Err(Error::NonSquare {
            rows: v.rows(),
            cols: v.cols(),
        });
    }
    for i in 1..=v.rows() {
        let restriction = v.row_restriction(i)?;
        if restriction.dim() == 0 {
            return Ok(ZeroRowWitness { index: i, restriction });
        }
    }
    Err(Error::NoZeroRowIndex)
}

/// Assemble the cycle matrix of f starting the walk at column 1, check its
/// membership in V, and confirm eigenvalue 1 with the indicator eigenvector.
pub fn build_cycle_witness(v: &MatSubspace, f: &[usize]) -> Result<CycleWitness> {
    let n = v.rows();
    if v.cols() != n {
        return Err(Error::NonSquare {
            rows: v.rows(),
            cols: v.cols(),
        });
    }
    if f.len() != n || f.iter().any(|&i| i == 0 || i > n) {
        return Err(Error::InvalidParameter(format!(
            "f must map 1..={n} into 1..={n}"
        )));
    }
    let field = v.field();
    for k in 1..=n {
        let e = FqMat::elementary(field, n, n, f[k - 1], k)?;
        if !v.contains(&e)? {
            return Err(Error::InvalidParameter(format!(
                "E_{{{},{}}} is not in V; the f map is not certified",
                f[k - 1],
                k
            )));
        }
    }
    // iterate k, f(k), f(f(k)), … until a repeat; the tail from the first
    // repeated index is a cycle
    let mut seen_at = vec![usize::MAX; n + 1];
    let mut seq = Vec::new();
    let mut k = 1usize;
    let cycle = loop {
        if seen_at[k] != usize::MAX {
            break seq[seen_at[k]..].to_vec();
        }
        seen_at[k] = seq.len();
        seq.push(k);
        k = f[k - 1];
    };
    let mut matrix = FqMat::zero(field, n, n);
    for (idx, &c) in cycle.iter().enumerate() {
        let next = cycle[(idx + 1) % cycle.len()];
        matrix.set(next - 1, c - 1, 1);
    }
    assert!(
        v.contains(&matrix)?,
        "cycle matrix is a sum of certified elementary matrices of V"
    );
    let spectrum = matrix.spectrum_in_field()?;
    assert!(spectrum.contains(&1), "cycle matrix has eigenvalue 1");
    // the indicator vector of the cycle rows is a fixed vector
    let mut indicator = FqMat::zero(field, n, 1);
    for &c in &cycle {
        indicator.set(c - 1, 0, 1);
    }
    assert_eq!(
        matrix.matmul(&indicator)?,
        indicator,
        "cycle indicator is an eigenvector for eigenvalue 1"
    );
    Ok(CycleWitness {
        f: f.to_vec(),
        cycle,
        matrix,
    })
}

/// Dimension bound dim V ≤ C(n,2) for zero-spectrum V. Re-verifies the
/// spectrum precondition within the budget before judging the bound.
pub fn check_gerstenhaber_bound(v: &MatSubspace, budget: u64) -> Result<Verdict> {
    let spectrum_verdict = has_zero_spectrum_property(v, budget)?;
    let n = v.rows();
    let bound = n * (n - 1) / 2;
    let mut verdict = Verdict::new("check_gerstenhaber_bound", Status::Pass)
        .with_param("n", n)
        .with_param("q", v.field().modulus())
        .with_param("dim", v.dim())
        .with_param("bound", bound);
    if spectrum_verdict.status != Status::Pass {
        verdict.status = Status::HypothesisNotMet;
        verdict = verdict.with_witness(spectrum_verdict.witness);
        return Ok(verdict);
    }
    if v.dim() <= bound {
        verdict.status = Status::Pass;
    } else {
        verdict.status = Status::Fail;
        verdict = verdict.with_witness(json!({
            "subspace": io::subspace_to_value(v),
            "violated": format!("zero-spectrum subspace of dim {} > C({n},2) = {bound}", v.dim()),
        }));
    }
    Ok(verdict)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TriangularizeMode {
    /// Mirror the inductive argument: send a zero-row index last, restrict to
    /// the last-column-constrained subspace, recurse on its A-block image.
    Recursive,
    /// Scan all n! permutations; the independent oracle (n ≤ 8).
    Exhaustive,
}

pub struct TriangularizationOutcome {
    pub permutation: Permutation,
    /// True when the recursive recipe failed and the exhaustive oracle was
    /// used instead; always false in exhaustive mode.
    pub used_fallback: bool,
}

/// Fast form of the defining property: (P V P^{-1}) ∩ T_n^- = {0} iff the
/// dimensions of P V P^{-1} and T_n^- add up under the sum.
fn property_holds(v: &MatSubspace, perm: &Permutation) -> Result<bool> {
    let n = v.rows();
    let conj = conjugate(v, perm)?;
    let lower = subspace::lower_triangular(v.field(), n);
    let total = conj.sum(&lower)?;
    Ok(total.dim() == conj.dim() + lower.dim())
}

/// Full re-verification through the intersection operation itself.
pub fn verify_triangularizing(v: &MatSubspace, perm: &Permutation) -> Result<bool> {
    let conj = conjugate(v, perm)?;
    let lower = subspace::lower_triangular(v.field(), v.rows());
    Ok(conj.intersect(&lower)?.dim() == 0)
}

fn recursive_perm(v: &MatSubspace) -> Result<Permutation> {
    let n = v.rows();
    if n <= 1 || v.dim() == 0 {
        return Ok(Permutation::identity(n));
    }
    let witness = find_zero_row_index(v)?;
    let sigma = Permutation::transposition(n, witness.index - 1, n - 1);
    let v1 = conjugate(v, &sigma)?;
    debug_assert_eq!(v1.row_restriction(n)?.dim(), 0);

    // W: elements of V1 whose last column vanishes above the corner
    let field = v.field();
    let mut coord = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if j < n || i == n {
                coord.push(FqMat::elementary(field, n, n, i, j)?);
            }
        }
    }
    let coord_space = MatSubspace::from_basis(field, n, n, &coord)?;
    let w = v1.intersect(&coord_space)?;

    let a_mats: Vec<FqMat> = w
        .basis_matrices()
        .iter()
        .map(|m| {
            BlockDecomposition::from_last_column_constrained(m).map(|b| {
                debug_assert_eq!(b.alpha, 0, "corner entry is an eigenvalue, hence zero");
                b.a
            })
        })
        .collect::<Result<_>>()?;
    let a_space = MatSubspace::from_basis(field, n - 1, n - 1, &a_mats)?;
    let tau = recursive_perm(&a_space)?;

    let images = (0..n)
        .map(|j| {
            let s = sigma.apply(j);
            if s == n - 1 {
                n - 1
            } else {
                tau.apply(s)
            }
        })
        .collect();
    Permutation::from_images(images)
}

fn exhaustive_perm(v: &MatSubspace) -> Result<Permutation> {
    let n = v.rows();
    if n > 8 {
        return Err(Error::InvalidParameter(
            "exhaustive permutation search supports n <= 8".into(),
        ));
    }
    for images in (0..n).permutations(n) {
        let perm = Permutation { images };
        if property_holds(v, &perm)? {
            return Ok(perm);
        }
    }
    Err(Error::TriangularizationNotFound)
}

/// A permutation P with (P V P^{-1}) ∩ T_n^- = {0} for a zero-spectrum V.
pub fn triangularizing_permutation(
    v: &MatSubspace,
    mode: TriangularizeMode,
) -> Result<TriangularizationOutcome> {
    if v.rows() != v.cols() {
        return Err(Error::NonSquare {
            rows: v.rows(),
            cols: v.cols(),
        });
    }
    match mode {
        TriangularizeMode::Exhaustive => Ok(TriangularizationOutcome {
            permutation: exhaustive_perm(v)?,
            used_fallback: false,
        }),
        TriangularizeMode::Recursive => {
            // the inductive recipe is only sketched in the source argument,
            // so its output is verified and the oracle is the safety net
            match recursive_perm(v) {
                Ok(perm) if property_holds(v, &perm)? => Ok(TriangularizationOutcome {
                    permutation: perm,
                    used_fallback: false,
                }),
                Ok(_) | Err(Error::NoZeroRowIndex) => Ok(TriangularizationOutcome {
                    permutation: exhaustive_perm(v)?,
                    used_fallback: true,
                }),
                Err(e) => Err(e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::strict_upper_triangular;

    fn f(q: u8) -> Fq {
        Fq::new(q).unwrap()
    }

    const BUDGET: u64 = 1 << 24;

    #[test]
    fn strict_upper_spaces_are_zero_spectrum() {
        for q in [2u8, 3] {
            for n in 2..=4 {
                let t = strict_upper_triangular(f(q), n);
                let verdict = has_zero_spectrum_property(&t, BUDGET).unwrap();
                assert_eq!(verdict.status, Status::Pass, "n={n} q={q}");
            }
        }
    }

    #[test]
    fn symmetric_pair_fails_zero_spectrum() {
        let field = f(2);
        let e12 = FqMat::elementary(field, 2, 2, 1, 2).unwrap();
        let e21 = FqMat::elementary(field, 2, 2, 2, 1).unwrap();
        let v = MatSubspace::from_basis(field, 2, 2, &[e12.clone(), e21.clone()]).unwrap();
        let verdict = has_zero_spectrum_property(&v, BUDGET).unwrap();
        assert_eq!(verdict.status, Status::Fail);
        let el = io::matrix_from_value(verdict.witness.get("element").unwrap()).unwrap();
        assert_eq!(el, e12.add(&e21).unwrap());
        assert_eq!(verdict.witness.get("eigenvalue").unwrap(), 1);
    }

    #[test]
    fn conjugated_strict_upper_is_zero_spectrum() {
        let t = strict_upper_triangular(f(2), 3);
        let perm = Permutation::from_images(vec![2, 0, 1]).unwrap();
        let conj = conjugate(&t, &perm).unwrap();
        let verdict = has_zero_spectrum_property(&conj, BUDGET).unwrap();
        assert_eq!(verdict.status, Status::Pass);
    }

    #[test]
    fn zero_row_index_of_strict_upper() {
        let t = strict_upper_triangular(f(2), 3);
        let w = find_zero_row_index(&t).unwrap();
        assert_eq!(w.index, 3);
        assert_eq!(w.restriction.dim(), 0);
    }

    #[test]
    fn zero_row_index_of_zero_space() {
        let z = MatSubspace::zero_space(f(3), 2, 2);
        assert_eq!(find_zero_row_index(&z).unwrap().index, 1);
    }

    #[test]
    fn zero_row_index_of_e12_line() {
        let field = f(2);
        let e12 = FqMat::elementary(field, 2, 2, 1, 2).unwrap();
        let v = MatSubspace::from_basis(field, 2, 2, &[e12]).unwrap();
        assert_eq!(find_zero_row_index(&v).unwrap().index, 2);
    }

    #[test]
    fn no_zero_row_index_event() {
        // span{E12, E21} has R_1 and R_2 both nonzero
        let field = f(2);
        let e12 = FqMat::elementary(field, 2, 2, 1, 2).unwrap();
        let e21 = FqMat::elementary(field, 2, 2, 2, 1).unwrap();
        let v = MatSubspace::from_basis(field, 2, 2, &[e12, e21]).unwrap();
        assert!(matches!(find_zero_row_index(&v), Err(Error::NoZeroRowIndex)));
    }

    #[test]
    fn cycle_witness_three_cycle() {
        let field = f(2);
        let gens = [
            FqMat::elementary(field, 3, 3, 2, 1).unwrap(),
            FqMat::elementary(field, 3, 3, 3, 2).unwrap(),
            FqMat::elementary(field, 3, 3, 1, 3).unwrap(),
        ];
        let v = MatSubspace::from_basis(field, 3, 3, &gens).unwrap();
        let w = build_cycle_witness(&v, &[2, 3, 1]).unwrap();
        assert_eq!(w.cycle, vec![1, 2, 3]);
        let expected = gens[0].add(&gens[1]).unwrap().add(&gens[2]).unwrap();
        assert_eq!(w.matrix, expected);
        assert!(w.matrix.spectrum_in_field().unwrap().contains(&1));
    }

    #[test]
    fn cycle_witness_fixed_point() {
        let field = f(2);
        let e11 = FqMat::elementary(field, 2, 2, 1, 1).unwrap();
        let e12 = FqMat::elementary(field, 2, 2, 1, 2).unwrap();
        let v = MatSubspace::from_basis(field, 2, 2, &[e11.clone(), e12]).unwrap();
        // f = (1→1, 2→1): the walk from 1 hits the fixed point immediately
        let w = build_cycle_witness(&v, &[1, 1]).unwrap();
        assert_eq!(w.cycle, vec![1]);
        assert_eq!(w.matrix, e11);
    }

    #[test]
    fn cycle_witness_two_cycle_from_offset_start_over_f3() {
        let field = f(3);
        let mut gens = Vec::new();
        for (i, j) in [(3, 1), (4, 2), (1, 3), (2, 4)] {
            gens.push(FqMat::elementary(field, 4, 4, i, j).unwrap());
        }
        let v = MatSubspace::from_basis(field, 4, 4, &gens).unwrap();
        // f = (1→3, 2→4, 3→1, 4→2); starting at 1 gives the cycle (1, 3)
        let w = build_cycle_witness(&v, &[3, 4, 1, 2]).unwrap();
        assert_eq!(w.cycle, vec![1, 3]);
        assert!(w.matrix.spectrum_in_field().unwrap().contains(&1));
    }

    #[test]
    fn cycle_witness_rejects_uncertified_f() {
        let field = f(2);
        let e12 = FqMat::elementary(field, 2, 2, 1, 2).unwrap();
        let v = MatSubspace::from_basis(field, 2, 2, &[e12]).unwrap();
        assert!(build_cycle_witness(&v, &[2, 1]).is_err());
    }

    #[test]
    fn gerstenhaber_bound_attained_by_strict_upper() {
        for n in 2..=5 {
            let t = strict_upper_triangular(f(2), n);
            assert_eq!(t.dim(), n * (n - 1) / 2);
            let verdict = check_gerstenhaber_bound(&t, BUDGET).unwrap();
            assert_eq!(verdict.status, Status::Pass);
        }
    }

    #[test]
    fn gerstenhaber_hypothesis_not_met_on_bad_space() {
        let v = MatSubspace::full_space(f(2), 2, 2);
        let verdict = check_gerstenhaber_bound(&v, BUDGET).unwrap();
        assert_eq!(verdict.status, Status::HypothesisNotMet);
    }

    #[test]
    fn block_decomposition_round_trip() {
        let field = f(3);
        let m = FqMat::from_rows(
            field,
            &[vec![1, 2, 0], vec![0, 1, 0], vec![2, 1, 0]],
        )
        .unwrap();
        let b = BlockDecomposition::from_last_column_constrained(&m).unwrap();
        assert_eq!(b.alpha, 0);
        assert_eq!(b.reassemble(), m);
        let bad = FqMat::from_rows(field, &[vec![1, 2, 1], vec![0, 1, 0], vec![2, 1, 0]]).unwrap();
        assert!(BlockDecomposition::from_last_column_constrained(&bad).is_err());
    }

    #[test]
    fn compression_requires_zero_last_row() {
        let field = f(2);
        let m = FqMat::from_rows(field, &[vec![1, 1], vec![0, 0]]).unwrap();
        let k = compress_last_row_zero(&m).unwrap();
        assert_eq!(k, FqMat::from_rows(field, &[vec![1]]).unwrap());
        let bad = FqMat::identity(field, 2);
        assert!(compress_last_row_zero(&bad).is_err());
    }

    #[test]
    fn triangularization_of_strict_upper_is_identity() {
        let t = strict_upper_triangular(f(2), 3);
        let out = triangularizing_permutation(&t, TriangularizeMode::Recursive).unwrap();
        assert!(verify_triangularizing(&t, &out.permutation).unwrap());
        let out = triangularizing_permutation(&t, TriangularizeMode::Exhaustive).unwrap();
        assert!(out.permutation.is_identity());
    }

    #[test]
    fn triangularization_of_zero_space() {
        let z = MatSubspace::zero_space(f(3), 3, 3);
        let out = triangularizing_permutation(&z, TriangularizeMode::Recursive).unwrap();
        assert!(out.permutation.is_identity());
        assert!(verify_triangularizing(&z, &out.permutation).unwrap());
    }

    #[test]
    fn triangularization_undoes_a_conjugation() {
        let t = strict_upper_triangular(f(2), 3);
        let p0 = Permutation::transposition(3, 0, 2);
        let conj = conjugate(&t, &p0).unwrap();
        for mode in [TriangularizeMode::Recursive, TriangularizeMode::Exhaustive] {
            let out = triangularizing_permutation(&conj, mode).unwrap();
            assert!(
                verify_triangularizing(&conj, &out.permutation).unwrap(),
                "{mode:?}"
            );
        }
    }

    #[test]
    fn gersten_induction_dimension_inequality() {
        // dim V <= (n-1) + dim W for the last-column-constrained W
        for q in [2u8, 3] {
            let field = f(q);
            let n = 4;
            let v = strict_upper_triangular(field, n);
            let mut coord = Vec::new();
            for i in 1..=n {
                for j in 1..=n {
                    if j < n || i == n {
                        coord.push(FqMat::elementary(field, n, n, i, j).unwrap());
                    }
                }
            }
            let coord_space = MatSubspace::from_basis(field, n, n, &coord).unwrap();
            let w = v.intersect(&coord_space).unwrap();
            assert!(v.dim() <= (n - 1) + w.dim());
        }
    }

    #[test]
    fn permutation_algebra() {
        let p = Permutation::from_images(vec![1, 2, 0]).unwrap();
        let q = p.inverse();
        assert!(p.compose(&q).is_identity());
        let field = f(2);
        let pm = p.matrix(field);
        let qm = q.matrix(field);
        assert_eq!(pm.matmul(&qm).unwrap(), FqMat::identity(field, 3));
        assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
    }
}
