//! Affine matrix subspaces 𝒱 = M_0 + H: minimum rank, the h(n,p,k) bound and
//! its extremal block construction, the tightness construction for the
//! spanning condition, and the Flanders-type verdict with its (2,2,2)
//! exception.

use serde_json::json;

use crate::error::{Error, Result};
use crate::ffmat::{Fq, FqMat};
use crate::grassmann;
use crate::io;
use crate::strata::{self, RankScratch};
use crate::subspace::MatSubspace;
use crate::verdict::{Status, Verdict};

/// Cap for the cheap self-checks run inside constructors; the full budgeted
/// verification happens in the check operations.
const CONSTRUCT_VERIFY_CAP: u64 = 1 << 16;

/// A coset M_0 + H of a linear subspace H of Mat_{n,p}(F_q).
#[derive(Clone, Debug)]
pub struct AffineMatSubspace {
    point: FqMat,
    direction: MatSubspace,
}

impl AffineMatSubspace {
    pub fn new(point: FqMat, direction: MatSubspace) -> Result<Self> {
        if point.field() != direction.field() {
            return Err(Error::FieldMismatch {
                left: point.field().modulus(),
                right: direction.field().modulus(),
            });
        }
        if point.rows() != direction.rows() || point.cols() != direction.cols() {
            return Err(Error::ShapeMismatch {
                expected_rows: direction.rows(),
                expected_cols: direction.cols(),
                rows: point.rows(),
                cols: point.cols(),
            });
        }
        Ok(AffineMatSubspace { point, direction })
    }

    pub fn point(&self) -> &FqMat {
        &self.point
    }

    pub fn direction(&self) -> &MatSubspace {
        &self.direction
    }

    pub fn field(&self) -> Fq {
        self.direction.field()
    }

    pub fn rows(&self) -> usize {
        self.direction.rows()
    }

    pub fn cols(&self) -> usize {
        self.direction.cols()
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    pub fn codim(&self) -> usize {
        self.direction.codim()
    }

    pub fn element_count(&self) -> u128 {
        self.direction.element_count()
    }

    /// A coset is a linear subspace exactly when it contains zero.
    pub fn is_linear(&self) -> bool {
        self.direction
            .contains(&self.point)
            .expect("point matches ambient")
    }

    pub fn contains(&self, m: &FqMat) -> Result<bool> {
        let diff = m.sub(&self.point)?;
        self.direction.contains(&diff)
    }

    /// The linear span Vect(𝒱) = span(H ∪ {M_0}).
    pub fn linear_span(&self) -> MatSubspace {
        let mut mats = self.direction.basis_matrices();
        mats.push(self.point.clone());
        MatSubspace::from_basis(self.field(), self.rows(), self.cols(), &mats)
            .expect("shapes agree")
    }

    /// Visit every element vector of the coset; visitor returns false to stop.
    pub(crate) fn walk(&self, budget: u64, mut f: impl FnMut(&[u8]) -> bool) -> Result<bool> {
        let required = self.element_count();
        if required > budget as u128 {
            return Err(Error::BudgetExceeded { required, budget });
        }
        Ok(strata::walk_affine(
            self.field(),
            self.direction.basis_vectors(),
            self.point.as_vector(),
            &mut f,
        ))
    }
}

impl PartialEq for AffineMatSubspace {
    fn eq(&self, other: &Self) -> bool {
        if self.direction != other.direction {
            return false;
        }
        match self.point.sub(&other.point) {
            Ok(diff) => self.direction.contains(&diff).unwrap_or(false),
            Err(_) => false,
        }
    }
}

impl Eq for AffineMatSubspace {}

/// Minimum of rank over all q^dim elements of the coset.
pub fn min_rank(a: &AffineMatSubspace, budget: u64) -> Result<usize> {
    let (rows, cols) = (a.rows(), a.cols());
    let field = a.field();
    let mut best = rows.min(cols) + 1;
    let mut scratch = RankScratch::new(rows, cols);
    a.walk(budget, |w| {
        let r = strata::rank_of_vector(field, rows, cols, w, &mut scratch);
        if r < best {
            best = r;
        }
        best > 0
    })?;
    Ok(best)
}

/// Smallest rank bound k such that every element has rank ≥ k, with early
/// exit as soon as an element of rank < k appears.
fn min_rank_at_least(a: &AffineMatSubspace, k: usize, budget: u64) -> Result<bool> {
    let (rows, cols) = (a.rows(), a.cols());
    let field = a.field();
    let mut ok = true;
    let mut scratch = RankScratch::new(rows, cols);
    a.walk(budget, |w| {
        if strata::rank_of_vector(field, rows, cols, w, &mut scratch) < k {
            ok = false;
            false
        } else {
            true
        }
    })?;
    Ok(ok)
}

/// The extremal affine family: J_k + (strictly upper k×k block ⊕ the three
/// free blocks). Codimension C(k+1,2); every element has rank ≥ k, read off
/// its upper-left block.
pub fn extremal_affine(field: Fq, n: usize, p: usize, k: usize) -> Result<AffineMatSubspace> {
    if !(n >= p && p >= k && k >= 1) {
        return Err(Error::InvalidParameter(format!(
            "extremal_affine needs n >= p >= k >= 1, got n={n} p={p} k={k}"
        )));
    }
    let point = FqMat::j_k(field, n, p, k)?;
    let mut basis = Vec::new();
    for i in 1..=n {
        for j in 1..=p {
            let in_block = i <= k && j <= k;
            let strict_upper = in_block && j > i;
            if strict_upper || !in_block {
                basis.push(FqMat::elementary(field, n, p, i, j)?);
            }
        }
    }
    let direction = MatSubspace::from_basis(field, n, p, &basis)?;
    let coset = AffineMatSubspace::new(point, direction)?;
    assert_eq!(
        coset.codim(),
        k * (k + 1) / 2,
        "extremal affine codimension must be C(k+1,2)"
    );
    if coset.element_count() <= CONSTRUCT_VERIFY_CAP as u128 {
        assert!(
            min_rank_at_least(&coset, k, CONSTRUCT_VERIFY_CAP)?,
            "every element of the extremal affine family must have rank >= {k}"
        );
    }
    Ok(coset)
}

/// A subspace of codimension C(r+2,2) − 1 that is not spanned by its rank-r
/// matrices: the linear span of the extremal affine family at k = r + 1.
pub fn unspanned_subspace(field: Fq, n: usize, p: usize, r: usize) -> Result<MatSubspace> {
    if !(n >= p && p >= r + 1 && r >= 1) {
        return Err(Error::InvalidParameter(format!(
            "unspanned_subspace needs n >= p >= r+1 and r >= 1, got n={n} p={p} r={r}"
        )));
    }
    let coset = extremal_affine(field, n, p, r + 1)?;
    let span = coset.linear_span();
    assert_eq!(
        span.codim(),
        (r + 2) * (r + 1) / 2 - 1,
        "adjoining the point drops the codimension by exactly one"
    );
    if span.element_count() <= CONSTRUCT_VERIFY_CAP as u128 {
        let rank_span = strata::span_of_rank(&span, r, CONSTRUCT_VERIFY_CAP)?;
        assert!(
            rank_span.dim() < span.dim(),
            "rank-{r} elements must span a proper subspace"
        );
    }
    Ok(span)
}

/// Whether the codimension C(r+2,2)−1 of the construction is below n, the
/// regime where it contradicts no spanning theorem. Callers may warn otherwise.
pub fn unspanned_regime_ok(n: usize, r: usize) -> bool {
    (r + 2) * (r + 1) / 2 - 1 < n
}

/// Flanders-type check: a coset of n×p matrices (n ≥ p) with no rank-p
/// element has codim ≥ n; at codim = n it is linear unless (n,p,q) = (2,2,2).
pub fn check_flanders(a: &AffineMatSubspace, budget: u64) -> Result<Verdict> {
    let (n, p) = (a.rows(), a.cols());
    if n < p {
        return Err(Error::InvalidParameter(format!(
            "check requires n >= p, got {n}x{p}"
        )));
    }
    let q = a.field().modulus();
    let mut verdict = Verdict::new("check_flanders", Status::Pass)
        .with_param("n", n)
        .with_param("p", p)
        .with_param("q", q)
        .with_param("codim", a.codim())
        .with_param("is_linear", a.is_linear());

    let mut found_rank_p = false;
    {
        let field = a.field();
        let mut scratch = RankScratch::new(n, p);
        a.walk(budget, |w| {
            if strata::rank_of_vector(field, n, p, w, &mut scratch) == p {
                found_rank_p = true;
                false
            } else {
                true
            }
        })?;
    }

    if found_rank_p {
        verdict.status = Status::Vacuous;
        return Ok(verdict);
    }

    let exception = n == 2 && p == 2 && q == 2;
    verdict.status = if a.codim() < n {
        Status::Fail // counterexample to the codimension bound
    } else if a.codim() == n && !a.is_linear() {
        if exception {
            Status::ExceptionRegime
        } else {
            Status::Fail // counterexample to the equality clause
        }
    } else {
        Status::Pass
    };
    if verdict.status == Status::Fail {
        verdict = verdict.with_witness(json!({
            "affine": io::affine_to_value(a),
            "violated": if a.codim() < n {
                format!("no rank-{p} element yet codim {} < n = {n}", a.codim())
            } else {
                "codim = n, not the exceptional field, yet the coset is not linear".to_string()
            },
        }));
    }
    Ok(verdict)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HBoundMode {
    /// Verify the lower bound: the extremal construction attains
    /// dim = np − C(k+1,2) with min rank ≥ k.
    Construct,
    /// Verify the upper bound: no affine subspace of dimension
    /// np − C(k+1,2) + 1 has min rank ≥ k, by complete scan.
    Exhaustive,
}

/// The h(n,p,k) bound: largest dimension of a coset all of whose elements
/// have rank ≥ k equals np − C(k+1,2).
pub fn check_h_bound(
    field: Fq,
    n: usize,
    p: usize,
    k: usize,
    mode: HBoundMode,
    budget: u64,
) -> Result<Verdict> {
    if !(n >= p && p >= k && k >= 1) {
        return Err(Error::InvalidParameter(format!(
            "h(n,p,k) needs n >= p >= k >= 1, got n={n} p={p} k={k}"
        )));
    }
    let q = field.modulus();
    let h = n * p - k * (k + 1) / 2;
    let mut verdict = Verdict::new("check_h_bound", Status::Pass)
        .with_param("n", n)
        .with_param("p", p)
        .with_param("k", k)
        .with_param("q", q)
        .with_param("h", h)
        .with_param(
            "mode",
            match mode {
                HBoundMode::Construct => "CONSTRUCT",
                HBoundMode::Exhaustive => "EXHAUSTIVE",
            },
        );

    match mode {
        HBoundMode::Construct => {
            let coset = extremal_affine(field, n, p, k)?;
            let dim_ok = coset.dim() == h;
            let rank_ok = min_rank_at_least(&coset, k, budget)?;
            verdict.status = if dim_ok && rank_ok {
                Status::Pass
            } else {
                Status::Fail
            };
            verdict = verdict
                .with_param("dim", coset.dim())
                .with_param("min_rank_at_least_k", rank_ok);
            if verdict.status == Status::Fail {
                verdict = verdict.with_witness(json!({
                    "affine": io::affine_to_value(&coset),
                    "violated": "extremal construction does not attain the bound",
                }));
            }
        }
        HBoundMode::Exhaustive => {
            let ambient = n * p;
            let d_star = h + 1;
            if d_star > ambient {
                // nothing of this dimension exists; the upper bound is vacuous
                verdict.status = Status::Pass;
                verdict = verdict.with_count("subspaces_scanned", 0);
                return Ok(verdict);
            }
            let subspaces = grassmann::gaussian_binomial(ambient, d_star, q);
            // the budget gates the number of cosets the scan must visit
            let required = subspaces.saturating_mul((q as u128).pow((ambient - d_star) as u32));
            if required > budget as u128 {
                return Err(Error::BudgetExceeded { required, budget });
            }

            let mut subspace_count = 0u64;
            let mut coset_count = 0u64;
            let mut violation: Option<serde_json::Value> = None;
            let mut scratch = RankScratch::new(n, p);
            for pattern in grassmann::echelon_patterns(ambient, d_star) {
                let done = grassmann::for_each_filling(field, ambient, &pattern, |rows| {
                    subspace_count += 1;
                    let basis: Vec<Vec<u8>> = rows.to_vec();
                    grassmann::for_each_coset_rep(field, ambient, &pattern.pivots, |rep| {
                        coset_count += 1;
                        let mut all_high = true;
                        strata::walk_affine(field, &basis, rep, &mut |w: &[u8]| {
                            if strata::rank_of_vector(field, n, p, w, &mut scratch) < k {
                                all_high = false;
                                false
                            } else {
                                true
                            }
                        });
                        if all_high {
                            let dir = MatSubspace::from_vectors(field, n, p, basis.clone());
                            let point = FqMat::from_vector(field, n, p, rep).expect("valid rep");
                            let coset =
                                AffineMatSubspace::new(point, dir).expect("shapes agree");
                            violation = Some(io::affine_to_value(&coset));
                            false
                        } else {
                            true
                        }
                    })
                });
                if !done {
                    break;
                }
            }

            if violation.is_none() {
                let expected_cosets = subspaces
                    .saturating_mul((q as u128).pow((ambient - d_star) as u32));
                assert_eq!(subspace_count as u128, subspaces);
                assert_eq!(coset_count as u128, expected_cosets);
            }
            verdict = verdict
                .with_count("subspaces_scanned", subspace_count)
                .with_count("cosets_scanned", coset_count)
                .with_param("scan_dim", d_star);
            verdict.status = match violation {
                Some(w) => {
                    verdict = verdict.with_witness(json!({
                        "affine": w,
                        "violated": format!("a dim-{d_star} coset with min rank >= {k} exists"),
                    }));
                    Status::Fail
                }
                None => Status::Pass,
            };
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace;

    fn f(q: u8) -> Fq {
        Fq::new(q).unwrap()
    }

    const BUDGET: u64 = 1 << 24;

    #[test]
    fn min_rank_of_linear_subspace_is_zero() {
        let a = AffineMatSubspace::new(
            FqMat::zero(f(2), 2, 2),
            subspace::upper_triangular(f(2), 2),
        )
        .unwrap();
        assert_eq!(min_rank(&a, BUDGET).unwrap(), 0);
    }

    #[test]
    fn min_rank_of_singleton_jk() {
        let jk = FqMat::j_k(f(3), 3, 2, 2).unwrap();
        let a = AffineMatSubspace::new(jk, MatSubspace::zero_space(f(3), 3, 2)).unwrap();
        assert_eq!(min_rank(&a, BUDGET).unwrap(), 2);
    }

    #[test]
    fn extremal_2_2_2_over_f2() {
        let coset = extremal_affine(f(2), 2, 2, 2).unwrap();
        assert_eq!(coset.dim(), 1);
        assert_eq!(coset.codim(), 3);
        assert_eq!(min_rank(&coset, BUDGET).unwrap(), 2);
        let identity = FqMat::identity(f(2), 2);
        let unipotent = FqMat::from_rows(f(2), &[vec![1, 1], vec![0, 1]]).unwrap();
        assert!(coset.contains(&identity).unwrap());
        assert!(coset.contains(&unipotent).unwrap());
        assert_eq!(coset.element_count(), 2);
    }

    #[test]
    fn extremal_3_3_2_over_f2() {
        let coset = extremal_affine(f(2), 3, 3, 2).unwrap();
        assert_eq!(coset.codim(), 3);
        assert_eq!(coset.dim(), 6);
        assert_eq!(min_rank(&coset, BUDGET).unwrap(), 2);
    }

    #[test]
    fn extremal_k1_is_affine_hyperplane() {
        for (n, p) in [(2, 2), (3, 2), (4, 3)] {
            let coset = extremal_affine(f(3), n, p, 1).unwrap();
            assert_eq!(coset.codim(), 1);
            assert_eq!(min_rank(&coset, BUDGET).unwrap(), 1);
        }
    }

    #[test]
    fn extremal_rejects_bad_dims() {
        assert!(extremal_affine(f(2), 2, 3, 1).is_err());
        assert!(extremal_affine(f(2), 3, 2, 0).is_err());
        assert!(extremal_affine(f(2), 3, 2, 3).is_err());
    }

    #[test]
    fn unspanned_3_3_1_shape() {
        let v = unspanned_subspace(f(2), 3, 3, 1).unwrap();
        assert_eq!(v.codim(), 2);
        assert_eq!(v.dim(), 7);
        let span = strata::span_of_rank(&v, 1, BUDGET).unwrap();
        assert!(span.dim() < v.dim());
        assert!(span.is_subspace_of(&v).unwrap());
    }

    #[test]
    fn unspanned_codim_is_one_less_than_extremal() {
        for (n, p, r) in [(3, 3, 1), (4, 4, 1), (4, 3, 1)] {
            let v = unspanned_subspace(f(2), n, p, r).unwrap();
            let coset = extremal_affine(f(2), n, p, r + 1).unwrap();
            assert_eq!(v.codim() + 1, coset.codim());
        }
    }

    #[test]
    fn unspanned_rank_le_r_elements_lie_in_direction() {
        let r = 1;
        let v = unspanned_subspace(f(2), 3, 3, r).unwrap();
        let h = extremal_affine(f(2), 3, 3, r + 1).unwrap().direction().clone();
        for m in strata::enumerate(&v, BUDGET).unwrap() {
            if m.rank() <= r {
                assert!(h.contains(&m).unwrap());
            }
        }
    }

    #[test]
    fn flanders_exception_coset() {
        // E_{1,2} + span{E_{1,1}, E_{1,2} + E_{2,1}} over F_2: codim 2,
        // no rank-2 element, not linear
        let field = f(2);
        let e12 = FqMat::elementary(field, 2, 2, 1, 2).unwrap();
        let e11 = FqMat::elementary(field, 2, 2, 1, 1).unwrap();
        let mixed = FqMat::from_rows(field, &[vec![0, 1], vec![1, 0]]).unwrap();
        let dir = MatSubspace::from_basis(field, 2, 2, &[e11, mixed]).unwrap();
        let coset = AffineMatSubspace::new(e12, dir).unwrap();
        assert!(!coset.is_linear());
        assert_eq!(min_rank(&coset, BUDGET).unwrap(), 1);
        let verdict = check_flanders(&coset, BUDGET).unwrap();
        assert_eq!(verdict.status, Status::ExceptionRegime);
    }

    #[test]
    fn flanders_on_high_codim_linear_space() {
        // matrices supported on the (1,1) entry inside Mat_{3,2}: codim 5 >= 3
        let field = f(2);
        let e11 = FqMat::elementary(field, 3, 2, 1, 1).unwrap();
        let dir = MatSubspace::from_basis(field, 3, 2, &[e11]).unwrap();
        let coset = AffineMatSubspace::new(FqMat::zero(field, 3, 2), dir).unwrap();
        let verdict = check_flanders(&coset, BUDGET).unwrap();
        assert_eq!(verdict.status, Status::Pass);
    }

    #[test]
    fn flanders_vacuous_with_full_rank_element() {
        let coset = extremal_affine(f(2), 3, 2, 2).unwrap();
        let verdict = check_flanders(&coset, BUDGET).unwrap();
        assert_eq!(verdict.status, Status::Vacuous);
    }

    #[test]
    fn h_bound_construct_for_small_shapes() {
        for (n, p, k) in [(2, 2, 1), (2, 2, 2), (3, 2, 2), (3, 3, 2)] {
            for q in [2u8, 3] {
                let verdict =
                    check_h_bound(f(q), n, p, k, HBoundMode::Construct, BUDGET).unwrap();
                assert_eq!(verdict.status, Status::Pass, "({n},{p},{k},{q})");
            }
        }
    }

    #[test]
    fn h_bound_exhaustive_2_2_2() {
        let verdict = check_h_bound(f(2), 2, 2, 2, HBoundMode::Exhaustive, BUDGET).unwrap();
        assert_eq!(verdict.status, Status::Pass);
        assert_eq!(verdict.counts["subspaces_scanned"], 35);
        assert_eq!(verdict.counts["cosets_scanned"], 140);
    }

    #[test]
    fn affine_equality_is_coset_equality() {
        let field = f(2);
        let dir = subspace::upper_triangular(field, 2);
        let a = AffineMatSubspace::new(FqMat::identity(field, 2), dir.clone()).unwrap();
        // identity + E_{1,2} is another representative of the same coset
        let other_point = FqMat::from_rows(field, &[vec![1, 1], vec![0, 1]]).unwrap();
        let b = AffineMatSubspace::new(other_point, dir.clone()).unwrap();
        assert_eq!(a, b);
        let c = AffineMatSubspace::new(
            FqMat::elementary(field, 2, 2, 2, 1).unwrap(),
            dir,
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn linear_iff_contains_zero() {
        let field = f(3);
        let dir = subspace::strict_upper_triangular(field, 2);
        let linear = AffineMatSubspace::new(
            FqMat::elementary(field, 2, 2, 1, 2).unwrap(),
            dir.clone(),
        )
        .unwrap();
        assert!(linear.is_linear());
        let shifted =
            AffineMatSubspace::new(FqMat::elementary(field, 2, 2, 1, 1).unwrap(), dir).unwrap();
        assert!(!shifted.is_linear());
    }
}
