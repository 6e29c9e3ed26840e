//! Enumeration of the q^dim elements of a subspace, rank profiles, spans of
//! fixed-rank strata, and the spanning / linear-combination checks built on
//! them.
//!
//! Enumeration order is the base-q odometer over coefficients against the
//! canonical basis (first basis vector most significant), so two runs over the
//! same subspace produce identical streams.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::ffmat::{self, Fq, FqMat};
use crate::io;
use crate::subspace::MatSubspace;
use crate::verdict::{Status, Verdict};

/// Multiset of ranks over all elements of a finite subspace.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RankProfile {
    counts: Vec<u64>,
}

impl RankProfile {
    pub fn count(&self, r: usize) -> u64 {
        self.counts.get(r).copied().unwrap_or(0)
    }

    pub fn max_rank(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn to_map(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .enumerate()
            .map(|(r, &c)| (r.to_string(), c))
            .collect()
    }
}

fn budget_check(v: &MatSubspace, budget: u64) -> Result<u128> {
    let required = v.element_count();
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(required)
}

/// Iterator over all elements of a subspace in deterministic odometer order.
pub struct ElementIter {
    field: Fq,
    rows: usize,
    cols: usize,
    basis: Vec<Vec<u8>>,
    digits: Vec<u8>,
    current: Vec<u8>,
    exhausted: bool,
}

impl Iterator for ElementIter {
    type Item = FqMat;

    fn next(&mut self) -> Option<FqMat> {
        if self.exhausted {
            return None;
        }
        let out = FqMat::from_vector(self.field, self.rows, self.cols, &self.current)
            .expect("valid element vector");
        let qm1 = self.field.modulus() - 1;
        let mut i = self.basis.len();
        loop {
            if i == 0 {
                self.exhausted = true;
                break;
            }
            i -= 1;
            ffmat::vec_add_scaled(self.field, &mut self.current, &self.basis[i], 1);
            if self.digits[i] == qm1 {
                self.digits[i] = 0;
            } else {
                self.digits[i] += 1;
                break;
            }
        }
        Some(out)
    }
}

/// Yields each element of V exactly once; errors when q^dim exceeds the budget.
pub fn enumerate(v: &MatSubspace, budget: u64) -> Result<ElementIter> {
    budget_check(v, budget)?;
    Ok(ElementIter {
        field: v.field(),
        rows: v.rows(),
        cols: v.cols(),
        basis: v.basis_vectors().to_vec(),
        digits: vec![0; v.dim()],
        current: vec![0; v.ambient_dim()],
        exhausted: false,
    })
}

/// Visit every element vector exactly once, starting from `start` (the chunk
/// offset) and running the odometer over `basis`. The visitor returns false to
/// stop early; returns whether the walk ran to completion.
fn walk_vectors(
    field: Fq,
    basis: &[Vec<u8>],
    start: &[u8],
    mut visit: impl FnMut(&[u8]) -> bool,
) -> bool {
    let mut current = start.to_vec();
    let mut digits = vec![0u8; basis.len()];
    let qm1 = field.modulus() - 1;
    loop {
        if !visit(&current) {
            return false;
        }
        let mut i = basis.len();
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            ffmat::vec_add_scaled(field, &mut current, &basis[i], 1);
            if digits[i] == qm1 {
                digits[i] = 0;
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
}

/// Walk a coset: the odometer over `basis` offset by `start`.
pub(crate) fn walk_affine(
    field: Fq,
    basis: &[Vec<u8>],
    start: &[u8],
    visit: &mut dyn FnMut(&[u8]) -> bool,
) -> bool {
    walk_vectors(field, basis, start, |w| visit(w))
}

/// Visit every element exactly once in full-period stride order: coefficient
/// tuples of t·g mod q^d for t = 0, 1, …, with g coprime to q. Unlike the
/// odometer, a short prefix already mixes every basis direction, so scans
/// that may stop once a span fills up stop after a few hundred elements
/// instead of a q-th of the space.
fn walk_vectors_strided(
    field: Fq,
    ambient: usize,
    basis: &[Vec<u8>],
    mut visit: impl FnMut(&[u8]) -> bool,
) -> bool {
    let d = basis.len();
    let q = field.modulus();
    let total = (q as u128).pow(d as u32);
    debug_assert!(total <= u64::MAX as u128);
    let total = total as u64;
    // a fixed generator around 5/8 of the period, kept away from multiples of q
    let mut stride = ((total as u128 * 5) / 8) as u64;
    if stride == 0 {
        stride = 1;
    }
    while stride % q as u64 == 0 {
        stride -= 1;
    }
    let mut stride_digits = vec![0u8; d];
    {
        let mut rem = stride;
        for i in (0..d).rev() {
            stride_digits[i] = (rem % q as u64) as u8;
            rem /= q as u64;
        }
    }
    let mut digits = vec![0u8; d];
    let mut current = vec![0u8; ambient];
    for _ in 0..total {
        if !visit(&current) {
            return false;
        }
        // digits += stride_digits with carry, dropping the final carry;
        // apply each digit's change to the running element
        let mut carry = 0u8;
        for i in (0..d).rev() {
            let s = digits[i] + stride_digits[i] + carry;
            let (new, c) = if s >= q { (s - q, 1) } else { (s, 0) };
            carry = c;
            let delta = field.sub(new, digits[i]);
            if delta != 0 {
                ffmat::vec_add_scaled(field, &mut current, &basis[i], delta);
            }
            digits[i] = new;
        }
    }
    true
}

/// Scratch buffers for repeated rank computations without allocation.
pub(crate) struct RankScratch {
    bytes: Vec<u8>,
    words: Vec<u64>,
}

impl RankScratch {
    pub(crate) fn new(rows: usize, cols: usize) -> Self {
        RankScratch {
            bytes: vec![0; rows * cols],
            words: vec![0; rows],
        }
    }
}

#[inline]
pub(crate) fn rank_of_vector(
    field: Fq,
    rows: usize,
    cols: usize,
    v: &[u8],
    scratch: &mut RankScratch,
) -> usize {
    if field.modulus() == 2 && cols <= 64 {
        for i in 0..rows {
            scratch.words[i] = ffmat::pack_f2_row(&v[i * cols..(i + 1) * cols]);
        }
        ffmat::rank_f2_words(&mut scratch.words)
    } else {
        scratch.bytes.copy_from_slice(v);
        ffmat::rank_in_place(field, &mut scratch.bytes, rows, cols)
    }
}

/// Incremental span of inserted vectors, kept in reduced echelon form. When
/// generator tracking is on, each echelon row also records its expression in
/// the inserted generators so explicit linear combinations can be read off.
pub(crate) struct SpanTracker {
    field: Fq,
    cap: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
    gens: Vec<Vec<u8>>,
    combos: Vec<Vec<u8>>,
    track_gens: bool,
}

impl SpanTracker {
    pub(crate) fn new(field: Fq, cap: usize, track_gens: bool) -> Self {
        SpanTracker {
            field,
            cap,
            rows: Vec::new(),
            pivots: Vec::new(),
            gens: Vec::new(),
            combos: Vec::new(),
            track_gens,
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.rows.len()
    }

    /// True once the span has reached its cap (the dimension of the subspace
    /// the inserted vectors live in), so no insertion can grow it further.
    pub(crate) fn is_full(&self) -> bool {
        self.rows.len() == self.cap
    }

    /// Insert a vector; returns true when it enlarged the span.
    pub(crate) fn insert(&mut self, v: &[u8]) -> bool {
        let f = self.field;
        let mut w = v.to_vec();
        let mut combo = if self.track_gens {
            let mut c = vec![0u8; self.cap];
            if self.gens.len() < self.cap {
                c[self.gens.len()] = 1;
            }
            c
        } else {
            Vec::new()
        };
        for (i, (row, &piv)) in self.rows.iter().zip(&self.pivots).enumerate() {
            let c = w[piv];
            if c != 0 {
                ffmat::vec_add_scaled(f, &mut w, row, f.neg(c));
                if self.track_gens {
                    ffmat::vec_add_scaled(f, &mut combo, &self.combos[i], f.neg(c));
                }
            }
        }
        let Some(pivot) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        debug_assert!(self.rows.len() < self.cap, "span exceeded its cap");
        let inv = f.inv(w[pivot]);
        if inv != 1 {
            for x in w.iter_mut() {
                *x = f.mul(*x, inv);
            }
            if self.track_gens {
                for x in combo.iter_mut() {
                    *x = f.mul(*x, inv);
                }
            }
        }
        // back-eliminate the new pivot from existing rows
        for i in 0..self.rows.len() {
            let c = self.rows[i][pivot];
            if c != 0 {
                let neg = f.neg(c);
                let (w_ref, combo_ref) = (&w, &combo);
                ffmat::vec_add_scaled(f, &mut self.rows[i], w_ref, neg);
                if self.track_gens {
                    ffmat::vec_add_scaled(f, &mut self.combos[i], combo_ref, neg);
                }
            }
        }
        let at = self
            .pivots
            .iter()
            .position(|&p| p > pivot)
            .unwrap_or(self.pivots.len());
        self.rows.insert(at, w);
        self.pivots.insert(at, pivot);
        if self.track_gens {
            self.combos.insert(at, combo);
            self.gens.push(v.to_vec());
        }
        true
    }

    /// Express v as coefficients over the recorded generators.
    pub(crate) fn express(&self, v: &[u8]) -> Option<Vec<u8>> {
        assert!(self.track_gens);
        let f = self.field;
        let mut w = v.to_vec();
        let mut combo = vec![0u8; self.cap];
        for (i, (row, &piv)) in self.rows.iter().zip(&self.pivots).enumerate() {
            let c = w[piv];
            if c != 0 {
                ffmat::vec_add_scaled(f, &mut w, row, f.neg(c));
                ffmat::vec_add_scaled(f, &mut combo, &self.combos[i], c);
            }
        }
        if w.iter().all(|&x| x == 0) {
            combo.truncate(self.gens.len());
            Some(combo)
        } else {
            None
        }
    }

    pub(crate) fn generators(&self) -> &[Vec<u8>] {
        &self.gens
    }

    pub(crate) fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub(crate) fn to_subspace(&self, field: Fq, rows: usize, cols: usize) -> MatSubspace {
        MatSubspace::from_vectors(field, rows, cols, self.rows.clone())
    }
}

/// What a stratum scan must establish before it may stop early.
#[derive(Clone, Default, Debug)]
pub struct ScanRequest {
    /// Ranks whose stratum span must be known exactly. The scan may stop once
    /// every one of these spans has reached the full subspace; otherwise it
    /// runs to completion (which also makes them exact).
    pub required_spans: Vec<usize>,
    /// Ranks whose nonemptiness must be decided.
    pub required_ranks: Vec<usize>,
    /// Record generators so certificates can be extracted.
    pub track_gens: bool,
    /// Never stop early; produces an exact rank profile.
    pub exact: bool,
}

impl ScanRequest {
    pub fn exact() -> Self {
        ScanRequest {
            exact: true,
            ..Default::default()
        }
    }

    pub fn spans(ranks: impl IntoIterator<Item = usize>) -> Self {
        ScanRequest {
            required_spans: ranks.into_iter().collect(),
            ..Default::default()
        }
    }
}

/// Result of a single pass over the elements of a subspace.
pub struct StratumScan {
    field: Fq,
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    trackers: Vec<SpanTracker>,
    /// True when the pass stopped early; counts are then partial and only the
    /// spans that reached the full subspace are exact.
    pub truncated: bool,
}

impl StratumScan {
    pub fn max_rank(&self) -> usize {
        self.counts.len() - 1
    }

    /// Exact profile; only available from an exact (non-truncated) scan.
    pub fn profile(&self) -> Option<RankProfile> {
        if self.truncated {
            None
        } else {
            Some(RankProfile {
                counts: self.counts.clone(),
            })
        }
    }

    pub fn span_is_exact(&self, r: usize) -> bool {
        // the rank-0 stratum is always {0}, known without scanning
        r == 0 || !self.truncated || self.trackers[r - 1].is_full()
    }

    /// Span of the rank-r stratum. Panics if the scan stopped early before
    /// this span was pinned down; request it in the ScanRequest.
    pub fn span_of_rank(&self, r: usize) -> MatSubspace {
        assert!(self.span_is_exact(r), "span of rank {r} not exact");
        if r == 0 {
            return MatSubspace::zero_space(self.field, self.rows, self.cols);
        }
        self.trackers[r - 1].to_subspace(self.field, self.rows, self.cols)
    }

    pub fn span_dim(&self, r: usize) -> usize {
        assert!(self.span_is_exact(r), "span of rank {r} not exact");
        if r == 0 {
            0
        } else {
            self.trackers[r - 1].dim()
        }
    }

    /// Whether the span of the rank-r stratum is the whole subspace.
    pub fn span_is_full(&self, r: usize) -> bool {
        assert!(self.span_is_exact(r), "span of rank {r} not exact");
        r >= 1 && self.trackers[r - 1].is_full()
    }

    /// True when a rank-r element was seen. Sound even on truncated scans
    /// (a positive count is a witness); only exact scans can refute existence.
    pub fn rank_seen(&self, r: usize) -> bool {
        self.counts[r] > 0
    }

    /// Number of elements the pass visited (all of them unless truncated).
    pub fn visited(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub(crate) fn tracker(&self, r: usize) -> &SpanTracker {
        &self.trackers[r - 1]
    }
}

/// Single pass over all elements of V: per-rank counts and stratum spans.
pub fn stratum_scan(v: &MatSubspace, request: &ScanRequest, budget: u64) -> Result<StratumScan> {
    budget_check(v, budget)?;
    let field = v.field();
    let (rows, cols) = (v.rows(), v.cols());
    let maxr = rows.min(cols);
    let mut trackers: Vec<SpanTracker> = (1..=maxr)
        .map(|_| SpanTracker::new(field, v.dim(), request.track_gens))
        .collect();
    let mut counts = vec![0u64; maxr + 1];
    let mut scratch = RankScratch::new(rows, cols);

    let may_stop_early =
        !request.exact && !(request.required_spans.is_empty() && request.required_ranks.is_empty());
    let goal_met = |trackers: &[SpanTracker], counts: &[u64]| -> bool {
        request
            .required_spans
            .iter()
            .all(|&r| r == 0 || trackers[r - 1].is_full())
            && request.required_ranks.iter().all(|&r| counts[r] > 0)
    };

    let mut step = |w: &[u8]| -> bool {
        let r = rank_of_vector(field, rows, cols, w, &mut scratch);
        counts[r] += 1;
        if r >= 1 && !trackers[r - 1].is_full() {
            trackers[r - 1].insert(w);
        }
        !(may_stop_early && goal_met(&trackers, &counts))
    };
    let completed = if may_stop_early {
        walk_vectors_strided(field, v.ambient_dim(), v.basis_vectors(), &mut step)
    } else {
        let start = vec![0u8; v.ambient_dim()];
        walk_vectors(field, v.basis_vectors(), &start, &mut step)
    };

    Ok(StratumScan {
        field,
        rows,
        cols,
        counts,
        trackers,
        truncated: !completed,
    })
}

/// Exact rank profile of V over all q^dim elements; parallel over coefficient
/// chunks, merged in fixed chunk order so results are scheduling-independent.
pub fn rank_profile(v: &MatSubspace, budget: u64) -> Result<RankProfile> {
    let total = budget_check(v, budget)?;
    let field = v.field();
    let (rows, cols) = (v.rows(), v.cols());
    let maxr = rows.min(cols);
    let basis = v.basis_vectors();

    // split the odometer on the leading digits when the space is large
    let q = field.modulus() as u128;
    let mut prefix_len = 0;
    let threads = rayon::current_num_threads().max(1) as u128;
    if total >= 1 << 14 {
        while prefix_len < v.dim() && q.pow(prefix_len as u32) < 4 * threads {
            prefix_len += 1;
        }
    }
    let chunk_count = q.pow(prefix_len as u32) as u64;
    let tail = &basis[prefix_len..];

    let chunk_counts: Vec<Vec<u64>> = (0..chunk_count)
        .into_par_iter()
        .map(|c| {
            let mut start = vec![0u8; v.ambient_dim()];
            let mut rem = c;
            for i in (0..prefix_len).rev() {
                let digit = (rem % q as u64) as u8;
                rem /= q as u64;
                ffmat::vec_add_scaled(field, &mut start, &basis[i], digit);
            }
            let mut counts = vec![0u64; maxr + 1];
            let mut scratch = RankScratch::new(rows, cols);
            walk_vectors(field, tail, &start, |w| {
                counts[rank_of_vector(field, rows, cols, w, &mut scratch)] += 1;
                true
            });
            counts
        })
        .collect();

    let mut counts = vec![0u64; maxr + 1];
    for c in chunk_counts {
        for (acc, x) in counts.iter_mut().zip(c) {
            *acc += x;
        }
    }
    Ok(RankProfile { counts })
}

/// Canonical span of { M ∈ V : rank M = r }; always a subspace of V.
pub fn span_of_rank(v: &MatSubspace, r: usize, budget: u64) -> Result<MatSubspace> {
    let maxr = v.rows().min(v.cols());
    if r > maxr {
        return Err(Error::RankOutOfRange { r, max: maxr });
    }
    let scan = stratum_scan(v, &ScanRequest::spans([r]), budget)?;
    Ok(scan.span_of_rank(r))
}

/// An explicit linear combination of rank-r elements for every canonical
/// basis element of the subspace they span.
#[derive(Clone, Debug)]
pub struct CertLine {
    pub target: FqMat,
    pub terms: Vec<(u8, FqMat)>,
}

#[derive(Clone, Debug)]
pub struct SpanCertificate {
    pub rank: usize,
    pub lines: Vec<CertLine>,
}

impl SpanCertificate {
    /// Re-check the certificate against the subspace: every generator has
    /// rank exactly `rank` and lies in V, every combination reproduces its
    /// target, and the targets are exactly the canonical basis of V.
    pub fn verify(&self, v: &MatSubspace) -> bool {
        let basis = v.basis_matrices();
        if basis.len() != self.lines.len() {
            return false;
        }
        for (line, expected) in self.lines.iter().zip(&basis) {
            if &line.target != expected {
                return false;
            }
            let mut acc = FqMat::zero(v.field(), v.rows(), v.cols());
            for (c, m) in &line.terms {
                if m.rank() != self.rank || !v.contains(m).unwrap_or(false) {
                    return false;
                }
                acc = acc.add(&m.scale(*c)).expect("shapes agree");
            }
            if &acc != expected {
                return false;
            }
        }
        true
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "rank": self.rank,
            "lines": self.lines.iter().map(|line| json!({
                "target": io::matrix_to_value(&line.target),
                "terms": line.terms.iter().map(|(c, m)| json!({
                    "coeff": c,
                    "element": io::matrix_to_value(m),
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Read a certificate off a generator-tracking scan whose rank-r span
/// reached the full subspace.
pub fn certificate_from_scan(v: &MatSubspace, scan: &StratumScan, r: usize) -> SpanCertificate {
    let field = v.field();
    let (rows, cols) = (v.rows(), v.cols());
    let tracker = scan.tracker(r);
    let gens: Vec<FqMat> = tracker
        .generators()
        .iter()
        .map(|g| FqMat::from_vector(field, rows, cols, g).expect("valid generator"))
        .collect();
    let lines = v
        .basis_matrices()
        .into_iter()
        .map(|target| {
            let combo = tracker
                .express(target.as_vector())
                .expect("basis element lies in the full span");
            let terms = combo
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (c, gens[i].clone()))
                .collect();
            CertLine { target, terms }
        })
        .collect();
    SpanCertificate { rank: r, lines }
}

/// Certificate that V is spanned by its rank-r elements, or None when it is not.
pub fn span_certificate(
    v: &MatSubspace,
    r: usize,
    budget: u64,
) -> Result<Option<SpanCertificate>> {
    let maxr = v.rows().min(v.cols());
    if r == 0 || r > maxr {
        return Err(Error::RankOutOfRange { r, max: maxr });
    }
    let request = ScanRequest {
        required_spans: vec![r],
        track_gens: true,
        ..Default::default()
    };
    let scan = stratum_scan(v, &request, budget)?;
    if scan.span_is_full(r) || (v.dim() == 0 && scan.span_dim(r) == 0) {
        Ok(Some(certificate_from_scan(v, &scan, r)))
    } else {
        Ok(None)
    }
}

fn hypothesis_codim_ok(v: &MatSubspace) -> bool {
    v.codim() < v.rows()
}

fn exception_regime(v: &MatSubspace, r: usize) -> bool {
    v.rows() == 2 && v.cols() == 2 && r == 2 && v.field().modulus() == 2 && v.codim() == 1
}

fn subspace_witness(v: &MatSubspace) -> serde_json::Value {
    io::subspace_to_value(v)
}

/// Search for a rank-s element of V outside the given span. Only called after
/// a full scan established one exists, so the walk terminates early.
fn find_stratum_element_outside(
    v: &MatSubspace,
    s: usize,
    span: &MatSubspace,
    budget: u64,
) -> Result<Option<FqMat>> {
    budget_check(v, budget)?;
    let field = v.field();
    let (rows, cols) = (v.rows(), v.cols());
    let mut scratch = RankScratch::new(rows, cols);
    let mut found = None;
    let start = vec![0u8; v.ambient_dim()];
    walk_vectors(field, v.basis_vectors(), &start, |w| {
        if rank_of_vector(field, rows, cols, w, &mut scratch) == s && !span.contains_vector(w) {
            found = Some(FqMat::from_vector(field, rows, cols, w).expect("valid"));
            false
        } else {
            true
        }
    });
    Ok(found)
}

/// Theorem check: every rank-s matrix of V is a linear combination of rank-r
/// matrices of V. Equivalent to span_s ⊆ span_r, which is what is verified.
pub fn check_lcinf(v: &MatSubspace, r: usize, s: usize, budget: u64) -> Result<Verdict> {
    let (n, p) = (v.rows(), v.cols());
    if n < p {
        return Err(Error::InvalidParameter(format!(
            "check requires n >= p, got {n}x{p}"
        )));
    }
    if r == 0 || r > p {
        return Err(Error::RankOutOfRange { r, max: p });
    }
    if s > r {
        return Err(Error::RankOutOfRange { r: s, max: r });
    }
    let mut verdict = Verdict::new("check_lcinf", Status::Pass)
        .with_param("n", n)
        .with_param("p", p)
        .with_param("q", v.field().modulus())
        .with_param("codim", v.codim())
        .with_param("r", r)
        .with_param("s", s);

    if exception_regime(v, r) {
        // the theorem explicitly excludes n=p=r=#K=2, codim 1
        verdict.status = Status::ExceptionRegime;
        let scan = stratum_scan(v, &ScanRequest::spans([r]), budget)?;
        let holds = if scan.span_is_full(r) {
            true
        } else {
            let span = scan.span_of_rank(r);
            s == 0 || find_stratum_element_outside(v, s, &span, budget)?.is_none()
        };
        verdict = verdict.with_param("conclusion_holds_anyway", holds);
        if !holds {
            let span = scan.span_of_rank(r);
            if let Some(el) = find_stratum_element_outside(v, s, &span, budget)? {
                verdict = verdict.with_witness(json!({
                    "subspace": subspace_witness(v),
                    "rank_r_span_dim": span.dim(),
                    "element_outside_span": io::matrix_to_value(&el),
                    "element_rank": s,
                }));
            }
        }
        return Ok(verdict);
    }

    let hypothesis = hypothesis_codim_ok(v);
    let scan = stratum_scan(v, &ScanRequest::spans([r]), budget)?;
    let holds = if scan.span_is_full(r) {
        true
    } else if s == 0 {
        true // the zero matrix is the empty combination
    } else {
        let span = scan.span_of_rank(r);
        // full pass happened, so the rank-s span is exact too
        scan.span_dim(s) == 0 || scan.span_of_rank(s).is_subspace_of(&span)?
    };

    verdict.status = match (hypothesis, holds) {
        (_, true) => Status::Pass,
        (true, false) => Status::Fail,
        (false, false) => Status::HypothesisNotMet,
    };
    if !holds {
        let span = scan.span_of_rank(r);
        let witness_el = find_stratum_element_outside(v, s, &span, budget)?;
        verdict = verdict.with_witness(json!({
            "subspace": subspace_witness(v),
            "violated": format!("rank-{s} element not a combination of rank-{r} elements"),
            "rank_r_span_dim": span.dim(),
            "element_outside_span": witness_el.map(|m| io::matrix_to_value(&m)),
        }));
    }
    Ok(verdict)
}

/// Theorem check: V contains a rank-r matrix.
pub fn check_exist(v: &MatSubspace, r: usize, budget: u64) -> Result<Verdict> {
    let (n, p) = (v.rows(), v.cols());
    if n < p {
        return Err(Error::InvalidParameter(format!(
            "check requires n >= p, got {n}x{p}"
        )));
    }
    if r == 0 || r > p {
        return Err(Error::RankOutOfRange { r, max: p });
    }
    let hypothesis = hypothesis_codim_ok(v);
    let request = ScanRequest {
        required_ranks: vec![r],
        ..Default::default()
    };
    let scan = stratum_scan(v, &request, budget)?;
    let holds = scan.rank_seen(r);
    let mut verdict = Verdict::new("check_exist", Status::Pass)
        .with_param("n", n)
        .with_param("p", p)
        .with_param("q", v.field().modulus())
        .with_param("codim", v.codim())
        .with_param("r", r);
    verdict.status = match (hypothesis, holds) {
        (_, true) => Status::Pass,
        (true, false) => Status::Fail,
        (false, false) => Status::HypothesisNotMet,
    };
    if !holds {
        verdict = verdict.with_witness(json!({
            "subspace": subspace_witness(v),
            "violated": format!("no rank-{r} element"),
        }));
    }
    Ok(verdict)
}

/// Theorem check: codim V ≤ C(r+2,2) − 2 implies V is spanned by its rank-r
/// matrices. Emits a span certificate on PASS.
pub fn check_condsuff(v: &MatSubspace, r: usize, budget: u64) -> Result<Verdict> {
    let (n, p) = (v.rows(), v.cols());
    if n < p {
        return Err(Error::InvalidParameter(format!(
            "check requires n >= p, got {n}x{p}"
        )));
    }
    if r == 0 || r >= p {
        return Err(Error::RankOutOfRange {
            r,
            max: p.saturating_sub(1),
        });
    }
    let codim_bound = (r + 2) * (r + 1) / 2 - 2;
    let hypothesis = hypothesis_codim_ok(v) && v.codim() <= codim_bound;

    let request = ScanRequest {
        required_spans: vec![r],
        track_gens: true,
        ..Default::default()
    };
    let scan = stratum_scan(v, &request, budget)?;
    let holds = scan.span_is_full(r) || v.dim() == 0;

    let mut verdict = Verdict::new("check_condsuff", Status::Pass)
        .with_param("n", n)
        .with_param("p", p)
        .with_param("q", v.field().modulus())
        .with_param("codim", v.codim())
        .with_param("codim_bound", codim_bound)
        .with_param("r", r);
    verdict.status = match (hypothesis, holds) {
        (_, true) => Status::Pass,
        (true, false) => Status::Fail,
        (false, false) => Status::HypothesisNotMet,
    };
    if holds {
        let cert = certificate_from_scan(v, &scan, r);
        debug_assert!(cert.verify(v));
        verdict = verdict.with_witness(json!({ "certificate": cert.to_json() }));
    } else {
        verdict = verdict.with_witness(json!({
            "subspace": subspace_witness(v),
            "violated": format!("span of rank-{r} elements has dim {} < {}", scan.span_dim(r), v.dim()),
        }));
    }
    Ok(verdict)
}

/// Theorem check: V is spanned by its rank-p matrices (p = column count).
pub fn check_genrangmax(v: &MatSubspace, budget: u64) -> Result<Verdict> {
    let (n, p) = (v.rows(), v.cols());
    if n < p {
        return Err(Error::InvalidParameter(format!(
            "check requires n >= p, got {n}x{p}"
        )));
    }
    let excluded_222 =
        n == 2 && p == 2 && v.field().modulus() == 2 && v.codim() >= n.saturating_sub(1);
    let hypothesis = hypothesis_codim_ok(v) && !excluded_222;

    let scan = stratum_scan(v, &ScanRequest::spans([p]), budget)?;
    let holds = scan.span_is_full(p) || v.dim() == 0;

    let mut verdict = Verdict::new("check_genrangmax", Status::Pass)
        .with_param("n", n)
        .with_param("p", p)
        .with_param("q", v.field().modulus())
        .with_param("codim", v.codim());
    verdict.status = match (hypothesis, holds) {
        (_, true) => Status::Pass,
        (true, false) => Status::Fail,
        (false, false) => Status::HypothesisNotMet,
    };
    if !holds {
        verdict = verdict.with_witness(json!({
            "subspace": subspace_witness(v),
            "violated": format!("span of rank-{p} elements has dim {} < {}", scan.span_dim(p), v.dim()),
        }));
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::{self, MatSubspace};

    fn f(q: u8) -> Fq {
        Fq::new(q).unwrap()
    }

    const BUDGET: u64 = 1 << 24;

    #[test]
    fn enumerate_zero_space() {
        let z = MatSubspace::zero_space(f(3), 2, 2);
        let elems: Vec<FqMat> = enumerate(&z, BUDGET).unwrap().collect();
        assert_eq!(elems.len(), 1);
        assert!(elems[0].is_zero());
    }

    #[test]
    fn enumerate_t2_plus_has_eight_elements() {
        let t = subspace::upper_triangular(f(2), 2);
        assert_eq!(enumerate(&t, BUDGET).unwrap().count(), 8);
    }

    #[test]
    fn enumerate_sl2_ranks() {
        let v = subspace::sl2_f2();
        let elems: Vec<FqMat> = enumerate(&v, BUDGET).unwrap().collect();
        assert_eq!(elems.len(), 8);
        // invertibles of sl_2(F_2): I, I+E12, I+E21 and the antidiagonal swap
        let rank2: Vec<&FqMat> = elems.iter().filter(|m| m.rank() == 2).collect();
        assert_eq!(rank2.len(), 4);
        let f2 = f(2);
        let swap = FqMat::from_rows(f2, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(rank2.contains(&&swap));
        assert!(rank2.contains(&&FqMat::identity(f2, 2)));
    }

    #[test]
    fn enumerate_respects_budget() {
        let v = MatSubspace::full_space(f(2), 3, 3);
        match enumerate(&v, 100) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert_eq!(required, 512);
                assert_eq!(budget, 100);
            }
            _ => panic!("expected budget error"),
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let v = subspace::sl2_f2();
        let a: Vec<FqMat> = enumerate(&v, BUDGET).unwrap().collect();
        let b: Vec<FqMat> = enumerate(&v, BUDGET).unwrap().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn profile_of_full_mat2_f2() {
        let v = MatSubspace::full_space(f(2), 2, 2);
        let p = rank_profile(&v, BUDGET).unwrap();
        assert_eq!(p.count(0), 1);
        assert_eq!(p.count(1), 9);
        assert_eq!(p.count(2), 6);
        assert_eq!(p.total(), 16);
    }

    #[test]
    fn profile_of_t2_plus() {
        let t = subspace::upper_triangular(f(2), 2);
        let p = rank_profile(&t, BUDGET).unwrap();
        assert_eq!(p.counts(), &[1, 5, 2]);
    }

    #[test]
    fn profile_of_zero_space() {
        let z = MatSubspace::zero_space(f(2), 2, 2);
        let p = rank_profile(&z, BUDGET).unwrap();
        assert_eq!(p.counts(), &[1, 0, 0]);
    }

    #[test]
    fn span_of_rank2_in_sl2_is_everything() {
        let v = subspace::sl2_f2();
        assert_eq!(span_of_rank(&v, 2, BUDGET).unwrap(), v);
    }

    #[test]
    fn span_of_rank2_in_t2_plus_is_proper() {
        let t = subspace::upper_triangular(f(2), 2);
        let span = span_of_rank(&t, 2, BUDGET).unwrap();
        assert_eq!(span.dim(), 2);
        assert!(span.is_subspace_of(&t).unwrap());
    }

    #[test]
    fn span_of_rank1_in_full_mat2_f3() {
        let v = MatSubspace::full_space(f(3), 2, 2);
        assert_eq!(span_of_rank(&v, 1, BUDGET).unwrap(), v);
    }

    #[test]
    fn lcinf_trivial_when_s_equals_r() {
        let t = subspace::upper_triangular(f(2), 3);
        let verdict = check_lcinf(&t, 2, 2, BUDGET).unwrap();
        assert_eq!(verdict.status, Status::Pass);
    }

    #[test]
    fn lcinf_exception_regime_on_t2_plus() {
        let t = subspace::upper_triangular(f(2), 2);
        let verdict = check_lcinf(&t, 2, 1, BUDGET).unwrap();
        assert_eq!(verdict.status, Status::ExceptionRegime);
        assert_eq!(
            verdict.params.get("conclusion_holds_anyway"),
            Some(&serde_json::Value::Bool(false))
        );
        // the witness pins an explicit rank-1 element outside the rank-2 span
        let el = verdict.witness.get("element_outside_span").unwrap();
        let m = io::matrix_from_value(el).unwrap();
        assert_eq!(m.rank(), 1);
        assert!(t.contains(&m).unwrap());
    }

    #[test]
    fn lcinf_exception_regime_on_sl2_still_spans() {
        let verdict = check_lcinf(&subspace::sl2_f2(), 2, 1, BUDGET).unwrap();
        assert_eq!(verdict.status, Status::ExceptionRegime);
        assert_eq!(
            verdict.params.get("conclusion_holds_anyway"),
            Some(&serde_json::Value::Bool(true))
        );
    }

    #[test]
    fn exist_on_full_space() {
        let v = MatSubspace::full_space(f(3), 3, 2);
        for r in 1..=2 {
            assert_eq!(check_exist(&v, r, BUDGET).unwrap().status, Status::Pass);
        }
    }

    #[test]
    fn exist_hypothesis_not_met_on_line() {
        // T_2^{++}(F_2) has dim 1, codim 3 >= n = 2 and no rank-2 element
        let t = subspace::strict_upper_triangular(f(2), 2);
        let verdict = check_exist(&t, 2, BUDGET).unwrap();
        assert_eq!(verdict.status, Status::HypothesisNotMet);
    }

    #[test]
    fn condsuff_full_mat3_rank1() {
        let v = MatSubspace::full_space(f(2), 3, 3);
        let verdict = check_condsuff(&v, 1, BUDGET).unwrap();
        assert_eq!(verdict.status, Status::Pass);
        assert!(verdict.witness.get("certificate").is_some());
    }

    #[test]
    fn condsuff_certificate_verifies() {
        let v = MatSubspace::full_space(f(3), 3, 2);
        let cert = span_certificate(&v, 1, BUDGET).unwrap().unwrap();
        assert!(cert.verify(&v));
        // a corrupted certificate must not verify
        let mut bad = cert.clone();
        bad.lines[0].terms.clear();
        assert!(!bad.verify(&v));
    }

    #[test]
    fn genrangmax_on_sl2_passes_despite_hypothesis() {
        let verdict = check_genrangmax(&subspace::sl2_f2(), BUDGET).unwrap();
        assert_eq!(verdict.status, Status::Pass);
    }

    #[test]
    fn genrangmax_on_t2_plus_reports_hypothesis() {
        let t = subspace::upper_triangular(f(2), 2);
        let verdict = check_genrangmax(&t, BUDGET).unwrap();
        assert_eq!(verdict.status, Status::HypothesisNotMet);
    }

    #[test]
    fn profile_total_matches_cardinality() {
        let t = subspace::strict_upper_triangular(f(3), 3);
        let p = rank_profile(&t, BUDGET).unwrap();
        assert_eq!(p.total() as u128, t.element_count());
    }

    #[test]
    fn spans_are_subspaces_of_source() {
        let v = subspace::upper_triangular(f(3), 2);
        for r in 0..=2 {
            let span = span_of_rank(&v, r, BUDGET).unwrap();
            assert!(span.is_subspace_of(&v).unwrap());
        }
    }
}
