//! Exactly-once enumeration of the d-dimensional subspaces of F_q^m by
//! reduced-echelon pivot patterns: one canonical basis matrix per subspace.

use itertools::Itertools;

use crate::ffmat::Fq;

/// Number of d-dimensional subspaces of an m-dimensional space over F_q,
/// by the recurrence [m,d] = [m-1,d-1] + q^d·[m-1,d] (exact, no division).
pub fn gaussian_binomial(m: usize, d: usize, q: u8) -> u128 {
    if d > m {
        return 0;
    }
    let q = q as u128;
    // table[j] = [i, j] while i sweeps 0..=m
    let mut table = vec![0u128; d + 1];
    table[0] = 1;
    for _ in 1..=m {
        for j in (1..=d).rev() {
            table[j] = table[j - 1] + q.pow(j as u32) * table[j];
        }
    }
    table[d]
}

/// A reduced-echelon shape: pivot columns plus the coordinates left free.
#[derive(Clone, Debug)]
pub struct EchelonPattern {
    pub pivots: Vec<usize>,
    /// (row, col) pairs right of the row's pivot and outside all pivot columns.
    pub free_cells: Vec<(usize, usize)>,
}

impl EchelonPattern {
    pub fn fillings(&self, q: u8) -> u128 {
        (q as u128)
            .checked_pow(self.free_cells.len() as u32)
            .unwrap_or(u128::MAX)
    }
}

pub fn echelon_patterns(m: usize, d: usize) -> Vec<EchelonPattern> {
    (0..m)
        .combinations(d)
        .map(|pivots| {
            let is_pivot = {
                let mut s = vec![false; m];
                for &p in &pivots {
                    s[p] = true;
                }
                s
            };
            let mut free_cells = Vec::new();
            for (row, &p) in pivots.iter().enumerate() {
                for col in (p + 1)..m {
                    if !is_pivot[col] {
                        free_cells.push((row, col));
                    }
                }
            }
            EchelonPattern { pivots, free_cells }
        })
        .collect()
}

/// Visit the canonical basis rows of every subspace with the given pivot
/// pattern. The visitor returns false to stop; the function reports whether
/// the enumeration ran to completion.
pub fn for_each_filling(
    field: Fq,
    m: usize,
    pattern: &EchelonPattern,
    mut visit: impl FnMut(&[Vec<u8>]) -> bool,
) -> bool {
    let d = pattern.pivots.len();
    let mut rows = vec![vec![0u8; m]; d];
    for (row, &p) in pattern.pivots.iter().enumerate() {
        rows[row][p] = 1;
    }
    let cells = &pattern.free_cells;
    let mut digits = vec![0u8; cells.len()];
    let qm1 = field.modulus() - 1;
    loop {
        if !visit(&rows) {
            return false;
        }
        let mut i = cells.len();
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            let (r, c) = cells[i];
            if digits[i] == qm1 {
                digits[i] = 0;
                rows[r][c] = 0;
            } else {
                digits[i] += 1;
                rows[r][c] = digits[i];
                break;
            }
        }
    }
}

/// Visit every d-dimensional subspace of F_q^m exactly once.
pub fn for_each_subspace(
    field: Fq,
    m: usize,
    d: usize,
    mut visit: impl FnMut(&[Vec<u8>]) -> bool,
) -> bool {
    for pattern in echelon_patterns(m, d) {
        if !for_each_filling(field, m, &pattern, &mut visit) {
            return false;
        }
    }
    true
}

/// Visit one representative per coset of the subspace with the given pivot
/// pattern: the unique representative supported on the non-pivot coordinates.
/// The zero vector (the linear coset) comes first.
pub fn for_each_coset_rep(
    field: Fq,
    m: usize,
    pivots: &[usize],
    mut visit: impl FnMut(&[u8]) -> bool,
) -> bool {
    let is_pivot = {
        let mut s = vec![false; m];
        for &p in pivots {
            s[p] = true;
        }
        s
    };
    let free: Vec<usize> = (0..m).filter(|&c| !is_pivot[c]).collect();
    let mut rep = vec![0u8; m];
    let mut digits = vec![0u8; free.len()];
    let qm1 = field.modulus() - 1;
    loop {
        if !visit(&rep) {
            return false;
        }
        let mut i = free.len();
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            let c = free[i];
            if digits[i] == qm1 {
                digits[i] = 0;
                rep[c] = 0;
            } else {
                digits[i] += 1;
                rep[c] = digits[i];
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffmat;

    fn f(q: u8) -> Fq {
        Fq::new(q).unwrap()
    }

    #[test]
    fn gaussian_binomial_small_values() {
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
        assert_eq!(gaussian_binomial(4, 1, 2), 15);
        assert_eq!(gaussian_binomial(4, 2, 3), 130);
        assert_eq!(gaussian_binomial(9, 4, 2), 3_309_747);
        assert_eq!(gaussian_binomial(3, 0, 2), 1);
        assert_eq!(gaussian_binomial(3, 3, 5), 1);
        assert_eq!(gaussian_binomial(2, 3, 2), 0);
    }

    #[test]
    fn gaussian_binomial_symmetry() {
        for q in [2u8, 3, 5] {
            for m in 0..=6 {
                for d in 0..=m {
                    assert_eq!(
                        gaussian_binomial(m, d, q),
                        gaussian_binomial(m, m - d, q),
                        "[{m},{d}]_{q}"
                    );
                }
            }
        }
    }

    #[test]
    fn enumeration_count_matches_closed_form() {
        for (m, d, q) in [(4, 2, 2u8), (5, 2, 2), (4, 2, 3), (5, 3, 2), (4, 1, 5)] {
            let mut count = 0u128;
            for_each_subspace(f(q), m, d, |_| {
                count += 1;
                true
            });
            assert_eq!(count, gaussian_binomial(m, d, q), "({m},{d},{q})");
        }
    }

    #[test]
    fn enumerated_bases_are_canonical_and_distinct() {
        let field = f(2);
        let mut seen = std::collections::HashSet::new();
        for_each_subspace(field, 4, 2, |rows| {
            // already reduced: canonicalizing changes nothing
            let mut copy: Vec<Vec<u8>> = rows.to_vec();
            ffmat::rref_in_place(field, &mut copy);
            assert_eq!(copy, rows.to_vec());
            assert!(seen.insert(copy));
            true
        });
        assert_eq!(seen.len(), 35);
    }

    #[test]
    fn coset_reps_count_and_distinctness() {
        // pivots {0, 2} in F_3^4: 3^2 = 9 reps supported on columns 1 and 3
        let mut seen = std::collections::HashSet::new();
        for_each_coset_rep(f(3), 4, &[0, 2], |rep| {
            assert_eq!(rep[0], 0);
            assert_eq!(rep[2], 0);
            seen.insert(rep.to_vec());
            true
        });
        assert_eq!(seen.len(), 9);
    }

    #[test]
    fn pattern_fillings_sum_to_gaussian_binomial() {
        for q in [2u8, 3] {
            let total: u128 = echelon_patterns(6, 3).iter().map(|p| p.fillings(q)).sum();
            assert_eq!(total, gaussian_binomial(6, 3, q));
        }
    }
}
