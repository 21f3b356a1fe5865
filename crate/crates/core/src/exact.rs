//! Small exact linear algebra: rank over the rationals, strict-feasibility
//! of linear inequality systems by Fourier-Motzkin elimination, and rank of
//! bit matrices over the two-element field. The combinatorics feeds this
//! module systems of at most a few dozen rows.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Rank over the rationals of a matrix given by integer rows.
pub fn rank_int(rows: &[Vec<i64>]) -> usize {
    let rows: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    rank_rational(rows)
}

/// Rank over the rationals by fraction-destroying Gaussian elimination.
pub fn rank_rational(mut rows: Vec<Vec<BigRational>>) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let Some(pivot) = (row..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(row, pivot);
        let pivot_val = rows[row][col].clone();
        for r in row + 1..nrows {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &pivot_val;
            let pivot_row: Vec<BigRational> = rows[row][col..].to_vec();
            for (x, p) in rows[r][col..].iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
        row += 1;
        rank += 1;
    }
    rank
}

/// Affine dimension of a set of integer points: rank of differences against
/// the first point. The empty set has dimension 0 by convention here (it
/// never occurs for cell vertex sets).
pub fn affine_dim(points: &[Vec<i64>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = &points[0];
    let diffs: Vec<Vec<i64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    rank_int(&diffs)
}

/// Strict feasibility of `A x > 0` checked as feasibility of `A x >= 1`
/// (the constraint cone is invariant under positive scaling, so the two
/// agree). Coefficients are integers; elimination runs over rationals.
pub fn strictly_feasible(a: &[Vec<i64>]) -> bool {
    let rows: Vec<Vec<BigRational>> = a
        .iter()
        .map(|r| {
            // Store as [coeffs..., rhs] with the inequality `coeffs . x >= rhs`.
            let mut v: Vec<BigRational> = r
                .iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect();
            v.push(BigRational::from_integer(BigInt::from(1)));
            v
        })
        .collect();
    fourier_motzkin(rows)
}

fn normalize(row: &mut [BigRational]) {
    if let Some(first) = row.iter().find(|x| !x.is_zero()) {
        let scale = first.abs();
        for x in row.iter_mut() {
            *x /= &scale;
        }
    }
}

/// Feasibility of a system of rows `[c_1..c_k, rhs]` meaning `c . x >= rhs`.
fn fourier_motzkin(mut rows: Vec<Vec<BigRational>>) -> bool {
    if rows.is_empty() {
        return true;
    }
    let nvars = rows[0].len() - 1;
    for var in 0..nvars {
        let col = 0; // variables are always eliminated from the front
        let _ = var;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut zero = Vec::new();
        for row in rows {
            if row[col].is_zero() {
                zero.push(row[1..].to_vec());
            } else if row[col].is_positive() {
                pos.push(row);
            } else {
                neg.push(row);
            }
        }
        let mut next: Vec<Vec<BigRational>> = zero;
        for p in &pos {
            for q in &neg {
                // p: a x0 + u.y >= bp (a > 0)  =>  x0 >= (bp - u.y)/a
                // q: -c x0 + v.y >= bq (c > 0) =>  x0 <= (v.y - bq)/c
                // combined: c*u.y + a*v.y >= c*bp + a*bq
                let a = p[col].clone();
                let c = -q[col].clone();
                let mut row: Vec<BigRational> = Vec::with_capacity(p.len() - 1);
                for i in col + 1..p.len() {
                    row.push(&c * &p[i] + &a * &q[i]);
                }
                normalize(&mut row);
                next.push(row);
            }
        }
        next.sort();
        next.dedup();
        rows = next;
        if rows.is_empty() {
            return true;
        }
    }
    // Only rows of the form `0 >= rhs` remain.
    rows.iter().all(|r| !r[0].is_positive())
}

/// Rank over the two-element field of a sparse 0/1 matrix given as rows of
/// column indices. Plain elimination with first-live-column pivoting; rows
/// are kept as sorted index vectors and combined by symmetric difference.
/// Used when the dense bitset would not fit comfortably.
pub fn sparse_gf2_rank(rows: &[Vec<usize>]) -> usize {
    use std::collections::HashMap;
    // pivot column -> reduced row owning it
    let mut pivots: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut rank = 0;
    for row in rows {
        let mut current: Vec<usize> = row.clone();
        current.sort_unstable();
        current.dedup();
        while let Some(&lead) = current.first() {
            match pivots.get(&lead) {
                Some(pivot_row) => {
                    current = symmetric_difference(&current, pivot_row);
                }
                None => {
                    pivots.insert(lead, std::mem::take(&mut current));
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Dense bit matrix over the two-element field, rows packed into u64 words.
pub struct BitMatrix {
    rows: Vec<Vec<u64>>,
    ncols: usize,
}

impl BitMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        let words = ncols.div_ceil(64);
        Self {
            rows: vec![vec![0u64; words]; nrows],
            ncols,
        }
    }

    pub fn set(&mut self, r: usize, c: usize) {
        self.rows[r][c / 64] |= 1u64 << (c % 64);
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Rank over the two-element field by bitset Gaussian elimination.
    pub fn rank(mut self) -> usize {
        let mut rank = 0;
        let mut row = 0;
        let nrows = self.rows.len();
        for col in 0..self.ncols {
            let word = col / 64;
            let bit = 1u64 << (col % 64);
            let Some(pivot) = (row..nrows).find(|&r| self.rows[r][word] & bit != 0) else {
                continue;
            };
            self.rows.swap(row, pivot);
            for r in 0..nrows {
                if r != row && self.rows[r][word] & bit != 0 {
                    let (head, tail) = self.rows.split_at_mut(row.max(r));
                    let (a, b) = if r < row {
                        (&mut head[r], &tail[0])
                    } else {
                        (&mut tail[0], &head[row])
                    };
                    for (x, y) in a.iter_mut().zip(b.iter()) {
                        *x ^= *y;
                    }
                }
            }
            row += 1;
            rank += 1;
            if row == nrows {
                break;
            }
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_basics() {
        assert_eq!(rank_int(&[vec![1, 0], vec![0, 1]]), 2);
        assert_eq!(rank_int(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank_int(&[vec![0, 0]]), 0);
        // Q_23 = (R_3 - R_2)/4 for n=5: rank 2, not 3.
        assert_eq!(
            rank_int(&[vec![0, 1, -1, 0], vec![1, -3, 1, 1], vec![1, 1, -3, 1],]),
            2
        );
    }

    #[test]
    fn affine_dim_of_square() {
        let pts = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]];
        assert_eq!(affine_dim(&pts), 2);
        assert_eq!(affine_dim(&pts[..2]), 1);
        assert_eq!(affine_dim(&pts[..1]), 0);
    }

    #[test]
    fn feasibility() {
        // x > 0 and -x > 0: infeasible.
        assert!(!strictly_feasible(&[vec![1], vec![-1]]));
        // x > 0, y > 0, x - y > 0: feasible (x=2, y=1).
        assert!(strictly_feasible(&[vec![1, 0], vec![0, 1], vec![1, -1]]));
        // x > 0, y > 0, -x - y > 0: infeasible.
        assert!(!strictly_feasible(&[vec![1, 0], vec![0, 1], vec![-1, -1]]));
        // Three vectors at 120 degrees: all-positive infeasible.
        assert!(!strictly_feasible(&[vec![2, 0], vec![-1, 1], vec![-1, -1]]));
        // But any two of them are jointly positive somewhere.
        assert!(strictly_feasible(&[vec![2, 0], vec![-1, 1]]));
        // Redundant duplicates do not confuse the elimination.
        assert!(strictly_feasible(&[vec![1, 1], vec![1, 1], vec![2, 2]]));
    }

    #[test]
    fn feasibility_counts_chambers() {
        // The realizable sign patterns of a generic vector family are the
        // chambers of its dual arrangement; for m independent vectors in
        // m-space all 2^m patterns occur.
        let gens = [vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let mut count = 0;
        for mask in 0..8u32 {
            let rows: Vec<Vec<i64>> = gens
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let sign = if mask >> i & 1 == 1 { 1 } else { -1 };
                    g.iter().map(|&x| sign * x).collect()
                })
                .collect();
            if strictly_feasible(&rows) {
                count += 1;
            }
        }
        assert_eq!(count, 8);
    }

    #[test]
    fn planar_arrangement_has_two_m_chambers() {
        // m distinct lines through the origin in the plane cut it into 2m
        // chambers; the feasible sign patterns must match exactly.
        let gens = [vec![1i64, 0], vec![0, 1], vec![1, 1]];
        let mut feasible = Vec::new();
        for mask in 0..8u32 {
            let rows: Vec<Vec<i64>> = gens
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let sign = if mask >> i & 1 == 1 { 1 } else { -1 };
                    g.iter().map(|&x| sign * x).collect()
                })
                .collect();
            if strictly_feasible(&rows) {
                feasible.push(mask);
            }
        }
        assert_eq!(feasible.len(), 6);
        // (+,+,-) and (-,-,+) are the impossible patterns.
        assert!(!feasible.contains(&0b011));
        assert!(!feasible.contains(&0b100));
    }

    #[test]
    fn sparse_rank_matches_dense() {
        let cases: Vec<Vec<Vec<usize>>> = vec![
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
            vec![vec![0], vec![1], vec![2], vec![0, 1, 2]],
            vec![vec![], vec![3], vec![3]],
            vec![vec![0, 5], vec![5, 9], vec![0, 9], vec![2]],
        ];
        for rows in cases {
            let ncols = rows.iter().flatten().copied().max().map_or(1, |m| m + 1);
            let mut dense = BitMatrix::new(rows.len(), ncols);
            for (r, row) in rows.iter().enumerate() {
                for &c in row {
                    dense.set(r, c);
                }
            }
            assert_eq!(dense.rank(), sparse_gf2_rank(&rows));
        }
    }

    #[test]
    fn gf2_rank() {
        let mut m = BitMatrix::new(3, 3);
        m.set(0, 0);
        m.set(0, 1);
        m.set(1, 1);
        m.set(1, 2);
        m.set(2, 0);
        m.set(2, 2);
        // Rows sum to zero mod 2: rank 2.
        assert_eq!(m.rank(), 2);

        let mut id = BitMatrix::new(4, 4);
        for i in 0..4 {
            id.set(i, i);
        }
        assert_eq!(id.rank(), 4);

        let z = BitMatrix::new(5, 7);
        assert_eq!(z.rank(), 0);
    }
}
