//! Exact rank of small integer matrices.
//!
//! Full column rank is first tested modulo a prime above `2^30`; a full rank
//! reduction mod `p` proves full rank over the rationals. When the reduction
//! is rank deficient the answer is settled by fraction-free (Bareiss)
//! elimination, run in `i128` and restarted on `BigInt` if an intermediate
//! minor overflows.

use std::hash::{DefaultHasher, Hash, Hasher};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension { expected: cols, got: r.len() });
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    /// Builds an `rows × cols` matrix column by column.
    pub fn from_columns(rows: usize, columns: &[Vec<i64>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::Dimension { expected: rows, got: col.len() });
            }
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    fn row_vecs<T: From<i64>>(&self) -> Vec<Vec<T>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| T::from(self.get(i, j))).collect())
            .collect()
    }
}

/// True iff the rank over the rationals equals the number of columns.
pub fn is_full_column_rank(m: &IntMatrix) -> bool {
    if m.cols == 0 {
        return true;
    }
    if m.rows < m.cols {
        return false;
    }
    let p = pick_prime(m);
    if rank_mod_p(m, p) == m.cols {
        return true;
    }
    exact_rank(m) == m.cols
}

/// Rank over the rationals by fraction-free elimination.
pub fn exact_rank(m: &IntMatrix) -> usize {
    match bareiss_rank::<i128>(m.row_vecs()) {
        Some(r) => r,
        None => bareiss_rank::<BigInt>(m.row_vecs()).expect("BigInt elimination cannot overflow"),
    }
}

/// Rank over `GF(p)`; `p` must be prime and below `2^32`.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> usize {
    let pi = p as i64;
    let mut a: Vec<Vec<u64>> = (0..m.rows)
        .map(|i| (0..m.cols).map(|j| m.get(i, j).rem_euclid(pi) as u64).collect())
        .collect();
    let mut rank = 0;
    for col in 0..m.cols {
        let Some(piv) = (rank..m.rows).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = pow_mod(a[rank][col], p - 2, p);
        for j in col..m.cols {
            a[rank][j] = a[rank][j] * inv % p;
        }
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            let f = row[col];
            if f == 0 {
                continue;
            }
            for j in col..m.cols {
                row[j] = (row[j] + p - f * pivot_row[j] % p) % p;
            }
        }
        rank += 1;
        if rank == m.rows {
            break;
        }
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A prime in `(2^30, 2^31)` chosen from the matrix contents, so results are
/// reproducible without threading a generator through every rank call.
fn pick_prime(m: &IntMatrix) -> u64 {
    let mut h = DefaultHasher::new();
    m.hash(&mut h);
    let mut candidate = (1u64 << 30) + 1 + (h.finish() % (1 << 30)) | 1;
    loop {
        if candidate >= 1 << 31 {
            candidate = (1 << 30) + 1;
        }
        if is_prime(candidate) {
            return candidate;
        }
        candidate += 2;
    }
}

trait ExactInt: Clone + Zero + One + PartialEq {
    fn mul_sub_div(a: &Self, b: &Self, c: &Self, d: &Self, div: &Self) -> Option<Self>;
}

impl ExactInt for i128 {
    fn mul_sub_div(a: &i128, b: &i128, c: &i128, d: &i128, div: &i128) -> Option<i128> {
        let lhs = a.checked_mul(*b)?;
        let rhs = c.checked_mul(*d)?;
        Some(lhs.checked_sub(rhs)? / div)
    }
}

impl ExactInt for BigInt {
    fn mul_sub_div(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt, div: &BigInt) -> Option<BigInt> {
        Some((a * b - c * d) / div)
    }
}

/// Fraction-free row echelon reduction. Every stored entry is a minor of the
/// input, so the division by the previous pivot is exact. `None` on overflow.
fn bareiss_rank<T: ExactInt>(mut a: Vec<Vec<T>>) -> Option<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = T::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[col].clone();
        for row in rest.iter_mut() {
            let lead = row[col].clone();
            for j in col + 1..cols {
                row[j] = T::mul_sub_div(&pivot, &row[j], &lead, &pivot_row[j], &prev)?;
            }
            row[col] = T::zero();
        }
        prev = pivot;
        rank += 1;
    }
    Some(rank)
}
