//! Cut vectors, cut matrices and the elliptope.
//!
//! A cut vector is a `±1` vector; its outer product is a vertex of the set of
//! correlation matrices (the elliptope). All cut algebra is carried out on
//! small signed integers so it stays exact.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// Default absolute slack for floating-point elliptope membership.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// A vector with entries in `{+1, -1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct CutVector(Vec<i8>);

impl CutVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.is_empty() {
            return input("cut vector must have positive length");
        }
        if let Some(bad) = entries.iter().find(|&&e| e != 1 && e != -1) {
            return input(format!("cut vector entry {bad} is not +1 or -1"));
        }
        Ok(Self(entries))
    }

    /// Builds `c_S`: `+1` on the (1-based) indices in `subset`, `-1` elsewhere.
    pub fn from_subset(subset: &BTreeSet<usize>, n: usize) -> Result<Self> {
        if n == 0 {
            return input("dimension n must be positive");
        }
        if let Some(&i) = subset.iter().find(|&&i| i == 0 || i > n) {
            return input(format!("index {i} outside 1..={n}"));
        }
        Ok(Self((1..=n).map(|i| if subset.contains(&i) { 1 } else { -1 }).collect()))
    }

    /// The all-ones vector.
    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    /// Decodes the low `n` bits of `mask`: bit `i` set means entry `i` is `-1`.
    pub fn from_bits(mask: u64, n: usize) -> Result<Self> {
        if n == 0 || n > 64 {
            return input("bit-encoded cut vectors need 1 <= n <= 64");
        }
        Ok(Self((0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    /// Componentwise product `self ⊙ other`.
    pub fn hadamard(&self, other: &CutVector) -> Result<CutVector> {
        if self.len() != other.len() {
            return Err(Error::Dimension { expected: self.len(), got: other.len() });
        }
        Ok(CutVector(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect()))
    }

    pub fn negated(&self) -> CutVector {
        CutVector(self.0.iter().map(|e| -e).collect())
    }
}

impl std::ops::Neg for &CutVector {
    type Output = CutVector;

    fn neg(self) -> CutVector {
        self.negated()
    }
}

impl TryFrom<Vec<i8>> for CutVector {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CutVector> for Vec<i8> {
    fn from(c: CutVector) -> Self {
        c.0
    }
}

impl fmt::Display for CutVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            f.write_str(if *e > 0 { "+1" } else { "-1" })?;
        }
        Ok(())
    }
}

/// The rank-one matrix `c cᵗ`, a vertex of the elliptope.
///
/// Equality compares entries only, so `c` and `-c` give equal matrices.
#[derive(Clone, Debug)]
pub struct CutMatrix {
    source: CutVector,
    entries: Vec<i8>,
}

impl CutMatrix {
    pub fn new(c: &CutVector) -> Self {
        let n = c.len();
        let mut entries = Vec::with_capacity(n * n);
        for &a in c.entries() {
            entries.extend(c.entries().iter().map(|&b| a * b));
        }
        Self { source: c.clone(), entries }
    }

    pub fn dim(&self) -> usize {
        self.source.len()
    }

    pub fn source(&self) -> &CutVector {
        &self.source
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.dim() + j]
    }

    /// Exact elliptope membership: unit diagonal and symmetric. A cut matrix
    /// is rank one with eigenvalue `n`, so this is the whole check.
    pub fn is_correlation_exact(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| self.get(i, i) == 1)
            && (0..n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
            && (0..n).all(|i| {
                (0..n).all(|j| self.get(i, j) == self.source.get(i) * self.source.get(j))
            })
    }

    pub fn to_symmetric(&self) -> SymmetricMatrix {
        let n = self.dim();
        SymmetricMatrix::from_fn(n, |i, j| f64::from(self.get(i, j)))
    }
}

impl PartialEq for CutMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for CutMatrix {}

pub fn cut_matrix(c: &CutVector) -> CutMatrix {
    CutMatrix::new(c)
}

/// Dense real symmetric matrix. Writes are mirrored, so `(i, j)` and `(j, i)`
/// are always bit-identical.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Builds from the lower triangle of `f`; `f(i, j)` is only called for `j <= i`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..=i {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Accepts row-major data; rejects anything that is not exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::Dimension { expected: dim, got: r.len() });
        }
        for i in 0..dim {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return input(format!("matrix is not symmetric at ({i}, {j})"));
                }
            }
        }
        Ok(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim == 0 {
            return Vec::new();
        }
        let mut ev: Vec<f64> = self.to_dmatrix().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `trace(self · other)`.
    pub fn trace_product(&self, other: &SymmetricMatrix) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::Dimension { expected: self.dim, got: other.dim });
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    /// `cᵗ · self · c`.
    pub fn quadratic_form(&self, c: &[f64]) -> Result<f64> {
        if c.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: c.len() });
        }
        let n = self.dim;
        Ok((0..n)
            .map(|i| c[i] * (0..n).map(|j| self.get(i, j) * c[j]).sum::<f64>())
            .sum())
    }
}

/// Elliptope membership with absolute slack `tol` on the diagonal and on the
/// smallest eigenvalue.
pub fn is_correlation_matrix(x: &SymmetricMatrix, tol: f64) -> Result<bool> {
    if !x.is_finite() {
        return input("matrix has non-finite entries");
    }
    if !(tol >= 0.0) {
        return input("tolerance must be nonnegative");
    }
    if (0..x.dim()).any(|i| (x.get(i, i) - 1.0).abs() > tol) {
        return Ok(false);
    }
    Ok(x.min_eigenvalue() >= -tol)
}

/// A simplicial face of dimension `k` exists in the `n × n` elliptope iff
/// `k(k+1) <= 2(n-1)`.
pub fn simplicial_dim_feasible(k: u64, n: u64) -> bool {
    if n == 0 {
        return false;
    }
    k.checked_mul(k + 1)
        .map(|lhs| lhs <= 2 * (n - 1))
        .unwrap_or(false)
}

/// Strict lower triangle `(x21, x31, x32)` of a `3 × 3` symmetric matrix.
pub fn lower_triangle_embed(x: &SymmetricMatrix) -> Result<[f64; 3]> {
    if x.dim() != 3 {
        return Err(Error::Dimension { expected: 3, got: x.dim() });
    }
    Ok([x.get(1, 0), x.get(2, 0), x.get(2, 1)])
}
