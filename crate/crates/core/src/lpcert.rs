//! Laurent–Poljak certificate for simplicial faces spanned by cut matrices.
//!
//! For cut vectors `c_1, …, c_r` (r ≥ 2) the face `conv{c_i c_iᵗ}` is a
//! simplicial face of dimension `r - 1` whenever
//!
//! * `W = [c_1 … c_r]` has full column rank, and
//! * `Z = [𝟙 | c_i ⊙ c_j]` (pairs `i < j`, lexicographic) has full column rank.
//!
//! `Y = [𝟙 - c_i ⊙ c_j]` has full column rank exactly when `Z` does, provided
//! the `c_i` are first flipped so that their leading entry is `+1` (this only
//! picks a representative of each cut matrix). Then the first row of `Y` is
//! zero, `𝟙` is outside its column span, and `rank Z = rank [𝟙 | Y]` forces the
//! equivalence. Without the flip an antipodal pair `c, -c` gives `Y = [2·𝟙]`
//! of full rank while `Z = [𝟙 | -𝟙]` is singular. Both routes are computed on
//! every call and cross-checked.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cutgeom::CutVector;
use crate::error::{input, Error, Result};
use crate::rank::{is_full_column_rank, IntMatrix};

/// Lexicographic listing of the pairs `(i, j)`, `0 <= i < j < r`.
pub fn pair_order(r: usize) -> Vec<(usize, usize)> {
    (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateMatrices {
    pub w: IntMatrix,
    pub z: IntMatrix,
    pub y: IntMatrix,
    /// Pair `(i, j)` (0-based) behind column `k` of `Y` and column `k + 1` of `Z`.
    /// `Y` is built from the cut vectors flipped to start with `+1`.
    pub column_order: Vec<(usize, usize)>,
}

impl CertificateMatrices {
    pub fn r(&self) -> usize {
        self.w.cols()
    }

    pub fn n(&self) -> usize {
        self.w.rows()
    }

    /// Number of columns of `Z`, `1 + r(r-1)/2`.
    pub fn big_r(&self) -> usize {
        self.z.cols()
    }

    /// Number of columns of `Y`, `r(r-1)/2`.
    pub fn big_r_prime(&self) -> usize {
        self.y.cols()
    }
}

fn check_family(cuts: &[CutVector], min_r: usize) -> Result<usize> {
    if cuts.len() < min_r {
        return input(format!("need at least {min_r} cut vectors, got {}", cuts.len()));
    }
    let n = cuts[0].len();
    if let Some(c) = cuts.iter().find(|c| c.len() != n) {
        return Err(Error::Dimension { expected: n, got: c.len() });
    }
    Ok(n)
}

pub fn build_certificate_matrices(cuts: &[CutVector]) -> Result<CertificateMatrices> {
    let n = check_family(cuts, 2)?;
    let widen = |c: &CutVector| c.entries().iter().map(|&e| i64::from(e)).collect::<Vec<_>>();

    let w = IntMatrix::from_columns(n, &cuts.iter().map(widen).collect::<Vec<_>>())?;

    let column_order = pair_order(cuts.len());
    let products: Vec<Vec<i64>> = column_order
        .iter()
        .map(|&(i, j)| Ok(widen(&cuts[i].hadamard(&cuts[j])?)))
        .collect::<Result<_>>()?;

    let mut z_cols = Vec::with_capacity(products.len() + 1);
    z_cols.push(vec![1; n]);
    z_cols.extend(products.iter().cloned());
    let z = IntMatrix::from_columns(n, &z_cols)?;

    let signs: Vec<i64> = cuts.iter().map(|c| i64::from(c.get(0))).collect();
    let y_cols: Vec<Vec<i64>> = column_order
        .iter()
        .zip(&products)
        .map(|(&(i, j), col)| col.iter().map(|v| 1 - signs[i] * signs[j] * v).collect())
        .collect();
    let y = IntMatrix::from_columns(n, &y_cols)?;

    Ok(CertificateMatrices { w, z, y, column_order })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    CertifiedSimplicial,
    /// The sufficient condition failed. This does not mean the family
    /// fails to generate a face.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::CertifiedSimplicial => "CERTIFIED_SIMPLICIAL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub w_full_rank: bool,
    pub z_full_rank: bool,
    pub y_full_rank: bool,
    pub verdict: Verdict,
    /// `r - 1` when certified.
    pub face_dimension: Option<usize>,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::CertifiedSimplicial
    }
}

pub fn certify_matrices(m: &CertificateMatrices) -> Result<Certificate> {
    let w_full_rank = is_full_column_rank(&m.w);
    let z_full_rank = is_full_column_rank(&m.z);
    let y_full_rank = is_full_column_rank(&m.y);
    if y_full_rank != z_full_rank {
        return Err(Error::Invariant(format!(
            "Y full rank ({y_full_rank}) disagrees with Z full rank ({z_full_rank})"
        )));
    }
    let certified = w_full_rank && z_full_rank;
    Ok(Certificate {
        w_full_rank,
        z_full_rank,
        y_full_rank,
        verdict: if certified { Verdict::CertifiedSimplicial } else { Verdict::Inconclusive },
        face_dimension: certified.then(|| m.r() - 1),
    })
}

pub fn certify_simplicial(cuts: &[CutVector]) -> Result<Certificate> {
    certify_matrices(&build_certificate_matrices(cuts)?)
}

/// True iff every sign pattern in `{±1}^r` shows up as some coordinate
/// `(c_1(t), …, c_r(t))`.
pub fn check_general_position(cuts: &[CutVector]) -> Result<bool> {
    let n = check_family(cuts, 1)?;
    let r = cuts.len();
    if r > 30 {
        return input(format!("general position check supports r <= 30, got {r}"));
    }
    let needed = 1usize << r;
    if n < needed {
        return Ok(false);
    }
    let seen: HashSet<u32> = (0..n)
        .map(|t| {
            cuts.iter()
                .enumerate()
                .fold(0u32, |acc, (i, c)| if c.get(t) > 0 { acc | 1 << i } else { acc })
        })
        .collect();
    Ok(seen.len() == needed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::exact_rank;

    fn cv(v: &[i8]) -> CutVector {
        CutVector::new(v.to_vec()).unwrap()
    }

    fn cols(m: &IntMatrix) -> Vec<Vec<i64>> {
        (0..m.cols()).map(|j| m.column(j)).collect()
    }

    #[test]
    fn two_by_two_family() {
        let m = build_certificate_matrices(&[cv(&[1, 1]), cv(&[1, -1])]).unwrap();
        assert_eq!(cols(&m.w), vec![vec![1, 1], vec![1, -1]]);
        assert_eq!(cols(&m.z), vec![vec![1, 1], vec![1, -1]]);
        assert_eq!(cols(&m.y), vec![vec![0, 2]]);
        assert_eq!((m.big_r(), m.big_r_prime()), (2, 1));
    }

    #[test]
    fn identical_vectors() {
        let c = cv(&[1, 1, 1]);
        let m = build_certificate_matrices(&[c.clone(), c]).unwrap();
        assert_eq!(cols(&m.z), vec![vec![1; 3], vec![1; 3]]);
        assert_eq!(cols(&m.y), vec![vec![0; 3]]);
        assert!(!certify_simplicial(&[cv(&[1, 1, 1]), cv(&[1, 1, 1])]).unwrap().is_certified());
    }

    #[test]
    fn column_order_is_lexicographic() {
        let cuts = [cv(&[1, -1, 1, 1]), cv(&[1, 1, -1, 1]), cv(&[-1, 1, 1, -1])];
        let m = build_certificate_matrices(&cuts).unwrap();
        assert_eq!(m.column_order, vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(m.big_r(), 4);
        let expect = |i: usize, j: usize| -> Vec<i64> {
            (0..4).map(|t| i64::from(cuts[i].get(t) * cuts[j].get(t))).collect()
        };
        assert_eq!(cols(&m.z), vec![vec![1; 4], expect(0, 1), expect(0, 2), expect(1, 2)]);
    }

    #[test]
    fn antipodal_pair_keeps_y_and_z_in_step() {
        let c = cv(&[-1, 1, 1, -1]);
        let m = build_certificate_matrices(&[c.clone(), -&c]).unwrap();
        assert_eq!(cols(&m.y), vec![vec![0; 4]]);
        // The unflipped Y column would be 𝟙 - c⊙(-c) = 2·𝟙, which has full rank.
        let raw = IntMatrix::from_columns(4, &[vec![2; 4]]).unwrap();
        assert!(is_full_column_rank(&raw));
        let cert = certify_matrices(&m).unwrap();
        assert!(!cert.z_full_rank && !cert.y_full_rank);
    }

    #[test]
    fn input_errors() {
        assert!(build_certificate_matrices(&[cv(&[1, 1])]).is_err());
        assert!(build_certificate_matrices(&[cv(&[1, 1]), cv(&[1, 1, 1])]).is_err());
        assert!(check_general_position(&[]).is_err());
        let many = vec![cv(&[1]); 31];
        assert!(check_general_position(&many).is_err());
    }

    #[test]
    fn certify_examples() {
        let cert = certify_simplicial(&[cv(&[1, 1]), cv(&[1, -1])]).unwrap();
        assert_eq!(cert.verdict, Verdict::CertifiedSimplicial);
        assert_eq!(cert.face_dimension, Some(1));

        let c = cv(&[1, -1, 1, 1, -1]);
        let cert = certify_simplicial(&[c.clone(), -&c]).unwrap();
        assert!(!cert.w_full_rank);
        assert_eq!(cert.verdict, Verdict::Inconclusive);
        assert_eq!(cert.face_dimension, None);
    }

    #[test]
    fn row_ceiling() {
        // r = 6 gives R = 16 columns in Z but only 10 rows.
        let cuts: Vec<CutVector> =
            (0..6u64).map(|k| CutVector::from_bits(k * 37 + 5, 10).unwrap()).collect();
        let m = build_certificate_matrices(&cuts).unwrap();
        assert_eq!(m.big_r(), 16);
        assert!(exact_rank(&m.z) <= 10);
        assert!(!certify_simplicial(&cuts).unwrap().is_certified());
    }

    #[test]
    fn general_position_examples() {
        assert!(check_general_position(&[cv(&[1, 1, -1, -1]), cv(&[1, -1, 1, -1])]).unwrap());
        assert!(!check_general_position(&[cv(&[1, 1]), cv(&[1, -1])]).unwrap());
        assert!(check_general_position(&[cv(&[1, -1])]).unwrap());
    }

    #[test]
    fn verdict_wire_names() {
        assert_eq!(
            serde_json::to_string(&Verdict::CertifiedSimplicial).unwrap(),
            "\"CERTIFIED_SIMPLICIAL\""
        );
        assert_eq!(Verdict::Inconclusive.to_string(), "INCONCLUSIVE");
    }
}
