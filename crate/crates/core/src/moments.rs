//! Exact second-moment matrices of the row vectors `w`, `z`, `y` of the
//! certificate matrices, computed by enumerating all `2^r` sign vectors with
//! rational weights, and the symmetric-tensor operator whose restriction to
//! strictly increasing index pairs is `E[yyᵗ]`.
//!
//! Rows of `W` are `w ~ SBern(p, r)`; rows of `Z` are `z = (1, w_i w_j)` and
//! rows of `Y` are `y = (1 - w_i w_j)`, pairs `i < j` in lexicographic order.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{input, Error, Result};
use crate::lpcert::pair_order;

/// Largest `r` for which the `w` moment is available (closed form beyond
/// the enumeration limit).
pub const MAX_R_CLOSED_FORM: usize = 20;
/// Largest `r` for which sign vectors are enumerated.
pub const MAX_R_ENUMERATION: usize = 12;
/// Absolute slack for eigenvalue checks on the floating-point copies.
pub const EIGEN_TOL: f64 = 1e-9;

/// Exact rational from the shortest decimal representation of `x`, so
/// `0.05` becomes `1/20` rather than the nearest binary fraction.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return input(format!("{x} is not finite"));
    }
    parse_decimal(&format!("{x}"))
}

/// Parses `[-]digits[.digits][e[-]digits]` exactly.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Input(format!("cannot parse {s:?} as a decimal number"));
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Ok(if scale >= 0 {
        BigRational::from_integer(num * pow)
    } else {
        BigRational::new(num, pow)
    })
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `α = (2p - 1)²`.
pub fn alpha_of(p: &BigRational) -> BigRational {
    let m = p * rat(2) - rat(1);
    &m * &m
}

fn check_p(p: &BigRational) -> Result<()> {
    if p.is_negative() || *p > rat(1) {
        return input(format!("p = {p} is not in [0, 1]"));
    }
    Ok(())
}

/// Dense matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_f64().unwrap_or(f64::NAN))
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Largest entrywise difference, as a float.
    pub fn max_abs_diff(&self, other: &RationalMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the floating-point copy of a symmetric matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        min_symmetric_eigenvalue(self.to_f64())
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn min_symmetric_eigenvalue(m: DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// `E[f(w) f(w)ᵗ]` for `w ~ SBern(p, r)` by enumerating every sign vector.
///
/// Outer products are summed as integers per number of `+1` entries, since
/// the probability `p^k (1-p)^(r-k)` depends only on that count.
fn enumerate_second_moment(
    p: &BigRational,
    r: usize,
    dim: usize,
    feature: impl Fn(&[i64]) -> Vec<i64>,
) -> RationalMatrix {
    let mut counts = vec![vec![0i64; dim * dim]; r + 1];
    let mut w = vec![0i64; r];
    for mask in 0u64..1 << r {
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = if mask >> i & 1 == 0 { 1 } else { -1 };
        }
        let plus = r - mask.count_ones() as usize;
        let f = feature(&w);
        let acc = &mut counts[plus];
        for a in 0..dim {
            if f[a] == 0 {
                continue;
            }
            for b in 0..dim {
                acc[a * dim + b] += f[a] * f[b];
            }
        }
    }
    let q = rat(1) - p;
    let weights: Vec<BigRational> = (0..=r)
        .map(|k| num_traits::pow(p.clone(), k) * num_traits::pow(q.clone(), r - k))
        .collect();
    RationalMatrix::from_fn(dim, dim, |a, b| {
        counts
            .iter()
            .zip(&weights)
            .filter(|(c, _)| c[a * dim + b] != 0)
            .map(|(c, wt)| wt * rat(c[a * dim + b]))
            .fold(BigRational::zero(), |s, t| s + t)
    })
}

/// `(1 - α) I + α J`.
pub fn closed_form_mr(alpha: &BigRational, r: usize) -> RationalMatrix {
    let off = alpha.clone();
    let diag = rat(1);
    RationalMatrix::from_fn(r, r, |i, j| if i == j { diag.clone() } else { off.clone() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WMoment {
    pub matrix: RationalMatrix,
    /// `1 - α`.
    pub lambda_min: BigRational,
    /// Whether the closed form was confirmed by enumeration.
    pub enumerated: bool,
}

/// `E[wwᵗ] = (1 - α) I + α J`, confirmed against enumeration for
/// `r <= 12`.
pub fn exact_second_moment_w(p: &BigRational, r: usize) -> Result<WMoment> {
    check_p(p)?;
    if r == 0 || r > MAX_R_CLOSED_FORM {
        return input(format!("r = {r} outside 1..={MAX_R_CLOSED_FORM}"));
    }
    let alpha = alpha_of(p);
    let matrix = closed_form_mr(&alpha, r);
    let enumerated = r <= MAX_R_ENUMERATION;
    if enumerated {
        let brute = enumerate_second_moment(p, r, r, |w| w.to_vec());
        if brute != matrix {
            return Err(Error::Invariant(format!(
                "E[ww^t] closed form disagrees with enumeration at p = {p}, r = {r}"
            )));
        }
    }
    Ok(WMoment { matrix, lambda_min: rat(1) - alpha, enumerated })
}

fn check_enum_r(r: usize) -> Result<()> {
    if !(2..=MAX_R_ENUMERATION).contains(&r) {
        return input(format!("r = {r} outside 2..={MAX_R_ENUMERATION}"));
    }
    Ok(())
}

/// `E[zzᵗ]` with `z = (1, w_i w_j)`, by enumeration.
pub fn exact_second_moment_z(p: &BigRational, r: usize) -> Result<RationalMatrix> {
    check_p(p)?;
    check_enum_r(r)?;
    let pairs = pair_order(r);
    Ok(enumerate_second_moment(p, r, pairs.len() + 1, |w| {
        std::iter::once(1).chain(pairs.iter().map(|&(i, j)| w[i] * w[j])).collect()
    }))
}

/// `E[yyᵗ]` with `y = (1 - w_i w_j)`, by enumeration.
pub fn enumerate_sigma(p: &BigRational, r: usize) -> Result<RationalMatrix> {
    check_p(p)?;
    check_enum_r(r)?;
    let pairs = pair_order(r);
    Ok(enumerate_second_moment(p, r, pairs.len(), |w| {
        pairs.iter().map(|&(i, j)| 1 - w[i] * w[j]).collect()
    }))
}

/// Entrywise closed form of `E[yyᵗ]`: `(1-α)²` plus `1 - α²` when both pairs
/// agree, plus `α(1-α)` when they share exactly one index.
pub fn sigma_entry_table(alpha: &BigRational, r: usize) -> RationalMatrix {
    let gap = rat(1) - alpha;
    let base = &gap * &gap;
    let same = &base + (rat(1) - alpha * alpha);
    let one_shared = &base + alpha * &gap;
    let pairs = pair_order(r);
    RationalMatrix::from_fn(pairs.len(), pairs.len(), |a, b| {
        let ((i, j), (k, l)) = (pairs[a], pairs[b]);
        let shared = [i == k, j == l, i == l, j == k].iter().filter(|&&x| x).count();
        match shared {
            2 => same.clone(),
            1 => one_shared.clone(),
            _ => base.clone(),
        }
    })
}

/// The operator
/// `(1-α)² (I∨I) + α(1-α) (I∨J + J∨I) + ½(1-α)² (J∨J)` on symmetric tensors
/// `R^r ∨ R^r`, where `A∨B + B∨A` is the compression of `A⊗B + B⊗A` to the
/// symmetric subspace.
///
/// The matrix is stored in the integer basis `g_ii = e_i⊗e_i`,
/// `g_ij = e_i⊗e_j + e_j⊗e_i` (`i < j`) as the exact Gram form
/// `G[a][b] = ⟨g_a, Σ̌ g_b⟩`. The orthonormal basis is `g_ii` and `g_ij/√2`,
/// so the strictly increasing block in that basis is `G/2` and stays rational.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaCheck {
    /// `(i, j)` with `i <= j`, lexicographic.
    pub basis: Vec<(usize, usize)>,
    pub gram: RationalMatrix,
    pub alpha: BigRational,
}

impl SigmaCheck {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Matrix in the orthonormal basis `{e_i ∨ e_j : i <= j}`.
    pub fn orthonormal_matrix(&self) -> DMatrix<f64> {
        let scale: Vec<f64> = self
            .basis
            .iter()
            .map(|&(i, j)| if i == j { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 })
            .collect();
        let g = self.gram.to_f64();
        DMatrix::from_fn(self.dim(), self.dim(), |a, b| scale[a] * g[(a, b)] * scale[b])
    }

    /// Exact block on strictly increasing pairs, orthonormal basis.
    pub fn restriction(&self) -> RationalMatrix {
        let strict: Vec<usize> = (0..self.dim()).filter(|&a| self.basis[a].0 < self.basis[a].1).collect();
        let half = BigRational::new(1.into(), 2.into());
        RationalMatrix::from_fn(strict.len(), strict.len(), |a, b| {
            self.gram.get(strict[a], strict[b]) * &half
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_symmetric_eigenvalue(self.orthonormal_matrix())
    }
}

fn sym_basis(r: usize) -> Vec<(usize, usize)> {
    (0..r).flat_map(|i| (i..r).map(move |j| (i, j))).collect()
}

/// `g_a` as an `r × r` integer array (coefficient of `e_k ⊗ e_l` at `[k][l]`).
fn basis_tensor(r: usize, (i, j): (usize, usize)) -> Vec<i64> {
    let mut x = vec![0; r * r];
    x[i * r + j] += 1;
    if i != j {
        x[j * r + i] += 1;
    }
    x
}

/// `(A ⊗ B) vec(X) = vec(A X Bᵗ)` specialised to `A, B ∈ {I, J}`.
fn apply_kron(r: usize, x: &[i64], left_ones: bool, right_ones: bool) -> Vec<i64> {
    let mut y = x.to_vec();
    if right_ones {
        // X Jᵗ: every entry of row k becomes the row sum.
        for k in 0..r {
            let s: i64 = y[k * r..(k + 1) * r].iter().sum();
            y[k * r..(k + 1) * r].fill(s);
        }
    }
    if left_ones {
        // J X: every entry of column l becomes the column sum.
        for l in 0..r {
            let s: i64 = (0..r).map(|k| y[k * r + l]).sum();
            for k in 0..r {
                y[k * r + l] = s;
            }
        }
    }
    y
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Builds the lifted operator from `α` directly (also valid at `α = 1`).
pub fn build_sigma_check_alpha(alpha: &BigRational, r: usize) -> Result<SigmaCheck> {
    check_enum_r(r)?;
    if alpha.is_negative() || *alpha > rat(1) {
        return input(format!("alpha = {alpha} is not in [0, 1]"));
    }
    let basis = sym_basis(r);
    let tensors: Vec<Vec<i64>> = basis.iter().map(|&b| basis_tensor(r, b)).collect();
    let ii: Vec<&Vec<i64>> = tensors.iter().collect();
    let ij: Vec<Vec<i64>> = tensors
        .iter()
        .map(|x| {
            let a = apply_kron(r, x, false, true);
            let b = apply_kron(r, x, true, false);
            a.iter().zip(&b).map(|(u, v)| u + v).collect()
        })
        .collect();
    let jj: Vec<Vec<i64>> = tensors.iter().map(|x| apply_kron(r, x, true, true)).collect();

    let gap = rat(1) - alpha;
    let c_ii = &gap * &gap;
    let c_ij = alpha * &gap;
    let c_jj = &c_ii * BigRational::new(1.into(), 2.into());
    let d = basis.len();
    let gram = RationalMatrix::from_fn(d, d, |a, b| {
        &c_ii * rat(dot(&tensors[a], ii[b]))
            + &c_ij * rat(dot(&tensors[a], &ij[b]))
            + &c_jj * rat(dot(&tensors[a], &jj[b]))
    });
    Ok(SigmaCheck { basis, gram, alpha: alpha.clone() })
}

/// Builds the lifted operator for `SBern(p)` and checks that its strictly
/// increasing block equals the enumerated `E[yyᵗ]` exactly and that its
/// smallest eigenvalue is at least `(1 - α)²`.
pub fn build_sigma_check(p: &BigRational, r: usize) -> Result<SigmaCheck> {
    check_p(p)?;
    let alpha = alpha_of(p);
    let check = build_sigma_check_alpha(&alpha, r)?;
    let sigma = enumerate_sigma(p, r)?;
    if check.restriction() != sigma {
        return Err(Error::Invariant(format!(
            "restricted lift differs from E[yy^t] at p = {p}, r = {r}"
        )));
    }
    let floor = (rat(1) - &alpha).pow(2).to_f64().unwrap_or(0.0);
    let lam = check.min_eigenvalue();
    if lam < floor - EIGEN_TOL {
        return Err(Error::Invariant(format!(
            "lifted operator has eigenvalue {lam} below (1-alpha)^2 = {floor}"
        )));
    }
    Ok(check)
}

/// Everything known about the second moments at one `(p, r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub p: BigRational,
    pub r: usize,
    pub alpha: BigRational,
    pub m_r: RationalMatrix,
    pub sigma: RationalMatrix,
    /// Entrywise closed form of `sigma`, equal to it exactly.
    pub sigma_table: RationalMatrix,
    pub sigma_check: SigmaCheck,
    pub lambda_min_mr: f64,
    pub lambda_min_sigma: f64,
    pub lambda_min_sigma_check: f64,
}

impl MomentReport {
    /// `(1 - α)²` as a float.
    pub fn claimed_floor(&self) -> f64 {
        (rat(1) - &self.alpha).pow(2).to_f64().unwrap_or(0.0)
    }

    /// `λ_min(Σ) - (1 - α)²`.
    pub fn floor_gap(&self) -> f64 {
        self.lambda_min_sigma - self.claimed_floor()
    }
}

pub fn exact_second_moment_y(p: &BigRational, r: usize) -> Result<MomentReport> {
    check_p(p)?;
    check_enum_r(r)?;
    let alpha = alpha_of(p);
    let w = exact_second_moment_w(p, r)?;
    let sigma = enumerate_sigma(p, r)?;
    let sigma_table = sigma_entry_table(&alpha, r);
    if sigma != sigma_table {
        return Err(Error::Invariant(format!(
            "E[yy^t] disagrees with its entry table at p = {p}, r = {r}"
        )));
    }
    let sigma_check = build_sigma_check(p, r)?;
    Ok(MomentReport {
        p: p.clone(),
        r,
        lambda_min_mr: w.lambda_min.to_f64().unwrap_or(f64::NAN),
        lambda_min_sigma: sigma.min_eigenvalue(),
        lambda_min_sigma_check: sigma_check.min_eigenvalue(),
        m_r: w.matrix,
        sigma,
        sigma_table,
        sigma_check,
        alpha,
    })
}

/// `p = num / den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// `true` iff `m` is the identity matrix.
pub fn is_identity(m: &RationalMatrix) -> bool {
    m.rows() == m.cols()
        && (0..m.rows()).all(|i| {
            (0..m.cols()).all(|j| {
                let v = m.get(i, j);
                if i == j { v.is_one() } else { v.is_zero() }
            })
        })
}
