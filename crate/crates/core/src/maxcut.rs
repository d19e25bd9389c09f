//! MaxCut and its semidefinite relaxation over the elliptope.
//!
//! The relaxation is solved heuristically with a low-rank factor `X = VVᵗ`
//! whose rows are kept on the unit sphere, so every iterate is feasible and
//! the reported value is a lower bound on the relaxation optimum.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_2_PI;
use std::io::BufRead;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cutgeom::{CutVector, SymmetricMatrix};
use crate::error::{input, Error, Result};
use crate::randmodel::trial_stream;

/// Simple undirected graph on vertices `0..n` (1-based in text formats).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    /// Builds from 1-based pairs. Self-loops and repeated edges are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == 0 || b == 0 || a > n || b > n {
                return input(format!("edge {{{a}, {b}}} has an endpoint outside 1..={n}"));
            }
            if a == b {
                return input(format!("self-loop at vertex {a}"));
            }
            if !set.insert((a.min(b) - 1, a.max(b) - 1)) {
                return input(format!("duplicate edge {{{a}, {b}}}"));
            }
        }
        Ok(Self { n, edges: set })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: BTreeSet::new() }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self { n, edges }
    }

    pub fn path(n: usize) -> Self {
        Self { n, edges: (1..n).map(|i| (i - 1, i)).collect() }
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n > 2 {
            g.edges.insert((0, n - 1));
        }
        g
    }

    /// Erdős–Rényi graph with edge probability `prob`, reproducible from `seed`.
    pub fn random(n: usize, prob: f64, seed: u64) -> Self {
        let mut rng = trial_stream(seed, 0);
        let mut edges = BTreeSet::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < prob {
                    edges.insert((i, j));
                }
            }
        }
        Self { n, edges }
    }

    /// Reads `n m` followed by `m` lines `i j` (1-based). Blank lines and
    /// lines starting with `#` are skipped.
    pub fn read_edge_list(reader: impl BufRead) -> Result<Self> {
        let mut lines = Vec::new();
        for line in reader.lines() {
            let line = line.map_err(|e| Error::Input(format!("read error: {e}")))?;
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                lines.push(t.to_string());
            }
        }
        let parse_pair = |s: &str| -> Result<(usize, usize)> {
            let f: Vec<&str> = s.split_whitespace().collect();
            match f.as_slice() {
                [a, b] => Ok((
                    a.parse().map_err(|_| Error::Input(format!("bad integer {a:?}")))?,
                    b.parse().map_err(|_| Error::Input(format!("bad integer {b:?}")))?,
                )),
                _ => input(format!("expected two integers, got {s:?}")),
            }
        };
        let Some(header) = lines.first() else {
            return input("edge list is empty; expected header `n m`");
        };
        let (n, m) = parse_pair(header)?;
        let edges = lines[1..].iter().map(|l| parse_pair(l)).collect::<Result<Vec<_>>>()?;
        if edges.len() != m {
            return input(format!("header announces {m} edges, found {}", edges.len()));
        }
        Self::new(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as 0-based pairs `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// `L = ¼ Σ_{ij ∈ E} (e_i - e_j)(e_i - e_j)ᵗ`.
pub fn laplacian(g: &Graph) -> SymmetricMatrix {
    let mut l = SymmetricMatrix::zeros(g.n());
    for (i, j) in g.edges() {
        l.set(i, i, l.get(i, i) + 0.25);
        l.set(j, j, l.get(j, j) + 0.25);
        l.set(i, j, l.get(i, j) - 0.25);
    }
    l
}

/// Number of edges whose endpoints carry opposite signs, equal to `cᵗ L c`.
pub fn cut_weight(g: &Graph, c: &CutVector) -> Result<u64> {
    if c.len() != g.n() {
        return Err(Error::Dimension { expected: g.n(), got: c.len() });
    }
    Ok(g.edges().filter(|&(i, j)| c.get(i) != c.get(j)).count() as u64)
}

pub const MAX_BRUTE_FORCE_N: usize = 24;

/// Exact MaxCut by enumerating the `2^(n-1)` cuts with first entry `+1`.
/// Among optimal cuts the lexicographically smallest (with `-1 < +1`) wins.
pub fn brute_force_maxcut(g: &Graph) -> Result<(u64, CutVector)> {
    let n = g.n();
    if n == 0 {
        return input("graph has no vertices");
    }
    if n > MAX_BRUTE_FORCE_N {
        return input(format!("brute force supports n <= {MAX_BRUTE_FORCE_N}, got {n}"));
    }
    // Bit i of `side` is set when vertex i is +1; vertex 0 is always +1.
    let mut lower = vec![0u32; n];
    for (i, j) in g.edges() {
        lower[j] |= 1 << i;
    }
    let cut_of = |side: u32| -> u64 {
        (1..n)
            .map(|v| {
                let same = if side >> v & 1 == 1 { side } else { !side };
                u64::from((lower[v] & !same).count_ones())
            })
            .sum()
    };
    // Enumerating `bits` upward walks vertices 1..n in lexicographic order:
    // vertex 1 is the most significant position, and a clear bit is -1.
    let free = n - 1;
    let side_of = |bits: u32| -> u32 {
        (0..free).fold(1u32, |s, k| if bits >> (free - 1 - k) & 1 == 1 { s | 1 << (k + 1) } else { s })
    };
    let mut best = (0u64, side_of(0));
    let mut first = true;
    for bits in 0u32..1 << free {
        let side = side_of(bits);
        let w = cut_of(side);
        if first || w > best.0 {
            best = (w, side);
            first = false;
        }
    }
    let c = CutVector::new((0..n).map(|v| if best.1 >> v & 1 == 1 { 1 } else { -1 }).collect())?;
    Ok((best.0, c))
}

/// `n × k` matrix with unit rows; `VVᵗ` is a correlation matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ElliptopeFactor {
    v: DMatrix<f64>,
}

pub const ROW_NORM_TOL: f64 = 1e-9;

impl ElliptopeFactor {
    pub fn new(v: DMatrix<f64>) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return input("factor has non-finite entries");
        }
        for (i, row) in v.row_iter().enumerate() {
            if (row.norm() - 1.0).abs() > ROW_NORM_TOL {
                return input(format!("row {i} has norm {}", row.norm()));
            }
        }
        Ok(Self { v })
    }

    /// Rank-`k` factor of the cut matrix `ccᵗ`: row `i` is `c_i e_1`.
    pub fn from_cut(c: &CutVector, k: usize) -> Result<Self> {
        if k == 0 {
            return input("factor rank must be positive");
        }
        Self::new(DMatrix::from_fn(c.len(), k, |i, j| if j == 0 { f64::from(c.get(i)) } else { 0.0 }))
    }

    /// Random factor with rows uniform on the sphere.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Self {
        let mut v = DMatrix::from_fn(n, k, |_, _| rng.sample::<f64, _>(StandardNormal));
        normalize_rows(&mut v);
        Self { v }
    }

    pub fn n(&self) -> usize {
        self.v.nrows()
    }

    pub fn rank(&self) -> usize {
        self.v.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn gram(&self) -> SymmetricMatrix {
        let g = &self.v * self.v.transpose();
        SymmetricMatrix::from_fn(self.n(), |i, j| g[(i, j)])
    }
}

fn normalize_rows(v: &mut DMatrix<f64>) {
    for mut row in v.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        } else {
            row.fill(0.0);
            row[0] = 1.0;
        }
    }
}

fn objective(a: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    (a * v).component_mul(v).sum()
}

/// Settings for [`bm_elliptope_solve`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BmOptions {
    pub rank: usize,
    pub iters: usize,
    /// Stop when the relative objective change falls below this.
    pub tol: f64,
    pub seed: u64,
}

impl BmOptions {
    /// Rank `⌈√(2n)⌉ + 1`, 5000 iterations, tolerance `1e-8`.
    pub fn for_dimension(n: usize, seed: u64) -> Self {
        Self { rank: default_rank(n), iters: 5000, tol: 1e-8, seed }
    }
}

pub fn default_rank(n: usize) -> usize {
    (2.0 * n as f64).sqrt().ceil() as usize + 1
}

/// Projected gradient ascent on `trace(A VVᵗ)` over unit-row factors, with
/// backtracking on the step size. Starts from `start` if given, otherwise
/// from a random factor. The returned value is attained by a feasible point,
/// so it never exceeds the relaxation optimum.
pub fn bm_elliptope_solve(
    a: &SymmetricMatrix,
    opts: &BmOptions,
    start: Option<&ElliptopeFactor>,
) -> Result<(ElliptopeFactor, f64)> {
    if !a.is_finite() {
        return input("objective matrix has non-finite entries");
    }
    if opts.rank < 2 {
        return input("factor rank must be at least 2");
    }
    let n = a.dim();
    let am = a.to_dmatrix();
    let mut v = match start {
        Some(f) if f.n() != n => return Err(Error::Dimension { expected: n, got: f.n() }),
        Some(f) => {
            let mut v = DMatrix::zeros(n, opts.rank);
            let k = f.rank().min(opts.rank);
            v.view_mut((0, 0), (n, k)).copy_from(&f.matrix().view((0, 0), (n, k)));
            normalize_rows(&mut v);
            v
        }
        None => ElliptopeFactor::random(n, opts.rank, &mut trial_stream(opts.seed, 0)).v,
    };
    let mut value = objective(&am, &v);
    let scale = am.norm().max(f64::MIN_POSITIVE);
    let mut step = 1.0 / scale;

    for _ in 0..opts.iters {
        let grad = &am * &v * 2.0;
        // Riemannian gradient: drop the radial part of each row.
        let mut tangent = grad.clone();
        for i in 0..n {
            let radial = grad.row(i).dot(&v.row(i));
            for j in 0..opts.rank {
                tangent[(i, j)] -= radial * v[(i, j)];
            }
        }
        if tangent.norm() <= 1e-12 * scale {
            break;
        }
        let slope = tangent.norm_squared();
        let mut improved = None;
        for _ in 0..60 {
            let mut cand = &v + &tangent * step;
            normalize_rows(&mut cand);
            let cv = objective(&am, &cand);
            // Armijo: demand a fixed fraction of the first-order increase.
            if cv > value && cv >= value + 1e-4 * step * slope {
                improved = Some((cand, cv));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, cv)) = improved else { break };
        let change = (cv - value).abs() / value.abs().max(1.0);
        v = cand;
        value = cv;
        step *= 2.0;
        if change < opts.tol {
            break;
        }
    }
    Ok((ElliptopeFactor { v }, value))
}

/// Sign of `⟨v_i, g⟩` for every row, with `sign(0) = +1`.
pub fn hyperplane_round(factor: &ElliptopeFactor, direction: &DVector<f64>) -> Result<CutVector> {
    if direction.len() != factor.rank() {
        return Err(Error::Dimension { expected: factor.rank(), got: direction.len() });
    }
    let proj = factor.matrix() * direction;
    CutVector::new(proj.iter().map(|&x| if x >= 0.0 { 1 } else { -1 }).collect())
}

/// Best cut over `samples` Gaussian directions; sample `s` uses stream
/// `(seed, s)`. Ties keep the earliest sample.
pub fn best_cut_value(
    g: &Graph,
    factor: &ElliptopeFactor,
    samples: u64,
    seed: u64,
) -> Result<(u64, CutVector)> {
    if samples == 0 {
        return input("need at least one rounding sample");
    }
    if factor.n() != g.n() {
        return Err(Error::Dimension { expected: g.n(), got: factor.n() });
    }
    let mut best: Option<(u64, CutVector)> = None;
    for s in 0..samples {
        let mut rng = trial_stream(seed, s);
        let dir = DVector::from_fn(factor.rank(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let c = hyperplane_round(factor, &dir)?;
        let w = cut_weight(g, &c)?;
        if best.as_ref().is_none_or(|(bw, _)| w > *bw) {
            best = Some((w, c));
        }
    }
    Ok(best.expect("samples >= 1"))
}

/// `(2/π)·relaxation <= maxcut <= relaxation`, checked on the lower side with
/// a feasible relaxation value (which can only make the check harder).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub maxcut: f64,
    pub relaxation_lower: f64,
    pub guarantee: f64,
    /// `maxcut / relaxation_lower`, when the denominator is positive.
    pub ratio: Option<f64>,
    pub holds: bool,
}

pub const SANDWICH_TOL: f64 = 1e-9;

pub fn check_approx_sandwich(bm_value: f64, maxcut_value: f64) -> Result<SandwichReport> {
    if !bm_value.is_finite() || !maxcut_value.is_finite() {
        return input("sandwich inputs must be finite");
    }
    let guarantee = FRAC_2_PI * bm_value;
    Ok(SandwichReport {
        maxcut: maxcut_value,
        relaxation_lower: bm_value,
        guarantee,
        ratio: (bm_value > 0.0).then(|| maxcut_value / bm_value),
        holds: maxcut_value >= guarantee - SANDWICH_TOL,
    })
}
