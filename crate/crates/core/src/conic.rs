//! Operator-splitting solver for linear objectives over products of cones.
//!
//! Problems are stated as `maximize cᵀx` subject to affine expressions lying
//! in cones. Internally this is the homogeneous self-dual embedding of
//! `min −cᵀx s.t. Ax + s = b, s ∈ K` solved by ADMM with over-relaxation,
//! after Ruiz equilibration of `A`.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SpcaError};

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, PartialEq)]
pub enum Cone {
    /// Expressions equal to zero.
    Zero(usize),
    NonNeg(usize),
    /// Expressions with per-row lower and upper limits.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// `(t, x)` with `‖x‖₂ ≤ t`; the size counts `t`.
    Soc(usize),
    /// `(a, b, x)` with `‖x‖₂² ≤ 2ab`, `a, b ≥ 0`; the size counts `a` and `b`.
    Rsoc(usize),
    /// Scaled lower-triangular vectorization of a `d × d` symmetric matrix.
    Psd(usize),
}

impl Cone {
    pub fn dim(&self) -> usize {
        match self {
            Cone::Zero(m) | Cone::NonNeg(m) | Cone::Soc(m) | Cone::Rsoc(m) => *m,
            Cone::Box { lower, .. } => lower.len(),
            Cone::Psd(d) => d * (d + 1) / 2,
        }
    }
}

/// Position of `(i, j)`, `i ≥ j`, in the scaled vectorization of a `d × d` matrix.
pub fn svec_index(d: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    // column c holds d − c entries
    j * d - j * j.saturating_sub(1) / 2 + (i - j)
}

/// Scaled vectorization: lower triangle, column-major, off-diagonals times √2.
pub fn svec(m: &DMatrix<f64>) -> DVector<f64> {
    let d = m.nrows();
    let mut v = DVector::zeros(d * (d + 1) / 2);
    let mut idx = 0;
    for j in 0..d {
        for i in j..d {
            v[idx] = if i == j { m[(i, i)] } else { SQRT2 * 0.5 * (m[(i, j)] + m[(j, i)]) };
            idx += 1;
        }
    }
    v
}

pub fn smat(v: &[f64], d: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d, d);
    let mut idx = 0;
    for j in 0..d {
        for i in j..d {
            if i == j {
                m[(i, i)] = v[idx];
            } else {
                m[(i, j)] = v[idx] / SQRT2;
                m[(j, i)] = v[idx] / SQRT2;
            }
            idx += 1;
        }
    }
    m
}

fn project_soc(v: &mut [f64]) {
    let t = v[0];
    let nx = v[1..].iter().map(|a| a * a).sum::<f64>().sqrt();
    if nx <= t {
        return;
    }
    if nx <= -t {
        v.iter_mut().for_each(|a| *a = 0.0);
        return;
    }
    let scale = 0.5 * (t + nx);
    v[0] = scale;
    for a in &mut v[1..] {
        *a *= scale / nx;
    }
}

/// The orthogonal, self-inverse map between rotated and standard second-order cones.
fn rotate(v: &mut [f64]) {
    let (a, b) = (v[0], v[1]);
    v[0] = (a + b) / SQRT2;
    v[1] = (a - b) / SQRT2;
}

fn project_psd_svec(v: &mut [f64], d: usize) {
    if d == 1 {
        v[0] = v[0].max(0.0);
        return;
    }
    let mut m = faer::Mat::<f64>::zeros(d, d);
    for j in 0..d {
        for i in j..d {
            let val = v[svec_index(d, i, j)];
            let val = if i == j { val } else { val / SQRT2 };
            m.write(i, j, val);
            m.write(j, i, val);
        }
    }
    let eig = m.selfadjoint_eigendecomposition(faer::Side::Lower);
    let (vals, vecs) = (eig.s().column_vector(), eig.u());
    let neg = (0..d).filter(|&i| vals.read(i) < 0.0).count();
    if neg == 0 {
        return;
    }
    let pos = (0..d).filter(|&i| vals.read(i) > 0.0).count();
    // rebuild from whichever side of the spectrum is smaller
    let from_pos = pos <= neg;
    let keep: Vec<usize> = (0..d).filter(|&i| if from_pos { vals.read(i) > 0.0 } else { vals.read(i) < 0.0 }).collect();
    let w = faer::Mat::<f64>::from_fn(d, keep.len(), |i, c| vecs.read(i, keep[c]) * vals.read(keep[c]).abs().sqrt());
    let low = &w * w.transpose();
    for j in 0..d {
        for i in j..d {
            let val = if from_pos { low.read(i, j) } else { m.read(i, j) + low.read(i, j) };
            v[svec_index(d, i, j)] = if i == j { val } else { val * SQRT2 };
        }
    }
}

/// Euclidean projection onto a cone block.
pub fn project_cone(cone: &Cone, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != cone.dim() {
        return Err(SpcaError::Contract(format!(
            "vector of length {} for a cone of dimension {}",
            v.len(),
            cone.dim()
        )));
    }
    let mut out = v.to_vec();
    match cone {
        Cone::Zero(_) => out.iter_mut().for_each(|a| *a = 0.0),
        Cone::NonNeg(_) => out.iter_mut().for_each(|a| *a = a.max(0.0)),
        Cone::Box { lower, upper } => {
            for (i, a) in out.iter_mut().enumerate() {
                *a = a.clamp(lower[i], upper[i]);
            }
        }
        Cone::Soc(_) => {
            if !out.is_empty() {
                project_soc(&mut out);
            }
        }
        Cone::Rsoc(m) => {
            if *m < 2 {
                return Err(SpcaError::Contract("rotated cone needs at least two entries".into()));
            }
            rotate(&mut out);
            project_soc(&mut out);
            rotate(&mut out);
        }
        Cone::Psd(d) => project_psd_svec(&mut out, *d),
    }
    Ok(out)
}

/// One row of an affine expression `constant + Σ coeff·x_col`.
#[derive(Debug, Clone, Default)]
pub struct AffineRow {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl AffineRow {
    pub fn new(terms: Vec<(usize, f64)>, constant: f64) -> Self {
        Self { terms, constant }
    }

    pub fn var(col: usize) -> Self {
        Self::new(vec![(col, 1.0)], 0.0)
    }
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from per-row term lists, summing duplicate columns.
    pub fn from_rows(ncols: usize, rows: &[Vec<(usize, f64)>]) -> Self {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in rows {
            let mut r = row.clone();
            r.sort_by_key(|e| e.0);
            let start = indices.len();
            for (c, v) in r {
                if indices.len() > start && *indices.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            nrows: rows.len(),
            ncols,
            indptr,
            indices,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    /// `out = A x`
    pub fn mul(&self, x: &[f64], out: &mut [f64]) {
        for r in 0..self.nrows {
            out[r] = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }

    /// `out = Aᵀ y`
    pub fn tmul(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|a| *a = 0.0);
        for r in 0..self.nrows {
            let yr = y[r];
            if yr != 0.0 {
                for (c, v) in self.row(r) {
                    out[c] += v * yr;
                }
            }
        }
    }

    fn scale(&mut self, row: &[f64], col: &[f64]) {
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                self.values[k] *= row[r] * col[self.indices[k]];
            }
        }
    }

    fn row_inf_norms(&self) -> Vec<f64> {
        (0..self.nrows)
            .map(|r| self.row(r).fold(0.0f64, |m, (_, v)| m.max(v.abs())))
            .collect()
    }

    fn col_inf_norms(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.ncols];
        for (k, &c) in self.indices.iter().enumerate() {
            out[c] = out[c].max(self.values[k].abs());
        }
        out
    }

    fn col_sq_norms(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols];
        for (k, &c) in self.indices.iter().enumerate() {
            out[c] += self.values[k] * self.values[k];
        }
        out
    }

    /// Lower triangle of `I·shift + A_SᵀA_S` over the rows `S` not flagged in
    /// `skip`, as column-sorted triplets with duplicates summed.
    fn gram_triplets(&self, shift: f64, skip: &[bool]) -> Vec<(usize, usize, f64)> {
        let mut t: Vec<(usize, usize, f64)> = (0..self.ncols).map(|j| (j, j, shift)).collect();
        for r in (0..self.nrows).filter(|&r| !skip[r]) {
            let lo = self.indptr[r];
            let hi = self.indptr[r + 1];
            for a in lo..hi {
                for b in lo..hi {
                    let (ca, cb) = (self.indices[a], self.indices[b]);
                    if ca >= cb {
                        t.push((ca, cb, self.values[a] * self.values[b]));
                    }
                }
            }
        }
        t.sort_unstable_by(|x, y| (x.1, x.0).cmp(&(y.1, y.0)));
        let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(t.len());
        for (i, j, v) in t {
            match out.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => out.push((i, j, v)),
            }
        }
        out
    }

    /// `I·shift + AᵀA` as a dense matrix.
    fn gram_plus_shift(&self, shift: f64) -> DMatrix<f64> {
        let n = self.ncols;
        let mut g = DMatrix::from_diagonal_element(n, n, shift);
        for r in 0..self.nrows {
            let lo = self.indptr[r];
            let hi = self.indptr[r + 1];
            for a in lo..hi {
                let (ca, va) = (self.indices[a], self.values[a]);
                for b in lo..hi {
                    g[(ca, self.indices[b])] += va * self.values[b];
                }
            }
        }
        g
    }
}

/// Conic program `maximize objectiveᵀx` with affine expressions in cones.
#[derive(Debug, Clone)]
pub struct ConicProblem {
    n: usize,
    objective: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    constants: Vec<f64>,
    cones: Vec<Cone>,
    var_bounds: Option<Vec<(f64, f64)>>,
}

impl ConicProblem {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            objective: vec![0.0; n],
            rows: Vec::new(),
            constants: Vec::new(),
            cones: Vec::new(),
            var_bounds: None,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn set_objective(&mut self, col: usize, coeff: f64) {
        self.objective[col] = coeff;
    }

    /// Adds a block of expressions that must lie in `cone`.
    pub fn add_block(&mut self, cone: Cone, exprs: Vec<AffineRow>) -> Result<()> {
        if exprs.len() != cone.dim() {
            return Err(SpcaError::Contract(format!(
                "cone of dimension {} given {} expressions",
                cone.dim(),
                exprs.len()
            )));
        }
        if let Cone::Box { lower, upper } = &cone {
            if lower.len() != upper.len() || lower.iter().zip(upper).any(|(l, u)| l > u) {
                return Err(SpcaError::Contract("box limits inconsistent".into()));
            }
        }
        for e in exprs {
            if e.terms.iter().any(|&(c, _)| c >= self.n) {
                return Err(SpcaError::Contract("expression refers to an unknown variable".into()));
            }
            // s = constant + Σ terms  ⇔  A row = −terms, b = constant
            self.rows.push(e.terms.iter().map(|&(c, v)| (c, -v)).collect());
            self.constants.push(e.constant);
        }
        self.cones.push(cone);
        Ok(())
    }

    /// Known bounds `l ≤ x ≤ u` implied by the constraints; they make the
    /// reported upper bound safe under inexact dual feasibility.
    pub fn set_var_bounds(&mut self, bounds: Vec<(f64, f64)>) -> Result<()> {
        if bounds.len() != self.n {
            return Err(SpcaError::Contract("one bound pair per variable".into()));
        }
        self.var_bounds = Some(bounds);
        Ok(())
    }

    /// Expression values `b − Ax` at `x`.
    pub fn slack(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.constants)
            .map(|(r, &b)| b - r.iter().map(|&(c, v)| v * x[c]).sum::<f64>())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConicStatus {
    Solved,
    MaxIter,
    InfeasibleSuspected,
}

impl ConicStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ConicStatus::Solved => "solved",
            ConicStatus::MaxIter => "max-iter",
            ConicStatus::InfeasibleSuspected => "infeasible-suspected",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub primal: Vec<f64>,
    /// One multiplier per expression row, in the order added.
    pub dual: Vec<f64>,
    pub objective_value: f64,
    /// Valid upper bound on the optimum when `bound_certified`.
    pub upper_bound: f64,
    pub bound_certified: bool,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub iterations: usize,
    pub status: ConicStatus,
}

#[derive(Debug, Clone)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub alpha: f64,
    pub scale: f64,
    pub ruiz_iters: usize,
    pub time_limit: Option<Duration>,
    /// Dimension above which the linear system is solved by conjugate
    /// gradients instead of a sparse factorization.
    pub direct_limit: usize,
    pub check_every: usize,
    /// Iterations between primal/dual rebalancing; 0 disables it.
    pub adapt_every: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 50_000,
            alpha: 1.5,
            scale: 1.0,
            ruiz_iters: 25,
            time_limit: None,
            direct_limit: 50_000,
            check_every: 20,
            adapt_every: 100,
        }
    }
}

/// Internal block after desugaring boxes and rotating cones.
#[derive(Debug, Clone, Copy)]
enum Block {
    Free(usize),
    NonNeg(usize),
    Soc(usize),
    Psd(usize),
}

impl Block {
    fn dim(self) -> usize {
        match self {
            Block::Free(m) | Block::NonNeg(m) | Block::Soc(m) => m,
            Block::Psd(d) => d * (d + 1) / 2,
        }
    }

    /// Uniform row scaling is needed to keep cone membership under scaling.
    fn uniform(self) -> bool {
        matches!(self, Block::Soc(_) | Block::Psd(_))
    }
}

/// Map from user rows to internal rows.
#[derive(Debug, Clone, Copy)]
enum RowMap {
    Direct(usize),
    /// Rotated cone block starting at the given internal row.
    Rotated(usize),
    /// Box row: lower-limit row and upper-limit row.
    Split(usize, usize),
}

struct Internal {
    a: SparseMatrix,
    b: Vec<f64>,
    c: Vec<f64>,
    blocks: Vec<Block>,
    map: Vec<RowMap>,
}

fn desugar(prob: &ConicProblem) -> Internal {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut b = Vec::new();
    let mut blocks = Vec::new();
    let mut map = Vec::with_capacity(prob.rows.len());
    let mut user = 0;
    for cone in &prob.cones {
        let m = cone.dim();
        let range = user..user + m;
        match cone {
            Cone::Zero(_) => {
                blocks.push(Block::Free(m));
                for r in range {
                    map.push(RowMap::Direct(rows.len()));
                    rows.push(prob.rows[r].clone());
                    b.push(prob.constants[r]);
                }
            }
            Cone::NonNeg(_) => {
                blocks.push(Block::NonNeg(m));
                for r in range {
                    map.push(RowMap::Direct(rows.len()));
                    rows.push(prob.rows[r].clone());
                    b.push(prob.constants[r]);
                }
            }
            Cone::Box { lower, upper } => {
                // s ≥ l  and  s ≤ u  as two nonnegative rows each
                blocks.push(Block::NonNeg(2 * m));
                let base = rows.len();
                for (t, r) in range.clone().enumerate() {
                    rows.push(prob.rows[r].clone());
                    b.push(prob.constants[r] - lower[t]);
                }
                for (t, r) in range.enumerate() {
                    rows.push(prob.rows[r].iter().map(|&(c, v)| (c, -v)).collect());
                    b.push(upper[t] - prob.constants[r]);
                    map.push(RowMap::Split(base + t, base + m + t));
                }
            }
            Cone::Soc(_) => {
                blocks.push(Block::Soc(m));
                for r in range {
                    map.push(RowMap::Direct(rows.len()));
                    rows.push(prob.rows[r].clone());
                    b.push(prob.constants[r]);
                }
            }
            Cone::Rsoc(_) => {
                blocks.push(Block::Soc(m));
                let base = rows.len();
                let (r0, r1) = (user, user + 1);
                let mut first: Vec<(usize, f64)> = prob.rows[r0].iter().map(|&(c, v)| (c, v / SQRT2)).collect();
                first.extend(prob.rows[r1].iter().map(|&(c, v)| (c, v / SQRT2)));
                let mut second: Vec<(usize, f64)> = prob.rows[r0].iter().map(|&(c, v)| (c, v / SQRT2)).collect();
                second.extend(prob.rows[r1].iter().map(|&(c, v)| (c, -v / SQRT2)));
                rows.push(first);
                rows.push(second);
                let (b0, b1) = (prob.constants[r0], prob.constants[r1]);
                b.push((b0 + b1) / SQRT2);
                b.push((b0 - b1) / SQRT2);
                for r in range.clone().skip(2) {
                    rows.push(prob.rows[r].clone());
                    b.push(prob.constants[r]);
                }
                for _ in range {
                    map.push(RowMap::Rotated(base));
                }
            }
            Cone::Psd(d) => {
                blocks.push(Block::Psd(*d));
                for r in range {
                    map.push(RowMap::Direct(rows.len()));
                    rows.push(prob.rows[r].clone());
                    b.push(prob.constants[r]);
                }
            }
        }
        user += m;
    }
    // merge adjacent blocks of the same kind
    let mut merged: Vec<Block> = Vec::new();
    for blk in blocks {
        match (merged.last_mut(), blk) {
            (Some(Block::Free(a)), Block::Free(m)) => *a += m,
            (Some(Block::NonNeg(a)), Block::NonNeg(m)) => *a += m,
            _ => merged.push(blk),
        }
    }
    Internal {
        a: SparseMatrix::from_rows(prob.n, &rows),
        b,
        c: prob.objective.iter().map(|v| -v).collect(),
        blocks: merged,
        map,
    }
}

/// Projects `y` onto the dual cone of the internal block structure.
fn project_dual(blocks: &[Block], y: &mut [f64]) {
    let mut off = 0;
    for &blk in blocks {
        let m = blk.dim();
        let seg = &mut y[off..off + m];
        match blk {
            Block::Free(_) => {}
            Block::NonNeg(_) => seg.iter_mut().for_each(|a| *a = a.max(0.0)),
            Block::Soc(_) => {
                if m > 0 {
                    project_soc(seg)
                }
            }
            Block::Psd(d) => project_psd_svec(seg, d),
        }
        off += m;
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Row and column equilibration factors.
fn equilibrate(a: &mut SparseMatrix, blocks: &[Block], iters: usize) -> (Vec<f64>, Vec<f64>) {
    let (m, n) = (a.nrows(), a.ncols());
    let mut d = vec![1.0; m];
    let mut e = vec![1.0; n];
    for _ in 0..iters {
        let mut rn = a.row_inf_norms();
        let mut off = 0;
        for &blk in blocks {
            let k = blk.dim();
            if blk.uniform() && k > 0 {
                let mx = rn[off..off + k].iter().cloned().fold(0.0, f64::max);
                rn[off..off + k].iter_mut().for_each(|v| *v = mx);
            }
            off += k;
        }
        let cn = a.col_inf_norms();
        let dr: Vec<f64> = rn.iter().map(|&v| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 }).collect();
        let dc: Vec<f64> = cn.iter().map(|&v| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 }).collect();
        let dr: Vec<f64> = dr
            .iter()
            .zip(&d)
            .map(|(&f, &cur)| (cur * f).clamp(1e-4, 1e4) / cur)
            .collect();
        let dc: Vec<f64> = dc
            .iter()
            .zip(&e)
            .map(|(&f, &cur)| (cur * f).clamp(1e-4, 1e4) / cur)
            .collect();
        a.scale(&dr, &dc);
        for i in 0..m {
            d[i] *= dr[i];
        }
        for j in 0..n {
            e[j] *= dc[j];
        }
    }
    (d, e)
}

/// Largest system factored densely when the sparse factorization fails.
const DENSE_FALLBACK_LIMIT: usize = 1500;

enum LinSolver {
    Dense(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    /// Sparse factor of `I + A_SᵀA_S`; the few dense rows `D` enter through
    /// the Woodbury identity with `W = K⁻¹Dᵀ` and the factored capacitance
    /// `I + D W`.
    Sparse {
        chol: faer::sparse::linalg::solvers::Cholesky<usize, f64>,
        dense: Vec<Vec<(usize, f64)>>,
        w: Vec<Vec<f64>>,
        cap: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
    },
    Cg { precond: Vec<f64>, last: Vec<f64> },
}

/// Rows with more entries than this are handled as low-rank updates.
fn dense_row_threshold(n: usize) -> usize {
    4 * (n as f64).sqrt() as usize + 16
}

fn sparse_solve(chol: &faer::sparse::linalg::solvers::Cholesky<usize, f64>, rhs: &mut [f64]) {
    use faer::sparse::linalg::solvers::SpSolver;
    let mut col = faer::Col::<f64>::from_fn(rhs.len(), |i| rhs[i]);
    chol.solve_in_place(col.as_mut());
    for (i, a) in rhs.iter_mut().enumerate() {
        *a = col.read(i);
    }
}

fn sparse_solver(a: &SparseMatrix) -> Option<LinSolver> {
    use faer::sparse::SparseColMat;
    static SERIAL: std::sync::Once = std::sync::Once::new();
    SERIAL.call_once(|| faer::set_global_parallelism(faer::Parallelism::None));
    let n = a.ncols();
    let limit = dense_row_threshold(n);
    let skip: Vec<bool> = (0..a.nrows()).map(|r| a.indptr[r + 1] - a.indptr[r] > limit).collect();
    let trip = a.gram_triplets(1.0, &skip);
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip).ok()?;
    let chol = mat.sp_cholesky(faer::Side::Lower).ok()?;
    let dense: Vec<Vec<(usize, f64)>> = (0..a.nrows()).filter(|&r| skip[r]).map(|r| a.row(r).collect()).collect();
    let w: Vec<Vec<f64>> = dense
        .iter()
        .map(|row| {
            let mut v = vec![0.0; n];
            for &(c, val) in row {
                v[c] = val;
            }
            sparse_solve(&chol, &mut v);
            v
        })
        .collect();
    let r = dense.len();
    let cap = if r == 0 {
        None
    } else {
        let m = DMatrix::from_fn(r, r, |i, j| {
            let dw: f64 = dense[i].iter().map(|&(c, v)| v * w[j][c]).sum();
            dw + if i == j { 1.0 } else { 0.0 }
        });
        Some(nalgebra::Cholesky::new(m)?)
    };
    Some(LinSolver::Sparse { chol, dense, w, cap })
}

struct Kkt<'a> {
    a: &'a SparseMatrix,
    solver: LinSolver,
    tmp_m: Vec<f64>,
    tmp_n: Vec<f64>,
}

impl<'a> Kkt<'a> {
    fn new(a: &'a SparseMatrix, direct_limit: usize) -> Result<Self> {
        let n = a.ncols();
        let sparse = if n <= direct_limit { sparse_solver(a) } else { None };
        let solver = if let Some(sp) = sparse {
            sp
        } else if n <= DENSE_FALLBACK_LIMIT {
            let g = a.gram_plus_shift(1.0);
            let chol = nalgebra::Cholesky::new(g)
                .ok_or_else(|| SpcaError::Contract("I + AᵀA not positive definite".into()))?;
            LinSolver::Dense(chol)
        } else {
            let precond = a.col_sq_norms().iter().map(|v| 1.0 / (1.0 + v)).collect();
            LinSolver::Cg { precond, last: vec![0.0; n] }
        };
        Ok(Self {
            a,
            solver,
            tmp_m: vec![0.0; a.nrows()],
            tmp_n: vec![0.0; n],
        })
    }

    /// Solves `(I + AᵀA) x = rhs` in place.
    fn solve_normal(&mut self, rhs: &mut [f64], cg_tol: f64) {
        match &mut self.solver {
            LinSolver::Dense(chol) => {
                let mut v = DVector::from_column_slice(rhs);
                chol.solve_mut(&mut v);
                rhs.copy_from_slice(v.as_slice());
            }
            LinSolver::Sparse { chol, dense, w, cap } => {
                sparse_solve(chol, rhs);
                if let Some(cap) = cap {
                    // x = K⁻¹b − W (I + D W)⁻¹ D K⁻¹b
                    let dx = DVector::from_iterator(dense.len(), dense.iter().map(|row| row.iter().map(|&(c, v)| v * rhs[c]).sum()));
                    let t = cap.solve(&dx);
                    for (wi, ti) in w.iter().zip(t.iter()) {
                        for (a, b) in rhs.iter_mut().zip(wi) {
                            *a -= ti * b;
                        }
                    }
                }
            }
            LinSolver::Cg { precond, last } => {
                let a = self.a;
                let n = rhs.len();
                let apply = |x: &[f64], out: &mut [f64], tm: &mut Vec<f64>| {
                    a.mul(x, tm);
                    a.tmul(tm, out);
                    for i in 0..n {
                        out[i] += x[i];
                    }
                };
                let mut x = last.clone();
                let mut r = vec![0.0; n];
                apply(&x, &mut r, &mut self.tmp_m);
                for i in 0..n {
                    r[i] = rhs[i] - r[i];
                }
                let bnorm = norm(rhs).max(1e-30);
                let mut zv: Vec<f64> = r.iter().zip(precond.iter()).map(|(a, b)| a * b).collect();
                let mut pdir = zv.clone();
                let mut rz = dot(&r, &zv);
                let mut ap = vec![0.0; n];
                for _ in 0..n.max(10) {
                    if norm(&r) <= cg_tol * bnorm {
                        break;
                    }
                    apply(&pdir, &mut ap, &mut self.tmp_m);
                    let pap = dot(&pdir, &ap);
                    if !(pap > 0.0) {
                        break;
                    }
                    let step = rz / pap;
                    for i in 0..n {
                        x[i] += step * pdir[i];
                        r[i] -= step * ap[i];
                    }
                    for i in 0..n {
                        zv[i] = r[i] * precond[i];
                    }
                    let rz_new = dot(&r, &zv);
                    let beta = rz_new / rz;
                    rz = rz_new;
                    for i in 0..n {
                        pdir[i] = zv[i] + beta * pdir[i];
                    }
                }
                last.copy_from_slice(&x);
                rhs.copy_from_slice(&x);
            }
        }
    }

    /// Solves `[[I, Aᵀ], [−A, I]] (x, y) = (a, d)` in place.
    fn solve_m(&mut self, x: &mut [f64], y: &mut [f64], cg_tol: f64) {
        let a = self.a;
        a.tmul(y, &mut self.tmp_n);
        for i in 0..x.len() {
            x[i] -= self.tmp_n[i];
        }
        self.solve_normal(x, cg_tol);
        a.mul(x, &mut self.tmp_m);
        for i in 0..y.len() {
            y[i] += self.tmp_m[i];
        }
    }
}

/// Residual ratio (as a square root) tolerated before rebalancing.
const ADAPT_BAND: f64 = 0.2;

/// Solves `prob` from a cold start.
pub fn solve_conic(prob: &ConicProblem, settings: &SolverSettings) -> Result<ConicSolution> {
    solve_conic_warm(prob, settings, None)
}

/// Solves `prob`, optionally warm-started from a primal point and row duals
/// in the user row order.
pub fn solve_conic_warm(
    prob: &ConicProblem,
    settings: &SolverSettings,
    warm: Option<(&[f64], &[f64])>,
) -> Result<ConicSolution> {
    let start = Instant::now();
    if prob.rows.len() != prob.constants.len() || prob.cones.iter().map(Cone::dim).sum::<usize>() != prob.rows.len() {
        return Err(SpcaError::Contract("cone dimensions do not match the rows".into()));
    }
    let n = prob.n;
    let internal = desugar(prob);
    let m = internal.b.len();
    let blocks = internal.blocks.clone();

    let mut a_hat = internal.a.clone();
    let (d, e) = equilibrate(&mut a_hat, &blocks, settings.ruiz_iters);
    let db: Vec<f64> = (0..m).map(|i| d[i] * internal.b[i]).collect();
    let ec: Vec<f64> = (0..n).map(|j| e[j] * internal.c[j]).collect();
    let mut sb = settings.scale / norm(&db).max(1e-12).max(1e-4 * settings.scale);
    let mut sc = settings.scale / norm(&ec).max(1e-12).max(1e-4 * settings.scale);
    let mut b_hat: Vec<f64> = db.iter().map(|v| v * sb).collect();
    let mut c_hat: Vec<f64> = ec.iter().map(|v| v * sc).collect();

    let mut kkt = Kkt::new(&a_hat, settings.direct_limit)?;
    let l = n + m;

    // g = M⁻¹ h
    let mut gx = c_hat.clone();
    let mut gy = b_hat.clone();
    kkt.solve_m(&mut gx, &mut gy, 1e-12);
    let mut h_dot_g = dot(&c_hat, &gx) + dot(&b_hat, &gy);
    let mut last_adapt = 0;
    let mut adapt_wait = settings.adapt_every;

    // iterates u = (x, y, τ), v = (r, s, κ)
    let mut u = vec![0.0; l + 1];
    let mut v = vec![0.0; l + 1];
    u[l] = 1.0;
    v[l] = 1.0;
    if let Some((x0, y0)) = warm {
        if x0.len() == n && y0.len() == prob.rows.len() {
            for j in 0..n {
                u[j] = x0[j] / e[j] * sb;
            }
            let y_int = internal_dual(&internal, y0);
            let s_int = {
                let mut ax = vec![0.0; m];
                internal.a.mul(x0, &mut ax);
                (0..m).map(|i| internal.b[i] - ax[i]).collect::<Vec<_>>()
            };
            for i in 0..m {
                u[n + i] = y_int[i] / d[i] * sc;
                v[n + i] = s_int[i] * d[i] * sb;
            }
            v[l] = 0.0;
        }
    }

    let mut ut = vec![0.0; l + 1];
    let mut status = ConicStatus::MaxIter;
    let mut iterations = 0;
    let mut last = Residuals::default();
    let mut cg_tol = 1e-6;

    for it in 0..settings.max_iter {
        iterations = it + 1;
        // ũ = (I + Q)⁻¹ (u + v)
        for i in 0..=l {
            ut[i] = u[i] + v[i];
        }
        let (rx, rest) = ut.split_at_mut(n);
        let (ry, rt) = rest.split_at_mut(m);
        let rho_tau = rt[0];
        kkt.solve_m(rx, ry, cg_tol);
        let tau = (rho_tau + dot(&c_hat, rx) + dot(&b_hat, ry)) / (1.0 + h_dot_g);
        for j in 0..n {
            rx[j] -= tau * gx[j];
        }
        for i in 0..m {
            ry[i] -= tau * gy[i];
        }
        rt[0] = tau;

        // over-relaxation, then projection onto R^n × K* × R₊
        let alpha = settings.alpha;
        for i in 0..=l {
            ut[i] = alpha * ut[i] + (1.0 - alpha) * u[i];
        }
        for i in 0..=l {
            u[i] = ut[i] - v[i];
        }
        project_dual(&blocks, &mut u[n..l]);
        u[l] = u[l].max(0.0);
        for i in 0..=l {
            v[i] += u[i] - ut[i];
        }

        let check = (it + 1) % settings.check_every == 0 || it + 1 == settings.max_iter;
        if check {
            last = residuals(&internal, &d, &e, sb, sc, &u, &v, n, m);
            cg_tol = (0.1 * last.pres.max(last.dres)).clamp(1e-10, 1e-4);
            if last.tau > 0.0 && last.pres <= settings.tol && last.dres <= settings.tol && last.gap <= settings.tol {
                status = ConicStatus::Solved;
                break;
            }
            if settings.time_limit.is_some_and(|t| start.elapsed() >= t) {
                break;
            }
            if settings.adapt_every > 0 && it + 1 - last_adapt >= adapt_wait && last.pres.is_finite() {
                let ratio = (last.pres / last.dres.max(1e-300)).sqrt();
                if !(ADAPT_BAND..=1.0 / ADAPT_BAND).contains(&ratio) {
                    let gamma = ratio.clamp(1e-2, 1e2);
                    // rescale the primal side against the dual side, keeping (x, y, s) fixed
                    let (gb, gc) = (gamma.sqrt(), 1.0 / gamma.sqrt());
                    sb *= gb;
                    sc *= gc;
                    for j in 0..n {
                        u[j] *= gb;
                        v[j] *= gc;
                    }
                    for i in n..l {
                        u[i] *= gc;
                        v[i] *= gb;
                    }
                    b_hat.iter_mut().for_each(|a| *a *= gb);
                    c_hat.iter_mut().for_each(|a| *a *= gc);
                    gx.copy_from_slice(&c_hat);
                    gy.copy_from_slice(&b_hat);
                    kkt.solve_m(&mut gx, &mut gy, 1e-12);
                    h_dot_g = dot(&c_hat, &gx) + dot(&b_hat, &gy);
                    last_adapt = it + 1;
                    adapt_wait = (adapt_wait * 3 / 2).max(settings.adapt_every);
                }
            }
        }
    }
    if status != ConicStatus::Solved {
        last = residuals(&internal, &d, &e, sb, sc, &u, &v, n, m);
        let un = norm(&u[..l]);
        if last.tau <= 1e-9 * un.max(1.0) {
            status = ConicStatus::InfeasibleSuspected;
        }
    }

    let tau = last.tau.max(1e-300);
    let x: Vec<f64> = (0..n).map(|j| e[j] * u[j] / (tau * sb)).collect();
    let y_int: Vec<f64> = (0..m).map(|i| d[i] * u[n + i] / (tau * sc)).collect();
    let objective_value = dot(&prob.objective, &x);

    let (upper_bound, bound_certified) = safe_bound(&internal, prob, &blocks, &y_int, objective_value, &last);

    Ok(ConicSolution {
        primal: x,
        dual: user_dual(&internal, &y_int),
        objective_value,
        upper_bound,
        bound_certified,
        primal_residual: last.pres,
        dual_residual: last.dres,
        gap: last.gap,
        iterations,
        status,
    })
}

#[derive(Debug, Clone, Copy, Default)]
struct Residuals {
    pres: f64,
    dres: f64,
    gap: f64,
    tau: f64,
}

#[allow(clippy::too_many_arguments)]
fn residuals(
    int: &Internal,
    d: &[f64],
    e: &[f64],
    sb: f64,
    sc: f64,
    u: &[f64],
    v: &[f64],
    n: usize,
    m: usize,
) -> Residuals {
    let tau = u[n + m];
    if !(tau > 0.0) {
        return Residuals { pres: f64::INFINITY, dres: f64::INFINITY, gap: f64::INFINITY, tau: 0.0 };
    }
    let x: Vec<f64> = (0..n).map(|j| e[j] * u[j] / (tau * sb)).collect();
    let y: Vec<f64> = (0..m).map(|i| d[i] * u[n + i] / (tau * sc)).collect();
    let s: Vec<f64> = (0..m).map(|i| v[n + i] / (d[i] * tau * sb)).collect();
    let mut ax = vec![0.0; m];
    int.a.mul(&x, &mut ax);
    let pr: Vec<f64> = (0..m).map(|i| ax[i] + s[i] - int.b[i]).collect();
    let mut aty = vec![0.0; n];
    int.a.tmul(&y, &mut aty);
    let dr: Vec<f64> = (0..n).map(|j| aty[j] + int.c[j]).collect();
    let cx = dot(&int.c, &x);
    let by = dot(&int.b, &y);
    Residuals {
        pres: norm(&pr) / (1.0 + norm(&int.b)),
        dres: norm(&dr) / (1.0 + norm(&int.c)),
        gap: (cx + by).abs() / (1.0 + cx.abs() + by.abs()),
        tau,
    }
}

/// `bᵀy + max_{l ≤ x ≤ u} rᵀx` with `y` projected onto the dual cone and
/// `r = c − Aᵀy` the dual infeasibility.
fn safe_bound(
    int: &Internal,
    prob: &ConicProblem,
    blocks: &[Block],
    y: &[f64],
    objective_value: f64,
    res: &Residuals,
) -> (f64, bool) {
    let fallback = objective_value + res.gap * (1.0 + objective_value.abs()) * 2.0;
    let Some(bounds) = &prob.var_bounds else {
        return (fallback, false);
    };
    let mut yp = y.to_vec();
    project_dual(blocks, &mut yp);
    let mut aty = vec![0.0; prob.n];
    int.a.tmul(&yp, &mut aty);
    let mut ub = dot(&int.b, &yp);
    for j in 0..prob.n {
        let r = prob.objective[j] - aty[j];
        let (lo, hi) = bounds[j];
        ub += (r * lo).max(r * hi);
    }
    if ub.is_finite() {
        (ub, true)
    } else {
        (fallback, false)
    }
}

fn user_dual(int: &Internal, y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(int.map.len());
    let mut k = 0;
    while k < int.map.len() {
        match int.map[k] {
            RowMap::Direct(r) => {
                out.push(y[r]);
                k += 1;
            }
            RowMap::Split(lo, hi) => {
                out.push(y[lo] - y[hi]);
                k += 1;
            }
            RowMap::Rotated(base) => {
                let (a, b) = (y[base], y[base + 1]);
                out.push((a + b) / SQRT2);
                out.push((a - b) / SQRT2);
                let mut t = 2;
                k += 2;
                while k < int.map.len() && matches!(int.map[k], RowMap::Rotated(b2) if b2 == base) {
                    out.push(y[base + t]);
                    t += 1;
                    k += 1;
                }
            }
        }
    }
    out
}

fn internal_dual(int: &Internal, y_user: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; int.b.len()];
    let mut k = 0;
    while k < int.map.len() {
        match int.map[k] {
            RowMap::Direct(r) => {
                y[r] = y_user[k];
                k += 1;
            }
            RowMap::Split(lo, hi) => {
                y[lo] = y_user[k].max(0.0);
                y[hi] = (-y_user[k]).max(0.0);
                k += 1;
            }
            RowMap::Rotated(base) => {
                let (a, b) = (y_user[k], y_user[k + 1]);
                y[base] = (a + b) / SQRT2;
                y[base + 1] = (a - b) / SQRT2;
                let mut t = 2;
                k += 2;
                while k < int.map.len() && matches!(int.map[k], RowMap::Rotated(b2) if b2 == base) {
                    y[base + t] = y_user[k];
                    t += 1;
                    k += 1;
                }
            }
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// `max ⟨Σ, X⟩ s.t. tr X = 1, X ⪰ 0` over plain lower-triangle variables.
    fn lambda_max_problem(sigma: &DMatrix<f64>) -> ConicProblem {
        let d = sigma.nrows();
        let mut prob = ConicProblem::new(d * (d + 1) / 2);
        let mut trace = Vec::new();
        let mut psd = Vec::new();
        let mut bounds = Vec::new();
        for j in 0..d {
            for i in j..d {
                let col = svec_index(d, i, j);
                if i == j {
                    prob.set_objective(col, sigma[(i, i)]);
                    trace.push((col, 1.0));
                    psd.push(AffineRow::var(col));
                    bounds.push((0.0, 1.0));
                } else {
                    prob.set_objective(col, 2.0 * sigma[(i, j)]);
                    psd.push(AffineRow::new(vec![(col, SQRT2)], 0.0));
                    bounds.push((-1.0, 1.0));
                }
            }
        }
        prob.add_block(Cone::Zero(1), vec![AffineRow::new(trace, -1.0)]).unwrap();
        prob.add_block(Cone::Psd(d), psd).unwrap();
        prob.set_var_bounds(bounds).unwrap();
        prob
    }

    #[test]
    fn svec_round_trip_and_inner_product() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0]);
        let b = DMatrix::from_row_slice(3, 3, &[0.5, -1.0, 0.0, -1.0, 2.0, 1.5, 0.0, 1.5, -3.0]);
        assert_eq!(smat(svec(&a).as_slice(), 3), a);
        let frob: f64 = a.component_mul(&b).sum();
        assert_abs_diff_eq!(svec(&a).dot(&svec(&b)), frob, epsilon = 1e-12);
        for j in 0..3 {
            for i in j..3 {
                let v = svec(&a);
                let expect = if i == j { a[(i, j)] } else { SQRT2 * a[(i, j)] };
                assert_abs_diff_eq!(v[svec_index(3, i, j)], expect, epsilon = 1e-15);
                assert_eq!(svec_index(3, i, j), svec_index(3, j, i));
            }
        }
    }

    #[test]
    fn projection_examples() {
        let v = project_cone(&Cone::Soc(3), &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(v, vec![0.5, 0.5, 0.0]);
        assert_eq!(project_cone(&Cone::NonNeg(2), &[-1.0, 2.0]).unwrap(), vec![0.0, 2.0]);
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let p = project_cone(&Cone::Psd(2), svec(&m).as_slice()).unwrap();
        let expect = svec(&DMatrix::from_element(2, 2, 0.5));
        for (a, b) in p.iter().zip(expect.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        assert!(matches!(project_cone(&Cone::NonNeg(3), &[1.0]), Err(SpcaError::Contract(_))));
    }

    #[test]
    fn rsoc_projection_lands_in_cone() {
        let v = project_cone(&Cone::Rsoc(3), &[-1.0, 0.5, 2.0]).unwrap();
        assert!(v[0] >= -1e-12 && v[1] >= -1e-12);
        assert!(v[2] * v[2] <= 2.0 * v[0] * v[1] + 1e-12);
        let inside = [2.0, 1.0, 1.5];
        let back = project_cone(&Cone::Rsoc(3), &inside).unwrap();
        for (a, b) in back.iter().zip(inside.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn lambda_max_of_sigma3() {
        let s = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.5, 1.5]);
        let sol = solve_conic(&lambda_max_problem(&s), &SolverSettings::default()).unwrap();
        assert_eq!(sol.status, ConicStatus::Solved);
        assert_abs_diff_eq!(sol.objective_value, 2.0, epsilon = 1e-5);
        assert!(sol.bound_certified);
        assert!(sol.upper_bound >= 2.0 - 1e-9);
        assert!(sol.upper_bound <= 2.0 + 1e-4);
    }

    #[test]
    fn box_and_nonneg() {
        // max x s.t. x ≤ 3 (box), x ≥ 0
        let mut prob = ConicProblem::new(1);
        prob.set_objective(0, 1.0);
        prob.add_block(Cone::NonNeg(1), vec![AffineRow::var(0)]).unwrap();
        prob.add_block(Cone::Box { lower: vec![-10.0], upper: vec![3.0] }, vec![AffineRow::var(0)]).unwrap();
        let sol = solve_conic(&prob, &SolverSettings::default()).unwrap();
        assert_eq!(sol.status, ConicStatus::Solved);
        assert_abs_diff_eq!(sol.objective_value, 3.0, epsilon = 1e-5);
        // the box multiplier is the shadow price of the upper limit
        assert_abs_diff_eq!(sol.dual[1], -1.0, epsilon = 1e-4);
    }

    #[test]
    fn rsoc_feasibility() {
        // ‖(1, 1)‖² ≤ 2ab with a + b = 2
        let mut prob = ConicProblem::new(2);
        prob.add_block(Cone::Zero(1), vec![AffineRow::new(vec![(0, 1.0), (1, 1.0)], -2.0)]).unwrap();
        prob.add_block(
            Cone::Rsoc(4),
            vec![
                AffineRow::var(0),
                AffineRow::var(1),
                AffineRow::new(vec![], 1.0),
                AffineRow::new(vec![], 1.0),
            ],
        )
        .unwrap();
        let sol = solve_conic(&prob, &SolverSettings::default()).unwrap();
        assert_eq!(sol.status, ConicStatus::Solved);
        assert!(sol.primal_residual <= 1e-6);
        let (a, b) = (sol.primal[0], sol.primal[1]);
        assert!(2.0 * a * b >= 2.0 - 1e-4);
    }

    #[test]
    fn soc_objective() {
        // max x₁ + x₂ s.t. ‖(x₁, x₂)‖ ≤ 1  →  √2
        let mut prob = ConicProblem::new(2);
        prob.set_objective(0, 1.0);
        prob.set_objective(1, 1.0);
        prob.add_block(
            Cone::Soc(3),
            vec![AffineRow::new(vec![], 1.0), AffineRow::var(0), AffineRow::var(1)],
        )
        .unwrap();
        prob.set_var_bounds(vec![(-1.0, 1.0); 2]).unwrap();
        let sol = solve_conic(&prob, &SolverSettings::default()).unwrap();
        assert_eq!(sol.status, ConicStatus::Solved);
        assert_abs_diff_eq!(sol.objective_value, SQRT2, epsilon = 1e-5);
        assert!(sol.upper_bound >= SQRT2 - 1e-9);
    }

    #[test]
    fn warm_start_converges_quickly() {
        let s = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.0, 0.5, 0.1, 0.5, 1.5]);
        let prob = lambda_max_problem(&s);
        let cold = solve_conic(&prob, &SolverSettings::default()).unwrap();
        let warm = solve_conic_warm(&prob, &SolverSettings::default(), Some((&cold.primal, &cold.dual))).unwrap();
        assert_eq!(warm.status, ConicStatus::Solved);
        assert!(warm.iterations <= cold.iterations);
        assert_abs_diff_eq!(warm.objective_value, cold.objective_value, epsilon = 1e-5);
    }

    #[test]
    fn dimension_mismatch_is_contract_error() {
        let mut prob = ConicProblem::new(2);
        assert!(prob.add_block(Cone::NonNeg(2), vec![AffineRow::var(0)]).is_err());
        assert!(prob.add_block(Cone::NonNeg(1), vec![AffineRow::var(5)]).is_err());
        assert!(prob.set_var_bounds(vec![(0.0, 1.0)]).is_err());
    }
}
