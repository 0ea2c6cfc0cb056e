//! Dense symmetric kernels shared by the solvers.
//!
//! Everything here works on full `DMatrix<f64>` storage. Eigenvalues are
//! returned in ascending order and every eigenvector is sign-normalized so
//! that its first non-negligible component is positive; together with a
//! stable sort this makes the output a deterministic function of the input
//! bits.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SpcaError};

/// Relative symmetry tolerance accepted by the checked entry points.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Default relative rank cutoff for [`pinv_psd`].
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending eigenvalues.
    pub values: DVector<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn max_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    /// Rebuilds `Q diag(f(λ)) Qᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.values[j]);
        }
        let mut out = DMatrix::zeros(n, n);
        out.gemm(1.0, &scaled, &self.vectors.transpose(), 0.0);
        symmetrize_in_place(&mut out);
        out
    }
}

/// Largest absolute asymmetry `max |M_ij − M_ji|`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

pub fn symmetrize_in_place(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(SpcaError::Contract(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Err(SpcaError::Contract("empty matrix".into()));
    }
    let asym = asymmetry(m);
    let scale = max_abs(m).max(1.0);
    if !(asym <= SYMMETRY_TOL * scale) {
        return Err(SpcaError::Contract(format!(
            "matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    Ok(())
}

/// Full spectral decomposition of a symmetric matrix.
pub fn sym_eig(m: &DMatrix<f64>) -> Result<EigenDecomposition> {
    check_symmetric(m)?;
    Ok(sym_eig_unchecked(m))
}

/// [`sym_eig`] without the symmetry check, for callers that build the input
/// symmetric by construction (principal submatrices, assembled duals).
pub fn sym_eig_unchecked(m: &DMatrix<f64>) -> EigenDecomposition {
    let n = m.nrows();
    if n == 1 {
        return EigenDecomposition {
            values: DVector::from_element(1, m[(0, 0)]),
            vectors: DMatrix::from_element(1, 1, 1.0),
        };
    }
    let mut sym = m.clone();
    symmetrize_in_place(&mut sym);
    let fm = faer::Mat::<f64>::from_fn(n, n, |i, j| sym[(i, j)]);
    // faer returns eigenvalues in nondecreasing order
    let eig = fm.selfadjoint_eigendecomposition(faer::Side::Lower);
    let (s, u) = (eig.s().column_vector(), eig.u());
    let values = DVector::from_fn(n, |i, _| s.read(i));
    let mut vectors = DMatrix::from_fn(n, n, |i, j| u.read(i, j));
    for mut col in vectors.column_iter_mut() {
        let mut v = col.clone_owned();
        normalize_sign(&mut v);
        col.copy_from(&v);
    }
    EigenDecomposition { values, vectors }
}

/// Flips `v` so that its first component with magnitude above 1e-12·‖v‖∞ is
/// positive.
pub fn normalize_sign(v: &mut DVector<f64>) {
    let scale = v.amax();
    if scale == 0.0 {
        return;
    }
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * scale) {
        if *first < 0.0 {
            v.neg_mut();
        }
    }
}

/// Leading eigenvalue and a unit eigenvector.
///
/// Among eigenvalues tied with the maximum (within 1e-12 relative) the one
/// listed first by the stable ascending sort is returned.
pub fn leading_eigpair(m: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    check_symmetric(m)?;
    Ok(leading_eigpair_unchecked(m))
}

pub(crate) fn leading_eigpair_unchecked(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = sym_eig_unchecked(m);
    let n = eig.values.len();
    let top = eig.values[n - 1];
    let tie = 1e-12 * top.abs().max(1e-300);
    let idx = (0..n).find(|&i| eig.values[i] >= top - tie).unwrap_or(n - 1);
    (top, eig.vectors.column(idx).into_owned())
}

/// Largest eigenvalue only.
pub fn lambda_max(m: &DMatrix<f64>) -> f64 {
    sym_eig_unchecked(m).max_value()
}

/// Moore–Penrose pseudoinverse of a PSD matrix through its eigendecomposition.
/// Eigenvalues at or below `rank_tol · λ_max` are treated as zero.
pub fn pinv_psd(m: &DMatrix<f64>, rank_tol: f64) -> Result<DMatrix<f64>> {
    check_symmetric(m)?;
    Ok(pinv_from_eig(&sym_eig_unchecked(m), rank_tol))
}

pub(crate) fn pinv_from_eig(eig: &EigenDecomposition, rank_tol: f64) -> DMatrix<f64> {
    let top = eig.max_value().max(0.0);
    let cutoff = rank_tol * top;
    eig.reconstruct_with(|l| if l > cutoff && l > 0.0 { 1.0 / l } else { 0.0 })
}

/// Nearest PSD matrix in Frobenius norm. The input is symmetrized first.
pub fn project_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = sym_eig_unchecked(m);
    if eig.min_value() >= 0.0 {
        let mut out = m.clone();
        symmetrize_in_place(&mut out);
        return out;
    }
    eig.reconstruct_with(|l| l.max(0.0))
}

/// Principal submatrix `m[idx, idx]`, copied into contiguous storage.
pub fn principal_submatrix(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

/// Off-diagonal block `m[rows, cols]`.
pub fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}
