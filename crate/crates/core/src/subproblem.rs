//! Value function, dual certificates and outer-approximation cuts.
//!
//! For a support `z`, `f(z)` is the leading eigenvalue of the principal
//! submatrix of Σ indexed by `z`. A dual certificate `(λ, α, β)` with
//! `λI + α ⪰ Σ` proves `f(z') ≤ λ + Σ_i z'_i g_i` for every binary `z'` with
//! `|z'| ≤ k`, where `g_i = Σ_j M_ij max(0, |α_ij| − β_i) + √k β_i`,
//! `M_ii = 1` and `M_ij = 1/2` otherwise. Since `α` and `β` vanish on the
//! chosen indices the resulting cut is tight (up to the inflation `ε`) at the
//! support it was generated from.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SpcaError};
use crate::instance::Instance;
use crate::linalg;

/// Default inflation schedule, in units of `λ_max(Σ)`.
pub const DEFAULT_EPS_SCHEDULE: [f64; 3] = [0.0, 1e-8, 1e-6];

/// A certificate is accepted when `λ_min(λI + α − Σ) ≥ −FEASIBILITY_TOL·λ_max(Σ)`.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// Big-M coefficient of the `|X_ij| ≤ M_ij z_i` constraints.
pub fn big_m_coefficient(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fix {
    Free,
    Chosen,
    Excluded,
}

/// Selection state of every coordinate plus the cardinality budget.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Support {
    state: Vec<Fix>,
    k: usize,
}

impl Support {
    /// Every coordinate free.
    pub fn root(p: usize, k: usize) -> Self {
        Self {
            state: vec![Fix::Free; p],
            k,
        }
    }

    /// Complete support selecting `chosen` and excluding everything else.
    pub fn complete(p: usize, k: usize, chosen: &[usize]) -> Result<Self> {
        let mut state = vec![Fix::Excluded; p];
        for &i in chosen {
            if i >= p {
                return Err(SpcaError::Contract(format!("index {i} out of range for p = {p}")));
            }
            state[i] = Fix::Chosen;
        }
        let s = Self { state, k };
        if s.n_chosen() > k {
            return Err(SpcaError::Contract(format!(
                "support selects {} indices, budget is {k}",
                s.n_chosen()
            )));
        }
        Ok(s)
    }

    /// Complete support from a 0/1 mask.
    pub fn from_mask(mask: &[bool], k: usize) -> Result<Self> {
        let chosen: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
        Self::complete(mask.len(), k, &chosen)
    }

    pub fn p(&self) -> usize {
        self.state.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn state(&self, i: usize) -> Fix {
        self.state[i]
    }

    pub fn states(&self) -> &[Fix] {
        &self.state
    }

    pub fn set(&mut self, i: usize, fix: Fix) {
        self.state[i] = fix;
    }

    pub fn with(&self, i: usize, fix: Fix) -> Self {
        let mut s = self.clone();
        s.state[i] = fix;
        s
    }

    fn indices(&self, which: Fix) -> Vec<usize> {
        (0..self.p()).filter(|&i| self.state[i] == which).collect()
    }

    pub fn chosen(&self) -> Vec<usize> {
        self.indices(Fix::Chosen)
    }

    pub fn excluded(&self) -> Vec<usize> {
        self.indices(Fix::Excluded)
    }

    pub fn free(&self) -> Vec<usize> {
        self.indices(Fix::Free)
    }

    pub fn n_chosen(&self) -> usize {
        self.state.iter().filter(|&&f| f == Fix::Chosen).count()
    }

    pub fn n_free(&self) -> usize {
        self.state.iter().filter(|&&f| f == Fix::Free).count()
    }

    pub fn is_complete(&self) -> bool {
        self.state.iter().all(|&f| f != Fix::Free)
    }

    pub fn is_chosen(&self, i: usize) -> bool {
        self.state[i] == Fix::Chosen
    }

    pub fn mask(&self) -> Vec<bool> {
        self.state.iter().map(|&f| f == Fix::Chosen).collect()
    }
}

fn require_complete(s: &Support) -> Result<()> {
    if !s.is_complete() {
        return Err(SpcaError::Contract("operation requires a complete support".into()));
    }
    Ok(())
}

fn require_nonempty(chosen: &[usize]) -> Result<()> {
    if chosen.is_empty() {
        return Err(SpcaError::Domain(
            "the empty support has no feasible unit vector".into(),
        ));
    }
    Ok(())
}

fn require_dim(inst: &Instance, s: &Support) -> Result<()> {
    if inst.p() != s.p() {
        return Err(SpcaError::Contract(format!(
            "support has dimension {} but the instance has p = {}",
            s.p(),
            inst.p()
        )));
    }
    Ok(())
}

/// Leading eigenvalue of `Σ[idx, idx]`.
pub fn eval_indices(sigma: &DMatrix<f64>, idx: &[usize]) -> f64 {
    match idx.len() {
        0 => f64::NEG_INFINITY,
        1 => sigma[(idx[0], idx[0])],
        _ => linalg::lambda_max(&linalg::principal_submatrix(sigma, idx)),
    }
}

/// Restricted leading eigenpair, padded back to a p-vector.
pub fn restricted_eigpair(sigma: &DMatrix<f64>, idx: &[usize]) -> (f64, DVector<f64>) {
    let p = sigma.nrows();
    let mut x = DVector::zeros(p);
    if idx.len() == 1 {
        x[idx[0]] = 1.0;
        return (sigma[(idx[0], idx[0])], x);
    }
    let (value, v) = linalg::leading_eigpair_unchecked(&linalg::principal_submatrix(sigma, idx));
    for (pos, &i) in idx.iter().enumerate() {
        x[i] = v[pos];
    }
    (value, x)
}

/// `f(z)` for a complete support.
pub fn eval_f(inst: &Instance, s: &Support) -> Result<f64> {
    require_dim(inst, s)?;
    require_complete(s)?;
    let chosen = s.chosen();
    require_nonempty(&chosen)?;
    Ok(eval_indices(inst.sigma(), &chosen))
}

#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub lambda: f64,
    /// Nonzero only on the excluded × excluded block.
    pub alpha: DMatrix<f64>,
    /// Nonzero only on excluded indices.
    pub beta: DVector<f64>,
    /// Inflation added to `λ_max(Σ₁₁)`.
    pub epsilon: f64,
    /// `max(0, −λ_min(λI + α − Σ))`.
    pub feasibility_residual: f64,
}

/// Minimizer of `φ(β) = Σ_j w_j max(0, a_j − β) + √k β` over `β ≥ 0` and the
/// minimum value. `a_j ≥ 0`. Ties go to the smaller `β`.
pub fn minimize_row_penalty(entries: &[(f64, f64)], sqrt_k: f64) -> (f64, f64) {
    let phi = |beta: f64| -> f64 {
        entries
            .iter()
            .map(|&(a, w)| w * (a - beta).max(0.0))
            .sum::<f64>()
            + sqrt_k * beta
    };
    let mut sorted: Vec<(f64, f64)> = entries.iter().copied().filter(|&(a, _)| a > 0.0).collect();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    // right-derivative at β is √k − Σ_{a_j > β} w_j, non-decreasing in β
    let mut active: f64 = sorted.iter().map(|&(_, w)| w).sum();
    if sqrt_k - active >= 0.0 {
        return (0.0, phi(0.0));
    }
    let mut idx = 0;
    while idx < sorted.len() {
        let bp = sorted[idx].0;
        while idx < sorted.len() && sorted[idx].0 <= bp {
            active -= sorted[idx].1;
            idx += 1;
        }
        if sqrt_k - active >= 0.0 {
            return (bp, phi(bp));
        }
    }
    // unreachable for finite inputs: past the largest breakpoint the slope is √k > 0
    let last = sorted.last().map_or(0.0, |e| e.0);
    (last, phi(last))
}

fn row_entries(alpha: &DMatrix<f64>, i: usize, excluded: &[usize]) -> Vec<(f64, f64)> {
    excluded
        .iter()
        .map(|&j| (alpha[(i, j)].abs(), big_m_coefficient(i, j)))
        .collect()
}

/// Closed-form dual certificate for a complete support, escalating the
/// inflation `ε` along `eps_schedule` (relative to `λ_max(Σ)`) until the
/// assembled dual matrix is PSD within tolerance.
pub fn dual_certificate(
    inst: &Instance,
    s: &Support,
    eps_schedule: &[f64],
) -> Result<DualCertificate> {
    require_dim(inst, s)?;
    require_complete(s)?;
    let chosen = s.chosen();
    require_nonempty(&chosen)?;
    let excluded = s.excluded();
    let sigma = inst.sigma();
    let p = inst.p();
    let scale = inst.lambda_max().max(f64::MIN_POSITIVE);
    let tol = FEASIBILITY_TOL * scale;
    let sqrt_k = (s.k() as f64).sqrt();

    let s11 = linalg::principal_submatrix(sigma, &chosen);
    let eig11 = linalg::sym_eig_unchecked(&s11);
    let top = eig11.max_value();

    if excluded.is_empty() {
        let lambda = top;
        let mut dual = DMatrix::from_diagonal_element(p, p, lambda) - sigma;
        linalg::symmetrize_in_place(&mut dual);
        let residual = (-linalg::sym_eig_unchecked(&dual).min_value()).max(0.0);
        return Ok(DualCertificate {
            lambda,
            alpha: DMatrix::zeros(p, p),
            beta: DVector::zeros(p),
            epsilon: 0.0,
            feasibility_residual: residual,
        });
    }

    let s12 = linalg::submatrix(sigma, &chosen, &excluded);
    let s22 = linalg::principal_submatrix(sigma, &excluded);
    let c = chosen.len();
    let e = excluded.len();

    let mut best_residual = f64::INFINITY;
    for &rel in eps_schedule {
        let epsilon = rel * scale;
        let lambda = top + epsilon;
        let inv = if epsilon == 0.0 {
            let shifted = DMatrix::from_diagonal_element(c, c, lambda) - &s11;
            linalg::pinv_psd(&shifted, linalg::DEFAULT_RANK_TOL)
                .unwrap_or_else(|_| linalg::pinv_from_eig(&linalg::sym_eig_unchecked(&shifted), linalg::DEFAULT_RANK_TOL))
        } else {
            eig11.reconstruct_with(|mu| 1.0 / (lambda - mu))
        };
        let schur = s12.transpose() * &inv * &s12;
        let mut alpha22 = &s22 - DMatrix::from_diagonal_element(e, e, lambda) + &schur;
        linalg::symmetrize_in_place(&mut alpha22);

        // λI + α − Σ in chosen-then-excluded order
        let mut dual = DMatrix::zeros(p, p);
        for a in 0..c {
            for b in 0..c {
                dual[(a, b)] = -s11[(a, b)];
            }
            dual[(a, a)] += lambda;
            for b in 0..e {
                dual[(a, c + b)] = -s12[(a, b)];
                dual[(c + b, a)] = -s12[(a, b)];
            }
        }
        for a in 0..e {
            for b in 0..e {
                dual[(c + a, c + b)] = schur[(a, b)];
            }
        }
        linalg::symmetrize_in_place(&mut dual);
        let residual = (-linalg::sym_eig_unchecked(&dual).min_value()).max(0.0);
        if residual <= tol {
            let mut alpha = DMatrix::zeros(p, p);
            for (a, &i) in excluded.iter().enumerate() {
                for (b, &j) in excluded.iter().enumerate() {
                    alpha[(i, j)] = alpha22[(a, b)];
                }
            }
            let mut beta = DVector::zeros(p);
            for &i in &excluded {
                beta[i] = minimize_row_penalty(&row_entries(&alpha, i, &excluded), sqrt_k).0;
            }
            return Ok(DualCertificate {
                lambda,
                alpha,
                beta,
                epsilon,
                feasibility_residual: residual,
            });
        }
        best_residual = best_residual.min(residual);
    }
    Err(SpcaError::Certificate { best_residual })
}

/// Affine overestimator `θ ≤ value + gradᵀ(z − base)` of `f`.
#[derive(Debug, Clone)]
pub struct Cut {
    pub base: Support,
    pub value: f64,
    pub grad: DVector<f64>,
}

impl Cut {
    /// Cut evaluated at a 0/1 mask.
    pub fn eval_mask(&self, mask: &[bool]) -> f64 {
        let mut v = self.value;
        for (i, &on) in mask.iter().enumerate() {
            let base = if self.base.is_chosen(i) { 1.0 } else { 0.0 };
            let zi = if on { 1.0 } else { 0.0 };
            v += self.grad[i] * (zi - base);
        }
        v
    }
}

pub fn make_cut(inst: &Instance, s: &Support, cert: &DualCertificate) -> Cut {
    let sqrt_k = (s.k() as f64).sqrt();
    let excluded = s.excluded();
    let mut grad = DVector::zeros(inst.p());
    for &i in &excluded {
        let entries = row_entries(&cert.alpha, i, &excluded);
        let beta = cert.beta[i];
        grad[i] = entries
            .iter()
            .map(|&(a, w)| w * (a - beta).max(0.0))
            .sum::<f64>()
            + sqrt_k * beta;
    }
    Cut {
        base: s.clone(),
        value: cert.lambda,
        grad,
    }
}

/// Certificate and cut in one step with the default schedule.
pub fn cut_at(inst: &Instance, s: &Support) -> Result<(Cut, DualCertificate)> {
    let cert = dual_certificate(inst, s, &DEFAULT_EPS_SCHEDULE)?;
    let cut = make_cut(inst, s, &cert);
    Ok((cut, cert))
}
