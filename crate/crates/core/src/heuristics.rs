//! Feasible points: truncated power method, forward greedy and diagonal sorting.

use nalgebra::DVector;

use crate::error::Result;
use crate::instance::{Budget, Instance};
use crate::subproblem::{eval_indices, restricted_eigpair, Support};

pub const TPM_MAX_ITER: usize = 1000;
pub const TPM_TOL: f64 = 1e-8;

/// Unit vector supported on at most `k` coordinates.
#[derive(Debug, Clone)]
pub struct FeasiblePoint {
    pub support: Support,
    pub x: DVector<f64>,
    pub objective: f64,
}

impl FeasiblePoint {
    /// Restricted leading eigenvector on `chosen` (must be non-empty).
    pub fn from_indices(inst: &Instance, k: Budget, chosen: &[usize]) -> Result<Self> {
        let mut idx = chosen.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let support = Support::complete(inst.p(), k.get(), &idx)?;
        if idx.is_empty() {
            return Err(crate::SpcaError::Domain("empty support".into()));
        }
        let (objective, x) = restricted_eigpair(inst.sigma(), &idx);
        Ok(Self {
            support,
            x,
            objective,
        })
    }

    pub fn chosen(&self) -> Vec<usize> {
        self.support.chosen()
    }
}

/// Indices of the `k` largest values, ties to the smaller index, returned sorted.
pub fn top_k_indices(values: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    order
}

fn rayleigh(inst: &Instance, x: &DVector<f64>) -> f64 {
    x.dot(&(inst.sigma() * x))
}

fn truncate(v: &DVector<f64>, k: usize) -> (Vec<usize>, DVector<f64>) {
    let mags: Vec<f64> = v.iter().map(|a| a.abs()).collect();
    let keep = top_k_indices(&mags, k);
    let mut out = DVector::zeros(v.len());
    for &i in &keep {
        out[i] = v[i];
    }
    (keep, out)
}

fn default_start(inst: &Instance, k: usize) -> DVector<f64> {
    let diag: Vec<f64> = (0..inst.p()).map(|i| inst.sigma()[(i, i)]).collect();
    let mut x = DVector::zeros(inst.p());
    for i in top_k_indices(&diag, k) {
        x[i] = 1.0;
    }
    x.normalize()
}

/// Truncated power method followed by a restricted eigensolve on the final support.
pub fn truncated_power_method(
    inst: &Instance,
    k: Budget,
    x0: Option<&DVector<f64>>,
    max_iter: usize,
    tol: f64,
) -> FeasiblePoint {
    let k_val = k.get();
    let start = match x0 {
        Some(v) if v.len() == inst.p() && v.norm() > 0.0 => truncate(v, k_val).1,
        _ => default_start(inst, k_val),
    };
    let mut x = if start.norm() > 0.0 {
        start.normalize()
    } else {
        default_start(inst, k_val)
    };
    let mut support = truncate(&x, k_val).0;
    let mut objective = rayleigh(inst, &x);

    for _ in 0..max_iter {
        let y = inst.sigma() * &x;
        let (next_support, t) = truncate(&y, k_val);
        let norm = t.norm();
        if !(norm > 0.0) {
            break;
        }
        let next = t / norm;
        let next_obj = rayleigh(inst, &next);
        // truncation can lose mass; stop rather than accept a worse iterate
        if next_obj < objective - 1e-12 * objective.abs().max(1.0) {
            break;
        }
        let stable = next_support == support;
        let change = (next_obj - objective).abs();
        x = next;
        support = next_support;
        objective = next_obj;
        if stable && change < tol {
            break;
        }
    }

    let chosen: Vec<usize> = support.into_iter().filter(|&i| x[i] != 0.0).collect();
    let chosen = if chosen.is_empty() {
        top_k_indices(&(0..inst.p()).map(|i| inst.sigma()[(i, i)]).collect::<Vec<_>>(), k_val)
    } else {
        chosen
    };
    let point = FeasiblePoint::from_indices(inst, k, &chosen).expect("non-empty support");
    debug_assert!(point.objective >= objective - 1e-9 * objective.abs().max(1.0));
    point
}

pub fn tpm_default(inst: &Instance, k: Budget) -> FeasiblePoint {
    truncated_power_method(inst, k, None, TPM_MAX_ITER, TPM_TOL)
}

/// Grow the support one index at a time, each step maximizing `f`.
pub fn forward_greedy(inst: &Instance, k: Budget) -> FeasiblePoint {
    let sigma = inst.sigma();
    let p = inst.p();
    let diag: Vec<f64> = (0..p).map(|i| sigma[(i, i)]).collect();
    let mut chosen = top_k_indices(&diag, 1);
    let mut in_set = vec![false; p];
    in_set[chosen[0]] = true;
    while chosen.len() < k.get() {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..p {
            if in_set[j] {
                continue;
            }
            let mut trial = chosen.clone();
            trial.push(j);
            trial.sort_unstable();
            let v = eval_indices(sigma, &trial);
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((j, v));
            }
        }
        let (j, _) = best.expect("k ≤ p leaves a candidate");
        in_set[j] = true;
        chosen.push(j);
        chosen.sort_unstable();
    }
    FeasiblePoint::from_indices(inst, k, &chosen).expect("non-empty support")
}

/// Keep the `k` largest diagonal entries.
pub fn sorting_baseline(inst: &Instance, k: Budget) -> FeasiblePoint {
    let diag: Vec<f64> = (0..inst.p()).map(|i| inst.sigma()[(i, i)]).collect();
    FeasiblePoint::from_indices(inst, k, &top_k_indices(&diag, k.get())).expect("non-empty support")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Source;
    use nalgebra::DMatrix;

    fn sigma3() -> Instance {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.5, 1.5]);
        Instance::new("sigma3", Source::RawCovariance, m).unwrap()
    }

    fn check_point(inst: &Instance, pt: &FeasiblePoint, k: usize) {
        assert!(pt.support.n_chosen() <= k);
        assert!((pt.x.norm() - 1.0).abs() <= 1e-10);
        for i in 0..inst.p() {
            if !pt.support.is_chosen(i) {
                assert_eq!(pt.x[i], 0.0);
            }
        }
        assert!(pt.objective <= inst.lambda_max() + 1e-9);
    }

    #[test]
    fn tpm_examples() {
        let d = Instance::new(
            "d",
            Source::RawCovariance,
            DMatrix::from_diagonal(&DVector::from_row_slice(&[3.0, 2.0, 1.0])),
        )
        .unwrap();
        let pt = tpm_default(&d, Budget::new(1, 3).unwrap());
        assert_eq!(pt.chosen(), vec![0]);
        assert_eq!(pt.objective, 3.0);

        let s3 = sigma3();
        let pt = tpm_default(&s3, Budget::new(2, 3).unwrap());
        assert!(pt.chosen() == vec![0, 1] || pt.chosen() == vec![0, 2]);
        assert!((pt.objective - 2.0).abs() < 1e-12);
        check_point(&s3, &pt, 2);

        let id = Instance::new("i", Source::RawCovariance, DMatrix::identity(5, 5)).unwrap();
        let pt = tpm_default(&id, Budget::new(3, 5).unwrap());
        assert!((pt.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn greedy_examples() {
        let s3 = sigma3();
        let pt = forward_greedy(&s3, Budget::new(2, 3).unwrap());
        assert_eq!(pt.chosen(), vec![0, 1]);
        assert!((pt.objective - 2.0).abs() < 1e-12);
        check_point(&s3, &pt, 2);

        let d = Instance::new(
            "d",
            Source::RawCovariance,
            DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, 4.0, 2.0, 3.0])),
        )
        .unwrap();
        let k = Budget::new(2, 4).unwrap();
        let pt = forward_greedy(&d, k);
        // every augmentation ties at f = 4, so the smallest index joins
        assert_eq!(pt.chosen(), vec![0, 1]);
        assert_eq!(pt.objective, 4.0);
        assert_eq!(pt.objective, sorting_baseline(&d, k).objective);
    }

    #[test]
    fn sorting_examples() {
        let s3 = sigma3();
        let pt = sorting_baseline(&s3, Budget::new(2, 3).unwrap());
        assert_eq!(pt.chosen(), vec![0, 2]);
        assert_eq!(pt.objective, 2.0);

        let corr = Instance::new(
            "c",
            Source::RawCovariance,
            DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.1, 0.2, 1.0, 0.3, 0.1, 0.3, 1.0]),
        )
        .unwrap();
        assert_eq!(sorting_baseline(&corr, Budget::new(2, 3).unwrap()).chosen(), vec![0, 1]);
    }

    #[test]
    fn top_k_ties_prefer_small_indices() {
        assert_eq!(top_k_indices(&[1.0, 2.0, 2.0, 2.0], 2), vec![1, 2]);
        assert_eq!(top_k_indices(&[0.9, 0.5, 0.6], 2), vec![0, 2]);
    }
}
