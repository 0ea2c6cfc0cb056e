//! Exhaustive enumeration of size-`k` supports.

use rayon::prelude::*;

use crate::error::{Result, SpcaError};
use crate::heuristics::FeasiblePoint;
use crate::instance::{Budget, Instance};
use crate::subproblem::eval_indices;

pub const DEFAULT_MAX_SUBSETS: u128 = 2_000_000;

/// `C(n, r)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // exact at every step: acc·(n−i) is divisible by (i+1)
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn better(value: f64, best: f64) -> bool {
    value > best + 1e-12 * best.abs().max(1.0)
}

/// Best support among those whose smallest index is `first`, in lexicographic order.
fn best_with_first(sigma: &nalgebra::DMatrix<f64>, p: usize, k: usize, first: usize) -> Option<(f64, Vec<usize>)> {
    if first + k > p {
        return None;
    }
    let mut idx: Vec<usize> = (first..first + k).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let v = eval_indices(sigma, &idx);
        if best.as_ref().map_or(true, |(b, _)| better(v, *b)) {
            best = Some((v, idx.clone()));
        }
        // advance positions 1..k, leaving idx[0] = first
        let mut pos = k;
        loop {
            if pos <= 1 {
                return best;
            }
            pos -= 1;
            if idx[pos] < p - k + pos {
                break;
            }
        }
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Optimal support by enumeration; ties go to the lexicographically smallest support.
pub fn brute_force(inst: &Instance, k: Budget, max_subsets: u128) -> Result<FeasiblePoint> {
    let p = inst.p();
    let k_val = k.get();
    let count = binomial(p, k_val);
    if count > max_subsets {
        return Err(SpcaError::Budget {
            p,
            k: k_val,
            count,
            budget: max_subsets,
        });
    }
    let sigma = inst.sigma();
    let partial: Vec<Option<(f64, Vec<usize>)>> = (0..p)
        .into_par_iter()
        .map(|first| best_with_first(sigma, p, k_val, first))
        .collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for cand in partial.into_iter().flatten() {
        if best.as_ref().map_or(true, |(b, _)| better(cand.0, *b)) {
            best = Some(cand);
        }
    }
    let (_, support) = best.expect("k ≤ p gives at least one subset");
    FeasiblePoint::from_indices(inst, k, &support)
}
