//! Eigenvalue upper bounds used for pruning.

use crate::error::{Result, SpcaError};
use crate::instance::{Budget, Instance};
use crate::subproblem::{Fix, Support};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Gershgorin,
    Cassini,
    BigM,
}

#[derive(Debug, Clone)]
pub struct BoundValue {
    pub value: f64,
    pub kind: BoundKind,
    pub support: Support,
}

/// Sum of the `m` largest values (all of them if fewer).
fn top_sum(values: &mut [f64], m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    if m < values.len() {
        values.select_nth_unstable_by(m - 1, |a, b| b.total_cmp(a));
        values[..m].iter().sum()
    } else {
        values.iter().sum()
    }
}

/// Largest column sum of the `k` largest absolute entries.
pub fn big_m(inst: &Instance, k: Budget) -> f64 {
    let sigma = inst.sigma();
    let p = inst.p();
    let mut col = vec![0.0; p];
    let mut best = f64::NEG_INFINITY;
    for j in 0..p {
        for i in 0..p {
            col[i] = sigma[(i, j)].abs();
        }
        best = best.max(top_sum(&mut col, k.get()));
    }
    best
}

fn require_complete_nonempty(s: &Support) -> Result<Vec<usize>> {
    if !s.is_complete() {
        return Err(SpcaError::Contract("bound requires a complete support".into()));
    }
    let chosen = s.chosen();
    if chosen.is_empty() {
        return Err(SpcaError::Domain("bound undefined for the empty support".into()));
    }
    Ok(chosen)
}

/// Largest absolute column sum of the chosen principal submatrix.
pub fn gershgorin_bound(inst: &Instance, s: &Support) -> Result<BoundValue> {
    let chosen = require_complete_nonempty(s)?;
    let sigma = inst.sigma();
    let value = chosen
        .iter()
        .map(|&j| chosen.iter().map(|&i| sigma[(i, j)].abs()).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BoundValue {
        value,
        kind: BoundKind::Gershgorin,
        support: s.clone(),
    })
}

/// Worst-case Gershgorin bound over all completions of a partial support.
pub fn gershgorin_node_bound(inst: &Instance, s: &Support, k: Budget) -> f64 {
    let sigma = inst.sigma();
    let chosen = s.chosen();
    let free = s.free();
    let room = k.get().saturating_sub(chosen.len());
    let mut buf = Vec::with_capacity(free.len());
    let mut best = f64::NEG_INFINITY;
    for j in 0..s.p() {
        if s.state(j) == Fix::Excluded {
            continue;
        }
        let forced: f64 = chosen.iter().map(|&i| sigma[(i, j)].abs()).sum();
        buf.clear();
        buf.extend(free.iter().map(|&i| sigma[(i, j)].abs()));
        best = best.max(forced + top_sum(&mut buf, room));
    }
    best
}

fn cassini_pair(dii: f64, djj: f64, ri: f64, rj: f64) -> f64 {
    if ri * rj == 0.0 {
        // the general formula rounds away from max(dii, djj)
        return dii.max(djj);
    }
    0.5 * (dii + djj) + 0.5 * ((dii - djj).powi(2) + 4.0 * ri * rj).sqrt()
}

/// Pairwise oval bound over the chosen principal submatrix.
pub fn cassini_bound(inst: &Instance, s: &Support) -> Result<BoundValue> {
    let chosen = require_complete_nonempty(s)?;
    let sigma = inst.sigma();
    let value = if chosen.len() == 1 {
        sigma[(chosen[0], chosen[0])]
    } else {
        let radius: Vec<f64> = chosen
            .iter()
            .map(|&i| {
                chosen
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| sigma[(i, j)].abs())
                    .sum()
            })
            .collect();
        let mut best = f64::NEG_INFINITY;
        for a in 0..chosen.len() {
            for b in 0..a {
                let (i, j) = (chosen[a], chosen[b]);
                best = best.max(cassini_pair(sigma[(i, i)], sigma[(j, j)], radius[a], radius[b]));
            }
        }
        best
    };
    Ok(BoundValue {
        value,
        kind: BoundKind::Cassini,
        support: s.clone(),
    })
}

/// Upper bound on `cassini_bound` over all completions of a partial support.
///
/// Each radius is replaced by its largest value over completions, which keeps
/// every pair term an overestimate since the oval bound is increasing in the
/// radii. Singleton completions contribute their diagonal.
pub fn cassini_node_bound(inst: &Instance, s: &Support, k: Budget) -> f64 {
    let sigma = inst.sigma();
    let chosen = s.chosen();
    let free = s.free();
    let room = k.get().saturating_sub(chosen.len());
    let candidates: Vec<usize> = (0..s.p()).filter(|&i| s.state(i) != Fix::Excluded).collect();
    let mut best = f64::NEG_INFINITY;
    if chosen.len() <= 1 {
        for &i in &candidates {
            best = best.max(sigma[(i, i)]);
        }
    }
    if k.get() < 2 || candidates.len() < 2 {
        return best;
    }
    let mut buf = Vec::with_capacity(free.len());
    let radius: Vec<f64> = candidates
        .iter()
        .map(|&i| {
            let forced: f64 = chosen
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| sigma[(i, j)].abs())
                .sum();
            buf.clear();
            buf.extend(free.iter().filter(|&&j| j != i).map(|&j| sigma[(i, j)].abs()));
            forced + top_sum(&mut buf, room)
        })
        .collect();
    for a in 0..candidates.len() {
        for b in 0..a {
            let (i, j) = (candidates[a], candidates[b]);
            best = best.max(cassini_pair(sigma[(i, i)], sigma[(j, j)], radius[a], radius[b]));
        }
    }
    best
}

/// Ratio `max d / min d` of a scaled diagonal dominance witness `d > 0` for
/// the chosen submatrix, if the fixed-point search finds one.
pub fn sdd_ratio(inst: &Instance, s: &Support) -> Option<f64> {
    if !s.is_complete() {
        return None;
    }
    let chosen = s.chosen();
    if chosen.is_empty() {
        return None;
    }
    let sigma = inst.sigma();
    let m = chosen.len();
    let diag: Vec<f64> = chosen.iter().map(|&i| sigma[(i, i)]).collect();
    if diag.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let off = |a: usize, d: &[f64]| -> f64 {
        (0..m)
            .filter(|&b| b != a)
            .map(|b| d[b] * sigma[(chosen[a], chosen[b])].abs())
            .sum()
    };
    let dominated = |d: &[f64]| (0..m).all(|a| off(a, d) <= diag[a] * d[a] * (1.0 + 1e-12));
    let ratio = |d: &[f64]| {
        let hi = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
        hi / lo
    };

    let mut d = vec![1.0; m];
    if dominated(&d) {
        return Some(1.0);
    }
    for _ in 0..50 {
        // damped step; the plain map oscillates on bipartite patterns
        let mut next: Vec<f64> = (0..m).map(|a| 0.5 * (d[a] + off(a, &d) / diag[a])).collect();
        let hi = next.iter().cloned().fold(0.0, f64::max);
        if !(hi > 0.0) || next.iter().any(|&v| !(v > 0.0)) {
            return None;
        }
        for v in &mut next {
            *v /= hi;
        }
        d = next;
        if dominated(&d) {
            return Some(ratio(&d));
        }
    }
    None
}
