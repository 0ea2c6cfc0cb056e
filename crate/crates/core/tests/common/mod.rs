#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use spca::conic::{svec_index, AffineRow, Cone, ConicProblem};
use spca::instance::{Instance, Source};

/// Gram matrix of `n` Gaussian samples in dimension `p`, optionally rescaled to unit diagonal.
pub fn random_psd(p: usize, n: usize, seed: u64, correlation: bool) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut s = a.transpose() * &a / n as f64;
    if correlation {
        let d: Vec<f64> = (0..p).map(|i| s[(i, i)].sqrt()).collect();
        for i in 0..p {
            for j in 0..p {
                s[(i, j)] /= d[i] * d[j];
            }
        }
    }
    Instance::new(format!("random-{p}-{seed}"), Source::RawCovariance, s).unwrap()
}

/// Random PSD instance of mixed character: low rank, spiked or full rank.
pub fn random_instance(p: usize, seed: u64) -> Instance {
    match seed % 3 {
        0 => random_psd(p, p / 2 + 1, seed, false),
        1 => random_psd(p, 2 * p, seed, true),
        _ => random_psd(p, 3 * p, seed, false),
    }
}

pub fn diagonal(values: &[f64]) -> Instance {
    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(values));
    Instance::new("diagonal", Source::RawCovariance, m).unwrap()
}

/// All 0/1 masks of length `p` with between 1 and `k` ones.
pub fn masks(p: usize, k: usize) -> Vec<Vec<bool>> {
    (1u32..(1 << p))
        .filter(|b| (b.count_ones() as usize) <= k)
        .map(|b| (0..p).map(|i| b >> i & 1 == 1).collect())
        .collect()
}

/// `max ⟨Σ, X⟩ s.t. tr X = 1, X ⪰ 0` over the lower triangle of `X`; optimum `λ_max(Σ)`.
pub fn lambda_max_problem(sigma: &DMatrix<f64>) -> ConicProblem {
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
                psd.push(AffineRow::new(vec![(col, std::f64::consts::SQRT_2)], 0.0));
                bounds.push((-1.0, 1.0));
            }
        }
    }
    prob.add_block(Cone::Zero(1), vec![AffineRow::new(trace, -1.0)]).unwrap();
    prob.add_block(Cone::Psd(d), psd).unwrap();
    prob.set_var_bounds(bounds).unwrap();
    prob
}

/// Random symmetric matrix with `Σ_ii Σ_jj ≥ R_i R_j` for all `i ≠ j`.
pub fn doubly_dominant(p: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut m = DMatrix::zeros(p, p);
        for i in 0..p {
            for j in 0..i {
                let a: f64 = rng.gen_range(-1.0..1.0);
                m[(i, j)] = a;
                m[(j, i)] = a;
            }
        }
        let r: Vec<f64> = (0..p).map(|i| (0..p).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum()).collect();
        // some rows below their own radius, compensated by others above it
        for i in 0..p {
            m[(i, i)] = r[i] * rng.gen_range(0.7..2.0);
        }
        let ok = (0..p).all(|i| (0..i).all(|j| m[(i, i)] * m[(j, j)] >= r[i] * r[j]));
        if ok {
            return Instance::new(format!("ddd-{p}-{seed}"), Source::RawCovariance, m).unwrap();
        }
    }
}
